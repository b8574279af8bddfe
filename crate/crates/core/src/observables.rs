//! Transmission, reflection and transition probabilities derived from a
//! [`ScatteringSolution`].

use alloc::vec::Vec;

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::solver::{ScatteringSolution, C64};

fn entrance_index(sol: &ScatteringSolution, entrance: Channel) -> Result<usize> {
    sol.open_index(entrance).ok_or(Error::ClosedEntrance(entrance))
}

/// `T_c = sum_c' (k_c' / k_c) |delta_cc' + f_c'c|^2` over open channels.
pub fn partial_transmission(sol: &ScatteringSolution, entrance: Channel) -> Result<f64> {
    let c = entrance_index(sol, entrance)?;
    let kc = sol.momenta[c];
    let mut t = 0.0;
    for (r, &kr) in sol.momenta.iter().enumerate() {
        let mut a = sol.amplitude[(r, c)];
        if r == c {
            a += C64::new(1.0, 0.0);
        }
        t += kr / kc * a.norm_sqr();
    }
    Ok(t)
}

/// `R_c = sum_c' (k_c' / k_c) |f_c'c|^2`.
pub fn reflection(sol: &ScatteringSolution, entrance: Channel) -> Result<f64> {
    let c = entrance_index(sol, entrance)?;
    let kc = sol.momenta[c];
    Ok(sol
        .momenta
        .iter()
        .enumerate()
        .map(|(r, &kr)| kr / kc * sol.amplitude[(r, c)].norm_sqr())
        .sum())
}

/// Initial populations of the entrance channels.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationWeights {
    entries: Vec<(Channel, f64)>,
}

impl PopulationWeights {
    /// Normalizes the given weights to unit sum.
    pub fn new(entries: Vec<(Channel, f64)>) -> Result<Self> {
        if entries.iter().any(|(_, w)| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument("population weights must be finite and >= 0".into()));
        }
        let sum: f64 = entries.iter().map(|(_, w)| w).sum();
        if !(sum > 0.0) {
            return Err(Error::Domain("all population weights are zero".into()));
        }
        Ok(Self {
            entries: entries.into_iter().map(|(c, w)| (c, w / sum)).collect(),
        })
    }

    /// `W00 = 1 / (1 + r)`, `W20 = W02 = r / (2 (1 + r))` for `r = W2/W0`.
    pub fn from_excited_ratio(w2_over_w0: f64) -> Result<Self> {
        if !(w2_over_w0 >= 0.0) || !w2_over_w0.is_finite() {
            return Err(Error::InvalidArgument(alloc::format!("W2/W0 = {w2_over_w0} must be >= 0")));
        }
        let half = w2_over_w0 / 2.0;
        let mut entries = alloc::vec![(Channel::GROUND, 1.0)];
        if w2_over_w0 > 0.0 {
            entries.push((Channel { n1: 2, n2: 0 }, half));
            entries.push((Channel { n1: 0, n2: 2 }, half));
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[(Channel, f64)] {
        &self.entries
    }

    pub fn weight(&self, ch: Channel) -> f64 {
        self.entries.iter().find(|(c, _)| *c == ch).map_or(0.0, |(_, w)| *w)
    }
}

/// `T = sum_i W_i T_i` with every `T_i` taken from the same solution.
pub fn total_transmission(sol: &ScatteringSolution, weights: &PopulationWeights) -> Result<f64> {
    weighted_transmission(weights, |ch| partial_transmission(sol, ch))
}

/// `T = sum_i W_i T_i` with each `T_i` taken from the solution whose
/// entrance is `i` (every channel at the same collision energy).
pub fn total_transmission_over(sols: &[ScatteringSolution], weights: &PopulationWeights) -> Result<f64> {
    weighted_transmission(weights, |ch| {
        let sol = sols
            .iter()
            .find(|s| s.entrance == ch)
            .ok_or_else(|| Error::InvalidArgument(alloc::format!("no solution with entrance {ch}")))?;
        partial_transmission(sol, ch)
    })
}

fn weighted_transmission<F: FnMut(Channel) -> Result<f64>>(weights: &PopulationWeights, mut partial: F) -> Result<f64> {
    let mut t = 0.0;
    for &(ch, w) in weights.entries() {
        if w > 0.0 {
            t += w * partial(ch)?;
        }
    }
    Ok(t)
}

/// Entrance channels of manifold `n` open in `sol`; `n = 0` is the ground.
fn manifold_entrances(sol: &ScatteringSolution, n: u32) -> Vec<usize> {
    (0..sol.open.len()).filter(|&i| sol.open[i].manifold() == n).collect()
}

/// `P_nn' = 2 sum_{c' in n'} (k_c' / k_c) |f_c'c|^2`, averaged over the open
/// members `c` of the entrance manifold `n`.
pub fn transition_probability(sol: &ScatteringSolution, n: u32, n_prime: u32) -> Result<f64> {
    if n % 2 != 0 || n_prime % 2 != 0 {
        return Err(Error::InvalidArgument(alloc::format!("manifolds {n}, {n_prime} must be even")));
    }
    let entrances = manifold_entrances(sol, n);
    if entrances.is_empty() {
        return Err(Error::Domain(alloc::format!("entrance manifold {n} is closed")));
    }
    let mut sum = 0.0;
    for &c in &entrances {
        let kc = sol.momenta[c];
        for (r, ch) in sol.open.iter().enumerate() {
            if ch.manifold() == n_prime {
                sum += 2.0 * sol.momenta[r] / kc * sol.amplitude[(r, c)].norm_sqr();
            }
        }
    }
    Ok(sum / entrances.len() as f64)
}

/// Outgoing flux from `entrance` resolved by final manifold, elastic channel
/// included as `|1 + f|^2 + |f|^2`. The entries sum to one for a unitary S.
pub fn flux_budget(sol: &ScatteringSolution, entrance: Channel) -> Result<Vec<(u32, f64)>> {
    let c = entrance_index(sol, entrance)?;
    let kc = sol.momenta[c];
    let mut out: Vec<(u32, f64)> = Vec::new();
    for (r, ch) in sol.open.iter().enumerate() {
        let f = sol.amplitude[(r, c)];
        let w = sol.momenta[r] / kc;
        let flux = if r == c {
            (f + C64::new(1.0, 0.0)).norm_sqr() + f.norm_sqr()
        } else {
            2.0 * w * f.norm_sqr()
        };
        match out.iter_mut().find(|(m, _)| *m == ch.manifold()) {
            Some(slot) => slot.1 += flux,
            None => out.push((ch.manifold(), flux)),
        }
    }
    out.sort_by_key(|(m, _)| *m);
    Ok(out)
}

/// `max(|S^dagger S - I|_max, |K - K^T|_max / (1 + |K|_max), max_c |T_c + R_c - 1|)`.
pub fn unitarity_defect(sol: &ScatteringSolution) -> f64 {
    let kscale = 1.0 + sol.k_matrix.amax();
    let mut defect = sol
        .diagnostics
        .unitarity_defect
        .max(sol.diagnostics.k_asymmetry / kscale);
    for ch in &sol.open {
        let t = partial_transmission(sol, *ch).unwrap_or(f64::NAN);
        let r = reflection(sol, *ch).unwrap_or(f64::NAN);
        let d = (t + r - 1.0).abs();
        defect = if d.is_nan() { f64::NAN } else { defect.max(d) };
    }
    defect
}
