//! Bound and resonant dimer energies, CIR positions and the splitting of the
//! total-transmission minimum.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::banded::{inverse_iteration, Chain, ChainedBand, ShiftedSymmetric, SymBand, SymFactor};
use crate::channels::{threshold_energy, Channel};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::interaction::GaussianPotential;
use crate::numerics::{brent_root, golden_section_min, interior_minima};
use crate::observables::{partial_transmission, total_transmission_over, PopulationWeights};
use crate::solver::{ScatteringSolution, Solver};

/// Scan windows and refinement tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSettings {
    pub cir_window: (f64, f64),
    pub cir_points: usize,
    pub cir_tol: f64,
    pub im_zero_tol: f64,
    pub resonance_points: usize,
    pub resonance_tol: f64,
    pub split_window: (f64, f64),
    pub split_step: f64,
    pub split_tol: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            cir_window: (0.8, 2.2),
            cir_points: 57,
            cir_tol: 1e-3,
            im_zero_tol: 1e-4,
            resonance_points: 31,
            resonance_tol: 1e-4,
            split_window: (1.2, 1.8),
            split_step: 0.005,
            split_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Bound,
    Resonant,
}

impl SpectrumKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpectrumKind::Bound => "bound",
            SpectrumKind::Resonant => "resonant",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPoint {
    pub eta: f64,
    pub ratio: f64,
    pub kind: SpectrumKind,
    /// Threshold channel the point attaches to.
    pub branch: Channel,
    /// Total energy.
    pub energy: f64,
    /// `E_B` for bound points, `E_r - E_perp(0,0)` for resonant ones.
    pub gap: f64,
}

// ---------------------------------------------------------------------------
// Bound states

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundState {
    /// Lowest eigenvalue `E0`.
    pub energy: f64,
    /// `E_perp(0,0) - E0`.
    pub binding: f64,
    /// Difference between the last two extrapolation levels.
    pub error_estimate: f64,
    pub z_max: f64,
}

/// Growth factor of the cells past the coupling region.
const CELL_GROWTH: f64 = 1.05;
const MAX_CELL: f64 = 0.2;
/// Required decay `kappa * z_max` of the bound state at the outer wall.
const DECAY_LENGTHS: f64 = 20.0;

/// Longitudinal problem `-1/2 u'' + (D + depth * g(z) U) u = E u`.
struct Problem<'a> {
    thresholds: &'a [f64],
    unit: &'a DMatrix<f64>,
    depth: f64,
    range: f64,
    /// `u(0) = 0` instead of `u'(0) = 0`.
    odd: bool,
}

impl Problem<'_> {
    fn profile(&self, z: f64) -> f64 {
        let g = (-(z * z) / (self.range * self.range)).exp();
        if g < 1e-170 {
            0.0
        } else {
            g
        }
    }

    fn coupling_end(&self) -> f64 {
        let peak = self.depth * self.unit.amax();
        if !(peak > 1e-18) {
            return 0.0;
        }
        self.range * (peak / 1e-18).ln().sqrt()
    }

    /// Lower bound on the spectrum: the kinetic term is positive.
    fn lower_bound(&self) -> f64 {
        let n = self.thresholds.len();
        let mut lo = self.thresholds.iter().cloned().fold(f64::INFINITY, f64::min);
        for i in 0..n {
            let mut off = 0.0;
            for j in 0..n {
                if j != i {
                    off += (self.depth * self.unit[(i, j)]).abs();
                }
            }
            lo = lo.min(self.thresholds[i] + self.depth * self.unit[(i, i)] - off);
        }
        lo - 1.0
    }

    fn base_cells(&self, h: f64, z_max: f64) -> Vec<f64> {
        let z_c = self.coupling_end().max(4.0 * h).min(z_max);
        let mut cells = Vec::new();
        let n = (z_c / h).ceil() as usize;
        let hu = z_c / n as f64;
        cells.extend(core::iter::repeat(hu).take(n));
        let mut z = z_c;
        let mut cell = hu;
        while z < z_max {
            cell = (cell * CELL_GROWTH).min(MAX_CELL);
            if z + 1.5 * cell >= z_max {
                cell = z_max - z;
            }
            cells.push(cell);
            z += cell;
        }
        cells
    }

    /// Lumped linear finite elements, symmetrized with the lumped mass.
    /// Nodes past the coupling region decouple into one chain per channel.
    fn assemble(&self, cells: &[f64]) -> ChainedBand {
        let nch = self.thresholds.len();
        let nodes = cells.len(); // the outer node carries u = 0
        let first = if self.odd { 1 } else { 0 };
        let mut z = Vec::with_capacity(nodes);
        let mut acc = 0.0;
        for &c in cells {
            z.push(acc);
            acc += c;
        }
        let z_c = self.coupling_end();
        let inner_end = (first..nodes)
            .find(|&i| z[i] > z_c)
            .unwrap_or(nodes)
            .max(first + 1)
            .min(nodes);
        let mass = |i: usize| {
            let left = if i > 0 { cells[i - 1] } else { 0.0 };
            0.5 * (left + cells[i])
        };
        let diag = |i: usize| {
            let left = if i > 0 { 0.5 / cells[i - 1] } else { 0.0 };
            (left + 0.5 / cells[i]) / mass(i)
        };
        let off = |i: usize| -0.5 / cells[i] / (mass(i) * mass(i + 1)).sqrt();

        let mut core = SymBand::zeros((inner_end - first) * nch, nch);
        for i in first..inner_end {
            let row = i - first;
            let kin = diag(i);
            let g = self.profile(z[i]);
            for c in 0..nch {
                let p = row * nch + c;
                core.add(p, p, kin + self.thresholds[c]);
                if g != 0.0 {
                    for d in 0..=c {
                        let v = self.depth * g * self.unit[(c, d)];
                        if v != 0.0 {
                            core.add(p, row * nch + d, v);
                        }
                    }
                }
            }
            if i + 1 < inner_end {
                let o = off(i);
                for c in 0..nch {
                    core.add((row + 1) * nch + c, row * nch + c, o);
                }
            }
        }
        let last = inner_end - 1 - first;
        let chains = (0..nch)
            .map(|c| Chain {
                attach: last * nch + c,
                diag: (inner_end..nodes).map(|i| diag(i) + self.thresholds[c]).collect(),
                off: (inner_end..nodes).map(|i| off(i - 1)).collect(),
            })
            .collect();
        ChainedBand { core, chains }
    }

    fn count_below(&self, a: &ChainedBand, e: f64) -> Result<usize> {
        match a.factor(e) {
            Ok(f) => Ok(f.negative_count()),
            Err(_) => Ok(a.factor(e + 1e-12 * (1.0 + e.abs()))?.negative_count()),
        }
    }

    /// Lowest eigenvalue on one mesh, if below `ceiling`.
    fn lowest(&self, cells: &[f64], ceiling: f64, guess: Option<f64>) -> Result<Option<f64>> {
        let a = self.assemble(cells);
        let below = self.count_below(&a, ceiling)?;
        if below == 0 {
            return Ok(None);
        }
        let lo = match guess {
            Some(g) => {
                let mut delta = 1e-3 * (1.0 + g.abs());
                let mut s = g - delta;
                while self.count_below(&a, s)? > 0 {
                    delta *= 4.0;
                    s = g - delta;
                }
                s
            }
            None => {
                let (mut lo, mut hi) = (self.lower_bound(), ceiling);
                // with a single state below the ceiling, inverse iteration from
                // lo converges at rate (hi - lo) / (ceiling - lo)
                let narrow = |lo: f64, hi: f64| {
                    if below == 1 {
                        hi - lo <= 0.2 * (ceiling - hi)
                    } else {
                        hi - lo <= 1e-3 * (1.0 + lo.abs())
                    }
                };
                while !narrow(lo, hi) && hi - lo > 1e-12 * (1.0 + lo.abs()) {
                    let mid = 0.5 * (lo + hi);
                    if self.count_below(&a, mid)? == 0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        };
        // lo sits below the lowest eigenvalue, so the shifted matrix is definite
        let (e, _) = inverse_iteration(&a, lo, 1e-13, 2000)?;
        Ok((e < ceiling).then_some(e))
    }

    /// Lowest eigenvalue below `ceiling` extrapolated from meshes `h`, `h/2`,
    /// `h/4`.
    fn ground_state(&self, h: f64, z_max: f64, ceiling: f64) -> Result<Option<BoundState>> {
        let mut z_max = z_max;
        for _ in 0..4 {
            let base = self.base_cells(h, z_max);
            let Some(e1) = self.lowest(&base, ceiling, None)? else {
                return Ok(None);
            };
            let kappa = (2.0 * (ceiling - e1)).sqrt();
            if kappa * z_max < DECAY_LENGTHS {
                z_max = DECAY_LENGTHS / kappa;
                continue;
            }
            let split = |m: usize| -> Vec<f64> {
                base.iter()
                    .flat_map(|&c| core::iter::repeat(c / m as f64).take(m))
                    .collect()
            };
            let Some(e2) = self.lowest(&split(2), ceiling, Some(e1))? else {
                return Ok(None);
            };
            let Some(e4) = self.lowest(&split(4), ceiling, Some(e2))? else {
                return Ok(None);
            };
            let r1 = (4.0 * e2 - e1) / 3.0;
            let r2 = (4.0 * e4 - e2) / 3.0;
            let e = (16.0 * r2 - r1) / 15.0;
            if e >= ceiling {
                return Ok(None);
            }
            return Ok(Some(BoundState {
                energy: e,
                binding: ceiling - e,
                error_estimate: (e - r2).abs(),
                z_max,
            }));
        }
        Err(Error::Eigen("bound state too shallow for the outer wall".into()))
    }
}

/// Lowest even-parity eigenvalue of the coupled problem below `E_perp(0,0)`;
/// `None` when there is none.
pub fn bound_state_energy(solver: &Solver, ratio: f64) -> Result<Option<BoundState>> {
    let cal = solver.calibrate(ratio)?;
    bound_state_for(solver, &cal.potential)
}

pub fn bound_state_for(solver: &Solver, pot: &GaussianPotential) -> Result<Option<BoundState>> {
    let cfg = solver.config();
    let cs = solver.channels();
    let problem = Problem {
        thresholds: cs.thresholds(),
        unit: solver.coupling().matrix(),
        depth: pot.depth,
        range: pot.range,
        odd: false,
    };
    let h = cfg.step.unwrap_or(cfg.range / 10.0).min(cfg.range / 10.0);
    problem.ground_state(h, cfg.z_max, cs.thresholds()[0])
}

/// Free-space s-wave ground state of the Gaussian well (same discretization,
/// radial boundary condition); returns the (negative) energy.
pub fn free_bound_state(pot: &GaussianPotential) -> Result<Option<BoundState>> {
    let unit = DMatrix::from_element(1, 1, -1.0);
    let problem = Problem {
        thresholds: &[0.0],
        unit: &unit,
        depth: pot.depth,
        range: pot.range,
        odd: true,
    };
    problem.ground_state(pot.range / 10.0, 15.0 * pot.range, 0.0)
}

// ---------------------------------------------------------------------------
// Transmission minima

/// Samples `f` at `n` evenly spaced points of `[lo, hi]`.
fn sample<E: Executor, F>(exec: &E, lo: f64, hi: f64, n: usize, f: F) -> Result<Vec<(f64, ScatteringSolution)>>
where
    F: Fn(f64) -> Result<ScatteringSolution> + Sync,
{
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    exec.map(n, |i| f(xs[i]).map(|s| (xs[i], s))).into_iter().collect()
}

fn transmission_of(sol: &ScatteringSolution) -> f64 {
    partial_transmission(sol, sol.entrance).unwrap_or(f64::NAN)
}

/// Zero of `Im f00` between the two samples bracketing the sign change
/// closest to `near`.
fn im_f00_zero<F>(samples: &[(f64, f64)], near: f64, tol: f64, mut im: F) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut best: Option<(f64, f64, f64)> = None;
    for w in samples.windows(2) {
        let (a, fa) = w[0];
        let (b, fb) = w[1];
        if fa.signum() != fb.signum() || fa == 0.0 {
            let d = (0.5 * (a + b) - near).abs();
            if best.map_or(true, |(_, _, bd)| d < bd) {
                best = Some((a, b, d));
            }
        }
    }
    let (a, b, _) = best?;
    brent_root(&mut im, a, b, tol, 200)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionMinimum {
    pub entrance: Channel,
    pub e_par: f64,
    /// Refined `a_perp / a_s` of the minimum.
    pub ratio: f64,
    pub transmission: f64,
    /// Zero of `Im f00` nearest the minimum (ground entrance only).
    pub im_zero: Option<f64>,
    /// `k00 Re f00 / Im f00` at the minimum.
    pub g1d_indicator: f64,
    pub window: (f64, f64),
    /// Coarse samples `(ratio, T)`.
    pub samples: Vec<(f64, f64)>,
}

/// Argmin over the ratio of `T_entrance` at fixed collision energy.
pub fn locate_transmission_minimum<E: Executor>(
    solver: &Solver,
    entrance: Channel,
    e_par: f64,
    settings: &ScanSettings,
    exec: &E,
) -> Result<TransmissionMinimum> {
    let (mut lo, mut hi) = settings.cir_window;
    let n = settings.cir_points.max(3);
    let mut widened = false;
    loop {
        let sols = sample(exec, lo, hi, n, |r| solver.solve_from(entrance, e_par, r))?;
        let t: Vec<(f64, f64)> = sols.iter().map(|(r, s)| (*r, transmission_of(s))).collect();
        let i = (0..n).min_by(|&a, &b| t[a].1.total_cmp(&t[b].1)).unwrap_or(0);
        if i == 0 || i == n - 1 {
            if widened {
                return Err(Error::Domain(alloc::format!(
                    "T{entrance} minimum at the scan boundary ratio {} of [{lo}, {hi}]",
                    t[i].0
                )));
            }
            let w = hi - lo;
            lo -= w;
            hi += w;
            widened = true;
            continue;
        }
        let eval = |r: f64| {
            solver
                .solve_from(entrance, e_par, r)
                .map(|s| transmission_of(&s))
                .unwrap_or(f64::INFINITY)
        };
        let (ratio, transmission) = golden_section_min(eval, t[i - 1].0, t[i + 1].0, settings.cir_tol);
        let at_min = solver.solve_from(entrance, e_par, ratio)?;
        let im_zero = if entrance == Channel::GROUND {
            let im: Vec<(f64, f64)> = sols.iter().map(|(r, s)| (*r, s.f00().im)).collect();
            im_f00_zero(&im, ratio, settings.im_zero_tol, |r| {
                solver.solve(e_par, r).map(|s| s.f00().im).unwrap_or(f64::NAN)
            })
        } else {
            None
        };
        return Ok(TransmissionMinimum {
            entrance,
            e_par,
            ratio,
            transmission,
            im_zero,
            g1d_indicator: at_min.g1d_indicator(),
            window: (lo, hi),
            samples: t,
        });
    }
}

/// CIR position: the ratio minimizing `T00` at collision energy `e_par`.
pub fn locate_cir<E: Executor>(
    solver: &Solver,
    e_par: f64,
    settings: &ScanSettings,
    exec: &E,
) -> Result<TransmissionMinimum> {
    let cs = solver.channels();
    let gap = cs.thresholds().get(1).map_or(f64::INFINITY, |t| t - cs.thresholds()[0]);
    if !(e_par > 0.0 && e_par < gap) {
        return Err(Error::InvalidArgument(alloc::format!(
            "collision energy {e_par} must lie in (0, {gap}) so only the ground channel is open"
        )));
    }
    locate_transmission_minimum(solver, Channel::GROUND, e_par, settings, exec)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resonance {
    pub energy: f64,
    pub t00: f64,
    /// Zero of `Im f00` in the window, checked below the first excited
    /// threshold only.
    pub im_zero: Option<f64>,
}

/// Energy minimizing `T00` inside `window` at fixed ratio; `None` if `T00`
/// has no interior minimum there.
pub fn resonance_energy<E: Executor>(
    solver: &Solver,
    ratio: f64,
    window: (f64, f64),
    settings: &ScanSettings,
    exec: &E,
) -> Result<Option<Resonance>> {
    let cs = solver.channels();
    let e0 = cs.thresholds()[0];
    let eta = cs.eta();
    let ceiling = threshold_energy(Channel { n1: 0, n2: 4 }, eta).min(threshold_energy(Channel { n1: 4, n2: 0 }, eta));
    let (lo, hi) = window;
    if !(lo >= e0 && hi > lo && hi <= ceiling + 1e-12) {
        return Err(Error::InvalidArgument(alloc::format!(
            "resonance window ({lo}, {hi}) must lie inside ({e0}, {ceiling})"
        )));
    }
    let cal = solver.calibrate(ratio)?;
    let pot = cal.potential;
    let n = settings.resonance_points.max(3);
    // uniform interior points plus points packed geometrically toward the
    // upper threshold, where narrow closed-channel resonances sit
    let width = hi - lo;
    let step = width / (n + 1) as f64;
    let mut es: Vec<f64> = (1..=n).map(|i| lo + step * i as f64).collect();
    for i in 0..n {
        let frac = 0.5 * (2e-4f64).powf(i as f64 / (n - 1) as f64);
        es.push(hi - width * frac);
    }
    es.sort_by(f64::total_cmp);
    es.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * width);
    let sols: Vec<(f64, ScatteringSolution)> = exec
        .map(es.len(), |i| {
            solver
                .solve_energy(es[i], &pot, ratio)
                .map(|s| (es[i], s))
                .map_err(|err| err.at_point(ratio, es[i]))
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let t: Vec<f64> = sols.iter().map(|(_, s)| transmission_of(s)).collect();
    // the threshold dip at the lower edge is not a resonance
    let Some(i) = interior_minima(&t).into_iter().min_by(|&a, &b| t[a].total_cmp(&t[b])) else {
        return Ok(None);
    };
    let eval = |e: f64| {
        solver
            .solve_energy(e, &pot, ratio)
            .map(|s| transmission_of(&s))
            .unwrap_or(f64::INFINITY)
    };
    let (energy, t00) = golden_section_min(eval, sols[i - 1].0, sols[i + 1].0, settings.resonance_tol);
    let first_excited = cs.thresholds().iter().cloned().find(|&v| v > e0).unwrap_or(f64::INFINITY);
    let im_zero = if hi <= first_excited + 1e-12 {
        let im: Vec<(f64, f64)> = sols.iter().map(|(e, s)| (*e, s.f00().im)).collect();
        im_f00_zero(&im, energy, settings.resonance_tol, |e| {
            solver.solve_energy(e, &pot, ratio).map(|s| s.f00().im).unwrap_or(f64::NAN)
        })
    } else {
        None
    };
    Ok(Some(Resonance { energy, t00, im_zero }))
}

/// Windows between consecutive distinct thresholds up to the lowest `n = 4`
/// threshold, each labelled by the channel opening at its upper end.
pub fn resonance_windows(solver: &Solver) -> Vec<((f64, f64), Channel)> {
    let cs = solver.channels();
    let eta = cs.eta();
    let ceiling = threshold_energy(Channel { n1: 0, n2: 4 }, eta).min(threshold_energy(Channel { n1: 4, n2: 0 }, eta));
    let mut out = Vec::new();
    let mut lower = cs.thresholds()[0];
    for (ch, &t) in cs.channels().iter().zip(cs.thresholds()) {
        if t > lower + 1e-12 && t <= ceiling + 1e-12 {
            out.push(((lower, t), *ch));
            lower = t;
        }
    }
    out
}

/// Bound point and resonant points of every window at each ratio.
pub fn spectrum<E: Executor>(
    solver: &Solver,
    ratios: &[f64],
    settings: &ScanSettings,
    exec: &E,
) -> Result<Vec<SpectrumPoint>> {
    let eta = solver.channels().eta();
    let e0 = solver.channels().thresholds()[0];
    let windows = resonance_windows(solver);
    let mut out = Vec::new();
    for &ratio in ratios {
        if let Some(b) = bound_state_energy(solver, ratio)? {
            out.push(SpectrumPoint {
                eta,
                ratio,
                kind: SpectrumKind::Bound,
                branch: Channel::GROUND,
                energy: b.energy,
                gap: b.binding,
            });
        }
        for &(window, branch) in &windows {
            if let Some(r) = resonance_energy(solver, ratio, window, settings, exec)? {
                out.push(SpectrumPoint {
                    eta,
                    ratio,
                    kind: SpectrumKind::Resonant,
                    branch,
                    energy: r.energy,
                    gap: r.energy - e0,
                });
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Splitting

/// Entrance channels of the weighted total transmission.
pub const WEIGHTED_ENTRANCES: [Channel; 3] = [Channel { n1: 0, n2: 0 }, Channel { n1: 2, n2: 0 }, Channel { n1: 0, n2: 2 }];

/// One solve per entrance channel, each at collision energy `e_par` above
/// its own threshold.
pub fn entrance_solutions(solver: &Solver, ratio: f64, e_par: f64) -> Result<Vec<ScatteringSolution>> {
    WEIGHTED_ENTRANCES
        .iter()
        .map(|&ch| solver.solve_from(ch, e_par, ratio))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitMinimum {
    pub ratio: f64,
    pub transmission: f64,
}

/// Interior local minima of the weighted total transmission over the ratio.
pub fn detect_splitting<E: Executor>(
    solver: &Solver,
    w2_over_w0: f64,
    e_par: f64,
    settings: &ScanSettings,
    exec: &E,
) -> Result<Vec<SplitMinimum>> {
    if !(0.0..=0.2).contains(&w2_over_w0) {
        return Err(Error::InvalidArgument(alloc::format!("W2/W0 = {w2_over_w0} outside [0, 0.2]")));
    }
    let weights = PopulationWeights::from_excited_ratio(w2_over_w0)?;
    let (lo, hi) = settings.split_window;
    let n = ((hi - lo) / settings.split_step).round() as usize + 1;
    let profile = sample_profile(solver, lo, hi, n, e_par, exec)?;
    minima_of_profile(solver, &profile, &weights, e_par, settings)
}

/// Per-ratio entrance solutions, reusable across population weights.
pub type TransmissionProfile = Vec<(f64, Vec<ScatteringSolution>)>;

pub fn sample_profile<E: Executor>(
    solver: &Solver,
    lo: f64,
    hi: f64,
    n: usize,
    e_par: f64,
    exec: &E,
) -> Result<TransmissionProfile> {
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    exec.map(n, |i| entrance_solutions(solver, xs[i], e_par).map(|s| (xs[i], s)))
        .into_iter()
        .collect()
}

pub fn minima_of_profile(
    solver: &Solver,
    profile: &TransmissionProfile,
    weights: &PopulationWeights,
    e_par: f64,
    settings: &ScanSettings,
) -> Result<Vec<SplitMinimum>> {
    let t: Vec<f64> = profile
        .iter()
        .map(|(_, s)| total_transmission_over(s, weights))
        .collect::<Result<_>>()?;
    let eval = |r: f64| {
        entrance_solutions(solver, r, e_par)
            .and_then(|s| total_transmission_over(&s, weights))
            .unwrap_or(f64::INFINITY)
    };
    let mut out: Vec<SplitMinimum> = interior_minima(&t)
        .into_iter()
        .map(|i| {
            let (ratio, transmission) = golden_section_min(eval, profile[i - 1].0, profile[i + 1].0, settings.split_tol);
            SplitMinimum { ratio, transmission }
        })
        .collect();
    out.sort_by(|a, b| a.ratio.total_cmp(&b.ratio));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_well_has_no_state() {
        let pot = GaussianPotential::new(0.0, 0.1).unwrap();
        assert!(free_bound_state(&pot).unwrap().is_none());
    }

    #[test]
    fn mesh_covers_interval() {
        let unit = DMatrix::from_element(1, 1, -1.0);
        let p = Problem {
            thresholds: &[0.0],
            unit: &unit,
            depth: 200.0,
            range: 0.1,
            odd: false,
        };
        let cells = p.base_cells(0.01, 15.0);
        let total: f64 = cells.iter().sum();
        assert!((total - 15.0).abs() < 1e-12);
        assert!(cells.iter().all(|&c| c > 0.0 && c <= MAX_CELL * 1.5 + 1e-12));
    }
}
