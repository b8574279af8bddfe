//! Coupled-channel propagation at fixed total energy and extraction of the
//! K-, S- and amplitude matrices.
//!
//! The longitudinal equations `u'' = 2 (D - E + W(z)) u` are solved on the
//! half line with `u'(0) = 0` (even exchange symmetry). Inside the interaction
//! region the log-derivative `Y = u' u^{-1}` is propagated with Johnson's
//! method; past the point where `W(z)` drops below double precision the
//! channels are free and `Y` is carried to the matching radius with the exact
//! diagonal propagator.

use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix};

use crate::channels::{threshold_energy, Channel, ChannelSet};
use crate::config::TrapConfig;
use crate::error::{Error, Result};
use crate::interaction::{Calibration, CalibrationTarget, DepthWindow, GaussianPotential, UnitCoupling};

pub type C64 = Complex<f64>;

/// Largest accepted half-step disagreement of `Y`.
pub const STEP_TOLERANCE: f64 = 1e-6;
/// Coupling entries below this are treated as zero.
const COUPLING_FLOOR: f64 = 1e-18;
/// Energies closer than this to a threshold are shifted above it.
pub const THRESHOLD_GUARD: f64 = 1e-9;
const MAX_MATCHING_SHIFTS: u32 = 3;
const MAX_STEP_HALVINGS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub z_max: f64,
    pub step: f64,
    pub refinement: u32,
}

impl GridSpec {
    /// Default grid for `energy`: `h = min(r0/10, 2 pi / (20 k_max))`.
    pub fn for_energy(cfg: &TrapConfig, cs: &ChannelSet, energy: f64) -> Self {
        let k_max = cs
            .thresholds()
            .iter()
            .filter(|&&t| energy > t)
            .map(|&t| (2.0 * (energy - t)).sqrt())
            .fold(0.0f64, f64::max);
        let mut step = cfg.range / 10.0;
        if k_max > 0.0 {
            step = step.min(2.0 * core::f64::consts::PI / (20.0 * k_max));
        }
        Self {
            z_max: cfg.z_max,
            step: cfg.step.unwrap_or(step),
            refinement: cfg.refinement,
        }
    }
}

/// Log-derivative matrix of the regular solutions at `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogDerivative {
    pub z: f64,
    pub y: DMatrix<f64>,
    /// End of the numerically propagated region.
    pub z_coupled: f64,
    /// Relative half-step disagreement (0 when not checked).
    pub step_defect: f64,
    pub step: f64,
}

fn johnson_matrix(energy: f64, thresholds: &[f64], unit: &DMatrix<f64>, depth_profile: f64) -> DMatrix<f64> {
    // Johnson's convention: psi'' + W psi = 0, W = 2 (E - D - V)
    let mut w = unit * (-2.0 * depth_profile);
    for (i, t) in thresholds.iter().enumerate() {
        w[(i, i)] += 2.0 * (energy - t);
    }
    w
}

fn solve_real(a: DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    a.lu()
        .solve(b)
        .ok_or_else(|| Error::Domain("singular matrix during propagation".into()))
}

fn symmetrize(y: &mut DMatrix<f64>) {
    let n = y.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (y[(i, j)] + y[(j, i)]);
            y[(i, j)] = v;
            y[(j, i)] = v;
        }
    }
}

/// Johnson log-derivative propagation from `Y(0) = 0` to `z_end` in `n`
/// (even) steps.
fn johnson(
    energy: f64,
    thresholds: &[f64],
    coupling: &UnitCoupling,
    depth: f64,
    z_end: f64,
    n: usize,
) -> Result<DMatrix<f64>> {
    let dim = thresholds.len();
    let h = z_end / n as f64;
    let unit = coupling.matrix();
    let ident = DMatrix::<f64>::identity(dim, dim);
    let w_at = |z: f64| johnson_matrix(energy, thresholds, unit, depth * coupling.profile(z));

    let mut y = DMatrix::<f64>::zeros(dim, dim);
    y -= w_at(0.0) * (h / 3.0);
    for k in 1..=n {
        let z = k as f64 * h;
        let a = &ident + &y * h;
        y = solve_real(a, &y)?;
        let w = w_at(z);
        let (weight, u) = if k == n {
            (1.0, w)
        } else if k % 2 == 1 {
            let a = &ident + &w * (h * h / 6.0);
            (4.0, solve_real(a, &w)?)
        } else {
            (2.0, w)
        };
        y -= u * (h / 3.0 * weight);
    }
    symmetrize(&mut y);
    Ok(y)
}

/// Exact propagation of `Y` across a region where the channels are free.
fn free_propagate(mut y: DMatrix<f64>, energy: f64, thresholds: &[f64], from: f64, to: f64) -> Result<DMatrix<f64>> {
    if to <= from {
        return Ok(y);
    }
    let k_max = thresholds
        .iter()
        .filter(|&&t| energy > t)
        .map(|&t| (2.0 * (energy - t)).sqrt())
        .fold(0.0f64, f64::max);
    let max_len = if k_max > 0.0 { (1.0 / k_max).min(1.0) } else { 1.0 };
    let segments = ((to - from) / max_len).ceil().max(1.0) as usize;
    let d = (to - from) / segments as f64;
    let dim = thresholds.len();
    // Y2 = y4 - y3 (Y1 + y1)^{-1} y3 with diagonal y1 = y4, y3
    let mut diag = Vec::with_capacity(dim);
    let mut cross = Vec::with_capacity(dim);
    for &t in thresholds {
        let q = (2.0 * (energy - t).abs()).sqrt();
        if energy > t {
            let (s, c) = (q * d).sin_cos();
            diag.push(q * c / s);
            cross.push(q / s);
        } else {
            let x = q * d;
            if x > 40.0 {
                diag.push(q);
                cross.push(2.0 * q * (-x).exp());
            } else {
                diag.push(q / x.tanh());
                cross.push(q / x.sinh());
            }
        }
    }
    for _ in 0..segments {
        let mut m = y.clone();
        for i in 0..dim {
            m[(i, i)] += diag[i];
        }
        let mut rhs = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..dim {
            rhs[(i, i)] = cross[i];
        }
        let x = solve_real(m, &rhs)?;
        let mut next = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                next[(i, j)] = -cross[i] * x[(i, j)];
            }
            next[(i, i)] += diag[i];
        }
        symmetrize(&mut next);
        y = next;
    }
    Ok(y)
}

fn even_steps(length: f64, step: f64) -> usize {
    let mut n = (length / step).ceil().max(2.0) as usize;
    if n % 2 == 1 {
        n += 1;
    }
    n
}

/// Propagates `Y` from `z = 0` (where `u' = 0`) to `grid.z_max`.
pub fn propagate_logderiv(
    energy: f64,
    cs: &ChannelSet,
    coupling: &UnitCoupling,
    pot: &GaussianPotential,
    grid: &GridSpec,
    verify: bool,
) -> Result<LogDerivative> {
    if !energy.is_finite() {
        return Err(Error::NonFinite("energy"));
    }
    if let Some(ch) = cs
        .channels()
        .iter()
        .zip(cs.thresholds())
        .find(|(_, &t)| energy == t)
        .map(|(c, _)| *c)
    {
        return Err(Error::ThresholdDegenerate { channel: ch, energy });
    }
    let thresholds = cs.thresholds();
    let z_coupled = coupling.cutoff(pot.depth, COUPLING_FLOOR).min(grid.z_max);
    let mut step_defect = 0.0;
    let y_inner = if z_coupled > 0.0 {
        let n = even_steps(z_coupled, grid.step);
        let coarse = johnson(energy, thresholds, coupling, pot.depth, z_coupled, n)?;
        if verify {
            let fine = johnson(
                energy,
                thresholds,
                coupling,
                pot.depth,
                z_coupled,
                n * grid.refinement as usize,
            )?;
            let scale = 1.0 + fine.amax();
            step_defect = (&fine - &coarse).amax() / scale;
            if step_defect > STEP_TOLERANCE {
                return Err(Error::StepInstability {
                    defect: step_defect,
                    step: z_coupled / n as f64,
                    suggested: z_coupled / n as f64 / 2.0,
                });
            }
            fine
        } else {
            coarse
        }
    } else {
        DMatrix::zeros(cs.len(), cs.len())
    };
    let y = free_propagate(y_inner, energy, thresholds, z_coupled, grid.z_max)?;
    Ok(LogDerivative {
        z: grid.z_max,
        y,
        z_coupled,
        step_defect,
        step: if verify {
            grid.step / grid.refinement as f64
        } else {
            grid.step
        },
    })
}

/// Open-open K matrix plus the defect removed by symmetrization.
#[derive(Debug, Clone, PartialEq)]
pub struct KExtraction {
    pub k: DMatrix<f64>,
    /// `max |K - K^T|` before symmetrization.
    pub asymmetry: f64,
    /// `max |K - K^T| / max |K|` before symmetrization.
    pub symmetry_defect: f64,
}

/// Matches `Y(z)` to `cos(kz)/sqrt(k) + sin(kz)/sqrt(k) K` in open channels
/// and `exp(-kappa z)` in closed ones.
pub fn extract_k(y: &DMatrix<f64>, energy: f64, cs: &ChannelSet, z: f64) -> Result<KExtraction> {
    let dim = cs.len();
    let open = cs.open_indices(energy);
    let no = open.len();
    if no == 0 {
        return Err(Error::Domain("no open channels".into()));
    }
    let mut reg = alloc::vec![0.0; dim];
    let mut dreg = alloc::vec![0.0; dim];
    let mut irr = alloc::vec![0.0; dim];
    let mut dirr = alloc::vec![0.0; dim];
    for (i, &t) in cs.thresholds().iter().enumerate() {
        let q = (2.0 * (energy - t).abs()).sqrt();
        if energy > t {
            let (s, c) = (q * z).sin_cos();
            let rq = q.sqrt();
            reg[i] = c / rq;
            dreg[i] = -rq * s;
            irr[i] = s / rq;
            dirr[i] = rq * c;
        } else {
            // exp(-kappa (z - z)) scaled to one at the matching point
            irr[i] = 1.0;
            dirr[i] = -q;
        }
    }
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            a[(i, j)] = y[(i, j)] * irr[j];
        }
        a[(i, i)] -= dirr[i];
    }
    let mut b = DMatrix::<f64>::zeros(dim, no);
    for (col, &j) in open.iter().enumerate() {
        for i in 0..dim {
            b[(i, col)] = -y[(i, j)] * reg[j];
        }
        b[(j, col)] += dreg[j];
    }
    let lu = a.lu();
    let u = lu.u();
    let umax = u.diagonal().amax();
    let umin = u.diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if !(umin > 1e-13 * umax) {
        return Err(Error::SingularMatching { z_max: z, attempts: 0 });
    }
    let x = lu
        .solve(&b)
        .ok_or(Error::SingularMatching { z_max: z, attempts: 0 })?;
    let mut k = DMatrix::<f64>::zeros(no, no);
    for (r, &i) in open.iter().enumerate() {
        for c in 0..no {
            k[(r, c)] = x[(i, c)];
        }
    }
    let asymmetry = (&k - k.transpose()).amax();
    let kmax = k.amax();
    let symmetry_defect = if kmax > 0.0 { asymmetry / kmax } else { 0.0 };
    symmetrize(&mut k);
    Ok(KExtraction {
        k,
        asymmetry,
        symmetry_defect,
    })
}

/// S-matrix and scattering amplitudes over open channels.
#[derive(Debug, Clone, PartialEq)]
pub struct Amplitudes {
    pub s: DMatrix<C64>,
    /// Momentum-normalized amplitude `(S - I)/2`, indexed `[final, initial]`.
    pub f_norm: DMatrix<C64>,
    /// Amplitude of the asymptotic form, `f[c', c] = sqrt(k_c / k_c') f_norm[c', c]`.
    pub f: DMatrix<C64>,
}

/// `S = (iI + K)(iI - K)^{-1}`, `f_norm = K (iI - K)^{-1}`.
pub fn amplitudes_from_k(k: &DMatrix<f64>, momenta: &[f64]) -> Result<Amplitudes> {
    let n = k.nrows();
    if k.ncols() != n || momenta.len() != n {
        return Err(Error::InvalidArgument("K and momenta dimensions differ".into()));
    }
    if momenta.iter().any(|&q| !(q > 0.0)) {
        return Err(Error::InvalidArgument("open-channel momenta must be positive".into()));
    }
    let kc: DMatrix<C64> = k.map(|v| C64::new(v, 0.0));
    let mut m = -kc.clone();
    for i in 0..n {
        m[(i, i)] += C64::new(0.0, 1.0);
    }
    // K and (iI - K)^{-1} commute for symmetric K
    let f_norm = m.lu().solve(&kc).ok_or(Error::SMatrixPole)?;
    if f_norm.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::SMatrixPole);
    }
    let mut s = &f_norm * C64::new(2.0, 0.0);
    for i in 0..n {
        s[(i, i)] += C64::new(1.0, 0.0);
    }
    let mut f = f_norm.clone();
    for r in 0..n {
        for c in 0..n {
            f[(r, c)] *= (momenta[c] / momenta[r]).sqrt();
        }
    }
    Ok(Amplitudes { s, f_norm, f })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// `max |S^dagger S - I|`.
    pub unitarity_defect: f64,
    /// `max |K - K^T|` before symmetrization.
    pub k_asymmetry: f64,
    /// `max |K - K^T| / max |K|` before symmetrization.
    pub symmetry_defect: f64,
    pub step_defect: f64,
    pub step: f64,
    pub z_match: f64,
    pub z_coupled: f64,
    pub n_cut: u32,
    pub channel_count: usize,
    /// Shift applied to keep the energy off a threshold.
    pub energy_offset: f64,
    pub matching_shifts: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringSolution {
    /// Total energy `E`.
    pub energy: f64,
    /// Channel the collision energy is quoted against.
    pub entrance: Channel,
    /// `E - E_perp(entrance)`.
    pub e_par: f64,
    pub eta: f64,
    /// `a_perp / a_s` of the calibrated potential.
    pub ratio: f64,
    pub potential: GaussianPotential,
    pub open: Vec<Channel>,
    pub momenta: Vec<f64>,
    pub k_matrix: DMatrix<f64>,
    pub s_matrix: DMatrix<C64>,
    pub f_norm: DMatrix<C64>,
    pub amplitude: DMatrix<C64>,
    pub diagnostics: Diagnostics,
}

impl ScatteringSolution {
    pub fn open_index(&self, ch: Channel) -> Option<usize> {
        self.open.iter().position(|c| *c == ch)
    }

    /// Ground-channel elastic amplitude `f_00`.
    pub fn f00(&self) -> C64 {
        self.amplitude[(0, 0)]
    }

    /// `k_00 Re f_00 / Im f_00`, the quantity whose zero-energy limit defines
    /// the effective 1D coupling.
    pub fn g1d_indicator(&self) -> f64 {
        let f = self.f00();
        self.momenta[0] * f.re / f.im
    }
}

fn unitarity(s: &DMatrix<C64>) -> f64 {
    let mut p = s.adjoint() * s;
    for i in 0..p.nrows() {
        p[(i, i)] -= C64::new(1.0, 0.0);
    }
    p.iter().fold(0.0f64, |m, v| m.max(v.norm_sqr().sqrt()))
}

/// Channel set, coupling and calibration window shared by every solve of a
/// sweep.
#[derive(Debug, Clone)]
pub struct Solver {
    cfg: TrapConfig,
    channels: ChannelSet,
    coupling: UnitCoupling,
    window: DepthWindow,
}

impl Solver {
    pub fn new(cfg: &TrapConfig) -> Result<Self> {
        cfg.validate()?;
        let channels = ChannelSet::new(cfg.n_cut, cfg.eta)?;
        let coupling = UnitCoupling::new(&channels, cfg.range)?;
        let window = DepthWindow::new(cfg.range)?;
        Ok(Self {
            cfg: cfg.clone(),
            channels,
            coupling,
            window,
        })
    }

    pub fn config(&self) -> &TrapConfig {
        &self.cfg
    }

    pub fn channels(&self) -> &ChannelSet {
        &self.channels
    }

    pub fn coupling(&self) -> &UnitCoupling {
        &self.coupling
    }

    pub fn window(&self) -> &DepthWindow {
        &self.window
    }

    pub fn calibrate(&self, ratio: f64) -> Result<Calibration> {
        crate::interaction::calibrate_depth_in(&self.window, CalibrationTarget::Ratio(ratio))
    }

    /// Ground-channel entrance at collision energy `e_par`.
    pub fn solve(&self, e_par: f64, ratio: f64) -> Result<ScatteringSolution> {
        self.solve_from(Channel::GROUND, e_par, ratio)
    }

    /// Entrance `entrance` at collision energy `e_par` above its threshold.
    pub fn solve_from(&self, entrance: Channel, e_par: f64, ratio: f64) -> Result<ScatteringSolution> {
        if !(e_par > 0.0) {
            return Err(Error::InvalidArgument(alloc::format!("collision energy {e_par} must be > 0")));
        }
        let energy = threshold_energy(entrance, self.cfg.eta) + e_par;
        let cal = self.calibrate(ratio).map_err(|e| e.at_point(ratio, energy))?;
        self.solve_energy_from(entrance, energy, &cal.potential, cal.ratio)
            .map_err(|e| e.at_point(ratio, energy))
    }

    /// Solve at total energy `energy` for an explicit potential.
    pub fn solve_energy(&self, energy: f64, pot: &GaussianPotential, ratio: f64) -> Result<ScatteringSolution> {
        self.solve_energy_from(Channel::GROUND, energy, pot, ratio)
    }

    fn solve_energy_from(
        &self,
        entrance: Channel,
        energy: f64,
        pot: &GaussianPotential,
        ratio: f64,
    ) -> Result<ScatteringSolution> {
        let cs = &self.channels;
        if self.channels.index_of(entrance).is_none() {
            return Err(Error::InvalidArgument(alloc::format!("entrance {entrance} outside the channel set")));
        }
        let mut e = energy;
        for &t in cs.thresholds() {
            if (e - t).abs() < THRESHOLD_GUARD {
                e = t + THRESHOLD_GUARD;
            }
        }
        let energy_offset = e - energy;
        if e <= threshold_energy(entrance, self.cfg.eta) {
            return Err(Error::ClosedEntrance(entrance));
        }

        let mut grid = GridSpec::for_energy(&self.cfg, cs, e);
        // a default step is halved until the check passes; an explicit one is not
        let mut halvings = 0;
        let ld = loop {
            match propagate_logderiv(e, cs, &self.coupling, pot, &grid, self.cfg.verify_step) {
                Err(Error::StepInstability { .. }) if self.cfg.step.is_none() && halvings < MAX_STEP_HALVINGS => {
                    grid.step /= 2.0;
                    halvings += 1;
                }
                other => break other?,
            }
        };

        let k_max = cs
            .thresholds()
            .iter()
            .filter(|&&t| e > t)
            .map(|&t| (2.0 * (e - t)).sqrt())
            .fold(0.0f64, f64::max);
        let mut y = ld.y.clone();
        let mut z = ld.z;
        let mut shifts = 0;
        let kx = loop {
            match extract_k(&y, e, cs, z) {
                Ok(kx) => break kx,
                Err(Error::SingularMatching { .. }) if shifts < MAX_MATCHING_SHIFTS => {
                    let dz = 0.1 * core::f64::consts::PI / k_max.max(1.0);
                    y = free_propagate(y, e, cs.thresholds(), z, z + dz)?;
                    z += dz;
                    shifts += 1;
                }
                Err(Error::SingularMatching { .. }) => {
                    return Err(Error::SingularMatching {
                        z_max: z,
                        attempts: shifts,
                    })
                }
                Err(other) => return Err(other),
            }
        };

        let open_idx = cs.open_indices(e);
        let open: Vec<Channel> = open_idx.iter().map(|&i| cs.channels()[i]).collect();
        let momenta: Vec<f64> = open_idx
            .iter()
            .map(|&i| (2.0 * (e - cs.thresholds()[i])).sqrt())
            .collect();
        let amps = amplitudes_from_k(&kx.k, &momenta)?;

        let diagnostics = Diagnostics {
            unitarity_defect: unitarity(&amps.s),
            k_asymmetry: kx.asymmetry,
            symmetry_defect: kx.symmetry_defect,
            step_defect: ld.step_defect,
            step: ld.step,
            z_match: z,
            z_coupled: ld.z_coupled,
            n_cut: cs.n_cut(),
            channel_count: cs.len(),
            energy_offset,
            matching_shifts: shifts,
        };
        Ok(ScatteringSolution {
            energy: e,
            entrance,
            e_par: e - threshold_energy(entrance, self.cfg.eta),
            eta: self.cfg.eta,
            ratio,
            potential: *pot,
            open,
            momenta,
            k_matrix: kx.k,
            s_matrix: amps.s,
            f_norm: amps.f_norm,
            amplitude: amps.f,
            diagnostics,
        })
    }
}

/// One-shot solve: calibrate, enumerate, propagate, match.
pub fn solve(e_par: f64, ratio: f64, cfg: &TrapConfig) -> Result<ScatteringSolution> {
    Solver::new(cfg)?.solve(e_par, ratio)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_k_gives_identity() {
        let k = DMatrix::<f64>::zeros(2, 2);
        let a = amplitudes_from_k(&k, &[0.3, 0.7]).unwrap();
        assert_eq!(a.s, DMatrix::<C64>::identity(2, 2));
        assert!(a.f.iter().all(|v| *v == C64::new(0.0, 0.0)));
    }

    #[test]
    fn single_channel_algebra() {
        let a = amplitudes_from_k(&DMatrix::from_element(1, 1, 1.0), &[0.5]).unwrap();
        let f = a.f[(0, 0)];
        assert!((f - C64::new(-0.5, -0.5)).norm_sqr() < 1e-30);
        let t = (C64::new(1.0, 0.0) + f).norm_sqr();
        assert!((t - 0.5).abs() < 1e-15 && (f.norm_sqr() - 0.5).abs() < 1e-15);
        let big = amplitudes_from_k(&DMatrix::from_element(1, 1, 1e9), &[0.5]).unwrap();
        assert!((big.f[(0, 0)] + C64::new(1.0, 0.0)).norm_sqr() < 1e-16);
        let neg = amplitudes_from_k(&DMatrix::from_element(1, 1, -1e9), &[0.5]).unwrap();
        assert!((neg.f[(0, 0)] + C64::new(1.0, 0.0)).norm_sqr() < 1e-16);
    }

    #[test]
    fn free_region_propagation_is_exact() {
        // even free solution cos(kz): Y = -k tan(kz); closed: kappa tanh(kappa z)
        let y0 = DMatrix::<f64>::zeros(2, 2);
        let y = free_propagate(y0, 1.5, &[1.0, 3.0], 0.0, 2.7).unwrap();
        let k = 1.0f64;
        let kappa = 3f64.sqrt();
        assert!((y[(0, 0)] + k * (k * 2.7).tan()).abs() < 1e-12);
        assert!((y[(1, 1)] - kappa * (kappa * 2.7).tanh()).abs() < 1e-12);
        assert!(y[(0, 1)].abs() < 1e-14);
    }

    #[test]
    fn free_potential_gives_zero_k() {
        let cfg = TrapConfig {
            n_cut: 4,
            ..TrapConfig::default()
        };
        let s = Solver::new(&cfg).unwrap();
        let pot = GaussianPotential::new(0.0, 0.1).unwrap();
        let sol = s.solve_energy(3.4, &pot, f64::NEG_INFINITY).unwrap();
        assert!(sol.k_matrix.amax() < 1e-12, "{}", sol.k_matrix);
        assert!(sol.diagnostics.unitarity_defect < 1e-14);
    }
}
