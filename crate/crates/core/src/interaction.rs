//! Gaussian interatomic potential: free-space calibration and the channel
//! coupling matrix.

use nalgebra::DMatrix;

use crate::basis::OverlapMatrix;
use crate::channels::ChannelSet;
use crate::error::{Error, Result};
use crate::numerics::brent_root;

/// `V(r) = -depth * exp(-r^2 / range^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPotential {
    pub depth: f64,
    pub range: f64,
}

impl GaussianPotential {
    pub fn new(depth: f64, range: f64) -> Result<Self> {
        if !(depth >= 0.0) || !depth.is_finite() {
            return Err(Error::InvalidArgument(alloc::format!("depth {depth} must be >= 0")));
        }
        if !(range > 0.0) || !range.is_finite() {
            return Err(Error::InvalidArgument(alloc::format!("range {range} must be > 0")));
        }
        Ok(Self { depth, range })
    }

    pub fn value(&self, r: f64) -> f64 {
        -self.depth * (-(r * r) / (self.range * self.range)).exp()
    }
}

/// Result of the zero-energy radial integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringLength {
    /// `a_s` in units of `a_perp`; may be huge (or infinite) near a
    /// bound-state threshold.
    pub value: f64,
    /// `1/a_s`, finite through the unitarity limit.
    pub inverse: f64,
    /// Set when `|a_s|` exceeds `1e4 * range`.
    pub near_threshold: bool,
    /// Difference between the step-`h` and step-`h/2` estimates.
    pub step_error: f64,
}

/// Steps per range unit of the radial integrator.
const RADIAL_STEPS_PER_RANGE: usize = 200;
/// Matching radius in units of the range.
const RADIAL_MATCH_RANGES: f64 = 15.0;

struct RadialEnd {
    u: f64,
    du: f64,
    radius: f64,
    nodes: u32,
}

/// RK4 for `u'' = 2 V(r) u` from `u(0) = 0, u'(0) = 1` to `15 * range`.
fn integrate_radial(pot: &GaussianPotential, steps_per_range: usize) -> RadialEnd {
    let radius = RADIAL_MATCH_RANGES * pot.range;
    let n = (RADIAL_MATCH_RANGES as usize) * steps_per_range;
    let h = radius / n as f64;
    let acc = |r: f64, u: f64| 2.0 * pot.value(r) * u;
    let (mut u, mut du) = (0.0f64, 1.0f64);
    let mut nodes = 0;
    for i in 0..n {
        let r = i as f64 * h;
        let k1u = du;
        let k1v = acc(r, u);
        let k2u = du + 0.5 * h * k1v;
        let k2v = acc(r + 0.5 * h, u + 0.5 * h * k1u);
        let k3u = du + 0.5 * h * k2v;
        let k3v = acc(r + 0.5 * h, u + 0.5 * h * k2u);
        let k4u = du + h * k3v;
        let k4v = acc(r + h, u + h * k3u);
        let un = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if i > 0 && un.signum() != u.signum() && un != 0.0 {
            nodes += 1;
        }
        u = un;
    }
    RadialEnd { u, du, radius, nodes }
}

fn inverse_length(end: &RadialEnd) -> f64 {
    // 1/a = u' / (R u' - u); a = R - u/u'
    end.du / (end.radius * end.du - end.u)
}

/// Zero-energy s-wave scattering length of the Gaussian well.
pub fn free_radial_scattering_length(depth: f64, range: f64) -> Result<ScatteringLength> {
    let pot = GaussianPotential::new(depth, range)?;
    let coarse = inverse_length(&integrate_radial(&pot, RADIAL_STEPS_PER_RANGE));
    let fine = inverse_length(&integrate_radial(&pot, 2 * RADIAL_STEPS_PER_RANGE));
    // Richardson on 1/a, which stays finite through the unitarity limit
    let inverse = fine + (fine - coarse) / 15.0;
    let value = 1.0 / inverse;
    Ok(ScatteringLength {
        value,
        inverse,
        near_threshold: !(value.abs() <= 1e4 * range),
        step_error: (1.0 / fine - 1.0 / coarse).abs(),
    })
}

/// Number of free-space s-wave bound states (nodes of the zero-energy
/// solution, including the one past the matching radius when `a_s > R`).
pub fn count_free_bound_states(depth: f64, range: f64) -> Result<u32> {
    let pot = GaussianPotential::new(depth, range)?;
    let end = integrate_radial(&pot, RADIAL_STEPS_PER_RANGE);
    let a = end.radius - end.u / end.du;
    let beyond = end.du != 0.0 && a > end.radius;
    Ok(end.nodes + beyond as u32)
}

/// Depths at which the first and second bound states appear, and where
/// `a_s` passes through zero between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthWindow {
    pub range: f64,
    pub first_bound: f64,
    pub second_bound: f64,
    pub zero_crossing: f64,
}

fn bisect_count(range: f64, count: u32, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..200 {
        if hi - lo <= 1e-14 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if count_free_bound_states(mid, range)? >= count {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

impl DepthWindow {
    pub fn new(range: f64) -> Result<Self> {
        if !(range > 0.0) || !range.is_finite() {
            return Err(Error::InvalidArgument(alloc::format!("range {range} must be > 0")));
        }
        let mut hi = 1.0 / (range * range);
        while count_free_bound_states(hi, range)? < 2 {
            hi *= 2.0;
            if hi > 1e6 / (range * range) {
                return Err(Error::Domain("no second bound state found".into()));
            }
        }
        let first_bound = bisect_count(range, 1, 0.0, hi)?;
        let second_bound = bisect_count(range, 2, first_bound, hi)?;
        let a = |v: f64| free_radial_scattering_length(v, range).map(|s| s.value).unwrap_or(f64::NAN);
        let zero_crossing = brent_root(
            a,
            first_bound * (1.0 + 1e-6),
            second_bound * (1.0 - 1e-6),
            1e-13 * second_bound,
            300,
        )
        .ok_or_else(|| Error::Domain("a_s has no zero between the bound-state thresholds".into()))?;
        Ok(Self {
            range,
            first_bound,
            second_bound,
            zero_crossing,
        })
    }

    /// The calibration branch `(0, zero_crossing)`, along which `1/a_s`
    /// increases monotonically from `-inf` to `+inf`.
    pub fn branch(&self) -> (f64, f64) {
        (0.0, self.zero_crossing)
    }
}

/// What the depth is tuned to reproduce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CalibrationTarget {
    /// Target `a_perp / a_s`.
    Ratio(f64),
    /// `|a_s| -> inf`.
    Resonance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub potential: GaussianPotential,
    pub scattering_length: ScatteringLength,
    /// `a_perp / a_s` actually reproduced.
    pub ratio: f64,
    pub bound_count: u32,
}

/// Tunes the depth to the target within the window.
pub fn calibrate_depth_in(window: &DepthWindow, target: CalibrationTarget) -> Result<Calibration> {
    let range = window.range;
    let depth = match target {
        CalibrationTarget::Resonance => window.first_bound,
        CalibrationTarget::Ratio(t) => {
            if !t.is_finite() {
                return Err(Error::CalibrationFailed {
                    target: t,
                    min: f64::NEG_INFINITY,
                    max: f64::INFINITY,
                });
            }
            if t == 0.0 {
                window.first_bound
            } else {
                let goal = t.atan();
                let phase = |v: f64| {
                    free_radial_scattering_length(v, range)
                        .map(|s| s.inverse.atan() - goal)
                        .unwrap_or(f64::NAN)
                };
                let lo = window.first_bound * 1e-9;
                let hi = window.zero_crossing * (1.0 - 1e-12);
                brent_root(phase, lo, hi, 1e-14 * hi, 300).ok_or(Error::CalibrationFailed {
                    target: t,
                    min: f64::NEG_INFINITY,
                    max: f64::INFINITY,
                })?
            }
        }
    };
    let potential = GaussianPotential::new(depth, range)?;
    let scattering_length = free_radial_scattering_length(depth, range)?;
    let bound_count = count_free_bound_states(depth, range)?;
    let calibration = Calibration {
        potential,
        scattering_length,
        ratio: scattering_length.inverse,
        bound_count,
    };
    if let CalibrationTarget::Ratio(t) = target {
        if (calibration.ratio - t).abs() > 1e-6 * t.abs().max(1.0) {
            return Err(Error::CalibrationFailed {
                target: t,
                min: f64::NEG_INFINITY,
                max: f64::INFINITY,
            });
        }
    }
    Ok(calibration)
}

/// Convenience wrapper that builds the window for `range` first.
pub fn calibrate_depth(target: CalibrationTarget, range: f64) -> Result<Calibration> {
    calibrate_depth_in(&DepthWindow::new(range)?, target)
}

/// Coupling `W(z)` over a channel set at one longitudinal separation.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    pub z: f64,
    pub entries: DMatrix<f64>,
}

/// Depth- and `z`-independent part of the coupling,
/// `U[c, c'] = -G^{(eta)}_{n1 n1'} G^{(1)}_{n2 n2'}`, so that
/// `W(z) = depth * exp(-z^2/r0^2) * U`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCoupling {
    range: f64,
    unit: DMatrix<f64>,
    max_abs: f64,
}

impl UnitCoupling {
    pub fn new(cs: &ChannelSet, range: f64) -> Result<Self> {
        let g1 = OverlapMatrix::new(cs.n_cut(), range, cs.eta())?;
        let g2 = if cs.eta() == 1.0 {
            g1.clone()
        } else {
            OverlapMatrix::new(cs.n_cut(), range, 1.0)?
        };
        let chans = cs.channels();
        let n = chans.len();
        let mut unit = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = -g1.get(chans[i].n1, chans[j].n1) * g2.get(chans[i].n2, chans[j].n2);
                unit[(i, j)] = v;
                unit[(j, i)] = v;
            }
        }
        let max_abs = unit.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(Self { range, unit, max_abs })
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.unit
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    /// `exp(-z^2/r0^2)`, flushed to zero below `1e-170`.
    pub fn profile(&self, z: f64) -> f64 {
        let g = (-(z * z) / (self.range * self.range)).exp();
        if g < 1e-170 {
            0.0
        } else {
            g
        }
    }

    pub fn at(&self, z: f64, depth: f64) -> CouplingMatrix {
        CouplingMatrix {
            z,
            entries: &self.unit * (depth * self.profile(z)),
        }
    }

    /// Smallest `z` beyond which every entry of `W(z)` is below `tol`.
    pub fn cutoff(&self, depth: f64, tol: f64) -> f64 {
        let peak = depth * self.max_abs;
        if peak <= tol {
            0.0
        } else {
            self.range * (peak / tol).ln().sqrt()
        }
    }
}

/// `W(z)` for a calibrated potential; `cs` fixes the anisotropy.
pub fn coupling_matrix(z: f64, cs: &ChannelSet, pot: &GaussianPotential) -> Result<CouplingMatrix> {
    Ok(UnitCoupling::new(cs, pot.range)?.at(z, pot.depth))
}
