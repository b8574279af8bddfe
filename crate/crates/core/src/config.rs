use crate::channels::{threshold_energy, Channel};
use crate::error::{Error, Result};

/// Physical and numerical parameters of one calculation.
///
/// Units: `hbar = mu = 1`, `omega2 = 1`, so lengths are in `a_perp` (defined
/// with `omega2` for every anisotropy) and energies in `hbar omega2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapConfig {
    /// `eta = omega1 / omega2 >= 1`.
    pub eta: f64,
    /// Gaussian range `r0`.
    pub range: f64,
    /// Largest `n1 + n2` retained.
    pub n_cut: u32,
    /// Matching radius.
    pub z_max: f64,
    /// Propagation step; `None` picks `min(r0/10, 2 pi / (20 k_max))`.
    pub step: Option<f64>,
    /// Step-halving factor of the convergence check.
    pub refinement: u32,
    /// Run the half-step check on every propagation.
    pub verify_step: bool,
}

impl Default for TrapConfig {
    fn default() -> Self {
        Self {
            eta: 1.0,
            range: 0.1,
            n_cut: 20,
            z_max: 15.0,
            step: None,
            refinement: 2,
            verify_step: true,
        }
    }
}

impl TrapConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(alloc::format!("{what}")));
        if !(self.eta >= 1.0) || !self.eta.is_finite() {
            return bad("eta must be a finite value >= 1");
        }
        if !(self.range > 0.0) || !self.range.is_finite() {
            return bad("range must be positive");
        }
        if self.n_cut % 2 != 0 {
            return bad("n_cut must be even");
        }
        if !(self.z_max > 0.0) || !self.z_max.is_finite() {
            return bad("z_max must be positive");
        }
        if let Some(h) = self.step {
            if !(h > 0.0) || !h.is_finite() {
                return bad("step must be positive");
            }
        }
        if self.refinement < 2 {
            return bad("refinement factor must be >= 2");
        }
        Ok(())
    }

    /// `E_perp` of the ground channel, `(eta + 1) / 2`.
    pub fn ground_threshold(&self) -> f64 {
        threshold_energy(Channel::GROUND, self.eta)
    }
}
