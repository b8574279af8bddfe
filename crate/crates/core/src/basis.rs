//! One-dimensional harmonic-oscillator functions, Gauss-Hermite quadrature and
//! the Gaussian-weighted overlaps that build the channel couplings.
//!
//! Units follow the rest of the crate: unit mass, so the oscillator of
//! frequency `omega` has length `1/sqrt(omega)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Largest oscillator order accepted by [`osc_eigenfunction`].
pub const MAX_OSC_ORDER: u32 = 400;

/// Nodes and weights of an `order`-point Gauss-Hermite rule for the weight
/// `exp(-x^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// `sum_i w_i f(x_i)`, approximating `∫ f(x) exp(-x^2) dx`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss-Hermite rule from the eigen-decomposition of the Jacobi matrix
/// (Golub-Welsch).
pub fn gauss_hermite_rule(order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::InvalidArgument("quadrature order must be >= 1".into()));
    }
    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for k in 1..order {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = b;
        jacobi[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::try_new(jacobi, 1e-15, 10_000 + 200 * order)
        .ok_or(Error::QuadratureNoConvergence { order })?;

    // Eigenvector weights lose all relative accuracy in the tails; polish
    // the nodes by Newton and take weights from the Christoffel sum.
    let mut h = vec![0.0; order + 1];
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| {
            let mut x = eig.eigenvalues[i];
            for _ in 0..3 {
                hermite_polynomials(order as u32, x, &mut h);
                let dh = (2.0 * order as f64).sqrt() * h[order - 1];
                if dh != 0.0 {
                    x -= h[order] / dh;
                }
            }
            hermite_polynomials(order as u32, x, &mut h);
            let sum: f64 = h[..order].iter().map(|v| v * v).sum();
            (x, PI.sqrt() / sum)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    // The eigen-solver leaves the rule symmetric only to rounding; enforce it.
    let mut nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    for i in 0..order / 2 {
        let j = order - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    if nodes.iter().any(|x| !x.is_finite()) || weights.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::QuadratureNoConvergence { order });
    }
    Ok(QuadratureRule {
        order,
        nodes,
        weights,
    })
}

/// Quadrature order used for overlaps up to `n_max`.
pub fn default_quadrature_order(n_max: u32) -> usize {
    2 * (n_max as usize + 1) + 16
}

/// Normalized Hermite polynomials `h_0..=h_n_max` at `y`, i.e. the oscillator
/// functions with the Gaussian factor and `(omega/pi)^(1/4)` removed.
fn hermite_polynomials(n_max: u32, y: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if n_max >= 1 {
        out[1] = 2f64.sqrt() * y;
    }
    for n in 1..n_max as usize {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * y * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

/// All oscillator functions `phi_0..=phi_n_max` at `x`.
pub fn osc_table(n_max: u32, x: f64, omega: f64) -> Vec<f64> {
    let y = omega.sqrt() * x;
    let mut out = vec![0.0; n_max as usize + 1];
    out[0] = (omega / PI).powf(0.25) * (-0.5 * y * y).exp();
    if n_max >= 1 {
        out[1] = 2f64.sqrt() * y * out[0];
    }
    for n in 1..n_max as usize {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * y * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
    out
}

/// Orthonormal oscillator eigenfunction `phi_n(x)` for frequency `omega`.
///
/// Evaluated by the normalized recurrence, which stays in range for large
/// `n` where explicit Hermite polynomials overflow.
pub fn osc_eigenfunction(n: u32, x: f64, omega: f64) -> Result<f64> {
    if n > MAX_OSC_ORDER {
        return Err(Error::OrderOutOfRange {
            n,
            max: MAX_OSC_ORDER,
        });
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("x"));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidArgument("omega must be positive".into()));
    }
    Ok(osc_table(n, x, omega)[n as usize])
}

/// Overlap matrix `G_nm = ∫ phi_n(x) exp(-x^2/r0^2) phi_m(x) dx` for
/// `n, m <= n_max`.
///
/// The integrand is a polynomial times `exp(-(omega + 1/r0^2) x^2)`, so after
/// rescaling the Gaussian away the rule is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    pub range: f64,
    pub omega: f64,
    pub values: DMatrix<f64>,
}

impl OverlapMatrix {
    pub fn new(n_max: u32, range: f64, omega: f64) -> Result<Self> {
        Self::with_rule(n_max, range, omega, &gauss_hermite_rule(default_quadrature_order(n_max))?)
    }

    pub fn with_rule(n_max: u32, range: f64, omega: f64, rule: &QuadratureRule) -> Result<Self> {
        if !(range > 0.0) || !(omega > 0.0) {
            return Err(Error::InvalidArgument(
                "overlap needs positive range and frequency".into(),
            ));
        }
        if rule.order < n_max as usize + 1 {
            return Err(Error::InvalidArgument(
                "quadrature order too low for requested overlaps".into(),
            ));
        }
        let n = n_max as usize + 1;
        let b = omega + 1.0 / (range * range);
        let scale = (omega / PI).sqrt() / b.sqrt();
        let y_scale = (omega / b).sqrt();

        let mut values = DMatrix::<f64>::zeros(n, n);
        let mut h = vec![0.0; n];
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            hermite_polynomials(n_max, y_scale * t, &mut h);
            for i in 0..n {
                let wi = w * h[i];
                // odd n + m vanish by parity
                for j in (i..n).step_by(2) {
                    values[(i, j)] += wi * h[j];
                }
            }
        }
        for i in 0..n {
            for j in i..n {
                let v = if (i + j) % 2 == 0 { scale * values[(i, j)] } else { 0.0 };
                values[(i, j)] = v;
                values[(j, i)] = v;
            }
        }
        Ok(Self {
            range,
            omega,
            values,
        })
    }

    pub fn n_max(&self) -> u32 {
        self.values.nrows() as u32 - 1
    }

    pub fn get(&self, n: u32, m: u32) -> f64 {
        self.values[(n as usize, m as usize)]
    }
}

/// Single overlap element `G_nm`; zero whenever `n + m` is odd.
pub fn gaussian_overlap(n: u32, m: u32, range: f64, omega: f64) -> Result<f64> {
    let n_max = n.max(m);
    if n_max > MAX_OSC_ORDER {
        return Err(Error::OrderOutOfRange {
            n: n_max,
            max: MAX_OSC_ORDER,
        });
    }
    if (n + m) % 2 == 1 {
        return Ok(0.0);
    }
    Ok(OverlapMatrix::new(n_max, range, omega)?.get(n, m))
}
