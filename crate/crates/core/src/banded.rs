//! Symmetric banded matrices and an unpivoted LDL^T factorization, used for
//! Sylvester-inertia counts and shifted inverse iteration.

use alloc::vec;
use alloc::vec::Vec;


use crate::error::{Error, Result};

/// Lower band of a symmetric `n x n` matrix with half-bandwidth `bw`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBand {
    n: usize,
    bw: usize,
    // row i holds a(i, i - bw ..= i)
    data: Vec<f64>,
}

impl SymBand {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        debug_assert!(i - j <= self.bw && i < self.n);
        i * (self.bw + 1) + self.bw - (i - j)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let d = i.abs_diff(j);
        if d > self.bw {
            0.0
        } else {
            self.data[self.slot(i, j)]
        }
    }

    /// Adds `v` to `a(i, j)` (and thereby to `a(j, i)`).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let row = &self.data[i * (self.bw + 1)..(i + 1) * (self.bw + 1)];
            let off = self.bw - (i - lo);
            let mut acc = 0.0;
            for (k, j) in (lo..=i).enumerate() {
                let a = row[off + k];
                acc += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
            y[i] += acc;
        }
        y
    }

    /// LDL^T of `self - sigma I`.
    pub fn factor_shifted(&self, sigma: f64) -> Result<BandLdl> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        let mut l = self.data.clone();
        for i in 0..n {
            l[i * w + bw] -= sigma;
        }
        let mut d = vec![0.0; n];
        let mut scratch = vec![0.0; bw];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            // row i: l(i, j) = (a(i, j) - sum_k l(i, k) d_k l(j, k)) / d_j
            for j in lo..i {
                let kl = j.saturating_sub(bw).max(lo);
                let mut acc = l[i * w + bw - (i - j)];
                for k in kl..j {
                    acc -= scratch[k - lo] * l[j * w + bw - (j - k)];
                }
                // scratch holds l(i, k) d_k for k < j
                scratch[j - lo] = acc;
                l[i * w + bw - (i - j)] = acc / d[j];
            }
            let mut diag = l[i * w + bw];
            for k in lo..i {
                diag -= scratch[k - lo] * l[i * w + bw - (i - k)];
            }
            if diag == 0.0 || !diag.is_finite() {
                return Err(Error::Eigen(alloc::format!("zero pivot at row {i} for shift {sigma}")));
            }
            d[i] = diag;
            l[i * w + bw] = 1.0;
        }
        Ok(BandLdl { n, bw, l, d })
    }
}

/// Unit lower-triangular band factor `L` and diagonal `D`.
#[derive(Debug, Clone)]
pub struct BandLdl {
    n: usize,
    bw: usize,
    l: Vec<f64>,
    d: Vec<f64>,
}

impl BandLdl {
    /// Number of eigenvalues of the factored matrix below the shift.
    pub fn negative_count(&self) -> usize {
        self.d.iter().filter(|&&v| v < 0.0).count()
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut acc = b[i];
            for k in lo..i {
                acc -= self.l[i * w + bw - (i - k)] * b[k];
            }
            b[i] = acc;
        }
        for i in 0..n {
            b[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let mut acc = b[i];
            for k in i + 1..=hi {
                acc -= self.l[k * w + bw - (k - i)] * b[k];
            }
            b[i] = acc;
        }
    }
}

/// Symmetric operator that can be factored at a shift.
pub trait ShiftedSymmetric {
    type Factor: SymFactor;
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
    /// Factor of `self - sigma I`.
    fn factor(&self, sigma: f64) -> Result<Self::Factor>;
}

/// Inertia and solves of a factored `A - sigma I`.
pub trait SymFactor {
    fn negative_count(&self) -> usize;
    fn solve_in_place(&self, b: &mut [f64]);
}

impl ShiftedSymmetric for SymBand {
    type Factor = BandLdl;

    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.mul_vec(x)
    }

    fn factor(&self, sigma: f64) -> Result<BandLdl> {
        self.factor_shifted(sigma)
    }
}

impl SymFactor for BandLdl {
    fn negative_count(&self) -> usize {
        BandLdl::negative_count(self)
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        BandLdl::solve_in_place(self, b)
    }
}

/// Tridiagonal chain hanging off one unknown of a banded core.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    /// Index of the core unknown the chain attaches to.
    pub attach: usize,
    pub diag: Vec<f64>,
    /// `off[0]` couples the attachment to `diag[0]`, `off[k]` couples
    /// `diag[k - 1]` to `diag[k]`.
    pub off: Vec<f64>,
}

/// Banded core plus independent tridiagonal chains. Unknowns are ordered
/// core first, then the chains in sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainedBand {
    pub core: SymBand,
    pub chains: Vec<Chain>,
}

#[derive(Debug, Clone)]
pub struct ChainedLdl {
    core: BandLdl,
    pivots: Vec<Vec<f64>>,
    chains: Vec<(usize, Vec<f64>)>,
    negative: usize,
}

impl ChainedBand {
    fn offsets(&self) -> Vec<usize> {
        let mut at = self.core.size();
        self.chains
            .iter()
            .map(|c| {
                let o = at;
                at += c.diag.len();
                o
            })
            .collect()
    }
}

impl ShiftedSymmetric for ChainedBand {
    type Factor = ChainedLdl;

    fn dim(&self) -> usize {
        self.core.size() + self.chains.iter().map(|c| c.diag.len()).sum::<usize>()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.core.size();
        let mut y = self.core.mul_vec(&x[..n]);
        y.resize(self.dim(), 0.0);
        for (chain, o) in self.chains.iter().zip(self.offsets()) {
            let len = chain.diag.len();
            for k in 0..len {
                let prev = if k == 0 { chain.attach } else { o + k - 1 };
                y[o + k] += chain.diag[k] * x[o + k] + chain.off[k] * x[prev];
                y[prev] += chain.off[k] * x[o + k];
            }
        }
        y
    }

    fn factor(&self, sigma: f64) -> Result<ChainedLdl> {
        let mut core = self.core.clone();
        let mut pivots = Vec::with_capacity(self.chains.len());
        let mut negative = 0;
        for chain in &self.chains {
            let len = chain.diag.len();
            let mut d = vec![0.0; len];
            for k in (0..len).rev() {
                let mut v = chain.diag[k] - sigma;
                if k + 1 < len {
                    v -= chain.off[k + 1] * chain.off[k + 1] / d[k + 1];
                }
                if v == 0.0 || !v.is_finite() {
                    return Err(Error::Eigen(alloc::format!("zero chain pivot for shift {sigma}")));
                }
                d[k] = v;
            }
            negative += d.iter().filter(|&&v| v < 0.0).count();
            if len > 0 {
                core.add(chain.attach, chain.attach, -chain.off[0] * chain.off[0] / d[0]);
            }
            pivots.push(d);
        }
        let core = core.factor_shifted(sigma)?;
        negative += core.negative_count();
        Ok(ChainedLdl {
            core,
            pivots,
            chains: self.chains.iter().map(|c| (c.attach, c.off.clone())).collect(),
            negative,
        })
    }
}

impl SymFactor for ChainedLdl {
    fn negative_count(&self) -> usize {
        self.negative
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.core.n;
        let mut at = n;
        let mut offsets = Vec::with_capacity(self.chains.len());
        for ((attach, off), d) in self.chains.iter().zip(&self.pivots) {
            let len = d.len();
            offsets.push(at);
            // x_k = r_k - (off_k / d_k) x_{k-1}
            for k in (0..len).rev() {
                let mut r = b[at + k];
                if k + 1 < len {
                    r -= off[k + 1] * b[at + k + 1];
                }
                b[at + k] = r / d[k];
            }
            if len > 0 {
                b[*attach] -= off[0] * b[at];
            }
            at += len;
        }
        self.core.solve_in_place(&mut b[..n]);
        for (((attach, off), d), o) in self.chains.iter().zip(&self.pivots).zip(offsets) {
            for k in 0..d.len() {
                let prev = if k == 0 { b[*attach] } else { b[o + k - 1] };
                b[o + k] -= off[k] / d[k] * prev;
            }
        }
    }
}

/// Eigenpair nearest `sigma` by shifted inverse iteration; the eigenvalue
/// is the Rayleigh quotient of the converged vector.
pub fn inverse_iteration<A: ShiftedSymmetric>(a: &A, sigma: f64, tol: f64, max_iter: usize) -> Result<(f64, Vec<f64>)> {
    let f = a.factor(sigma)?;
    let n = a.dim();
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 1e-3 * (i % 7) as f64).collect();
    let norm = |v: &[f64]| v.iter().map(|t| t * t).sum::<f64>().sqrt();
    let nx = norm(&x);
    x.iter_mut().for_each(|t| *t /= nx);
    let mut lambda = f64::NAN;
    for _ in 0..max_iter {
        let mut y = x.clone();
        f.solve_in_place(&mut y);
        let ny = norm(&y);
        if !(ny > 0.0) || !ny.is_finite() {
            return Err(Error::Eigen("inverse iteration broke down".into()));
        }
        y.iter_mut().for_each(|t| *t /= ny);
        let ay = a.apply(&y);
        let rq: f64 = y.iter().zip(&ay).map(|(p, q)| p * q).sum();
        let done = (rq - lambda).abs() <= tol * (1.0 + rq.abs());
        lambda = rq;
        x = y;
        if done {
            return Ok((lambda, x));
        }
    }
    Err(Error::Eigen(alloc::format!("inverse iteration did not converge near {sigma}")))
}
