//! Independent reference calculations shared by the integration tests.
//! Nothing here calls into the crate under test.
#![allow(dead_code)]

use std::f64::consts::PI;

/// `phi_n(x)` from explicit physicists' Hermite polynomials and factorials.
pub fn hermite_function(n: usize, x: f64, omega: f64) -> f64 {
    let y = omega.sqrt() * x;
    let (mut h0, mut h1) = (1.0f64, 2.0 * y);
    let h = match n {
        0 => h0,
        1 => h1,
        _ => {
            for k in 1..n {
                let h2 = 2.0 * y * h1 - 2.0 * k as f64 * h0;
                h0 = h1;
                h1 = h2;
            }
            h1
        }
    };
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let norm = (omega / PI).powf(0.25) / (2f64.powi(n as i32) * fact).sqrt();
    norm * h * (-0.5 * y * y).exp()
}

/// Trapezoid rule on `[-l, l]` with `n` intervals.
pub fn trapezoid<F: Fn(f64) -> f64>(f: F, l: f64, n: usize) -> f64 {
    let h = 2.0 * l / n as f64;
    let mut s = 0.5 * (f(-l) + f(l));
    for i in 1..n {
        s += f(-l + i as f64 * h);
    }
    s * h
}

/// Composite Simpson on `[a, b]`, `n` even.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Laguerre polynomials `L_0..=L_n` at `x`.
pub fn laguerre(n: usize, x: f64) -> Vec<f64> {
    let mut l = vec![1.0; n + 1];
    if n >= 1 {
        l[1] = 1.0 - x;
    }
    for k in 1..n {
        let kf = k as f64;
        l[k + 1] = ((2.0 * kf + 1.0 - x) * l[k] - kf * l[k - 1]) / (kf + 1.0);
    }
    l
}

/// `G_nm = int_0^inf L_n(x) L_m(x) exp(-b x) dx`: the Gaussian overlap of the
/// isotropic `m = 0` transverse states with `b = 1 + 1/r0^2`.
pub fn radial_overlaps(n_rho: usize, range: f64) -> Vec<Vec<f64>> {
    let b = 1.0 + 1.0 / (range * range);
    let upper = 60.0 / b;
    let mut g = vec![vec![0.0; n_rho]; n_rho];
    for i in 0..n_rho {
        for j in i..n_rho {
            let v = simpson(
                |x| {
                    let l = laguerre(n_rho, x);
                    l[i] * l[j] * (-b * x).exp()
                },
                0.0,
                upper,
                40_000,
            );
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}

/// Single-channel even-parity `tan(delta)` for
/// `u'' = (2 depth u00 exp(-z^2/r0^2) - k^2) u`, with `u00 < 0` attractive,
/// from the variable-phase equation `delta' = (V/k) cos^2(kz - delta)`.
pub fn phase_shift_tan(depth: f64, u00: f64, range: f64, e_par: f64) -> f64 {
    let k = (2.0 * e_par).sqrt();
    let rhs = |z: f64, d: f64| {
        let v = 2.0 * depth * u00 * (-(z * z) / (range * range)).exp();
        v / k * (k * z - d).cos().powi(2)
    };
    let run = |h: f64| {
        let z_end = 12.0 * range;
        let n = (z_end / h).round() as usize;
        let h = z_end / n as f64;
        let mut d = 0.0f64;
        for i in 0..n {
            let z = i as f64 * h;
            let k1 = rhs(z, d);
            let k2 = rhs(z + 0.5 * h, d + 0.5 * h * k1);
            let k3 = rhs(z + 0.5 * h, d + 0.5 * h * k2);
            let k4 = rhs(z + h, d + h * k3);
            d += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        d
    };
    let h = range / 400.0;
    let coarse = run(h);
    let fine = run(h / 2.0);
    (fine + (fine - coarse) / 15.0).tan()
}

/// `K00` of the coupled radial problem
/// `u'' = 2 (thr_n - E) u - 2 depth exp(-z^2/r0^2) G u`, `thr_n = 1 + 2n`,
/// even at `z = 0`, with only channel 0 open. RK4 plus direct matching.
pub fn radial_k00(n_rho: usize, depth: f64, range: f64, energy: f64) -> f64 {
    let g = radial_overlaps(n_rho, range);
    let thr: Vec<f64> = (0..n_rho).map(|n| 1.0 + 2.0 * n as f64).collect();
    assert!(energy > thr[0] && (n_rho == 1 || energy < thr[1]));
    let run = |h: f64| {
        let m = n_rho;
        let z_end = 12.0 * range;
        let steps = (z_end / h).round() as usize;
        let h = z_end / steps as f64;
        // state: columns of (u, u') for m independent solutions
        let acc = |z: f64, u: &[f64]| -> Vec<f64> {
            let w = 2.0 * depth * (-(z * z) / (range * range)).exp();
            let mut out = vec![0.0; m * m];
            for col in 0..m {
                for r in 0..m {
                    let mut v = 2.0 * (thr[r] - energy) * u[r * m + col];
                    for s in 0..m {
                        v -= w * g[r][s] * u[s * m + col];
                    }
                    out[r * m + col] = v;
                }
            }
            out
        };
        let mut u = vec![0.0; m * m];
        let mut du = vec![0.0; m * m];
        for i in 0..m {
            u[i * m + i] = 1.0;
        }
        let add = |a: &[f64], b: &[f64], s: f64| a.iter().zip(b).map(|(x, y)| x + s * y).collect::<Vec<f64>>();
        for i in 0..steps {
            let z = i as f64 * h;
            let k1u = du.clone();
            let k1v = acc(z, &u);
            let k2u = add(&du, &k1v, 0.5 * h);
            let k2v = acc(z + 0.5 * h, &add(&u, &k1u, 0.5 * h));
            let k3u = add(&du, &k2v, 0.5 * h);
            let k3v = acc(z + 0.5 * h, &add(&u, &k2u, 0.5 * h));
            let k4u = add(&du, &k3v, h);
            let k4v = acc(z + h, &add(&u, &k3u, h));
            for j in 0..m * m {
                u[j] += h / 6.0 * (k1u[j] + 2.0 * k2u[j] + 2.0 * k3u[j] + k4u[j]);
                du[j] += h / 6.0 * (k1v[j] + 2.0 * k2v[j] + 2.0 * k3v[j] + k4v[j]);
            }
        }
        // row r: u = f_r A + s_r B with (f, s) = (cos, sin)/sqrt(k) or (e^{kz}, e^{-kz})
        let z = z_end;
        let mut a = vec![vec![0.0; m]; m];
        let mut b = vec![vec![0.0; m]; m];
        for r in 0..m {
            let (f, df, s, ds) = if r == 0 {
                let k = (2.0 * (energy - thr[0])).sqrt();
                let n = 1.0 / k.sqrt();
                (n * (k * z).cos(), -n * k * (k * z).sin(), n * (k * z).sin(), n * k * (k * z).cos())
            } else {
                let q = (2.0 * (thr[r] - energy)).sqrt();
                ((q * z).exp(), q * (q * z).exp(), (-q * z).exp(), -q * (-q * z).exp())
            };
            let wr = f * ds - df * s;
            for col in 0..m {
                let (uu, dd) = (u[r * m + col], du[r * m + col]);
                a[r][col] = (uu * ds - dd * s) / wr;
                b[r][col] = (f * dd - df * uu) / wr;
            }
        }
        // A x = e_0 removes growing closed components; K00 = (B x)_0
        let x = solve_dense(a, {
            let mut e = vec![0.0; m];
            e[0] = 1.0;
            e
        });
        (0..m).map(|j| b[0][j] * x[j]).sum::<f64>()
    };
    let h = range / 200.0;
    let coarse = run(h);
    let fine = run(h / 2.0);
    fine + (fine - coarse) / 15.0
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

fn radial_rk4(depth: f64, range: f64, energy: f64, r_end: f64, h: f64) -> (f64, f64) {
    let steps = (r_end / h).round() as usize;
    let h = r_end / steps as f64;
    let acc = |r: f64, u: f64| 2.0 * (-depth * (-(r * r) / (range * range)).exp() - energy) * u;
    let (mut u, mut du) = (0.0f64, 1.0f64);
    for i in 0..steps {
        let r = i as f64 * h;
        let k1u = du;
        let k1v = acc(r, u);
        let k2u = du + 0.5 * h * k1v;
        let k2v = acc(r + 0.5 * h, u + 0.5 * h * k1u);
        let k3u = du + 0.5 * h * k2v;
        let k3v = acc(r + 0.5 * h, u + 0.5 * h * k2u);
        let k4u = du + h * k3v;
        let k4v = acc(r + h, u + h * k3u);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    (u, du)
}

/// Free-space `1/a_s` of `-depth exp(-r^2/r0^2)` from the zero-energy
/// radial solution at `r = 20 r0`.
pub fn inverse_scattering_length(depth: f64, range: f64) -> f64 {
    let r = 20.0 * range;
    let est = |h: f64| {
        let (u, du) = radial_rk4(depth, range, 0.0, r, h);
        du / (r * du - u)
    };
    let coarse = est(range / 500.0);
    let fine = est(range / 1000.0);
    fine + (fine - coarse) / 15.0
}

/// Lowest free-space s-wave bound state by shooting; `None` if unbound.
pub fn shooting_bound_state(depth: f64, range: f64) -> Option<f64> {
    let mismatch = |e: f64, h: f64| {
        let kappa = (-2.0 * e).sqrt();
        let r_end = 15.0 * range + 1.0 / kappa;
        let (u, du) = radial_rk4(depth, range, e, r_end, h);
        (du + kappa * u) / (u.abs() + du.abs())
    };
    let h = range / 400.0;
    let mut lo = -depth;
    let mut found = None;
    let n = 4000;
    let m_lo = mismatch(lo, h);
    for i in 1..=n {
        let e = -depth + depth * (i as f64 / n as f64).powi(2) * (1.0 - 1e-9);
        let m = mismatch(e, h);
        if m.signum() != m_lo.signum() {
            found = Some((lo, e));
            break;
        }
        lo = e;
    }
    let (mut a, mut b) = found?;
    let fa = mismatch(a, h).signum();
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mismatch(mid, h).signum() == fa {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-14 * a.abs().max(1.0) {
            break;
        }
    }
    Some(0.5 * (a + b))
}
