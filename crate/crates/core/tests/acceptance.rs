//! Acceptance suite. Prints one PASS/FAIL line per criterion; an honest
//! FAIL does not abort the run. Only a criterion that could not be
//! evaluated at all (a panic) fails the target.

mod common;

use std::time::Instant;

use common::{inverse_scattering_length, phase_shift_tan};
use wgscat_core::observables::{partial_transmission, transition_probability, unitarity_defect};
use wgscat_core::spectra::{minima_of_profile, resonance_windows, sample_profile};
use wgscat_core::{
    bound_state_energy, locate_cir, locate_transmission_minimum, resonance_energy, threshold_energy, Channel, Error,
    GaussianPotential, PopulationWeights, ScanSettings, Sequential, Solver, TrapConfig, TransmissionMinimum, C64,
};

type Outcome = Result<(bool, String), Error>;

const CH02: Channel = Channel { n1: 0, n2: 2 };
const CH20: Channel = Channel { n1: 2, n2: 0 };

fn trap(eta: f64, range: f64, n_cut: u32) -> TrapConfig {
    TrapConfig {
        eta,
        range,
        n_cut,
        ..TrapConfig::default()
    }
}

fn solver(eta: f64) -> Solver {
    Solver::new(&trap(eta, 0.1, 20)).expect("solver")
}

/// Scan window wide enough to contain the computed minimum wherever it sits.
fn wide() -> ScanSettings {
    ScanSettings {
        cir_window: (0.5, 10.0),
        cir_points: 96,
        ..ScanSettings::default()
    }
}

fn spread(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    max - min
}

struct Context {
    iso: Solver,
    /// Wide-window T00 minima at E_par/E_perp(0) = 1e-4, 1e-3, 1e-2.
    t00: Vec<Result<TransmissionMinimum, Error>>,
}

const ENERGIES: [f64; 3] = [1e-4, 1e-3, 1e-2];

fn c1(ctx: &Context) -> Outcome {
    let e_par = 1e-3 * ctx.iso.config().ground_threshold();
    let wide = match &ctx.t00[1] {
        Ok(m) => format!("wide-window minimum at {:.4} (T00 = {:.3e})", m.ratio, m.transmission),
        Err(e) => format!("wide-window search failed: {e}"),
    };
    match locate_cir(&ctx.iso, e_par, &ScanSettings::default(), &Sequential) {
        Ok(m) => {
            let pass = (1.43..=1.49).contains(&m.ratio) && m.transmission < 1e-2;
            Ok((pass, format!("ratio* = {:.5}, T00 = {:.3e}; {wide}", m.ratio, m.transmission)))
        }
        Err(e) => Ok((false, format!("cir-locate: {e}; {wide}"))),
    }
}

fn c2(ctx: &Context) -> Outcome {
    let mut r = Vec::new();
    for m in &ctx.t00 {
        r.push(m.as_ref().map_err(|e| e.clone())?.ratio);
    }
    let mean = r.iter().sum::<f64>() / r.len() as f64;
    let rel = spread(&r) / mean;
    Ok((rel < 0.01, format!("ratio* at E_par/E0 = 1e-4, 1e-3, 1e-2: {r:.4?}; spread {:.3}%", 100.0 * rel)))
}

fn c3(ctx: &Context) -> Outcome {
    let tol = ScanSettings::default().cir_tol;
    let m = ctx.t00[1].as_ref().map_err(|e| e.clone())?;
    match m.im_zero {
        Some(z) => {
            let d = (z - m.ratio).abs();
            Ok((d <= 2.0 * tol, format!("T00 min {:.5}, Im f00 zero {:.5}, |d| = {:.2e} (limit {:.1e})", m.ratio, z, d, 2.0 * tol)))
        }
        None => Ok((false, format!("no Im f00 zero near the T00 minimum at {:.4}", m.ratio))),
    }
}

struct GridResult {
    defect: f64,
    degeneracy: f64,
    points: usize,
    control: String,
    control_tripped: bool,
}

fn unitarity_grid(ctx: &Context) -> Result<GridResult, Error> {
    let s = &ctx.iso;
    let e0 = s.config().ground_threshold();
    let (mut defect, mut degeneracy, mut points) = (0.0f64, 0.0f64, 0);
    for i in 0..10 {
        let ratio = 1.0 + i as f64 / 9.0;
        for j in 0..10 {
            let ep = 1e-4 * (500.0f64).powf(j as f64 / 9.0);
            let sol = s.solve(ep * e0, ratio)?;
            let kscale = 1.0 + sol.k_matrix.amax();
            defect = defect
                .max(unitarity_defect(&sol))
                .max(sol.diagnostics.symmetry_defect / kscale);
            let a = s.solve_from(CH20, ep * e0, ratio)?;
            let b = s.solve_from(CH02, ep * e0, ratio)?;
            defect = defect.max(unitarity_defect(&a)).max(unitarity_defect(&b));
            let ta = partial_transmission(&a, CH20)?;
            let tb = partial_transmission(&b, CH02)?;
            degeneracy = degeneracy.max((ta - tb).abs());
            points += 1;
        }
    }
    // negative control: an explicit step ten times the automatic one
    let reference = s.solve(1e-3 * e0, 1.4603)?;
    let mut cfg = s.config().clone();
    cfg.step = Some(10.0 * reference.diagnostics.step);
    let coarse = Solver::new(&cfg)?;
    let (control_tripped, control) = match coarse.solve(1e-3 * e0, 1.4603) {
        Err(Error::AtPoint { source, .. }) if matches!(*source, Error::StepInstability { .. }) => {
            (true, format!("h = {:.3} refused: {source}", cfg.step.unwrap_or(0.0)))
        }
        Err(e) => (false, format!("coarse grid failed differently: {e}")),
        Ok(sol) => (false, format!("coarse grid accepted (defect {:.2e})", unitarity_defect(&sol))),
    };
    Ok(GridResult {
        defect,
        degeneracy,
        points,
        control,
        control_tripped,
    })
}

fn c4(grid: &Result<GridResult, Error>) -> Outcome {
    let g = grid.as_ref().map_err(|e| e.clone())?;
    Ok((
        g.defect < 1e-6 && g.control_tripped,
        format!("{} points x 3 entrances, max defect {:.2e}; control: {}", g.points, g.defect, g.control),
    ))
}

fn c5(ctx: &Context) -> Outcome {
    let e0 = ctx.iso.config().ground_threshold();
    let mut t02 = Vec::new();
    let mut t00 = Vec::new();
    for (i, &ep) in ENERGIES.iter().enumerate() {
        let m02 = locate_transmission_minimum(&ctx.iso, CH02, ep * e0, &wide(), &Sequential)?;
        let m00 = ctx.t00[i].as_ref().map_err(|e| e.clone())?;
        t02.push((m02.ratio, m02.transmission));
        t00.push((m00.ratio, m00.transmission));
    }
    let gap = t02
        .iter()
        .zip(&t00)
        .map(|(a, b)| a.1 - b.1)
        .fold(f64::INFINITY, f64::min);
    let r02: Vec<f64> = t02.iter().map(|m| m.0).collect();
    let r00: Vec<f64> = t00.iter().map(|m| m.0).collect();
    let shift02 = spread(&r02) / (r02.iter().sum::<f64>() / 3.0);
    let shift00 = spread(&r00) / (r00.iter().sum::<f64>() / 3.0);
    let pass = gap >= 0.1 && shift02 > 0.01 && shift00 < 0.01;
    Ok((
        pass,
        format!(
            "min T02 - min T00 >= {gap:.3}; T02 minima {t02:.4?} (shift {:.2}%), T00 shift {:.2}%",
            100.0 * shift02,
            100.0 * shift00
        ),
    ))
}

fn c6(grid: &Result<GridResult, Error>) -> Outcome {
    let g = grid.as_ref().map_err(|e| e.clone())?;
    Ok((g.degeneracy < 1e-8, format!("max |T20 - T02| = {:.2e} over {} points", g.degeneracy, g.points)))
}

fn c7() -> Outcome {
    let mut notes = Vec::new();
    let mut count = |eta: f64, weights: &[f64]| -> Result<Vec<Vec<f64>>, Error> {
        let s = solver(eta);
        let settings = ScanSettings::default();
        let e_par = 5e-3 * s.config().ground_threshold();
        let (lo, hi) = settings.split_window;
        let n = ((hi - lo) / settings.split_step).round() as usize + 1;
        let profile = sample_profile(&s, lo, hi, n, e_par, &Sequential)?;
        let mut out = Vec::new();
        for &w in weights {
            let minima = minima_of_profile(&s, &profile, &PopulationWeights::from_excited_ratio(w)?, e_par, &settings)?;
            let r: Vec<f64> = minima.iter().map(|m| m.ratio).collect();
            notes.push(format!("eta {eta} W2/W0 {w}: {r:.4?}"));
            out.push(r);
        }
        Ok(out)
    };
    let iso = count(1.0, &[0.05])?;
    let a = count(1.05, &[0.05])?;
    let b = count(1.1, &[0.05, 0.01])?;
    let near = |r: &[f64]| r.iter().all(|x| (x - 1.46).abs() < 0.15);
    let two = |r: &[f64]| r.len() == 2 && near(r);
    let sep = |r: &[f64]| if r.len() == 2 { r[1] - r[0] } else { f64::NAN };
    let pass = iso[0].len() == 1
        && near(&iso[0])
        && two(&a[0])
        && two(&b[0])
        && sep(&b[0]) > sep(&a[0])
        && two(&b[1]);
    Ok((pass, notes.join("; ")))
}

fn c8(ctx: &Context) -> Outcome {
    let s = &ctx.iso;
    let eta = 1.0;
    let e2 = threshold_energy(CH02, eta);
    let e4 = threshold_energy(Channel { n1: 0, n2: 4 }, eta);
    let e0 = s.config().ground_threshold();
    let mut pass = true;
    let mut notes = Vec::new();
    for ratio in [1.40, 1.46, 1.52] {
        let pot = s.calibrate(ratio)?.potential;
        for k in 1..=3 {
            let e = e0 + (e2 - e0) * k as f64 / 4.0;
            let p = transition_probability(&s.solve_energy(e, &pot, ratio)?, 0, 2)?;
            pass &= p == 0.0;
        }
        let mut best = (0.0f64, 0.0);
        for k in 1..=24 {
            let e = e2 + (e4 - e2) * k as f64 / 25.0;
            let p = transition_probability(&s.solve_energy(e, &pot, ratio)?, 0, 2)?;
            if p > best.0 {
                best = (p, e);
            }
        }
        pass &= (0.1..=0.5).contains(&best.0);
        notes.push(format!("ratio {ratio}: max P02 = {:.3} at E = {:.3}", best.0, best.1));
    }
    Ok((pass, format!("{}; P02 below E(2) exactly 0", notes.join(", "))))
}

fn branch(s: &Solver, label: Channel, ratios: &[f64]) -> Result<Vec<Option<f64>>, Error> {
    let window = resonance_windows(s)
        .into_iter()
        .find(|(_, c)| *c == label)
        .map(|(w, _)| w)
        .ok_or_else(|| Error::Domain(format!("no window below {label}")))?;
    ratios
        .iter()
        .map(|&r| Ok(resonance_energy(s, r, window, &ScanSettings::default(), &Sequential)?.map(|x| x.energy)))
        .collect()
}

fn c9(ctx: &Context) -> Outcome {
    let ratios = [1.0, 1.3, 1.46, 1.6, 2.0];
    let mut notes = Vec::new();
    // bound branch
    let mut bound = Vec::new();
    for r in [-1.0, 0.0, 1.0, 1.46, 2.0] {
        bound.push(bound_state_energy(&ctx.iso, r)?.map(|b| b.energy));
    }
    let bound_ok = bound.iter().all(Option::is_some)
        && bound.windows(2).all(|w| w[1] < w[0])
        && bound.iter().flatten().all(|&e| e < ctx.iso.config().ground_threshold());
    notes.push(format!("bound E(-1,0,1,1.46,2) = {bound:.4?}"));

    let iso = branch(&ctx.iso, CH02, &ratios)?;
    let e0 = ctx.iso.config().ground_threshold();
    let iso_vals: Vec<f64> = iso.iter().flatten().cloned().collect();
    let complete = iso_vals.len() == ratios.len();
    let mut steep = false;
    let mut descending = false;
    if complete {
        descending = iso_vals.windows(2).all(|w| w[1] < w[0]) && iso_vals.iter().all(|&e| e > e0);
        let slopes: Vec<f64> = (0..4)
            .map(|i| ((iso_vals[i + 1] - iso_vals[i]) / (ratios[i + 1] - ratios[i])).abs())
            .collect();
        let imax = (0..4).max_by(|&a, &b| slopes[a].total_cmp(&slopes[b])).unwrap_or(0);
        steep = imax == 1 || imax == 2;
    }
    notes.push(format!("eta 1 ground-branch E_r = {iso:.4?}"));

    let aniso = solver(1.2);
    let lower = branch(&aniso, CH02, &ratios)?;
    let upper = branch(&aniso, CH20, &ratios)?;
    notes.push(format!("eta 1.2 (0,2) branch {lower:.4?}, (2,0) branch {upper:.4?}"));
    let lower_vals: Vec<f64> = lower.iter().flatten().cloned().collect();
    let upper_vals: Vec<f64> = upper.iter().flatten().cloned().collect();
    let aniso_ok = complete
        && lower_vals.len() == ratios.len()
        && upper_vals.len() == ratios.len()
        && lower_vals.windows(2).all(|w| w[1] < w[0])
        && (0.5..=2.0).contains(&(spread(&lower_vals) / spread(&iso_vals)))
        && spread(&upper_vals) < 0.25 * spread(&lower_vals);
    Ok((bound_ok && descending && steep && aniso_ok, notes.join("; ")))
}

fn c10() -> Outcome {
    let mut worst_k = 0.0f64;
    for &eta in &[1.0, 1.3] {
        let s = Solver::new(&trap(eta, 0.1, 0))?;
        let u00 = s.coupling().matrix()[(0, 0)];
        let e0 = s.channels().thresholds()[0];
        for &(depth, e_par) in &[(40.0, 1e-3), (80.0, 0.05), (150.0, 0.2), (300.0, 0.01)] {
            let pot = GaussianPotential::new(depth, 0.1)?;
            let k = s.solve_energy(e0 + e_par, &pot, f64::NAN)?.k_matrix[(0, 0)];
            let want = phase_shift_tan(depth, u00, 0.1, e_par);
            worst_k = worst_k.max((k - want).abs() / want.abs().max(1.0));
        }
    }
    let s = solver(1.0);
    let mut worst_cal = 0.0f64;
    for ratio in [-1.0, 0.5, 1.4603, 3.0] {
        let cal = s.calibrate(ratio)?;
        worst_cal = worst_cal.max((inverse_scattering_length(cal.potential.depth, 0.1) - ratio).abs());
    }
    let zero = GaussianPotential::new(0.0, 0.1)?;
    let mut worst_s = 0.0f64;
    for e in [1.01, 2.7, 4.2] {
        let sol = s.solve_energy(e, &zero, f64::NAN)?;
        for r in 0..sol.open.len() {
            for c in 0..sol.open.len() {
                let want = C64::new(if r == c { 1.0 } else { 0.0 }, 0.0);
                worst_s = worst_s.max((sol.s_matrix[(r, c)] - want).norm_sqr().sqrt());
            }
        }
    }
    let pass = worst_k < 1e-8 && worst_cal < 1e-6 && worst_s < 1e-13;
    Ok((
        pass,
        format!("tan delta {worst_k:.1e} (1e-8), calibration {worst_cal:.1e} (1e-6), |S - I| {worst_s:.1e}"),
    ))
}

fn c11(ctx: &Context) -> Outcome {
    let mid = ctx.t00[1].as_ref().map_err(|e| e.clone())?.ratio;
    let mut notes = vec![format!("r0 0.1: {mid:.4}")];
    let mut worst = 0.0f64;
    for r0 in [0.05, 0.2] {
        let s = Solver::new(&trap(1.0, r0, 20))?;
        match locate_transmission_minimum(&s, Channel::GROUND, 1e-3 * s.config().ground_threshold(), &wide(), &Sequential) {
            Ok(m) => {
                worst = worst.max((m.ratio - mid).abs() / mid);
                notes.push(format!("r0 {r0}: {:.4}", m.ratio));
            }
            Err(e) => {
                worst = f64::INFINITY;
                notes.push(format!("r0 {r0}: {e}"));
            }
        }
    }
    Ok((worst < 0.02, format!("{}; max shift {:.2}%", notes.join(", "), 100.0 * worst)))
}

fn x_convergence() -> Outcome {
    let t = |n_cut: u32| -> Result<f64, Error> {
        let s = Solver::new(&trap(1.0, 0.1, n_cut))?;
        let sol = s.solve(1e-3 * s.config().ground_threshold(), 1.2)?;
        partial_transmission(&sol, Channel::GROUND)
    };
    let (a, b) = (t(8)?, t(10)?);
    Ok(((a - b).abs() < 5e-4, format!("T00(ratio 1.2): N_cut 8 {a:.6}, 10 {b:.6}, |d| = {:.2e}", (a - b).abs())))
}

fn x_near_global(ctx: &Context) -> Outcome {
    let sol = ctx.iso.solve(1e-3 * ctx.iso.config().ground_threshold(), 1.4603)?;
    let t = partial_transmission(&sol, Channel::GROUND)?;
    let m = ctx.t00[1].as_ref().map_err(|e| e.clone())?;
    let global = m.samples.iter().map(|s| s.1).fold(m.transmission, f64::min);
    Ok((t - global < 1e-2, format!("T00(1.4603) = {t:.4}, global minimum {global:.3e} at {:.4}", m.ratio)))
}

fn report(id: &str, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let (pass, detail) = match f() {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    println!(
        "{} {id:>3} {name}: {detail} [{:.1} s]",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    pass
}

fn main() {
    let start = Instant::now();
    let iso = solver(1.0);
    let e0 = iso.config().ground_threshold();
    let t00 = ENERGIES
        .iter()
        .map(|&ep| locate_transmission_minimum(&iso, Channel::GROUND, ep * e0, &wide(), &Sequential))
        .collect();
    let ctx = Context { iso, t00 };
    let grid = unitarity_grid(&ctx);

    let results = [
        report("1", "CIR position", || c1(&ctx)),
        report("2", "energy stability", || c2(&ctx)),
        report("3", "Im f00 zero coincides with T00 minimum", || c3(&ctx)),
        report("4", "unitarity suite and negative control", || c4(&grid)),
        report("5", "excited-channel contrast", || c5(&ctx)),
        report("6", "isotropic degeneracy", || c6(&grid)),
        report("7", "splitting reproduction", c7),
        report("8", "transition probability magnitude", || c8(&ctx)),
        report("9", "spectrum shape", || c9(&ctx)),
        report("10", "oracle equivalence", c10),
        report("11", "potential independence", || c11(&ctx)),
    ];
    let extra = [
        report("S1", "N_cut 8 vs 10 convergence", x_convergence),
        report("S2", "T00 at 1.4603 near its global minimum", || x_near_global(&ctx)),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!(
        "acceptance: {passed}/{} criteria pass, {}/{} supplementary [{:.0} s]",
        results.len(),
        extra.iter().filter(|&&p| p).count(),
        extra.len(),
        start.elapsed().as_secs_f64()
    );
}
