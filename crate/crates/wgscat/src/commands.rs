//! Sweep drivers, one per command.

use std::time::Instant;

use wgscat_core::observables::{partial_transmission, reflection, transition_probability, unitarity_defect};
use wgscat_core::spectra::{minima_of_profile, sample_profile, WEIGHTED_ENTRANCES};
use wgscat_core::{
    locate_transmission_minimum, spectrum, threshold_energy, Channel, Executor, PopulationWeights,
    ScatteringSolution, Sequential, Solver,
};

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::output::{num, opt_num, write_metadata, Metadata, PointRecord, Table};
use crate::pool::ThreadPool;

/// Defects above this mark a `check-unitarity` point as failed.
pub const UNITARITY_TOLERANCE: f64 = 1e-6;

pub const SCAN_COLUMNS: &[&str] = &[
    "eta",
    "ratio",
    "epar_over_eperp",
    "n1",
    "n2",
    "T",
    "R",
    "ReF00",
    "ImF00",
    "unitarity_defect",
    "status",
];
pub const CIR_COLUMNS: &[&str] = &[
    "eta",
    "epar_over_eperp",
    "n1",
    "n2",
    "ratio_min",
    "T_min",
    "im_f00_zero",
    "g1d_indicator",
    "status",
];
pub const SPLIT_COLUMNS: &[&str] = &["eta", "w2_over_w0", "min_index", "ratio_min", "T_min"];
pub const SPECTRUM_COLUMNS: &[&str] = &["eta", "ratio", "kind", "branch_n1", "branch_n2", "E", "E_B_or_gap"];
pub const TRANSITION_COLUMNS: &[&str] = &["eta", "ratio", "E", "n", "n_prime", "P", "unitarity_defect", "status"];
pub const UNITARITY_COLUMNS: &[&str] = &["eta", "ratio", "E", "n_open", "unitarity_defect", "status"];
pub const CALIBRATE_COLUMNS: &[&str] = &["target_ratio", "V0", "a_s", "bound_count"];

pub fn columns(command: Command) -> &'static [&'static str] {
    match command {
        Command::ScanRatio | Command::ScanEnergy => SCAN_COLUMNS,
        Command::CirLocate => CIR_COLUMNS,
        Command::Splitting => SPLIT_COLUMNS,
        Command::Spectrum => SPECTRUM_COLUMNS,
        Command::Transitions => TRANSITION_COLUMNS,
        Command::CheckUnitarity => UNITARITY_COLUMNS,
        Command::Calibrate => CALIBRATE_COLUMNS,
    }
}

/// What a run produced, before anything is written.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: Table,
    pub points: Vec<PointRecord>,
    pub notes: Vec<String>,
}

impl RunOutput {
    fn new(command: Command) -> Self {
        Self {
            table: Table::new(columns(command)),
            points: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn record(&mut self, label: String, defect: Option<f64>, status: &str) {
        self.points.push(PointRecord {
            index: self.points.len(),
            label,
            unitarity_defect: defect,
            status: status.to_string(),
        });
    }

    pub fn failed(&self) -> usize {
        self.points.iter().filter(|p| p.status != "ok").count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub points: usize,
    pub failed: usize,
    pub wall_time_s: f64,
}

/// Runs `cfg.command` and writes the CSV and its sidecar.
pub fn run(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let start = Instant::now();
    let out = execute(cfg)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    out.table.write(&cfg.output)?;
    let max_defect = out
        .points
        .iter()
        .filter_map(|p| p.unitarity_defect)
        .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
    let meta = Metadata {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: cfg.command.name(),
        config: cfg,
        csv: cfg.output.display().to_string(),
        columns: out.table.header,
        points: &out.points,
        failed_points: out.failed(),
        max_unitarity_defect: max_defect,
        wall_time_s,
        notes: &out.notes,
    };
    write_metadata(&cfg.metadata_path(), &meta)?;
    Ok(RunSummary {
        points: out.points.len(),
        failed: out.failed(),
        wall_time_s,
    })
}

/// Computes the table for `cfg` without touching the filesystem.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let solver = Solver::new(&cfg.trap())?;
    let pool = ThreadPool::new(cfg.workers);
    let mut out = RunOutput::new(cfg.command);
    let e_perp0 = solver.config().ground_threshold();
    match cfg.command {
        Command::ScanRatio => {
            let ratios = cfg.ratio_axis();
            let e_par = cfg.epar * e_perp0;
            let res = pool.map(ratios.len(), |i| entrance_rows(&solver, ratios[i], e_par));
            for (ratio, rows) in ratios.iter().zip(res) {
                push_scan_rows(&mut out, cfg, *ratio, cfg.epar, rows);
            }
        }
        Command::ScanEnergy => {
            let eps = cfg.epar_axis();
            let res = pool.map(eps.len(), |i| entrance_rows(&solver, cfg.ratio, eps[i] * e_perp0));
            for (ep, rows) in eps.iter().zip(res) {
                push_scan_rows(&mut out, cfg, cfg.ratio, *ep, rows);
            }
        }
        Command::CirLocate => cir_locate(cfg, &solver, &pool, &mut out)?,
        Command::Splitting => splitting(cfg, &solver, &pool, &mut out)?,
        Command::Spectrum => spectrum_rows(cfg, &solver, &pool, &mut out),
        Command::Transitions => transitions(cfg, &solver, &pool, &mut out)?,
        Command::CheckUnitarity => check_unitarity(cfg, &solver, &pool, &mut out)?,
        Command::Calibrate => {
            let ratios = cfg.ratio_axis();
            let res = pool.map(ratios.len(), |i| solver.calibrate(ratios[i]));
            for (ratio, cal) in ratios.iter().zip(res) {
                match cal {
                    Ok(c) => {
                        out.table.push(vec![
                            num(*ratio),
                            num(c.potential.depth),
                            num(c.scattering_length.value),
                            c.bound_count.to_string(),
                        ]);
                        out.record(format!("ratio={}", num(*ratio)), None, "ok");
                    }
                    Err(e) => out.record(format!("ratio={}", num(*ratio)), None, &format!("error: {e}")),
                }
            }
        }
    }
    out.notes.extend(policy_notes(cfg.command));
    Ok(out)
}

fn policy_notes(command: Command) -> Vec<String> {
    let mut notes = vec![
        "energies in units of hbar*omega2, lengths in a_perp = sqrt(hbar/(mu*omega2)); epar values are E_par/E_perp(0,0)"
            .to_string(),
        "depth calibrated to a_perp/a_s on the one-bound-state branch of the free Gaussian".to_string(),
    ];
    match command {
        Command::ScanRatio | Command::ScanEnergy => notes.push(
            "each entrance row is solved at its own threshold plus E_par; ReF00/ImF00 are the elastic amplitude of the row's entrance"
                .into(),
        ),
        Command::Splitting => notes.push(
            "weights W00 = 1/(1+w), W20 = W02 = w/(2(1+w)) with w = W2/W0; each T_i at its own threshold plus E_par"
                .into(),
        ),
        Command::Transitions => notes.push(
            "P(n->n') = 2 sum over final manifold of (k'/k)|f|^2, averaged over open entrance channels of manifold n; the factor 2 is applied for every n'"
                .into(),
        ),
        Command::Spectrum => notes.push(
            "resonant branches are labelled by the channel whose threshold closes the energy window; E_B_or_gap is the binding energy (bound) or E - E_perp(0,0) (resonant)"
                .into(),
        ),
        _ => {}
    }
    notes
}

type EntranceRow = (Channel, Result<(f64, f64, f64, f64, f64), String>);

fn entrance_rows(solver: &Solver, ratio: f64, e_par: f64) -> Vec<EntranceRow> {
    WEIGHTED_ENTRANCES
        .iter()
        .map(|&ch| {
            let r = solver
                .solve_from(ch, e_par, ratio)
                .and_then(|s| scan_values(&s, ch))
                .map_err(|e| e.to_string());
            (ch, r)
        })
        .collect()
}

fn scan_values(s: &ScatteringSolution, ch: Channel) -> wgscat_core::Result<(f64, f64, f64, f64, f64)> {
    let t = partial_transmission(s, ch)?;
    let r = reflection(s, ch)?;
    let i = s.open_index(ch).ok_or(wgscat_core::Error::ClosedEntrance(ch))?;
    let f = s.amplitude[(i, i)];
    Ok((t, r, f.re, f.im, unitarity_defect(s)))
}

fn push_scan_rows(out: &mut RunOutput, cfg: &RunConfig, ratio: f64, epar: f64, rows: Vec<EntranceRow>) {
    for (ch, r) in rows {
        let label = format!("ratio={} epar={} entrance={ch}", num(ratio), num(epar));
        let head = vec![num(cfg.eta), num(ratio), num(epar), ch.n1.to_string(), ch.n2.to_string()];
        match r {
            Ok((t, refl, re, im, d)) => {
                let mut row = head;
                row.extend([num(t), num(refl), num(re), num(im), num(d), "ok".into()]);
                out.table.push(row);
                out.record(label, Some(d), "ok");
            }
            Err(e) => {
                let status = format!("error: {e}");
                let mut row = head;
                row.extend(std::iter::repeat(num(f64::NAN)).take(5));
                row.push(status.clone());
                out.table.push(row);
                out.record(label, None, &status);
            }
        }
    }
}

fn cir_locate(cfg: &RunConfig, solver: &Solver, pool: &ThreadPool, out: &mut RunOutput) -> Result<(), CliError> {
    let entrance = cfg.entrance()?;
    let mut settings = cfg.scan_settings();
    settings.cir_window = (cfg.ratio_min, cfg.ratio_max);
    settings.cir_points = cfg.ratio_axis().len().max(3);
    let e_perp0 = solver.config().ground_threshold();
    let gap = threshold_energy(Channel { n1: 2, n2: 0 }, cfg.eta) - e_perp0;
    for ep in cfg.epar_axis() {
        let e_par = ep * e_perp0;
        let label = format!("epar={} entrance={entrance}", num(ep));
        let head = vec![num(cfg.eta), num(ep), entrance.n1.to_string(), entrance.n2.to_string()];
        let res = if entrance == Channel::GROUND && e_par >= gap {
            Err(format!("collision energy {e_par} above the first excited threshold"))
        } else {
            locate_transmission_minimum(solver, entrance, e_par, &settings, pool).map_err(|e| e.to_string())
        };
        let mut row = head;
        match res {
            Ok(m) => {
                row.extend([
                    num(m.ratio),
                    num(m.transmission),
                    opt_num(m.im_zero),
                    num(m.g1d_indicator),
                    "ok".into(),
                ]);
                out.record(label, None, "ok");
            }
            Err(e) => {
                let status = format!("error: {e}");
                row.extend([num(f64::NAN), num(f64::NAN), String::new(), num(f64::NAN), status.clone()]);
                out.record(label, None, &status);
            }
        }
        out.table.push(row);
    }
    Ok(())
}

fn splitting(cfg: &RunConfig, solver: &Solver, pool: &ThreadPool, out: &mut RunOutput) -> Result<(), CliError> {
    let settings = cfg.scan_settings();
    let weights = PopulationWeights::from_excited_ratio(cfg.w2_over_w0)?;
    let e_par = cfg.epar * solver.config().ground_threshold();
    let (lo, hi) = settings.split_window;
    let n = cfg.ratio_axis().len().max(3);
    let label = format!("w2_over_w0={}", num(cfg.w2_over_w0));
    let minima = sample_profile(solver, lo, hi, n, e_par, pool)
        .and_then(|p| {
            let defect = p
                .iter()
                .flat_map(|(_, s)| s.iter().map(unitarity_defect))
                .fold(0.0, f64::max);
            minima_of_profile(solver, &p, &weights, e_par, &settings).map(|m| (m, defect))
        });
    match minima {
        Ok((minima, defect)) => {
            for (i, m) in minima.iter().enumerate() {
                out.table.push(vec![
                    num(cfg.eta),
                    num(cfg.w2_over_w0),
                    i.to_string(),
                    num(m.ratio),
                    num(m.transmission),
                ]);
            }
            out.notes.push(format!("{} interior minima of the weighted transmission", minima.len()));
            out.record(label, Some(defect), "ok");
        }
        Err(e) => out.record(label, None, &format!("error: {e}")),
    }
    Ok(())
}

fn spectrum_rows(cfg: &RunConfig, solver: &Solver, pool: &ThreadPool, out: &mut RunOutput) {
    let settings = cfg.scan_settings();
    let ratios = cfg.ratio_axis();
    let res = pool.map(ratios.len(), |i| spectrum(solver, &ratios[i..=i], &settings, &Sequential));
    for (ratio, r) in ratios.iter().zip(res) {
        let label = format!("ratio={}", num(*ratio));
        match r {
            Ok(points) => {
                for p in points {
                    out.table.push(vec![
                        num(p.eta),
                        num(p.ratio),
                        p.kind.as_str().into(),
                        p.branch.n1.to_string(),
                        p.branch.n2.to_string(),
                        num(p.energy),
                        num(p.gap),
                    ]);
                }
                out.record(label, None, "ok");
            }
            Err(e) => out.record(label, None, &format!("error: {e}")),
        }
    }
}

fn transitions(cfg: &RunConfig, solver: &Solver, pool: &ThreadPool, out: &mut RunOutput) -> Result<(), CliError> {
    let cal = solver.calibrate(cfg.ratio)?;
    let energies = cfg.energy_axis();
    let res = pool.map(energies.len(), |i| {
        solver
            .solve_energy(energies[i], &cal.potential, cal.ratio)
            .and_then(|s| {
                let d = unitarity_defect(&s);
                Ok([
                    (2, transition_probability(&s, 0, 2)?),
                    (4, transition_probability(&s, 0, 4)?),
                ])
                .map(|p| (p, d))
            })
    });
    for (e, r) in energies.iter().zip(res) {
        let label = format!("E={}", num(*e));
        match r {
            Ok((ps, d)) => {
                for (np, p) in ps {
                    out.table.push(vec![
                        num(cfg.eta),
                        num(cfg.ratio),
                        num(*e),
                        "0".into(),
                        np.to_string(),
                        num(p),
                        num(d),
                        "ok".into(),
                    ]);
                }
                out.record(label, Some(d), "ok");
            }
            Err(err) => {
                let status = format!("error: {err}");
                for np in [2, 4] {
                    out.table.push(vec![
                        num(cfg.eta),
                        num(cfg.ratio),
                        num(*e),
                        "0".into(),
                        np.to_string(),
                        num(f64::NAN),
                        num(f64::NAN),
                        status.clone(),
                    ]);
                }
                out.record(label, None, &status);
            }
        }
    }
    Ok(())
}

fn check_unitarity(cfg: &RunConfig, solver: &Solver, pool: &ThreadPool, out: &mut RunOutput) -> Result<(), CliError> {
    let n = cfg.grid_points;
    let ratios: Vec<f64> = (0..n)
        .map(|i| cfg.ratio_min + (cfg.ratio_max - cfg.ratio_min) * i as f64 / (n - 1) as f64)
        .collect();
    let mut e_cfg = cfg.clone();
    e_cfg.energy_points = n;
    let energies = e_cfg.energy_axis();
    let grid: Vec<(f64, f64)> = ratios
        .iter()
        .flat_map(|&r| energies.iter().map(move |&e| (r, e)))
        .collect();
    let res = pool.map(grid.len(), |i| {
        let (ratio, e) = grid[i];
        solver
            .calibrate(ratio)
            .and_then(|c| solver.solve_energy(e, &c.potential, c.ratio))
            .map(|s| (s.open.len(), unitarity_defect(&s)))
    });
    for (&(ratio, e), r) in grid.iter().zip(res) {
        let label = format!("ratio={} E={}", num(ratio), num(e));
        match r {
            Ok((n_open, d)) => {
                let status = if d < UNITARITY_TOLERANCE { "ok" } else { "defect above 1e-6" };
                out.table.push(vec![
                    num(cfg.eta),
                    num(ratio),
                    num(e),
                    n_open.to_string(),
                    num(d),
                    status.into(),
                ]);
                out.record(label, Some(d), status);
            }
            Err(err) => {
                let status = format!("error: {err}");
                out.table.push(vec![
                    num(cfg.eta),
                    num(ratio),
                    num(e),
                    String::new(),
                    num(f64::NAN),
                    status.clone(),
                ]);
                out.record(label, None, &status);
            }
        }
    }
    Ok(())
}
