//! Executes scenario configurations: builds systems, propagates, writes CSV series and a manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{DriveConfig, InitialState, ScenarioConfig};
use crate::dressed::TransitionClass;
use crate::dynamics::{gibbs_from_eigen, propagate, Observable, PropagationStats, SolverOptions, Trajectory};
use crate::error::{Error, Result};
use crate::linalg::{EigenSystem, Operator};
use crate::models::{Drive, DriveKind};
use crate::scenario::{circuit_qed_pulse, Method, Model, OpenSystem, Port};

/// Environment variable naming the default output directory.
pub const OUTPUT_ENV: &str = "GME_OUTPUT_DIR";

/// One point of a sweep: a temperature (or the configured bath temperatures) and a solver.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RunPoint {
    pub temperature: Option<f64>,
    pub method: Method,
}

impl RunPoint {
    pub fn label(&self) -> String {
        match self.temperature {
            Some(t) => format!("T{t}_{}", self.method.name()),
            None => self.method.name().to_string(),
        }
    }
}

pub fn run_points(config: &ScenarioConfig) -> Vec<RunPoint> {
    let mut out = Vec::new();
    for temperature in config.sweep() {
        for &method in &config.solver.methods {
            out.push(RunPoint { temperature, method });
        }
    }
    out
}

pub fn build_system(config: &ScenarioConfig, model: Model, temperature: Option<f64>) -> Result<OpenSystem> {
    let baths: Vec<_> = config
        .baths
        .iter()
        .map(|b| (b.port, temperature.map_or(b.spec(), |t| b.spec().with_temperature(t))))
        .collect();
    OpenSystem::new(model, &baths)
}

/// The drive with every derived field filled in.
pub fn resolve_drive(config: &ScenarioConfig, system: &OpenSystem) -> Result<Option<(Port, DriveKind)>> {
    let Some(d) = config.drive else { return Ok(None) };
    Ok(Some(match d {
        DriveConfig::GaussianPulse { port, amplitude, carrier, t0, width } => {
            let plan = match system.model {
                Model::Rabi(_) => Some(circuit_qed_pulse(&system.eig)),
                _ => None,
            };
            let missing = || Error::Config("pulse carrier and width must be given for this model".into());
            let carrier = match carrier {
                Some(c) => c,
                None => plan.ok_or_else(missing)?.carrier,
            };
            let width = match width {
                Some(w) => w,
                None => plan.ok_or_else(missing)?.width,
            };
            let t0 = t0.unwrap_or(6.0 * width);
            (port, DriveKind::GaussianPulse { amplitude, carrier, t0, width })
        }
        DriveConfig::Continuous { port, amplitude, carrier } => (port, DriveKind::Continuous { amplitude, carrier }),
    }))
}

/// Eigensystem the solver relaxes towards: the photon-conserving one for the hu solver.
fn reference_eigensystem(system: &OpenSystem, method: Method) -> Result<EigenSystem> {
    if method == Method::Hu {
        Ok(system.photon_conserving()?.eig)
    } else {
        Ok(system.eig.clone())
    }
}

pub fn observables(config: &ScenarioConfig, system: &OpenSystem, method: Method) -> Result<Vec<Observable>> {
    let mut obs = Vec::new();
    match system.model {
        Model::Rabi(_) => {
            let a = system.ladder_of(Port::Cavity)?;
            let q = system.ladder_of(Port::Qubit)?;
            obs.push(Observable::number("n_A", &a));
            obs.push(Observable::pair_correlation("G2_A", &a));
            obs.push(Observable::number("n_Q", &q));
        }
        Model::Optomech(_) => {
            let a = system.ladder_of(Port::Cavity)?;
            let b = system.ladder_of(Port::Mechanics)?;
            obs.push(Observable::number("n_A", &a));
            obs.push(Observable::number("n_B", &b));
            if config.scenario == crate::config::ScenarioName::HuFailure {
                // populations stay near zero here, so g2 would be a ratio of round-off
                let eig = reference_eigensystem(system, method)?;
                obs.push(Observable::expectation("rho11", eig.projector(1)));
                obs.push(Observable::expectation("rho22", eig.projector(2)));
            } else {
                obs.push(Observable::g2("g2_A", &a));
                obs.push(Observable::g2("g2_B", &b));
            }
        }
    }
    obs.push(Observable::min_eigenvalue("min_eig"));
    Ok(obs)
}

pub fn initial_state(config: &ScenarioConfig, system: &OpenSystem, point: RunPoint) -> Result<Operator> {
    match config.initial {
        InitialState::Ground => Ok(reference_eigensystem(system, point.method)?.projector(0)),
        InitialState::Gibbs => {
            let t = point.temperature.or(system.channels.first().map(|c| c.bath.temperature)).unwrap_or(0.0);
            Ok(gibbs_from_eigen(&system.eig, t))
        }
    }
}

/// Propagates a single run point on the configured model, or one enlarged by `extra_levels`.
pub fn simulate(config: &ScenarioConfig, point: RunPoint, extra_levels: usize) -> Result<(Trajectory, Option<DriveKind>)> {
    let model = config.model.resolve()?.enlarged(extra_levels);
    let system = build_system(config, model, point.temperature)?;
    let filter = config.filter.resolve()?;
    let diss = system.dissipator(point.method, filter, config.solver.dephasing)?;
    let drive = match resolve_drive(config, &system)? {
        Some((port, kind)) => Some(Drive::new(kind, system.model.drive_operator(port)?)?),
        None => None,
    };
    let rho0 = initial_state(config, &system, point)?;
    let obs = observables(config, &system, point.method)?;
    let opts = SolverOptions { rtol: config.solver.rtol, atol: config.solver.atol, ..Default::default() };
    let traj = propagate(&system.h, drive.as_ref(), &diss, &rho0, &config.grid.times(), &opts, &obs)?;
    Ok((traj, drive.map(|d| d.kind)))
}

/// Floor on the reference magnitude in [`series_deviation`].
pub const DEVIATION_FLOOR: f64 = 1e-6;

/// Largest sample-wise relative deviation `|a - b| / max(|b|, floor)` of each series of `a` from
/// its counterpart in `b`; samples where either value is NaN are skipped.
pub fn series_deviation(a: &Trajectory, b: &Trajectory) -> Vec<(String, f64)> {
    a.names
        .iter()
        .zip(&a.series)
        .filter(|(n, _)| n.as_str() != "min_eig")
        .filter_map(|(n, s)| {
            let o = b.series(n)?;
            let dev = s
                .iter()
                .zip(o)
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs() / y.abs().max(DEVIATION_FLOOR)));
            Some((n.clone(), dev))
        })
        .collect()
}

pub fn write_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut s = String::from("t");
    for n in &traj.names {
        s.push(',');
        s.push_str(n);
    }
    s.push('\n');
    for (i, t) in traj.times.iter().enumerate() {
        write!(s, "{t:.16e}").unwrap();
        for series in &traj.series {
            write!(s, ",{:.16e}", series[i]).unwrap();
        }
        s.push('\n');
    }
    std::fs::write(path, s)?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub label: String,
    pub file: String,
    pub temperature: Option<f64>,
    pub method: Method,
    pub dim: usize,
    pub drive: Option<DriveKind>,
    pub observables: Vec<String>,
    pub stats: PropagationStats,
    pub wall_seconds: f64,
    /// Relative deviation per observable after raising every truncation by two levels.
    pub convergence: Option<Vec<(String, f64)>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ScenarioConfig,
    pub runs: Vec<RunRecord>,
    pub wall_seconds: f64,
}

pub fn default_output_dir(config: &ScenarioConfig) -> PathBuf {
    config
        .output
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("gme-output"))
        .join(config.scenario.name())
}

fn run_one(config: &ScenarioConfig, point: RunPoint, out_dir: &Path) -> Result<RunRecord> {
    let start = Instant::now();
    let (traj, drive) = simulate(config, point, 0)?;
    let convergence = if config.convergence_check {
        let (big, _) = simulate(config, point, 2)?;
        Some(series_deviation(&traj, &big))
    } else {
        None
    };
    let file = format!("{}_{}.csv", config.scenario.name(), point.label());
    write_csv(&out_dir.join(&file), &traj)?;
    Ok(RunRecord {
        label: point.label(),
        file,
        temperature: point.temperature,
        method: point.method,
        dim: config.model.resolve()?.dim(),
        drive,
        observables: traj.names.clone(),
        stats: traj.stats,
        wall_seconds: start.elapsed().as_secs_f64(),
        convergence,
    })
}

/// Runs every sweep point (at most `jobs` concurrently) and writes `manifest.json` into `out_dir`.
pub fn run(config: &ScenarioConfig, out_dir: &Path, jobs: usize) -> Result<Manifest> {
    config.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let start = Instant::now();
    let points = run_points(config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let runs: Vec<RunRecord> =
        pool.install(|| points.par_iter().map(|p| run_one(config, *p, out_dir)).collect::<Result<_>>())?;
    let manifest = Manifest {
        tool: "gme",
        version: env!("CARGO_PKG_VERSION"),
        config: config.clone(),
        runs,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(out_dir.join("manifest.json"), text)?;
    Ok(manifest)
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitionRecord {
    pub j: usize,
    pub k: usize,
    pub delta: f64,
    pub weight: f64,
    pub class: TransitionClass,
}

#[derive(Clone, Debug, Serialize)]
pub struct Doublet {
    pub lower: usize,
    pub upper: usize,
    pub splitting: f64,
    /// Shared bare-state weight of the two eigenvectors, 1 for an equal superposition.
    pub hybridization: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub model: &'static str,
    pub dim: usize,
    pub energies: Vec<f64>,
    pub transitions: Vec<(String, Vec<TransitionRecord>)>,
    pub doublet: Option<Doublet>,
}

/// Shared weight `sum_b min(|<b|j>|^2, |<b|k>|^2)` of two eigenvectors, with `b` running over
/// the columns of `reference` (the bare basis when `None`).
pub fn hybridization(eig: &EigenSystem, reference: Option<&Operator>, j: usize, k: usize) -> f64 {
    let v = match reference {
        Some(r) => crate::linalg::matmul_op(r, crate::linalg::Op::H, &eig.vectors, crate::linalg::Op::N),
        None => eig.vectors.clone(),
    };
    (0..v.nrows()).map(|b| v[[b, j]].norm_sqr().min(v[[b, k]].norm_sqr())).sum::<f64>()
}

/// Most strongly hybridized pair of excited levels among the lowest `levels`.
pub fn find_doublet(eig: &EigenSystem, reference: Option<&Operator>, levels: usize) -> Option<Doublet> {
    let n = eig.dim().min(levels);
    let mut best: Option<Doublet> = None;
    for j in 1..n {
        for k in j + 1..n {
            let h = hybridization(eig, reference, j, k);
            if h > 0.2 && best.as_ref().map_or(true, |b| h > b.hybridization) {
                best = Some(Doublet {
                    lower: j,
                    upper: k,
                    splitting: eig.energies[k] - eig.energies[j],
                    hybridization: h,
                });
            }
        }
    }
    best
}

pub fn spectrum(config: &ScenarioConfig) -> Result<SpectrumReport> {
    let model = config.model.resolve()?;
    let system = build_system(config, model, None)?;
    let transitions = system
        .channels
        .iter()
        .map(|c| {
            let recs = c
                .table
                .transitions
                .iter()
                .map(|t| TransitionRecord { j: t.j, k: t.k, delta: t.delta, weight: t.element.norm_sqr(), class: t.class })
                .collect();
            (c.port.name().to_string(), recs)
        })
        .collect();
    // optomechanical doublets are mixtures of displaced-oscillator states
    let reference = match system.model {
        Model::Optomech(p) if p.include_dce => Some(system.photon_conserving()?.eig.vectors),
        _ => None,
    };
    Ok(SpectrumReport {
        model: system.model.kind(),
        dim: system.dim(),
        energies: system.eig.energies.to_vec(),
        transitions,
        doublet: find_doublet(&system.eig, reference.as_ref(), 12),
    })
}
