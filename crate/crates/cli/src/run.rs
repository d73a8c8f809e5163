//! Command execution.

use std::path::Path;

use serde::Serialize;
use steerctl_core::compat::{c_functional, is_jointly_measurable, robustness};
use steerctl_core::control::{landscape, naive_optimize, optimize, time_sweep, uncontrolled_sweep};
use steerctl_core::{steering_gradient, OptimizeConfig64, OptimizeResult64, PulseSequence64, TransferMatrix64};

use crate::config::{Command, RunConfig, SweepMode};
use crate::error::CliError;
use crate::output::{write_csv, write_json};

/// What a successful run reports on standard output.
pub struct Outcome {
    pub headline: String,
}

pub fn execute(cmd: Command, cfg: &RunConfig, seed: Option<u64>, out: &Path) -> Result<Outcome, CliError> {
    if let Some(declared) = cfg.command {
        if declared != cmd {
            return Err(CliError::Config(format!("config is for `{declared}` but `{cmd}` was requested")));
        }
    }
    match cmd {
        Command::Check => check(cfg, out),
        Command::Robustness => robustness_cmd(cfg, out),
        Command::Evolve => evolve(cfg, out),
        Command::Optimize | Command::Naive => optimize_cmd(cmd, cfg, seed, out),
        Command::Landscape => landscape_cmd(cfg, out),
        Command::Sweep => sweep(cfg, seed, out),
    }
}

#[derive(Serialize)]
struct CheckSummary {
    command: &'static str,
    measurements: [[f64; 4]; 2],
    bias: f64,
    c_value: f64,
    compatible: bool,
    robustness: f64,
}

fn check(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let (x1, x2) = cfg.scenario.effects()?;
    let b = cfg.scenario.bias;
    let compatible = is_jointly_measurable(x1, x2)?;
    let summary = CheckSummary {
        command: "check",
        measurements: [x1.to_array(), x2.to_array()],
        bias: b,
        c_value: c_functional(x1, x2)?,
        compatible,
        robustness: robustness(x1, x2, b)?,
    };
    let path = write_json(out, &summary)?;
    let verdict = if compatible { "compatible" } else { "incompatible" };
    Ok(Outcome {
        headline: format!(
            "{verdict}: robustness I_b = {} (C = {}) -> {}",
            summary.robustness,
            summary.c_value,
            path.display()
        ),
    })
}

#[derive(Serialize)]
struct RobustnessSummary {
    command: &'static str,
    dt: f64,
    amplitudes: Vec<f64>,
    robustness: f64,
    /// `None` where the monotone is not differentiable.
    gradient: Option<Vec<f64>>,
    steerable: bool,
}

fn robustness_cmd(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let s = cfg.scenario.build(Command::Robustness)?;
    let p = cfg.pulses(Command::Robustness)?;
    let value = steerctl_core::steering_robustness(&s, &p)?;
    let gradient = match steering_gradient(&s, &p) {
        Ok(g) => Some(g.gradient),
        Err(steerctl_core::Error::NotDifferentiable(_)) | Err(steerctl_core::Error::DegenerateRoot(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let summary = RobustnessSummary {
        command: "robustness",
        dt: p.dt(),
        amplitudes: p.amplitudes().to_vec(),
        robustness: value,
        gradient,
        steerable: value > 0.0,
    };
    let path = write_json(out, &summary)?;
    Ok(Outcome { headline: format!("steering robustness = {value} -> {}", path.display()) })
}

/// Robustness after each slot boundary `t = k dt`, `k = 0..=m`.
fn evolve(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let s = cfg.scenario.build(Command::Evolve)?;
    let p = cfg.pulses(Command::Evolve)?;
    let mut rows = vec![vec![Some(0.0), Some(s.robustness_after(&TransferMatrix64::identity())?)]];
    for k in 1..=p.len() {
        let prefix = PulseSequence64::new(p.dt(), p.amplitudes()[..k].to_vec())?;
        let t = p.dt() * k as f64;
        rows.push(vec![Some(t), Some(steerctl_core::steering_robustness(&s, &prefix)?)]);
    }
    let path = write_csv(out, &["t", "robustness"], &rows)?;
    let last = rows.last().and_then(|r| r[1]).unwrap_or(0.0);
    Ok(Outcome {
        headline: format!("robustness at t = {}: {last} ({} rows) -> {}", p.total_time(), rows.len(), path.display()),
    })
}

#[derive(Serialize)]
struct OptimizeSummary {
    command: String,
    seed: u64,
    m: usize,
    total_time: f64,
    amp_bounds: [f64; 2],
    n_starts: usize,
    include_zero_start: bool,
    best_value: f64,
    best_objective: f64,
    baseline_value: f64,
    best_start: usize,
    best_pulse: PulseSummary,
    start_values: Vec<f64>,
    iterations_per_start: Vec<usize>,
}

#[derive(Serialize)]
struct PulseSummary {
    dt: f64,
    amplitudes: Vec<f64>,
}

fn optimize_summary(cmd: Command, c: &OptimizeConfig64, r: OptimizeResult64) -> OptimizeSummary {
    OptimizeSummary {
        command: cmd.to_string(),
        seed: c.seed,
        m: c.m,
        total_time: c.total_time,
        amp_bounds: [c.amp_bounds.0, c.amp_bounds.1],
        n_starts: c.n_starts,
        include_zero_start: c.include_zero_start,
        best_value: r.best_value,
        best_objective: r.best_objective,
        baseline_value: r.baseline_value,
        best_start: r.best_start,
        best_pulse: PulseSummary { dt: r.best_pulse.dt(), amplitudes: r.best_pulse.amplitudes().to_vec() },
        start_values: r.start_values,
        iterations_per_start: r.iterations_per_start,
    }
}

fn optimize_cmd(cmd: Command, cfg: &RunConfig, seed: Option<u64>, out: &Path) -> Result<Outcome, CliError> {
    let s = cfg.scenario.build(cmd)?;
    let c = cfg.optimize_config(seed)?;
    let r = if cmd == Command::Optimize { optimize(&s, &c)? } else { naive_optimize(&s, &c)? };
    let summary = optimize_summary(cmd, &c, r);
    let path = write_json(out, &summary)?;
    Ok(Outcome {
        headline: format!(
            "{cmd}: best robustness {} (zero pulse {}, start {}) -> {}",
            summary.best_value,
            summary.baseline_value,
            summary.best_start,
            path.display()
        ),
    })
}

fn landscape_cmd(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let s = cfg.scenario.build(Command::Landscape)?;
    let (l, c1, c2) = cfg.landscape_axes(Command::Landscape)?;
    let grid = landscape(&s, l.t_drift, l.total_time, &c1, &c2)?;
    let mut rows = Vec::with_capacity(c1.len() * c2.len());
    for (i, &a) in c1.iter().enumerate() {
        for (j, &b) in c2.iter().enumerate() {
            rows.push(vec![Some(a), Some(b), Some(grid.values[i][j])]);
        }
    }
    let path = write_csv(out, &["c1", "c2", "robustness"], &rows)?;
    let (a, b, v) = grid.argmax();
    Ok(Outcome {
        headline: format!(
            "landscape max robustness {v} at (c1, c2) = ({a}, {b}) over {} cells -> {}",
            rows.len(),
            path.display()
        ),
    })
}

fn sweep(cfg: &RunConfig, seed: Option<u64>, out: &Path) -> Result<Outcome, CliError> {
    let s = cfg.scenario.build(Command::Sweep)?;
    let sw = cfg.sweep(Command::Sweep)?;
    let table = match sw.mode {
        SweepMode::Full => time_sweep(&s, &cfg.optimize_config(seed)?, &sw.times)?,
        SweepMode::UncontrolledOnly => uncontrolled_sweep(&s, &sw.times)?,
    };
    let rows: Vec<Vec<Option<f64>>> =
        table.iter().map(|r| vec![Some(r.total_time), Some(r.uncontrolled), r.naive, r.optimized]).collect();
    let path = write_csv(out, &["T", "uncontrolled", "naive", "optimized"], &rows)?;
    let last = table.last().expect("sweep times are non-empty");
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
    Ok(Outcome {
        headline: format!(
            "sweep of {} times; at T = {}: uncontrolled {}, naive {}, optimized {} -> {}",
            table.len(),
            last.total_time,
            last.uncontrolled,
            fmt(last.naive),
            fmt(last.optimized),
            path.display()
        ),
    })
}
