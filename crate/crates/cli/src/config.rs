//! Run configuration: JSON layout, validation and conversion to library types.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use steerctl_core::control::axis;
use steerctl_core::{
    BipartiteState64, ControlHamiltonian64, DriftGenerator64, FourVector64, OptimizeConfig64, PulseSequence64,
    SteeringScenario64, TransferMatrix64,
};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Check,
    Robustness,
    Evolve,
    Optimize,
    Naive,
    Landscape,
    Sweep,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Command::Check => "check",
            Command::Robustness => "robustness",
            Command::Evolve => "evolve",
            Command::Optimize => "optimize",
            Command::Naive => "naive",
            Command::Landscape => "landscape",
            Command::Sweep => "sweep",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must equal the command given on the command line when present.
    pub command: Option<Command>,
    #[serde(default)]
    pub scenario: ScenarioConfig,
    pub pulses: Option<PulsesConfig>,
    pub optimize: Option<OptimizeSection>,
    pub landscape: Option<LandscapeConfig>,
    pub sweep: Option<SweepConfig>,
    /// Output path prefix; `.csv` / `.json` is appended.
    pub output: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub state: StateConfig,
    /// Alice's two measurements; defaults to sharp σx and σz.
    pub measurements: Option<[MeasurementConfig; 2]>,
    pub drift: Option<DriftConfig>,
    /// Control Hamiltonian `h` in `H = h·σ`; defaults to `σy + σz`.
    pub control: Option<[f64; 3]>,
    #[serde(default)]
    pub bias: f64,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    #[default]
    MaxEntangled,
    Werner(f64),
    Explicit(Box<ExplicitState>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitState {
    pub re: [[f64; 4]; 4],
    #[serde(default)]
    pub im: [[f64; 4]; 4],
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasurementConfig {
    /// Effect 4-vector `(x0, x1, x2, x3)`, `A = (x0 Id + x·σ)/2`.
    Effect([f64; 4]),
    /// Projector onto the `+1` eigenspace of `n·σ`; `n` is normalized.
    Axis([f64; 3]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftKindConfig {
    AmplitudeDamping,
    Dephasing,
    Custom,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftConfig {
    pub kind: DriftKindConfig,
    #[serde(default)]
    pub gamma: f64,
    /// Heisenberg Pauli-basis generator, required for `custom`.
    pub matrix: Option<[[f64; 4]; 4]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulsesConfig {
    pub dt: f64,
    pub amplitudes: Vec<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    pub m: Option<usize>,
    pub total_time: Option<f64>,
    pub amp_bounds: Option<[f64; 2]>,
    pub n_starts: Option<usize>,
    pub seed: Option<u64>,
    pub max_iters: Option<usize>,
    pub grad_tol: Option<f64>,
    pub include_zero_start: Option<bool>,
    pub flat_restarts: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandscapeConfig {
    pub t_drift: f64,
    pub total_time: f64,
    pub c1: AxisConfig,
    pub c2: AxisConfig,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    #[default]
    Full,
    UncontrolledOnly,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub times: Vec<f64>,
    #[serde(default)]
    pub mode: SweepMode,
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be finite")))
    }
}

fn required<'a, T>(v: &'a Option<T>, what: &str, cmd: Command) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::Config(format!("`{cmd}` needs a `{what}` block")))
}

impl MeasurementConfig {
    pub fn effect(&self) -> Result<FourVector64, CliError> {
        match self {
            MeasurementConfig::Effect(x) => Ok(FourVector64::from_array(*x)),
            MeasurementConfig::Axis(n) => {
                let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
                if !(norm > 0.0 && norm.is_finite()) {
                    return Err(CliError::Config("measurement axis must be a nonzero vector".into()));
                }
                Ok(FourVector64::from_bloch(1.0, [n[0] / norm, n[1] / norm, n[2] / norm]))
            }
        }
    }
}

impl ScenarioConfig {
    pub fn effects(&self) -> Result<(FourVector64, FourVector64), CliError> {
        match &self.measurements {
            Some([a, b]) => Ok((a.effect()?, b.effect()?)),
            None => Ok((FourVector64::sharp_x(), FourVector64::sharp_z())),
        }
    }

    pub fn state(&self) -> Result<BipartiteState64, CliError> {
        Ok(match &self.state {
            StateConfig::MaxEntangled => BipartiteState64::max_entangled(),
            StateConfig::Werner(v) => BipartiteState64::werner(finite("werner", *v)?)?,
            StateConfig::Explicit(e) => {
                let rho = std::array::from_fn(|i| std::array::from_fn(|j| Complex64::new(e.re[i][j], e.im[i][j])));
                BipartiteState64::new(rho)?
            }
        })
    }

    pub fn drift(&self, cmd: Command) -> Result<DriftGenerator64, CliError> {
        let d = required(&self.drift, "scenario.drift", cmd)?;
        let gamma = finite("gamma", d.gamma)?;
        Ok(match d.kind {
            DriftKindConfig::AmplitudeDamping => DriftGenerator64::amplitude_damping(gamma)?,
            DriftKindConfig::Dephasing => DriftGenerator64::dephasing(gamma)?,
            DriftKindConfig::Custom => {
                let m = d
                    .matrix
                    .ok_or_else(|| CliError::Config("custom drift needs `matrix` (4x4 Heisenberg generator)".into()))?;
                DriftGenerator64::custom(TransferMatrix64::from_rows(m))?
            }
        })
    }

    pub fn control(&self) -> Result<ControlHamiltonian64, CliError> {
        match self.control {
            Some(h) => Ok(ControlHamiltonian64::new(h)?),
            None => Ok(ControlHamiltonian64::sigma_y_plus_z()),
        }
    }

    pub fn build(&self, cmd: Command) -> Result<SteeringScenario64, CliError> {
        let (x1, x2) = self.effects()?;
        Ok(SteeringScenario64::new(
            self.state()?,
            x1,
            x2,
            self.drift(cmd)?,
            self.control()?,
            finite("bias", self.bias)?,
        )?)
    }
}

impl RunConfig {
    pub fn pulses(&self, cmd: Command) -> Result<PulseSequence64, CliError> {
        let p = required(&self.pulses, "pulses", cmd)?;
        Ok(PulseSequence64::new(p.dt, p.amplitudes.clone())?)
    }

    /// Optimizer settings with defaults filled in; `seed` overrides the
    /// configured seed.
    pub fn optimize_config(&self, seed: Option<u64>) -> Result<OptimizeConfig64, CliError> {
        let o = self.optimize.clone().unwrap_or_default();
        let d = OptimizeConfig64::default();
        let cfg = OptimizeConfig64 {
            m: o.m.unwrap_or(d.m),
            total_time: o.total_time.unwrap_or(d.total_time),
            amp_bounds: o.amp_bounds.map(|[a, b]| (a, b)).unwrap_or(d.amp_bounds),
            n_starts: o.n_starts.unwrap_or(d.n_starts),
            seed: seed.or(o.seed).unwrap_or(d.seed),
            max_iters: o.max_iters.unwrap_or(d.max_iters),
            grad_tol: o.grad_tol.unwrap_or(d.grad_tol),
            include_zero_start: o.include_zero_start.unwrap_or(d.include_zero_start),
            flat_restarts: o.flat_restarts.unwrap_or(d.flat_restarts),
            parallel: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn landscape_axes(&self, cmd: Command) -> Result<(&LandscapeConfig, Vec<f64>, Vec<f64>), CliError> {
        let l = required(&self.landscape, "landscape", cmd)?;
        let c1 = axis(l.c1.min, l.c1.max, l.c1.step)?;
        let c2 = axis(l.c2.min, l.c2.max, l.c2.step)?;
        Ok((l, c1, c2))
    }

    pub fn sweep(&self, cmd: Command) -> Result<&SweepConfig, CliError> {
        let s = required(&self.sweep, "sweep", cmd)?;
        if s.times.is_empty() {
            return Err(CliError::Config("sweep.times must not be empty".into()));
        }
        for &t in &s.times {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(CliError::Config(format!("sweep time {t} must be finite and >= 0")));
            }
        }
        Ok(s)
    }
}
