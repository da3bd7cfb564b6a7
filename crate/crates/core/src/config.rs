//! JSON scenario configuration and preset operating points.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baths::{BathSpec, FilterSpec};
use crate::error::{Error, Result};
use crate::models::{flux_qubit_frequency, FluxQubitParams, OptomechParams, RabiParams};
use crate::scenario::{self, Method, Model, Port};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    RabiTempSweep,
    RabiCompare,
    Dce,
    HuFailure,
    Custom,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 5] = [
        ScenarioName::RabiTempSweep,
        ScenarioName::RabiCompare,
        ScenarioName::Dce,
        ScenarioName::HuFailure,
        ScenarioName::Custom,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioName::RabiTempSweep => "rabi-temp-sweep",
            ScenarioName::RabiCompare => "rabi-compare",
            ScenarioName::Dce => "dce",
            ScenarioName::HuFailure => "hu-failure",
            ScenarioName::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelConfig {
    Rabi { omega_c: f64, omega_q: f64, g: f64, theta: f64, n_max: usize },
    /// Qubit given by gap and persistent-current energy instead of `omega_q` and `theta`.
    Flux { omega_c: f64, g: f64, gap: f64, persistent_energy: f64, n_max: usize },
    Optomech { omega_c: f64, omega_m: f64, g: f64, n_c: usize, n_m: usize, include_dce: bool },
}

impl ModelConfig {
    pub fn resolve(&self) -> Result<Model> {
        let m = match *self {
            ModelConfig::Rabi { omega_c, omega_q, g, theta, n_max } => {
                Model::Rabi(RabiParams { omega_c, omega_q, g, theta, n_max })
            }
            ModelConfig::Flux { omega_c, g, gap, persistent_energy, n_max } => {
                let (omega_q, theta) = flux_qubit_frequency(&FluxQubitParams { gap, persistent_energy })?;
                Model::Rabi(RabiParams { omega_c, omega_q, g, theta, n_max })
            }
            ModelConfig::Optomech { omega_c, omega_m, g, n_c, n_m, include_dce } => {
                Model::Optomech(OptomechParams { omega_c, omega_m, g, n_c, n_m, include_dce })
            }
        };
        match &m {
            Model::Rabi(p) => p.validate()?,
            Model::Optomech(p) => p.validate()?,
        }
        Ok(m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub port: Port,
    pub gamma: f64,
    pub ref_freq: f64,
    #[serde(default)]
    pub temperature: f64,
}

impl BathConfig {
    pub fn spec(&self) -> BathSpec {
        BathSpec { gamma: self.gamma, ref_freq: self.ref_freq, temperature: self.temperature }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum FilterConfig {
    #[default]
    Unbounded,
    Bandwidth { lambda: f64 },
}

impl FilterConfig {
    pub fn resolve(&self) -> Result<FilterSpec> {
        match *self {
            FilterConfig::Unbounded => Ok(FilterSpec::Unbounded),
            FilterConfig::Bandwidth { lambda } => FilterSpec::bandwidth(lambda),
        }
    }
}

/// Drive settings; unset pulse fields are derived from the spectrum (Rabi model only).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriveConfig {
    GaussianPulse {
        port: Port,
        amplitude: f64,
        #[serde(default)]
        carrier: Option<f64>,
        #[serde(default)]
        t0: Option<f64>,
        #[serde(default)]
        width: Option<f64>,
    },
    Continuous { port: Port, amplitude: f64, carrier: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialState {
    /// Lowest eigenstate of the Hamiltonian the solver relaxes towards.
    #[default]
    Ground,
    /// Thermal state of the full Hamiltonian at the run temperature.
    Gibbs,
}

fn default_true() -> bool {
    true
}

fn default_rtol() -> f64 {
    1e-8
}

fn default_atol() -> f64 {
    1e-10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub methods: Vec<Method>,
    #[serde(default = "default_true")]
    pub dephasing: bool,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_end: f64,
    pub n_samples: usize,
}

impl GridConfig {
    pub fn times(&self) -> Vec<f64> {
        let n = self.n_samples;
        (0..n).map(|i| self.t_end * i as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioName,
    pub model: ModelConfig,
    pub baths: Vec<BathConfig>,
    #[serde(default)]
    pub filter: FilterConfig,
    #[serde(default)]
    pub drive: Option<DriveConfig>,
    pub solver: SolverConfig,
    pub grid: GridConfig,
    /// Sweep values applied to every bath; empty means use the bath temperatures as given.
    #[serde(default)]
    pub temperatures: Vec<f64>,
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Repeat each run with every truncation raised by two levels and report the deviation.
    #[serde(default)]
    pub convergence_check: bool,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Every problem found, one message per offending field.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let model = match self.model.resolve() {
            Ok(m) => Some(m),
            Err(e) => {
                out.push(format!("model: {e}"));
                None
            }
        };
        if self.baths.is_empty() {
            out.push("baths: at least one reservoir is required".into());
        }
        for (i, b) in self.baths.iter().enumerate() {
            if let Err(e) = b.spec().validate() {
                out.push(format!("baths[{i}]: {e}"));
            }
            if let Some(m) = &model {
                if let Err(e) = m.port(b.port) {
                    out.push(format!("baths[{i}].port: {e}"));
                }
            }
            if self.baths[..i].iter().any(|o| o.port == b.port) {
                out.push(format!("baths[{i}].port: duplicate reservoir on {}", b.port.name()));
            }
        }
        if let Err(e) = self.filter.resolve() {
            out.push(format!("filter: {e}"));
        }
        if self.solver.methods.is_empty() {
            out.push("solver.methods: at least one method is required".into());
        }
        for m in &self.solver.methods {
            if *m == Method::Hu && !matches!(self.model, ModelConfig::Optomech { .. }) {
                out.push("solver.methods: hu requires the optomech model".into());
            }
        }
        if !(self.solver.rtol > 0.0 && self.solver.rtol < 1.0) {
            out.push(format!("solver.rtol: must lie in (0, 1), got {}", self.solver.rtol));
        }
        if !(self.solver.atol > 0.0) {
            out.push(format!("solver.atol: must be positive, got {}", self.solver.atol));
        }
        if !(self.grid.t_end > 0.0 && self.grid.t_end.is_finite()) {
            out.push(format!("grid.t_end: must be positive, got {}", self.grid.t_end));
        }
        if self.grid.n_samples < 2 {
            out.push(format!("grid.n_samples: must be at least 2, got {}", self.grid.n_samples));
        }
        for (i, t) in self.temperatures.iter().enumerate() {
            if !(*t >= 0.0 && t.is_finite()) {
                out.push(format!("temperatures[{i}]: must be non-negative, got {t}"));
            }
        }
        if let Some(d) = &self.drive {
            let (port, amplitude) = match *d {
                DriveConfig::GaussianPulse { port, amplitude, carrier, width, .. } => {
                    let derived = carrier.is_none() || width.is_none();
                    if derived && !matches!(model, Some(Model::Rabi(_))) {
                        out.push("drive: carrier and width can only be derived for the rabi model".into());
                    }
                    if let Some(w) = width {
                        if !(w > 0.0) {
                            out.push(format!("drive.width: must be positive, got {w}"));
                        }
                    }
                    (port, amplitude)
                }
                DriveConfig::Continuous { port, amplitude, .. } => (port, amplitude),
            };
            if !(amplitude >= 0.0) {
                out.push(format!("drive.amplitude: must be non-negative, got {amplitude}"));
            }
            if let Some(m) = &model {
                if let Err(e) = m.port(port) {
                    out.push(format!("drive.port: {e}"));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(p.join("; ")))
        }
    }

    /// Temperatures to run; the bath temperatures themselves when no sweep is given.
    pub fn sweep(&self) -> Vec<Option<f64>> {
        if self.temperatures.is_empty() {
            vec![None]
        } else {
            self.temperatures.iter().map(|t| Some(*t)).collect()
        }
    }

    pub fn preset(name: ScenarioName) -> Result<Self> {
        match name {
            ScenarioName::RabiTempSweep => Ok(rabi_preset(name, vec![0.0, 0.25, 0.5, 0.75], vec![Method::Gme])),
            ScenarioName::RabiCompare => Ok(rabi_preset(name, vec![0.75], vec![Method::Gme, Method::Dressed])),
            ScenarioName::Dce => Ok(dce_preset()),
            ScenarioName::HuFailure => Ok(hu_preset()),
            ScenarioName::Custom => Err(Error::Config("the custom scenario needs --config".into())),
        }
    }
}

fn rabi_preset(name: ScenarioName, temperatures: Vec<f64>, methods: Vec<Method>) -> ScenarioConfig {
    let p = scenario::circuit_qed_params(scenario::CIRCUIT_QED_N_MAX);
    let baths = scenario::circuit_qed_baths(0.0)
        .into_iter()
        .map(|(port, b)| BathConfig { port, gamma: b.gamma, ref_freq: b.ref_freq, temperature: 0.0 })
        .collect();
    ScenarioConfig {
        scenario: name,
        model: ModelConfig::Rabi { omega_c: p.omega_c, omega_q: p.omega_q, g: p.g, theta: p.theta, n_max: p.n_max },
        baths,
        filter: FilterConfig::Unbounded,
        drive: Some(DriveConfig::GaussianPulse {
            port: Port::Qubit,
            amplitude: std::f64::consts::PI / 30.0,
            carrier: None,
            t0: None,
            width: None,
        }),
        solver: SolverConfig { methods, dephasing: false, rtol: default_rtol(), atol: default_atol() },
        grid: GridConfig { t_end: 8000.0, n_samples: 4001 },
        temperatures,
        initial: InitialState::Gibbs,
        output: None,
        convergence_check: false,
    }
}

fn dce_model(include_dce: bool) -> ModelConfig {
    let p = scenario::dce_params(scenario::DCE_N, scenario::DCE_N, include_dce);
    ModelConfig::Optomech { omega_c: p.omega_c, omega_m: p.omega_m, g: p.g, n_c: p.n_c, n_m: p.n_m, include_dce }
}

fn dce_bath_configs() -> Vec<BathConfig> {
    scenario::dce_baths(0.0)
        .into_iter()
        .map(|(port, b)| BathConfig { port, gamma: b.gamma, ref_freq: b.ref_freq, temperature: 0.0 })
        .collect()
}

fn dce_preset() -> ScenarioConfig {
    ScenarioConfig {
        scenario: ScenarioName::Dce,
        model: dce_model(true),
        baths: dce_bath_configs(),
        filter: FilterConfig::Bandwidth { lambda: 10.0 * scenario::DCE_GAMMA },
        drive: Some(DriveConfig::Continuous { port: Port::Mechanics, amplitude: 0.5 * scenario::DCE_GAMMA, carrier: 1.0 }),
        solver: SolverConfig { methods: vec![Method::Gme], dephasing: true, rtol: default_rtol(), atol: default_atol() },
        grid: GridConfig { t_end: 500.0, n_samples: 1001 },
        temperatures: vec![0.0, 0.5],
        initial: InitialState::Gibbs,
        output: None,
        convergence_check: false,
    }
}

fn hu_preset() -> ScenarioConfig {
    ScenarioConfig {
        scenario: ScenarioName::HuFailure,
        model: dce_model(true),
        baths: dce_bath_configs(),
        filter: FilterConfig::Bandwidth { lambda: 10.0 * scenario::DCE_GAMMA },
        drive: None,
        solver: SolverConfig {
            methods: vec![Method::Hu, Method::Gme],
            dephasing: true,
            rtol: default_rtol(),
            atol: default_atol(),
        },
        grid: GridConfig { t_end: 10.0 / scenario::DCE_GAMMA, n_samples: 401 },
        temperatures: vec![0.0],
        initial: InitialState::Ground,
        output: None,
        convergence_check: false,
    }
}
