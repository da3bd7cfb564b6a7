//! Model plus reservoirs: dressed tables, dissipators and preset operating points.

use serde::{Deserialize, Serialize};

use crate::baths::{BathSpec, FilterSpec};
use crate::dissipators::{dressed_secular_lindblad, gme_liouvillian, hu_style_optomech, standard_lindblad, GmeMode};
use crate::dressed::{build_transition_table, default_zero_tol, DressedLadder, TransitionTable};
use crate::error::{Error, Result};
use crate::linalg::{eigh, EigenSystem, Operator};
use crate::models::{
    optomech_hamiltonian, rabi_hamiltonian, Drive, DriveKind, OptomechOperators, OptomechParams, RabiOperators,
    RabiParams,
};
use crate::superop::Superoperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Standard,
    Dressed,
    Gme,
    GmeFull,
    Hu,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Standard => "standard",
            Method::Dressed => "dressed",
            Method::Gme => "gme",
            Method::GmeFull => "gme-full",
            Method::Hu => "hu",
        }
    }
}

/// Which subsystem operator a reservoir couples to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Port {
    Qubit,
    Cavity,
    Mechanics,
}

impl Port {
    pub fn name(&self) -> &'static str {
        match self {
            Port::Qubit => "qubit",
            Port::Cavity => "cavity",
            Port::Mechanics => "mechanics",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Model {
    Rabi(RabiParams),
    Optomech(OptomechParams),
}

impl Model {
    pub fn hamiltonian(&self) -> Result<Operator> {
        match self {
            Model::Rabi(p) => rabi_hamiltonian(p),
            Model::Optomech(p) => optomech_hamiltonian(p),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Model::Rabi(p) => p.dim(),
            Model::Optomech(p) => p.dim(),
        }
    }

    /// Lowering operator `s` of a port, and the bare frequency it rotates at.
    pub fn port(&self, port: Port) -> Result<(Operator, f64)> {
        match (self, port) {
            (Model::Rabi(p), Port::Qubit) => Ok((RabiOperators::new(p.n_max).sigma_minus, p.omega_q)),
            (Model::Rabi(p), Port::Cavity) => Ok((RabiOperators::new(p.n_max).a, p.omega_c)),
            (Model::Optomech(p), Port::Cavity) => Ok((OptomechOperators::new(p.n_c, p.n_m).a, p.omega_c)),
            (Model::Optomech(p), Port::Mechanics) => Ok((OptomechOperators::new(p.n_c, p.n_m).b, p.omega_m)),
            (m, port) => Err(Error::InvalidParameter(format!("model {} has no {} port", m.kind(), port.name()))),
        }
    }

    /// Operator a drive on `port` couples to: `sigma_x` for the qubit, the lowering operator otherwise.
    pub fn drive_operator(&self, port: Port) -> Result<Operator> {
        match (self, port) {
            (Model::Rabi(p), Port::Qubit) => Ok(RabiOperators::new(p.n_max).sigma_x),
            _ => Ok(self.port(port)?.0),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::Rabi(_) => "rabi",
            Model::Optomech(_) => "optomech",
        }
    }

    /// Same model with every truncation raised by `extra` levels.
    pub fn enlarged(&self, extra: usize) -> Model {
        match self {
            Model::Rabi(p) => Model::Rabi(RabiParams { n_max: p.n_max + extra, ..*p }),
            Model::Optomech(p) => Model::Optomech(OptomechParams { n_c: p.n_c + extra, n_m: p.n_m + extra, ..*p }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Channel {
    pub port: Port,
    pub op: Operator,
    pub bare_freq: f64,
    pub bath: BathSpec,
    pub table: TransitionTable,
}

/// A model diagonalized together with its reservoir couplings.
#[derive(Clone, Debug)]
pub struct OpenSystem {
    pub model: Model,
    pub h: Operator,
    pub eig: EigenSystem,
    pub channels: Vec<Channel>,
}

impl OpenSystem {
    pub fn new(model: Model, baths: &[(Port, BathSpec)]) -> Result<Self> {
        let h = model.hamiltonian()?;
        let eig = eigh(&h)?;
        let zero_tol = default_zero_tol(&eig);
        let mut channels = Vec::new();
        for (port, bath) in baths {
            bath.validate()?;
            let (op, bare_freq) = model.port(*port)?;
            let table = build_transition_table(&op, &eig, zero_tol)?;
            channels.push(Channel { port: *port, op, bare_freq, bath: *bath, table });
        }
        Ok(OpenSystem { model, h, eig, channels })
    }

    pub fn with_temperature(&self, temperature: f64) -> Self {
        let mut s = self.clone();
        for c in &mut s.channels {
            c.bath.temperature = temperature;
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    fn tables(&self) -> Vec<(&TransitionTable, &BathSpec)> {
        self.channels.iter().map(|c| (&c.table, &c.bath)).collect()
    }

    pub fn ladder(&self, port: Port) -> Result<DressedLadder> {
        let c = self
            .channels
            .iter()
            .find(|c| c.port == port)
            .ok_or_else(|| Error::InvalidParameter(format!("no reservoir on port {}", port.name())))?;
        DressedLadder::new(&c.table, &self.eig)
    }

    /// Dressed ladder of a port's operator, whether or not a reservoir is attached.
    pub fn ladder_of(&self, port: Port) -> Result<DressedLadder> {
        let (op, _) = self.model.port(port)?;
        let table = build_transition_table(&op, &self.eig, default_zero_tol(&self.eig))?;
        DressedLadder::new(&table, &self.eig)
    }

    pub fn dissipator(&self, method: Method, filter: FilterSpec, dephasing: bool) -> Result<Superoperator> {
        match method {
            Method::Standard => {
                let ops: Vec<(Operator, BathSpec, f64)> =
                    self.channels.iter().map(|c| (c.op.clone(), c.bath, c.bare_freq)).collect();
                standard_lindblad(&ops)
            }
            Method::Dressed => dressed_secular_lindblad(&self.tables(), &self.eig),
            Method::Gme => gme_liouvillian(&self.tables(), &self.eig, filter, dephasing, GmeMode::Reduced),
            Method::GmeFull => gme_liouvillian(&self.tables(), &self.eig, filter, dephasing, GmeMode::Full),
            Method::Hu => {
                let om = self.photon_conserving()?;
                hu_style_optomech(&om.eig, &om.tables())
            }
        }
    }

    /// The optomechanical system without the pair-creation term.
    pub fn photon_conserving(&self) -> Result<OpenSystem> {
        let Model::Optomech(p) = &self.model else {
            return Err(Error::InvalidParameter("photon-conserving basis only exists for the optomechanical model".into()));
        };
        let baths: Vec<(Port, BathSpec)> = self.channels.iter().map(|c| (c.port, c.bath)).collect();
        OpenSystem::new(Model::Optomech(OptomechParams { include_dce: false, ..*p }), &baths)
    }
}

/// Circuit-QED operating point: `omega_c = 1`, `g = 0.157`, `omega_q = 7.97/4`, `cos(theta) = 2.25/7.97`.
pub fn circuit_qed_params(n_max: usize) -> RabiParams {
    RabiParams { omega_c: 1.0, omega_q: 7.97 / 4.0, g: 0.157, theta: (2.25f64 / 7.97).acos(), n_max }
}

pub const CIRCUIT_QED_GAMMA: f64 = 3.75e-4;
pub const CIRCUIT_QED_N_MAX: usize = 14;

pub fn circuit_qed_baths(temperature: f64) -> Vec<(Port, BathSpec)> {
    let p = circuit_qed_params(2);
    vec![
        (Port::Qubit, BathSpec { gamma: CIRCUIT_QED_GAMMA, ref_freq: p.omega_q, temperature }),
        (Port::Cavity, BathSpec { gamma: CIRCUIT_QED_GAMMA, ref_freq: p.omega_c, temperature }),
    ]
}

/// Gaussian pulse on `sigma_x` centred between the two levels of the lowest anticrossing doublet
/// above the first excited state (`E_2`, `E_3`).
#[derive(Clone, Copy, Debug)]
pub struct PulsePlan {
    pub splitting: f64,
    pub carrier: f64,
    pub width: f64,
    pub t0: f64,
    pub amplitude: f64,
}

pub fn circuit_qed_pulse(eig: &EigenSystem) -> PulsePlan {
    let e = &eig.energies;
    let splitting = e[3] - e[2];
    let carrier = 0.5 * ((e[3] - e[0]) + (e[2] - e[0]));
    let width = 2.0 * std::f64::consts::PI * 3.0 / (splitting * 10.0);
    PulsePlan { splitting, carrier, width, t0: 6.0 * width, amplitude: std::f64::consts::PI / 30.0 }
}

impl PulsePlan {
    pub fn kind(&self) -> DriveKind {
        DriveKind::GaussianPulse { amplitude: self.amplitude, carrier: self.carrier, t0: self.t0, width: self.width }
    }
}

/// Optomechanical operating point: `omega_m = 1`, `omega_c = 1.016`, `g = 0.1`.
pub fn dce_params(n_c: usize, n_m: usize, include_dce: bool) -> OptomechParams {
    OptomechParams { omega_c: 1.016, omega_m: 1.0, g: 0.1, n_c, n_m, include_dce }
}

pub const DCE_GAMMA: f64 = 0.05;
pub const DCE_N: usize = 7;

pub fn dce_baths(temperature: f64) -> Vec<(Port, BathSpec)> {
    vec![
        (Port::Mechanics, BathSpec { gamma: DCE_GAMMA, ref_freq: 1.0, temperature }),
        (Port::Cavity, BathSpec { gamma: 0.5 * DCE_GAMMA, ref_freq: 1.016, temperature }),
    ]
}

pub fn dce_filter() -> FilterSpec {
    FilterSpec::Bandwidth(10.0 * DCE_GAMMA)
}

pub fn dce_drive(system: &OpenSystem) -> Result<Drive> {
    Drive::new(DriveKind::Continuous { amplitude: 0.5 * DCE_GAMMA, carrier: 1.0 }, system.model.drive_operator(Port::Mechanics)?)
}
