//! Generalized Rabi and optomechanical Hamiltonians and their drives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, adjoint, identity, kron, matmul, Operator, C64};

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    require(v > 0.0 && v.is_finite(), || format!("{name} must be positive, got {v}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RabiParams {
    pub omega_c: f64,
    pub omega_q: f64,
    pub g: f64,
    pub theta: f64,
    pub n_max: usize,
}

impl RabiParams {
    pub fn validate(&self) -> Result<()> {
        positive("omega_c", self.omega_c)?;
        positive("omega_q", self.omega_q)?;
        require(self.g >= 0.0 && self.g.is_finite(), || format!("g must be non-negative, got {}", self.g))?;
        require((0.0..std::f64::consts::PI).contains(&self.theta), || {
            format!("theta must lie in [0, pi), got {}", self.theta)
        })?;
        require(self.n_max >= 2, || format!("n_max must be at least 2, got {}", self.n_max))
    }

    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluxQubitParams {
    pub gap: f64,
    pub persistent_energy: f64,
}

/// Qubit frequency and mixing angle of a flux qubit: `(sqrt(gap^2 + eps^2), arccos(gap / omega_q))`.
pub fn flux_qubit_frequency(p: &FluxQubitParams) -> Result<(f64, f64)> {
    positive("gap", p.gap)?;
    let wq = p.gap.hypot(p.persistent_energy);
    Ok((wq, (p.gap / wq).clamp(-1.0, 1.0).acos()))
}

/// Operators of the qubit-cavity space (qubit is the slow index).
#[derive(Clone, Debug)]
pub struct RabiOperators {
    pub a: Operator,
    pub sigma_minus: Operator,
    pub sigma_x: Operator,
    pub sigma_z: Operator,
}

impl RabiOperators {
    pub fn new(n_max: usize) -> Self {
        let nc = n_max + 1;
        let iq = identity(2);
        let ic = identity(nc);
        RabiOperators {
            a: kron(&iq, &linalg::destroy(nc)),
            sigma_minus: kron(&linalg::sigma_minus(), &ic),
            sigma_x: kron(&linalg::sigma_x(), &ic),
            sigma_z: kron(&linalg::sigma_z(), &ic),
        }
    }
}

/// `omega_q sz / 2 + omega_c a^dag a + g (a + a^dag)(cos(theta) sx + sin(theta) sz)`.
pub fn rabi_hamiltonian(p: &RabiParams) -> Result<Operator> {
    p.validate()?;
    let ops = RabiOperators::new(p.n_max);
    let ad = adjoint(&ops.a);
    let x = &ops.a + &ad;
    let coupling = ops.sigma_x.mapv(|v| v * p.theta.cos()) + ops.sigma_z.mapv(|v| v * p.theta.sin());
    let h = ops.sigma_z.mapv(|v| v * (0.5 * p.omega_q))
        + matmul(&ad, &ops.a).mapv(|v| v * p.omega_c)
        + matmul(&x, &coupling).mapv(|v| v * p.g);
    Ok(linalg::hermitize(&h))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptomechParams {
    pub omega_c: f64,
    pub omega_m: f64,
    pub g: f64,
    pub n_c: usize,
    pub n_m: usize,
    pub include_dce: bool,
}

impl OptomechParams {
    pub fn validate(&self) -> Result<()> {
        positive("omega_c", self.omega_c)?;
        positive("omega_m", self.omega_m)?;
        require(self.g >= 0.0 && self.g.is_finite(), || format!("g must be non-negative, got {}", self.g))?;
        require(self.n_c >= 2 && self.n_m >= 2, || {
            format!("truncations must be at least 2, got n_c = {}, n_m = {}", self.n_c, self.n_m)
        })
    }

    pub fn dim(&self) -> usize {
        (self.n_c + 1) * (self.n_m + 1)
    }
}

/// Cavity and mechanical ladder operators (cavity is the slow index).
#[derive(Clone, Debug)]
pub struct OptomechOperators {
    pub a: Operator,
    pub b: Operator,
}

impl OptomechOperators {
    pub fn new(n_c: usize, n_m: usize) -> Self {
        OptomechOperators {
            a: kron(&linalg::destroy(n_c + 1), &identity(n_m + 1)),
            b: kron(&identity(n_c + 1), &linalg::destroy(n_m + 1)),
        }
    }
}

/// `omega_c a^dag a + omega_m b^dag b + g a^dag a (b + b^dag) [+ g/2 (a^2 + a^dag^2)(b + b^dag)]`.
pub fn optomech_hamiltonian(p: &OptomechParams) -> Result<Operator> {
    p.validate()?;
    let ops = OptomechOperators::new(p.n_c, p.n_m);
    let ad = adjoint(&ops.a);
    let bd = adjoint(&ops.b);
    let na = matmul(&ad, &ops.a);
    let nb = matmul(&bd, &ops.b);
    let xb = &ops.b + &bd;
    let mut h = na.mapv(|v| v * p.omega_c) + nb.mapv(|v| v * p.omega_m) + matmul(&na, &xb).mapv(|v| v * p.g);
    if p.include_dce {
        let pair = matmul(&ops.a, &ops.a) + matmul(&ad, &ad);
        h = h + matmul(&pair, &xb).mapv(|v| v * (0.5 * p.g));
    }
    Ok(linalg::hermitize(&h))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriveKind {
    /// `E(t) cos(carrier t) O` with `E(t) = amplitude exp(-(t - t0)^2 / 2 width^2) / (width sqrt(2 pi))`.
    GaussianPulse { amplitude: f64, carrier: f64, t0: f64, width: f64 },
    /// `amplitude (O e^{i carrier t} + O^dag e^{-i carrier t})`.
    Continuous { amplitude: f64, carrier: f64 },
}

/// A drive bound to the operator it couples to.
#[derive(Clone, Debug)]
pub struct Drive {
    pub kind: DriveKind,
    pub op: Operator,
}

impl Drive {
    pub fn new(kind: DriveKind, op: Operator) -> Result<Self> {
        linalg::check_square(&op.view())?;
        match kind {
            DriveKind::GaussianPulse { amplitude, width, .. } => {
                require(amplitude >= 0.0, || format!("drive amplitude must be non-negative, got {amplitude}"))?;
                positive("pulse width", width)?;
            }
            DriveKind::Continuous { amplitude, .. } => {
                require(amplitude >= 0.0, || format!("drive amplitude must be non-negative, got {amplitude}"))?;
            }
        }
        Ok(Drive { kind, op })
    }

    /// Operators `O_m` and scalar functions `c_m(t)` with `H_drive(t) = sum c_m(t) O_m`.
    pub fn components(&self) -> Vec<Operator> {
        match self.kind {
            DriveKind::GaussianPulse { .. } => vec![self.op.clone()],
            DriveKind::Continuous { .. } => vec![self.op.clone(), adjoint(&self.op)],
        }
    }

    pub fn coefficients(&self, t: f64) -> Vec<C64> {
        match self.kind {
            DriveKind::GaussianPulse { carrier, .. } => vec![C64::new(self.envelope(t) * (carrier * t).cos(), 0.0)],
            DriveKind::Continuous { amplitude, carrier } => {
                let ph = C64::from_polar(amplitude, carrier * t);
                vec![ph, ph.conj()]
            }
        }
    }

    /// Pulse envelope `E(t)`; the constant amplitude for continuous drives.
    pub fn envelope(&self, t: f64) -> f64 {
        match self.kind {
            DriveKind::GaussianPulse { amplitude, t0, width, .. } => {
                let z = (t - t0) / width;
                amplitude * (-0.5 * z * z).exp() / (width * (2.0 * std::f64::consts::PI).sqrt())
            }
            DriveKind::Continuous { amplitude, .. } => amplitude,
        }
    }

    /// Interval outside of which the drive is negligible (`|t - t0| > 10 width` for pulses).
    pub fn active_window(&self) -> (f64, f64) {
        match self.kind {
            DriveKind::GaussianPulse { t0, width, .. } => (t0 - 10.0 * width, t0 + 10.0 * width),
            DriveKind::Continuous { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

/// Instantaneous lab-frame drive Hamiltonian.
pub fn drive_hamiltonian(d: &Drive, t: f64) -> Operator {
    let mut h = Operator::zeros(d.op.dim());
    for (c, o) in d.coefficients(t).into_iter().zip(d.components()) {
        h = h + o.mapv(|v| v * c);
    }
    linalg::hermitize(&h)
}
