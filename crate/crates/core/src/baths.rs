//! Ohmic reservoirs, thermal occupations and the frequency filter.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One Ohmic reservoir: damping `gamma`, reference frequency `ref_freq`, temperature (k_B = 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSpec {
    pub gamma: f64,
    pub ref_freq: f64,
    pub temperature: f64,
}

impl BathSpec {
    pub fn new(gamma: f64, ref_freq: f64, temperature: f64) -> Result<Self> {
        let b = BathSpec { gamma, ref_freq, temperature };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("bath gamma must be positive, got {}", self.gamma)));
        }
        if !(self.ref_freq > 0.0 && self.ref_freq.is_finite()) {
            return Err(Error::InvalidParameter(format!("bath ref_freq must be positive, got {}", self.ref_freq)));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bath temperature must be non-negative, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }
}

/// Rectangular filter window in transition-frequency differences.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum FilterSpec {
    #[default]
    Unbounded,
    Bandwidth(f64),
}

impl FilterSpec {
    pub fn bandwidth(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!("filter bandwidth must be non-negative, got {lambda}")));
        }
        Ok(FilterSpec::Bandwidth(lambda))
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, FilterSpec::Unbounded)
    }

    /// Pass test on an oscillation frequency `|w - w'|`.
    pub fn passes(&self, diff: f64) -> bool {
        match *self {
            FilterSpec::Unbounded => true,
            FilterSpec::Bandwidth(l) => diff == 0.0 || diff.abs() < l,
        }
    }
}

/// Bose occupation `1 / (exp(omega / T) - 1)`.
pub fn thermal_n(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter(format!("thermal_n requires omega > 0, got {omega}")));
    }
    if !(temperature >= 0.0) {
        return Err(Error::InvalidParameter(format!("temperature must be non-negative, got {temperature}")));
    }
    Ok(thermal_n_unchecked(omega, temperature))
}

pub(crate) fn thermal_n_unchecked(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return 0.0;
    }
    let x = omega / temperature;
    if x < 1e-6 {
        1.0 / x - 0.5 + x / 12.0
    } else {
        1.0 / x.exp_m1()
    }
}

/// Ohmic rate `gamma * omega / f`.
pub fn ohmic_rate(bath: &BathSpec, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter(format!("ohmic_rate requires omega > 0, got {omega}")));
    }
    Ok(bath.gamma * omega / bath.ref_freq)
}

/// Pure-dephasing rate `gamma * T / (4 f)`.
pub fn dephasing_rate(bath: &BathSpec) -> f64 {
    bath.gamma * bath.temperature / (4.0 * bath.ref_freq)
}

/// 1 when `|omega - omega_prime| < Lambda` (the diagonal always passes), else 0.
pub fn filter_weight(omega: f64, omega_prime: f64, filt: FilterSpec) -> f64 {
    if filt.passes((omega - omega_prime).abs()) {
        1.0
    } else {
        0.0
    }
}

/// Downward and upward rates at a positive frequency: `(Gamma (n + 1), Gamma n)`.
pub(crate) fn emission_absorption(bath: &BathSpec, omega: f64) -> (f64, f64) {
    let g = bath.gamma * omega / bath.ref_freq;
    let n = thermal_n_unchecked(omega, bath.temperature);
    (g * (n + 1.0), g * n)
}
