//! Model parameters and the energy variables shared by every solver.
//!
//! Everything is dimensionless: energies are measured in units of the cavity
//! frequency, `kappa = g / omega_c` is the coupling and `delta = omega_0 / (2 omega_c)`
//! is the half level splitting of the two-level system.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parity eigenspace of the Rabi Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Positive => 1.0,
            Parity::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Parity {
        match self {
            Parity::Positive => Parity::Negative,
            Parity::Negative => Parity::Positive,
        }
    }

    pub const BOTH: [Parity; 2] = [Parity::Positive, Parity::Negative];
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Positive => "+",
            Parity::Negative => "-",
        })
    }
}

impl FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "+1" | "1" | "plus" | "even" | "positive" => Ok(Parity::Positive),
            "-" | "-1" | "minus" | "odd" | "negative" => Ok(Parity::Negative),
            other => Err(Error::InvalidParameter(format!("unknown parity '{other}'"))),
        }
    }
}

/// Physical configuration of a computation.
///
/// Construction normalizes `delta < 0` to `|delta|` with the parity flipped:
/// the recurrence coefficients only depend on `parity * delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    kappa: f64,
    delta: f64,
    parity: Parity,
}

impl ModelParams {
    pub fn new(kappa: f64, delta: f64, parity: Parity) -> Result<Self> {
        if !kappa.is_finite() || kappa <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "coupling kappa must be finite and > 0, got {kappa}"
            )));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "splitting delta must be finite, got {delta}"
            )));
        }
        let (delta, parity) = if delta < 0.0 {
            (-delta, parity.flipped())
        } else {
            (delta, parity)
        };
        Ok(ModelParams {
            kappa,
            delta,
            parity,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn with_parity(&self, parity: Parity) -> ModelParams {
        ModelParams { parity, ..*self }
    }

    /// The spin term `s (-1)^n delta` entering the n-th diagonal coefficient.
    pub fn spin_shift(&self, n: usize) -> f64 {
        let alternating = if n % 2 == 0 { 1.0 } else { -1.0 };
        self.parity.sign() * alternating * self.delta
    }
}

/// The three energy variables used across the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyUnit {
    /// `epsilon = E / omega_c`
    Epsilon,
    /// polynomial variable `x = epsilon / kappa`
    X,
    /// shifted energy `zeta = epsilon + kappa^2`
    Zeta,
}

impl FromStr for EnergyUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "epsilon" | "eps" => Ok(EnergyUnit::Epsilon),
            "x" => Ok(EnergyUnit::X),
            "zeta" => Ok(EnergyUnit::Zeta),
            other => Err(Error::InvalidParameter(format!("unknown energy unit '{other}'"))),
        }
    }
}

/// One energy expressed in all three variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyUnits {
    pub epsilon: f64,
    pub x: f64,
    pub zeta: f64,
}

impl EnergyUnits {
    pub fn from_epsilon(epsilon: f64, params: &ModelParams) -> Self {
        let k = params.kappa();
        EnergyUnits {
            epsilon,
            x: epsilon / k,
            zeta: epsilon + k * k,
        }
    }

    pub fn new(value: f64, unit: EnergyUnit, params: &ModelParams) -> Self {
        let epsilon = convert(value, unit, EnergyUnit::Epsilon, params);
        let mut units = EnergyUnits::from_epsilon(epsilon, params);
        // keep the caller's value bit-exact in its own unit
        match unit {
            EnergyUnit::Epsilon => {}
            EnergyUnit::X => units.x = value,
            EnergyUnit::Zeta => units.zeta = value,
        }
        units
    }
}

pub fn convert(value: f64, from: EnergyUnit, to: EnergyUnit, params: &ModelParams) -> f64 {
    use EnergyUnit::*;
    let k = params.kappa();
    let k2 = k * k;
    match (from, to) {
        (Epsilon, Epsilon) | (X, X) | (Zeta, Zeta) => value,
        (Epsilon, X) => value / k,
        (Epsilon, Zeta) => value + k2,
        (X, Epsilon) => value * k,
        (X, Zeta) => value * k + k2,
        (Zeta, Epsilon) => value - k2,
        (Zeta, X) => (value - k2) / k,
    }
}
