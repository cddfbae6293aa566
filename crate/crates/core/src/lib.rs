//! Parity-resolved spectrum of the quantum Rabi model from the zeros of
//! orthogonal polynomials, plus the reference solvers it is checked against.

pub mod braak;
pub mod dense;
pub mod error;
pub mod jaynes_cummings;
pub mod model;
pub mod opseq;
pub mod oracle_charlier;
pub mod schweber;
pub mod spectrum;

pub use error::{Error, Result};
pub use model::{EnergyUnit, EnergyUnits, ModelParams, Parity};
pub use opseq::{OpsSpec, ScaledReal};
