//! Recurrence coefficients and pointwise evaluation of the monic orthogonal
//! polynomial families attached to each parity sector.
//!
//! With `x = epsilon / kappa` the expansion coefficients of a parity
//! eigenstate satisfy `phi_n = P_n^(-1)(x) / n!`, where
//!
//! ```text
//! P_n^(a)(x) = (x - c_{n+a}) P_{n-1}^(a)(x) - lambda_{n+a} P_{n-2}^(a)(x),
//! P_{-1} = 0,  P_0 = 1,
//! c_n = (n + s (-1)^n delta) / kappa,  lambda_n = n (lambda_0 = 1).
//! ```
//!
//! The families `a = 0` and `a = 1` are the partial denominators and
//! numerators of the continued fraction used by [`crate::schweber`].

pub mod scaled;

use serde::{Deserialize, Serialize};

pub use scaled::ScaledReal;

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// `c_n = (n + s (-1)^n delta) / kappa`.
pub fn coeff_c(params: &ModelParams, n: usize) -> f64 {
    (n as f64 + params.spin_shift(n)) / params.kappa()
}

/// `lambda_n = n` for `n > 0` and `lambda_0 = 1`.
pub fn coeff_lambda(n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        n as f64
    }
}

/// Which member of the associated family is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `alpha = -1`: the expansion coefficients themselves.
    Phi,
    /// `alpha = 0`: partial denominators `B_n`.
    Denominator,
    /// `alpha = 1`: partial numerators `A_n`.
    Numerator,
}

impl Family {
    pub fn alpha(self) -> i64 {
        match self {
            Family::Phi => -1,
            Family::Denominator => 0,
            Family::Numerator => 1,
        }
    }

    pub fn from_alpha(alpha: i64) -> Result<Family> {
        match alpha {
            -1 => Ok(Family::Phi),
            0 => Ok(Family::Denominator),
            1 => Ok(Family::Numerator),
            other => Err(Error::InvalidParameter(format!(
                "alpha must be -1, 0 or 1, got {other}"
            ))),
        }
    }

    /// The family whose degree `n - 1` member interlaces with this one.
    pub fn associated(self) -> Option<Family> {
        match self {
            Family::Phi => Some(Family::Denominator),
            Family::Denominator => Some(Family::Numerator),
            Family::Numerator => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpsSpec {
    pub params: ModelParams,
    pub family: Family,
}

impl OpsSpec {
    pub fn new(params: ModelParams, alpha: i64) -> Result<Self> {
        Ok(OpsSpec {
            params,
            family: Family::from_alpha(alpha)?,
        })
    }

    pub fn phi(params: ModelParams) -> Self {
        OpsSpec {
            params,
            family: Family::Phi,
        }
    }

    pub fn with_family(&self, family: Family) -> Self {
        OpsSpec { family, ..*self }
    }

    pub fn alpha(&self) -> i64 {
        self.family.alpha()
    }

    pub fn coeff_c(&self, n: usize) -> f64 {
        coeff_c(&self.params, n)
    }

    /// Shifted index `n + alpha` used by recurrence step `n >= 1`.
    #[inline]
    fn shifted(&self, n: usize) -> usize {
        (n as i64 + self.alpha()) as usize
    }

    /// Diagonal coefficient `c_{n+alpha}` of step `n >= 1`.
    #[inline]
    pub fn step_c(&self, n: usize) -> f64 {
        coeff_c(&self.params, self.shifted(n))
    }

    /// Off-diagonal weight `lambda_{n+alpha}` of step `n >= 2`.
    #[inline]
    pub fn step_lambda(&self, n: usize) -> f64 {
        coeff_lambda(self.shifted(n))
    }
}

/// `(P_0(x), ..., P_N(x))` of the requested family.
pub fn eval_sequence(spec: &OpsSpec, x: f64, degree: usize) -> Vec<ScaledReal> {
    let mut out = Vec::with_capacity(degree + 1);
    let mut prev = ScaledReal::ZERO;
    let mut cur = ScaledReal::ONE;
    out.push(cur);
    for n in 1..=degree {
        let next = cur * (x - spec.step_c(n)) - prev * spec.step_lambda(n);
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Values and first derivatives `(P_N(x), P_N'(x))`, propagated together.
pub fn eval_with_derivative(spec: &OpsSpec, x: f64, degree: usize) -> (ScaledReal, ScaledReal) {
    let (mut p_prev, mut p) = (ScaledReal::ZERO, ScaledReal::ONE);
    let (mut d_prev, mut d) = (ScaledReal::ZERO, ScaledReal::ZERO);
    for n in 1..=degree {
        let shift = x - spec.step_c(n);
        let lambda = spec.step_lambda(n);
        let p_next = p * shift - p_prev * lambda;
        let d_next = p + d * shift - d_prev * lambda;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// Expansion coefficients `(phi_0, ..., phi_N)` at energy `epsilon`, straight
/// from the two-sided recurrence with `phi_{-1} = 0`, `phi_0 = 1`.
pub fn eval_phi(params: &ModelParams, epsilon: f64, degree: usize) -> Vec<ScaledReal> {
    let k = params.kappa();
    let mut out = Vec::with_capacity(degree + 1);
    let mut prev = ScaledReal::ZERO;
    let mut cur = ScaledReal::ONE;
    out.push(cur);
    for n in 0..degree {
        let m = (n + 1) as f64;
        let a = (n as f64 - epsilon + params.spin_shift(n)) / (k * m);
        let next = -(cur * a) - prev / m;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// The same recurrence in plain `f64`. Fails as soon as a coefficient leaves
/// the normal range, which is what limits a naive stepping solver.
pub fn eval_phi_plain(params: &ModelParams, epsilon: f64, degree: usize) -> Result<Vec<f64>> {
    let k = params.kappa();
    let mut out = Vec::with_capacity(degree + 1);
    let mut prev = 0.0f64;
    let mut cur = 1.0f64;
    out.push(cur);
    for n in 0..degree {
        let m = (n + 1) as f64;
        let a = (n as f64 - epsilon + params.spin_shift(n)) / (k * m);
        let next = -a * cur - prev / m;
        if !next.is_finite() || (next != 0.0 && next.abs() < f64::MIN_POSITIVE) {
            return Err(Error::Overflow { index: n + 1 });
        }
        prev = cur;
        cur = next;
        out.push(cur);
    }
    Ok(out)
}

/// Number of zeros of `P_N` strictly below `x`, from the sign changes of
/// `P_0(x), ..., P_N(x)`. A chain that hits an exact zero is re-evaluated one
/// ulp lower, so a zero sitting exactly on `x` is not counted.
pub fn sturm_count(spec: &OpsSpec, x: f64, degree: usize) -> usize {
    let mut x = x;
    loop {
        let seq = eval_sequence(spec, x, degree);
        if seq.iter().any(ScaledReal::is_zero) {
            x = x.next_down();
            continue;
        }
        let changes = seq
            .windows(2)
            .filter(|w| w[0].signum() != w[1].signum())
            .count();
        return degree - changes;
    }
}
