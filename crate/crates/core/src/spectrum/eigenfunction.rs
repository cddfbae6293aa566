use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::opseq::{eval_phi, ScaledReal};

/// Bargmann-space coefficients of an eigenstate: recurrence values up to the
/// junction, then `C (-kappa)^l / l!`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenfunction {
    pub epsilon: f64,
    /// Last index taken from the recurrence.
    pub junction: usize,
    /// Multiplier `C` of the analytic tail.
    pub tail_scale: ScaledReal,
    /// `|C_J / C_{J-1} - 1|` with `C_k = phi_k k! / (-kappa)^k`.
    pub junction_mismatch: f64,
    /// `phi_0 = 1, phi_1, ..., phi_cutoff`.
    pub coefficients: Vec<ScaledReal>,
}

impl Eigenfunction {
    pub fn values(&self) -> Vec<f64> {
        self.coefficients.iter().map(ScaledReal::to_f64).collect()
    }
}

/// Reconstruct the eigenstate at `epsilon_star` from `phi_0 .. phi_N`.
///
/// At a converged eigenvalue `phi_N` itself sits at a zero, so the tail is
/// attached at the index `J <= N` where the recurrence values follow the
/// minimal-solution shape best. The true minimal solution carries an extra
/// slowly varying factor `~ n^zeta`, so the mismatch is of order `zeta / J`.
/// Coefficients run up to `cutoff` (default `3N`).
pub fn eigenfunction(params: &ModelParams, epsilon_star: f64, degree: usize, cutoff: Option<usize>) -> Result<Eigenfunction> {
    if degree < 2 {
        return Err(Error::InvalidParameter("eigenfunction needs N >= 2".into()));
    }
    let cutoff = cutoff.unwrap_or(3 * degree);
    if cutoff < degree {
        return Err(Error::InvalidParameter(format!("cutoff {cutoff} below N = {degree}")));
    }
    let k = params.kappa();
    let phi = eval_phi(params, epsilon_star, degree);

    // coherent[n] = (-kappa)^n / n!
    let mut coherent = Vec::with_capacity(cutoff + 1);
    coherent.push(ScaledReal::ONE);
    for n in 1..=cutoff {
        let prev = coherent[n - 1];
        coherent.push(prev * (-k / n as f64));
    }

    let ratio = |n: usize| phi[n] / coherent[n];
    let mut junction = degree;
    let mut mismatch = f64::INFINITY;
    for n in 2..=degree {
        let (a, b) = (ratio(n), ratio(n - 1));
        if a.is_zero() || b.is_zero() {
            continue;
        }
        let m = (a.ratio(&b) - 1.0).abs();
        if m < mismatch {
            mismatch = m;
            junction = n;
        }
    }
    let tail_scale = ratio(junction);

    let mut coefficients = Vec::with_capacity(cutoff + 1);
    coefficients.extend_from_slice(&phi[..=junction]);
    for n in junction + 1..=cutoff {
        coefficients.push(tail_scale * coherent[n]);
    }
    Ok(Eigenfunction {
        epsilon: epsilon_star,
        junction,
        tail_scale,
        junction_mismatch: mismatch,
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Parity;
    use crate::spectrum::eigenvalues;

    #[test]
    fn ground_state_of_displaced_oscillator_is_coherent() {
        let p = ModelParams::new(0.2, 0.0, Parity::Positive).unwrap();
        let ef = eigenfunction(&p, -0.04, 40, None).unwrap();
        assert_eq!(ef.coefficients.len(), 121);
        let mut expect = 1.0f64;
        for (n, c) in ef.coefficients.iter().enumerate().take(60) {
            if n > 0 {
                expect *= -0.2 / n as f64;
            }
            assert!((c.to_f64() - expect).abs() <= 1e-12 * expect.abs(), "n={n}");
        }
    }

    #[test]
    fn tail_ratio_and_normalization() {
        let p = ModelParams::new(0.7, 0.4, Parity::Negative).unwrap();
        let spec = eigenvalues(&p, 6, 1e-13).unwrap();
        let eps = spec.eigenvalues[3];
        let ef = eigenfunction(&p, eps, 60, None).unwrap();
        assert_eq!(ef.coefficients[0], ScaledReal::ONE);
        assert!(ef.junction <= 60);
        // C_n drifts like n^zeta, so consecutive ratios differ by ~zeta / n
        let zeta = eps + 0.49;
        let drift = zeta / ef.junction as f64;
        assert!(ef.junction_mismatch < 1.5 * drift, "{} vs {drift}", ef.junction_mismatch);
        for l in ef.junction + 1..ef.coefficients.len() - 1 {
            let r = ef.coefficients[l + 1].ratio(&ef.coefficients[l]);
            let want = -0.7 / (l + 1) as f64;
            assert!((r - want).abs() <= 1e-14 * want.abs());
        }
    }

    #[test]
    fn cutoff_below_degree_rejected() {
        let p = ModelParams::new(0.7, 0.4, Parity::Negative).unwrap();
        assert!(eigenfunction(&p, 0.1, 10, Some(5)).is_err());
    }
}
