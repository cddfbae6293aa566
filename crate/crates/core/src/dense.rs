//! Brute-force reference: `a^+a + delta s_1 + kappa s_3 (a + a^+)` on a
//! truncated spin x Fock space, projected onto the two eigenspaces of the
//! parity operator `s_1 (-1)^{a^+a}` and diagonalized densely.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, Parity};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseSpectrum {
    pub fock_dim: usize,
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
}

impl DenseSpectrum {
    pub fn parity(&self, parity: Parity) -> &[f64] {
        match parity {
            Parity::Positive => &self.positive,
            Parity::Negative => &self.negative,
        }
    }
}

/// Full spectrum with `fock_dim` photon states (matrix size `2 fock_dim`).
pub fn dense_spectrum(kappa: f64, delta: f64, fock_dim: usize) -> Result<DenseSpectrum> {
    if fock_dim < 2 {
        return Err(Error::InvalidParameter("fock_dim must be >= 2".into()));
    }
    let m = fock_dim;
    // basis index 2n + s, s = 0 for s_3 = +1, s = 1 for s_3 = -1
    let mut h = DMatrix::<f64>::zeros(2 * m, 2 * m);
    for n in 0..m {
        let (up, dn) = (2 * n, 2 * n + 1);
        h[(up, up)] = n as f64;
        h[(dn, dn)] = n as f64;
        h[(up, dn)] = delta;
        h[(dn, up)] = delta;
        if n + 1 < m {
            let g = kappa * ((n + 1) as f64).sqrt();
            h[(up, up + 2)] = g;
            h[(up + 2, up)] = g;
            h[(dn, dn + 2)] = -g;
            h[(dn + 2, dn)] = -g;
        }
    }
    // parity eigenvectors |n,up> + s (-1)^n |n,dn>, one column per n
    let sector = |sign: f64| -> Vec<f64> {
        let mut u = DMatrix::<f64>::zeros(2 * m, m);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for n in 0..m {
            let alt = if n % 2 == 0 { 1.0 } else { -1.0 };
            u[(2 * n, n)] = r;
            u[(2 * n + 1, n)] = sign * alt * r;
        }
        let block = u.transpose() * &h * &u;
        block.symmetric_eigenvalues().iter().copied().collect()
    };
    let mut positive = sector(1.0);
    let mut negative = sector(-1.0);
    positive.sort_by(f64::total_cmp);
    negative.sort_by(f64::total_cmp);
    Ok(DenseSpectrum {
        fock_dim,
        positive,
        negative,
    })
}

/// First `count` levels of one parity, enlarging the truncation (starting
/// from `4 count`) until those levels stop moving by more than `1e-12`.
pub fn dense_eigenvalues(params: &ModelParams, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be >= 1".into()));
    }
    let mut dim = (4 * count).max(16);
    let mut prev: Option<Vec<f64>> = None;
    for _ in 0..8 {
        let spec = dense_spectrum(params.kappa(), params.delta(), dim)?;
        let cur: Vec<f64> = spec.parity(params.parity()).iter().take(count).copied().collect();
        if cur.len() == count {
            if let Some(p) = &prev {
                let moved = cur.iter().zip(p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                if moved < 1e-12 {
                    return Ok(cur);
                }
            }
            prev = Some(cur);
        }
        dim += dim / 2;
    }
    Err(Error::NonConvergence {
        ceiling: dim,
        residual: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoupled_levels() {
        // kappa -> 0: positive parity holds n + (-1)^n delta
        let s = dense_spectrum(1e-12, 0.3, 20).unwrap();
        assert_eq!(s.positive.len() + s.negative.len(), 40);
        for (got, want) in s.positive.iter().zip([0.3, 0.7, 2.3, 2.7]) {
            assert!((got - want).abs() < 1e-9, "{got}");
        }
        assert!((s.negative[0] + 0.3).abs() < 1e-9);
    }

    #[test]
    fn displaced_oscillator_is_doubly_degenerate() {
        let s = dense_spectrum(0.5, 0.0, 60).unwrap();
        for l in 0..10 {
            let exact = l as f64 - 0.25;
            assert!((s.positive[l] - exact).abs() < 1e-10);
            assert!((s.negative[l] - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn parity_sectors_split_when_delta_nonzero() {
        let p = ModelParams::new(0.3, 0.4, Parity::Positive).unwrap();
        let plus = dense_eigenvalues(&p, 5).unwrap();
        let minus = dense_eigenvalues(&p.with_parity(Parity::Negative), 5).unwrap();
        assert!((plus[0] - minus[0]).abs() > 0.1);
    }
}
