//! Rotating-wave (Jaynes-Cummings) limit and the two-coefficient truncation
//! of the exact recurrence that mimics it.
//!
//! Block `l` couples `|e, l>` and `|g, l+1>`; with detuning `d = 2 delta - 1`
//! and `D = sqrt(d^2 + 4 kappa^2 (l+1))` its eigenvalues are
//! `l + 1/2 +- D/2`.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, Parity};
use crate::spectrum::eigenvalues;

/// `delta_c = (omega_0 - omega_c) / omega_c = 2 delta - 1`.
pub fn detuning(delta: f64) -> f64 {
    2.0 * delta - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JcBlock {
    pub l: usize,
    pub kappa: f64,
    pub delta: f64,
    pub delta_c: f64,
    /// `sqrt(delta_c^2 + 4 kappa^2 (l+1))`, never below `|delta_c|`.
    pub d: f64,
}

impl JcBlock {
    pub fn new(kappa: f64, delta: f64, l: usize) -> Self {
        let delta_c = detuning(delta);
        let d = delta_c.hypot(2.0 * kappa * ((l + 1) as f64).sqrt());
        JcBlock {
            l,
            kappa,
            delta,
            delta_c,
            d,
        }
    }

    /// `[[l + delta, (l+1) kappa], [kappa, l + 1 - delta]]`, acting on
    /// `(phi_l, phi_{l+1})`.
    pub fn matrix(&self) -> Matrix2<f64> {
        let l = self.l as f64;
        Matrix2::new(l + self.delta, (l + 1.0) * self.kappa, self.kappa, l + 1.0 - self.delta)
    }

    /// `eps_+ eps_- = l(l+1) + delta - delta^2 - kappa^2 (l+1)`.
    pub fn product(&self) -> f64 {
        let l = self.l as f64;
        l * (l + 1.0) + self.delta - self.delta * self.delta - self.kappa * self.kappa * (l + 1.0)
    }
}

/// `(eps_+, eps_-)`. The root that suffers cancellation is taken from the
/// product of the roots instead.
pub fn jc_eigenvalues(kappa: f64, delta: f64, l: usize) -> (f64, f64) {
    let b = JcBlock::new(kappa, delta, l);
    let mid = l as f64 + 0.5;
    let plus = mid + 0.5 * b.d;
    let minus = mid - 0.5 * b.d;
    if minus.abs() < 0.5 * mid && plus != 0.0 {
        (plus, b.product() / plus)
    } else {
        (plus, minus)
    }
}

/// Eigenvalues of the 2x2 block by a general real Schur decomposition,
/// sorted `(larger, smaller)`.
pub fn block_eigenvalues(kappa: f64, delta: f64, l: usize) -> Option<(f64, f64)> {
    let ev = JcBlock::new(kappa, delta, l).matrix().eigenvalues()?;
    let (a, b) = (ev[0], ev[1]);
    Some((a.max(b), a.min(b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tangents {
    /// `phi_{l+1} / phi_l = tan(theta/2) = 2 kappa / (D + delta_c)`.
    pub tan_half: f64,
    /// `tan(theta) = 4 (l+1) kappa / (l D + (l+2) delta_c)`.
    pub tan_full: f64,
    /// Rotating-wave mixing tangent `2 kappa sqrt(l+1) / delta_c`.
    pub tan_rwa: f64,
}

impl Tangents {
    pub fn mismatch(&self) -> f64 {
        (self.tan_full - self.tan_rwa).abs()
    }
}

pub fn truncated_pair_tangent(kappa: f64, delta: f64, l: usize) -> Result<Tangents> {
    let b = JcBlock::new(kappa, delta, l);
    let lf = l as f64;
    let half_den = b.d + b.delta_c;
    let full_den = lf * b.d + (lf + 2.0) * b.delta_c;
    if half_den == 0.0 || full_den == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "degenerate tangent at kappa={kappa}, delta={delta}, l={l}"
        )));
    }
    Ok(Tangents {
        tan_half: 2.0 * kappa / half_den,
        tan_full: 4.0 * (lf + 1.0) * kappa / full_den,
        tan_rwa: 2.0 * kappa * (lf + 1.0).sqrt() / b.delta_c,
    })
}

/// Largest distance from either member of JC doublet `l` to the nearest
/// exact eigenvalue of either parity, solved with `2 l + count_margin` levels
/// per parity.
pub fn rwa_deviation(params: &ModelParams, l: usize, count_margin: usize) -> Result<f64> {
    let count = 2 * l + count_margin.max(2);
    let mut exact = Vec::with_capacity(2 * count);
    for parity in Parity::BOTH {
        let p = ModelParams::new(params.kappa(), params.delta(), parity)?;
        exact.extend(eigenvalues(&p, count, 1e-13)?.eigenvalues);
    }
    let (plus, minus) = jc_eigenvalues(params.kappa(), params.delta(), l);
    let nearest = |e: f64| exact.iter().map(|x| (x - e).abs()).fold(f64::INFINITY, f64::min);
    Ok(nearest(plus).max(nearest(minus)))
}
