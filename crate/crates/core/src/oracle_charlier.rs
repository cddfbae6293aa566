//! Exact results for `delta = 0`, where the model reduces to a displaced
//! oscillator and the polynomials are monic Charlier polynomials with
//! parameter `a = kappa^2`:
//!
//! ```text
//! phi_n(zeta) = C_n(zeta) / (n! kappa^n),   zeta = epsilon + kappa^2,
//! C_{n+1}(zeta) = (zeta - n - a) C_n(zeta) - a n C_{n-1}(zeta),
//! sum_l C_m(l) C_n(l) e^{-a} a^l / l! = a^n n! delta_mn.
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, Parity};
use crate::opseq::ScaledReal;
use crate::spectrum::flow_trace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharlierSpec {
    pub kappa: f64,
    /// Poisson parameter, always `kappa^2`.
    pub a: f64,
}

impl CharlierSpec {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa must be finite and > 0, got {kappa}")));
        }
        Ok(CharlierSpec { kappa, a: kappa * kappa })
    }
}

/// `epsilon_l = l - kappa^2` for `l = 0 .. count-1`.
pub fn exact_eigenvalues(kappa: f64, count: usize) -> Vec<f64> {
    let k2 = kappa * kappa;
    (0..count).map(|l| l as f64 - k2).collect()
}

/// Explicit finite sum for `phi_n(zeta)`, accumulated term by term with
/// `t_{j+1} / t_j = -(n - j)(zeta - j) / ((j + 1) kappa^2)`.
pub fn phi_closed_form_scaled(kappa: f64, zeta: f64, n: usize) -> ScaledReal {
    // t_0 = (-kappa)^n / n!
    let mut term = ScaledReal::ONE;
    for k in 1..=n {
        term = term * (-kappa / k as f64);
    }
    let inv_a = 1.0 / (kappa * kappa);
    let mut sum = term;
    for j in 0..n {
        term = term * (-((n - j) as f64) * (zeta - j as f64) * inv_a / (j + 1) as f64);
        if term.is_zero() {
            break;
        }
        sum = sum + term;
    }
    sum
}

pub fn phi_closed_form(kappa: f64, zeta: f64, n: usize) -> f64 {
    phi_closed_form_scaled(kappa, zeta, n).to_f64()
}

/// Same sum with the terms `j > jmax` dropped.
fn phi_partial_sum(kappa: f64, zeta: f64, n: usize, jmax: usize) -> ScaledReal {
    let mut term = ScaledReal::ONE;
    for k in 1..=n {
        term = term * (-kappa / k as f64);
    }
    let inv_a = 1.0 / (kappa * kappa);
    let mut sum = term;
    for j in 0..n.min(jmax) {
        term = term * (-((n - j) as f64) * (zeta - j as f64) * inv_a / (j + 1) as f64);
        sum = sum + term;
    }
    sum
}

/// `(C_0(zeta), ..., C_n(zeta))` from the monic three-term recurrence.
pub fn charlier_sequence(a: f64, zeta: f64, n: usize) -> Vec<ScaledReal> {
    let mut out = Vec::with_capacity(n + 1);
    let mut prev = ScaledReal::ZERO;
    let mut cur = ScaledReal::ONE;
    out.push(cur);
    for k in 0..n {
        let next = cur * (zeta - k as f64 - a) - prev * (a * k as f64);
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

pub fn charlier_monic(a: f64, zeta: f64, n: usize) -> f64 {
    charlier_sequence(a, zeta, n)[n].to_f64()
}

/// `C_n(l)` on the lattice. For `n > l` the self-duality
/// `C_n(l) = (-a)^{n-l} C_l(n)` avoids the cancellation of the direct
/// recurrence at small `zeta`.
fn charlier_lattice(a: f64, l: usize, n: usize) -> ScaledReal {
    if n <= l {
        charlier_sequence(a, l as f64, n)[n]
    } else {
        let mut v = charlier_sequence(a, n as f64, l)[l];
        for _ in 0..n - l {
            v = v * -a;
        }
        v
    }
}

/// `|sum_l C_m(l) C_n(l) w(l) - a^n n! delta_mn| / max(1, sqrt(h_m h_n))` with
/// the Poisson weight `w`. The lattice sum stops at `limit` or, when `None`,
/// once a term beyond the weight peak and the lattice zeros falls below
/// `1e-20` of the accumulated absolute sum.
pub fn orthogonality_residual(a: f64, m: usize, n: usize, limit: Option<usize>) -> f64 {
    let norm = |k: usize| (1..=k).fold(ScaledReal::ONE, |acc, j| acc * (a * j as f64));
    let mut weight = ScaledReal::from_f64((-a).exp());
    let mut sum = ScaledReal::ZERO;
    let mut abs_sum = ScaledReal::ZERO;
    // zeros of C_k lie below a + k + 2 sqrt(ak) <= 2(a + k), and the weight
    // peaks near a; only past both does a small or zero term bound the tail
    let floor = (2.0 * a + 10.0 * a.sqrt()).ceil() as usize + 2 * m.max(n) + 1;
    let mut l = 0usize;
    loop {
        let term = charlier_lattice(a, l, m) * charlier_lattice(a, l, n) * weight;
        sum = sum + term;
        abs_sum = abs_sum + term.abs();
        let stop = match limit {
            Some(cap) => l >= cap,
            None => l >= floor && (term.is_zero() || term.abs().ratio(&abs_sum) < 1e-20),
        };
        if stop {
            break;
        }
        l += 1;
        weight = weight * (a / l as f64);
    }
    let expected = if m == n { norm(n) } else { ScaledReal::ZERO };
    let scale = (norm(m) * norm(n)).to_f64().sqrt().max(1.0);
    (sum - expected).abs().to_f64() / scale
}

/// `|C_n(zeta+1) - C_n(zeta) - n C_{n-1}(zeta)|` relative to the sizes of the
/// three terms.
pub fn forward_difference_residual(a: f64, zeta: f64, n: usize) -> f64 {
    assert!(n >= 1, "forward difference needs n >= 1");
    // on the non-negative lattice the recurrence cancels down to a^{n-zeta},
    // so use the dual form there
    let eval = |z: f64, k: usize| {
        if z >= 0.0 && z.fract() == 0.0 {
            charlier_lattice(a, z as usize, k)
        } else {
            charlier_sequence(a, z, k)[k]
        }
    };
    let up = eval(zeta + 1.0, n);
    let here = eval(zeta, n);
    let lower = eval(zeta, n - 1) * n as f64;
    let scale = up.abs() + here.abs() + lower.abs();
    if scale.is_zero() {
        return 0.0;
    }
    (up - here - lower).abs().ratio(&scale)
}

/// Poisson weight `e^{-a} a^x / x!`.
pub fn poisson_weight(a: f64, x: usize) -> ScaledReal {
    (1..=x).fold(ScaledReal::from_f64((-a).exp()), |acc, k| acc * (a / k as f64))
}

/// `|u(x+1) - u(x) - ((a - x - 1)/(x + 1)) u(x)| / u(x)`.
pub fn pearson_residual(a: f64, x: usize) -> f64 {
    let u0 = poisson_weight(a, x);
    let u1 = poisson_weight(a, x + 1);
    let coeff = (a - x as f64 - 1.0) / (x as f64 + 1.0);
    ((u1 - u0) - u0 * coeff).abs().ratio(&u0)
}

/// `(|phi_n|, l^2 max(kappa^n, kappa^{n+2-2l}) / (n+1-l)!)` at the `l`-th
/// level, `zeta = l - 1`.
pub fn decay_bound_check(kappa: f64, l: usize, n: usize) -> Result<(f64, f64)> {
    if l == 0 || n < l {
        return Err(Error::InvalidParameter(format!("need n >= l >= 1, got l={l}, n={n}")));
    }
    let value = phi_closed_form_scaled(kappa, (l - 1) as f64, n).abs().to_f64();
    let p1 = kappa.powi(n as i32);
    let p2 = kappa.powi(n as i32 + 2 - 2 * l as i32);
    let fact: f64 = (1..=(n + 1 - l)).map(|k| k as f64).product();
    let bound = (l * l) as f64 * p1.max(p2) / fact;
    Ok((value, bound))
}

/// `|phi_n(l) - sum_{j <= l} t_j|`: at `zeta = l` every term past `j = l`
/// carries the factor `(zeta - l)` and drops out.
pub fn collapse_residual(kappa: f64, l: usize, n: usize) -> f64 {
    let full = phi_closed_form_scaled(kappa, l as f64, n);
    let cut = phi_partial_sum(kappa, l as f64, n, l);
    (full - cut).abs().to_f64()
}

/// How far `phi_n` stays from vanishing on the spectrum `zeta = m`, `m <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMargin {
    pub degree: usize,
    /// `min_m log10 |phi_n(m)|`.
    pub min_log10_phi: f64,
    /// Lattice point attaining it.
    pub argmin: usize,
    /// Whether `phi_n(m) != 0` for every `m`.
    pub nonvanishing: bool,
}

pub fn spectrum_margin(kappa: f64, n: usize) -> SpectrumMargin {
    let mut best = f64::INFINITY;
    let mut argmin = 0;
    let mut nonvanishing = true;
    for m in 0..=n {
        let v = phi_closed_form_scaled(kappa, m as f64, n);
        if v.is_zero() {
            nonvanishing = false;
            best = f64::NEG_INFINITY;
            argmin = m;
            continue;
        }
        let lg = v.log10_abs();
        if lg < best {
            best = lg;
            argmin = m;
        }
    }
    SpectrumMargin {
        degree: n,
        min_log10_phi: best,
        argmin,
        nonvanishing,
    }
}

/// `|epsilon_{N,l} - (l - 1 - kappa^2)|` along `degrees` for the `level`-th
/// zero (1-based), at `delta = 0`.
pub fn oracle_deviation(kappa: f64, level: usize, degrees: &[usize]) -> Result<Vec<f64>> {
    let params = ModelParams::new(kappa, 0.0, Parity::Positive)?;
    let trace = flow_trace(&params, level, degrees)?;
    let exact = (level - 1) as f64 - kappa * kappa;
    Ok(trace.epsilons().iter().map(|e| (e - exact).abs()).collect())
}
