//! Zeros of the polynomial families, the discrete flow of those zeros with
//! growing degree, and the converged spectrum it produces.

mod eigenfunction;
mod interlacing;
mod jacobi;

use serde::{Deserialize, Serialize};

pub use eigenfunction::{eigenfunction, Eigenfunction};
pub use interlacing::{interlacing_check, ChainReport, InterlacingReport};
pub use jacobi::{build_jacobi, JacobiSpec, MAX_BISECTION_ITERATIONS};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::opseq::{eval_phi_plain, OpsSpec};

pub const DEFAULT_TOL: f64 = 1e-12;

/// Width floor for bisection: a few ulps is all double precision offers.
const BISECTION_FLOOR: f64 = 4.0 * f64::EPSILON;

/// `x_{N,l}` for `l` in `levels` (1-based, inclusive).
pub fn zeros(spec: &OpsSpec, degree: usize, levels: std::ops::RangeInclusive<usize>, tol: f64) -> Result<Vec<f64>> {
    let jac = build_jacobi(spec, degree)?;
    let idx: Vec<usize> = levels.collect();
    if idx.is_empty() {
        return Err(Error::InvalidParameter("empty level range".into()));
    }
    jac.zeros(&idx, tol, None)
}

/// `|sum of zeros - sum of c_k| / sum |c_k|` at degree `N`.
pub fn trace_residual(spec: &OpsSpec, degree: usize) -> Result<f64> {
    let jac = build_jacobi(spec, degree)?;
    let zeros = jac.all_zeros(BISECTION_FLOOR)?;
    let sum_zeros: f64 = zeros.iter().sum();
    let scale: f64 = jac.diag().iter().map(|c| c.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    Ok((sum_zeros - jac.trace()).abs() / scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Relative tolerance on every level between successive sweeps.
    pub tol: f64,
    /// Degree increment per sweep; `max(8, count / 100)` when unset.
    pub step: Option<usize>,
    /// Largest degree tried; `50 count + 2000`, times `1 + kappa` for
    /// `kappa >= 1`, when unset.
    pub ceiling: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: DEFAULT_TOL,
            step: None,
            ceiling: None,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolveOptions {
            tol,
            ..Default::default()
        }
    }
}

pub fn default_step(count: usize) -> usize {
    (count / 100).max(8)
}

pub fn default_ceiling(count: usize, kappa: f64) -> usize {
    let base = 50 * count + 2000;
    if kappa >= 1.0 {
        (base as f64 * (1.0 + kappa)).ceil() as usize
    } else {
        base
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub params: ModelParams,
    /// `epsilon_0 < epsilon_1 < ...`
    pub eigenvalues: Vec<f64>,
    /// Smallest degree whose zeros all lie within `tol` of the converged ones.
    pub degree_used: usize,
    /// `n_t = degree_used - count`.
    pub tail_margin: usize,
    /// `|x_{N,l} - x_final,l| / max(1, |x_final,l|)` at `N = degree_used`.
    pub tail_residual: f64,
    /// Degree of the last sweep, which supplies `eigenvalues`.
    pub final_degree: usize,
    /// `|x_{N,l} - x_{N-step,l}| / max(1, |x_{N,l}|)` between the last two sweeps.
    pub per_level_residual: Vec<f64>,
    pub step: usize,
    pub sweeps: usize,
}

impl SpectrumResult {
    pub fn max_residual(&self) -> f64 {
        self.per_level_residual.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_gap(&self) -> f64 {
        self.eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn eigenvalues(params: &ModelParams, count: usize, tol: f64) -> Result<SpectrumResult> {
    eigenvalues_with(params, count, &SolveOptions::with_tol(tol))
}

/// First `count` eigenvalues of one parity sector: the zeros of `phi_N` are
/// recomputed at `N = count + step, count + 2 step, ...` until no level moves
/// by more than `tol` (relative) between two sweeps.
pub fn eigenvalues_with(params: &ModelParams, count: usize, opts: &SolveOptions) -> Result<SpectrumResult> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be >= 1".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be > 0, got {}", opts.tol)));
    }
    let spec = OpsSpec::phi(*params);
    let step = opts.step.unwrap_or_else(|| default_step(count)).max(1);
    let ceiling = opts.ceiling.unwrap_or_else(|| default_ceiling(count, params.kappa()));
    let bis_tol = (opts.tol / 16.0).max(BISECTION_FLOOR);
    let levels: Vec<usize> = (1..=count).collect();

    let mut degree = count + step;
    let mut prev: Option<Vec<f64>> = None;
    let mut moves: Option<Vec<f64>> = None;
    let mut worst = f64::INFINITY;
    let mut sweeps = 0;
    while degree <= ceiling {
        let jac = build_jacobi(&spec, degree)?;
        let hints: Option<Vec<(f64, f64)>> = prev.as_ref().map(|p| {
            p.iter()
                .enumerate()
                .map(|(i, &z)| {
                    let pad = 2.0 * bis_tol * z.abs().max(1.0);
                    // the flow only decreases, and by less each sweep
                    let drop = match &moves {
                        Some(m) => 2.0 * m[i],
                        None => 1e-3 * z.abs().max(1.0),
                    };
                    (z - drop - pad, z + pad)
                })
                .collect()
        });
        let cur = jac.zeros(&levels, bis_tol, hints.as_deref())?;
        sweeps += 1;
        if let Some(p) = &prev {
            let step_moves: Vec<f64> = cur.iter().zip(p).map(|(a, b)| (a - b).abs()).collect();
            let residual: Vec<f64> = step_moves
                .iter()
                .zip(&cur)
                .map(|(m, z)| m / z.abs().max(1.0))
                .collect();
            worst = residual.iter().copied().fold(0.0, f64::max);
            if worst < opts.tol {
                let (degree_used, tail_residual) = minimal_degree(&spec, &cur, degree, step, opts.tol, bis_tol)?;
                let k = params.kappa();
                return Ok(SpectrumResult {
                    params: *params,
                    eigenvalues: cur.iter().map(|x| x * k).collect(),
                    degree_used,
                    tail_margin: degree_used - count,
                    tail_residual,
                    final_degree: degree,
                    per_level_residual: residual,
                    step,
                    sweeps,
                });
            }
            moves = Some(step_moves);
        }
        prev = Some(cur);
        degree += step;
    }
    Err(Error::NonConvergence {
        ceiling,
        residual: worst,
    })
}

/// Smallest degree `N` in `(final - 2 step, final]` at which every zero is
/// already within `tol` of `converged`. The top level converges last, so it
/// locates `N` by bisection over degrees; the full set then confirms it.
fn minimal_degree(spec: &OpsSpec, converged: &[f64], final_degree: usize, step: usize, tol: f64, bis_tol: f64) -> Result<(usize, f64)> {
    let count = converged.len();
    let top = converged[count - 1];
    let close = |n: usize| -> Result<bool> {
        let z = build_jacobi(spec, n)?.zeros(&[count], bis_tol, Some(&[(top, top)]))?[0];
        Ok((z - top).abs() / top.abs().max(1.0) < tol)
    };
    let mut lo = final_degree.saturating_sub(2 * step).max(count);
    let mut hi = final_degree;
    if close(lo)? {
        hi = lo;
    }
    // invariant: close(hi), and lo is not close unless lo == hi
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if close(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let levels: Vec<usize> = (1..=count).collect();
    let hints: Vec<(f64, f64)> = converged.iter().map(|&z| (z, z)).collect();
    let zs = build_jacobi(spec, hi)?.zeros(&levels, bis_tol, Some(&hints))?;
    let residual = zs
        .iter()
        .zip(converged)
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0, f64::max);
    if residual < tol {
        Ok((hi, residual))
    } else {
        Ok((final_degree, 0.0))
    }
}

/// `x_{N,level}` along a sequence of degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub params: ModelParams,
    pub level: usize,
    pub degrees: Vec<usize>,
    pub zeros: Vec<f64>,
    /// Accuracy floor of the bisected zeros, in `x` units.
    pub resolution: f64,
}

/// Step-by-step classification of a flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowMonotonicity {
    pub decreasing: usize,
    /// Steps that stall or rise within the resolution.
    pub unresolved: usize,
    /// Steps that rise by more than the resolution.
    pub violations: usize,
}

impl FlowTrace {
    pub fn epsilons(&self) -> Vec<f64> {
        self.zeros.iter().map(|x| x * self.params.kappa()).collect()
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.zeros.windows(2).all(|w| w[1] < w[0])
    }

    pub fn monotonicity(&self) -> FlowMonotonicity {
        let mut m = FlowMonotonicity {
            decreasing: 0,
            unresolved: 0,
            violations: 0,
        };
        for w in self.zeros.windows(2) {
            let rise = w[1] - w[0];
            if rise < 0.0 {
                m.decreasing += 1;
            } else if rise <= self.resolution {
                m.unresolved += 1;
            } else {
                m.violations += 1;
            }
        }
        m
    }
}

/// Follow the `level`-th zero (1-based) of `phi_N` through `degrees`, each
/// resolved to the last bit.
pub fn flow_trace(params: &ModelParams, level: usize, degrees: &[usize]) -> Result<FlowTrace> {
    if level == 0 {
        return Err(Error::InvalidParameter("levels are 1-based".into()));
    }
    if let Some(&n) = degrees.iter().find(|&&n| n < level) {
        return Err(Error::InvalidParameter(format!("degree {n} below level {level}")));
    }
    let spec = OpsSpec::phi(*params);
    let mut zeros = Vec::with_capacity(degrees.len());
    let mut resolution: f64 = 0.0;
    for &n in degrees {
        let jac = build_jacobi(&spec, n)?;
        resolution = resolution.max(jac.resolution());
        zeros.push(jac.zeros(&[level], f64::EPSILON, None)?[0]);
    }
    Ok(FlowTrace {
        params: *params,
        level,
        degrees: degrees.to_vec(),
        zeros,
        resolution,
    })
}

/// Where the plain double recurrence first breaks down along the spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnscaledLimit {
    /// Number of leading levels whose coefficients stay representable.
    pub levels_ok: usize,
    /// 0-based level at which the plain path failed, if any.
    pub first_failure: Option<usize>,
    /// Recurrence index at which that failure happened.
    pub failure_index: Option<usize>,
}

/// Evaluate `phi_0 .. phi_{l + margin}` in plain doubles at every converged
/// eigenvalue `epsilon_l` of `spectrum` and report the first level that
/// overflows or underflows.
pub fn unscaled_limit(spectrum: &SpectrumResult, margin: usize) -> UnscaledLimit {
    for (l, &eps) in spectrum.eigenvalues.iter().enumerate() {
        if let Err(Error::Overflow { index }) = eval_phi_plain(&spectrum.params, eps, l + margin) {
            return UnscaledLimit {
                levels_ok: l,
                first_failure: Some(l),
                failure_index: Some(index),
            };
        }
    }
    UnscaledLimit {
        levels_ok: spectrum.eigenvalues.len(),
        first_failure: None,
        failure_index: None,
    }
}

/// Eigenvalues located with sign-change Sturm counts on the plain double
/// sequence. Fails with `Overflow` once the sequence leaves the double range.
pub fn eigenvalues_unscaled(params: &ModelParams, count: usize, degree: usize, tol: f64) -> Result<Vec<f64>> {
    if count == 0 || degree < count {
        return Err(Error::InvalidParameter("need 1 <= count <= degree".into()));
    }
    let k = params.kappa();
    let count_below = |x: f64| -> Result<usize> {
        let seq = eval_phi_plain(params, x * k, degree)?;
        let changes = seq.windows(2).filter(|w| (w[0] < 0.0) != (w[1] < 0.0)).count();
        Ok(degree - changes)
    };
    let jac = build_jacobi(&OpsSpec::phi(*params), degree)?;
    let (glo, ghi) = jac.bounds();
    let mut out = Vec::with_capacity(count);
    let mut lo_start = glo;
    for level in 1..=count {
        let (mut lo, mut hi) = (lo_start, ghi);
        for _ in 0..MAX_BISECTION_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= tol * mid.abs().max(1.0) || mid <= lo || mid >= hi {
                break;
            }
            if count_below(mid)? >= level {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let x = 0.5 * (lo + hi);
        out.push(x * k);
        lo_start = x;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Parity;
    use crate::opseq::coeff_lambda;

    fn params(kappa: f64, delta: f64) -> ModelParams {
        ModelParams::new(kappa, delta, Parity::Positive).unwrap()
    }

    #[test]
    fn single_zero_of_first_degree() {
        let z = zeros(&OpsSpec::phi(params(0.2, 0.4)), 1, 1..=1, 1e-15).unwrap();
        assert!((z[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn displaced_oscillator_levels_from_zeros() {
        let p = params(0.2, 0.0);
        let z = zeros(&OpsSpec::phi(p), 300, 1..=5, 1e-15).unwrap();
        for (l, x) in z.iter().enumerate() {
            assert!((x * 0.2 - (l as f64 - 0.04)).abs() < 1e-7);
        }
    }

    #[test]
    fn trace_identity_small() {
        for delta in [0.0, 0.4] {
            let r = trace_residual(&OpsSpec::phi(params(0.7, delta)), 120).unwrap();
            assert!(r < 1e-10, "{r}");
        }
    }

    #[test]
    fn norm_is_delta_independent() {
        // prod lambda_j over j = 1..n equals n!
        let mut prod = 1.0;
        for n in 1..=20 {
            prod *= coeff_lambda(n);
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            assert_eq!(prod, fact);
        }
    }

    #[test]
    fn small_spectrum_converges() {
        let r = eigenvalues(&params(0.2, 0.0), 20, 1e-12).unwrap();
        assert_eq!(r.eigenvalues.len(), 20);
        for (l, e) in r.eigenvalues.iter().enumerate() {
            assert!((e - (l as f64 - 0.04)).abs() < 1e-10, "level {l}: {e}");
        }
        assert!(r.max_residual() < 1e-12);
        assert!(r.min_gap() > 0.0);
        assert_eq!(r.tail_margin, r.degree_used - 20);
        assert!(r.degree_used <= r.final_degree);
        assert!(r.tail_residual < 1e-12);
    }

    #[test]
    fn zero_count_and_bad_tol_rejected() {
        assert!(eigenvalues(&params(0.2, 0.4), 0, 1e-12).is_err());
        assert!(eigenvalues(&params(0.2, 0.4), 5, 0.0).is_err());
    }

    #[test]
    fn tiny_ceiling_reports_non_convergence() {
        let opts = SolveOptions {
            ceiling: Some(60),
            ..Default::default()
        };
        let err = eigenvalues_with(&params(0.2, 0.4), 50, &opts).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { ceiling: 60, .. }));
    }

    #[test]
    fn flow_of_ground_state_at_strong_coupling() {
        let degrees: Vec<usize> = (10..=100).step_by(10).collect();
        let t = flow_trace(&params(2.0, 0.0), 1, &degrees).unwrap();
        let m = t.monotonicity();
        assert_eq!(m.violations, 0);
        // strict steps first; once converged the steps drop below one ulp
        assert!(m.decreasing >= 3, "{m:?}");
        let first_tie = t.zeros.windows(2).position(|w| w[1] >= w[0]).unwrap_or(9);
        assert!(t.zeros[..=first_tie].windows(2).all(|w| w[1] < w[0]));
        let last = *t.epsilons().last().unwrap();
        assert!((last + 4.0).abs() < 1e-8, "{last}");
    }

    #[test]
    fn flow_rejects_degree_below_level() {
        assert!(flow_trace(&params(1.0, 0.3), 5, &[4, 10]).is_err());
        assert!(flow_trace(&params(1.0, 0.3), 0, &[4, 10]).is_err());
    }

    #[test]
    fn unscaled_path_agrees_where_it_works() {
        let p = params(0.5, 0.3);
        let scaled = eigenvalues(&p, 10, 1e-13).unwrap();
        let plain = eigenvalues_unscaled(&p, 10, scaled.degree_used, 1e-14).unwrap();
        for (a, b) in scaled.eigenvalues.iter().zip(&plain) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }
}
