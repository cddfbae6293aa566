use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opseq::{OpsSpec, ScaledReal};

/// Bisection iteration cap; reaching it means the requested width is below
/// what double precision can resolve at that magnitude.
pub const MAX_BISECTION_ITERATIONS: usize = 200;

/// Symmetric tridiagonal matrix whose eigenvalues are the zeros of `P_N`.
///
/// Row `i` (0-based) carries `c_{i+1+alpha}`; the coupling between rows
/// `i` and `i+1` is `sqrt(lambda_{i+2+alpha})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiSpec {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
    /// `lambda` values kept exact for the Sturm recurrence.
    offdiag_sq: Vec<f64>,
    pivmin: f64,
}

pub fn build_jacobi(spec: &OpsSpec, size: usize) -> Result<JacobiSpec> {
    if size == 0 {
        return Err(Error::InvalidParameter("Jacobi matrix size must be >= 1".into()));
    }
    let diag: Vec<f64> = (1..=size).map(|n| spec.step_c(n)).collect();
    let offdiag_sq: Vec<f64> = (2..=size).map(|n| spec.step_lambda(n)).collect();
    let offdiag = offdiag_sq.iter().map(|l| l.sqrt()).collect();
    let largest = offdiag_sq.iter().copied().fold(1.0f64, f64::max);
    Ok(JacobiSpec {
        diag,
        offdiag,
        offdiag_sq,
        pivmin: f64::MIN_POSITIVE * largest,
    })
}

impl JacobiSpec {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.size();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.offdiag[i - 1] } else { 0.0 };
            let right = if i + 1 < n { self.offdiag[i] } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        let pad = 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
        (lo - pad, hi + pad)
    }

    /// Absolute accuracy floor of a bisected eigenvalue.
    pub fn resolution(&self) -> f64 {
        let (lo, hi) = self.bounds();
        16.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0)
    }

    /// Number of eigenvalues strictly below `x` (negative pivots of `J - x`).
    pub fn count_below(&self, x: f64) -> usize {
        let mut q = self.diag[0] - x;
        if q.abs() < self.pivmin {
            q = -self.pivmin;
        }
        let mut count = (q < 0.0) as usize;
        for i in 1..self.size() {
            q = (self.diag[i] - x) - self.offdiag_sq[i - 1] / q;
            if q.abs() < self.pivmin {
                q = -self.pivmin;
            }
            count += (q < 0.0) as usize;
        }
        count
    }

    /// Four independent counts in one pass; the chains interleave so the
    /// divisions overlap instead of serializing.
    pub fn count_below4(&self, x: [f64; 4]) -> [usize; 4] {
        let pivmin = self.pivmin;
        let mut q = [0.0f64; 4];
        let mut count = [0usize; 4];
        for j in 0..4 {
            q[j] = self.diag[0] - x[j];
            if q[j].abs() < pivmin {
                q[j] = -pivmin;
            }
            count[j] = (q[j] < 0.0) as usize;
        }
        for i in 1..self.size() {
            let d = self.diag[i];
            let e2 = self.offdiag_sq[i - 1];
            for j in 0..4 {
                let mut v = (d - x[j]) - e2 / q[j];
                if v.abs() < pivmin {
                    v = -pivmin;
                }
                count[j] += (v < 0.0) as usize;
                q[j] = v;
            }
        }
        count
    }

    /// Zeros with 1-based indices `levels`, each narrowed until the bracket
    /// width is below `tol * max(1, |x|)`. Optional `hints` give starting
    /// brackets per level; invalid hints are widened until they enclose.
    pub fn zeros(&self, levels: &[usize], tol: f64, hints: Option<&[(f64, f64)]>) -> Result<Vec<f64>> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be > 0, got {tol}")));
        }
        let n = self.size();
        if let Some(&bad) = levels.iter().find(|&&l| l == 0 || l > n) {
            return Err(Error::InvalidParameter(format!(
                "level {bad} outside 1..={n}"
            )));
        }
        if let Some(h) = hints {
            if h.len() != levels.len() {
                return Err(Error::InvalidParameter("one hint per level required".into()));
            }
        }
        let global = self.bounds();
        let mut out = Vec::with_capacity(levels.len());
        for (chunk_idx, chunk) in levels.chunks(4).enumerate() {
            let mut lo = [global.0; 4];
            let mut hi = [global.1; 4];
            let mut lv = [0usize; 4];
            for (j, &l) in chunk.iter().enumerate() {
                lv[j] = l;
                if let Some(h) = hints {
                    let (a, b) = h[chunk_idx * 4 + j];
                    let (a, b) = self.enclose(l, a.min(b), a.max(b), global);
                    lo[j] = a;
                    hi[j] = b;
                }
            }
            let found = self.bisect4(&lv[..chunk.len()], lo, hi, tol)?;
            out.extend_from_slice(&found[..chunk.len()]);
        }
        Ok(out)
    }

    /// All `N` zeros in increasing order.
    pub fn all_zeros(&self, tol: f64) -> Result<Vec<f64>> {
        let levels: Vec<usize> = (1..=self.size()).collect();
        self.zeros(&levels, tol, None)
    }

    /// Grow `[lo, hi]` geometrically until `count(lo) < level <= count(hi)`.
    fn enclose(&self, level: usize, lo: f64, hi: f64, global: (f64, f64)) -> (f64, f64) {
        let mut lo = lo.max(global.0);
        let mut hi = hi.min(global.1);
        if !(lo < hi) {
            return global;
        }
        let mut width = (hi - lo).max(self.resolution());
        while self.count_below(lo) >= level {
            if lo <= global.0 {
                lo = global.0;
                break;
            }
            width *= 4.0;
            lo = (lo - width).max(global.0);
        }
        let mut width = (hi - lo).max(self.resolution());
        while self.count_below(hi) < level {
            if hi >= global.1 {
                hi = global.1;
                break;
            }
            width *= 4.0;
            hi = (hi + width).min(global.1);
        }
        (lo, hi)
    }

    /// Bisect up to four levels together; each bracket must satisfy
    /// `count(lo) < level <= count(hi)` on entry.
    fn bisect4(&self, levels: &[usize], mut lo: [f64; 4], mut hi: [f64; 4], tol: f64) -> Result<[f64; 4]> {
        let active_n = levels.len();
        let mut done = [true; 4];
        let mut result = [0.0f64; 4];
        for j in 0..active_n {
            done[j] = false;
        }
        for _ in 0..MAX_BISECTION_ITERATIONS {
            let mut mid = [0.0f64; 4];
            for j in 0..4 {
                if done[j] {
                    mid[j] = result[j];
                    continue;
                }
                let m = 0.5 * (lo[j] + hi[j]);
                let width = hi[j] - lo[j];
                if width <= tol * m.abs().max(1.0) || m <= lo[j] || m >= hi[j] {
                    done[j] = true;
                    result[j] = m;
                }
                mid[j] = m;
            }
            if done.iter().all(|&d| d) {
                return Ok(result);
            }
            let counts = self.count_below4(mid);
            for j in 0..active_n {
                if done[j] {
                    continue;
                }
                if counts[j] >= levels[j] {
                    hi[j] = mid[j];
                } else {
                    lo[j] = mid[j];
                }
            }
        }
        let stalled = (0..active_n).find(|&j| !done[j]).unwrap_or(0);
        Err(Error::BisectionStalled {
            level: levels[stalled],
            iterations: MAX_BISECTION_ITERATIONS,
        })
    }

    /// Eigenvector at an (approximate) eigenvalue `x`, normalized so the
    /// largest-pivot entry is 1. Built from a forward sweep and a backward
    /// sweep joined where the twisted residual is smallest, so both the
    /// growing and the decaying flanks keep full relative accuracy.
    pub fn eigenvector(&self, x: f64) -> Vec<ScaledReal> {
        let n = self.size();
        if n == 1 {
            return vec![ScaledReal::ONE];
        }
        let mut fwd = vec![ScaledReal::ZERO; n];
        fwd[0] = ScaledReal::ONE;
        fwd[1] = fwd[0] * ((x - self.diag[0]) / self.offdiag[0]);
        for k in 1..n - 1 {
            fwd[k + 1] = (fwd[k] * (x - self.diag[k]) - fwd[k - 1] * self.offdiag[k - 1]) / self.offdiag[k];
        }
        let mut bwd = vec![ScaledReal::ZERO; n];
        bwd[n - 1] = ScaledReal::ONE;
        bwd[n - 2] = bwd[n - 1] * ((x - self.diag[n - 1]) / self.offdiag[n - 2]);
        for k in (1..n - 1).rev() {
            bwd[k - 1] = (bwd[k] * (x - self.diag[k]) - bwd[k + 1] * self.offdiag[k]) / self.offdiag[k - 1];
        }

        let mut twist = 0;
        let mut best = f64::INFINITY;
        for m in 0..n {
            if fwd[m].is_zero() || bwd[m].is_zero() {
                continue;
            }
            let mut gamma = self.diag[m] - x;
            if m > 0 {
                gamma += self.offdiag[m - 1] * fwd[m - 1].ratio(&fwd[m]);
            }
            if m + 1 < n {
                gamma += self.offdiag[m] * bwd[m + 1].ratio(&bwd[m]);
            }
            if gamma.abs() < best {
                best = gamma.abs();
                twist = m;
            }
        }

        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            v.push(if k <= twist {
                fwd[k] / fwd[twist]
            } else {
                bwd[k] / bwd[twist]
            });
        }
        v
    }

    /// Squared first component of the unit eigenvector at `x`: the Gauss
    /// weight of that node.
    pub fn first_weight(&self, x: f64) -> ScaledReal {
        let v = self.eigenvector(x);
        let norm2 = v.iter().fold(ScaledReal::ZERO, |acc, c| acc + *c * *c);
        (v[0] * v[0]) / norm2
    }
}
