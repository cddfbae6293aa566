//! Continued-fraction quantization: `F(x) = 0` with
//!
//! ```text
//! F(x) = a_0 - b_1/(a_1 - b_2/(a_2 - ...)),
//! a_n = (c_n - x)/(n+1),  b_n = 1/(n+1).
//! ```
//!
//! The depth-`n` convergent of the tail is `P^(1)_{n-1}(x) / P^(0)_n(x)`, so
//! `F_n` has poles at the zeros of `P^(0)_n` and zeros at those of
//! `P^(-1)_{n+1}`. Past the first few levels each zero sits so close to the
//! pole below it that double precision cannot tell them apart.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::opseq::{coeff_c, coeff_lambda, eval_sequence, eval_with_derivative, Family, OpsSpec, ScaledReal};
use crate::spectrum::{build_jacobi, JacobiSpec};

fn family(params: &ModelParams, family: Family) -> OpsSpec {
    OpsSpec {
        params: *params,
        family,
    }
}

/// `a_n = (c_n - x) / (n + 1)`.
pub fn coeff_a(params: &ModelParams, x: f64, n: usize) -> f64 {
    (coeff_c(params, n) - x) / (n + 1) as f64
}

/// `b_n = 1 / (n + 1)`.
pub fn coeff_b(n: usize) -> f64 {
    1.0 / (n + 1) as f64
}

/// Depth-`n` convergent of the tail, `A_n / B_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuedFractionState {
    pub depth: usize,
    /// `P^(1)_{n-1}(x)`.
    pub numerator: ScaledReal,
    /// `P^(0)_n(x)`.
    pub denominator: ScaledReal,
    /// Depths `n - 1` and `n` agree to `1e-14` relative.
    pub converged: bool,
}

impl ContinuedFractionState {
    pub fn value(&self) -> f64 {
        self.numerator.ratio(&self.denominator)
    }
}

pub fn convergent(params: &ModelParams, x: f64, depth: usize) -> Result<ContinuedFractionState> {
    if depth < 2 {
        return Err(Error::InvalidParameter("continued fraction depth must be >= 2".into()));
    }
    let num = eval_sequence(&family(params, Family::Numerator), x, depth - 1);
    let den = eval_sequence(&family(params, Family::Denominator), x, depth);
    let (a, b) = (num[depth - 1], den[depth]);
    let (a_prev, b_prev) = (num[depth - 2], den[depth - 1]);
    let now = a.ratio(&b);
    let before = a_prev.ratio(&b_prev);
    let converged = now.is_finite() && (now - before).abs() <= 1e-14 * now.abs().max(f64::MIN_POSITIVE);
    Ok(ContinuedFractionState {
        depth,
        numerator: a,
        denominator: b,
        converged,
    })
}

/// `(A_n, B_n)` from the Wallis recurrences
/// `A_k = a_k A_{k-1} - b_k A_{k-2}`, `A_0 = 0`, `A_{-1} = 1`, and likewise
/// for `B` with `B_0 = 1`, `B_{-1} = 0`.
pub fn wallis(params: &ModelParams, x: f64, depth: usize) -> (ScaledReal, ScaledReal) {
    let (mut a_prev, mut a) = (ScaledReal::ONE, ScaledReal::ZERO);
    let (mut b_prev, mut b) = (ScaledReal::ZERO, ScaledReal::ONE);
    for k in 1..=depth {
        let ak = coeff_a(params, x, k);
        let bk = coeff_b(k);
        let a_next = a * ak - a_prev * bk;
        let b_next = b * ak - b_prev * bk;
        a_prev = a;
        a = a_next;
        b_prev = b;
        b = b_next;
    }
    (a, b)
}

/// `F_depth(x)` with `x = epsilon / kappa`.
pub fn f_eval(params: &ModelParams, epsilon: f64, depth: usize) -> Result<f64> {
    let x = epsilon / params.kappa();
    f_eval_x(params, x, depth)
}

fn f_eval_x(params: &ModelParams, x: f64, depth: usize) -> Result<f64> {
    let state = convergent(params, x, depth)?;
    let r = state.value();
    if !r.is_finite() || r.abs() * f64::EPSILON > x.abs().max(1.0) {
        return Err(Error::PoleProximity { x });
    }
    Ok(coeff_c(params, 0) - x + r)
}

/// `q^(a)_n(x) = lambda_{n+a} / ((x - c_{n+a})(x - c_{n+a+1}))`.
pub fn q_sequence(params: &ModelParams, alpha: i64, n: usize, x: f64) -> f64 {
    let m = (n as i64 + alpha) as usize;
    coeff_lambda(m) / ((x - coeff_c(params, m)) * (x - coeff_c(params, m + 1)))
}

/// `P^(1)_{n-1}(x) / P^(0)_n(x) = sum_l M_l / (x - p_l)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfdWeights {
    pub poles: Vec<f64>,
    pub weights: Vec<ScaledReal>,
}

impl PfdWeights {
    pub fn sum(&self) -> f64 {
        self.weights.iter().fold(ScaledReal::ZERO, |acc, w| acc + *w).to_f64()
    }

    pub fn all_positive(&self) -> bool {
        self.weights.iter().all(|w| w.signum() > 0)
    }

    /// `sum_l M_l / (x - p_l)`.
    pub fn eval(&self, x: f64) -> f64 {
        self.poles
            .iter()
            .zip(&self.weights)
            .fold(ScaledReal::ZERO, |acc, (p, w)| acc + *w / (x - p))
            .to_f64()
    }
}

fn poles(params: &ModelParams, n: usize) -> Result<(JacobiSpec, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidParameter("PFD needs n >= 1".into()));
    }
    let jac = build_jacobi(&family(params, Family::Denominator), n)?;
    let zeros = jac.all_zeros(f64::EPSILON)?;
    Ok((jac, zeros))
}

/// Weights `M_l` as squared first components of the unit eigenvectors of the
/// `alpha = 0` Jacobi matrix. Positive by construction, and the eigenvector
/// sweep keeps full relative accuracy however small a weight gets.
pub fn pfd(params: &ModelParams, n: usize) -> Result<PfdWeights> {
    let (jac, zeros) = poles(params, n)?;
    let weights = zeros.iter().map(|&p| jac.first_weight(p)).collect();
    Ok(PfdWeights { poles: zeros, weights })
}

/// The same weights as the residues `P^(1)_{n-1}(p_l) / P^(0)_n'(p_l)`.
///
/// Each numerator zero sits just below a pole, closer than the error in the
/// computed pole once the pair has coagulated, so the small residues lose
/// their leading digits and eventually their sign. Kept as a cross-check.
pub fn pfd_residues(params: &ModelParams, n: usize) -> Result<PfdWeights> {
    let (_, zeros) = poles(params, n)?;
    let num = family(params, Family::Numerator);
    let den = family(params, Family::Denominator);
    let weights = zeros
        .iter()
        .map(|&p| {
            let a = eval_sequence(&num, p, n - 1)[n - 1];
            let (_, d) = eval_with_derivative(&den, p, n);
            a / d
        })
        .collect();
    Ok(PfdWeights { poles: zeros, weights })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootStatus {
    Resolved,
    /// The root cannot be separated from the pole below it.
    InvisiblePole,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchweberRoot {
    /// 0-based level: the gap above the `level`-th pole (the first gap lies
    /// below every pole).
    pub level: usize,
    pub status: RootStatus,
    /// Root in epsilon units; `NaN` when invisible.
    pub epsilon: f64,
    /// Distance from the root to the pole below it, in `x` units.
    pub pole_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchweberScan {
    pub depth: usize,
    pub roots: Vec<SchweberRoot>,
}

impl SchweberScan {
    /// First level reported invisible, if any.
    pub fn first_failure(&self) -> Option<usize> {
        self.roots.iter().find(|r| r.status == RootStatus::InvisiblePole).map(|r| r.level)
    }
}

/// Ulp-scale floor below which a root and its pole are indistinguishable.
fn separation_floor(x: f64) -> f64 {
    64.0 * f64::EPSILON * x.abs().max(1.0)
}

/// Scan every pole gap that starts inside `epsilon_range` for the sign change
/// of `F_depth`. Gaps whose root cannot be resolved are reported, not skipped.
pub fn schweber_roots(params: &ModelParams, epsilon_range: (f64, f64), depth: usize) -> Result<SchweberScan> {
    let (lo, hi) = epsilon_range;
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::InvalidParameter(format!("bad range [{lo}, {hi}]")));
    }
    if depth < 2 {
        return Err(Error::InvalidParameter("depth must be >= 2".into()));
    }
    let k = params.kappa();
    let (xlo, xhi) = (lo / k, hi / k);
    let jac = build_jacobi(&family(params, Family::Denominator), depth)?;
    let (glo, ghi) = jac.bounds();
    // poles p_1 < ... < p_depth; gap l is (p_l, p_{l+1}) with p_0 = -inf
    let first = jac.count_below(xlo);
    let last = jac.count_below(xhi).min(depth);
    let need: Vec<usize> = (first.max(1)..=(last + 1).min(depth)).collect();
    let found = if need.is_empty() { Vec::new() } else { jac.zeros(&need, f64::EPSILON, None)? };
    let pole = |idx: usize| -> f64 {
        // idx is 1-based; 0 and depth+1 stand for the outer limits
        if idx == 0 {
            glo.min(xlo) - 1.0 - (coeff_c(params, 0) - glo).abs()
        } else if idx > depth {
            ghi.max(xhi) + 1.0
        } else {
            found[idx - need[0]]
        }
    };

    let mut roots = Vec::new();
    for level in first..=last {
        let left = pole(level);
        let right = pole(level + 1);
        let root = gap_root(params, depth, left, right, level == 0)?;
        match root {
            Some(x) if x - left > separation_floor(left) || level == 0 => {
                roots.push(SchweberRoot {
                    level,
                    status: RootStatus::Resolved,
                    epsilon: x * k,
                    pole_gap: if level == 0 { f64::INFINITY } else { x - left },
                });
            }
            _ => roots.push(SchweberRoot {
                level,
                status: RootStatus::InvisiblePole,
                epsilon: f64::NAN,
                pole_gap: 0.0,
            }),
        }
    }
    // keep only roots whose value lands inside the requested range
    roots.retain(|r| r.status == RootStatus::InvisiblePole || (r.epsilon >= lo && r.epsilon <= hi));
    Ok(SchweberScan { depth, roots })
}

/// Sign-change root of `F` inside one pole gap, or `None` if `F` shows no
/// `+ -> -` transition there.
fn gap_root(params: &ModelParams, depth: usize, left: f64, right: f64, open_left: bool) -> Result<Option<f64>> {
    let sign = |x: f64| -> Option<bool> {
        match f_eval_x(params, x, depth) {
            Ok(v) => Some(v > 0.0),
            Err(_) => None,
        }
    };
    // samples hugging both poles, then 8 interior points
    let mut xs = Vec::with_capacity(12);
    if !open_left {
        let mut off = separation_floor(left);
        for _ in 0..2 {
            xs.push(left + off);
            off *= 1024.0;
        }
    }
    for i in 1..=8 {
        xs.push(left + (right - left) * i as f64 / 9.0);
    }
    let mut off = separation_floor(right);
    let mut tail = Vec::new();
    for _ in 0..2 {
        tail.push(right - off);
        off *= 1024.0;
    }
    xs.extend(tail.into_iter().rev());
    xs.retain(|&x| x > left && x < right);
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let signs: Vec<Option<bool>> = xs.iter().map(|&x| sign(x)).collect();
    for i in 0..xs.len().saturating_sub(1) {
        if signs[i] == Some(true) && signs[i + 1] == Some(false) {
            let (mut a, mut b) = (xs[i], xs[i + 1]);
            loop {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                match sign(m) {
                    Some(true) => a = m,
                    Some(false) => b = m,
                    None => break,
                }
            }
            return Ok(Some(0.5 * (a + b)));
        }
    }
    Ok(None)
}

/// Separation of `x^(0)_{n,l}` from its neighbours in the two associated
/// families (`x` units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoagulationRow {
    /// 1-based level of the `alpha = 0` zero.
    pub level: usize,
    pub pole: f64,
    /// `x^(0)_{n,l} - x^(1)_{n-1,l-1}`; `NaN` for `l = 1`.
    pub gap_lower: f64,
    /// `x^(-1)_{n+1,l+1} - x^(0)_{n,l}`.
    pub gap_upper: f64,
    /// Both gaps as `log10`, meaningful below the double range too.
    pub log10_gap_lower: f64,
    pub log10_gap_upper: f64,
}

/// Gaps from the secular equation `F_n(x) = 0` and from the zero of the
/// numerator next to each pole, so a gap far below one ulp of `x` is still
/// resolved and strictly positive.
pub fn coagulation_report(params: &ModelParams, n: usize, levels: &[usize]) -> Result<Vec<CoagulationRow>> {
    if n < 2 {
        return Err(Error::InvalidParameter("coagulation needs n >= 2".into()));
    }
    if let Some(&bad) = levels.iter().find(|&&l| l == 0 || l >= n) {
        return Err(Error::InvalidParameter(format!("level {bad} outside 1..{n}")));
    }
    let pfd = pfd(params, n)?;
    let c0 = coeff_c(params, 0);
    let mut rows = Vec::with_capacity(levels.len());
    for &level in levels {
        let i = level - 1;
        let upper = secular_gap(&pfd, i, c0, Side::Upper);
        let lower = if level == 1 { None } else { Some(secular_gap(&pfd, i, c0, Side::Lower)) };
        rows.push(CoagulationRow {
            level,
            pole: pfd.poles[i],
            gap_lower: lower.map_or(f64::NAN, |g| g.to_f64()),
            gap_upper: upper.to_f64(),
            log10_gap_lower: lower.map_or(f64::NAN, |g| g.log10_abs()),
            log10_gap_upper: upper.log10_abs(),
        });
    }
    Ok(rows)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    /// Zero of `F_n` just above pole `i`.
    Upper,
    /// Zero of the numerator just below pole `i`.
    Lower,
}

/// Solve for `t > 0` in
/// * upper: `M_i / t = p_i + t - c_0 - sum_{k != i} M_k / (p_i + t - p_k)`,
/// * lower: `M_i / t = sum_{k != i} M_k / (p_i - t - p_k)`.
///
/// The left side falls and the right side rises in `t`, so the root is
/// unique; tiny roots come straight from `M_i / rhs(0)`.
fn secular_gap(pfd: &PfdWeights, i: usize, c0: f64, side: Side) -> ScaledReal {
    let p = &pfd.poles;
    let m = &pfd.weights;
    let n = p.len();
    let rhs = |t: f64| -> f64 {
        let x = match side {
            Side::Upper => p[i] + t,
            Side::Lower => p[i] - t,
        };
        let mut s = ScaledReal::ZERO;
        for k in 0..n {
            if k != i {
                s = s + m[k] / (x - p[k]);
            }
        }
        match side {
            Side::Upper => x - c0 - s.to_f64(),
            Side::Lower => s.to_f64(),
        }
    };
    let width = match side {
        Side::Upper => {
            if i + 1 < n {
                p[i + 1] - p[i]
            } else {
                f64::INFINITY
            }
        }
        Side::Lower => p[i] - p[i - 1],
    };
    let r0 = rhs(0.0);
    if r0 > 0.0 {
        let t0 = m[i] / r0;
        let t0f = t0.to_f64();
        if t0f < 1e-6 * width.min(1.0) {
            // rhs is flat on this scale; one correction settles it
            let r1 = rhs(t0f);
            return if r1 > 0.0 { m[i] / r1 } else { t0 };
        }
    }
    // otherwise bracket in (0, width) and bisect geometrically
    let g = |t: f64| m[i].to_f64() / t - rhs(t);
    let mut a = f64::MIN_POSITIVE.max(1e-300);
    let mut b = if width.is_finite() { width * (1.0 - 1e-12) } else { 1.0 };
    if !width.is_finite() {
        while g(b) > 0.0 {
            b *= 2.0;
        }
    }
    for _ in 0..400 {
        let mid = if b / a > 4.0 { (a * b).sqrt() } else { 0.5 * (a + b) };
        if mid <= a || mid >= b {
            break;
        }
        if g(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    ScaledReal::from_f64(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Parity;
    use crate::opseq::eval_sequence;
    use crate::spectrum::eigenvalues;

    fn params(kappa: f64, delta: f64) -> ModelParams {
        ModelParams::new(kappa, delta, Parity::Positive).unwrap()
    }

    #[test]
    fn single_weight_is_one() {
        let w = pfd(&params(0.2, 0.4), 1).unwrap();
        assert_eq!(w.weights.len(), 1);
        assert!((w.sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_one_and_reconstruct_the_ratio() {
        let p = params(0.2, 0.4);
        let w = pfd(&p, 10).unwrap();
        assert!(w.all_positive());
        assert!((w.sum() - 1.0).abs() < 1e-12);
        // residues agree while the weights are not yet tiny
        let r = pfd_residues(&p, 10).unwrap();
        for (a, b) in w.weights.iter().zip(&r.weights).take(5) {
            assert!((a.ratio(b) - 1.0).abs() < 1e-9);
        }
        // 60-digit reference for the smallest weight
        let want = 3.349_052_560_814_91e-19;
        assert!((w.weights[9].to_f64() / want - 1.0).abs() < 1e-9);
        let num = OpsSpec { params: p, family: Family::Numerator };
        let den = OpsSpec { params: p, family: Family::Denominator };
        for i in 0..20 {
            let x = -3.0 + 1.37 * i as f64 + 0.011;
            let direct = eval_sequence(&num, x, 9)[9].ratio(&eval_sequence(&den, x, 10)[10]);
            let rebuilt = w.eval(x);
            assert!((direct - rebuilt).abs() <= 1e-9 * direct.abs().max(1e-300), "x={x}");
        }
    }

    #[test]
    fn wallis_matches_polynomial_ratio() {
        let p = params(0.3, 0.25);
        for depth in [1, 2, 5, 40, 200] {
            for x in [-1.7, 0.3, 4.4, 12.9] {
                let (a, b) = wallis(&p, x, depth);
                let st = convergent(&p, x, depth.max(2)).unwrap();
                if depth >= 2 {
                    let rel = (a.ratio(&b) / st.value() - 1.0).abs();
                    assert!(rel < 1e-10, "depth={depth} x={x} rel={rel}");
                } else {
                    assert!((a.ratio(&b) - 1.0 / (x - coeff_c(&p, 1))).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn q_sequence_independent_of_alpha() {
        let p = params(0.2, 0.4);
        for n in 1..30 {
            let x = 7.3;
            let q0 = q_sequence(&p, 0, n, x);
            for alpha in [-1i64, 1] {
                let shifted = (n as i64 - alpha) as usize;
                let q = q_sequence(&p, alpha, shifted, x);
                assert!((q - q0).abs() <= 1e-12 * q0.abs());
            }
            let eps = x * 0.2;
            let d = p.spin_shift(n);
            let closed = 0.04 * n as f64 / ((n as f64 - eps + d) * (n as f64 + 1.0 - eps - d));
            assert!((q0 - closed).abs() <= 1e-12 * closed.abs());
        }
    }

    #[test]
    fn f_changes_sign_across_levels_and_decreases() {
        let p = params(0.2, 0.4);
        let spec = eigenvalues(&p, 5, 1e-13).unwrap();
        // level 4 sits 1.3e-7 above its pole, so the bracket must be narrower
        for &e in &spec.eigenvalues {
            let h = 1e-9;
            let a = f_eval(&p, e - h, 200).unwrap();
            let b = f_eval(&p, e + h, 200).unwrap();
            assert!(a > 0.0 && b < 0.0, "{e}: {a} {b}");
        }
        let w = pfd(&p, 50).unwrap();
        for gap in w.poles.windows(2).take(3) {
            let (l, r) = (gap[0], gap[1]);
            for t in [0.25, 0.5, 0.75] {
                let x = l + t * (r - l);
                let h = 1e-6 * (r - l);
                let d = (f_eval_x(&p, x + h, 50).unwrap() - f_eval_x(&p, x - h, 50).unwrap()) / (2.0 * h);
                assert!(d < 0.0);
            }
        }
    }

    #[test]
    fn large_pfd_stays_normalized() {
        let w = pfd(&params(0.2, 0.4), 500).unwrap();
        assert!(w.all_positive());
        assert!((w.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn f_stable_under_depth_doubling() {
        let p = params(0.2, 0.4);
        let a = f_eval(&p, 2.5, 500).unwrap();
        let b = f_eval(&p, 2.5, 1000).unwrap();
        assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
        assert!(convergent(&p, 2.5 / 0.2, 500).unwrap().converged);
    }

    #[test]
    fn first_roots_match_spectrum() {
        let p = params(0.2, 0.4);
        let spec = eigenvalues(&p, 10, 1e-13).unwrap();
        let scan = schweber_roots(&p, (-1.0, 3.5), 200).unwrap();
        let resolved: Vec<_> = scan.roots.iter().filter(|r| r.status == RootStatus::Resolved).collect();
        assert!(resolved.len() >= 3);
        for r in resolved {
            assert!((r.epsilon - spec.eigenvalues[r.level]).abs() < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn displaced_oscillator_roots() {
        let p = params(0.2, 0.0);
        let scan = schweber_roots(&p, (-1.0, 14.0), 200).unwrap();
        let onset = scan.first_failure().unwrap();
        assert!(onset > 4 && onset < 30);
        for r in scan.roots.iter().filter(|r| r.status == RootStatus::Resolved) {
            assert!((r.epsilon - (r.level as f64 - 0.04)).abs() < 1e-6);
        }
        // zeros of B_n approach the excited levels, not the ground state
        let den = OpsSpec { params: p, family: Family::Denominator };
        let z = crate::spectrum::zeros(&den, 100, 1..=6, 1e-15).unwrap();
        for (i, x) in z.iter().enumerate() {
            let l = (i + 1) as f64;
            let err = (0.2 * x - (l - 0.04)).abs();
            assert!(err < 0.04, "l={l} err={err}");
            if i > 0 {
                assert!(err < (0.2 * z[i - 1] - (l - 1.04)).abs());
            }
        }
    }

    #[test]
    fn coagulation_matches_extended_precision() {
        // 80-digit zeros of P^(1)_59, P^(0)_60 and P^(-1)_61
        let want = [
            (2, 0.146_36, 2.1005e-3),
            (4, 1.9547e-4, 6.2972e-7),
            (6, 4.9216e-8, 6.5669e-11),
            (9, 8.4374e-14, 4.6752e-17),
            (11, 1.7394e-18, 6.2663e-22),
        ];
        let levels: Vec<usize> = want.iter().map(|w| w.0).collect();
        let rows = coagulation_report(&params(0.2, 0.4), 60, &levels).unwrap();
        for (r, (l, lo, up)) in rows.iter().zip(want) {
            assert_eq!(r.level, l);
            assert!((r.gap_lower / lo - 1.0).abs() < 1e-3, "{r:?}");
            assert!((r.gap_upper / up - 1.0).abs() < 1e-3, "{r:?}");
        }
    }

    #[test]
    fn coagulation_gaps_positive() {
        let p = params(0.2, 0.4);
        let rows = coagulation_report(&p, 60, &[1, 2, 3, 4, 8]).unwrap();
        for r in &rows {
            assert!(r.gap_upper > 0.0 || r.log10_gap_upper.is_finite());
            if r.level > 1 {
                assert!(r.gap_lower > 0.0 || r.log10_gap_lower.is_finite());
            }
        }
        assert!(rows[0].gap_lower.is_nan());
    }
}
