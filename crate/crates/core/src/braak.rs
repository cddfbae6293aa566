//! Transcendental functions `G_pm(zeta) = sum K_n (1 -+ delta/(zeta-n)) kappa^n`
//! with `zeta = epsilon + kappa^2`, whose zeros give the regular spectrum of
//! each parity.
//!
//! `K_n` solves `(n+1) K_{n+1} = f_n K_n - K_{n-1}` upward from `K_0 = 1`,
//! `K_1 = f_0`, where `f_n = 2 kappa + (n - zeta - delta^2/(n - zeta)) / (2 kappa)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, Parity};
use crate::opseq::ScaledReal;

/// `zeta` closer than this to an integer is treated as a pole (`delta != 0`).
pub const POLE_MARGIN: f64 = 1e-8;
/// Default truncation order.
pub const DEFAULT_ORDER: usize = 500;
/// Doubling stops here.
pub const MAX_ORDER: usize = 64_000;
/// Cancellation ratio at which rounding alone moves a root by about `1e-6`.
pub const SIGNIFICANCE_LIMIT: f64 = 1e-6 / f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Weights `1 - delta/(zeta - n)`.
    Plus,
    /// Weights `1 + delta/(zeta - n)`.
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => -1.0,
            Branch::Minus => 1.0,
        }
    }

    pub fn flipped(self) -> Branch {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    /// Nominal pairing by sign only; which branch carries which parity of
    /// this Hamiltonian is settled by [`align_branches`].
    pub fn nominal(parity: Parity) -> Branch {
        match parity {
            Parity::Positive => Branch::Plus,
            Parity::Negative => Branch::Minus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BraakSeries {
    pub zeta: f64,
    /// `K_0 = 1, ..., K_N`.
    pub k: Vec<ScaledReal>,
}

impl BraakSeries {
    pub fn order(&self) -> usize {
        self.k.len() - 1
    }
}

fn check_pole(delta: f64, zeta: f64, order: usize) -> Result<()> {
    if delta == 0.0 {
        return Ok(());
    }
    let n = zeta.round();
    if n >= 0.0 && n <= order as f64 && (zeta - n).abs() < POLE_MARGIN {
        return Err(Error::PoleProximity { x: zeta });
    }
    Ok(())
}

/// `f_n(zeta)`.
pub fn f_coeff(kappa: f64, delta: f64, zeta: f64, n: usize) -> f64 {
    let d = n as f64 - zeta;
    let pole = if delta == 0.0 { 0.0 } else { delta * delta / d };
    2.0 * kappa + (d - pole) / (2.0 * kappa)
}

pub fn k_coefficients(params: &ModelParams, zeta: f64, order: usize) -> Result<BraakSeries> {
    if order < 1 {
        return Err(Error::InvalidParameter("Braak order must be >= 1".into()));
    }
    if !zeta.is_finite() {
        return Err(Error::InvalidParameter(format!("zeta = {zeta}")));
    }
    let (kappa, delta) = (params.kappa(), params.delta());
    check_pole(delta, zeta, order)?;
    let mut k = Vec::with_capacity(order + 1);
    k.push(ScaledReal::ONE);
    k.push(ScaledReal::from_f64(f_coeff(kappa, delta, zeta, 0)));
    for n in 1..order {
        let f = f_coeff(kappa, delta, zeta, n);
        let next = (k[n] * f - k[n - 1]) / (n + 1) as f64;
        k.push(next);
    }
    Ok(BraakSeries { zeta, k })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GValue {
    pub value: f64,
    /// Order actually summed.
    pub order: usize,
    /// `sum |term| / |sum term|`; digits lost to cancellation are its log10.
    pub cancellation: f64,
}

fn g_partial(params: &ModelParams, branch: Branch, series: &BraakSeries) -> (ScaledReal, ScaledReal, ScaledReal) {
    let (kappa, delta) = (params.kappa(), params.delta());
    let s = branch.sign();
    let mut sum = ScaledReal::ZERO;
    let mut abs_sum = ScaledReal::ZERO;
    let mut last = ScaledReal::ZERO;
    let mut power = ScaledReal::ONE;
    for (n, kn) in series.k.iter().enumerate() {
        let w = if delta == 0.0 { 1.0 } else { 1.0 + s * delta / (series.zeta - n as f64) };
        last = *kn * power * w;
        sum = sum + last;
        abs_sum = abs_sum + last.abs();
        power = power * kappa;
    }
    (sum, abs_sum, last)
}

/// `G` on one branch, doubling the order from `order` until the last term is
/// below `1e-16` of the partial sum, or of its rounding floor
/// `eps * sum |term|` when the sum has cancelled (at a root).
pub fn g_branch(params: &ModelParams, branch: Branch, zeta: f64, order: usize) -> Result<GValue> {
    let mut n = order.max(1);
    loop {
        let series = k_coefficients(params, zeta, n)?;
        let (sum, abs_sum, last) = g_partial(params, branch, &series);
        let floor = abs_sum * f64::EPSILON;
        let small = last.is_zero() || last.abs() <= sum.abs() * 1e-16 || last.abs() <= floor * 1e-16;
        if small {
            let value = sum.to_f64();
            return Ok(GValue {
                value,
                order: n,
                cancellation: if sum.is_zero() { f64::INFINITY } else { abs_sum.ratio(&sum.abs()) },
            });
        }
        if n >= MAX_ORDER {
            return Err(Error::SeriesNotConverged { order: n });
        }
        n = (2 * n).min(MAX_ORDER);
    }
}

/// `G` on the nominal branch of `params.parity()`.
pub fn g_eval(params: &ModelParams, zeta: f64, order: usize) -> Result<GValue> {
    g_branch(params, Branch::nominal(params.parity()), zeta, order)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BraakScan {
    pub branch: Branch,
    /// Sorted zeros in `zeta`.
    pub roots: Vec<f64>,
    /// Integers where `|G|` does not grow toward the pole, so a root may sit
    /// inside the margin; at `delta = 0` every integer in range.
    pub flagged_integers: Vec<i64>,
    /// Largest order summed, and largest cancellation ratio at a cell
    /// midpoint (next to a root the ratio diverges by definition).
    pub max_order: usize,
    pub max_cancellation: f64,
    /// Start of the first unit cell where cancellation exceeds
    /// [`SIGNIFICANCE_LIMIT`]; the scan stops there and keeps no roots from it.
    pub lost_significance_at: Option<f64>,
}

/// Zeros of one branch in `zeta_range`.
pub fn braak_branch_roots(params: &ModelParams, branch: Branch, zeta_range: (f64, f64), order: usize) -> Result<BraakScan> {
    let (lo, hi) = zeta_range;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!("bad range [{lo}, {hi}]")));
    }
    let mut scan = BraakScan {
        branch,
        roots: Vec::new(),
        flagged_integers: Vec::new(),
        max_order: 0,
        max_cancellation: 0.0,
        lost_significance_at: None,
    };
    if hi <= lo {
        return Ok(scan);
    }
    if params.delta() == 0.0 {
        // G is pole-free and zero-free here; the spectrum is the integers,
        // the limit of the zeros as delta -> 0
        let first = lo.ceil().max(0.0) as i64;
        scan.flagged_integers = (first..).take_while(|&n| (n as f64) <= hi).collect();
        return Ok(scan);
    }
    let mut edges = vec![lo];
    let mut b = lo.floor() + 1.0;
    while b < hi {
        edges.push(b);
        b += 1.0;
    }
    edges.push(hi);

    let eval = |z: f64, scan: &mut BraakScan| -> Result<f64> {
        let g = g_branch(params, branch, z, order)?;
        scan.max_order = scan.max_order.max(g.order);
        Ok(g.value)
    };
    let cancellation = |z: f64| -> Result<f64> { Ok(g_branch(params, branch, z, order)?.cancellation) };

    for cell in edges.windows(2) {
        let (a, b) = (cell[0], cell[1]);
        let is_pole = |z: f64| z >= 0.0 && z.fract() == 0.0;
        let mut xs = Vec::new();
        for i in 0..=64 {
            xs.push(a + (b - a) * i as f64 / 64.0);
        }
        // geometric clustering toward pole edges
        let mut d = POLE_MARGIN * 2.0;
        while d < 0.25 * (b - a) {
            if is_pole(a) {
                xs.push(a + d);
            }
            if is_pole(b) {
                xs.push(b - d);
            }
            d *= 4.0;
        }
        xs.retain(|&z| !(z > -0.5 && (z - z.round()).abs() < 2.0 * POLE_MARGIN));
        if is_pole(a) {
            xs.push(a + 2.0 * POLE_MARGIN);
        }
        if is_pole(b) {
            xs.push(b - 2.0 * POLE_MARGIN);
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();

        // cancellation peaks mid-cell, away from the poles
        let c = cancellation(0.5 * (a + b))?;
        scan.max_cancellation = scan.max_cancellation.max(c);
        if c > SIGNIFICANCE_LIMIT {
            scan.lost_significance_at = Some(a);
            break;
        }
        let mut vals = Vec::with_capacity(xs.len());
        for &z in &xs {
            vals.push(eval(z, &mut scan)?);
        }
        for i in 0..xs.len().saturating_sub(1) {
            let (va, vb) = (vals[i], vals[i + 1]);
            if va == 0.0 {
                scan.roots.push(xs[i]);
                continue;
            }
            if va.signum() != vb.signum() && vb != 0.0 {
                let (mut p, mut q, mut fp) = (xs[i], xs[i + 1], va);
                loop {
                    let m = 0.5 * (p + q);
                    if m <= p || m >= q {
                        break;
                    }
                    let fm = eval(m, &mut scan)?;
                    if fm == 0.0 {
                        p = m;
                        q = m;
                        break;
                    }
                    if fm.signum() == fp.signum() {
                        p = m;
                        fp = fm;
                    } else {
                        q = m;
                    }
                }
                scan.roots.push(0.5 * (p + q));
            }
        }
        if is_pole(b) {
            // |G| must keep growing toward the pole
            let near = vals[vals.len() - 1].abs();
            let far = eval(b - 8.0 * POLE_MARGIN, &mut scan)?.abs();
            if near <= far {
                scan.flagged_integers.push(b as i64);
            }
        }
    }
    scan.roots.sort_by(f64::total_cmp);
    scan.roots.dedup();
    Ok(scan)
}

/// Zeros of the nominal branch of `params.parity()`.
pub fn braak_roots(params: &ModelParams, zeta_range: (f64, f64), order: usize) -> Result<Vec<f64>> {
    Ok(braak_branch_roots(params, Branch::nominal(params.parity()), zeta_range, order)?.roots)
}

/// Which branch reproduces the positive-parity spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchAlignment {
    pub positive: Branch,
    pub negative: Branch,
    /// Distance from the lowest root of `positive` to `epsilon_0 + kappa^2`.
    pub ground_mismatch: f64,
}

impl BranchAlignment {
    pub fn branch(&self, parity: Parity) -> Branch {
        match parity {
            Parity::Positive => self.positive,
            Parity::Negative => self.negative,
        }
    }
}

/// Match the lowest zero of each branch against the positive-parity ground
/// state `epsilon_0` (in epsilon units).
pub fn align_branches(params: &ModelParams, positive_ground: f64) -> Result<BranchAlignment> {
    let k2 = params.kappa() * params.kappa();
    let target = positive_ground + k2;
    let range = (target - 1.5, target + 0.75);
    let mut best: Option<(Branch, f64)> = None;
    for branch in [Branch::Plus, Branch::Minus] {
        let scan = braak_branch_roots(params, branch, range, DEFAULT_ORDER)?;
        let d = scan
            .roots
            .iter()
            .map(|r| (r - target).abs())
            .fold(f64::INFINITY, f64::min);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((branch, d));
        }
    }
    let (positive, ground_mismatch) = best.expect("two branches scanned");
    Ok(BranchAlignment {
        positive,
        negative: positive.flipped(),
        ground_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::eigenvalues;

    fn params(kappa: f64, delta: f64) -> ModelParams {
        ModelParams::new(kappa, delta, Parity::Positive).unwrap()
    }

    #[test]
    fn first_coefficients() {
        let (k, d, z) = (0.2, 0.4, 1.37);
        let s = k_coefficients(&params(k, d), z, 3).unwrap();
        let k1 = 2.0 * k - (z - d * d / z) / (2.0 * k);
        assert!((s.k[1].to_f64() - k1).abs() < 1e-14);
        let f1 = f_coeff(k, d, z, 1);
        assert!((s.k[2].to_f64() - (f1 * k1 - 1.0) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn pole_rejected() {
        let p = params(0.2, 0.4);
        assert!(matches!(k_coefficients(&p, 3.0 + 1e-9, 10), Err(Error::PoleProximity { .. })));
        assert!(k_coefficients(&p, 3.5, 10).is_ok());
        assert!(k_coefficients(&params(0.2, 0.0), 3.0, 10).is_ok());
    }

    #[test]
    fn displaced_oscillator_series_converges() {
        let p = params(0.3, 0.0);
        let s = k_coefficients(&p, -0.09, 80).unwrap();
        let terms: Vec<f64> = s.k.iter().enumerate().map(|(n, k)| (k.to_f64() * 0.3f64.powi(n as i32)).abs()).collect();
        assert!(terms[79] < 1e-20 * terms[..5].iter().cloned().fold(0.0, f64::max));
    }

    #[test]
    fn finite_between_poles_and_stable_in_order() {
        let p = params(0.2, 0.4);
        for n in 0..10 {
            let z = n as f64 + 0.5;
            let a = g_eval(&p, z, 500).unwrap();
            let b = g_eval(&p, z, 1000).unwrap();
            assert!(a.value.is_finite());
            assert!((a.value - b.value).abs() <= 1e-12 * a.value.abs().max(1e-300));
        }
    }

    #[test]
    fn grows_toward_poles() {
        let p = params(0.2, 0.4);
        for branch in [Branch::Plus, Branch::Minus] {
            for n in [1.0, 4.0] {
                for side in [-1.0, 1.0] {
                    let mut prev = 0.0;
                    for e in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7] {
                        let g = g_branch(&p, branch, n + side * e, 500).unwrap().value.abs();
                        assert!(g > prev, "{branch:?} n={n} side={side} e={e}");
                        prev = g;
                    }
                }
            }
        }
    }

    #[test]
    fn zeros_approach_integers_as_delta_vanishes() {
        let p = params(0.2, 0.0);
        let scan = braak_branch_roots(&p, Branch::Plus, (-0.5, 8.4), 500).unwrap();
        assert!(scan.roots.is_empty());
        assert_eq!(scan.flagged_integers, (0..=8).collect::<Vec<i64>>());
        let mut prev = f64::INFINITY;
        for delta in [1e-2, 1e-3] {
            let p = params(0.2, delta);
            let mut worst: f64 = 0.0;
            for branch in [Branch::Plus, Branch::Minus] {
                let roots = braak_branch_roots(&p, branch, (-0.5, 6.5), 500).unwrap().roots;
                for r in &roots {
                    worst = worst.max((r - r.round()).abs());
                }
            }
            assert!(worst < prev && worst < 10.0 * delta, "delta={delta}: {worst}");
            prev = worst;
        }
    }

    #[test]
    fn matches_spectrum_after_alignment() {
        let p = params(0.2, 0.4);
        let plus = eigenvalues(&p, 10, 1e-13).unwrap().eigenvalues;
        let minus = eigenvalues(&p.with_parity(Parity::Negative), 10, 1e-13).unwrap().eigenvalues;
        let al = align_branches(&p, plus[0]).unwrap();
        assert!(al.ground_mismatch < 1e-8);
        for (parity, spec) in [(Parity::Positive, &plus), (Parity::Negative, &minus)] {
            let top = spec[9] + 0.04 + 0.01;
            let scan = braak_branch_roots(&p, al.branch(parity), (spec[0] + 0.04 - 0.5, top), 500).unwrap();
            assert_eq!(scan.roots.len(), 10, "{parity:?} {:?}", scan.roots);
            for (r, e) in scan.roots.iter().zip(spec.iter()) {
                assert!((r - (e + 0.04)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn scan_stops_where_cancellation_eats_the_digits() {
        let p = params(0.2, 0.4);
        let spec = eigenvalues(&p, 30, 1e-13).unwrap().eigenvalues;
        let scan = braak_branch_roots(&p, Branch::Plus, (-1.0, 40.0), 500).unwrap();
        let stop = scan.lost_significance_at.unwrap();
        assert!(stop > 15.0 && stop < 30.0, "{stop}");
        assert!(scan.max_cancellation > SIGNIFICANCE_LIMIT);
        for (r, e) in scan.roots.iter().zip(&spec) {
            assert!((r - e - 0.04).abs() < 1e-6);
        }
        assert_eq!(scan.roots.len(), spec.iter().filter(|e| *e + 0.04 < stop).count());
    }

    #[test]
    fn empty_range() {
        let scan = braak_branch_roots(&params(0.2, 0.4), Branch::Plus, (2.0, 2.0), 500).unwrap();
        assert!(scan.roots.is_empty());
    }
}
