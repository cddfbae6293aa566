//! Exact rational arithmetic as an independent oracle for the floating-point
//! recurrences, zero counts and sub-ulp zero separations.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rabi_core::opseq::{eval_phi, sturm_count, Family};
use rabi_core::schweber::coagulation_report;
use rabi_core::spectrum::build_jacobi;
use rabi_core::{ModelParams, OpsSpec, Parity};

fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Model with kappa = 1/k_inv and delta = d_num/d_den given exactly.
struct Exact {
    k_inv: i64,
    delta: BigRational,
    sign: i64,
}

impl Exact {
    /// `c_n = (n + s (-1)^n delta) / kappa`
    fn c(&self, n: i64) -> BigRational {
        let alt = if n % 2 == 0 { 1 } else { -1 };
        (BigRational::from_integer(n.into()) + &self.delta * BigInt::from(self.sign * alt)) * BigInt::from(self.k_inv)
    }

    fn lambda(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(if n == 0 { 1 } else { n }))
    }

    /// `P^(alpha)_0 .. P^(alpha)_n` at `x`.
    fn sequence(&self, alpha: i64, x: &BigRational, n: usize) -> Vec<BigRational> {
        let mut out = vec![BigRational::one()];
        for j in 1..=n as i64 {
            let m = j + alpha;
            let prev = out[(j - 1) as usize].clone();
            let mut next = (x - self.c(m)) * prev;
            if j > 1 {
                next -= Self::lambda(m) * out[(j - 2) as usize].clone();
            }
            out.push(next);
        }
        out
    }

    fn sign_changes(seq: &[BigRational]) -> usize {
        let signs: Vec<bool> = seq.iter().filter(|v| !v.is_zero()).map(|v| v.is_negative()).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Sign of `2^{b n} P^(alpha)_n(m / 2^b)`, all in integers; needs
    /// integer `c_n`.
    fn sign_dyadic(&self, alpha: i64, n: usize, m: &BigInt, b: u32) -> bool {
        let scale = BigInt::one() << b;
        let scale2 = &scale * &scale;
        let (mut prev, mut cur) = (BigInt::zero(), BigInt::one());
        for j in 1..=n as i64 {
            let c = self.c(j + alpha);
            assert!(c.is_integer(), "dyadic evaluation needs integer c_n");
            let mut next = (m - c.to_integer() * &scale) * &cur;
            if j > 1 {
                next -= Self::lambda(j + alpha).to_integer() * &scale2 * &prev;
            }
            prev = std::mem::replace(&mut cur, next);
        }
        cur.is_negative()
    }

    /// Bisect the single sign change of `P^(alpha)_n` in `(lo, hi)` on the
    /// grid `2^-bits`.
    fn zero_in(&self, alpha: i64, n: usize, lo: BigRational, hi: BigRational, bits: u32) -> BigRational {
        let grid = BigRational::from_integer(BigInt::one() << bits);
        let mut lo = (lo * &grid).ceil().to_integer();
        let mut hi = (hi * &grid).floor().to_integer();
        let lo_neg = self.sign_dyadic(alpha, n, &lo, bits);
        assert_ne!(lo_neg, self.sign_dyadic(alpha, n, &hi, bits), "no sign change in bracket");
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1;
            if self.sign_dyadic(alpha, n, &mid, bits) == lo_neg {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        BigRational::new(lo + hi, BigInt::one() << (bits + 1))
    }
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap()
}

fn from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // zeros below x = n - exact sign changes; inputs like 1/5 are rounded in
    // the library, which only matters within an ulp of a zero
    #[test]
    fn sturm_counts_are_exact(
        k_inv in prop::sample::select(vec![1i64, 2, 5, 10]),
        d_num in 0i64..8,
        positive in any::<bool>(),
        alpha in -1i64..=1,
        n in 1usize..120,
        x in -30.0f64..600.0,
    ) {
        let sign = if positive { 1 } else { -1 };
        let ex = Exact { k_inv, delta: q(d_num, 10), sign };
        let params = ModelParams::new(1.0 / k_inv as f64, d_num as f64 / 10.0,
            if positive { Parity::Positive } else { Parity::Negative }).unwrap();
        let spec = OpsSpec::new(params, alpha).unwrap();
        let xr = from_f64(x);
        let seq = ex.sequence(alpha, &xr, n);
        prop_assume!(!seq[n].is_zero());
        let below = n - Exact::sign_changes(&seq);
        prop_assert_eq!(sturm_count(&spec, x, n), below);
        prop_assert_eq!(build_jacobi(&spec, n).unwrap().count_below(x), below);
    }
}

#[test]
fn phi_agrees_with_exact_values() {
    // kappa = 1/2, delta = 3/10: coefficients are exact in binary only up to
    // delta, so compare at the level of the rounding of the inputs
    let ex = Exact { k_inv: 2, delta: q(3, 10), sign: 1 };
    let params = ModelParams::new(0.5, 0.3, Parity::Positive).unwrap();
    for eps in [-0.7, 0.25, 3.5, 41.0] {
        let phi = eval_phi(&params, eps, 80);
        let x = from_f64(eps) * BigInt::from(2);
        let poly = ex.sequence(-1, &x, 80);
        let mut fact = BigRational::one();
        for n in 0..=80usize {
            if n > 0 {
                fact *= BigRational::from_integer(BigInt::from(n));
            }
            let want = to_f64(&(&poly[n] / &fact));
            let got = phi[n].to_f64();
            if want != 0.0 && want.is_normal() {
                assert!((got - want).abs() <= 1e-9 * want.abs(), "eps={eps} n={n}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn coagulation_gaps_match_exact_bisection() {
    // kappa = 1/5, delta = 2/5, s = +1, n = 60: c_n = 5n +- 2 are integers
    let ex = Exact { k_inv: 5, delta: q(2, 5), sign: 1 };
    let params = ModelParams::new(0.2, 0.4, Parity::Positive).unwrap();
    let n = 60usize;
    let rows = coagulation_report(&params, n, &[4, 9]).unwrap();
    let den = build_jacobi(&OpsSpec { params, family: Family::Denominator }, n).unwrap();
    for row in rows {
        let l = row.level;
        let approx = den.zeros(&[l], f64::EPSILON, None).unwrap()[0];
        let pad = from_f64(1e-9);
        let pole = ex.zero_in(0, n, from_f64(approx) - &pad, from_f64(approx) + &pad, 120);
        // the alpha = -1 zero lies just above, the alpha = 1 zero just below
        let wide = from_f64(1e-3);
        let tiny = BigRational::new(BigInt::one(), BigInt::one() << 130);
        let upper = ex.zero_in(-1, n + 1, &pole + &tiny, &pole + &wide, 120);
        let lower = ex.zero_in(1, n - 1, &pole - &wide, &pole - &tiny, 120);
        let gap_up = to_f64(&(&upper - &pole));
        let gap_lo = to_f64(&(&pole - &lower));
        assert!((row.gap_upper / gap_up - 1.0).abs() < 1e-4, "l={l}: {} vs {gap_up}", row.gap_upper);
        assert!((row.gap_lower / gap_lo - 1.0).abs() < 1e-4, "l={l}: {} vs {gap_lo}", row.gap_lower);
    }
}
