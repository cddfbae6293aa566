use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opseq::{Family, OpsSpec};
use crate::spectrum::build_jacobi;

/// One family of strict inequalities `a < b` between zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub name: String,
    pub pairs: usize,
    /// Order reversed by more than the resolution.
    pub violations: usize,
    /// Order reversed or tied within the resolution: strictness cannot be
    /// decided in double precision.
    pub unresolved: usize,
    pub max_violation: f64,
    /// Smallest `b - a` seen (negative if reversed).
    pub min_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterlacingReport {
    pub degree: usize,
    pub resolution: f64,
    pub chains: Vec<ChainReport>,
}

impl InterlacingReport {
    pub fn violations(&self) -> usize {
        self.chains.iter().map(|c| c.violations).sum()
    }

    pub fn unresolved(&self) -> usize {
        self.chains.iter().map(|c| c.unresolved).sum()
    }

    pub fn max_violation(&self) -> f64 {
        self.chains.iter().map(|c| c.max_violation).fold(0.0, f64::max)
    }
}

struct ZeroCache {
    spec: OpsSpec,
    sets: HashMap<(Family, usize), Vec<f64>>,
    resolution: f64,
}

impl ZeroCache {
    fn get(&mut self, family: Family, degree: usize) -> Result<&[f64]> {
        if !self.sets.contains_key(&(family, degree)) {
            let jac = build_jacobi(&self.spec.with_family(family), degree)?;
            self.resolution = self.resolution.max(jac.resolution());
            let z = jac.all_zeros(f64::EPSILON)?;
            self.sets.insert((family, degree), z);
        }
        Ok(&self.sets[&(family, degree)])
    }
}

struct Chain {
    report: ChainReport,
    gaps: Vec<f64>,
}

impl Chain {
    fn new(name: String) -> Self {
        Chain {
            report: ChainReport {
                name,
                pairs: 0,
                violations: 0,
                unresolved: 0,
                max_violation: 0.0,
                min_gap: f64::INFINITY,
            },
            gaps: Vec::new(),
        }
    }

    fn less(&mut self, a: f64, b: f64) {
        self.gaps.push(b - a);
    }

    fn finish(mut self, resolution: f64) -> ChainReport {
        for g in self.gaps {
            let r = &mut self.report;
            r.pairs += 1;
            r.min_gap = r.min_gap.min(g);
            if g > 0.0 {
                continue;
            }
            if -g <= resolution {
                r.unresolved += 1;
            } else {
                r.violations += 1;
                r.max_violation = r.max_violation.max(-g);
            }
        }
        self.report
    }
}

/// Check, at degree `N`:
/// * `x_{N,l} < x_{N-1,l} < x_{N,l+1}` within the family of `spec`;
/// * the same against the next family up, `x^(a+1)_{N-1,l}` (for `a <= 0`);
/// * `x^(1)_{N-1,l-1} < x^(0)_{N,l} < x^(-1)_{N+1,l+1}`.
pub fn interlacing_check(spec: &OpsSpec, degree: usize) -> Result<InterlacingReport> {
    if degree < 2 {
        return Err(Error::InvalidParameter("interlacing needs N >= 2".into()));
    }
    let n = degree;
    let mut cache = ZeroCache {
        spec: *spec,
        sets: HashMap::new(),
        resolution: 0.0,
    };
    let mut chains = Vec::new();

    let push_pair = |cache: &mut ZeroCache, name: String, outer: Family, inner: Family| -> Result<Chain> {
        let big = cache.get(outer, n)?.to_vec();
        let small = cache.get(inner, n - 1)?.to_vec();
        let mut c = Chain::new(name);
        for l in 0..n - 1 {
            c.less(big[l], small[l]);
            c.less(small[l], big[l + 1]);
        }
        Ok(c)
    };

    let own = spec.family;
    chains.push(push_pair(&mut cache, format!("alpha={} degree {n} vs {}", own.alpha(), n - 1), own, own)?);
    if let Some(next) = own.associated() {
        chains.push(push_pair(
            &mut cache,
            format!("alpha={} degree {n} vs alpha={} degree {}", own.alpha(), next.alpha(), n - 1),
            own,
            next,
        )?);
    }

    let num = cache.get(Family::Numerator, n - 1)?.to_vec();
    let den = cache.get(Family::Denominator, n)?.to_vec();
    let phi = cache.get(Family::Phi, n + 1)?.to_vec();
    let mut c = Chain::new(format!("alpha=1 degree {} < alpha=0 degree {n} < alpha=-1 degree {}", n - 1, n + 1));
    for l in 0..n {
        if l >= 1 {
            c.less(num[l - 1], den[l]);
        }
        c.less(den[l], phi[l + 1]);
    }
    chains.push(c);

    let resolution = cache.resolution;
    Ok(InterlacingReport {
        degree: n,
        resolution,
        chains: chains.into_iter().map(|c| c.finish(resolution)).collect(),
    })
}
