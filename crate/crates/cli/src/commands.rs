//! One function per subcommand; each returns the table to print.

use std::ops::RangeInclusive;

use rabi_core::braak::{align_branches, braak_branch_roots, Branch, DEFAULT_ORDER};
use rabi_core::dense::dense_eigenvalues;
use rabi_core::jaynes_cummings::jc_eigenvalues;
use rabi_core::oracle_charlier::{exact_eigenvalues, forward_difference_residual, orthogonality_residual, pearson_residual};
use rabi_core::schweber::{coagulation_report, pfd, schweber_roots, RootStatus};
use rabi_core::spectrum::{
    eigenfunction, eigenvalues, eigenvalues_unscaled, flow_trace, interlacing_check, trace_residual, unscaled_limit,
};
use rabi_core::{Error, ModelParams, OpsSpec, Parity};

use crate::table::{Cell, Table};

/// Continued-fraction depth used by `compare --method schweber`.
pub const SCHWEBER_DEPTH: usize = 200;

/// Why a command did not produce a clean result; each maps to an exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    NonConvergence(String),
    /// The table is still written; only the exit status changes.
    Invariant(Table),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::NonConvergence(_) => 3,
            Failure::Invariant(_) => 4,
            Failure::Io(_) => 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::InvalidParameter(msg) => Failure::Usage(msg),
            other => Failure::NonConvergence(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<Table, Failure>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Braak,
    Schweber,
    Jc,
    Oracle,
    Dense,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Braak => "braak",
            Method::Schweber => "schweber",
            Method::Jc => "jc",
            Method::Oracle => "oracle",
            Method::Dense => "dense",
        }
    }
}

/// Parsed command line, shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    pub count: Option<usize>,
    pub level: usize,
    pub tol: f64,
    pub degrees: Option<RangeInclusive<usize>>,
    pub unscaled: bool,
}

impl RunConfig {
    fn count_or(&self, default: usize) -> usize {
        self.count.unwrap_or(default)
    }
}

/// `a..b` or `a..=b`, both inclusive of `b`.
pub fn parse_degrees(s: &str) -> std::result::Result<RangeInclusive<usize>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got '{s}'"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: usize = a.trim().parse().map_err(|_| format!("bad lower degree '{a}'"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad upper degree '{b}'"))?;
    if a == 0 || b < a {
        return Err(format!("need 1 <= a <= b, got {a}..{b}"));
    }
    Ok(a..=b)
}

fn base_table(cfg: &RunConfig, columns: &[&str]) -> Table {
    let mut t = Table::new(columns);
    t.meta("kappa", cfg.params.kappa());
    t.meta("delta", cfg.params.delta());
    t.meta("parity", cfg.params.parity().to_string());
    t.meta("tol", cfg.tol);
    t
}

pub fn run_spectrum(cfg: &RunConfig) -> Outcome {
    let count = cfg.count_or(10);
    let p = &cfg.params;
    let scaled = eigenvalues(p, count, cfg.tol)?;
    let mut t = base_table(cfg, &["level", "epsilon", "zeta", "residual"]);
    t.meta("count", count);
    let k2 = p.kappa() * p.kappa();
    if cfg.unscaled {
        let degree = cfg.degrees.as_ref().map_or(scaled.degree_used, |d| *d.end());
        let plain = eigenvalues_unscaled(p, count, degree, cfg.tol).map_err(|e| match e {
            Error::Overflow { index } => {
                let lim = unscaled_limit(&scaled, 20);
                Failure::NonConvergence(format!(
                    "plain doubles left the representable range at index {index} of degree {degree}; \
                     levels computable without scaling: {}",
                    lim.levels_ok
                ))
            }
            other => other.into(),
        })?;
        t.meta("path", "unscaled");
        t.meta("degree", degree);
        for (l, e) in plain.iter().enumerate() {
            t.push(vec![l.into(), (*e).into(), (e + k2).into(), Cell::Missing]);
        }
    } else {
        t.meta("path", "scaled");
        t.meta("degree", scaled.degree_used);
        t.meta("tail_margin", scaled.tail_margin);
        t.meta("tail_residual", scaled.tail_residual);
        t.meta("final_degree", scaled.final_degree);
        t.meta("step", scaled.step);
        for (l, (e, r)) in scaled.eigenvalues.iter().zip(&scaled.per_level_residual).enumerate() {
            t.push(vec![l.into(), (*e).into(), (e + k2).into(), (*r).into()]);
        }
    }
    Ok(t)
}

/// Long-format `(n, level, epsilon, difference)`; the difference is taken
/// from the exact level at `delta = 0`, otherwise from the last degree.
pub fn run_flow(cfg: &RunConfig) -> Outcome {
    let p = &cfg.params;
    let levels = cfg.level..cfg.level + cfg.count_or(1);
    let exact = p.delta() == 0.0;
    let mut t = base_table(cfg, &["n", "level", "epsilon", "difference"]);
    t.meta("reference", if exact { "l - kappa^2" } else { "epsilon at the last degree" });
    let mut rises = 0;
    for level in levels {
        let degrees: Vec<usize> = match &cfg.degrees {
            Some(r) => r.clone().filter(|&n| n > level).collect(),
            None => (level + 1..=level + 101).collect(),
        };
        if degrees.is_empty() {
            return Err(Failure::Usage(format!("no degree above level {level} in range")));
        }
        let trace = flow_trace(p, level + 1, &degrees)?;
        rises += trace.monotonicity().violations;
        let eps = trace.epsilons();
        let reference = if exact {
            level as f64 - p.kappa() * p.kappa()
        } else {
            *eps.last().expect("non-empty trace")
        };
        for (n, e) in trace.degrees.iter().zip(&eps) {
            t.push(vec![(*n).into(), level.into(), (*e).into(), (e - reference).into()]);
        }
    }
    t.meta("monotonicity_violations", rises);
    Ok(t)
}

struct CompareRow {
    level: usize,
    label: String,
    reference: f64,
    method: Option<f64>,
    status: &'static str,
}

pub fn run_compare(cfg: &RunConfig, method: Method) -> Outcome {
    let count = cfg.count_or(20);
    let p = &cfg.params;
    let reference = eigenvalues(p, count, cfg.tol)?.eigenvalues;
    let label = p.parity().to_string();
    let mut t = base_table(cfg, &["level", "label", "reference", "method", "difference", "status"]);
    t.meta("method", method.name());
    t.meta("count", count);
    let simple = |values: Vec<f64>| -> Vec<CompareRow> {
        values
            .into_iter()
            .zip(&reference)
            .enumerate()
            .map(|(level, (m, r))| CompareRow { level, label: label.clone(), reference: *r, method: Some(m), status: "ok" })
            .collect()
    };
    let rows = match method {
        Method::Oracle => {
            if p.delta() != 0.0 {
                return Err(Failure::Usage("the Charlier oracle is exact only at delta = 0".into()));
            }
            simple(exact_eigenvalues(p.kappa(), count))
        }
        Method::Dense => simple(dense_eigenvalues(p, count)?),
        Method::Schweber => compare_schweber(p, &reference, &label, &mut t)?,
        Method::Braak => compare_braak(p, cfg.tol, &reference, &label, &mut t)?,
        Method::Jc => compare_jc(p, count, cfg.tol, &mut t)?,
    };
    let mut worst: f64 = 0.0;
    let mut reliable = 0;
    for row in rows {
        let diff = row.method.map(|m| (m - row.reference).abs());
        if let (Some(d), "ok" | "resolved") = (diff, row.status) {
            worst = worst.max(d);
            reliable += 1;
        }
        t.push(vec![
            row.level.into(),
            row.label.into(),
            row.reference.into(),
            Cell::opt(row.method),
            Cell::opt(diff),
            row.status.into(),
        ]);
    }
    t.meta("reliable_rows", reliable);
    t.meta("max_deviation", worst);
    Ok(t)
}

fn compare_schweber(p: &ModelParams, reference: &[f64], label: &str, t: &mut Table) -> Result<Vec<CompareRow>, Failure> {
    let n = reference.len();
    let top = if n > 1 { reference[n - 1] + 0.5 * (reference[n - 1] - reference[n - 2]) } else { reference[0] + 0.5 };
    let scan = schweber_roots(p, (reference[0] - 0.5, top), SCHWEBER_DEPTH)?;
    t.meta("depth", SCHWEBER_DEPTH);
    t.meta("first_invisible_pole", scan.first_failure().map_or(Cell::Missing, Cell::from));
    Ok(reference
        .iter()
        .enumerate()
        .map(|(level, r)| {
            let root = scan.roots.iter().find(|x| x.level == level);
            let (method, status) = match root {
                Some(x) if x.status == RootStatus::Resolved => (Some(x.epsilon), "resolved"),
                Some(_) => (None, "invisible_pole"),
                None => (None, "missing"),
            };
            CompareRow { level, label: label.to_string(), reference: *r, method, status }
        })
        .collect())
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::Plus => "G+",
        Branch::Minus => "G-",
    }
}

fn compare_braak(p: &ModelParams, tol: f64, reference: &[f64], label: &str, t: &mut Table) -> Result<Vec<CompareRow>, Failure> {
    let k2 = p.kappa() * p.kappa();
    let ground = match p.parity() {
        Parity::Positive => reference[0],
        Parity::Negative => eigenvalues(&p.with_parity(Parity::Positive), 1, tol)?.eigenvalues[0],
    };
    let al = align_branches(p, ground)?;
    let branch = al.branch(p.parity());
    t.meta("branch", branch_name(branch));
    t.meta("alignment", format!("+ parity <-> {}, - parity <-> {}", branch_name(al.positive), branch_name(al.negative)));
    t.meta("alignment_ground_mismatch", al.ground_mismatch);
    let n = reference.len();
    let scan = braak_branch_roots(p, branch, (reference[0] + k2 - 0.5, reference[n - 1] + k2 + 0.25), DEFAULT_ORDER)?;
    t.meta("max_order", scan.max_order);
    t.meta("lost_significance_at_zeta", Cell::opt(scan.lost_significance_at));
    let lost = if p.delta() == 0.0 { "no_zeros_at_delta_0" } else { "beyond_significance" };
    Ok(reference
        .iter()
        .enumerate()
        .map(|(level, r)| {
            let (method, status) = match scan.roots.get(level) {
                Some(z) => (Some(z - k2), "ok"),
                None => (None, lost),
            };
            CompareRow { level, label: label.to_string(), reference: *r, method, status }
        })
        .collect())
}

/// Both members of each doublet against the nearest exact level of either
/// parity; `--parity` is ignored because a doublet mixes the two.
fn compare_jc(p: &ModelParams, doublets: usize, tol: f64, t: &mut Table) -> Result<Vec<CompareRow>, Failure> {
    let per_parity = 2 * doublets + 4;
    let mut exact = Vec::with_capacity(2 * per_parity);
    for parity in Parity::BOTH {
        exact.extend(eigenvalues(&p.with_parity(parity), per_parity, tol)?.eigenvalues);
    }
    t.meta("parities", "both");
    let nearest = |e: f64| exact.iter().copied().min_by(|a, b| (a - e).abs().total_cmp(&(b - e).abs())).expect("levels");
    let mut rows = Vec::with_capacity(2 * doublets);
    for l in 0..doublets {
        let (plus, minus) = jc_eigenvalues(p.kappa(), p.delta(), l);
        for (label, e) in [("-", minus), ("+", plus)] {
            rows.push(CompareRow { level: l, label: label.into(), reference: nearest(e), method: Some(e), status: "ok" });
        }
    }
    Ok(rows)
}

pub fn run_eigenfunction(cfg: &RunConfig) -> Outcome {
    let p = &cfg.params;
    let spec = eigenvalues(p, cfg.level + 1, cfg.tol)?;
    let eps = spec.eigenvalues[cfg.level];
    let ef = eigenfunction(p, eps, spec.degree_used, cfg.count)?;
    let mut t = base_table(cfg, &["n", "phi", "log10_abs", "sign", "source"]);
    t.meta("level", cfg.level);
    t.meta("epsilon", eps);
    t.meta("degree", spec.degree_used);
    t.meta("junction", ef.junction);
    t.meta("junction_mismatch", ef.junction_mismatch);
    for (n, c) in ef.coefficients.iter().enumerate() {
        let source = if n <= ef.junction { "recurrence" } else { "tail" };
        let log = if c.is_zero() { Cell::Missing } else { c.log10_abs().into() };
        t.push(vec![n.into(), c.to_f64().into(), log, Cell::Int(c.signum() as i64), source.into()]);
    }
    Ok(t)
}

struct Check {
    name: &'static str,
    parity: Option<Parity>,
    value: f64,
    threshold: f64,
    pass: bool,
    /// Diagnostics are reported but do not set the exit status.
    diagnostic: bool,
}

impl Check {
    fn at_most(name: &'static str, parity: Option<Parity>, value: f64, threshold: f64) -> Check {
        Check { name, parity, value, threshold, pass: value <= threshold, diagnostic: false }
    }

    fn below(name: &'static str, parity: Option<Parity>, value: f64, threshold: f64) -> Check {
        Check { name, parity, value, threshold, pass: value < threshold, diagnostic: false }
    }
}

/// Invariant suite at one `(kappa, delta)` for both parities, with the
/// polynomial degree `N` taken from `--count` (default 500).
pub fn run_check(cfg: &RunConfig) -> Outcome {
    let degree = cfg.count_or(500);
    if degree < 2 {
        return Err(Failure::Usage("check needs a degree of at least 2".into()));
    }
    let mut checks = Vec::new();
    for parity in Parity::BOTH {
        let p = cfg.params.with_parity(parity);
        let tag = Some(parity);
        let mut interlacing = 0;
        let mut trace: f64 = 0.0;
        for alpha in [-1, 0, 1] {
            let spec = OpsSpec::new(p, alpha)?;
            interlacing += interlacing_check(&spec, degree)?.violations();
            for n in [10.min(degree), degree / 2, degree] {
                trace = trace.max(trace_residual(&spec, n)?);
            }
        }
        checks.push(Check::at_most("interlacing_violations", tag, interlacing as f64, 0.0));
        let mut rises = 0;
        for level in [1usize, 10, 50].into_iter().filter(|&l| l < degree) {
            let degrees: Vec<usize> = (level..=(level + 120).min(degree)).collect();
            rises += flow_trace(&p, level, &degrees)?.monotonicity().violations;
        }
        checks.push(Check::at_most("flow_monotonicity_violations", tag, rises as f64, 0.0));
        checks.push(Check::below("trace_identity_relative", tag, trace, 1e-10));
        let w = pfd(&p, degree)?;
        checks.push(Check::at_most("pfd_weight_sum_error", tag, (w.sum() - 1.0).abs(), 1e-12));
        let nonpositive = w.weights.iter().filter(|x| x.signum() <= 0).count();
        checks.push(Check::at_most("pfd_nonpositive_weights", tag, nonpositive as f64, 0.0));

        let levels: Vec<usize> = (4..=30).filter(|&l| l < degree).collect();
        if !levels.is_empty() {
            let rows = coagulation_report(&p, degree, &levels)?;
            let min_gap = rows.iter().map(|r| r.gap_lower.min(r.gap_upper)).fold(f64::INFINITY, f64::min);
            checks.push(Check { name: "coagulation_min_gap", parity: tag, value: min_gap, threshold: 0.0, pass: min_gap > 0.0, diagnostic: false });
            let upper = rows.iter().map(|r| r.gap_upper).fold(0.0, f64::max);
            let lower = rows.iter().map(|r| r.gap_lower).fold(0.0, f64::max);
            for (name, v) in [("coagulation_max_upper_gap", upper), ("coagulation_max_lower_gap", lower)] {
                checks.push(Check { diagnostic: true, ..Check::below(name, tag, v, 1e-5) });
            }
        }
    }
    let a = cfg.params.kappa().powi(2);
    let mut orth: f64 = 0.0;
    let mut fwd: f64 = 0.0;
    for m in 0..=20 {
        for n in 0..=20 {
            orth = orth.max(orthogonality_residual(a, m, n, None));
        }
        for zeta in [-0.5, 0.0, 0.3, 2.0, 7.7] {
            fwd = fwd.max(forward_difference_residual(a, zeta, m + 1));
        }
    }
    let pearson = (0..100).map(|x| pearson_residual(a, x)).fold(0.0, f64::max);
    checks.push(Check::below("charlier_orthogonality", None, orth, 1e-10));
    checks.push(Check::below("pearson_residual", None, pearson, 1e-9));
    checks.push(Check::below("forward_difference_residual", None, fwd, 1e-9));

    let mut t = Table::new(&["invariant", "parity", "value", "threshold", "pass", "kind"]);
    t.meta("kappa", cfg.params.kappa());
    t.meta("delta", cfg.params.delta());
    t.meta("degree", degree);
    let failed = checks.iter().filter(|c| !c.pass && !c.diagnostic).count();
    t.meta("failed_invariants", failed);
    for c in checks {
        t.push(vec![
            c.name.into(),
            c.parity.map_or(Cell::Missing, |p| p.to_string().into()),
            c.value.into(),
            c.threshold.into(),
            c.pass.into(),
            (if c.diagnostic { "diagnostic" } else { "invariant" }).into(),
        ]);
    }
    if failed > 0 {
        Err(Failure::Invariant(t))
    } else {
        Ok(t)
    }
}
