//! Inequality fuzzing on piecewise-linear test functions and validation of
//! the certified bounds against the spectral oracle.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{self, BoundResult, SearchGrid};
use crate::coeff::{decompose_q, Expr, Problem};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::norms;
use crate::oracle::{self, OracleOptions, SpectralEstimate};
use crate::quadrature::integrate;

/// Relative slack allowed before an inequality counts as violated.
pub const VIOLATION_TOL: f64 = 1e-10;
/// Relative bound on the quadratic-form discrepancy.
pub const IDENTITY_TOL: f64 = 1e-8;

/// Continuous piecewise-linear function, zero outside its first and last
/// breakpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestFunction {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl TestFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<TestFunction> {
        if breakpoints.len() < 3 || breakpoints.len() != values.len() {
            return Err(Error::Invalid("a test function needs at least 3 breakpoints with one value each".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) || breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::Invalid("breakpoints must be finite and strictly increasing".into()));
        }
        if values[0] != 0.0 || values[values.len() - 1] != 0.0 {
            return Err(Error::Invalid("first and last values must be 0".into()));
        }
        Ok(TestFunction { breakpoints, values })
    }

    /// Tent on `[lo, hi]` with the given peak at the midpoint.
    pub fn hat(lo: f64, hi: f64, peak: f64) -> TestFunction {
        TestFunction { breakpoints: vec![lo, 0.5 * (lo + hi), hi], values: vec![0.0, peak, 0.0] }
    }

    pub fn zero(lo: f64, hi: f64) -> TestFunction {
        TestFunction::hat(lo, hi, 0.0)
    }

    /// Random support inside `window`, 1 to 8 interior knots, values in
    /// `[-1, 1]`.
    pub fn random(rng: &mut impl Rng, window: (f64, f64)) -> TestFunction {
        let (a, b) = window;
        let width = rng.gen_range(0.05..=1.0) * (b - a);
        let lo = rng.gen_range(a..=b - width);
        let hi = lo + width;
        let k = rng.gen_range(1..=8);
        let mut inner: Vec<f64> = (0..k).map(|_| rng.gen_range(lo..hi)).collect();
        inner.sort_by(f64::total_cmp);
        inner.dedup();
        let mut xs = vec![lo];
        xs.extend(inner.into_iter().filter(|&x| x > lo && x < hi));
        xs.push(hi);
        if xs.len() < 3 {
            xs.insert(1, 0.5 * (lo + hi));
        }
        let mut ys: Vec<f64> = xs.iter().map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let last = ys.len() - 1;
        ys[0] = 0.0;
        ys[last] = 0.0;
        TestFunction { breakpoints: xs, values: ys }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], self.breakpoints[self.breakpoints.len() - 1])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo || x >= hi {
            return 0.0;
        }
        let j = self.breakpoints.partition_point(|&b| b <= x);
        let (x0, x1) = (self.breakpoints[j - 1], self.breakpoints[j]);
        let (y0, y1) = (self.values[j - 1], self.values[j]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn scaled(&self, c: f64) -> TestFunction {
        TestFunction { breakpoints: self.breakpoints.clone(), values: self.values.iter().map(|v| c * v).collect() }
    }

    fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| (x[0], x[1], y[0], y[1]))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `‖f‖_2²`, exact on linear pieces.
    pub fn l2_norm_sq(&self) -> f64 {
        self.segments().map(|(x0, x1, a, b)| (x1 - x0) * (a * a + a * b + b * b) / 3.0).sum()
    }

    /// The same function with knots added at the integers inside its support.
    fn with_integer_knots(&self) -> TestFunction {
        let (lo, hi) = self.support();
        let mut xs = self.breakpoints.clone();
        let mut n = lo.floor() + 1.0;
        while n < hi {
            xs.push(n);
            n += 1.0;
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let ys = xs.iter().map(|&x| self.eval(x)).collect();
        TestFunction { breakpoints: xs, values: ys }
    }
}

/// Integrals of one test function against the coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
struct FormParts {
    /// `∫ p |f'|²`
    energy: f64,
    /// `∫ q f²`
    q: f64,
    q_plus: f64,
    q_minus: f64,
}

const SEGMENT_TOL: f64 = 1e-13;

/// `∫_{x0}^{x1} w(x) (a + (b-a)(x-x0)/(x1-x0))^k` on one linear piece.
fn weighted(w: &Expr, x0: f64, x1: f64, a: f64, b: f64, k: i32) -> Result<f64> {
    let f = |x: f64| -> std::result::Result<f64, crate::error::EvalError> {
        let t = a + (b - a) * (x - x0) / (x1 - x0);
        w.eval(x).map(|v| v * t.powi(k))
    };
    let breaks = w.breakpoints_in(x0, x1);
    let scale = (x1 - x0) * a.abs().max(b.abs()).powi(k).max(1e-300);
    Ok(integrate(f, x0, x1, &breaks, SEGMENT_TOL * scale.max(1e-3))?.value)
}

fn form_parts(f: &TestFunction, p: &Expr, q: &Expr, q_plus: &Expr, q_minus: &Expr) -> Result<FormParts> {
    let mut out = FormParts { energy: 0.0, q: 0.0, q_plus: 0.0, q_minus: 0.0 };
    for (x0, x1, a, b) in f.segments() {
        let slope = (b - a) / (x1 - x0);
        if slope != 0.0 {
            out.energy += slope * slope * weighted(p, x0, x1, 1.0, 1.0, 0)?;
        }
        if a != 0.0 || b != 0.0 {
            out.q += weighted(q, x0, x1, a, b, 2)?;
            out.q_plus += weighted(q_plus, x0, x1, a, b, 2)?;
            out.q_minus += weighted(q_minus, x0, x1, a, b, 2)?;
        }
    }
    Ok(out)
}

/// `|(∫p|f'|² + ∫q f²) - (‖√p f'‖² + ‖q₊f²‖₁ - ‖q₋f²‖₁)|`, and the
/// magnitude it should be judged against.
pub fn check_quadratic_form_identity(f: &TestFunction, prob: &Problem) -> Result<(f64, f64)> {
    let (q_plus, q_minus) = decompose_q(&prob.q);
    let parts = form_parts(f, &prob.p, &prob.q, &q_plus, &q_minus)?;
    Ok(identity_slack(&parts))
}

fn identity_slack(parts: &FormParts) -> (f64, f64) {
    let direct = parts.energy + parts.q;
    let split = parts.energy + parts.q_plus - parts.q_minus;
    ((direct - split).abs(), 1.0 + parts.energy + parts.q_plus + parts.q_minus)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FormSignVerdict {
    /// the form value is positive, so the lemma says nothing
    Skipped,
    Holds { energy: f64, q_minus: f64, q_abs: f64 },
    Violated { energy: f64, q_minus: f64, q_abs: f64 },
}

fn form_sign_from_parts(parts: &FormParts) -> FormSignVerdict {
    let form = parts.energy + parts.q_plus - parts.q_minus;
    if form > 0.0 {
        return FormSignVerdict::Skipped;
    }
    let q_abs = parts.q_plus + parts.q_minus;
    let (e, m) = (parts.energy, parts.q_minus);
    let ok = e <= m + VIOLATION_TOL * (1.0 + m) && q_abs <= 2.0 * m + VIOLATION_TOL * (1.0 + 2.0 * m);
    if ok {
        FormSignVerdict::Holds { energy: e, q_minus: m, q_abs }
    } else {
        FormSignVerdict::Violated { energy: e, q_minus: m, q_abs }
    }
}

/// Checks `‖√p f'‖² <= ‖q₋f²‖₁` and `‖q f²‖₁ <= 2‖q₋f²‖₁` when the form
/// value of `f` is nonpositive.
pub fn check_nonpositive_form(prob: &Problem, f: &TestFunction) -> Result<FormSignVerdict> {
    let (q_plus, q_minus) = decompose_q(&prob.q);
    Ok(form_sign_from_parts(&form_parts(f, &prob.p, &prob.q, &q_plus, &q_minus)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityStats {
    pub name: String,
    pub checks: usize,
    pub violations: usize,
    /// smallest `(rhs - lhs) / (1 + rhs)` seen
    pub worst_slack: f64,
    pub worst_seed: Option<u64>,
    pub worst_lhs: Option<f64>,
    pub worst_rhs: Option<f64>,
}

impl InequalityStats {
    fn new(name: &str) -> InequalityStats {
        InequalityStats {
            name: name.into(),
            checks: 0,
            violations: 0,
            worst_slack: f64::INFINITY,
            worst_seed: None,
            worst_lhs: None,
            worst_rhs: None,
        }
    }

    fn record(&mut self, seed: u64, lhs: f64, rhs: f64) {
        self.checks += 1;
        if lhs > rhs + VIOLATION_TOL * (1.0 + rhs.abs()) {
            self.violations += 1;
        }
        let slack = (rhs - lhs) / (1.0 + rhs.abs());
        if slack < self.worst_slack {
            self.worst_slack = slack;
            self.worst_seed = Some(seed);
            self.worst_lhs = Some(lhs);
            self.worst_rhs = Some(rhs);
        }
    }

    fn merge(&mut self, other: &InequalityStats) {
        self.checks += other.checks;
        self.violations += other.violations;
        if other.worst_slack < self.worst_slack {
            self.worst_slack = other.worst_slack;
            self.worst_seed = other.worst_seed;
            self.worst_lhs = other.worst_lhs;
            self.worst_rhs = other.worst_rhs;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaFuzz {
    pub trials: usize,
    pub seed: u64,
    pub inequalities: Vec<InequalityStats>,
    /// test functions with nonpositive form value
    pub nonpositive_form_trials: usize,
    pub identity_worst_ratio: f64,
    pub identity_failures: usize,
}

impl LemmaFuzz {
    pub fn violations(&self) -> usize {
        self.inequalities.iter().map(|s| s.violations).sum::<usize>() + self.identity_failures
    }

    pub fn stats(&self, name: &str) -> Option<&InequalityStats> {
        self.inequalities.iter().find(|s| s.name == name)
    }

    /// Worst case per inequality: `trial_seed,inequality,lhs,rhs`.
    pub fn worst_cases_csv(&self) -> String {
        let mut out = String::from("trial_seed,inequality,lhs,rhs\n");
        for s in &self.inequalities {
            if let (Some(seed), Some(lhs), Some(rhs)) = (s.worst_seed, s.worst_lhs, s.worst_rhs) {
                let _ = writeln!(out, "{seed},{},{lhs},{rhs}", s.name);
            }
        }
        out
    }
}

pub const UNIT_INTERVAL_EPS: [f64; 3] = [0.1, 1.0, 10.0];

fn inequality_names(etas: &[f64]) -> Vec<String> {
    let mut names = vec!["sup_l2".to_string()];
    names.extend(etas.iter().map(|e| format!("sup_weighted(eta={})", Exponent::Finite(*e))));
    names.extend(UNIT_INTERVAL_EPS.iter().map(|e| format!("unit_interval(eps={e})")));
    names.push("nonpositive_form:energy".into());
    names.push("nonpositive_form:abs_q".into());
    names
}

/// Inputs shared by all trials.
struct FuzzContext<'a> {
    prob: &'a Problem,
    inv_p: Expr,
    q_plus: Expr,
    q_minus: Expr,
    etas: &'a [f64],
    window: (f64, f64),
}

/// Outcome of one trial, in the order of `inequality_names`.
struct TrialOutcome {
    stats: Vec<InequalityStats>,
    nonpositive_form_trials: bool,
    identity_ratio: f64,
}

fn run_trial(ctx: &FuzzContext<'_>, seed: u64) -> Result<TrialOutcome> {
    let names = inequality_names(ctx.etas);
    let mut stats: Vec<InequalityStats> = names.iter().map(|n| InequalityStats::new(n)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = TestFunction::random(&mut rng, ctx.window).with_integer_knots();
    let parts = form_parts(&f, &ctx.prob.p, &ctx.prob.q, &ctx.q_plus, &ctx.q_minus)?;
    let (diff, scale) = identity_slack(&parts);

    let (lo, hi) = f.support();
    let sup = f.sup_norm();
    let l2 = f.l2_norm_sq().sqrt();
    let grad = parts.energy.max(0.0).sqrt();
    // 1/p norms over the support; that is all the inequalities see of p
    let inv_p_sup = norms::lp_norm_on(&ctx.inv_p, Exponent::Infinite, lo, hi, 1e-12)?.value();
    if let Some(ip) = inv_p_sup {
        stats[0].record(seed, sup, (2.0 * ip.sqrt() * grad * l2).sqrt());
    }
    for (j, &eta) in ctx.etas.iter().enumerate() {
        let norm = norms::lp_norm_on(&ctx.inv_p, Exponent::Finite(eta), lo, hi, 1e-13)?.value();
        if let Some(ip) = norm {
            let d = 2.0 * eta - 1.0;
            let rhs = ((d / eta) * ip.sqrt() * grad).powf(eta / d) * l2.powf((eta - 1.0) / d);
            stats[1 + j].record(seed, sup, rhs);
        }
    }
    let base = 1 + ctx.etas.len();
    let mut n = lo.floor();
    while n < hi {
        let (a, b) = (n, n + 1.0);
        let mut sup_sq = 0.0f64;
        let (mut energy, mut mass) = (0.0, 0.0);
        for (x0, x1, y0, y1) in f.segments() {
            if x1 <= a || x0 >= b {
                continue;
            }
            sup_sq = sup_sq.max(y0 * y0).max(y1 * y1);
            let slope = (y1 - y0) / (x1 - x0);
            if slope != 0.0 {
                energy += slope * slope * weighted(&ctx.prob.p, x0, x1, 1.0, 1.0, 0)?;
            }
            mass += (x1 - x0) * (y0 * y0 + y0 * y1 + y1 * y1) / 3.0;
        }
        let local = norms::lp_norm_on(&ctx.inv_p, Exponent::Infinite, a.max(lo), b.min(hi), 1e-12)?.value();
        if let Some(ip) = local {
            for (k, eps) in UNIT_INTERVAL_EPS.iter().enumerate() {
                stats[base + k].record(seed, sup_sq, eps * ip * energy + (1.0 + 1.0 / eps) * mass);
            }
        }
        n += 1.0;
    }
    let verdict = form_sign_from_parts(&parts);
    let form_base = base + UNIT_INTERVAL_EPS.len();
    let qualifying = !matches!(verdict, FormSignVerdict::Skipped);
    if let FormSignVerdict::Holds { energy, q_minus, q_abs } | FormSignVerdict::Violated { energy, q_minus, q_abs } = verdict {
        stats[form_base].record(seed, energy, q_minus);
        stats[form_base + 1].record(seed, q_abs, 2.0 * q_minus);
    }
    Ok(TrialOutcome { stats, nonpositive_form_trials: qualifying, identity_ratio: diff / scale })
}

/// Window for random supports: `[a, b]` widened to cover the coefficient
/// structure, where everything is finite for the catalogue problems.
pub fn default_window(prob: &Problem) -> (f64, f64) {
    let (a, b) = prob.ab;
    let mut lo = a.min(-4.0);
    let mut hi = b.max(4.0);
    for e in [&prob.p, &prob.q, &prob.r] {
        for x in e.breakpoints() {
            lo = lo.min(x - 1.0);
            hi = hi.max(x + 1.0);
        }
    }
    (lo, hi)
}

/// Evaluates the sup-norm inequalities (with `η` from `etas`), the local
/// inequality for each `ε`, the quadratic-form identity and the
/// negative-form inequalities on `trials` seeded random test functions.
pub fn fuzz_sobolev_inequalities(prob: &Problem, etas: &[f64], trials: usize, seed: u64) -> Result<LemmaFuzz> {
    if trials == 0 {
        return Err(Error::Invalid("at least one trial is required".into()));
    }
    if etas.iter().any(|&e| !(e >= 1.0) || !e.is_finite()) {
        return Err(Error::Invalid(format!("η must lie in [1, ∞), got {etas:?}")));
    }
    let (q_plus, q_minus) = decompose_q(&prob.q);
    let ctx = FuzzContext { prob, inv_p: prob.inv_p(), q_plus, q_minus, etas, window: default_window(prob) };
    let outcomes: Vec<TrialOutcome> = (0..trials as u64)
        .into_par_iter()
        .map(|i| run_trial(&ctx, seed.wrapping_add(i)))
        .collect::<Result<_>>()?;
    let mut stats: Vec<InequalityStats> = inequality_names(etas).iter().map(|n| InequalityStats::new(n)).collect();
    let mut out = LemmaFuzz { trials, seed, inequalities: Vec::new(), nonpositive_form_trials: 0, identity_worst_ratio: 0.0, identity_failures: 0 };
    for o in &outcomes {
        for (s, t) in stats.iter_mut().zip(&o.stats) {
            s.merge(t);
        }
        out.nonpositive_form_trials += o.nonpositive_form_trials as usize;
        out.identity_worst_ratio = out.identity_worst_ratio.max(o.identity_ratio);
        out.identity_failures += (o.identity_ratio >= IDENTITY_TOL) as usize;
    }
    out.inequalities = stats;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// the oracle did not converge, so no claim is made
    Unconfirmed,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub problem: String,
    pub bounds: Vec<BoundResult>,
    pub best: Option<BoundResult>,
    pub oracle: SpectralEstimate,
    pub margin: f64,
    pub all_bounds_below_oracle: bool,
    pub status: Status,
    pub lemma_fuzz: Option<LemmaFuzz>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// norm tolerance
    pub tol: f64,
    pub oracle: OracleOptions,
    /// fuzz trials; 0 skips the fuzzing
    pub trials: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { tol: norms::DEFAULT_TOL, oracle: OracleOptions::default(), trials: 1000, seed: 0 }
    }
}

/// Runs every calculator and the oracle, and checks each applicable bound
/// against `λ_min + margin` with `margin = 2 |last change| + 1e-6`.
pub fn validate_bounds(prob: &Problem, grid: &SearchGrid, opts: &VerifyOptions) -> Result<VerificationReport> {
    let best = bounds::best_bound(prob, grid, opts.tol);
    let hint = best.best.as_ref().and_then(|b| b.bound);
    let oracle = oracle::estimate_min_spectrum(prob, &OracleOptions { hint, ..opts.oracle })?;
    let margin = 2.0 * oracle.last_change() + 1e-6;
    let all_below = best
        .results
        .iter()
        .filter(|r| r.applicable)
        .filter_map(|r| r.bound)
        .all(|b| b <= oracle.lambda_min + margin);
    let lemma_fuzz = if opts.trials > 0 {
        let etas: Vec<f64> = [1.0, 2.0].into_iter().collect();
        Some(fuzz_sobolev_inequalities(prob, &etas, opts.trials, opts.seed)?)
    } else {
        None
    };
    let fuzz_ok = lemma_fuzz.as_ref().is_none_or(|f| f.violations() == 0);
    let status = if !oracle.converged {
        Status::Unconfirmed
    } else if all_below && fuzz_ok {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(VerificationReport {
        problem: prob.name.clone(),
        bounds: best.results,
        best: best.best,
        margin,
        oracle,
        all_bounds_below_oracle: all_below,
        status,
        lemma_fuzz,
    })
}
