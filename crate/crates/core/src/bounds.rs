//! Lower bounds for `min σ(T)` and the search over their free data.

use std::fmt;

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::coeff::{decompose_q, Problem};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::norms::{self, NormKind, NormOptions, NormValue, OmegaContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    Prop,
    Warmup,
    Thm2,
    Thm3,
    Thm1,
}

impl Theorem {
    /// Position in the tie-break order, smaller wins.
    fn rank(self) -> u8 {
        self as u8
    }
}

/// The auxiliary function `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GChoice {
    Constant(f64),
    InvR,
}

impl Serialize for GChoice {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GChoice::Constant(c) => serializer.serialize_f64(*c),
            GChoice::InvR => serializer.serialize_str("g=1/r"),
        }
    }
}

impl fmt::Display for GChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GChoice::Constant(c) => write!(f, "c={c}"),
            GChoice::InvR => write!(f, "g=1/r"),
        }
    }
}

/// How `best_bound` picks `g`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum GStrategy {
    /// optimized constant and, when `1/r` is bounded, `g = 1/r`
    #[default]
    Auto,
    Constant(f64),
    InvR,
}

/// `g` together with the quantities the general formula needs.
#[derive(Debug, Clone)]
pub enum GInput {
    InvR { inv_r_sup: NormValue },
    Constant { c: f64, omega: NormValue },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub theorem: Theorem,
    pub s: Option<Exponent>,
    pub eta: Option<Exponent>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub g: Option<GChoice>,
    pub omega_measure: Option<f64>,
    /// `None` exactly when not applicable
    pub bound: Option<f64>,
    pub applicable: bool,
    pub reason: Option<String>,
}

impl Serialize for BoundResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("BoundResult", 10)?;
        st.serialize_field("theorem", &self.theorem)?;
        st.serialize_field("s", &self.s)?;
        st.serialize_field("eta", &self.eta)?;
        st.serialize_field("alpha", &self.alpha)?;
        st.serialize_field("beta", &self.beta)?;
        st.serialize_field("g", &self.g)?;
        st.serialize_field("omega_measure", &self.omega_measure)?;
        st.serialize_field("bound", &self.bound)?;
        st.serialize_field("applicable", &self.applicable)?;
        st.serialize_field("reason", &self.reason)?;
        st.end()
    }
}

impl BoundResult {
    fn new(theorem: Theorem) -> BoundResult {
        BoundResult {
            theorem,
            s: None,
            eta: None,
            alpha: None,
            beta: None,
            g: None,
            omega_measure: None,
            bound: None,
            applicable: false,
            reason: None,
        }
    }

    fn with_s(mut self, s: Exponent) -> Self {
        self.s = Some(s);
        self
    }

    fn with_eta(mut self, eta: Exponent) -> Self {
        self.eta = Some(eta);
        self
    }

    fn certified(mut self, bound: f64) -> Self {
        // no negative zero in reports
        self.bound = Some(if bound == 0.0 { 0.0 } else { bound });
        self.applicable = true;
        self.reason = None;
        self
    }

    fn rejected(mut self, reason: impl Into<String>) -> Self {
        self.bound = None;
        self.applicable = false;
        self.reason = Some(reason.into());
        self
    }

    /// Short label such as `Thm3(2,3/2)`.
    pub fn tag(&self) -> String {
        let name = format!("{:?}", self.theorem);
        match (self.eta, self.s) {
            (Some(eta), Some(s)) => format!("{name}({eta},{s})"),
            (None, Some(s)) => format!("{name}({s})"),
            _ => name,
        }
    }
}

fn upper(v: &NormValue, what: &str) -> std::result::Result<f64, String> {
    v.upper().ok_or_else(|| format!("{what} is infinite"))
}

/// `2^{-2/(2s-1)} ((s-1)/s)^{2(s-1)/(2s-1)}`, with the limits `1/4` at
/// `s = 1` and `1` at `s = ∞`.
pub fn warmup_constant(s: Exponent) -> f64 {
    match s {
        Exponent::Infinite => 1.0,
        Exponent::Finite(s) if s == 1.0 => 0.25,
        Exponent::Finite(s) => {
            let d = 2.0 * s - 1.0;
            2f64.powf(-2.0 / d) * ((s - 1.0) / s).powf(2.0 * (s - 1.0) / d)
        }
    }
}

/// Power of `‖q‖_s` in the warm-up and Thm2 bounds, `2s/(2s-1)`.
fn warmup_power(s: Exponent) -> f64 {
    match s {
        Exponent::Infinite => 1.0,
        Exponent::Finite(s) => 2.0 * s / (2.0 * s - 1.0),
    }
}

/// Schrödinger bound from `‖q‖_s` alone (`p = r = 1`).
pub fn warmup_bound(q_norm: &NormValue, s: Exponent, schrodinger: bool) -> BoundResult {
    let res = BoundResult::new(Theorem::Warmup).with_s(s);
    if !schrodinger {
        return res.rejected("requires p = 1 and r = 1");
    }
    match upper(q_norm, &format!("‖q‖_{s}")) {
        Ok(n) => res.certified(-warmup_constant(s) * n.powf(warmup_power(s))),
        Err(why) => res.rejected(why),
    }
}

/// `(α, β)` for Thm1 from `‖q_-‖_u` and `‖1/p‖_∞`.
pub fn thm1_params(q_minus_u: f64, inv_p_sup: f64) -> (f64, f64) {
    let alpha = 2.0 * q_minus_u + 4.0 * inv_p_sup * q_minus_u * q_minus_u;
    (alpha, (4.0 * inv_p_sup * alpha).sqrt())
}

/// `(α, β)` for Thm2 from `‖q_-‖_s` and `‖1/p‖_∞`.
pub fn thm2_params(q_minus_s: f64, s: Exponent, inv_p_sup: f64) -> (f64, f64) {
    match s {
        Exponent::Infinite => (q_minus_s, (4.0 * inv_p_sup * q_minus_s).sqrt()),
        Exponent::Finite(s) => {
            let beta = (4.0 * inv_p_sup * q_minus_s).powf(s / (2.0 * s - 1.0));
            (q_minus_s * beta.powf(1.0 / s), beta)
        }
    }
}

/// `(α, β)` for Thm3 from `‖q_-‖_s` and `‖1/p‖_η`; `None` when
/// `η + s <= 2` with `s` finite.
pub fn thm3_params(q_minus_s: f64, s: Exponent, inv_p_eta: f64, eta: f64) -> Option<(f64, f64)> {
    let k = ((2.0 * eta - 1.0) / eta).powi(2) * inv_p_eta * q_minus_s;
    let beta = match s {
        Exponent::Infinite => k.powf(eta / (2.0 * eta - 1.0)),
        Exponent::Finite(s) => {
            if eta + s <= 2.0 {
                return None;
            }
            k.powf(eta * s / (2.0 * eta * s - eta - s))
        }
    };
    let alpha = match s {
        Exponent::Infinite => q_minus_s,
        Exponent::Finite(s) => q_minus_s * beta.powf(1.0 / s),
    };
    Some((alpha, beta))
}

/// `-α ‖g‖_∞ / (1 - μ(Ω_g) β)`, or the reason it does not apply.
fn general_bound(res: BoundResult, alpha: f64, beta: f64, g: &GInput) -> BoundResult {
    let mut res = res;
    res.alpha = Some(alpha);
    res.beta = Some(beta);
    match g {
        GInput::InvR { inv_r_sup } => {
            res.g = Some(GChoice::InvR);
            res.omega_measure = Some(0.0);
            match upper(inv_r_sup, "‖1/r‖_∞") {
                Ok(m) => res.certified(-alpha * m),
                Err(why) => res.rejected(why),
            }
        }
        GInput::Constant { c, omega } => {
            res.g = Some(GChoice::Constant(*c));
            let mu = match upper(omega, "μ(Ω_g)") {
                Ok(mu) => mu,
                Err(why) => return res.rejected(why),
            };
            res.omega_measure = Some(mu);
            if mu * beta < 1.0 {
                res.certified(-alpha * c / (1.0 - mu * beta))
            } else {
                res.rejected(format!("μ(Ω_g)·β = {} is not below 1", mu * beta))
            }
        }
    }
}

pub fn thm1_bound(q_minus_u: &NormValue, inv_p_sup: &NormValue, g: &GInput) -> BoundResult {
    let res = BoundResult::new(Theorem::Thm1);
    let (qu, ip) = match (upper(q_minus_u, "‖q_-‖_u"), upper(inv_p_sup, "‖1/p‖_∞")) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(why), _) | (_, Err(why)) => return res.rejected(why),
    };
    let (alpha, beta) = thm1_params(qu, ip);
    general_bound(res, alpha, beta, g)
}

pub fn thm2_bound(q_minus_s: &NormValue, s: Exponent, inv_p_sup: &NormValue, g: &GInput) -> BoundResult {
    let res = BoundResult::new(Theorem::Thm2).with_s(s);
    let (qs, ip) = match (upper(q_minus_s, &format!("‖q_-‖_{s}")), upper(inv_p_sup, "‖1/p‖_∞")) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(why), _) | (_, Err(why)) => return res.rejected(why),
    };
    let (alpha, beta) = thm2_params(qs, s, ip);
    general_bound(res, alpha, beta, g)
}

pub fn thm3_bound(q_minus_s: &NormValue, s: Exponent, inv_p_eta: &NormValue, eta: Exponent, g: &GInput) -> BoundResult {
    let res = BoundResult::new(Theorem::Thm3).with_s(s).with_eta(eta);
    let Some(eta_f) = eta.finite() else {
        return res.rejected("η = ∞ is covered by Thm2");
    };
    let (qs, ip) = match (upper(q_minus_s, &format!("‖q_-‖_{s}")), upper(inv_p_eta, &format!("‖1/p‖_{eta}"))) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(why), _) | (_, Err(why)) => return res.rejected(why),
    };
    match thm3_params(qs, s, ip, eta_f) {
        Some((alpha, beta)) => general_bound(res, alpha, beta, g),
        None => res.rejected(format!("η + s = {} is not above 2", eta_f + s.finite().unwrap_or(f64::INFINITY))),
    }
}

/// Thm1 closed form for `g = 1/r`.
pub fn thm1_closed_form(q_minus_u: f64, inv_p_sup: f64, inv_r_sup: f64) -> f64 {
    -(2.0 * q_minus_u + 4.0 * inv_p_sup * q_minus_u * q_minus_u) * inv_r_sup
}

/// Thm2 closed form for `g = 1/r`.
pub fn thm2_closed_form(q_minus_s: f64, s: Exponent, inv_p_sup: f64, inv_r_sup: f64) -> f64 {
    match s {
        Exponent::Infinite => -q_minus_s * inv_r_sup,
        Exponent::Finite(s) => {
            let d = 2.0 * s - 1.0;
            -(4.0 * inv_p_sup).powf(1.0 / d) * q_minus_s.powf(2.0 * s / d) * inv_r_sup
        }
    }
}

/// Thm3 closed form for `g = 1/r`; requires `η + s > 2` when `s` is finite.
pub fn thm3_closed_form(q_minus_s: f64, s: Exponent, inv_p_eta: f64, eta: f64, inv_r_sup: f64) -> f64 {
    match s {
        Exponent::Infinite => -q_minus_s * inv_r_sup,
        Exponent::Finite(s) => {
            let d = 2.0 * eta * s - eta - s;
            let k = ((2.0 * eta - 1.0) / eta).powi(2) * inv_p_eta;
            -k.powf(eta / d) * q_minus_s.powf((2.0 * eta * s - s) / d) * inv_r_sup
        }
    }
}

/// Certifies `min σ(T) >= 0` when `‖1/p‖_1 ‖q_-‖_1 < 1`.
pub fn nonnegativity_test(inv_p_1: &NormValue, q_minus_1: &NormValue) -> BoundResult {
    let res = BoundResult::new(Theorem::Prop);
    // q_- = 0 makes the product vanish whatever 1/p does
    if q_minus_1.upper() == Some(0.0) {
        return res.certified(0.0);
    }
    let (ip, qm) = match (upper(inv_p_1, "‖1/p‖_1"), upper(q_minus_1, "‖q_-‖_1")) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(why), _) | (_, Err(why)) => return res.rejected(why),
    };
    let product = ip * qm;
    if product < 1.0 {
        res.certified(0.0)
    } else {
        res.rejected(format!("‖1/p‖_1‖q_-‖_1 = {product} is not below 1"))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GOptimum {
    pub c: f64,
    pub bound: f64,
    pub omega: NormValue,
}

/// Best constant `g = c` for given `(α, β)`: maximizes
/// `-α c / (1 - μ(Ω_c) β)` over the feasible `c`.
pub fn optimize_constant_g(alpha: f64, beta: f64, r: &crate::coeff::Expr, ctx: &OmegaContext) -> Result<GOptimum> {
    if !(alpha >= 0.0) || !(beta >= 0.0) || !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::Invalid(format!("α and β must be finite and nonnegative, got {alpha}, {beta}")));
    }
    let eval = |c: f64| -> Result<(f64, NormValue)> {
        let omega = norms::omega_measure(r, c, ctx)?;
        let value = match omega.upper() {
            Some(mu) if mu * beta < 1.0 => -alpha * c / (1.0 - mu * beta),
            _ => f64::NEG_INFINITY,
        };
        Ok((value, omega))
    };
    let feasible = |c: f64| -> Result<bool> { Ok(eval(c)?.0 > f64::NEG_INFINITY) };

    // feasibility is monotone in c; bracket its left end
    let (mut lo, mut hi) = (1.0, 1.0);
    if feasible(1.0)? {
        while feasible(lo)? {
            lo *= 0.5;
            if lo < 1e-12 {
                break;
            }
        }
    } else {
        loop {
            hi *= 2.0;
            if hi > 1e15 {
                return Err(Error::Invalid("no constant g achieves μ(Ω_g)·β < 1".to_string()));
            }
            if feasible(hi)? {
                break;
            }
        }
        lo = hi * 0.5;
    }
    if feasible(lo)? {
        hi = lo;
    } else {
        for _ in 0..48 {
            let mid = (lo * hi).sqrt();
            if mid <= lo || mid >= hi {
                break;
            }
            if feasible(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let c_min = hi;
    let (v_min, om_min) = eval(c_min)?;
    if alpha == 0.0 {
        return Ok(GOptimum { c: c_min, bound: 0.0, omega: om_min });
    }

    // the objective is below -α c, so nothing beyond |v| / α can win
    let probe = 2.0 * c_min;
    let v_probe = eval(probe)?.0;
    let c_max = (v_probe.max(v_min).abs() / alpha).max(probe);

    const GRID: usize = 48;
    let (l0, l1) = (c_min.ln(), c_max.ln());
    let at = |i: usize| (l0 + (l1 - l0) * i as f64 / GRID as f64).exp();
    let mut best = (v_min, c_min, om_min);
    let mut best_i = 0;
    for i in 1..=GRID {
        let c = at(i);
        let (v, om) = eval(c)?;
        if v > best.0 {
            best = (v, c, om);
            best_i = i;
        }
    }
    // golden-section refinement on log c around the best grid point
    let (mut a, mut b) = (at(best_i.saturating_sub(1)).ln(), at((best_i + 1).min(GRID)).ln());
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = eval(x1.exp())?;
    let mut f2 = eval(x2.exp())?;
    for _ in 0..80 {
        if (b - a).abs() < 1e-12 {
            break;
        }
        if f1.0 >= f2.0 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = eval(x1.exp())?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = eval(x2.exp())?;
        }
    }
    for (x, f) in [(x1, f1), (x2, f2)] {
        if f.0 > best.0 {
            best = (f.0, x.exp(), f.1);
        }
    }
    Ok(GOptimum { c: best.1, bound: best.0, omega: best.2 })
}

/// Exponent lists and `g` strategy explored by `best_bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchGrid {
    pub s: Vec<Exponent>,
    pub eta: Vec<Exponent>,
    pub g: GStrategy,
}

impl SearchGrid {
    pub fn default_s() -> Vec<Exponent> {
        [1.0, 1.25, 1.5, 2.0, 3.0].into_iter().map(Exponent::Finite).chain([Exponent::Infinite]).collect()
    }

    pub fn default_eta() -> Vec<Exponent> {
        vec![Exponent::ONE, Exponent::Finite(2.0)]
    }
}

impl Default for SearchGrid {
    fn default() -> Self {
        SearchGrid { s: SearchGrid::default_s(), eta: SearchGrid::default_eta(), g: GStrategy::Auto }
    }
}

/// Every norm the calculators read, computed once per problem.
#[derive(Debug, Clone, Serialize)]
pub struct ProblemNorms {
    pub schrodinger: bool,
    /// `‖q‖_s` per grid exponent
    pub q: Vec<(Exponent, NormValue)>,
    /// `‖q_-‖_s` per grid exponent
    pub q_minus: Vec<(Exponent, NormValue)>,
    pub q_minus_1: NormValue,
    pub q_minus_u: NormValue,
    pub inv_p_sup: NormValue,
    pub inv_p_1: NormValue,
    /// `‖1/p‖_η` per finite grid exponent
    pub inv_p_eta: Vec<(Exponent, NormValue)>,
    pub inv_r_sup: NormValue,
    pub r_essinf_outside_ab: Option<f64>,
}

fn or_infinite(v: Result<NormValue>, kind: NormKind) -> NormValue {
    v.unwrap_or_else(|_| NormValue::infinite(kind))
}

impl ProblemNorms {
    pub fn compute(prob: &Problem, grid: &SearchGrid, tol: f64) -> ProblemNorms {
        let start = prob.base_half_length();
        let q_opts = NormOptions { tol, start, tail: prob.tails.q };
        let p_opts = NormOptions { tol, start, tail: prob.tails.inv_p };
        let r_opts = NormOptions { tol, start, tail: prob.tails.inv_r };
        let (_, q_minus) = decompose_q(&prob.q);
        let inv_p = prob.inv_p();
        let lp = |f: &crate::coeff::Expr, s: Exponent, o: &NormOptions| or_infinite(norms::lp_norm(f, s, o), NormKind::Lp(s));
        let schrodinger = prob.is_schrodinger();
        let per_s = |f: &crate::coeff::Expr| -> Vec<(Exponent, NormValue)> {
            grid.s.par_iter().map(|&s| (s, lp(f, s, &q_opts))).collect()
        };
        let q = if schrodinger { per_s(&prob.q) } else { Vec::new() };
        let q_minus_s = per_s(&q_minus);
        let etas: Vec<Exponent> = grid.eta.iter().copied().filter(|e| !e.is_infinite()).collect();
        ProblemNorms {
            schrodinger,
            q,
            q_minus_1: lp(&q_minus, Exponent::ONE, &q_opts),
            q_minus_u: or_infinite(norms::uniform_local_norm(&q_minus, &q_opts), NormKind::L1Uniform),
            q_minus: q_minus_s,
            inv_p_sup: norms::ess_sup(&inv_p, &p_opts),
            inv_p_1: lp(&inv_p, Exponent::ONE, &p_opts),
            inv_p_eta: etas.par_iter().map(|&e| (e, lp(&inv_p, e, &p_opts))).collect(),
            inv_r_sup: norms::ess_sup(&prob.inv_r(), &r_opts),
            r_essinf_outside_ab: norms::ess_inf_outside(&prob.r, prob.ab, start, prob.tails.inv_r),
        }
    }

    fn lookup(list: &[(Exponent, NormValue)], e: Exponent) -> Option<&NormValue> {
        list.iter().find(|(k, _)| *k == e).map(|(_, v)| v)
    }

    pub fn q_minus_s(&self, s: Exponent) -> Option<&NormValue> {
        ProblemNorms::lookup(&self.q_minus, s)
    }

    pub fn q_s(&self, s: Exponent) -> Option<&NormValue> {
        ProblemNorms::lookup(&self.q, s)
    }

    pub fn inv_p_eta(&self, eta: Exponent) -> Option<&NormValue> {
        ProblemNorms::lookup(&self.inv_p_eta, eta)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BestBound {
    /// `None` means no certified bound
    pub best: Option<BoundResult>,
    pub results: Vec<BoundResult>,
    pub norms: ProblemNorms,
}

/// Picks the largest applicable bound; equal values go to the earlier
/// theorem in the order Prop, Warmup, Thm2, Thm3, Thm1.
pub fn select_best(results: &[BoundResult]) -> Option<BoundResult> {
    results
        .iter()
        .filter(|r| r.applicable)
        .filter_map(|r| r.bound.map(|b| (b, r)))
        .max_by(|(b1, r1), (b2, r2)| b1.total_cmp(b2).then(r2.theorem.rank().cmp(&r1.theorem.rank())))
        .map(|(_, r)| r.clone())
}

/// Which part of the general formula to evaluate for one calculator.
enum Params {
    Ready(f64, f64),
    Rejected(BoundResult),
}

/// Evaluates every calculator over the grid and returns the best bound.
pub fn best_bound(prob: &Problem, grid: &SearchGrid, tol: f64) -> BestBound {
    let norms = ProblemNorms::compute(prob, grid, tol);
    let results = evaluate_all(prob, grid, &norms);
    BestBound { best: select_best(&results), results, norms }
}

/// All individual results, in deterministic grid order.
pub fn evaluate_all(prob: &Problem, grid: &SearchGrid, norms: &ProblemNorms) -> Vec<BoundResult> {
    if grid.s.is_empty() {
        return Vec::new();
    }
    let mut out = vec![nonnegativity_test(&norms.inv_p_1, &norms.q_minus_1)];
    for &s in &grid.s {
        let q = norms.q_s(s).cloned().unwrap_or_else(|| NormValue::infinite(NormKind::Lp(s)));
        out.push(warmup_bound(&q, s, norms.schrodinger));
    }

    // (template result, params) for the theorems that share the g machinery
    let mut jobs: Vec<(BoundResult, Params)> = Vec::new();
    let qu = norms.q_minus_u.upper();
    let ip = norms.inv_p_sup.upper();
    let base = BoundResult::new(Theorem::Thm1);
    jobs.push(match (qu, ip) {
        (Some(qu), Some(ip)) => {
            let (a, b) = thm1_params(qu, ip);
            (base, Params::Ready(a, b))
        }
        _ => {
            let r = thm1_bound(&norms.q_minus_u, &norms.inv_p_sup, &GInput::InvR { inv_r_sup: norms.inv_r_sup.clone() });
            (base, Params::Rejected(r))
        }
    });
    for &s in &grid.s {
        let q = norms.q_minus_s(s).cloned().unwrap_or_else(|| NormValue::infinite(NormKind::Lp(s)));
        let base = BoundResult::new(Theorem::Thm2).with_s(s);
        jobs.push(match (q.upper(), ip) {
            (Some(qs), Some(ip)) => {
                let (a, b) = thm2_params(qs, s, ip);
                (base, Params::Ready(a, b))
            }
            _ => {
                let r = thm2_bound(&q, s, &norms.inv_p_sup, &GInput::InvR { inv_r_sup: norms.inv_r_sup.clone() });
                (base, Params::Rejected(r))
            }
        });
    }
    for &eta in &grid.eta {
        for &s in &grid.s {
            let q = norms.q_minus_s(s).cloned().unwrap_or_else(|| NormValue::infinite(NormKind::Lp(s)));
            let base = BoundResult::new(Theorem::Thm3).with_s(s).with_eta(eta);
            let pe = norms.inv_p_eta(eta).cloned().unwrap_or_else(|| NormValue::infinite(NormKind::Lp(eta)));
            let params = match (q.upper(), pe.upper(), eta.finite()) {
                (Some(qs), Some(pe), Some(e)) => thm3_params(qs, s, pe, e),
                _ => None,
            };
            jobs.push(match params {
                Some((a, b)) => (base, Params::Ready(a, b)),
                None => {
                    let r = thm3_bound(&q, s, &pe, eta, &GInput::InvR { inv_r_sup: norms.inv_r_sup.clone() });
                    (base, Params::Rejected(r))
                }
            });
        }
    }

    let ctx = norms.r_essinf_outside_ab.filter(|m| *m > 0.0).map(|m| OmegaContext {
        ab: prob.ab,
        essinf_outside: m,
        inv_r_tail: prob.tails.inv_r,
        start: prob.base_half_length(),
    });
    let evaluated: Vec<Vec<BoundResult>> = jobs
        .par_iter()
        .map(|(base, params)| {
            let (alpha, beta) = match params {
                Params::Ready(a, b) => (*a, *b),
                Params::Rejected(r) => return vec![r.clone()],
            };
            let mut rows = Vec::new();
            let inv_r = GInput::InvR { inv_r_sup: norms.inv_r_sup.clone() };
            let constant = |c: f64| -> BoundResult {
                match ctx.as_ref().map(|ctx| norms::omega_measure(&prob.r, c, ctx)) {
                    Some(Ok(omega)) => general_bound(base.clone(), alpha, beta, &GInput::Constant { c, omega }),
                    Some(Err(e)) => base.clone().rejected(e.to_string()),
                    None => base.clone().rejected("ess inf of r outside [a,b] is not positive"),
                }
            };
            match grid.g {
                GStrategy::InvR => rows.push(general_bound(base.clone(), alpha, beta, &inv_r)),
                GStrategy::Constant(c) => rows.push(constant(c)),
                GStrategy::Auto => {
                    if norms.inv_r_sup.is_finite() {
                        rows.push(general_bound(base.clone(), alpha, beta, &inv_r));
                    }
                    match ctx.as_ref().map(|ctx| optimize_constant_g(alpha, beta, &prob.r, ctx)) {
                        Some(Ok(opt)) => rows.push(constant(opt.c)),
                        Some(Err(e)) => {
                            let mut r = base.clone().rejected(e.to_string());
                            r.alpha = Some(alpha);
                            r.beta = Some(beta);
                            rows.push(r);
                        }
                        None => rows.push(base.clone().rejected("ess inf of r outside [a,b] is not positive")),
                    }
                }
            }
            rows
        })
        .collect();
    out.extend(evaluated.into_iter().flatten());
    out
}

/// One row of the comparison between the Thm2 and warm-up constants for
/// `p = r = 1` and unit norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemarkRow {
    pub s: Exponent,
    pub thm2_constant: f64,
    pub warmup_constant: f64,
}

pub fn thm2_schrodinger_constant(s: Exponent) -> f64 {
    match s {
        Exponent::Infinite => 1.0,
        Exponent::Finite(s) => 4f64.powf(1.0 / (2.0 * s - 1.0)),
    }
}

pub fn remark_comparison_table(s_list: &[Exponent]) -> Vec<RemarkRow> {
    s_list
        .iter()
        .map(|&s| RemarkRow { s, thm2_constant: thm2_schrodinger_constant(s), warmup_constant: warmup_constant(s) })
        .collect()
}
