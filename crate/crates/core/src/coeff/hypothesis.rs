use serde::Serialize;

use crate::coeff::{Expr, Problem};
use crate::exponent::Exponent;
use crate::norms::{self, NormOptions, NormValue};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub evidence: String,
}

impl Verdict {
    fn new(pass: bool, evidence: impl Into<String>) -> Verdict {
        Verdict { pass, evidence: evidence.into() }
    }
}

/// Outcome of checking the three standing hypotheses on `p`, `q`, `r`.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    /// (a): `p > 0` a.e. and `1/p` in some `L^η`
    pub p_positive: Verdict,
    pub p_sample_min: f64,
    /// exponents `η ∈ {1, 2, ∞}` with `‖1/p‖_η` finite
    pub one_over_p_class: Vec<Exponent>,
    /// (b)
    pub q_in_l1u: Verdict,
    pub q_uniform_norm: NormValue,
    /// (c): `r > 0` a.e. and `ess inf r > 0` off `[a, b]`
    pub r_positive: Verdict,
    pub r_sample_min: f64,
    pub r_essinf_outside_ab: Option<f64>,
}

impl HypothesisReport {
    pub fn passes(&self) -> bool {
        self.p_positive.pass
            && !self.one_over_p_class.is_empty()
            && self.q_in_l1u.pass
            && self.r_positive.pass
            && self.r_essinf_outside_ab.is_some_and(|m| m > 0.0)
    }

    /// Human-readable list of the failed items.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.p_positive.pass {
            out.push(format!("(a) p positivity: {}", self.p_positive.evidence));
        }
        if self.one_over_p_class.is_empty() {
            out.push("(a) 1/p is in none of L^1, L^2, L^inf".to_string());
        }
        if !self.q_in_l1u.pass {
            out.push(format!("(b) {}", self.q_in_l1u.evidence));
        }
        if !self.r_positive.pass {
            out.push(format!("(c) r positivity: {}", self.r_positive.evidence));
        }
        match self.r_essinf_outside_ab {
            Some(m) if m > 0.0 => {}
            Some(m) => out.push(format!("(c) ess inf of r outside [a,b] is {m:e}")),
            None => out.push("(c) ess inf of r outside [a,b] could not be bounded".to_string()),
        }
        out
    }
}

/// Sampled positivity on a window plus the far field. A nonpositive sample
/// only counts against the coefficient when its neighbours are nonpositive
/// too, i.e. on a set of positive measure.
fn positivity(f: &Expr, half: f64) -> (Verdict, f64) {
    const PER_PIECE: usize = 1 << 14;
    let mut xs = Vec::new();
    let mut cuts = vec![-half];
    cuts.extend(f.breakpoints_in(-half, half));
    cuts.push(half);
    for w in cuts.windows(2) {
        for i in 0..PER_PIECE {
            xs.push(w[0] + (w[1] - w[0]) * i as f64 / PER_PIECE as f64);
        }
    }
    xs.push(half);
    let window = xs.len();
    let mut x = half;
    while x < norms::DOMAIN_CAP {
        x *= 1.01;
        xs.push(x);
        xs.push(-x);
    }
    let mut min = f64::INFINITY;
    let mut bad = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        match f.eval(x) {
            Ok(v) => {
                min = min.min(v);
                // far out, an exact zero is usually underflow of a decaying coefficient
                if v < 0.0 || (v == 0.0 && i < window) {
                    let d = 1e-7 * (1.0 + x.abs());
                    let nonpos = |y: f64| matches!(f.eval(y), Ok(w) if w <= 0.0);
                    if nonpos(x - d) && nonpos(x + d) {
                        bad.push(x);
                    }
                }
            }
            // poles of p or r are where they are infinite, not nonpositive
            Err(_) => {}
        }
    }
    let verdict = if bad.is_empty() {
        Verdict::new(true, format!("sample minimum {min:e} over {} points", xs.len()))
    } else {
        Verdict::new(false, format!("nonpositive on a set of positive measure near x = {}", bad[0]))
    };
    (verdict, min)
}

/// Checks hypotheses (a)–(c); failures are verdicts, never errors.
pub fn check_hypotheses(prob: &Problem, tol: f64) -> HypothesisReport {
    let half = 2.0 * prob.base_half_length();
    let (p_positive, p_sample_min) = positivity(&prob.p, half);
    let (r_positive, r_sample_min) = positivity(&prob.r, half);

    let inv_p = prob.inv_p();
    let p_opts = NormOptions { tol, start: prob.base_half_length(), tail: prob.tails.inv_p };
    let one_over_p_class = if p_positive.pass {
        [Exponent::ONE, Exponent::Finite(2.0), Exponent::Infinite]
            .into_iter()
            .filter(|&eta| norms::lp_norm(&inv_p, eta, &p_opts).is_ok_and(|v| v.is_finite()))
            .collect()
    } else {
        Vec::new()
    };

    let q_opts = NormOptions { tol, start: prob.base_half_length(), tail: prob.tails.q };
    let q_uniform_norm = norms::uniform_local_norm(&prob.q, &q_opts)
        .unwrap_or_else(|_| NormValue::infinite(norms::NormKind::L1Uniform));
    let q_in_l1u = match q_uniform_norm.value() {
        Some(v) => Verdict::new(true, format!("‖q‖_u = {v}")),
        None => Verdict::new(false, "unit-interval integrals of |q| grow without bound"),
    };

    let r_essinf_outside_ab = if r_positive.pass {
        norms::ess_inf_outside(&prob.r, prob.ab, prob.base_half_length(), prob.tails.inv_r)
    } else {
        None
    };

    HypothesisReport {
        p_positive,
        p_sample_min,
        one_over_p_class,
        q_in_l1u,
        q_uniform_norm,
        r_positive,
        r_sample_min,
        r_essinf_outside_ab,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{TailDecay, TailFile};

    fn prob(p: &str, q: &str, r: &str, tails: &TailFile) -> Problem {
        Problem::from_strs("t", p, q, r, (-1.0, 1.0), tails).unwrap()
    }

    #[test]
    fn poschl_teller_passes() {
        let rep = check_hypotheses(&prob("1", "-2*sech(x)^2", "1", &TailFile::new()), 1e-8);
        assert!(rep.passes(), "{:?}", rep.failures());
        let u = rep.q_uniform_norm.value().unwrap();
        assert!((u - 1.5232).abs() < 1e-4);
        assert!((u - 2.0 * 1f64.tanh()).abs() < 1e-10);
        assert_eq!(rep.one_over_p_class, vec![Exponent::Infinite]);
    }

    #[test]
    fn growing_potential_fails_b() {
        let mut tails = TailFile::new();
        tails.insert("q".into(), TailDecay { cutoff: 1.0, exponent: -2.0, scale: 1.0 });
        let rep = check_hypotheses(&prob("1", "x^2", "1", &tails), 1e-8);
        assert!(!rep.q_in_l1u.pass);
        assert!(!rep.passes());
    }

    #[test]
    fn vanishing_weight_passes() {
        let rep = check_hypotheses(&prob("1", "0", "min(1,abs(x))", &TailFile::new()), 1e-8);
        assert!(rep.passes(), "{:?}", rep.failures());
        assert!((rep.r_essinf_outside_ab.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_coefficients_fail() {
        let rep = check_hypotheses(&prob("indicator(-inf,0)+1*indicator(1,inf)", "0", "1", &TailFile::new()), 1e-8);
        assert!(!rep.p_positive.pass);
        assert!(!rep.passes());
        let rep = check_hypotheses(&prob("1", "0", "exp(-abs(x))", &TailFile::new()), 1e-8);
        assert!(rep.r_positive.pass);
        assert!(!rep.passes(), "r decays to zero at infinity");
    }

    #[test]
    fn growing_p_is_in_every_class() {
        let mut tails = TailFile::new();
        tails.insert("1/p".into(), TailDecay { cutoff: 1.0, exponent: 2.0, scale: 1.0 });
        let rep = check_hypotheses(&prob("1+x^2", "-0.2*indicator(0,1)", "1", &tails), 1e-8);
        assert!(rep.passes());
        assert_eq!(rep.one_over_p_class.len(), 3);
    }
}
