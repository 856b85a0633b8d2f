use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coeff::{parse_expr, Expr};
use crate::error::ProblemError;
use crate::norms::DOMAIN_CAP;


/// Declared envelope `scale * |x|^(-exponent)` for `|x| >= cutoff`.
///
/// A positive exponent declares decay, a negative one declares growth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDecay {
    pub cutoff: f64,
    pub exponent: f64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

fn is_one(v: &f64) -> bool {
    *v == 1.0
}

impl TailDecay {
    pub fn envelope(&self, x: f64) -> f64 {
        self.scale * x.abs().powf(-self.exponent)
    }

    /// Upper bound for `∫_{|x|>l} |f|^s` implied by the envelope, when it
    /// is integrable.
    pub fn tail_integral(&self, l: f64, s: f64) -> Option<f64> {
        let l = l.max(self.cutoff);
        let k = s * self.exponent;
        (k > 1.0).then(|| 2.0 * self.scale.powf(s) * l.powf(1.0 - k) / (k - 1.0))
    }

    /// Upper bound for `∫_n^{n+1} |f|` valid for every `|n| >= l`.
    pub fn unit_interval_bound(&self, l: f64) -> Option<f64> {
        let l = l.max(self.cutoff);
        (self.exponent >= 0.0).then(|| self.envelope(l))
    }

    /// Fraction of log-spaced sample points beyond the cutoff where the
    /// envelope dominates `|f|`.
    pub fn coverage(&self, f: &Expr) -> f64 {
        const PER_SIDE: usize = 1000;
        let start = self.cutoff.max(1e-3);
        if start >= DOMAIN_CAP {
            return 1.0;
        }
        let ratio = (DOMAIN_CAP / start).ln();
        let mut hits = 0usize;
        for i in 0..PER_SIDE {
            let x = start * (ratio * i as f64 / (PER_SIDE - 1) as f64).exp();
            for x in [x, -x] {
                if let Ok(v) = f.eval(x) {
                    if v.abs() <= self.envelope(x) * (1.0 + 1e-12) {
                        hits += 1;
                    }
                }
            }
        }
        hits as f64 / (2 * PER_SIDE) as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TailDecls {
    pub q: Option<TailDecay>,
    pub inv_p: Option<TailDecay>,
    pub inv_r: Option<TailDecay>,
}

/// On-disk tail table, keyed by `"q"`, `"1/p"` or `"1/r"`.
pub type TailFile = BTreeMap<String, TailDecay>;

/// JSON form of a problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub p: String,
    pub q: String,
    pub r: String,
    pub ab: [f64; 2],
    #[serde(default)]
    pub tail_decay: TailFile,
}

/// The coefficient triple of `(1/r)(-(p f')' + q f)` with the data of the
/// standing hypotheses.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub p: Expr,
    pub q: Expr,
    pub r: Expr,
    pub ab: (f64, f64),
    pub tails: TailDecls,
}

impl Problem {
    pub fn new(name: impl Into<String>, p: Expr, q: Expr, r: Expr, ab: (f64, f64), tails: TailDecls) -> Result<Problem, ProblemError> {
        let (a, b) = ab;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(ProblemError::BadInterval { a, b });
        }
        let prob = Problem { name: name.into(), p, q, r, ab, tails };
        for (label, decl, f) in [
            ("q", prob.tails.q, prob.q.clone()),
            ("1/p", prob.tails.inv_p, prob.inv_p()),
            ("1/r", prob.tails.inv_r, prob.inv_r()),
        ] {
            if let Some(decl) = decl {
                let fraction = decl.coverage(&f);
                if fraction < 0.99 {
                    return Err(ProblemError::TailViolated { name: label.to_string(), fraction });
                }
            }
        }
        Ok(prob)
    }

    /// Parses coefficient strings; `tails` uses the on-disk keys.
    pub fn from_strs(name: &str, p: &str, q: &str, r: &str, ab: (f64, f64), tails: &TailFile) -> Result<Problem, ProblemError> {
        let parse = |label: &'static str, text: &str| {
            parse_expr(text).map_err(|source| ProblemError::Parse { name: label, source })
        };
        let mut decls = TailDecls::default();
        for (key, decl) in tails {
            match key.as_str() {
                "q" => decls.q = Some(*decl),
                "1/p" | "inv_p" => decls.inv_p = Some(*decl),
                "1/r" | "inv_r" => decls.inv_r = Some(*decl),
                other => return Err(ProblemError::UnknownTail(other.to_string())),
            }
        }
        Problem::new(name, parse("p", p)?, parse("q", q)?, parse("r", r)?, ab, decls)
    }

    pub fn from_file(file: &ProblemFile) -> Result<Problem, ProblemError> {
        let name = file.name.clone().unwrap_or_else(|| "problem".to_string());
        Problem::from_strs(&name, &file.p, &file.q, &file.r, (file.ab[0], file.ab[1]), &file.tail_decay)
    }

    pub fn from_json(text: &str) -> Result<Problem, ProblemError> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| ProblemError::Json(e.to_string()))?;
        Problem::from_file(&file)
    }

    pub fn to_file(&self) -> ProblemFile {
        let mut tail_decay = TailFile::new();
        for (key, decl) in [("q", self.tails.q), ("1/p", self.tails.inv_p), ("1/r", self.tails.inv_r)] {
            if let Some(d) = decl {
                tail_decay.insert(key.to_string(), d);
            }
        }
        ProblemFile {
            name: Some(self.name.clone()),
            p: self.p.to_string(),
            q: self.q.to_string(),
            r: self.r.to_string(),
            ab: [self.ab.0, self.ab.1],
            tail_decay,
        }
    }

    pub fn inv_p(&self) -> Expr {
        self.p.reciprocal()
    }

    pub fn inv_r(&self) -> Expr {
        self.r.reciprocal()
    }

    /// `p ≡ 1` and `r ≡ 1`, the setting of the classical Schrödinger bounds.
    pub fn is_schrodinger(&self) -> bool {
        self.p.is_identically_one() && self.r.is_identically_one()
    }

    /// Half-length of the first window that contains `[a, b]` and every
    /// coefficient breakpoint.
    pub fn base_half_length(&self) -> f64 {
        let mut l = self.ab.0.abs().max(self.ab.1.abs()).max(8.0);
        for e in [&self.p, &self.q, &self.r] {
            for b in e.breakpoints() {
                l = l.max(b.abs() + 1.0);
            }
        }
        l
    }
}

/// Splits `q` into nonnegative parts with `q = q_plus - q_minus`.
pub fn decompose_q(q: &Expr) -> (Expr, Expr) {
    q.split_sign()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_schema() {
        let text = r#"{"p":"1","q":"-2*sech(x)^2","r":"1","ab":[-1,1],"tail_decay":{"q":{"cutoff":4,"exponent":2}}}"#;
        let prob = Problem::from_json(text).unwrap();
        assert_eq!(prob.ab, (-1.0, 1.0));
        assert_eq!(prob.tails.q.unwrap().exponent, 2.0);
        assert!(prob.is_schrodinger());
    }

    #[test]
    fn interval_must_be_ordered() {
        let err = Problem::from_strs("x", "1", "0", "1", (1.0, 1.0), &TailFile::new()).unwrap_err();
        assert_eq!(err, ProblemError::BadInterval { a: 1.0, b: 1.0 });
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"p":"1","q":"0","r":"1","ab":[-1,1],"extra":3}"#;
        assert!(matches!(Problem::from_json(text), Err(ProblemError::Json(_))));
    }

    #[test]
    fn false_tail_declaration_rejected() {
        let mut tails = TailFile::new();
        tails.insert("q".into(), TailDecay { cutoff: 1.0, exponent: 2.0, scale: 1.0 });
        let err = Problem::from_strs("x", "1", "x^2", "1", (-1.0, 1.0), &tails).unwrap_err();
        assert!(matches!(err, ProblemError::TailViolated { .. }));
        // a growth declaration is fine
        tails.insert("q".into(), TailDecay { cutoff: 1.0, exponent: -2.0, scale: 1.0 });
        Problem::from_strs("x", "1", "x^2", "1", (-1.0, 1.0), &tails).unwrap();
    }

    #[test]
    fn decompose_examples() {
        let q = parse_expr("-2*sech(x)^2").unwrap();
        let (plus, minus) = decompose_q(&q);
        for x in [-3.0, 0.0, 0.7] {
            assert_eq!(plus.eval(x).unwrap(), 0.0);
            assert!((minus.eval(x).unwrap() - 2.0 / (x as f64).cosh().powi(2)).abs() < 1e-15);
        }
        let (plus, minus) = decompose_q(&parse_expr("3").unwrap());
        assert_eq!(plus.eval(1.0).unwrap(), 3.0);
        assert_eq!(minus.eval(1.0).unwrap(), 0.0);

        let (plus, minus) = decompose_q(&parse_expr("x*indicator(-1,1)").unwrap());
        assert_eq!(plus.eval(0.5).unwrap(), 0.5);
        assert_eq!(minus.eval(0.5).unwrap(), 0.0);
        assert_eq!(plus.eval(-0.5).unwrap(), 0.0);
        assert_eq!(minus.eval(-0.5).unwrap(), 0.5);
    }
}
