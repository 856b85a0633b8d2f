//! Coefficient expression trees.
//!
//! The grammar is closed: literals, the variable `x`, the four arithmetic
//! operators, powers, `exp`, `abs`, `tanh`, `sech`, `min`, `max`,
//! `piecewise((lo,hi,expr),...)` and `indicator(lo,hi)`. Intervals are
//! half-open, `[lo, hi)`.

use std::fmt;

use crate::error::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Abs,
    Tanh,
    Sech,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Tanh => "tanh",
            Func::Sech => "sech",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "abs" => Some(Func::Abs),
            "tanh" => Some(Func::Tanh),
            "sech" => Some(Func::Sech),
            _ => None,
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Exp => v.exp(),
            Func::Abs => v.abs(),
            Func::Tanh => v.tanh(),
            // 1/cosh(v) underflows gracefully to 0 for large |v|.
            Func::Sech => 1.0 / v.cosh(),
        }
    }
}

/// One branch of a `piecewise` expression, active on `[lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub expr: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    Piecewise(Vec<Piece>),
    Indicator(f64, f64),
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn mul(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Mul, lhs, rhs)
    }

    pub fn div(lhs: Expr, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Div, lhs, rhs)
    }

    /// `1 / self`, used for the `1/p` and `1/r` norms.
    pub fn reciprocal(&self) -> Expr {
        Expr::div(Expr::Const(1.0), self.clone())
    }

    pub fn abs(self) -> Expr {
        Expr::Call(Func::Abs, Box::new(self))
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = self.eval_raw(x)?;
        if v.is_nan() {
            Err(EvalError::Undefined { x })
        } else if v.is_infinite() {
            Err(EvalError::Pole { x })
        } else {
            Ok(v)
        }
    }

    fn eval_raw(&self, x: f64) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var => x,
            Expr::Neg(e) => -e.eval_raw(x)?,
            Expr::Binary(op, a, b) => {
                let a = a.eval_raw(x)?;
                let b = b.eval_raw(x)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::Pole { x });
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        if a == 0.0 && b < 0.0 {
                            return Err(EvalError::Pole { x });
                        }
                        a.powf(b)
                    }
                }
            }
            Expr::Call(f, e) => f.apply(e.eval_raw(x)?),
            Expr::Min(a, b) => a.eval_raw(x)?.min(b.eval_raw(x)?),
            Expr::Max(a, b) => a.eval_raw(x)?.max(b.eval_raw(x)?),
            Expr::Piecewise(pieces) => {
                match pieces.iter().find(|p| p.lo <= x && x < p.hi) {
                    Some(p) => p.expr.eval_raw(x)?,
                    None => return Err(EvalError::Undefined { x }),
                }
            }
            Expr::Indicator(lo, hi) => {
                if *lo <= x && x < *hi {
                    1.0
                } else {
                    0.0
                }
            }
        })
    }

    /// True when the expression does not mention `x`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.is_constant(),
            Expr::Binary(_, a, b) | Expr::Min(a, b) | Expr::Max(a, b) => {
                a.is_constant() && b.is_constant()
            }
            Expr::Piecewise(_) | Expr::Indicator(..) => false,
        }
    }

    /// True when the expression is `x`-free and evaluates to exactly one.
    pub fn is_identically_one(&self) -> bool {
        self.is_constant() && matches!(self.eval(0.0), Ok(v) if v == 1.0)
    }

    /// Finite interval endpoints of every `piecewise` and `indicator` node,
    /// sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(&mut out);
        out.retain(|v| v.is_finite());
        out.sort_by(|a, b| a.total_cmp(b));
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            Expr::Const(_) | Expr::Var => {}
            Expr::Neg(e) | Expr::Call(_, e) => e.collect_breakpoints(out),
            Expr::Binary(_, a, b) | Expr::Min(a, b) | Expr::Max(a, b) => {
                a.collect_breakpoints(out);
                b.collect_breakpoints(out);
            }
            Expr::Piecewise(pieces) => {
                for p in pieces {
                    out.push(p.lo);
                    out.push(p.hi);
                    p.expr.collect_breakpoints(out);
                }
            }
            Expr::Indicator(lo, hi) => {
                out.push(*lo);
                out.push(*hi);
            }
        }
    }

    /// Breakpoints restricted to the open interval `(lo, hi)`.
    pub fn breakpoints_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.breakpoints()
            .into_iter()
            .filter(|&b| b > lo && b < hi)
            .collect()
    }

    /// Locates the points of `[lo, hi]` where some denominator of the
    /// expression vanishes.
    ///
    /// Every divisor and every base raised to a negative constant power is
    /// scanned for sign changes and for local minima of its modulus that
    /// touch zero; candidates are polished by bisection. Points where the
    /// whole expression still evaluates finitely (removable cases) are
    /// dropped.
    pub fn poles_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut dens = Vec::new();
        self.collect_denominators(&mut dens);
        let mut poles = Vec::new();
        for d in dens {
            locate_zeros(d, lo, hi, &mut poles);
        }
        poles.sort_by(|a, b| a.total_cmp(b));
        poles.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
        poles.retain(|&x| self.blows_up_at(x));
        poles
    }

    /// True when `|self|` grows without bound as `x0` is approached, as
    /// opposed to a removable `0/0`.
    pub fn blows_up_at(&self, x0: f64) -> bool {
        let near = |d: f64| {
            [x0 - d, x0 + d]
                .iter()
                .map(|&x| self.eval(x).map(f64::abs).unwrap_or(f64::INFINITY))
                .fold(0.0_f64, f64::max)
        };
        let scale = 1e-12 * (1.0 + x0.abs());
        let close = near(scale * 1e3);
        let far = near(1e-3 * (1.0 + x0.abs()));
        close == f64::INFINITY || close > 1e4 * far.max(1.0)
    }

    fn collect_denominators<'a>(&'a self, out: &mut Vec<&'a Expr>) {
        match self {
            Expr::Const(_) | Expr::Var | Expr::Indicator(..) => {}
            Expr::Neg(e) | Expr::Call(_, e) => e.collect_denominators(out),
            Expr::Binary(op, a, b) => {
                match op {
                    BinOp::Div => out.push(b),
                    BinOp::Pow if matches!(**b, Expr::Const(c) if c < 0.0) => out.push(a),
                    _ => {}
                }
                a.collect_denominators(out);
                b.collect_denominators(out);
            }
            Expr::Min(a, b) | Expr::Max(a, b) => {
                a.collect_denominators(out);
                b.collect_denominators(out);
            }
            Expr::Piecewise(pieces) => {
                for p in pieces {
                    p.expr.collect_denominators(out);
                }
            }
        }
    }

    /// `max(self, 0)` and `max(-self, 0)`, so that `self = plus - minus`.
    pub fn split_sign(&self) -> (Expr, Expr) {
        let zero = || Box::new(Expr::Const(0.0));
        let plus = Expr::Max(Box::new(self.clone()), zero());
        let minus = Expr::Max(Box::new(Expr::Neg(Box::new(self.clone()))), zero());
        (plus, minus)
    }
}

fn locate_zeros(d: &Expr, lo: f64, hi: f64, out: &mut Vec<f64>) {
    const SEEDS: usize = 4096;
    let mut cuts = vec![lo];
    cuts.extend(d.breakpoints_in(lo, hi));
    cuts.push(hi);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let xs: Vec<f64> = (0..=SEEDS)
            .map(|i| a + (b - a) * i as f64 / SEEDS as f64)
            .collect();
        let vs: Vec<Option<f64>> = xs.iter().map(|&x| d.eval(x).ok()).collect();
        for i in 0..xs.len() {
            let Some(v) = vs[i] else { continue };
            if v == 0.0 {
                out.push(xs[i]);
                continue;
            }
            if i + 1 < xs.len() {
                if let Some(w) = vs[i + 1] {
                    if w != 0.0 && v.signum() != w.signum() {
                        out.push(bisect_sign(d, xs[i], xs[i + 1]));
                    }
                }
            }
            // local minimum of |d|: refine by ternary search
            if i > 0 && i + 1 < xs.len() {
                if let (Some(l), Some(r)) = (vs[i - 1], vs[i + 1]) {
                    let (va, la, ra) = (v.abs(), l.abs(), r.abs());
                    let dip = va <= la && va <= ra && (va < la || va < ra);
                    if dip && v.signum() == l.signum() && v.signum() == r.signum() {
                        if let Some(z) = refine_min_abs(d, xs[i - 1], xs[i + 1]) {
                            out.push(z);
                        }
                    }
                }
            }
        }
    }
}

fn bisect_sign(d: &Expr, mut a: f64, mut b: f64) -> f64 {
    let fa = d.eval(a).unwrap_or(0.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        match d.eval(m) {
            Ok(v) if v == 0.0 => return m,
            Ok(v) if v.signum() == fa.signum() => a = m,
            _ => b = m,
        }
    }
    0.5 * (a + b)
}

fn refine_min_abs(d: &Expr, a0: f64, b0: f64) -> Option<f64> {
    let (mut a, mut b) = (a0, b0);
    let g = |x: f64| d.eval(x).map(f64::abs).unwrap_or(0.0);
    for _ in 0..200 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if g(m1) <= g(m2) {
            b = m2;
        } else {
            a = m1;
        }
        if b - a <= f64::EPSILON * (1.0 + a.abs()) {
            break;
        }
    }
    let m = 0.5 * (a + b);
    let reference = g(a0).max(g(b0));
    (g(m) <= 1e-14 * reference || d.eval(m).is_err()).then_some(m)
}

/// Interval endpoints are read as signed literals, without parentheses.
fn fmt_endpoint(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match v {
        f64::INFINITY => write!(f, "inf"),
        f64::NEG_INFINITY => write!(f, "-inf"),
        _ => write!(f, "{v}"),
    }
}

fn fmt_number(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v == f64::INFINITY {
        write!(f, "inf")
    } else if v == f64::NEG_INFINITY {
        write!(f, "-inf")
    } else if v < 0.0 || (v == 0.0 && v.is_sign_negative()) {
        write!(f, "(-{})", -v)
    } else {
        write!(f, "{v}")
    }
}

/// Fully parenthesised infix form; re-parses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => fmt_number(*c, f),
            Expr::Var => write!(f, "x"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Min(a, b) => write!(f, "min({a}, {b})"),
            Expr::Max(a, b) => write!(f, "max({a}, {b})"),
            Expr::Piecewise(pieces) => {
                write!(f, "piecewise(")?;
                for (i, p) in pieces.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "(")?;
                    fmt_endpoint(p.lo, f)?;
                    write!(f, ", ")?;
                    fmt_endpoint(p.hi, f)?;
                    write!(f, ", {})", p.expr)?;
                }
                write!(f, ")")
            }
            Expr::Indicator(lo, hi) => {
                write!(f, "indicator(")?;
                fmt_endpoint(*lo, f)?;
                write!(f, ", ")?;
                fmt_endpoint(*hi, f)?;
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::parse_expr;

    #[test]
    fn evaluation_is_deterministic() {
        let e = parse_expr("exp(-abs(x))*tanh(x)+sech(x)^2").unwrap();
        for i in 0..100 {
            let x = -5.0 + 0.1 * i as f64;
            assert_eq!(e.eval(x).unwrap().to_bits(), e.eval(x).unwrap().to_bits());
        }
    }

    #[test]
    fn pole_reports_location() {
        let e = parse_expr("1/x").unwrap();
        assert_eq!(e.eval(0.0), Err(EvalError::Pole { x: 0.0 }));
        let e = parse_expr("x^(-2)").unwrap();
        assert_eq!(e.eval(0.0), Err(EvalError::Pole { x: 0.0 }));
    }

    #[test]
    fn poles_are_located() {
        let e = parse_expr("1/(x-0.3)").unwrap();
        let poles = e.poles_in(-2.0, 2.0);
        assert_eq!(poles.len(), 1);
        assert!((poles[0] - 0.3).abs() < 1e-12);

        // double root of the denominator, no sign change
        let e = parse_expr("1/(x-1)^2").unwrap();
        let poles = e.poles_in(-2.0, 3.0);
        assert_eq!(poles.len(), 1, "{poles:?}");
        assert!((poles[0] - 1.0).abs() < 1e-6);

        let e = parse_expr("1/(1+x^2)").unwrap();
        assert!(e.poles_in(-10.0, 10.0).is_empty());
    }

    #[test]
    fn breakpoints_from_piecewise_and_indicator() {
        let e = parse_expr("indicator(0,1) + piecewise((-inf,-2,0),(-2,inf,x))").unwrap();
        assert_eq!(e.breakpoints(), vec![-2.0, 0.0, 1.0]);
    }

    #[test]
    fn identically_one() {
        assert!(parse_expr("1").unwrap().is_identically_one());
        assert!(parse_expr("2/2").unwrap().is_identically_one());
        assert!(!parse_expr("x/x").unwrap().is_identically_one());
        assert!(!parse_expr("2").unwrap().is_identically_one());
    }
}
