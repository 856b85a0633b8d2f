//! Recursive-descent parser for coefficient expressions.
//!
//! Precedence, loosest first: `+ -`, `* /`, unary minus, `^` (right
//! associative). `-x^2` therefore parses as `-(x^2)`, while the exponent of
//! `^` may itself carry a sign (`x^-2`).

use crate::coeff::expr::{BinOp, Expr, Func, Piece};
use crate::error::{ParseError, ParseErrorKind};

/// Parses `text` into an expression tree.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(ParseErrorKind::UnexpectedToken(p.peek_char().unwrap_or(' '))));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { offset: self.pos, kind }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek_char() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.skip_ws();
            Err(match self.peek_char() {
                Some(found) => self.error(ParseErrorKind::Expected { expected: c, found }),
                None => self.error(ParseErrorKind::UnexpectedEnd),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::binary(BinOp::Add, lhs, self.term()?);
            } else if self.eat('-') {
                lhs = Expr::binary(BinOp::Sub, lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::binary(BinOp::Mul, lhs, self.unary()?);
            } else if self.eat('/') {
                lhs = Expr::binary(BinOp::Div, lhs, self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            let operand = self.unary()?;
            return Ok(match operand {
                Expr::Const(c) => Expr::Const(-c),
                other => Expr::Neg(Box::new(other)),
            });
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let Some(c) = self.peek_char() else {
            return Err(self.error(ParseErrorKind::UnexpectedEnd));
        };
        if c == '(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == '.' {
            return self.number().map(Expr::Const);
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            let ident = self.ident();
            return self.named(ident, start);
        }
        Err(self.error(ParseErrorKind::UnexpectedToken(c)))
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek_char() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        &self.src[start..self.pos]
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = &self.src[start..i];
        match text.parse::<f64>() {
            Ok(v) => {
                self.pos = i;
                Ok(v)
            }
            Err(_) => Err(ParseError {
                offset: start,
                kind: ParseErrorKind::BadNumber(text.to_string()),
            }),
        }
    }

    /// A signed literal, `inf` or `-inf`; used for interval bounds.
    fn bound(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let negative = self.eat('-');
        self.skip_ws();
        let v = if self.src[self.pos..].starts_with("inf") {
            self.pos += 3;
            f64::INFINITY
        } else {
            self.number()?
        };
        Ok(if negative { -v } else { v })
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect('(')?;
        let mut out = vec![self.expr()?];
        while self.eat(',') {
            out.push(self.expr()?);
        }
        self.expect(')')?;
        Ok(out)
    }

    fn named(&mut self, ident: &str, start: usize) -> Result<Expr, ParseError> {
        if ident == "x" {
            return Ok(Expr::Var);
        }
        if let Some(func) = Func::from_name(ident) {
            let mut args = self.args()?;
            if args.len() != 1 {
                return Err(arity(ident, start, "1", args.len()));
            }
            return Ok(Expr::Call(func, Box::new(args.remove(0))));
        }
        match ident {
            "min" | "max" => {
                let args = self.args()?;
                if args.len() < 2 {
                    return Err(arity(ident, start, "at least 2", args.len()));
                }
                let mut it = args.into_iter();
                let first = it.next().expect("nonempty");
                Ok(it.fold(first, |acc, e| {
                    if ident == "min" {
                        Expr::Min(Box::new(acc), Box::new(e))
                    } else {
                        Expr::Max(Box::new(acc), Box::new(e))
                    }
                }))
            }
            "indicator" => {
                self.expect('(')?;
                let lo = self.bound()?;
                if !self.eat(',') {
                    return Err(arity(ident, start, "2", 1));
                }
                let hi = self.bound()?;
                if self.eat(',') {
                    return Err(arity(ident, start, "2", 3));
                }
                self.expect(')')?;
                if !(lo < hi) {
                    return Err(ParseError { offset: start, kind: ParseErrorKind::EmptyInterval { lo, hi } });
                }
                Ok(Expr::Indicator(lo, hi))
            }
            "piecewise" => self.piecewise(start),
            _ => Err(ParseError {
                offset: start,
                kind: ParseErrorKind::UnknownIdentifier(ident.to_string()),
            }),
        }
    }

    fn piecewise(&mut self, start: usize) -> Result<Expr, ParseError> {
        self.expect('(')?;
        let mut pieces = Vec::new();
        loop {
            self.expect('(')?;
            let lo = self.bound()?;
            self.expect(',')?;
            let hi = self.bound()?;
            self.expect(',')?;
            let expr = self.expr()?;
            self.expect(')')?;
            if !(lo < hi) {
                return Err(ParseError { offset: start, kind: ParseErrorKind::EmptyInterval { lo, hi } });
            }
            pieces.push(Piece { lo, hi, expr });
            if !self.eat(',') {
                break;
            }
        }
        self.expect(')')?;
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let covers = pieces.first().map(|p| p.lo) == Some(f64::NEG_INFINITY)
            && pieces.last().map(|p| p.hi) == Some(f64::INFINITY)
            && pieces.windows(2).all(|w| w[0].hi == w[1].lo);
        if !covers {
            return Err(ParseError { offset: start, kind: ParseErrorKind::PiecewiseCoverage });
        }
        Ok(Expr::Piecewise(pieces))
    }
}

fn arity(name: &str, offset: usize, expected: &'static str, found: usize) -> ParseError {
    ParseError {
        offset,
        kind: ParseErrorKind::Arity { name: name.to_string(), expected, found },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(text: &str, x: f64) -> f64 {
        parse_expr(text).unwrap().eval(x).unwrap()
    }

    #[test]
    fn literal_one() {
        assert_eq!(parse_expr("1").unwrap(), Expr::Const(1.0));
    }

    #[test]
    fn sech_well() {
        assert_eq!(eval("-2*sech(x)^2", 0.0), -2.0);
    }

    #[test]
    fn min_abs() {
        assert_eq!(eval("min(1,abs(x))", 0.5), 0.5);
        assert_eq!(eval("min(1,abs(x))", 3.0), 1.0);
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(eval("exp(-abs(x))", 0.0), 1.0);
        assert_eq!(eval("1+x^2", 2.0), 5.0);
        assert_eq!(eval("indicator(0,1)", 2.0), 0.0);
        assert_eq!(eval("indicator(0,1)", 0.0), 1.0);
    }

    #[test]
    fn precedence() {
        assert_eq!(eval("-x^2", 3.0), -9.0);
        assert_eq!(eval("2^3^2", 0.0), 512.0);
        assert_eq!(eval("x^-2", 2.0), 0.25);
        assert_eq!(eval("1-2-3", 0.0), -4.0);
        assert_eq!(eval("8/2/2", 0.0), 2.0);
        assert_eq!(eval("2*x+1", 1.5), 4.0);
        assert_eq!(eval("1e-1 * 10", 0.0), 1.0);
        assert_eq!(eval("max(x, 0, -1)", -4.0), 0.0);
    }

    #[test]
    fn piecewise_eval() {
        let text = "piecewise((-inf,0,-x),(0,1,x^2),(1,inf,1))";
        assert_eq!(eval(text, -2.0), 2.0);
        assert_eq!(eval(text, 0.5), 0.25);
        assert_eq!(eval(text, 7.0), 1.0);
    }

    #[test]
    fn piecewise_must_cover_line() {
        let err = parse_expr("piecewise((0,1,x),(1,inf,1))").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::PiecewiseCoverage);
        let err = parse_expr("piecewise((-inf,0,x),(0.5,inf,1))").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::PiecewiseCoverage);
    }

    #[test]
    fn syntax_error_offset() {
        let err = parse_expr("1 + * x").unwrap_err();
        assert_eq!(err.offset, 4);
        let err = parse_expr("(1 + x").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedEnd);
        let err = parse_expr("x y").unwrap_err();
        assert_eq!(err.offset, 2);
    }

    #[test]
    fn unknown_identifier() {
        let err = parse_expr("2*sin(x)").unwrap_err();
        assert_eq!(err.offset, 2);
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("sin".into()));
    }

    #[test]
    fn arity_mismatch() {
        let err = parse_expr("exp(x, 1)").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Arity { found: 2, .. }));
        let err = parse_expr("min(x)").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Arity { found: 1, .. }));
        let err = parse_expr("indicator(0)").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Arity { .. }));
    }

    #[test]
    fn display_round_trip() {
        for text in [
            "-2*sech(x)^2",
            "min(1,abs(x))",
            "piecewise((-inf,0,-x),(0,inf,x^2))",
            "1+x^2",
            "-0.2*indicator(0,1)",
            "-indicator(-1,1)",
            "piecewise((-inf,-1.5,0),(-1.5,2,x),(2,inf,1))",
            "x^-2 - (-3)",
        ] {
            let once = parse_expr(text).unwrap().to_string();
            let again = parse_expr(&once).unwrap().to_string();
            assert_eq!(once, again, "{text}");
        }
    }
}
