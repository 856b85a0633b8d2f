use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::Error;

/// A Lebesgue exponent in `[1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub const ONE: Exponent = Exponent::Finite(1.0);

    pub fn finite(self) -> Option<f64> {
        match self {
            Exponent::Finite(v) => Some(v),
            Exponent::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// Parses a comma-separated list, or a `start:step:stop` range, or the
    /// word `default` (which yields `None`).
    pub fn parse_list(text: &str) -> Result<Option<Vec<Exponent>>, Error> {
        let text = text.trim();
        if text == "default" {
            return Ok(None);
        }
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() == 3 {
            let num = |t: &str| -> Result<f64, Error> {
                t.trim().parse::<f64>().map_err(|_| Error::InvalidExponent(t.to_string()))
            };
            let (start, step, stop) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if !(step > 0.0) || !(start >= 1.0) || !stop.is_finite() || stop < start {
                return Err(Error::InvalidExponent(text.to_string()));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            return Ok(Some((0..count).map(|i| Exponent::Finite(start + step * i as f64)).collect()));
        }
        if parts.len() != 1 {
            return Err(Error::InvalidExponent(text.to_string()));
        }
        let list = text
            .split(',')
            .map(|t| t.trim().parse::<Exponent>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some(list))
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "inf" || t == "∞" {
            return Ok(Exponent::Infinite);
        }
        let bad = || Error::InvalidExponent(s.to_string());
        let v = match t.split_once('/') {
            Some((a, b)) => {
                let a: f64 = a.trim().parse().map_err(|_| bad())?;
                let b: f64 = b.trim().parse().map_err(|_| bad())?;
                a / b
            }
            None => t.parse::<f64>().map_err(|_| bad())?,
        };
        if !v.is_finite() || v < 1.0 {
            return Err(bad());
        }
        Ok(Exponent::Finite(v))
    }
}

/// Prints `inf`, an integer, a small-denominator fraction, or the decimal.
impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self {
            Exponent::Infinite => return write!(f, "inf"),
            Exponent::Finite(v) => *v,
        };
        for den in 1..=100u32 {
            let num = (v * den as f64).round();
            if (num / den as f64 - v).abs() <= 1e-12 * v.abs().max(1.0) {
                return if den == 1 { write!(f, "{num}") } else { write!(f, "{num}/{den}") };
            }
        }
        write!(f, "{v}")
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!("3/2".parse::<Exponent>().unwrap(), Exponent::Finite(1.5));
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinite);
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::Finite(2.0));
        assert!("1/2".parse::<Exponent>().is_err());
        assert!("abc".parse::<Exponent>().is_err());
    }

    #[test]
    fn ranges() {
        let list = Exponent::parse_list("1:0.1:3").unwrap().unwrap();
        assert_eq!(list.len(), 21);
        assert!((list[20].finite().unwrap() - 3.0).abs() < 1e-12);
        let list = Exponent::parse_list("1, 3/2,inf").unwrap().unwrap();
        assert_eq!(list, vec![Exponent::ONE, Exponent::Finite(1.5), Exponent::Infinite]);
        assert_eq!(Exponent::parse_list("default").unwrap(), None);
    }

    #[test]
    fn display() {
        assert_eq!(Exponent::Finite(1.5).to_string(), "3/2");
        assert_eq!(Exponent::Finite(1.25).to_string(), "5/4");
        assert_eq!(Exponent::Finite(2.0).to_string(), "2");
        assert_eq!(Exponent::Infinite.to_string(), "inf");
        assert_eq!(Exponent::Finite(1.0 + 0.1 * 3.0).to_string(), "13/10");
    }
}
