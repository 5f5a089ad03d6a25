//! Exact rational arithmetic and the extended reals used by the operators.
//!
//! Every quantity that comes from tree data is an exact [`Q`]. Superhedging
//! values may additionally be `-inf` or `+inf`; [`ExtQ`] carries those and
//! implements the conventions `0 * inf = 0` and `inf + (-inf) = inf`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Exact rational number.
pub type Q = BigRational;

/// Builds `n / d` from machine integers.
///
/// # Panics
/// Panics if `d == 0`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `1 / n` for a family index.
pub fn recip(n: u64) -> Q {
    Q::new(BigInt::one(), BigInt::from(n))
}

/// Parses `p/q`, a plain integer, or a signed variant of either.
pub fn parse_q(text: &str) -> Result<Q, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty rational".to_string());
    }
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(num).map_err(|_| format!("invalid rational `{s}`"))?;
    let d = BigInt::from_str(den).map_err(|_| format!("invalid rational `{s}`"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Q::new(n, d))
}

/// Formats a rational as `p/q`, or as an integer when the denominator is 1.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Lossy conversion used only for diagnostics and root isolation.
pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Extremely large numerators: fall back to a scaled division.
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Closest rational with denominator at most `1 << 53` (exact for finite `f64`).
pub fn from_f64(x: f64) -> Option<Q> {
    Q::from_float(x)
}

/// A value in `Q ∪ {−∞, +∞}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtQ {
    NegInf,
    Finite(Q),
    PosInf,
}

impl ExtQ {
    pub fn zero() -> Self {
        ExtQ::Finite(Q::zero())
    }

    pub fn finite(&self) -> Option<&Q> {
        match self {
            ExtQ::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_neg_inf(&self) -> bool {
        matches!(self, ExtQ::NegInf)
    }

    /// Sum with the convention `inf + (-inf) = inf`.
    pub fn add(&self, other: &ExtQ) -> ExtQ {
        match (self, other) {
            (ExtQ::PosInf, _) | (_, ExtQ::PosInf) => ExtQ::PosInf,
            (ExtQ::NegInf, _) | (_, ExtQ::NegInf) => ExtQ::NegInf,
            (ExtQ::Finite(a), ExtQ::Finite(b)) => ExtQ::Finite(a + b),
        }
    }

    /// Product with a finite scalar, using `0 * inf = 0`.
    pub fn scale(&self, c: &Q) -> ExtQ {
        if c.is_zero() {
            return ExtQ::zero();
        }
        match self {
            ExtQ::Finite(a) => ExtQ::Finite(a * c),
            ExtQ::PosInf if c.is_positive() => ExtQ::PosInf,
            ExtQ::PosInf => ExtQ::NegInf,
            ExtQ::NegInf if c.is_positive() => ExtQ::NegInf,
            ExtQ::NegInf => ExtQ::PosInf,
        }
    }

    pub fn neg(&self) -> ExtQ {
        self.scale(&-Q::one())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtQ::NegInf => f64::NEG_INFINITY,
            ExtQ::PosInf => f64::INFINITY,
            ExtQ::Finite(x) => to_f64(x),
        }
    }
}

impl From<Q> for ExtQ {
    fn from(x: Q) -> Self {
        ExtQ::Finite(x)
    }
}

impl PartialOrd for ExtQ {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtQ {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtQ::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtQ::NegInf => write!(f, "-inf"),
            ExtQ::PosInf => write!(f, "+inf"),
            ExtQ::Finite(x) => write!(f, "{}", fmt_q(x)),
        }
    }
}

impl Serialize for ExtQ {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Serde helper: serialize a rational as its `p/q` string.
pub fn ser_q<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}

/// Serde helper for `Option<Q>`.
pub fn ser_opt_q<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&fmt_q(v)),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_formats() {
        assert_eq!(parse_q("-3/6").unwrap(), q(-1, 2));
        assert_eq!(parse_q("7").unwrap(), qi(7));
        assert_eq!(fmt_q(&q(4, 2)), "2");
        assert_eq!(fmt_q(&q(-1, 3)), "-1/3");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn extended_conventions() {
        let inf = ExtQ::PosInf;
        assert_eq!(inf.add(&ExtQ::NegInf), ExtQ::PosInf);
        assert_eq!(ExtQ::NegInf.scale(&Q::zero()), ExtQ::zero());
        assert!(ExtQ::NegInf < ExtQ::Finite(qi(-100)));
        assert_eq!(ExtQ::NegInf.scale(&qi(-2)), ExtQ::PosInf);
    }
}
