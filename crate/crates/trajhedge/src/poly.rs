//! Polynomials in `t = 1/n` with exact rational coefficients.
//!
//! A countable branch family is described by a polynomial `p(t)` evaluated at
//! `t = 1/n` for `n ≥ n0`. Questions such as "what is the supremum over the
//! members" or "which members vanish" are answered exactly: real roots of `p`
//! and `p'` are isolated numerically on `(0, 1/n0]`, and only the integer
//! neighbours of those roots (plus `n0` and the limit `t → 0`) are evaluated,
//! in exact arithmetic. On every monotone piece of `p` the discrete extremum
//! sits next to a piece endpoint, so the candidate set is complete.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::num::{fmt_q, parse_q, recip, to_f64, Q};

/// Polynomial `c0 + c1 t + c2 t^2 + ...` (trailing zeros trimmed).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Q>,
}

/// Supremum (or infimum) of a polynomial over the members `t = 1/n, n ≥ n0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberExtremum {
    /// The extremal value, possibly only approached in the limit `n → ∞`.
    pub value: Q,
    /// Smallest member attaining `value`, or `None` if only the limit does.
    pub attained_at: Option<u64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Q) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `c t^k`.
    pub fn monomial(c: Q, k: usize) -> Self {
        let mut v = vec![Q::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    /// Coefficient of `t^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, t: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Value of the member with index `n`, i.e. `p(1/n)`.
    pub fn at_member(&self, n: u64) -> Q {
        self.eval(&recip(n))
    }

    /// The limit `p(0)` as `n → ∞`.
    pub fn at_zero(&self) -> Q {
        self.coeff(0)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Q::from_integer((k as i64).into()))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Q) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(to_f64).collect()
    }

    /// Parses a comma separated coefficient list `c0,c1,...`.
    pub fn parse(text: &str) -> Result<Poly, String> {
        let coeffs = text.split(',').map(parse_q).collect::<Result<Vec<_>, _>>()?;
        Ok(Poly::new(coeffs))
    }

    /// Comma separated coefficient list, the inverse of [`Poly::parse`].
    pub fn to_list(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        self.coeffs.iter().map(fmt_q).collect::<Vec<_>>().join(",")
    }

    /// Integer members `n ≥ n0` near real roots of `self` and of its
    /// derivative, together with `n0` and `n0 + 1`.
    pub fn candidate_members(&self, n0: u64) -> Vec<u64> {
        let mut set = BTreeSet::new();
        set.insert(n0);
        set.insert(n0 + 1);
        let hi = 1.0 / n0 as f64;
        let f = self.to_f64_coeffs();
        let df = self.derivative().to_f64_coeffs();
        let mut roots = real_roots(&f, 0.0, hi);
        roots.extend(real_roots(&df, 0.0, hi));
        for r in roots {
            if r <= 0.0 {
                continue;
            }
            let m = 1.0 / r;
            if !m.is_finite() || m > 1e15 {
                continue;
            }
            let lo = (m.floor() as u64).saturating_sub(1).max(n0);
            let up = (m.ceil() as u64).saturating_add(1).max(n0);
            for n in lo..=up {
                set.insert(n);
            }
        }
        set.into_iter().collect()
    }

    /// Exact supremum of `p(1/n)` over `n ≥ n0`.
    pub fn sup_members(&self, n0: u64) -> MemberExtremum {
        let mut best: Option<(Q, u64)> = None;
        for n in self.candidate_members(n0) {
            let v = self.at_member(n);
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, n));
            }
        }
        let (bv, bn) = best.expect("candidate set is never empty");
        let limit = self.at_zero();
        if limit > bv {
            MemberExtremum {
                value: limit,
                attained_at: None,
            }
        } else {
            MemberExtremum {
                value: bv,
                attained_at: Some(bn),
            }
        }
    }

    /// Exact infimum of `p(1/n)` over `n ≥ n0`.
    pub fn inf_members(&self, n0: u64) -> MemberExtremum {
        let s = (-self).sup_members(n0);
        MemberExtremum {
            value: -s.value,
            attained_at: s.attained_at,
        }
    }

    /// All members `n ≥ n0` with `p(1/n) = v` (at most `deg p` of them unless
    /// `p` is constant, which yields an empty list for `v ≠ p` and an error-free
    /// `[n0]` marker otherwise; callers reject constant families earlier).
    pub fn members_equal(&self, v: &Q, n0: u64) -> Vec<u64> {
        let g = self - &Poly::constant(v.clone());
        if g.is_zero() {
            return vec![n0];
        }
        g.candidate_members(n0)
            .into_iter()
            .filter(|&n| g.at_member(n).is_zero())
            .collect()
    }

    /// Members with exactly zero value.
    pub fn zero_members(&self, n0: u64) -> Vec<u64> {
        self.members_equal(&Q::zero(), n0)
    }

    /// Whether some member has a strictly positive value.
    pub fn has_positive_member(&self, n0: u64) -> bool {
        let s = self.sup_members(n0);
        s.value.is_positive()
    }

    /// Whether some member has a strictly negative value.
    pub fn has_negative_member(&self, n0: u64) -> bool {
        self.inf_members(n0).value.is_negative()
    }

    /// Whether some member has value `≥ x` (attained, not only approached).
    pub fn exists_member_ge(&self, x: &Q, n0: u64) -> bool {
        let s = (self - &Poly::constant(x.clone())).sup_members(n0);
        s.value.is_positive() || (s.value.is_zero() && s.attained_at.is_some())
    }

    /// Whether some member has value `> x`.
    pub fn exists_member_gt(&self, x: &Q, n0: u64) -> bool {
        (self - &Poly::constant(x.clone())).sup_members(n0).value.is_positive()
    }

    /// Whether all members are `≥ 0`.
    pub fn nonneg_on_members(&self, n0: u64) -> bool {
        !self.has_negative_member(n0)
    }

    /// Index of the lowest nonzero coefficient.
    pub fn lowest_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Pretty form such as `1/2 + 1/2 t^2`.
    pub fn pretty(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = match k {
                0 => fmt_q(c),
                1 => format!("{} t", fmt_q(c)),
                _ => format!("{} t^{k}", fmt_q(c)),
            };
            parts.push(term);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

fn derivative_f64(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect()
}

/// Real roots of a polynomial (given by `f64` coefficients) in `[a, b]` at
/// which the polynomial changes sign or vanishes exactly at a piece endpoint.
///
/// Works recursively: the sign-change roots of the derivative split `[a, b]`
/// into monotone pieces, each holding at most one root, found by bisection.
pub fn real_roots(c: &[f64], a: f64, b: f64) -> Vec<f64> {
    let mut c = c.to_vec();
    while c.last().is_some_and(|x| *x == 0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    if c.len() == 2 {
        let r = -c[0] / c[1];
        return if r >= a && r <= b { vec![r] } else { Vec::new() };
    }
    let mut points = vec![a];
    points.extend(real_roots(&derivative_f64(&c), a, b));
    points.push(b);
    let mut roots: Vec<f64> = Vec::new();
    for w in points.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (mut flo, fhi) = (horner(&c, lo), horner(&c, hi));
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        if fhi == 0.0 || flo.signum() == fhi.signum() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = horner(&c, mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    if horner(&c, b) == 0.0 {
        roots.push(b);
    }
    roots.sort_by(|x, y| x.total_cmp(y));
    roots.dedup();
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qi};

    fn p(cs: &[(i64, i64)]) -> Poly {
        Poly::new(cs.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn sup_of_increasing_family_is_first_member() {
        // p(t) = t: members 1, 1/2, 1/3, ...
        let f = p(&[(0, 1), (1, 1)]);
        assert_eq!(
            f.sup_members(1),
            MemberExtremum {
                value: qi(1),
                attained_at: Some(1)
            }
        );
        assert_eq!(
            f.inf_members(1),
            MemberExtremum {
                value: qi(0),
                attained_at: None
            }
        );
        assert!(f.zero_members(1).is_empty());
    }

    #[test]
    fn interior_maximum_is_found_exactly() {
        // t - t^2 peaks at t = 1/2, i.e. n = 2 with value 1/4.
        let f = p(&[(0, 1), (1, 1), (-1, 1)]);
        assert_eq!(
            f.sup_members(1),
            MemberExtremum {
                value: q(1, 4),
                attained_at: Some(2)
            }
        );
        // t - 40 t^2 peaks near t = 1/80.
        let g = p(&[(0, 1), (1, 1), (-40, 1)]);
        let s = g.sup_members(1);
        assert_eq!(s.attained_at, Some(80));
        assert_eq!(s.value, q(1, 80) - q(40, 6400));
    }

    #[test]
    fn touching_zero_member_is_detected() {
        // (t - 1/3)^2 vanishes at the member n = 3 without a sign change.
        let f = &p(&[(-1, 3), (1, 1)]) * &p(&[(-1, 3), (1, 1)]);
        assert_eq!(f.zero_members(1), vec![3]);
        assert!(!f.has_negative_member(1));
    }

    #[test]
    fn limit_supremum_is_not_attained() {
        // -t^2: all members negative, sup 0 only in the limit.
        let f = p(&[(0, 1), (0, 1), (-1, 1)]);
        let s = f.sup_members(1);
        assert_eq!(s.value, qi(0));
        assert_eq!(s.attained_at, None);
        assert!(!f.exists_member_ge(&qi(0), 1));
        assert!(f.exists_member_ge(&qi(-1), 1));
    }

    #[test]
    fn arithmetic_and_parsing_round_trip() {
        let f = Poly::parse("1/2,0,1/2").unwrap();
        assert_eq!(f.to_list(), "1/2,0,1/2");
        assert_eq!(f.pretty(), "1/2 + 1/2 t^2");
        let g = &f * &f;
        assert_eq!(g.at_member(1), qi(1));
        assert_eq!((&f - &f), Poly::zero());
        assert_eq!(f.derivative(), Poly::parse("0,1").unwrap());
    }
}
