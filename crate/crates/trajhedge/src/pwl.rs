//! Exact minimization of a finite maximum of affine functions of one variable.
//!
//! The one-step superhedging program `min V s.t. V + h Δ_i ≥ c_i` is the
//! minimization of `φ(h) = max_i (c_i − h Δ_i)`, a convex piecewise-linear
//! function. Its LP dual has vertices supported on a single zero-slope line or
//! on a pair of lines with slopes of opposite sign, so the optimal value is
//! the largest of those intersection heights. The optimal hedge set is then
//! the interval where every line stays below that value.

use num_traits::{Signed, Zero};

use crate::num::Q;

/// One constraint `V + h · delta ≥ cont`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub delta: Q,
    pub cont: Q,
}

impl Line {
    pub fn new(delta: Q, cont: Q) -> Self {
        Line { delta, cont }
    }

    /// The required capital `cont − h · delta` at hedge `h`.
    pub fn at(&self, h: &Q) -> Q {
        &self.cont - h * &self.delta
    }
}

/// Direction in which the hedge escapes when a program is unbounded or its
/// infimum is approached only asymptotically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn sign(self) -> i64 {
        match self {
            Direction::Up => 1,
            Direction::Down => -1,
        }
    }
}

/// Result of minimizing the upper envelope of finitely many lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnvelopeMin {
    /// Finite minimum `value`, attained exactly on `[lo, hi]` (`None` = unbounded side).
    Bounded { value: Q, lo: Option<Q>, hi: Option<Q> },
    /// The envelope decreases without bound as `h` moves in `Direction`.
    Unbounded(Direction),
    /// No lines at all.
    Empty,
}

impl EnvelopeMin {
    /// The optimal hedge of smallest magnitude (deterministic choice).
    pub fn canonical_hedge(&self) -> Option<Q> {
        match self {
            EnvelopeMin::Bounded { lo, hi, .. } => Some(clamp_zero(lo.as_ref(), hi.as_ref())),
            _ => None,
        }
    }
}

/// The point of `[lo, hi]` closest to zero.
pub fn clamp_zero(lo: Option<&Q>, hi: Option<&Q>) -> Q {
    if let Some(l) = lo {
        if l.is_positive() {
            return l.clone();
        }
    }
    if let Some(h) = hi {
        if h.is_negative() {
            return h.clone();
        }
    }
    Q::zero()
}

/// Maximum of `c_i − h Δ_i` over all lines.
pub fn envelope(lines: &[Line], h: &Q) -> Option<Q> {
    lines.iter().map(|l| l.at(h)).max()
}

/// Minimizes the upper envelope exactly.
pub fn minimize(lines: &[Line]) -> EnvelopeMin {
    if lines.is_empty() {
        return EnvelopeMin::Empty;
    }
    // Slope of `c − hΔ` in h is `−Δ`.
    let mut best: Option<Q> = None;
    let mut push = |v: Q| {
        if best.as_ref().is_none_or(|b| v > *b) {
            best = Some(v);
        }
    };
    for l in lines.iter().filter(|l| l.delta.is_zero()) {
        push(l.cont.clone());
    }
    let rising: Vec<&Line> = lines.iter().filter(|l| l.delta.is_negative()).collect();
    let falling: Vec<&Line> = lines.iter().filter(|l| l.delta.is_positive()).collect();
    for a in &rising {
        for b in &falling {
            // Intersection of c_a − hΔ_a and c_b − hΔ_b.
            let h = (&a.cont - &b.cont) / (&a.delta - &b.delta);
            push(a.at(&h));
        }
    }
    let Some(value) = best else {
        return if rising.is_empty() {
            EnvelopeMin::Unbounded(Direction::Up)
        } else {
            EnvelopeMin::Unbounded(Direction::Down)
        };
    };
    let (mut lo, mut hi): (Option<Q>, Option<Q>) = (None, None);
    for l in lines {
        if l.delta.is_zero() {
            continue;
        }
        // c − hΔ ≤ value  ⇔  hΔ ≥ c − value.
        let bound = (&l.cont - &value) / &l.delta;
        if l.delta.is_positive() {
            if lo.as_ref().is_none_or(|x| bound > *x) {
                lo = Some(bound);
            }
        } else if hi.as_ref().is_none_or(|x| bound < *x) {
            hi = Some(bound);
        }
    }
    EnvelopeMin::Bounded { value, lo, hi }
}

/// Indices of the lines that are tight at hedge `h` for capital `value`.
pub fn tight(lines: &[Line], h: &Q, value: &Q) -> Vec<usize> {
    lines
        .iter()
        .enumerate()
        .filter(|(_, l)| l.at(h) == *value)
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qi};

    fn line(d: i64, c: i64) -> Line {
        Line::new(qi(d), qi(c))
    }

    #[test]
    fn two_sided_program() {
        // V + h ≥ 2, V − h ≥ 0  →  value 1 at h = 1.
        let m = minimize(&[line(1, 2), line(-1, 0)]);
        assert_eq!(
            m,
            EnvelopeMin::Bounded {
                value: qi(1),
                lo: Some(qi(1)),
                hi: Some(qi(1))
            }
        );
        assert_eq!(m.canonical_hedge(), Some(qi(1)));
    }

    #[test]
    fn zero_slope_dominates() {
        // V ≥ 3 and V + h ≥ 1: value 3, any h ≥ −2.
        let m = minimize(&[line(0, 3), line(1, 1)]);
        assert_eq!(
            m,
            EnvelopeMin::Bounded {
                value: qi(3),
                lo: Some(qi(-2)),
                hi: None
            }
        );
        assert_eq!(m.canonical_hedge(), Some(qi(0)));
    }

    #[test]
    fn one_sided_program_is_unbounded() {
        assert_eq!(
            minimize(&[line(1, 1), line(2, 5)]),
            EnvelopeMin::Unbounded(Direction::Up)
        );
        assert_eq!(minimize(&[line(-1, 1)]), EnvelopeMin::Unbounded(Direction::Down));
    }

    #[test]
    fn three_lines() {
        // V ≥ max(0, h, 2/3 − h) → h = 1/3, value 1/3.
        let m = minimize(&[line(0, 0), line(-1, 0), Line::new(qi(1), q(2, 3))]);
        assert_eq!(m.canonical_hedge(), Some(q(1, 3)));
        match m {
            EnvelopeMin::Bounded { value, .. } => assert_eq!(value, q(1, 3)),
            other => panic!("{other:?}"),
        }
    }
}
