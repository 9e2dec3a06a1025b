//! Interval arithmetic for Euler pairings.
//!
//! Pairing values are only ever pinned down to intervals: a vanishing pattern
//! with open slots gives a half-line, an exact seed gives a point, additivity
//! over filtrations couples them linearly. Intersection to emptiness is the
//! contradiction signal.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::rational::{fmt_rat, rat_int, Rat};

use super::{ChiFact, ChiKey, Key};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    NegInf,
    Val(Rat),
    PosInf,
}

impl Bound {
    fn le(&self, other: &Bound) -> bool {
        match (self, other) {
            (Bound::NegInf, _) | (_, Bound::PosInf) => true,
            (Bound::PosInf, _) | (_, Bound::NegInf) => false,
            (Bound::Val(a), Bound::Val(b)) => a <= b,
        }
    }

    fn max(self, other: Bound) -> Bound {
        if self.le(&other) {
            other
        } else {
            self
        }
    }

    fn min(self, other: Bound) -> Bound {
        if self.le(&other) {
            self
        } else {
            other
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiInterval {
    pub lo: Bound,
    pub hi: Bound,
}

impl ChiInterval {
    pub fn unbounded() -> Self {
        ChiInterval { lo: Bound::NegInf, hi: Bound::PosInf }
    }

    pub fn exactly(v: Rat) -> Self {
        ChiInterval { lo: Bound::Val(v.clone()), hi: Bound::Val(v) }
    }

    pub fn at_least(v: Rat) -> Self {
        ChiInterval { lo: Bound::Val(v), hi: Bound::PosInf }
    }

    pub fn at_most(v: Rat) -> Self {
        ChiInterval { lo: Bound::NegInf, hi: Bound::Val(v) }
    }

    pub fn is_empty(&self) -> bool {
        !self.lo.le(&self.hi)
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.lo == Bound::Val(Rat::zero()) && self.hi == Bound::Val(Rat::zero())
    }

    pub fn excludes_zero(&self) -> bool {
        self.surely_positive() || self.surely_negative()
    }

    pub fn surely_positive(&self) -> bool {
        matches!(&self.lo, Bound::Val(v) if v > &Rat::zero())
    }

    pub fn surely_negative(&self) -> bool {
        matches!(&self.hi, Bound::Val(v) if v < &Rat::zero())
    }

    pub fn intersect(&self, other: &ChiInterval) -> ChiInterval {
        ChiInterval {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
        }
    }

    fn add(&self, other: &ChiInterval) -> ChiInterval {
        let lo = match (&self.lo, &other.lo) {
            (Bound::Val(a), Bound::Val(b)) => Bound::Val(a + b),
            _ => Bound::NegInf,
        };
        let hi = match (&self.hi, &other.hi) {
            (Bound::Val(a), Bound::Val(b)) => Bound::Val(a + b),
            _ => Bound::PosInf,
        };
        ChiInterval { lo, hi }
    }

    fn negate(&self) -> ChiInterval {
        let flip = |b: &Bound| match b {
            Bound::NegInf => Bound::PosInf,
            Bound::PosInf => Bound::NegInf,
            Bound::Val(v) => Bound::Val(-v.clone()),
        };
        ChiInterval { lo: flip(&self.hi), hi: flip(&self.lo) }
    }

    fn scaled(&self, coef: i64) -> ChiInterval {
        match coef {
            1 => self.clone(),
            -1 => self.negate(),
            _ => {
                let scale = |b: &Bound| match b {
                    Bound::NegInf => {
                        if coef > 0 { Bound::NegInf } else { Bound::PosInf }
                    }
                    Bound::PosInf => {
                        if coef > 0 { Bound::PosInf } else { Bound::NegInf }
                    }
                    Bound::Val(v) => Bound::Val(v * rat_int(coef)),
                };
                let a = scale(&self.lo);
                let b = scale(&self.hi);
                if coef > 0 {
                    ChiInterval { lo: a, hi: b }
                } else {
                    ChiInterval { lo: b, hi: a }
                }
            }
        }
    }
}

impl fmt::Display for ChiInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "(empty)");
        }
        if let (Bound::Val(a), Bound::Val(b)) = (&self.lo, &self.hi) {
            if a == b {
                return write!(f, "{{{}}}", fmt_rat(a));
            }
        }
        match &self.lo {
            Bound::NegInf => write!(f, "(-inf, ")?,
            Bound::Val(v) => write!(f, "[{}, ", fmt_rat(v))?,
            Bound::PosInf => write!(f, "(+inf, ")?,
        }
        match &self.hi {
            Bound::PosInf => write!(f, "+inf)"),
            Bound::Val(v) => write!(f, "{}]", fmt_rat(v)),
            Bound::NegInf => write!(f, "-inf)"),
        }
    }
}

/// Alternating-sum interval for a window pattern: `nz_even`/`nz_odd` count
/// the slots known nonzero, `unknown` lists the unresolved slots.
pub fn pattern_interval(nz_even: i64, nz_odd: i64, unknown: &[Key]) -> ChiInterval {
    let u_even = unknown.iter().filter(|k| k.s.rem_euclid(2) == 0).count() as i64;
    let u_odd = unknown.len() as i64 - u_even;
    let lo = if nz_odd + u_odd > 0 {
        Bound::NegInf
    } else {
        Bound::Val(rat_int(nz_even))
    };
    let hi = if nz_even + u_even > 0 {
        Bound::PosInf
    } else {
        Bound::Val(rat_int(-nz_odd))
    };
    ChiInterval { lo, hi }
}

/// A linear relation `sum coef_i x_i = 0` over pairing values.
#[derive(Debug, Clone)]
pub struct Equation {
    pub terms: Vec<(ChiKey, i64)>,
}

/// Solve each variable against the rest of its equation, returning proposed
/// refinements. Missing entries count as unbounded.
pub fn refine_equation(
    eq: &Equation,
    chi: &BTreeMap<ChiKey, ChiFact>,
) -> Vec<(ChiKey, ChiInterval)> {
    let lookup = |k: &ChiKey| -> ChiInterval {
        chi.get(k).map(|f| f.interval.clone()).unwrap_or_else(ChiInterval::unbounded)
    };
    let mut out = Vec::new();
    for (i, (key, coef)) in eq.terms.iter().enumerate() {
        let mut rest = ChiInterval::exactly(Rat::zero());
        for (j, (other, ocoef)) in eq.terms.iter().enumerate() {
            if i == j {
                continue;
            }
            rest = rest.add(&lookup(other).scaled(*ocoef));
        }
        // coef * x = -rest
        let solved = rest.negate().scaled(*coef); // coef in {1, -1}
        if solved != ChiInterval::unbounded() {
            out.push((key.clone(), solved));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vanishing::RootRef;

    fn key(s: i64) -> Key {
        Key { src: RootRef::Clifford, tgt: RootRef::Named(0), d: -1, s }
    }

    #[test]
    fn pattern_intervals() {
        assert!(pattern_interval(0, 0, &[]).is_exactly_zero());
        let one_odd_unknown = pattern_interval(0, 0, &[key(1)]);
        assert_eq!(one_odd_unknown, ChiInterval::at_most(Rat::zero()));
        let one_even_nz = pattern_interval(1, 0, &[]);
        assert_eq!(one_even_nz, ChiInterval::at_least(rat_int(1)));
        let mixed = pattern_interval(1, 1, &[]);
        assert_eq!(mixed, ChiInterval::unbounded());
    }

    #[test]
    fn intersect_and_empty() {
        let a = ChiInterval::at_most(Rat::zero());
        let b = ChiInterval::at_least(rat_int(1));
        assert!(a.intersect(&b).is_empty());
        let c = ChiInterval::at_least(Rat::zero());
        assert!(a.intersect(&c).is_exactly_zero());
    }

    #[test]
    fn interval_sum_and_negation() {
        let a = ChiInterval::exactly(rat_int(2));
        let b = ChiInterval::at_least(rat_int(1));
        let s = a.add(&b);
        assert_eq!(s, ChiInterval::at_least(rat_int(3)));
        assert_eq!(s.negate(), ChiInterval::at_most(rat_int(-3)));
    }
}
