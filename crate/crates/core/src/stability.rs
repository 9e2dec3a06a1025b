//! Central charges and slopes for the weak stability conditions
//! `sigma_{alpha, beta}`.
//!
//! The charge of a class `v` at `(alpha^2, beta)` is
//! `Z = i ch^beta_1 + 1/2 alpha^2 rank - ch^beta_2`, evaluated on the frame
//! `beta` components of `v`. Slopes are `-Re Z / Im Z` with `+inf` standing in
//! when `Im Z = 0`; every comparison cross-multiplies exact rationals, nothing
//! is ever divided eagerly.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::character::Character;
use crate::rational::{fmt_rat, rat_int, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StabilityParams {
    alpha_sq: Rat,
    pub beta: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("alpha^2 must be strictly positive, got {0}")]
pub struct NonPositiveAlpha(String);

impl StabilityParams {
    pub fn new(alpha_sq: Rat, beta: Rat) -> Result<Self, NonPositiveAlpha> {
        if alpha_sq.is_positive() {
            Ok(StabilityParams { alpha_sq, beta })
        } else {
            Err(NonPositiveAlpha(fmt_rat(&alpha_sq)))
        }
    }

    pub fn alpha_sq(&self) -> &Rat {
        &self.alpha_sq
    }
}

impl fmt::Display for StabilityParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(alpha^2 = {}, beta = {})",
            fmt_rat(&self.alpha_sq),
            fmt_rat(&self.beta)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChargeValue {
    pub re: Rat,
    pub im: Rat,
}

impl ChargeValue {
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl std::ops::Neg for ChargeValue {
    type Output = ChargeValue;
    fn neg(self) -> ChargeValue {
        ChargeValue {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl fmt::Display for ChargeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})i", fmt_rat(&self.re), fmt_rat(&self.im))
    }
}

pub fn central_charge(v: &Character, p: &StabilityParams) -> ChargeValue {
    let (rank, c1, c2) = v.components_in(&p.beta);
    ChargeValue {
        re: &p.alpha_sq / rat_int(2) * rank - c2,
        im: c1,
    }
}

/// `-Re Z / Im Z`, with `+inf` when the imaginary part vanishes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slope {
    Finite(Rat),
    Infinite,
}

impl Slope {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Slope::Finite(q) => Some(q),
            Slope::Infinite => None,
        }
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order with `+inf` above every rational; two infinities compare equal.
impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Slope::Infinite, Slope::Infinite) => Ordering::Equal,
            (Slope::Infinite, Slope::Finite(_)) => Ordering::Greater,
            (Slope::Finite(_), Slope::Infinite) => Ordering::Less,
            (Slope::Finite(a), Slope::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(q) => write!(f, "{}", fmt_rat(q)),
            Slope::Infinite => write!(f, "inf"),
        }
    }
}

pub fn slope(v: &Character, p: &StabilityParams) -> Slope {
    let z = central_charge(v, p);
    if z.im.is_zero() {
        Slope::Infinite
    } else {
        let mu = -&z.re / &z.im;
        debug_assert_eq!(
            Slope::Finite(mu.clone()),
            slope_expanded_form(v, p),
            "the two closed forms of the slope disagree"
        );
        Slope::Finite(mu)
    }
}

/// The expanded closed form of the slope, written on canonical-frame
/// components: `(c2 - 1/2 (alpha^2 + beta^2) rank) / (c1 - beta rank) - beta`.
/// Kept as a cross-check against the charge-quotient route.
pub fn slope_expanded_form(v: &Character, p: &StabilityParams) -> Slope {
    let (rank, c1, c2) = v.components_in(&Rat::zero());
    let denom = &c1 - &p.beta * &rank;
    if denom.is_zero() {
        return Slope::Infinite;
    }
    let num = &c2 - (&p.alpha_sq + &p.beta * &p.beta) / rat_int(2) * &rank;
    Slope::Finite(num / denom - p.beta.clone())
}

/// Weak positivity of the charge: `Im >= 0`, and `Re <= 0` whenever `Im = 0`.
pub fn weakly_positive(v: &Character, p: &StabilityParams) -> bool {
    let z = central_charge(v, p);
    z.im.is_positive() || (z.im.is_zero() && !z.re.is_positive())
}

/// Multiplication by `-i`, the rotation applied when tilting a second time.
pub fn rotate_second_tilt(z: &ChargeValue) -> ChargeValue {
    ChargeValue {
        re: z.im.clone(),
        im: -z.re.clone(),
    }
}

/// Sign of `Re(Z v) Im(Z w) - Re(Z w) Im(Z v)`: negative, zero or positive as
/// `mu(v)` is below, at, or above `mu(w)` when both imaginary parts are
/// positive. The building block for every wall equation.
pub fn charge_cross(v: &ChargeValue, w: &ChargeValue) -> Rat {
    &v.re * &w.im - &w.re * &v.im
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::{b_char, preset, Character};
    use crate::rational::rat;

    fn params(a: (i64, i64), b: i64) -> StabilityParams {
        StabilityParams::new(rat(a.0, a.1), rat_int(b)).unwrap()
    }

    #[test]
    fn rejects_non_positive_alpha() {
        assert!(StabilityParams::new(rat_int(0), rat_int(-1)).is_err());
        assert!(StabilityParams::new(rat(-1, 4), rat_int(-1)).is_err());
    }

    #[test]
    fn charge_of_the_cubic_class() {
        let z = central_charge(&preset("E_C").unwrap(), &params((9, 16), -1));
        assert_eq!(z, ChargeValue { re: rat_int(0), im: rat_int(6) });
    }

    #[test]
    fn charge_of_b1_at_its_kernel_point() {
        let z = central_charge(&b_char(1), &params((1, 16), -1));
        assert_eq!(z, ChargeValue { re: rat_int(0), im: rat_int(1) });
        assert!(central_charge(&Character::zero(), &params((1, 16), -1)).is_zero());
    }

    #[test]
    fn slope_examples() {
        let p = params((9, 16), -1);
        assert_eq!(slope(&preset("E_C").unwrap(), &p), Slope::Finite(rat_int(0)));
        let quotient = b_char(-1).shift(1);
        assert_eq!(slope(&quotient, &p), Slope::Finite(rat_int(0)));
        // vanishing imaginary part
        let v = Character::from_frame(rat_int(4), rat_int(0), rat(1, 8), rat_int(-1));
        assert_eq!(slope(&v, &p), Slope::Infinite);
    }

    #[test]
    fn slope_forms_agree_on_a_sweep() {
        let v = Character::new(rat_int(5), rat(-7, 3), rat(11, 6));
        for a in 1..6 {
            for b in -3..3 {
                let p = StabilityParams::new(rat(a, 7), rat(b, 2)).unwrap();
                let s = slope(&v, &p);
                if let Slope::Finite(_) = s {
                    assert_eq!(s, slope_expanded_form(&v, &p));
                }
            }
        }
    }

    #[test]
    fn weak_positivity_examples() {
        let p = params((1, 4), -1);
        assert!(weakly_positive(&preset("E_C").unwrap(), &p));
        assert!(weakly_positive(&Character::zero(), &p));
        assert!(!weakly_positive(&-preset("E_C").unwrap(), &p));
    }

    #[test]
    fn rotation_examples() {
        let z = ChargeValue { re: rat_int(0), im: rat_int(6) };
        assert_eq!(rotate_second_tilt(&z), ChargeValue { re: rat_int(6), im: rat_int(0) });
        let o = ChargeValue { re: rat_int(0), im: rat_int(0) };
        assert_eq!(rotate_second_tilt(&o), o);
        let mut w = z.clone();
        for _ in 0..4 {
            w = rotate_second_tilt(&w);
        }
        assert_eq!(w, z);
    }

    #[test]
    fn shift_negates_the_charge() {
        let v = Character::new(rat_int(3), rat(1, 2), rat(-5, 8));
        let p = params((3, 5), -1);
        assert_eq!(central_charge(&v.shift(1), &p), -central_charge(&v, &p));
    }

    #[test]
    fn rotation_preserves_wall_equations() {
        let v = preset("E_C").unwrap();
        let w = b_char(2);
        for a in [rat(9, 16), rat(1, 16), rat(1, 3)] {
            let p = StabilityParams::new(a, rat_int(-1)).unwrap();
            let zv = central_charge(&v, &p);
            let zw = central_charge(&w, &p);
            let cross = charge_cross(&zv, &zw);
            let rcross = charge_cross(&rotate_second_tilt(&zv), &rotate_second_tilt(&zw));
            assert_eq!(cross, rcross);
        }
    }
}
