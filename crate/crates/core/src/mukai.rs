//! The rank-two even lattice spanned by `lambda1`, `lambda2` and its
//! embedding into characters.
//!
//! The Gram matrix is `[[2, -1], [-1, 2]]`. That normalization is pinned by
//! two dimension facts (`dim = v^2 + 2` giving 4 for `lambda1 + lambda2` and 8
//! for `2 lambda1 + lambda2`) together with the standard convention
//! `lambda_i^2 = 2`; the tests assert both facts so any alternative would fail
//! loudly.

use num_traits::ToPrimitive;

use crate::character::{preset, Character};
use crate::rational::{rat, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MukaiVector {
    pub a: i64,
    pub b: i64,
}

impl MukaiVector {
    pub fn new(a: i64, b: i64) -> Self {
        MukaiVector { a, b }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }
}

impl std::fmt::Display for MukaiVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}*lambda1 + {}*lambda2", self.a, self.b)
    }
}

/// Bilinear pairing with Gram matrix `[[2, -1], [-1, 2]]`.
pub fn pairing(v: &MukaiVector, w: &MukaiVector) -> i64 {
    2 * v.a * w.a - v.a * w.b - v.b * w.a + 2 * v.b * w.b
}

/// Euler form, exposed under the usual sign convention `chi = -pairing`.
/// Nothing numerical in this crate pins the sign; treat it as a convention.
pub fn euler(v: &MukaiVector, w: &MukaiVector) -> i64 {
    -pairing(v, w)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("expected dimension {0} is negative")]
pub struct NegativeDim(i64);

/// Expected moduli dimension `v^2 + 2`.
pub fn moduli_dim(v: &MukaiVector) -> Result<i64, NegativeDim> {
    let d = pairing(v, v) + 2;
    if d < 0 {
        Err(NegativeDim(d))
    } else {
        Ok(d)
    }
}

/// Image of `a lambda1 + b lambda2` in characters. Always lands on the plane
/// `c2 = -7/32 rank` (quoted at `beta = -1`).
pub fn to_character(v: &MukaiVector) -> Character {
    let l1 = preset("lambda1").unwrap();
    let l2 = preset("lambda2").unwrap();
    l1.scale(&Rat::from_integer(v.a.into())) + l2.scale(&Rat::from_integer(v.b.into()))
}

/// Discriminant of the character image; equals `9 a^2 + 7 (a - 2b)^2`.
pub fn delta_on_lattice(v: &MukaiVector) -> i64 {
    let d = to_character(v).discriminant();
    debug_assert!(d.is_integer());
    let closed = 9 * v.a * v.a + 7 * (v.a - 2 * v.b) * (v.a - 2 * v.b);
    debug_assert_eq!(d, Rat::from_integer(closed.into()));
    closed
}

/// Integral `(a, b)` with `to_character((a, b)) == v`, when one exists.
/// This is the lambda-plane membership test used on Kuznetsov-image classes.
pub fn lambda_class_of(v: &Character) -> Option<(i64, i64)> {
    if v.is_zero_class() {
        return Some((0, 0));
    }
    let w = v.to_frame(&rat(-1, 1));
    // c1@-1 = 3a, rank = 4a - 8b
    if !w.c1.is_integer() || !w.rank.is_integer() {
        return None;
    }
    let a3 = w.c1.to_integer().to_i64()?;
    if a3 % 3 != 0 {
        return None;
    }
    let a = a3 / 3;
    let rank = w.rank.to_integer().to_i64()?;
    let num = 4 * a - rank;
    if num % 8 != 0 {
        return None;
    }
    let b = num / 8;
    let cand = MukaiVector::new(a, b);
    if to_character(&cand).truncated() == v.truncated().to_frame(&Rat::zero()) && !cand.is_zero() {
        Some((a, b))
    } else {
        None
    }
}

/// Minimum of `delta_on_lattice` over nonzero vectors in the box
/// `|a|, |b| <= size`.
pub fn delta_minimum(size: i64) -> i64 {
    let mut best: Option<i64> = None;
    for a in -size..=size {
        for b in -size..=size {
            if a == 0 && b == 0 {
                continue;
            }
            let d = delta_on_lattice(&MukaiVector::new(a, b));
            best = Some(best.map_or(d, |m: i64| m.min(d)));
        }
    }
    best.unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::CharLattice;
    use crate::rational::rat_int;

    #[test]
    fn gram_matrix_is_pinned_by_dimensions() {
        assert_eq!(pairing(&MukaiVector::new(1, 1), &MukaiVector::new(1, 1)), 2);
        assert_eq!(moduli_dim(&MukaiVector::new(1, 1)).unwrap(), 4);
        assert_eq!(pairing(&MukaiVector::new(2, 1), &MukaiVector::new(2, 1)), 6);
        assert_eq!(moduli_dim(&MukaiVector::new(2, 1)).unwrap(), 8);
        assert_eq!(pairing(&MukaiVector::new(1, 2), &MukaiVector::new(1, 2)), 6);
        assert_eq!(pairing(&MukaiVector::new(1, 0), &MukaiVector::new(1, 0)), 2);
        assert_eq!(moduli_dim(&MukaiVector::new(1, 0)).unwrap(), 4);
    }

    #[test]
    fn pairing_is_symmetric_and_even() {
        for a in -4..=4 {
            for b in -4..=4 {
                for c in -4..=4 {
                    for d in -4..=4 {
                        let v = MukaiVector::new(a, b);
                        let w = MukaiVector::new(c, d);
                        assert_eq!(pairing(&v, &w), pairing(&w, &v));
                        assert_eq!(euler(&v, &w), -pairing(&v, &w));
                    }
                }
                assert_eq!(pairing(&MukaiVector::new(a, b), &MukaiVector::new(a, b)) % 2, 0);
            }
        }
    }

    #[test]
    fn character_images() {
        let at = |a, b| to_character(&MukaiVector::new(a, b)).to_frame(&rat_int(-1));
        let v = at(2, 1);
        assert_eq!((v.rank, v.c1, v.c2), (rat_int(0), rat_int(6), rat_int(0)));
        let v = at(1, 1);
        assert_eq!((v.rank, v.c1, v.c2), (rat_int(-4), rat_int(3), rat(7, 8)));
        let v = at(1, 0);
        assert_eq!((v.rank, v.c1, v.c2), (rat_int(4), rat_int(3), rat(-7, 8)));
    }

    #[test]
    fn to_character_is_additive_and_lands_in_the_lattice() {
        let lat = CharLattice::default_paper();
        for a in -6..=6 {
            for b in -6..=6 {
                let v = MukaiVector::new(a, b);
                let img = to_character(&v).to_frame(&rat_int(-1));
                assert_eq!(img.c2, rat(-7, 32) * &img.rank, "lambda plane at ({a},{b})");
                assert_eq!(lat.contains(&img), Ok(true));
                for c in -3..=3 {
                    for d in -3..=3 {
                        let w = MukaiVector::new(c, d);
                        let sum = MukaiVector::new(a + c, b + d);
                        assert_eq!(
                            to_character(&v) + to_character(&w),
                            to_character(&sum)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn delta_closed_form_and_examples() {
        assert_eq!(delta_on_lattice(&MukaiVector::new(2, 1)), 36);
        assert_eq!(delta_on_lattice(&MukaiVector::new(1, 1)), 16);
        for a in -100..=100 {
            for b in -100..=100 {
                // debug_assert inside checks the symbolic identity
                let _ = delta_on_lattice(&MukaiVector::new(a, b));
            }
        }
    }

    #[test]
    fn delta_minimum_on_box() {
        let min = delta_minimum(50);
        assert!(min >= 7);
        assert_eq!(min, 16);
    }

    #[test]
    fn lambda_class_recognition() {
        assert_eq!(lambda_class_of(&preset("E_C").unwrap()), Some((2, 1)));
        assert_eq!(lambda_class_of(&preset("M_l").unwrap()), Some((1, 1)));
        let off_plane = Character::from_frame(rat_int(4), rat_int(3), rat_int(0), rat_int(-1));
        assert_eq!(lambda_class_of(&off_plane), None);
        let b1 = crate::character::b_char(1);
        assert_eq!(lambda_class_of(&b1), None);
    }

    #[test]
    fn negative_dim_unreachable_on_a2() {
        // positive definite lattice: v^2 >= 0, so the error is never hit here
        for a in -20..=20 {
            for b in -20..=20 {
                assert!(moduli_dim(&MukaiVector::new(a, b)).is_ok());
            }
        }
    }
}
