//! Euler characteristics on `P^3` and the twisted-pairing chain used for
//! rank-negative discriminant-zero classes.
//!
//! `chi_p3` evaluates `chi(O, F) = ch3 + 2 ch2 + 11/6 ch1 + rank`, the Todd
//! expansion on `P^3`. `chi_b2_chain` re-expresses `chi(O, F(-h))` through the
//! modified twisted character of `F`:
//!
//! ```text
//! chi(O, F(-h)) = chi(O, F) - ch2(F) - 3/2 ch1(F) - rank(F)
//!               = chi(O, F) - m2 - 1/2 m1 - 11/32 rank
//! ```
//!
//! where `(rank, m1, m2)` are the frame `-1` modified components of `F`. The
//! second line is an identity of the conversion maps; a coefficient of
//! `-13/16 rank` circulates for the trailing term, but it fails the chain on
//! every class of nonzero rank (and would make integral Euler pairings
//! non-integral on the `B_0[1]` plane), so `11/32` is what this module
//! implements. `printed_trailing_coefficient_breaks_the_chain` keeps the
//! discrepancy on record.

use crate::character::Character;
use crate::rational::{rat, rat_int, Rat};

/// A character whose degree-3 part is required.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullCharacter(Character);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("degree-3 part required but absent")]
pub struct MissingC3;

impl FullCharacter {
    pub fn new(v: Character) -> Result<Self, MissingC3> {
        if v.c3.is_some() {
            Ok(FullCharacter(v))
        } else {
            Err(MissingC3)
        }
    }

    pub fn character(&self) -> &Character {
        &self.0
    }

    pub fn c3(&self) -> &Rat {
        self.0.c3.as_ref().expect("checked at construction")
    }
}

/// `chi(O, F)` on `P^3` for an ordinary (un-modified) character in the
/// canonical frame.
pub fn chi_p3(v: &FullCharacter) -> Rat {
    let c = &v.0;
    assert!(c.frame == Rat::zero(), "chi_p3 expects frame beta = 0");
    v.c3().clone() + rat_int(2) * &c.c2 + rat(11, 6) * &c.c1 + &c.rank
}

/// Binomial `chi(O(n)) = (n+1)(n+2)(n+3)/6`, the independent line-bundle
/// oracle.
pub fn chi_line_bundle(n: i64) -> Rat {
    rat_int((n + 1) * (n + 2) * (n + 3)) / rat_int(6)
}

/// Ordinary character of `O(n)`.
pub fn line_bundle_char(n: i64) -> FullCharacter {
    let n = rat_int(n);
    FullCharacter::new(Character::with_c3(
        rat_int(1),
        n.clone(),
        &n * &n / rat_int(2),
        &n * &n * &n / rat_int(6),
    ))
    .expect("c3 set")
}

/// The chain value `chi(O, F(-h))` computed from the frame `-1` modified
/// truncation of `F` together with `chi(O, F)`.
pub fn chi_b2_chain(v_b0: &Character, chi_forg: &Rat) -> Rat {
    let w = v_b0.to_frame(&rat_int(-1));
    chi_forg - &w.c2 - &w.c1 / rat_int(2) - rat(11, 32) * &w.rank
}

/// Direct evaluation of `chi(O, F(-h))`: twist the full ordinary character by
/// `e^{-h}` and apply the Todd expansion. The first line of the chain.
pub fn chi_shifted_down(v: &FullCharacter) -> Rat {
    // twisting by +1 multiplies by e^{-h}, which is exactly F(-h) on
    // characters; the result is an ordinary character again, so the frame tag
    // is reset rather than unwound
    let mut plain = v.0.twist(&rat_int(1));
    plain.frame = Rat::zero();
    chi_p3(&FullCharacter::new(plain).expect("c3 preserved by twist"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::{b_char, modify};
    use crate::rational::rat;

    #[test]
    fn chi_of_structure_sheaf_and_twists() {
        assert_eq!(chi_p3(&line_bundle_char(0)), rat_int(1));
        assert_eq!(chi_p3(&line_bundle_char(1)), rat_int(4));
        assert_eq!(chi_p3(&line_bundle_char(-1)), rat_int(0));
        for n in -5..=5 {
            assert_eq!(chi_p3(&line_bundle_char(n)), chi_line_bundle(n), "O({n})");
        }
    }

    #[test]
    fn chi_p3_is_additive() {
        let a = line_bundle_char(2).character().clone();
        let b = line_bundle_char(-3).character().clone();
        let sum = FullCharacter::new(a.clone() + b.clone()).unwrap();
        assert_eq!(
            chi_p3(&sum),
            chi_p3(&FullCharacter::new(a).unwrap()) + chi_p3(&FullCharacter::new(b).unwrap())
        );
    }

    fn full(rank: (i64, i64), c1: (i64, i64), c2: (i64, i64), c3: (i64, i64)) -> FullCharacter {
        FullCharacter::new(Character::with_c3(
            rat(rank.0, rank.1),
            rat(c1.0, c1.1),
            rat(c2.0, c2.1),
            rat(c3.0, c3.1),
        ))
        .unwrap()
    }

    #[test]
    fn chain_identity_on_sample_characters() {
        let samples = [
            full((4, 1), (-3, 1), (5, 2), (7, 6)),
            full((-4, 1), (1, 1), (-25, 8), (3, 4)),
            full((0, 1), (6, 1), (0, 1), (1, 1)),
            full((8, 1), (0, 1), (7, 4), (-9, 2)),
        ];
        for v in samples {
            let modified = modify(v.character()).truncated();
            let direct = chi_shifted_down(&v);
            let via_chain = chi_b2_chain(&modified, &chi_p3(&v));
            assert_eq!(direct, via_chain, "chain broke on {}", v.character());
        }
    }

    #[test]
    fn chain_simplifies_on_the_shifted_b0_plane() {
        // classes with modified frame -1 truncation n * (-4, 1, -1/8):
        // the chain value exceeds chi(O, Forg) by exactly n
        for n in 1..=6i64 {
            let v = Character::from_frame(rat_int(-4 * n), rat_int(n), rat(-n, 8), rat_int(-1));
            let chi_forg = rat(17, 3); // arbitrary placeholder value
            let out = chi_b2_chain(&v, &chi_forg);
            assert_eq!(out, &chi_forg + rat_int(n));
            // per-rank shape: (-1/32 + 1/8 - 11/32) of rank = +n overall
            let w = v.to_frame(&rat_int(-1));
            let per_rank = (rat(-1, 32) + rat(1, 8) - rat(11, 32)) * &w.rank;
            assert_eq!(out - chi_forg, per_rank);
        }
    }

    #[test]
    fn printed_trailing_coefficient_breaks_the_chain() {
        // with -13/16 rank as the trailing term the chain misses by 15/32 rank
        let v = full((4, 1), (-3, 1), (5, 2), (7, 6));
        let modified = modify(v.character()).truncated();
        let w = modified.to_frame(&rat_int(-1));
        let printed = chi_p3(&v) - &w.c2 - &w.c1 / rat_int(2) - rat(13, 16) * &w.rank;
        let direct = chi_shifted_down(&v);
        assert_ne!(printed, direct);
        assert_eq!(&direct - &printed, rat(15, 32) * &w.rank);
        // and it would break integrality of chi on the shifted B_0 plane
        let plane = Character::from_frame(rat_int(-4), rat_int(1), rat(-1, 8), rat_int(-1));
        let p = plane.to_frame(&rat_int(-1));
        let delta = -&p.c2 - &p.c1 / rat_int(2) - rat(13, 16) * &p.rank;
        assert!(!delta.is_integer());
    }

    #[test]
    fn zero_character_leaves_chi_unchanged() {
        let chi = rat(5, 7);
        assert_eq!(chi_b2_chain(&Character::zero(), &chi), chi);
    }

    #[test]
    fn b_char_round_trip_through_ordinary() {
        // Forg(B_1) has chi-relevant truncation (4, -3, 5/2)
        let b1 = crate::character::unmodify(&b_char(1));
        assert_eq!(b1.rank, rat_int(4));
        assert_eq!(b1.c1, rat_int(-3));
        assert_eq!(b1.c2, rat(5, 2));
    }

    #[test]
    fn missing_c3_is_an_error() {
        assert!(FullCharacter::new(Character::zero()).is_err());
    }
}
