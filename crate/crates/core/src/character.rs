//! Truncated Chern characters over exact rationals.
//!
//! A [`Character`] is the degree-`<=3` shadow `(rank, c1, c2, [c3])` of a class
//! on `P^3`, together with a frame tag recording which twist `e^{-beta h}` has
//! been applied. The canonical storage frame is `beta = 0`; values quoted in
//! the `beta = -1` frame enter through [`Character::from_frame`] /
//! [`Character::to_frame`], which are exact linear maps.
//!
//! Conventions, with `h` the hyperplane class and `l = h^2`:
//!
//! * `modify` multiplies by `(1 - 11/32 l)` in the truncated ring, turning the
//!   ordinary character of a forgetful image into the module-adapted one.
//! * `twist(v, beta)` multiplies by `e^{-beta h}` and increments the frame tag
//!   by `beta`.
//! * `half_twist` multiplies by `e^{h/2}`; it realizes tensoring with the odd
//!   part of the Clifford algebra on characters, stepping `b_char(i)` to
//!   `b_char(i+1)`.
//! * `discriminant` is `c1^2 - 2 rank c2`, frame independent.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;

use crate::rational::{fmt_rat, is_integer, parse_rat, rat, rat_int, Rat, RatParseError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Character {
    pub rank: Rat,
    pub c1: Rat,
    pub c2: Rat,
    pub c3: Option<Rat>,
    /// Which twist `e^{-beta h}` the stored components live in.
    pub frame: Rat,
}

impl Character {
    /// Character in the canonical frame `beta = 0`, no degree-3 part.
    pub fn new(rank: Rat, c1: Rat, c2: Rat) -> Self {
        Character {
            rank,
            c1,
            c2,
            c3: None,
            frame: Rat::zero(),
        }
    }

    pub fn with_c3(rank: Rat, c1: Rat, c2: Rat, c3: Rat) -> Self {
        Character {
            rank,
            c1,
            c2,
            c3: Some(c3),
            frame: Rat::zero(),
        }
    }

    /// Components as quoted in frame `beta`, normalized to canonical storage.
    pub fn from_frame(rank: Rat, c1: Rat, c2: Rat, beta: Rat) -> Self {
        Character {
            rank,
            c1,
            c2,
            c3: None,
            frame: beta,
        }
        .to_frame(&Rat::zero())
    }

    pub fn zero() -> Self {
        Character::new(Rat::zero(), Rat::zero(), Rat::zero())
    }

    pub fn is_zero_class(&self) -> bool {
        self.rank.is_zero() && self.c1.is_zero() && self.c2.is_zero()
    }

    /// Multiplication by `e^{-beta h}` in the truncated ring.
    /// The frame tag increments by `beta`.
    pub fn twist(&self, beta: &Rat) -> Character {
        let b2 = beta * beta;
        let c3 = self.c3.as_ref().map(|c3| {
            c3 - beta * &self.c2 + &b2 / rat_int(2) * &self.c1
                - beta * &b2 / rat_int(6) * &self.rank
        });
        Character {
            rank: self.rank.clone(),
            c1: &self.c1 - beta * &self.rank,
            c2: &self.c2 - beta * &self.c1 + &b2 / rat_int(2) * &self.rank,
            c3,
            frame: &self.frame + beta,
        }
    }

    /// Re-express in frame `beta` (exact; inverse of whatever twist produced
    /// the current frame).
    pub fn to_frame(&self, beta: &Rat) -> Character {
        self.twist(&(beta - &self.frame))
    }

    /// Homological shift `[n]`: multiplies every component by `(-1)^n`.
    pub fn shift(&self, n: i64) -> Character {
        if n.rem_euclid(2) == 0 {
            self.clone()
        } else {
            -self.clone()
        }
    }

    /// `c1^2 - 2 rank c2`. The same in every frame.
    pub fn discriminant(&self) -> Rat {
        &self.c1 * &self.c1 - rat_int(2) * &self.rank * &self.c2
    }

    /// Multiplication by `e^{h/2}`. Two applications equal `twist(v, -1)`.
    ///
    /// The degree-3 part follows the same formal product
    /// (`c3 + c2/2 + c1/8 + rank/48`); nothing downstream depends on it.
    pub fn half_twist(&self) -> Character {
        let c3 = self.c3.as_ref().map(|c3| {
            c3 + &self.c2 / rat_int(2) + &self.c1 / rat_int(8) + &self.rank / rat_int(48)
        });
        Character {
            rank: self.rank.clone(),
            c1: &self.c1 + &self.rank / rat_int(2),
            c2: &self.c2 + &self.c1 / rat_int(2) + &self.rank / rat_int(8),
            c3,
            frame: self.frame.clone(),
        }
    }

    /// Iterated [`Character::half_twist`] (negative steps invert it).
    pub fn half_twist_n(&self, steps: i64) -> Character {
        let mut v = self.clone();
        if steps >= 0 {
            for _ in 0..steps {
                v = v.half_twist();
            }
        } else {
            // e^{-h/2} = inverse: subtract what half_twist added, in reverse order
            for _ in 0..(-steps) {
                let c1 = &v.c1 - &v.rank / rat_int(2);
                let c2 = &v.c2 - &c1 / rat_int(2) - &v.rank / rat_int(8);
                let c3 = v.c3.as_ref().map(|c3| {
                    c3 - &c2 / rat_int(2) - &c1 / rat_int(8) - &v.rank / rat_int(48)
                });
                v = Character {
                    rank: v.rank.clone(),
                    c1,
                    c2,
                    c3,
                    frame: v.frame.clone(),
                };
            }
        }
        v
    }

    pub fn scale(&self, k: &Rat) -> Character {
        Character {
            rank: k * &self.rank,
            c1: k * &self.c1,
            c2: k * &self.c2,
            c3: self.c3.as_ref().map(|c| k * c),
            frame: self.frame.clone(),
        }
    }

    /// Forget the degree-3 part.
    pub fn truncated(&self) -> Character {
        Character {
            c3: None,
            ..self.clone()
        }
    }

    /// `(rank, c1, c2)` quoted in frame `beta`.
    pub fn components_in(&self, beta: &Rat) -> (Rat, Rat, Rat) {
        let v = self.to_frame(beta);
        (v.rank, v.c1, v.c2)
    }
}

/// The ordinary-to-module correction: product with `(1 - 11/32 l)` truncated
/// at degree 3. Expects the input in the canonical frame.
pub fn modify(ordinary: &Character) -> Character {
    assert!(
        ordinary.frame.is_zero(),
        "modify acts on ordinary characters in frame beta = 0"
    );
    let corr = rat(11, 32);
    Character {
        rank: ordinary.rank.clone(),
        c1: ordinary.c1.clone(),
        c2: &ordinary.c2 - &corr * &ordinary.rank,
        c3: ordinary.c3.as_ref().map(|c3| c3 - &corr * &ordinary.c1),
        frame: Rat::zero(),
    }
}

/// Inverse of [`modify`]: product with `(1 + 11/32 l)` truncated.
pub fn unmodify(module: &Character) -> Character {
    assert!(module.frame.is_zero(), "unmodify expects frame beta = 0");
    let corr = rat(11, 32);
    Character {
        rank: module.rank.clone(),
        c1: module.c1.clone(),
        c2: &module.c2 + &corr * &module.rank,
        c3: module.c3.as_ref().map(|c3| c3 + &corr * &module.c1),
        frame: Rat::zero(),
    }
}

/// Character of the Clifford bimodule `B_i`: `(4, 2i-1, (2i-1)^2/8)` in the
/// `beta = -1` frame, returned in canonical storage. Discriminant 0 for all `i`.
pub fn b_char(i: i64) -> Character {
    let d = rat_int(2 * i - 1);
    Character::from_frame(rat_int(4), d.clone(), &d * &d / rat_int(8), rat_int(-1))
}

/// Named preset characters. Values are quoted in the `beta = -1` frame:
/// `E_C = (0, 6, 0)`, `M_l = (-4, 3, 7/8)`,
/// `lambda1 = (4, 3, -7/8)`, `lambda2 = (-8, 0, 7/4)`.
pub fn preset(name: &str) -> Option<Character> {
    let m1 = rat_int(-1);
    match name {
        "E_C" => Some(Character::from_frame(rat_int(0), rat_int(6), rat_int(0), m1)),
        "M_l" => Some(Character::from_frame(rat_int(-4), rat_int(3), rat(7, 8), m1)),
        "lambda1" => Some(Character::from_frame(rat_int(4), rat_int(3), rat(-7, 8), m1)),
        "lambda2" => Some(Character::from_frame(rat_int(-8), rat_int(0), rat(7, 4), m1)),
        _ => {
            let inner = name.strip_prefix("B(")?.strip_suffix(')')?;
            let i: i64 = inner.trim().parse().ok()?;
            Some(b_char(i))
        }
    }
}

/// Text syntax: `rk,c1,c2[,c3]` with integer or `p/q` entries, optional
/// `@beta=p/q` frame suffix (default `@beta=0`), or a preset name
/// (`B(i)`, `lambda1`, `lambda2`, `E_C`, `M_l`).
pub fn parse_character(input: &str) -> Result<Character, CharParseError> {
    let s = input.trim();
    if let Some(v) = preset(s) {
        return Ok(v);
    }
    let (body, frame) = match s.split_once('@') {
        None => (s, Rat::zero()),
        Some((body, tag)) => {
            let tag = tag.trim();
            let val = tag
                .strip_prefix("beta=")
                .ok_or_else(|| CharParseError::BadFrameTag(tag.into()))?;
            (body, parse_rat(val).map_err(CharParseError::BadEntry)?)
        }
    };
    let body = body.trim();
    let body = body
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .unwrap_or(body);
    let parts: Vec<&str> = body.split(',').collect();
    if parts.len() < 3 || parts.len() > 4 {
        return Err(CharParseError::WrongArity(parts.len()));
    }
    let rank = parse_rat(parts[0]).map_err(CharParseError::BadEntry)?;
    let c1 = parse_rat(parts[1]).map_err(CharParseError::BadEntry)?;
    let c2 = parse_rat(parts[2]).map_err(CharParseError::BadEntry)?;
    let mut v = Character {
        rank,
        c1,
        c2,
        c3: None,
        frame,
    };
    if parts.len() == 4 {
        v.c3 = Some(parse_rat(parts[3]).map_err(CharParseError::BadEntry)?);
    }
    Ok(v.to_frame(&Rat::zero()))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CharParseError {
    #[error("expected 3 or 4 components, got {0}")]
    WrongArity(usize),
    #[error("bad component: {0}")]
    BadEntry(RatParseError),
    #[error("bad frame tag `{0}` (expected beta=p/q)")]
    BadFrameTag(String),
}

/// Tuple rendering `(rk, c1, c2[, c3])`, with a frame marker when not in the
/// canonical frame.
impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}",
            fmt_rat(&self.rank),
            fmt_rat(&self.c1),
            fmt_rat(&self.c2)
        )?;
        if let Some(c3) = &self.c3 {
            write!(f, ", {}", fmt_rat(c3))?;
        }
        write!(f, ")")?;
        if !self.frame.is_zero() {
            write!(f, " @ beta={}", fmt_rat(&self.frame))?;
        }
        Ok(())
    }
}

impl Add for Character {
    type Output = Character;
    fn add(self, rhs: Character) -> Character {
        assert_eq!(self.frame, rhs.frame, "frame mismatch in character sum");
        Character {
            rank: self.rank + rhs.rank,
            c1: self.c1 + rhs.c1,
            c2: self.c2 + rhs.c2,
            c3: match (self.c3, rhs.c3) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
            frame: self.frame,
        }
    }
}

impl Sub for Character {
    type Output = Character;
    fn sub(self, rhs: Character) -> Character {
        self + (-rhs)
    }
}

impl Neg for Character {
    type Output = Character;
    fn neg(self) -> Character {
        Character {
            rank: -self.rank,
            c1: -self.c1,
            c2: -self.c2,
            c3: self.c3.map(|c| -c),
            frame: self.frame,
        }
    }
}

/// True when `(rank, c1, 8 c2)` are all integers. This is the coordinate
/// system the character lattice lives in.
pub fn has_integral_coords(v: &Character) -> bool {
    is_integer(&v.rank) && is_integer(&v.c1) && is_integer(&(&v.c2 * rat_int(8)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(r: i64, c1: (i64, i64), c2: (i64, i64)) -> Character {
        Character::new(rat_int(r), rat(c1.0, c1.1), rat(c2.0, c2.1))
    }

    #[test]
    fn modify_matches_truncated_product() {
        let o = ch(1, (0, 1), (0, 1));
        assert_eq!(modify(&o), ch(1, (0, 1), (-11, 32)));

        let torsion = ch(0, (0, 1), (1, 1));
        assert_eq!(modify(&torsion), torsion);

        let v = ch(4, (-3, 1), (9, 8));
        assert_eq!(modify(&v), ch(4, (-3, 1), (-1, 4)));
    }

    #[test]
    fn modify_acts_on_c3() {
        let o = Character::with_c3(rat_int(1), rat_int(1), rat(1, 2), rat(1, 6));
        let m = modify(&o);
        assert_eq!(m.c2, rat(1, 2) - rat(11, 32));
        assert_eq!(m.c3, Some(rat(1, 6) - rat(11, 32)));
        assert_eq!(unmodify(&m), o);
    }

    #[test]
    fn twist_places_b1_on_figure_coordinates() {
        // (4, -3, 9/8) is the canonical-frame character of B_1; at beta = -1
        // it sits at (1/4, 1/32) per rank.
        let b1 = ch(4, (-3, 1), (9, 8));
        let t = b1.twist(&rat_int(-1));
        assert_eq!((t.rank.clone(), t.c1.clone(), t.c2.clone()), (rat_int(4), rat_int(1), rat(1, 8)));
        assert_eq!(t.frame, rat_int(-1));
    }

    #[test]
    fn twist_is_a_group_action() {
        let v = Character::with_c3(rat_int(3), rat(-5, 2), rat(7, 3), rat(11, 6));
        let a = rat(5, 7);
        let b = rat(-9, 4);
        let lhs = v.twist(&a).twist(&b);
        let rhs = v.twist(&(&a + &b));
        assert_eq!(lhs, rhs);
        assert_eq!(v.twist(&Rat::zero()), v);
        assert_eq!(v.twist(&a).twist(&(-a.clone())), v);
    }

    #[test]
    fn discriminant_anchors() {
        for i in -10..=10 {
            assert!(b_char(i).discriminant().is_zero(), "B_{i} off the parabola");
        }
        assert_eq!(preset("E_C").unwrap().discriminant(), rat_int(36));
        assert_eq!(preset("M_l").unwrap().discriminant(), rat_int(16));
    }

    #[test]
    fn discriminant_is_frame_and_shift_invariant() {
        let v = Character::new(rat_int(4), rat(-3, 2), rat(9, 8));
        let d = v.discriminant();
        assert_eq!(v.twist(&rat(5, 3)).discriminant(), d);
        assert_eq!(v.shift(1).discriminant(), d);
        assert_eq!(v.half_twist().discriminant(), d);
    }

    #[test]
    fn b_char_figure_values() {
        let at = |i: i64| {
            let v = b_char(i).to_frame(&rat_int(-1));
            (v.rank, v.c1, v.c2)
        };
        assert_eq!(at(0), (rat_int(4), rat_int(-1), rat(1, 8)));
        assert_eq!(at(-1), (rat_int(4), rat_int(-3), rat(9, 8)));
        assert_eq!(at(3), (rat_int(4), rat_int(5), rat(25, 8)));
    }

    #[test]
    fn b_char_slope_anchor() {
        for i in -10..=10 {
            let v = b_char(i).to_frame(&rat_int(-1));
            assert_eq!(&v.c1 / &v.rank, rat_int(i) / rat_int(2) - rat(1, 4));
        }
    }

    #[test]
    fn half_twist_steps_through_b_chars() {
        for i in -5..=5 {
            assert_eq!(b_char(i).half_twist(), b_char(i + 1));
        }
        let ec = preset("E_C").unwrap().to_frame(&rat_int(-1));
        let h = ec.half_twist();
        assert_eq!((h.rank.clone(), h.c1.clone(), h.c2.clone()), (rat_int(0), rat_int(6), rat_int(3)));
    }

    #[test]
    fn half_twist_squares_to_unit_twist() {
        let v = Character::with_c3(rat_int(4), rat(-3, 1), rat(9, 8), rat(5, 16));
        assert_eq!(v.half_twist().half_twist(), v.twist(&rat_int(-1)));
        assert_eq!(v.half_twist_n(2), v.twist(&rat_int(-1)));
        assert_eq!(v.half_twist_n(3).half_twist_n(-3), v);
    }

    #[test]
    fn shift_examples() {
        let q = b_char(-1).shift(1).to_frame(&rat_int(-1));
        assert_eq!(
            (q.rank.clone(), q.c1.clone(), q.c2.clone()),
            (rat_int(-4), rat_int(3), rat(-9, 8))
        );
        let v = Character::new(rat(1, 2), rat(3, 4), rat(-5, 8));
        assert_eq!(v.shift(2), v);
        assert_eq!(v.shift(1).shift(1), v);
    }

    #[test]
    fn parser_round_trips() {
        let v = parse_character("0,6,0@beta=-1").unwrap();
        assert_eq!(v, preset("E_C").unwrap());
        assert_eq!(parse_character("(4, -3, 9/8)").unwrap(), ch(4, (-3, 1), (9, 8)));
        assert_eq!(parse_character("B(2)").unwrap(), b_char(2));
        assert_eq!(parse_character("M_l").unwrap(), preset("M_l").unwrap());
        assert_eq!(
            parse_character("1,1,1/2,1/6").unwrap(),
            Character::with_c3(rat_int(1), rat_int(1), rat(1, 2), rat(1, 6))
        );
        assert!(parse_character("1,2").is_err());
        assert!(parse_character("1,2,3@gamma=1").is_err());
    }

    #[test]
    fn presets_are_lattice_plane_consistent() {
        // lambda presets sit on the plane c2 = -7/32 rank in the beta = -1 frame
        for name in ["lambda1", "lambda2"] {
            let v = preset(name).unwrap().to_frame(&rat_int(-1));
            assert_eq!(v.c2, rat(-7, 32) * &v.rank);
        }
        // and their pinned combinations reproduce the distinguished objects
        let l1 = preset("lambda1").unwrap();
        let l2 = preset("lambda2").unwrap();
        assert_eq!(l1.clone().scale(&rat_int(2)) + l2.clone(), preset("E_C").unwrap());
        assert_eq!(l1 + l2, preset("M_l").unwrap());
    }
}
