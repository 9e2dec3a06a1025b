//! The integral character lattice and its membership test.
//!
//! Characters with module structure land in the subgroup of
//! `(rank, c1, 8 c2)`-integral classes spanned by `lambda1`, `lambda2` and the
//! `b_char(i)` for `i = 1, 2, 3`. Membership is decided against a row Hermite
//! normal form of the generator matrix, computed once at construction.
//!
//! [`condition_iv`] is the parity test on ordinary preimages: a class passes
//! when both it and its odd half-twist descend (untwist, then divide by
//! `1 - 11/32 l`) to ordinary characters `(R, C, D/2)` with `C, D` integers of
//! equal parity and `R` a multiple of 4. With the half-twist requirement
//! included this is exactly equivalent to lattice membership; the
//! single-application test [`condition_iv_single`] is strictly weaker and kept
//! only for comparison.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::character::{b_char, has_integral_coords, preset, unmodify, Character};
use crate::rational::{is_integer, rat_int, Rat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("character has non-integral (rank, c1, 8c2) coordinates: {0}")]
    NonIntegralCoordinates(String),
    #[error("generator set degenerate: rank {0} < 3")]
    DegenerateGenerators(usize),
}

/// Integer coordinates `(rank, c1, 8 c2)` of a character, in the frame of the
/// lattice. Errors when any coordinate is non-integral.
pub fn integer_coords(v: &Character, frame: &Rat) -> Result<[BigInt; 3], LatticeError> {
    let w = v.to_frame(frame);
    let e2 = &w.c2 * rat_int(8);
    if !is_integer(&w.rank) || !is_integer(&w.c1) || !is_integer(&e2) {
        return Err(LatticeError::NonIntegralCoordinates(w.to_string()));
    }
    Ok([
        w.rank.to_integer(),
        w.c1.to_integer(),
        e2.to_integer(),
    ])
}

#[derive(Debug, Clone)]
pub struct CharLattice {
    pub generators: Vec<Character>,
    /// Row HNF basis in `(rank, c1, 8 c2)` coordinates, quoted in `frame`.
    pub basis: [[BigInt; 3]; 3],
    pub frame: Rat,
}

impl CharLattice {
    /// Lattice spanned by `lambda1`, `lambda2`, `B_1`, `B_2`, `B_3`,
    /// generators quoted in the `beta = -1` frame.
    pub fn default_paper() -> CharLattice {
        let gens = vec![
            preset("lambda1").unwrap(),
            preset("lambda2").unwrap(),
            b_char(1),
            b_char(2),
            b_char(3),
        ];
        CharLattice::from_generators(gens, rat_int(-1)).expect("default generators are integral")
    }

    pub fn from_generators(generators: Vec<Character>, frame: Rat) -> Result<CharLattice, LatticeError> {
        let rows: Vec<[BigInt; 3]> = generators
            .iter()
            .map(|g| integer_coords(g, &frame))
            .collect::<Result<_, _>>()?;
        let basis = row_hnf(&rows)?;
        let lat = CharLattice {
            generators,
            basis,
            frame,
        };
        debug_assert!(lat.generators.iter().all(|g| lat.contains(g).unwrap()));
        Ok(lat)
    }

    /// Decide membership of `v` in the spanned lattice. Frames are aligned by
    /// an exact unimodular twist, so `v` may be quoted anywhere; non-integral
    /// coordinates are an error, never `false`.
    pub fn contains(&self, v: &Character) -> Result<bool, LatticeError> {
        let target = integer_coords(v, &self.frame)?;
        Ok(solve_hnf(&self.basis, &target))
    }
}

/// Row Hermite normal form of integer row vectors in dimension 3.
/// Requires full rank; rows are combined by unimodular operations only.
fn row_hnf(rows: &[[BigInt; 3]]) -> Result<[[BigInt; 3]; 3], LatticeError> {
    let mut work: Vec<[BigInt; 3]> = rows.to_vec();
    let mut basis: Vec<[BigInt; 3]> = Vec::new();
    for col in 0..3 {
        // clear column `col` below the pivot by gcd steps
        loop {
            work.retain(|r| r.iter().any(|x| !x.is_zero()));
            let mut idx: Option<usize> = None;
            for (i, r) in work.iter().enumerate() {
                if !r[col].is_zero() {
                    match idx {
                        None => idx = Some(i),
                        Some(j) => {
                            if r[col].abs() < work[j][col].abs() {
                                idx = Some(i);
                            }
                        }
                    }
                }
            }
            let Some(p) = idx else { break };
            let pivot = work[p].clone();
            let mut done = true;
            for (i, r) in work.iter_mut().enumerate() {
                if i != p && !r[col].is_zero() {
                    let q = r[col].div_floor(&pivot[col]);
                    for k in 0..3 {
                        r[k] = &r[k] - &q * &pivot[k];
                    }
                    if !r[col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                let mut pv = work.remove(p);
                if pv[col].is_negative() {
                    for x in pv.iter_mut() {
                        *x = -x.clone();
                    }
                }
                basis.push(pv);
                break;
            }
        }
    }
    if basis.len() != 3 {
        return Err(LatticeError::DegenerateGenerators(basis.len()));
    }
    // reduce entries above each pivot
    for i in (0..3).rev() {
        for j in 0..i {
            let q = basis[j][i].div_floor(&basis[i][i]);
            if !q.is_zero() {
                for k in 0..3 {
                    basis[j][k] = &basis[j][k] - &q * &basis[i][k];
                }
            }
        }
    }
    Ok([basis[0].clone(), basis[1].clone(), basis[2].clone()])
}

/// Membership against an upper-triangular HNF basis by forward substitution.
fn solve_hnf(basis: &[[BigInt; 3]; 3], target: &[BigInt; 3]) -> bool {
    let mut rem = target.clone();
    for i in 0..3 {
        if basis[i][i].is_zero() {
            return false;
        }
        let (q, r) = rem[i].div_rem(&basis[i][i]);
        if !r.is_zero() {
            return false;
        }
        for k in 0..3 {
            rem[k] = &rem[k] - &q * &basis[i][k];
        }
    }
    rem.iter().all(|x| x.is_zero())
}

/// The ordinary character `(R, C, D/2)` whose modification and unit twist
/// produce `v`, together with the integrality/parity verdict: `C, D` must be
/// integers of the same parity and `R` a multiple of 4.
fn ordinary_parity_ok(v: &Character) -> bool {
    let ordinary = unmodify(&v.to_frame(&Rat::zero()).truncated());
    if !is_integer(&ordinary.rank) || !is_integer(&ordinary.c1) {
        return false;
    }
    let r = ordinary.rank.to_integer();
    if !(&r % BigInt::from(4)).is_zero() {
        return false;
    }
    let d = &ordinary.c2 * rat_int(2);
    if !is_integer(&d) {
        return false;
    }
    let c = ordinary.c1.to_integer();
    let d = d.to_integer();
    (c - d) % BigInt::from(2) == BigInt::zero()
}

/// Literal single-application parity test on the ordinary preimage of `v`.
/// Strictly weaker than lattice membership; see [`condition_iv`].
pub fn condition_iv_single(v: &Character) -> bool {
    ordinary_parity_ok(v)
}

/// First-principles integrality test: the class and its odd half-twist both
/// descend to ordinary characters with integral, equal-parity `(C, D)` and
/// rank divisible by 4. Equivalent to membership in the default lattice.
pub fn condition_iv(v: &Character) -> bool {
    ordinary_parity_ok(v) && ordinary_parity_ok(&v.half_twist())
}
