//! Numerical wall enumeration at fixed `beta`.
//!
//! A wall for a target class `t` is a value `alpha^2 > 0` at which some
//! decomposition `t = s + (t - s)` attains equal slopes, subject to
//!
//! 1. both parts have non-negative discriminant,
//! 2. the slopes agree at a strictly positive `alpha^2`,
//! 3. both parts lie in the integral character lattice,
//! 4. both parts pass the ordinary-preimage parity test (implied by 3),
//!
//! together with the heart bound `0 <= Im(s) <= Im(t)`.
//!
//! The search box is closed by two facts. First, at any wall point both parts
//! satisfy `disc(s) + disc(q) <= disc(t)` (the discriminant is hyperbolic on
//! the equal-slope plane, which contains the negative-discriminant kernel
//! vector of the charge; both parts then sit in one closed positive cone, so
//! the polar form of the pair is non-negative). That pins the products
//! `2 r y` and `2 (r_t - r)(y_t - y)` to intervals of width `disc(t)`. Second,
//! lattice classes are quantized: nonzero ranks are multiples of 4 and `8 c2`
//! is an integer, so bounded products force bounded factors. Degenerate target
//! shapes fall back to the `alpha_sq_min` cutoff. See docs/search-bounds.md
//! for the worked derivation; the unit tests replay it against brute force
//! over strictly larger boxes.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::character::{b_char, has_integral_coords, Character};
use crate::lattice::{condition_iv, CharLattice, LatticeError};
use crate::mukai::lambda_class_of;
use crate::rational::{fmt_rat, isqrt_floor, rat, rat_int, Rat};
use crate::stability::{central_charge, slope, Slope, StabilityParams};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WallBetween {
    /// The equation is identically satisfied: proportional charges.
    Always,
    /// No strictly positive root.
    NoWall,
    /// Equal slopes exactly at this `alpha^2 > 0`.
    At(Rat),
}

/// Solve `Re(Z v) Im(Z w) = Re(Z w) Im(Z v)` for `alpha^2` at fixed `beta`.
/// The equation is linear in `alpha^2`.
pub fn wall_between(v: &Character, w: &Character, beta: &Rat) -> WallBetween {
    let (rv, xv, yv) = v.components_in(beta);
    let (rw, xw, yw) = w.components_in(beta);
    let coeff = (&rv * &xw - &rw * &xv) / rat_int(2);
    let rhs = &yv * &xw - &yw * &xv;
    if coeff.is_zero() {
        if rhs.is_zero() {
            WallBetween::Always
        } else {
            WallBetween::NoWall
        }
    } else {
        let a = rhs / coeff;
        if a.is_positive() {
            WallBetween::At(a)
        } else {
            WallBetween::NoWall
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub sub: Character,
    pub quotient: Character,
    pub sub_annotations: Vec<String>,
    pub quotient_annotations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    pub alpha_sq: Rat,
    pub beta: Rat,
    pub decompositions: Vec<Decomposition>,
}

#[derive(Debug, Clone)]
pub struct WallReport {
    pub target: Character,
    pub beta: Rat,
    pub alpha_sq_min: Rat,
    pub walls: Vec<Wall>,
    /// Proportional lattice sub-classes: equal slope at every parameter,
    /// excluded from the wall list.
    pub strictly_semistable: Vec<Character>,
    pub candidates_scanned: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WallError {
    #[error("target is not in the character lattice")]
    TargetNotInLattice,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("search box needs {candidates} grid points, limit is {limit}; raise alpha_sq_min")]
    BoundOverflow { candidates: u128, limit: u64 },
    #[error("alpha_sq_min must be strictly positive")]
    NonPositiveMin,
    #[error("beta must differ from the lattice frame by a multiple of 1/2, got {0}")]
    UnsupportedBeta(String),
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub alpha_sq_min: Rat,
    pub box_limit: u64,
    pub workers: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            alpha_sq_min: rat(1, 400),
            box_limit: 50_000_000,
            workers: 1,
        }
    }
}

/// Names a character when it matches a Clifford class, a shifted one, or an
/// integral lambda-combination.
pub fn annotate(v: &Character) -> Vec<String> {
    let mut out = Vec::new();
    for i in -12..=12 {
        let b = b_char(i);
        if *v == b {
            out.push(format!("B({i})"));
        } else if *v == b.shift(1) {
            out.push(format!("B({i})[1]"));
        }
    }
    if let Some((a, b)) = lambda_class_of(v) {
        out.push(format!("lambda({a},{b})"));
    } else if let Some((a, b)) = lambda_class_of(&v.shift(1)) {
        out.push(format!("lambda({a},{b})[1]"));
    }
    out
}

fn candidate(rank: i64, c1: i64, c2_8: i64, beta: &Rat) -> Character {
    Character::from_frame(rat_int(rank), rat_int(c1), rat(c2_8, 8), beta.clone())
}

/// Inclusive integer interval, empty when `lo > hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct IntRange {
    lo: i64,
    hi: i64,
}

impl IntRange {
    fn count(&self, step: u64) -> u128 {
        if self.lo > self.hi {
            0
        } else {
            ((self.hi - self.lo) as u128) / (step as u128) + 1
        }
    }
}

fn to_i64_bound(b: &BigInt) -> i64 {
    b.to_i64().unwrap_or(i64::MAX)
}

/// Symmetric range `[-ceil(q), ceil(q)]`.
fn sym_range(q: &Rat) -> IntRange {
    let hi = to_i64_bound(&q.ceil().to_integer());
    IntRange { lo: -hi, hi }
}

/// Upper bound for `|u|` given `u + w` in `[s_lo, s_hi]` and `u w` in
/// `[q_lo, q_hi]`: `(max|s| + sqrt(max s^2 - 4 min(q))) / 2`.
fn pair_bound(s_lo: &Rat, s_hi: &Rat, q_lo: &Rat, q_hi: &Rat) -> Rat {
    let s_max = if s_lo.abs() > s_hi.abs() { s_lo.abs() } else { s_hi.abs() };
    let q_min = if q_lo < q_hi { q_lo.clone() } else { q_hi.clone() };
    let mut d2 = &s_max * &s_max;
    if q_min.is_negative() {
        d2 -= rat_int(4) * q_min;
    }
    let root = Rat::from_integer(isqrt_floor(&d2) + 1);
    (s_max + root) / rat_int(2)
}

/// Per-`x` bounds on the sub-character grid `(rank, 8 c2)`.
///
/// `t = (r_t, x_t, y_t)` are the frame-`beta` components of the target and
/// `delta_t` its discriminant. Returns `(rank_range, c2_8_range)`.
fn slice_box(
    t: &(Rat, Rat, Rat),
    delta_t: &Rat,
    x: i64,
    eps: &Rat,
) -> (IntRange, IntRange) {
    let (r_t, x_t, y_t) = t;
    let x = rat_int(x);
    let xq = &x * &x;
    let xt_minus = x_t - &x;
    let xq2 = &xt_minus * &xt_minus;
    // 2 r y in [p_lo, p_hi], 2 (r_t - r)(y_t - y) in [q_lo, q_hi]
    let p_lo = &xq - delta_t;
    let p_hi = xq.clone();
    let q_lo = &xq2 - delta_t;
    let q_hi = xq2.clone();
    let p_abs = if p_lo.abs() > p_hi.abs() { p_lo.abs() } else { p_hi.abs() };

    if !r_t.is_zero() && !y_t.is_zero() {
        let base = rat_int(2) * r_t * y_t;
        let s_lo = &base + &p_lo - &q_hi;
        let s_hi = &base + &p_hi - &q_lo;
        // u = 2 r y_t, w = 2 r_t y; u w = base * (2 r y)
        let prod_a = &base * &p_lo;
        let prod_b = &base * &p_hi;
        let u_max = pair_bound(&s_lo, &s_hi, &prod_a, &prod_b);
        let r_bound = &u_max / (rat_int(2) * y_t.abs());
        let y_bound = &u_max / (rat_int(2) * r_t.abs());
        (sym_range(&r_bound), sym_range(&(y_bound * rat_int(8))))
    } else if !r_t.is_zero() {
        // y_t = 0: 2 r_t y is pinned to an interval; |r| <= 4 max|2ry| once
        // |y| >= 1/8, and y = 0 never yields a positive wall here.
        let s_lo = &p_lo - &q_hi;
        let s_hi = &p_hi - &q_lo;
        let s_max = if s_lo.abs() > s_hi.abs() { s_lo.abs() } else { s_hi.abs() };
        let y_bound = s_max / (rat_int(2) * r_t.abs());
        let r_bound = rat_int(4) * &p_abs;
        (sym_range(&r_bound), sym_range(&(y_bound * rat_int(8))))
    } else if !y_t.is_zero() {
        // r_t = 0: 2 r y_t pinned; rank-0 subs are proportional directions.
        let s_lo = &p_lo - &q_hi;
        let s_hi = &p_hi - &q_lo;
        let s_max = if s_lo.abs() > s_hi.abs() { s_lo.abs() } else { s_hi.abs() };
        let r_bound = s_max / (rat_int(2) * y_t.abs());
        let y_bound = &p_abs / rat_int(8);
        (sym_range(&r_bound), sym_range(&(y_bound * rat_int(8))))
    } else {
        // r_t = y_t = 0: positive walls force 2 r y in (0, min(x^2, (x_t-x)^2)]
        // and quantization bounds both factors; eps only trims further.
        let cap = if xq < xq2 { xq.clone() } else { xq2.clone() };
        let r_quant = rat_int(4) * &cap;
        // alpha^2 = 2y/r >= eps also gives r^2 <= 2 cap / eps
        let r_eps2 = rat_int(2) * &cap / eps;
        let r_eps = Rat::from_integer(isqrt_floor(&r_eps2) + 1);
        let r_bound = if r_quant < r_eps { r_quant } else { r_eps };
        let y_bound = &cap / rat_int(8);
        (sym_range(&r_bound), sym_range(&(y_bound * rat_int(8))))
    }
}

/// Orient a decomposition pair: the lexicographically larger component in
/// `(rank, c1, c2)` becomes the sub. Purely presentational; walls and tests
/// treat the pair as unordered.
fn orient(a: Character, b: Character) -> (Character, Character) {
    let key = |v: &Character| (v.rank.clone(), v.c1.clone(), v.c2.clone());
    if key(&a) >= key(&b) {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn enumerate_walls(
    target: &Character,
    beta: &Rat,
    lattice: &CharLattice,
    cfg: &SearchConfig,
) -> Result<WallReport, WallError> {
    if !cfg.alpha_sq_min.is_positive() {
        return Err(WallError::NonPositiveMin);
    }
    // the integer grid below is quoted in frame beta; half-integral steps from
    // the lattice frame keep lattice classes on that grid (rank is 4Z)
    let dbeta = beta - &lattice.frame;
    if !(dbeta * rat_int(2)).is_integer() {
        return Err(WallError::UnsupportedBeta(fmt_rat(beta)));
    }
    if !lattice.contains(target)? {
        return Err(WallError::TargetNotInLattice);
    }
    let target = target.truncated().to_frame(&Rat::zero());
    let (r_t, x_t, y_t) = target.components_in(beta);
    let delta_t = target.discriminant();

    let mut report = WallReport {
        target: target.clone(),
        beta: beta.clone(),
        alpha_sq_min: cfg.alpha_sq_min.clone(),
        walls: Vec::new(),
        strictly_semistable: Vec::new(),
        candidates_scanned: 0,
    };

    let xt = match x_t.to_integer().to_i64() {
        Some(v) if x_t.denom().is_one() && v >= 0 => v,
        _ => return Ok(report), // no heart-positive imaginary part, no walls
    };

    // proportional sub-classes: s = (x / x_t) t, reported separately
    for x in 1..xt {
        let s = target.scale(&(rat_int(x) / rat_int(xt)));
        if has_integral_coords(&s.to_frame(beta))
            && lattice.contains(&s).unwrap_or(false)
            && !s.discriminant().is_negative()
        {
            report.strictly_semistable.push(s.to_frame(beta));
        }
    }

    // build the candidate grid
    let tc = (r_t.clone(), x_t.clone(), y_t.clone());
    let mut slices = Vec::new();
    let mut total: u128 = 0;
    for x in 1..xt {
        let (rr, yr) = slice_box(&tc, &delta_t, x, &cfg.alpha_sq_min);
        // snap the rank range to multiples of 4
        let rr = IntRange {
            lo: rr.lo.div_euclid(4) * 4,
            hi: rr.hi.div_euclid(4) * 4,
        };
        total += rr.count(4) * yr.count(1);
        slices.push((x, rr, yr));
    }
    if total > cfg.box_limit as u128 {
        return Err(WallError::BoundOverflow {
            candidates: total,
            limit: cfg.box_limit,
        });
    }

    let mut grid: Vec<(i64, i64, i64)> = Vec::new();
    for (x, rr, yr) in &slices {
        let mut r = rr.lo;
        while r <= rr.hi {
            for k in yr.lo..=yr.hi {
                grid.push((*x, r, k));
            }
            r += 4;
        }
    }
    report.candidates_scanned = grid.len() as u64;

    let workers = cfg.workers.max(1);
    let chunk = grid.len().div_ceil(workers).max(1);
    let mut found: Vec<(Rat, Character, Character)> = if workers == 1 || grid.len() < 2 {
        scan_chunk(&grid, &target, beta, lattice, &cfg.alpha_sq_min)
    } else {
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for piece in grid.chunks(chunk) {
                let target = &target;
                let lattice = &lattice;
                handles.push(
                    scope.spawn(move || scan_chunk(piece, target, beta, lattice, &cfg.alpha_sq_min)),
                );
            }
            let mut all = Vec::new();
            for h in handles {
                all.extend(h.join().expect("wall scan worker panicked"));
            }
            all
        })
    };

    // dedup sub/quotient swaps, group by alpha^2, canonical ordering
    found.sort_by(|a, b| (&a.0, &a.1.rank, &a.1.c1, &a.1.c2).cmp(&(&b.0, &b.1.rank, &b.1.c1, &b.1.c2)));
    let mut grouped: BTreeMap<Rat, Vec<(Character, Character)>> = BTreeMap::new();
    for (a, s, q) in found {
        let entry = grouped.entry(a).or_default();
        if !entry.iter().any(|(es, eq)| es == &s || eq == &s) {
            entry.push((s, q));
        }
    }
    for (alpha_sq, pairs) in grouped.into_iter().rev() {
        let decompositions = pairs
            .into_iter()
            .map(|(s, q)| {
                let sub_annotations = annotate(&s);
                let quotient_annotations = annotate(&q);
                Decomposition {
                    sub: s.to_frame(beta),
                    quotient: q.to_frame(beta),
                    sub_annotations,
                    quotient_annotations,
                }
            })
            .collect();
        report.walls.push(Wall {
            alpha_sq,
            beta: beta.clone(),
            decompositions,
        });
    }
    Ok(report)
}

fn scan_chunk(
    grid: &[(i64, i64, i64)],
    target: &Character,
    beta: &Rat,
    lattice: &CharLattice,
    alpha_sq_min: &Rat,
) -> Vec<(Rat, Character, Character)> {
    let mut out = Vec::new();
    for &(x, r, k) in grid {
        let s = candidate(r, x, k, beta);
        if s.is_zero_class() {
            continue;
        }
        let q = target.clone() - s.clone();
        if q.is_zero_class() {
            continue;
        }
        if s.discriminant().is_negative() || q.discriminant().is_negative() {
            continue;
        }
        if !lattice.contains(&s).unwrap_or(false) {
            continue;
        }
        debug_assert!(condition_iv(&s), "lattice member fails parity test: {s}");
        let WallBetween::At(a) = wall_between(&s, target, beta) else {
            continue;
        };
        if &a < alpha_sq_min {
            continue;
        }
        // genuine walls have all three slopes finite and equal there
        let p = StabilityParams::new(a.clone(), beta.clone()).expect("positive root");
        let (mu_s, mu_q, mu_t) = (slope(&s, &p), slope(&q, &p), slope(target, &p));
        if mu_s != mu_t || mu_q != mu_t || mu_t == Slope::Infinite {
            continue;
        }
        debug_assert!(!central_charge(&s, &p).is_zero());
        let (sub, quot) = orient(s, q);
        out.push((a, sub, quot));
    }
    out
}

// ---------------------------------------------------------------------------
// serializable report forms

#[derive(Debug, Serialize)]
pub struct WallReportJson {
    pub target: Vec<String>,
    pub beta: String,
    pub alpha_sq_min: String,
    pub walls: Vec<WallJson>,
    pub strictly_semistable: Vec<Vec<String>>,
}

#[derive(Debug, Serialize)]
pub struct WallJson {
    pub alpha_sq: String,
    pub decompositions: Vec<DecompositionJson>,
}

#[derive(Debug, Serialize)]
pub struct DecompositionJson {
    pub sub: Vec<String>,
    pub quotient: Vec<String>,
    pub annotations: Vec<String>,
}

fn char_components(v: &Character) -> Vec<String> {
    vec![fmt_rat(&v.rank), fmt_rat(&v.c1), fmt_rat(&v.c2)]
}

impl WallReport {
    pub fn to_json_form(&self) -> WallReportJson {
        WallReportJson {
            target: char_components(&self.target.to_frame(&self.beta)),
            beta: fmt_rat(&self.beta),
            alpha_sq_min: fmt_rat(&self.alpha_sq_min),
            walls: self
                .walls
                .iter()
                .map(|w| WallJson {
                    alpha_sq: fmt_rat(&w.alpha_sq),
                    decompositions: w
                        .decompositions
                        .iter()
                        .map(|d| DecompositionJson {
                            sub: char_components(&d.sub),
                            quotient: char_components(&d.quotient),
                            annotations: d
                                .sub_annotations
                                .iter()
                                .map(|a| format!("sub={a}"))
                                .chain(d.quotient_annotations.iter().map(|a| format!("quotient={a}")))
                                .collect(),
                        })
                        .collect(),
                })
                .collect(),
            strictly_semistable: self
                .strictly_semistable
                .iter()
                .map(char_components)
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "alpha_sq,sub_rank,sub_c1,sub_c2,quot_rank,quot_c1,quot_c2,annotations\n",
        );
        for w in &self.walls {
            for d in &w.decompositions {
                let ann: Vec<String> = d
                    .sub_annotations
                    .iter()
                    .map(|a| format!("sub={a}"))
                    .chain(d.quotient_annotations.iter().map(|a| format!("quotient={a}")))
                    .collect();
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    fmt_rat(&w.alpha_sq),
                    fmt_rat(&d.sub.rank),
                    fmt_rat(&d.sub.c1),
                    fmt_rat(&d.sub.c2),
                    fmt_rat(&d.quotient.rank),
                    fmt_rat(&d.quotient.c1),
                    fmt_rat(&d.quotient.c2),
                    ann.join(";")
                ));
            }
        }
        out
    }
}

impl fmt::Display for WallReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "walls for {} at beta = {} (alpha^2 >= {})",
            self.target.to_frame(&self.beta),
            fmt_rat(&self.beta),
            fmt_rat(&self.alpha_sq_min)
        )?;
        if self.walls.is_empty() {
            writeln!(f, "  none")?;
        }
        for w in &self.walls {
            writeln!(f, "  alpha^2 = {}", fmt_rat(&w.alpha_sq))?;
            for d in &w.decompositions {
                let mut line = format!("    {} + {}", d.sub, d.quotient);
                let ann: Vec<String> = d
                    .sub_annotations
                    .iter()
                    .map(|a| format!("sub={a}"))
                    .chain(d.quotient_annotations.iter().map(|a| format!("quotient={a}")))
                    .collect();
                if !ann.is_empty() {
                    line.push_str(&format!("   [{}]", ann.join(", ")));
                }
                writeln!(f, "{line}")?;
            }
        }
        if !self.strictly_semistable.is_empty() {
            writeln!(f, "  proportional sub-classes (equal slope everywhere):")?;
            for s in &self.strictly_semistable {
                writeln!(f, "    {s}")?;
            }
        }
        Ok(())
    }
}
