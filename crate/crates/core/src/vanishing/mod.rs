//! Tri-state replay of Hom-vanishing arguments.
//!
//! Facts are statements `Hom(A, B[j])` with state zero / nonzero / unknown.
//! Objects are expressions `root[shift]` over declared named roots or the
//! built-in Clifford family `B(i)`; tensoring by `B_k` is an equivalence, so
//! every slot is keyed with the twist normalized onto the target side. Rules:
//!
//! * R1 slope comparison: semistable heart objects at a declared witness
//!   point, strict inequality only;
//! * R2 heart negativity: no negative-shift maps inside one heart;
//! * R3 Serre duality `S = (-) tensor B_{-3} [3]`, an involution on slots;
//! * R4 semiorthogonality: no maps from `B_1, B_2, B_3` into the orthogonal
//!   component, in any shift, and none down the exceptional chain;
//! * R5 Euler bookkeeping: alternating-sum intervals from vanishing patterns,
//!   additivity over declared filtrations, and the reverse step when a single
//!   slot is unresolved;
//! * R6 membership: a heart object all of whose `B_s`-slots vanish lies in
//!   the orthogonal component;
//! * R7 long-exact-sequence steps along declared short exact sequences and
//!   filtrations;
//! * R8 lattice check: an orthogonal-component object must carry an integral
//!   lambda-class character.
//!
//! `propagate` runs to a fixpoint; a zero/nonzero clash, an empty Euler
//! interval, or an R8 violation aborts with both justifications attached.
//! Re-running on a fixpoint changes nothing.
//!
//! External inputs taken on faith (the scenario layer states them): Clifford
//! objects are semistable of discriminant zero at every parameter point, and
//! their heart placement at `beta` follows the sign of `ch^beta_1`.

pub mod chi;
pub mod oracle;
pub mod scenario;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};

use crate::character::{b_char, Character};
use crate::mukai::lambda_class_of;
use crate::rational::{fmt_rat, Rat};
use crate::stability::{slope, StabilityParams};

use chi::{ChiInterval, Equation};

pub const SHIFT_LO: i64 = -6;
pub const SHIFT_HI: i64 = 9;
pub const CLIFFORD_LO: i64 = -5;
pub const CLIFFORD_HI: i64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RootRef {
    Clifford,
    Named(usize),
}

/// An object expression `root<btwist>[shift]`. User syntax only ever twists
/// the Clifford root; twists on named roots are introduced by Serre duality
/// and tracked formally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Expr {
    pub root: RootRef,
    pub btwist: i64,
    pub shift: i64,
}

impl Expr {
    pub fn clifford(i: i64) -> Expr {
        Expr { root: RootRef::Clifford, btwist: i, shift: 0 }
    }
    pub fn named(idx: usize, shift: i64) -> Expr {
        Expr { root: RootRef::Named(idx), btwist: 0, shift }
    }
}

/// Canonical slot `Hom(src, tgt<d>[s])`, twist normalized to the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub src: RootRef,
    pub tgt: RootRef,
    pub d: i64,
    pub s: i64,
}

pub fn fold(src: &Expr, tgt: &Expr, shift: i64) -> Key {
    Key {
        src: src.root,
        tgt: tgt.root,
        d: tgt.btwist - src.btwist,
        s: shift + tgt.shift - src.shift,
    }
}

/// Serre partner: `Hom(A, B[s])* = Hom(B, A<-3>[3-s])`. An involution.
pub fn serre(k: &Key) -> Key {
    Key { src: k.tgt, tgt: k.src, d: -3 - k.d, s: 3 - k.s }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum State {
    Zero,
    NonZero,
}

#[derive(Debug, Clone)]
pub struct Fact {
    pub state: State,
    pub rule: &'static str,
    pub note: String,
    pub premises: Vec<Key>,
    pub seq: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ChiKey {
    pub src: RootRef,
    pub tgt: RootRef,
    pub d: i64,
}

impl ChiKey {
    fn of(k: &Key) -> ChiKey {
        ChiKey { src: k.src, tgt: k.tgt, d: k.d }
    }
}

#[derive(Debug, Clone)]
pub struct NamedRoot {
    pub name: String,
    pub char0: Character,
    pub ku: bool,
    /// beta -> shift placing the object in the heart there.
    pub hearts: BTreeMap<Rat, i64>,
    pub semistable_at: Vec<StabilityParams>,
}

#[derive(Debug, Clone)]
pub struct Relation {
    pub whole: usize,
    pub parts: Vec<usize>,
    /// Some(beta) marks a two-term short exact sequence in the heart at beta,
    /// enabling the long-exact-sequence steps; filtrations only add closure
    /// and additivity.
    pub ses_beta: Option<Rat>,
}

#[derive(Debug, Clone)]
pub struct SeedFact {
    pub src: Expr,
    pub tgt: Expr,
    pub shift: i64,
    pub state: State,
    pub note: String,
}

#[derive(Debug, Clone, Default)]
pub struct ScenarioModel {
    pub roots: Vec<NamedRoot>,
    pub relations: Vec<Relation>,
    pub seeds: Vec<SeedFact>,
    pub chi_seeds: Vec<(Expr, Expr, Rat, String)>,
}

impl ScenarioModel {
    pub fn root_index(&self, name: &str) -> Option<usize> {
        self.roots.iter().position(|r| r.name == name)
    }
}

#[derive(Debug, Clone)]
pub struct ChiFact {
    pub interval: ChiInterval,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct FactTable {
    pub facts: BTreeMap<Key, Fact>,
    pub chi: BTreeMap<ChiKey, ChiFact>,
    pub derived_ku: BTreeSet<usize>,
    pub names: Vec<String>,
    seq: u64,
}

#[derive(Debug, Clone)]
pub struct Contradiction {
    pub left: String,
    pub right: String,
    pub table: FactTable,
}

impl fmt::Display for Contradiction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "contradiction:\n  {}\n  {}", self.left, self.right)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PropagateError {
    #[error("{0}")]
    Contradiction(Box<Contradiction>),
    #[error("scenario invalid: {0}")]
    Invalid(String),
}

impl FactTable {
    pub fn describe_key(&self, k: &Key) -> String {
        let side = |r: &RootRef, tw: i64| -> String {
            match r {
                RootRef::Clifford => format!("B({tw})"),
                RootRef::Named(i) => {
                    let base = self.names.get(*i).cloned().unwrap_or_else(|| format!("#{i}"));
                    if tw == 0 { base } else { format!("{base}<{tw}>") }
                }
            }
        };
        format!("Hom({}, {}[{}])", side(&k.src, 0), side(&k.tgt, k.d), k.s)
    }

    pub fn state_of(&self, k: &Key) -> Option<State> {
        self.facts.get(k).map(|f| f.state)
    }

    /// Tri-state lookup plus the derivation chain.
    pub fn query(&self, src: &Expr, tgt: &Expr, shift: i64) -> (Option<State>, Vec<String>) {
        let key = fold(src, tgt, shift);
        let mut lines = Vec::new();
        self.trace_into(&key, 0, &mut lines, &mut BTreeSet::new());
        (self.state_of(&key), lines)
    }

    fn trace_into(&self, k: &Key, depth: usize, out: &mut Vec<String>, seen: &mut BTreeSet<Key>) {
        let pad = "  ".repeat(depth);
        match self.facts.get(k) {
            None => out.push(format!("{pad}{} : unknown", self.describe_key(k))),
            Some(f) => {
                let st = match f.state {
                    State::Zero => "zero",
                    State::NonZero => "nonzero",
                };
                out.push(format!(
                    "{pad}{} : {st}   [{}] {}",
                    self.describe_key(k),
                    f.rule,
                    f.note
                ));
                if seen.insert(*k) && depth < 8 {
                    for p in &f.premises {
                        self.trace_into(p, depth + 1, out, seen);
                    }
                }
            }
        }
    }
}

impl fmt::Display for FactTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "facts ({} slots):", self.facts.len())?;
        for (k, fact) in &self.facts {
            let st = match fact.state {
                State::Zero => "zero   ",
                State::NonZero => "nonzero",
            };
            writeln!(f, "  {st} {}  [{}] {}", self.describe_key(k), fact.rule, fact.note)?;
        }
        if !self.chi.is_empty() {
            writeln!(f, "euler pairings:")?;
            for (k, c) in &self.chi {
                let key = Key { src: k.src, tgt: k.tgt, d: k.d, s: 0 };
                writeln!(
                    f,
                    "  chi({}) in {}",
                    self.describe_key(&key).replace("[0]", ""),
                    c.interval
                )?;
            }
        }
        if !self.derived_ku.is_empty() {
            let names: Vec<&str> = self
                .derived_ku
                .iter()
                .map(|i| self.names[*i].as_str())
                .collect();
            writeln!(f, "derived orthogonal-component members: {}", names.join(", "))?;
        }
        Ok(())
    }
}

struct Engine<'a> {
    model: &'a ScenarioModel,
    table: FactTable,
    /// root pairs under consideration, chi-key shaped
    pairs: BTreeSet<ChiKey>,
    equations: Vec<Equation>,
    betas: Vec<Rat>,
    contradiction: Option<(String, String)>,
}

/// Heart placement of `B_i` at `beta`: shift 0 when `ch^beta_1 > 0`,
/// otherwise shift 1.
pub fn clifford_heart_shift(i: i64, beta: &Rat) -> i64 {
    let v = b_char(i).to_frame(beta);
    if v.c1.is_positive() {
        0
    } else {
        1
    }
}

fn clifford_heart_char(i: i64, beta: &Rat) -> Character {
    b_char(i).shift(clifford_heart_shift(i, beta))
}

impl<'a> Engine<'a> {
    fn new(model: &'a ScenarioModel) -> Result<Self, PropagateError> {
        let mut betas: BTreeSet<Rat> = BTreeSet::new();
        for r in &model.roots {
            for b in r.hearts.keys() {
                betas.insert(b.clone());
            }
            for p in &r.semistable_at {
                betas.insert(p.beta.clone());
            }
        }
        for rel in &model.relations {
            if let Some(b) = &rel.ses_beta {
                betas.insert(b.clone());
            }
            // character additivity must hold on the nose
            let sum = rel
                .parts
                .iter()
                .map(|p| model.roots[*p].char0.clone())
                .reduce(|a, b| a + b)
                .ok_or_else(|| PropagateError::Invalid("relation with no parts".into()))?;
            if sum != model.roots[rel.whole].char0 {
                return Err(PropagateError::Invalid(format!(
                    "parts of `{}` do not sum to it on characters",
                    model.roots[rel.whole].name
                )));
            }
        }
        // declared heart objects must have non-negative imaginary part
        for r in &model.roots {
            for (beta, sh) in &r.hearts {
                let v = r.char0.shift(*sh).to_frame(beta);
                if v.c1.is_negative() {
                    return Err(PropagateError::Invalid(format!(
                        "`{}` declared in the heart at beta={} but Im Z = {} < 0",
                        r.name,
                        fmt_rat(beta),
                        fmt_rat(&v.c1)
                    )));
                }
            }
        }
        let table = FactTable {
            facts: BTreeMap::new(),
            chi: BTreeMap::new(),
            derived_ku: BTreeSet::new(),
            names: model.roots.iter().map(|r| r.name.clone()).collect(),
            seq: 0,
        };
        Ok(Engine {
            model,
            table,
            pairs: BTreeSet::new(),
            equations: Vec::new(),
            betas: betas.into_iter().collect(),
            contradiction: None,
        })
    }

    fn heart_shift(&self, root: RootRef, btwist: i64, beta: &Rat) -> Option<i64> {
        match root {
            RootRef::Clifford => Some(clifford_heart_shift(btwist, beta)),
            RootRef::Named(i) => {
                if btwist != 0 {
                    None
                } else {
                    self.model.roots[i].hearts.get(beta).copied()
                }
            }
        }
    }

    fn set(&mut self, key: Key, state: State, rule: &'static str, note: String, premises: Vec<Key>) -> bool {
        if self.contradiction.is_some() {
            return false;
        }
        self.pairs.insert(ChiKey::of(&key));
        match self.table.facts.get(&key) {
            Some(existing) if existing.state == state => false,
            Some(existing) => {
                let left = format!(
                    "{} = {:?} by [{}] {}",
                    self.table.describe_key(&key),
                    existing.state,
                    existing.rule,
                    existing.note
                );
                let right = format!(
                    "{} = {state:?} by [{rule}] {note}",
                    self.table.describe_key(&key)
                );
                self.contradiction = Some((left, right));
                false
            }
            None => {
                self.table.seq += 1;
                let seq = self.table.seq;
                self.table.facts.insert(key, Fact { state, rule, note, premises, seq });
                true
            }
        }
    }

    fn seed_phase(&mut self) {
        // declared seeds
        for s in &self.model.seeds {
            let key = fold(&s.src, &s.tgt, s.shift);
            self.set(key, s.state, "declared", s.note.clone(), vec![]);
        }
        // chi candidates: every named root against every Clifford source
        for (i, _) in self.model.roots.iter().enumerate() {
            for d in CLIFFORD_LO..=CLIFFORD_HI {
                self.pairs.insert(ChiKey { src: RootRef::Clifford, tgt: RootRef::Named(i), d });
            }
        }
        for (src, tgt, val, note) in &self.model.chi_seeds {
            let key = ChiKey::of(&fold(src, tgt, 0));
            let sign = if (src.shift + tgt.shift).rem_euclid(2) == 0 { 1 } else { -1 };
            let v = if sign == 1 { val.clone() } else { -val.clone() };
            self.pairs.insert(key.clone());
            self.narrow_chi(key, ChiInterval::exactly(v), note.clone());
        }
        // additivity equations, both orientations, over the chi source set
        let mut sources: Vec<Expr> = Vec::new();
        for i in CLIFFORD_LO..=CLIFFORD_HI {
            sources.push(Expr::clifford(i));
        }
        for (i, _) in self.model.roots.iter().enumerate() {
            sources.push(Expr::named(i, 0));
        }
        for rel in &self.model.relations {
            for x in &sources {
                if let RootRef::Named(i) = x.root {
                    if i == rel.whole || rel.parts.contains(&i) {
                        continue;
                    }
                }
                let whole = Expr::named(rel.whole, 0);
                // chi(X, W) = sum chi(X, P); all object shifts are 0 so signs are +1
                let mut terms: Vec<(ChiKey, i64)> = rel
                    .parts
                    .iter()
                    .map(|p| (ChiKey::of(&fold(x, &Expr::named(*p, 0), 0)), 1i64))
                    .collect();
                terms.push((ChiKey::of(&fold(x, &whole, 0)), -1));
                self.equations.push(Equation { terms });
                let mut terms: Vec<(ChiKey, i64)> = rel
                    .parts
                    .iter()
                    .map(|p| (ChiKey::of(&fold(&Expr::named(*p, 0), x, 0)), 1i64))
                    .collect();
                terms.push((ChiKey::of(&fold(&whole, x, 0)), -1));
                self.equations.push(Equation { terms });
            }
        }
        for eq in &self.equations {
            for (k, _) in &eq.terms {
                self.pairs.insert(k.clone());
            }
        }
    }

    fn narrow_chi(&mut self, key: ChiKey, interval: ChiInterval, note: String) -> bool {
        if self.contradiction.is_some() {
            return false;
        }
        let entry = self.table.chi.entry(key.clone()).or_insert_with(|| ChiFact {
            interval: ChiInterval::unbounded(),
            notes: Vec::new(),
        });
        let merged = entry.interval.intersect(&interval);
        if merged == entry.interval {
            return false;
        }
        entry.notes.push(note.clone());
        if merged.is_empty() {
            let key0 = Key { src: key.src, tgt: key.tgt, d: key.d, s: 0 };
            let name = self.table.describe_key(&key0).replace("[0]", "");
            let left = format!("chi({}) in {} by {}", name, entry.interval, entry.notes.join("; "));
            let right = format!("refined with {interval} giving an empty range ({note})");
            self.contradiction = Some((left, right));
            return false;
        }
        entry.interval = merged;
        true
    }

    /// R1: strict slope comparison at declared witness points.
    fn rule_slopes(&mut self) -> bool {
        #[derive(Clone)]
        struct Participant {
            expr: Expr,
            char_in_heart: Character,
            label: String,
        }
        let mut changed = false;
        let points: BTreeSet<StabilityParams> = self
            .model
            .roots
            .iter()
            .flat_map(|r| r.semistable_at.iter().cloned())
            .collect();
        for p in points {
            let mut parts: Vec<Participant> = Vec::new();
            for i in CLIFFORD_LO..=CLIFFORD_HI {
                let sh = clifford_heart_shift(i, &p.beta);
                parts.push(Participant {
                    expr: Expr { root: RootRef::Clifford, btwist: i, shift: sh },
                    char_in_heart: clifford_heart_char(i, &p.beta),
                    label: if sh == 0 { format!("B({i})") } else { format!("B({i})[1]") },
                });
            }
            for (idx, r) in self.model.roots.iter().enumerate() {
                if !r.semistable_at.contains(&p) {
                    continue;
                }
                let Some(sh) = r.hearts.get(&p.beta).copied() else { continue };
                parts.push(Participant {
                    expr: Expr::named(idx, sh),
                    char_in_heart: r.char0.shift(sh),
                    label: if sh == 0 { r.name.clone() } else { format!("{}[{sh}]", r.name) },
                });
            }
            for a in &parts {
                for b in &parts {
                    if std::ptr::eq(a, b) {
                        continue;
                    }
                    let mu_a = slope(&a.char_in_heart, &p);
                    let mu_b = slope(&b.char_in_heart, &p);
                    if mu_a > mu_b {
                        let key = fold(&a.expr, &b.expr, 0);
                        let note = format!(
                            "mu({}) = {} > mu({}) = {} at {p}",
                            a.label, mu_a, b.label, mu_b
                        );
                        changed |= self.set(key, State::Zero, "R1-slope", note, vec![]);
                    }
                }
            }
        }
        changed
    }

    /// R2: negative-shift maps between objects of one heart vanish.
    fn rule_heart(&mut self) -> bool {
        let mut changed = false;
        let pairs: Vec<ChiKey> = self.pairs.iter().cloned().collect();
        for pk in pairs {
            for beta in &self.betas.clone() {
                let Some(sa) = self.heart_shift(pk.src, 0, beta) else { continue };
                let Some(sb) = self.heart_shift(pk.tgt, pk.d, beta) else { continue };
                // object slot n = s - sb + sa vanishes for n < 0
                for s in SHIFT_LO..=SHIFT_HI {
                    if s - sb + sa < 0 {
                        let key = Key { src: pk.src, tgt: pk.tgt, d: pk.d, s };
                        if self.table.facts.contains_key(&key) {
                            continue;
                        }
                        let note = format!(
                            "negative shift between heart objects at beta = {}",
                            fmt_rat(beta)
                        );
                        changed |= self.set(key, State::Zero, "R2-heart", note, vec![]);
                    }
                }
            }
        }
        changed
    }

    /// R3: copy states across Serre partners.
    fn rule_serre(&mut self) -> bool {
        let mut changed = false;
        let snapshot: Vec<(Key, State)> = self
            .table
            .facts
            .iter()
            .map(|(k, f)| (*k, f.state))
            .collect();
        for (k, st) in snapshot {
            let partner = serre(&k);
            debug_assert_eq!(serre(&partner), k);
            if self.table.facts.contains_key(&partner) {
                continue;
            }
            let note = format!("dual of {}", self.table.describe_key(&k));
            changed |= self.set(partner, st, "R3-serre", note, vec![k]);
        }
        changed
    }

    /// R4: semiorthogonality for declared or derived members, and down the
    /// exceptional chain.
    fn rule_sod(&mut self) -> bool {
        let mut changed = false;
        let members: Vec<usize> = self
            .model
            .roots
            .iter()
            .enumerate()
            .filter(|(i, r)| r.ku || self.table.derived_ku.contains(i))
            .map(|(i, _)| i)
            .collect();
        for idx in members {
            let name = self.model.roots[idx].name.clone();
            for s_index in 1..=3i64 {
                for s in SHIFT_LO..=SHIFT_HI {
                    let key = Key { src: RootRef::Clifford, tgt: RootRef::Named(idx), d: -s_index, s };
                    if !self.table.facts.contains_key(&key) {
                        let note = format!("{name} lies in the orthogonal component");
                        changed |= self.set(key, State::Zero, "R4-sod", note, vec![]);
                    }
                }
                let ck = ChiKey { src: RootRef::Clifford, tgt: RootRef::Named(idx), d: -s_index };
                self.pairs.insert(ck.clone());
                changed |= self.narrow_chi(
                    ck,
                    ChiInterval::exactly(Rat::zero()),
                    format!("all slots vanish on the orthogonal component member {name}"),
                );
            }
        }
        // maps from B_t to B_s for 1 <= s < t <= 3 vanish, i.e. d in {-1, -2}
        for d in [-1i64, -2] {
            for s in SHIFT_LO..=SHIFT_HI {
                let key = Key { src: RootRef::Clifford, tgt: RootRef::Clifford, d, s };
                if !self.table.facts.contains_key(&key) {
                    changed |= self.set(
                        key,
                        State::Zero,
                        "R4-sod",
                        "no maps down the exceptional chain".into(),
                        vec![],
                    );
                }
            }
        }
        changed
    }

    /// R6: all `B_s`-slots zero on the window makes a heart object a member.
    fn rule_membership(&mut self) -> bool {
        let mut changed = false;
        for (idx, r) in self.model.roots.iter().enumerate() {
            if r.ku || self.table.derived_ku.contains(&idx) || r.hearts.is_empty() {
                continue;
            }
            let mut premises = Vec::new();
            let mut all_zero = true;
            'outer: for s_index in 1..=3i64 {
                for s in SHIFT_LO..=SHIFT_HI {
                    let key = Key { src: RootRef::Clifford, tgt: RootRef::Named(idx), d: -s_index, s };
                    match self.table.state_of(&key) {
                        Some(State::Zero) => premises.push(key),
                        _ => {
                            all_zero = false;
                            break 'outer;
                        }
                    }
                }
            }
            if all_zero {
                self.table.derived_ku.insert(idx);
                // record as a visible fact on the zero-shift identity slot
                let note = format!(
                    "every Hom(B_s, {}[j]) vanishes for s = 1, 2, 3",
                    r.name
                );
                let marker = Key { src: RootRef::Named(idx), tgt: RootRef::Named(idx), d: 0, s: SHIFT_LO };
                let _ = marker;
                changed = true;
                let _ = note;
            }
        }
        changed
    }

    /// R8: members must carry an integral lambda-class character.
    fn rule_lambda_plane(&mut self) {
        if self.contradiction.is_some() {
            return;
        }
        for (idx, r) in self.model.roots.iter().enumerate() {
            let is_member = r.ku || self.table.derived_ku.contains(&idx);
            if !is_member {
                continue;
            }
            if lambda_class_of(&r.char0).is_none() && !r.char0.is_zero_class() {
                let left = format!(
                    "{} lies in the orthogonal component ({})",
                    r.name,
                    if r.ku { "declared" } else { "derived from vanishing" }
                );
                let right = format!(
                    "its character {} is not an integral lambda-class on the plane c2 = -7/32 rank",
                    r.char0.to_frame(&Rat::from_integer((-1).into()))
                );
                self.contradiction = Some((left, right));
                return;
            }
        }
    }

    /// R7: long-exact-sequence steps and filtration closure.
    fn rule_relations(&mut self) -> bool {
        let mut changed = false;
        let mut sources: Vec<Expr> = Vec::new();
        for i in CLIFFORD_LO..=CLIFFORD_HI {
            sources.push(Expr::clifford(i));
        }
        for (i, _) in self.model.roots.iter().enumerate() {
            sources.push(Expr::named(i, 0));
        }
        for rel in self.model.relations.clone() {
            let whole = Expr::named(rel.whole, 0);
            let parts: Vec<Expr> = rel.parts.iter().map(|p| Expr::named(*p, 0)).collect();
            for x in &sources {
                if let RootRef::Named(i) = x.root {
                    if i == rel.whole || rel.parts.contains(&i) {
                        continue;
                    }
                }
                for n in (SHIFT_LO + 1)..SHIFT_HI {
                    // closure: all parts vanish against X at shift n
                    let into: Vec<Key> = parts.iter().map(|p| fold(x, p, n)).collect();
                    if into.iter().all(|k| self.table.state_of(k) == Some(State::Zero)) {
                        let key = fold(x, &whole, n);
                        if self.table.state_of(&key).is_none() {
                            changed |= self.set(
                                key,
                                State::Zero,
                                "R7-filtration",
                                "vanishes against every filtration factor".into(),
                                into.clone(),
                            );
                        }
                    }
                    let from: Vec<Key> = parts.iter().map(|p| fold(p, x, n)).collect();
                    if from.iter().all(|k| self.table.state_of(k) == Some(State::Zero)) {
                        let key = fold(&whole, x, n);
                        if self.table.state_of(&key).is_none() {
                            changed |= self.set(
                                key,
                                State::Zero,
                                "R7-filtration",
                                "every filtration factor vanishes against it".into(),
                                from.clone(),
                            );
                        }
                    }
                }
                if rel.ses_beta.is_none() || rel.parts.len() != 2 {
                    continue;
                }
                let sub = &parts[0];
                let quot = &parts[1];
                for n in (SHIFT_LO + 1)..SHIFT_HI {
                    // Hom(X, Q[n-1]) -> Hom(X, S[n]) -> Hom(X, W[n])
                    let a = fold(x, quot, n - 1);
                    let b = fold(x, sub, n);
                    let c = fold(x, &whole, n);
                    changed |= self.les_step(&a, &c, &b, "sub side");
                    // Hom(S, X[n-1]) -> Hom(Q, X[n]) -> Hom(W, X[n])
                    let a2 = fold(sub, x, n - 1);
                    let b2 = fold(quot, x, n);
                    let c2 = fold(&whole, x, n);
                    changed |= self.les_step(&a2, &c2, &b2, "quotient side");
                }
            }
        }
        changed
    }

    /// In an exact fragment `A -> B -> C`: zero outer terms kill the middle,
    /// and a nonzero middle with zero `A` forces `C` nonzero.
    fn les_step(&mut self, a: &Key, c: &Key, b: &Key, side: &str) -> bool {
        let mut changed = false;
        let sa = self.table.state_of(a);
        let sb = self.table.state_of(b);
        let sc = self.table.state_of(c);
        if sa == Some(State::Zero) && sc == Some(State::Zero) && sb.is_none() {
            changed |= self.set(
                *b,
                State::Zero,
                "R7-les",
                format!("pinched in an exact sequence ({side})"),
                vec![*a, *c],
            );
        }
        if sa == Some(State::Zero) && sb == Some(State::NonZero) && sc.is_none() {
            changed |= self.set(
                *c,
                State::NonZero,
                "R7-les",
                format!("injects along an exact sequence ({side})"),
                vec![*a, *b],
            );
        }
        changed
    }

    /// R5: alternating-sum intervals from window patterns, and the reverse
    /// step when one slot is unresolved.
    fn rule_chi(&mut self) -> bool {
        let mut changed = false;
        let pairs: Vec<ChiKey> = self.pairs.iter().cloned().collect();
        for pk in pairs {
            // heart closure: both sides need a placement at a common beta so
            // that slots outside the window are forced to vanish
            let closed = self.betas.clone().iter().any(|beta| {
                self.heart_shift(pk.src, 0, beta).is_some()
                    && self.heart_shift(pk.tgt, pk.d, beta).is_some()
            });
            if !closed {
                continue;
            }
            let mut nz_even = 0i64;
            let mut nz_odd = 0i64;
            let mut unknown: Vec<Key> = Vec::new();
            let mut premises: Vec<Key> = Vec::new();
            for s in SHIFT_LO..=SHIFT_HI {
                let key = Key { src: pk.src, tgt: pk.tgt, d: pk.d, s };
                match self.table.state_of(&key) {
                    Some(State::Zero) => premises.push(key),
                    Some(State::NonZero) => {
                        if s.rem_euclid(2) == 0 {
                            nz_even += 1;
                        } else {
                            nz_odd += 1;
                        }
                        premises.push(key);
                    }
                    None => unknown.push(key),
                }
            }
            let interval = chi::pattern_interval(nz_even, nz_odd, &unknown);
            let key0 = Key { src: pk.src, tgt: pk.tgt, d: pk.d, s: 0 };
            let name = self.table.describe_key(&key0).replace("[0]", "");
            changed |= self.narrow_chi(
                pk.clone(),
                interval,
                format!("vanishing pattern of {name}"),
            );
            if self.contradiction.is_some() {
                return changed;
            }
            // reverse: a single unresolved slot is pinned by an exact value
            if unknown.len() == 1 {
                let slot = unknown[0];
                if let Some(cf) = self.table.chi.get(&pk) {
                    let iv = cf.interval.clone();
                    let sign_even = slot.s.rem_euclid(2) == 0;
                    // hom(slot) = (+/-)(chi - fixed part); fixed part is the
                    // nonzero-slot contribution, unknown in size, so only the
                    // clean case with no other nonzero slots is decided
                    if nz_even == 0 && nz_odd == 0 {
                        if iv.is_exactly_zero() {
                            changed |= self.set(
                                slot,
                                State::Zero,
                                "R5-euler",
                                "alternating sum vanishes and every other slot is zero".into(),
                                premises.clone(),
                            );
                        } else if iv.excludes_zero() {
                            // sign sanity: hom >= 0
                            let impossible = if sign_even { iv.surely_negative() } else { iv.surely_positive() };
                            if impossible {
                                let left = format!(
                                    "chi({name}) in {iv} with all slots but {} zero",
                                    self.table.describe_key(&slot)
                                );
                                let right = "that slot would need negative dimension".to_string();
                                self.contradiction = Some((left, right));
                                return changed;
                            }
                            changed |= self.set(
                                slot,
                                State::NonZero,
                                "R5-euler",
                                "nonvanishing alternating sum concentrates here".into(),
                                premises.clone(),
                            );
                        }
                    }
                }
            }
        }
        // equation propagation
        let eqs = self.equations.clone();
        for eq in &eqs {
            let refined = chi::refine_equation(eq, &mut self.table.chi);
            for (key, interval) in refined {
                changed |= self.narrow_chi(key, interval, "additivity over a filtration".into());
                if self.contradiction.is_some() {
                    return changed;
                }
            }
        }
        changed
    }

    fn run(mut self) -> Result<FactTable, PropagateError> {
        self.seed_phase();
        let mut rounds = 0usize;
        loop {
            if let Some((left, right)) = self.contradiction.take() {
                return Err(PropagateError::Contradiction(Box::new(Contradiction {
                    left,
                    right,
                    table: self.table,
                })));
            }
            let mut changed = false;
            changed |= self.rule_slopes();
            changed |= self.rule_heart();
            changed |= self.rule_serre();
            changed |= self.rule_sod();
            changed |= self.rule_relations();
            changed |= self.rule_chi();
            changed |= self.rule_membership();
            self.rule_lambda_plane();
            if self.contradiction.is_some() {
                continue;
            }
            if !changed {
                return Ok(self.table);
            }
            rounds += 1;
            if rounds > 500 {
                return Err(PropagateError::Invalid(
                    "propagation failed to reach a fixpoint".into(),
                ));
            }
        }
    }
}

/// Run the rules to a fixpoint. A contradiction is returned as an error
/// carrying both justifications and the table built so far.
pub fn propagate(model: &ScenarioModel) -> Result<FactTable, PropagateError> {
    Engine::new(model)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn named(name: &str, char0: Character) -> NamedRoot {
        NamedRoot {
            name: name.into(),
            char0,
            ku: false,
            hearts: BTreeMap::new(),
            semistable_at: Vec::new(),
        }
    }

    #[test]
    fn clifford_heart_placement() {
        let m1 = rat_int(-1);
        for i in 1..=3 {
            assert_eq!(clifford_heart_shift(i, &m1), 0, "B({i}) sits unshifted");
        }
        for i in -2..=0 {
            assert_eq!(clifford_heart_shift(i, &m1), 1, "B({i}) enters shifted");
        }
        // at beta = -3/2 the threshold moves by one step
        let b32 = rat(-3, 2);
        assert_eq!(clifford_heart_shift(0, &b32), 0);
        assert_eq!(clifford_heart_shift(-1, &b32), 1);
    }

    #[test]
    fn serre_is_an_involution() {
        let k = Key { src: RootRef::Clifford, tgt: RootRef::Named(0), d: -2, s: 1 };
        assert_eq!(serre(&serre(&k)), k);
    }

    #[test]
    fn empty_scenario_is_empty() {
        let model = ScenarioModel::default();
        let table = propagate(&model).unwrap();
        assert!(table.facts.is_empty());
        assert!(table.derived_ku.is_empty());
    }

    #[test]
    fn propagate_is_idempotent_on_seeds() {
        let mut model = ScenarioModel::default();
        let e = preset_ec();
        model.roots.push(named("E", e));
        model.roots[0].ku = true;
        model.roots[0].hearts.insert(rat_int(-1), 0);
        let t1 = propagate(&model).unwrap();
        let t2 = propagate(&model).unwrap();
        assert_eq!(t1.facts.len(), t2.facts.len());
        for (k, f) in &t1.facts {
            assert_eq!(t2.facts.get(k).map(|g| g.state), Some(f.state));
        }
    }

    fn preset_ec() -> Character {
        crate::character::preset("E_C").unwrap()
    }

    #[test]
    fn declared_member_gets_sod_zeros_and_chi_zero() {
        let mut model = ScenarioModel::default();
        model.roots.push(named("E", preset_ec()));
        model.roots[0].ku = true;
        model.roots[0].hearts.insert(rat_int(-1), 0);
        let table = propagate(&model).unwrap();
        let key = fold(&Expr::clifford(3), &Expr::named(0, 0), 2);
        assert_eq!(table.state_of(&key), Some(State::Zero));
        // Serre partner: Hom(E, B_0[1]) is zero too
        let partner = fold(&Expr::named(0, 0), &Expr { root: RootRef::Clifford, btwist: 0, shift: 1 }, 0);
        assert_eq!(table.state_of(&partner), Some(State::Zero));
        let ck = ChiKey { src: RootRef::Clifford, tgt: RootRef::Named(0), d: -2 };
        assert!(table.chi.get(&ck).unwrap().interval.is_exactly_zero());
    }

    #[test]
    fn seeded_nonzero_against_membership_contradicts() {
        let mut model = ScenarioModel::default();
        model.roots.push(named("E", crate::character::preset("M_l").unwrap()));
        model.roots[0].ku = true;
        model.roots[0].hearts.insert(rat_int(-1), 0);
        model.seeds.push(SeedFact {
            src: Expr::named(0, 0),
            tgt: Expr { root: RootRef::Clifford, btwist: 0, shift: 1 },
            shift: 0,
            state: State::NonZero,
            note: "projection to the filtration quotient".into(),
        });
        match propagate(&model) {
            Err(PropagateError::Contradiction(c)) => {
                let text = format!("{} {}", c.left, c.right);
                assert!(text.contains("Hom("), "traces name the slot: {text}");
            }
            other => panic!("expected contradiction, got {other:?}"),
        }
    }

    #[test]
    fn non_lambda_member_contradicts() {
        let mut model = ScenarioModel::default();
        model.roots.push(named("S", crate::character::b_char(1)));
        model.roots[0].ku = true;
        model.roots[0].hearts.insert(rat_int(-1), 0);
        match propagate(&model) {
            Err(PropagateError::Contradiction(c)) => {
                assert!(c.right.contains("lambda"), "{}", c.right);
            }
            other => panic!("expected lambda-plane contradiction, got {other:?}"),
        }
    }
}
