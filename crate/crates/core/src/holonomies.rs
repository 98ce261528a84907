//! Finite footprints of tail and double-tail holonomies.
//!
//! Every map here acts on finite words. Block swaps exchange two words
//! with the same length and the same monoid value, prefix swaps exchange
//! one-sided prefixes with the same pending openers, and `ξ` turns
//! pending openers into closers. The checks verify admissibility
//! preservation and exact measure equality over exhaustive finite
//! scopes.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::measures::{profile_weight, CylinderMeasure, Measure, MeasureKind};
use crate::numeric::{format_rational, rational_to_f64};
use crate::word_algebra::monoid::{is_admissible, reduce, StackState};
use crate::word_algebra::profile::{hat_counts, unmatched_profile};
use crate::word_algebra::{MonoidForm, Symbol, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HolonomyError {
    #[error("`{w}` and `{w_prime}` are not monoid-equivalent words of equal length")]
    NotEquivalent { w: String, w_prime: String },
    #[error("word `{0}` is inadmissible")]
    Inadmissible(String),
    #[error("words have different alphabets ({0} vs {1})")]
    AlphabetMismatch(u32, u32),
    #[error("prefixes have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("ξ needs no unmatched closers in b, found {0}")]
    UnmatchedClosers(usize),
    #[error("shift count {t} outside [1, {max}] for a word with {j} unmatched openers")]
    ShiftOutOfRange { t: usize, j: usize, max: usize },
    #[error("type index {i} outside [1, {m}]")]
    TypeOutOfRange { i: u32, m: u32 },
    #[error("census scope exceeded: {0}")]
    ScopeExceeded(String),
    #[error("no synchronization witness exists for m = 1 (full 2-shift)")]
    FullShift,
    #[error("the one-sided measure only admits an empty left context")]
    OneSidedLeftContext,
}

/// Same length and the same nonzero monoid value.
pub fn monoid_equivalent(w: &Word, w_prime: &Word) -> bool {
    if w.len() != w_prime.len() || w.m() != w_prime.m() {
        return false;
    }
    let form = reduce(w);
    !form.is_zero() && form == reduce(w_prime)
}

/// Exchanges `w` and `w′` when one of them occupies coordinates
/// `k..k+|w|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockSwap {
    w: Word,
    w_prime: Word,
    k: i64,
}

impl BlockSwap {
    pub fn new(w: Word, w_prime: Word, k: i64) -> Result<Self, HolonomyError> {
        if !monoid_equivalent(&w, &w_prime) {
            return Err(HolonomyError::NotEquivalent { w: w.to_string(), w_prime: w_prime.to_string() });
        }
        Ok(BlockSwap { w, w_prime, k })
    }

    pub fn w(&self) -> &Word {
        &self.w
    }

    pub fn w_prime(&self) -> &Word {
        &self.w_prime
    }

    pub fn position(&self) -> i64 {
        self.k
    }

    pub fn reverse(&self) -> BlockSwap {
        BlockSwap { w: self.w_prime.clone(), w_prime: self.w.clone(), k: self.k }
    }

    /// Applies the swap to a configuration whose first symbol sits at
    /// coordinate `origin`. Returns `None` outside the domain `[w]_k`.
    pub fn apply(&self, config: &Word, origin: i64) -> Option<Word> {
        let start = usize::try_from(self.k - origin).ok()?;
        let end = start + self.w.len();
        if end > config.len() || config.symbols()[start..end] != *self.w.symbols() {
            return None;
        }
        let mut symbols = config.symbols().to_vec();
        symbols[start..end].copy_from_slice(self.w_prime.symbols());
        Some(Word::from_trusted(config.m(), symbols))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SwapCheck {
    pub lhs_admissible: bool,
    pub rhs_admissible: bool,
    pub pass: bool,
}

/// `admissible(u·w·v) ⇔ admissible(u·w′·v)` for one context.
pub fn block_swap_admissibility(u: &Word, w: &Word, w_prime: &Word, v: &Word) -> Result<SwapCheck, HolonomyError> {
    if !monoid_equivalent(w, w_prime) {
        return Err(HolonomyError::NotEquivalent { w: w.to_string(), w_prime: w_prime.to_string() });
    }
    let lhs_admissible = is_admissible(&splice(u, w, v));
    let rhs_admissible = is_admissible(&splice(u, w_prime, v));
    Ok(SwapCheck { lhs_admissible, rhs_admissible, pass: lhs_admissible == rhs_admissible })
}

fn splice(u: &Word, w: &Word, v: &Word) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(u.len() + w.len() + v.len());
    out.extend_from_slice(u.symbols());
    out.extend_from_slice(w.symbols());
    out.extend_from_slice(v.symbols());
    out
}

/// `(α̂, β̂)` by a single stack pass, or `None` when inadmissible.
fn scan(parts: &[&[Symbol]]) -> Option<(usize, usize)> {
    let mut state = StackState::new();
    for part in parts {
        for &s in *part {
            if !state.push(s) {
                return None;
            }
        }
    }
    Some((state.open_stack().len(), state.unmatched_betas().len()))
}

/// All admissible words of length `<= max_len`, shortest first, each
/// length in token order.
pub fn admissible_words(m: u32, max_len: usize) -> Vec<Word> {
    let mut by_len: Vec<Vec<Word>> = vec![Vec::new(); max_len + 1];
    crate::counting::visit_admissible(m, max_len, &[], |path, _| {
        by_len[path.len()].push(Word::from_trusted(m, path.to_vec()));
    });
    by_len.into_iter().flat_map(|mut ws| {
        ws.sort();
        ws
    }).collect()
}

/// Monoid-equivalence classes among admissible words of length
/// `1..=max_block` with at least two members.
pub fn equivalence_classes(m: u32, max_block: usize) -> Vec<Vec<Word>> {
    let mut classes: BTreeMap<(usize, String), Vec<Word>> = BTreeMap::new();
    for w in admissible_words(m, max_block) {
        if w.is_empty() {
            continue;
        }
        classes.entry((w.len(), reduce(&w).to_string())).or_default().push(w);
    }
    classes.into_values().filter(|c| c.len() > 1).collect()
}

/// Exact profile weights, memoized per `(len, α̂, β̂)`.
struct WeightCache {
    kind: MeasureKind,
    m: u32,
    values: HashMap<(usize, usize, usize), BigRational>,
}

impl WeightCache {
    fn new(kind: MeasureKind, m: u32) -> Self {
        WeightCache { kind, m, values: HashMap::new() }
    }

    fn get(&mut self, len: usize, profile: Option<(usize, usize)>) -> BigRational {
        match profile {
            None => BigRational::zero(),
            Some((s, b)) => {
                let (kind, m) = (self.kind, self.m);
                self.values.entry((len, s, b)).or_insert_with(|| profile_weight(kind, m, len, s, b)).clone()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub context: (String, String),
    pub lhs: String,
    pub rhs: String,
}

/// Outcome for one equivalent pair over every context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvarianceRecord {
    pub pair: (String, String),
    pub contexts: u64,
    pub admissible_contexts: u64,
    pub admissibility_violations: u64,
    pub measure_violations: u64,
    /// Values at the empty context.
    pub lhs: String,
    pub rhs: String,
    pub first_violation: Option<Violation>,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub kind: MeasureKind,
    pub m: u32,
    pub max_block: usize,
    pub max_context: usize,
    pub pairs: usize,
    pub checks: u64,
    pub admissibility_violations: u64,
    pub measure_violations: u64,
    pub records: Vec<InvarianceRecord>,
    pub pass: bool,
}

/// Exact measure invariance under every block swap with `|w| <=
/// max_block`, over admissible contexts `u, v` with `|u|, |v| <=
/// max_context`. For `nu` the left context is empty.
///
/// Each class member is compared with the first member of its class,
/// which covers all pairs by transitivity.
pub fn invariance_suite(kind: MeasureKind, m: u32, max_block: usize, max_context: usize) -> InvarianceReport {
    let classes = equivalence_classes(m, max_block);
    let rights = admissible_words(m, max_context);
    let lefts = if kind.is_two_sided() { rights.clone() } else { vec![Word::empty(m)] };
    let pairs: Vec<(&Word, &Word)> =
        classes.iter().flat_map(|c| c[1..].iter().map(move |w2| (&c[0], w2))).collect();

    let mut records: Vec<InvarianceRecord> = pairs
        .par_iter()
        .map(|&(w, w2)| {
            let mut cache = WeightCache::new(kind, m);
            let lhs0 = format_rational(&cache.get(w.len(), scan(&[w.symbols()])));
            let rhs0 = format_rational(&cache.get(w2.len(), scan(&[w2.symbols()])));
            let mut rec = InvarianceRecord {
                pair: (w.to_string(), w2.to_string()),
                contexts: 0,
                admissible_contexts: 0,
                admissibility_violations: 0,
                measure_violations: 0,
                lhs: lhs0,
                rhs: rhs0,
                first_violation: None,
                equal: true,
            };
            for u in &lefts {
                for v in &rights {
                    let len = u.len() + w.len() + v.len();
                    let p1 = scan(&[u.symbols(), w.symbols(), v.symbols()]);
                    let p2 = scan(&[u.symbols(), w2.symbols(), v.symbols()]);
                    rec.contexts += 1;
                    if p1.is_some() {
                        rec.admissible_contexts += 1;
                    }
                    let admissibility_ok = p1.is_some() == p2.is_some();
                    let (a, b) = (cache.get(len, p1), cache.get(len, p2));
                    if !admissibility_ok {
                        rec.admissibility_violations += 1;
                    }
                    if a != b {
                        rec.measure_violations += 1;
                    }
                    if (!admissibility_ok || a != b) && rec.first_violation.is_none() {
                        rec.first_violation = Some(Violation {
                            context: (u.to_string(), v.to_string()),
                            lhs: format_rational(&a),
                            rhs: format_rational(&b),
                        });
                    }
                }
            }
            rec.equal = rec.first_violation.is_none();
            rec
        })
        .collect();
    records.sort_by(|a, b| a.pair.cmp(&b.pair));

    let checks = records.iter().map(|r| r.contexts).sum();
    let admissibility_violations = records.iter().map(|r| r.admissibility_violations).sum();
    let measure_violations = records.iter().map(|r| r.measure_violations).sum();
    InvarianceReport {
        kind,
        m,
        max_block,
        max_context,
        pairs: records.len(),
        checks,
        admissibility_violations,
        measure_violations,
        pass: admissibility_violations == 0 && measure_violations == 0,
        records,
    }
}

// ---------------------------------------------------------------------------
// One-sided prefix swaps

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrefixSwapError {
    #[error(transparent)]
    Invalid(#[from] HolonomyError),
    #[error("pending openers differ at stack position {position}: {left:?} vs {right:?}")]
    StackMismatch { position: usize, left: Option<u32>, right: Option<u32> },
}

/// A one-sided tail holonomy `[u]_0 → [u′]_0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrefixSwap {
    pub u: Word,
    pub u_prime: Word,
    /// Shared pending-opener types, bottom first.
    pub stack: Vec<u32>,
    pub nu_u: CylinderMeasure,
    pub nu_u_prime: CylinderMeasure,
}

/// Accepts `u → u′` iff both prefixes leave the same openers pending.
/// Unmatched closers are irrelevant on the one-sided shift.
pub fn one_sided_prefix_swap(u: &Word, u_prime: &Word) -> Result<PrefixSwap, PrefixSwapError> {
    if u.m() != u_prime.m() {
        return Err(HolonomyError::AlphabetMismatch(u.m(), u_prime.m()).into());
    }
    if u.len() != u_prime.len() {
        return Err(HolonomyError::LengthMismatch(u.len(), u_prime.len()).into());
    }
    let stack_of = |w: &Word| match reduce(w) {
        MonoidForm::Zero => Err(HolonomyError::Inadmissible(w.to_string())),
        MonoidForm::Reduced { alphas, .. } => Ok(alphas),
    };
    let (s1, s2) = (stack_of(u)?, stack_of(u_prime)?);
    if let Some(position) = (0..s1.len().max(s2.len())).find(|&p| s1.get(p) != s2.get(p)) {
        return Err(PrefixSwapError::StackMismatch {
            position,
            left: s1.get(position).copied(),
            right: s2.get(position).copied(),
        });
    }
    let nu = Measure { kind: MeasureKind::NuOneSided, m: u.m() };
    Ok(PrefixSwap {
        u: u.clone(),
        u_prime: u_prime.clone(),
        stack: s1,
        nu_u: nu.cylinder_unchecked(u),
        nu_u_prime: nu.cylinder_unchecked(u_prime),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrefixSwapCheck {
    pub pair: (String, String),
    pub continuations: u64,
    pub admissibility_violations: u64,
    pub measure_violations: u64,
    pub first_violation: Option<String>,
    pub pass: bool,
}

/// Every continuation `v` with `|v| <= max_len`, admissible or not.
fn all_words(m: u32, max_len: usize) -> Vec<Vec<Symbol>> {
    let alphabet = Symbol::alphabet(m);
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<Symbol>| {
                alphabet.iter().map(move |&c| {
                    let mut x = w.clone();
                    x.push(c);
                    x
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

impl PrefixSwap {
    /// `admissible(u·v) ⇔ admissible(u′·v)` and `ν[u·v] = ν[u′·v]` for
    /// every `v` with `|v| <= max_len`.
    pub fn check(&self, max_len: usize) -> PrefixSwapCheck {
        check_prefix_swap(self, &all_words(self.u.m(), max_len))
    }
}

fn check_prefix_swap(swap: &PrefixSwap, continuations: &[Vec<Symbol>]) -> PrefixSwapCheck {
    let m = swap.u.m();
    let mut cache = WeightCache::new(MeasureKind::NuOneSided, m);
    let mut out = PrefixSwapCheck {
        pair: (swap.u.to_string(), swap.u_prime.to_string()),
        continuations: 0,
        admissibility_violations: 0,
        measure_violations: 0,
        first_violation: None,
        pass: swap.nu_u == swap.nu_u_prime,
    };
    for v in continuations {
        let len = swap.u.len() + v.len();
        let p1 = scan(&[swap.u.symbols(), v]);
        let p2 = scan(&[swap.u_prime.symbols(), v]);
        out.continuations += 1;
        let adm_ok = p1.is_some() == p2.is_some();
        let measure_ok = cache.get(len, p1) == cache.get(len, p2);
        out.admissibility_violations += u64::from(!adm_ok);
        out.measure_violations += u64::from(!measure_ok);
        if (!adm_ok || !measure_ok) && out.first_violation.is_none() {
            out.first_violation = Some(Word::from_trusted(m, v.clone()).to_string());
        }
    }
    out.pass &= out.admissibility_violations == 0 && out.measure_violations == 0;
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrefixSwapSuite {
    pub m: u32,
    pub max_prefix: usize,
    pub max_continuation: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub failures: Vec<PrefixSwapCheck>,
    pub pass: bool,
}

/// Runs every accepted prefix swap among admissible prefixes of length
/// `1..=max_prefix`, against all continuations up to `max_continuation`.
/// Rejections are counted over all same-length pairs.
pub fn prefix_swap_suite(m: u32, max_prefix: usize, max_continuation: usize) -> PrefixSwapSuite {
    let words: Vec<Word> = admissible_words(m, max_prefix).into_iter().filter(|w| !w.is_empty()).collect();
    let mut groups: BTreeMap<(usize, Vec<u32>), Vec<&Word>> = BTreeMap::new();
    for w in &words {
        let alphas = reduce(w).unmatched_alphas().expect("admissible").to_vec();
        groups.entry((w.len(), alphas)).or_default().push(w);
    }
    let mut same_len: HashMap<usize, usize> = HashMap::new();
    for w in &words {
        *same_len.entry(w.len()).or_default() += 1;
    }
    let total_pairs: usize = same_len.values().map(|n| n * (n - 1) / 2).sum();
    let accepted_pairs: usize = groups.values().map(|g| g.len() * (g.len() - 1) / 2).sum();

    let continuations = all_words(m, max_continuation);
    let swaps: Vec<PrefixSwap> = groups
        .values()
        .flat_map(|g| g[1..].iter().map(move |w2| (g[0], *w2)))
        .map(|(a, b)| one_sided_prefix_swap(a, b).expect("same stack"))
        .collect();
    let mut failures: Vec<PrefixSwapCheck> = swaps
        .par_iter()
        .map(|s| check_prefix_swap(s, &continuations))
        .filter(|c| !c.pass)
        .collect();
    failures.sort_by(|a, b| a.pair.cmp(&b.pair));
    PrefixSwapSuite {
        m,
        max_prefix,
        max_continuation,
        accepted: accepted_pairs,
        rejected: total_pairs - accepted_pairs,
        pass: failures.is_empty(),
        failures,
    }
}

// ---------------------------------------------------------------------------
// ξ surgery

/// `ξ(b, t)`: the leftmost pending opener of `b` becomes `b_i`, and each
/// of the next `t` pending openers becomes the closer of its own type.
pub fn xi_surgery(b: &Word, i: u32, t: usize) -> Result<Word, HolonomyError> {
    if i == 0 || i > b.m() {
        return Err(HolonomyError::TypeOutOfRange { i, m: b.m() });
    }
    let profile = unmatched_profile(b).map_err(|_| HolonomyError::Inadmissible(b.to_string()))?;
    if profile.hat_beta != 0 {
        return Err(HolonomyError::UnmatchedClosers(profile.hat_beta));
    }
    let j = profile.hat_alpha;
    if t == 0 || t + 1 > j {
        return Err(HolonomyError::ShiftOutOfRange { t, j, max: j.saturating_sub(1) });
    }
    let mut symbols = b.symbols().to_vec();
    let positions = &profile.alpha_positions;
    symbols[positions[0]] = Symbol::close(i);
    for &p in &positions[1..=t] {
        symbols[p] = symbols[p].dual();
    }
    Ok(Word::from_trusted(b.m(), symbols))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XiContinuationCheck {
    pub prefixes: usize,
    pub continuations: u64,
    pub violations: u64,
    pub first_violation: Option<(String, String)>,
}

/// For every prefix `w` with no pending openers and `|w| <= max_prefix`,
/// and every `y` with `|y| <= max_continuation`: if `w·a_i·b·y` is
/// admissible then so is `w·a_i·ξ(b,t)·y`.
pub fn xi_continuation_check(b: &Word, i: u32, t: usize, max_prefix: usize, max_continuation: usize) -> Result<XiContinuationCheck, HolonomyError> {
    let image = xi_surgery(b, i, t)?;
    let m = b.m();
    let prefixes: Vec<Word> = admissible_words(m, max_prefix)
        .into_iter()
        .filter(|w| reduce(w).unmatched_alphas().is_some_and(|a| a.is_empty()))
        .collect();
    let ys = all_words(m, max_continuation);
    let opener = [Symbol::open(i)];
    let mut out = XiContinuationCheck { prefixes: prefixes.len(), continuations: 0, violations: 0, first_violation: None };
    for w in &prefixes {
        for y in &ys {
            out.continuations += 1;
            let before = scan(&[w.symbols(), &opener, b.symbols(), y]).is_some();
            let after = scan(&[w.symbols(), &opener, image.symbols(), y]).is_some();
            if before && !after {
                out.violations += 1;
                if out.first_violation.is_none() {
                    out.first_violation = Some((w.to_string(), Word::from_trusted(m, y.clone()).to_string()));
                }
            }
        }
    }
    Ok(out)
}

/// Largest `a_K` the census will enumerate.
pub const CENSUS_LIMIT: u64 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftCensus {
    pub t: usize,
    pub image_size: usize,
    pub max_fiber: usize,
    /// `|image| * m >= |U(K, j)|`.
    pub pigeonhole_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberCensus {
    pub m: u32,
    pub k: usize,
    pub j: usize,
    pub i: u32,
    /// `|U(K, j)|`: words of length `K` with more than `j` pending
    /// openers and no unmatched closers.
    pub domain_size: usize,
    pub shifts: Vec<ShiftCensus>,
    pub cross_shift_collisions: usize,
    pub pass: bool,
}

/// Applies `ξ(·, t)` for `t = 1..=j` on `U(K, j)` and tallies fibers.
/// Every `b` in `U(K, j)` has at least `j + 1` pending openers, so each
/// such `t` is valid for all of them.
pub fn fiber_census(m: u32, k: usize, j: usize, i: u32) -> Result<FiberCensus, HolonomyError> {
    let a_k = crate::counting::count_admissible(m, k);
    if a_k > BigUint::from(CENSUS_LIMIT) {
        return Err(HolonomyError::ScopeExceeded(format!("a_{k} = {a_k} words at m = {m} exceeds {CENSUS_LIMIT}")));
    }
    if i == 0 || i > m {
        return Err(HolonomyError::TypeOutOfRange { i, m });
    }
    let mut domain = Vec::new();
    crate::counting::visit_admissible(m, k, &[], |path, state| {
        if path.len() == k && state.unmatched_betas().is_empty() && state.open_stack().len() > j {
            domain.push(Word::from_trusted(m, path.to_vec()));
        }
    });
    let mut shifts = Vec::new();
    let mut seen: HashSet<Word> = HashSet::new();
    let mut collisions = 0;
    for t in 1..=j {
        let mut fibers: HashMap<Word, usize> = HashMap::new();
        for b in &domain {
            *fibers.entry(xi_surgery(b, i, t)?).or_default() += 1;
        }
        for image in fibers.keys() {
            if !seen.insert(image.clone()) {
                collisions += 1;
            }
        }
        shifts.push(ShiftCensus {
            t,
            image_size: fibers.len(),
            max_fiber: fibers.values().copied().max().unwrap_or(0),
            pigeonhole_ok: fibers.len() * m as usize >= domain.len(),
        });
    }
    let pass = collisions == 0 && shifts.iter().all(|s| s.max_fiber <= m as usize && s.pigeonhole_ok);
    Ok(FiberCensus { m, k, j, i, domain_size: domain.len(), shifts, cross_shift_collisions: collisions, pass })
}

// ---------------------------------------------------------------------------
// Minimal balanced extensions

/// A balanced word `l·a·r` together with the offset `|l|` of `a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Extension {
    pub word: Word,
    pub offset: usize,
}

impl Extension {
    pub fn left(&self) -> &[Symbol] {
        &self.word.symbols()[..self.offset]
    }
}

/// Direct test of the three defining conditions: `l·a·r` is balanced
/// and no pair (suffix of `l`, prefix of `r`) other than `(l, r)` itself
/// gives a balanced word around `a`.
pub fn is_minimal_balanced_extension(l: &[Symbol], a: &[Symbol], r: &[Symbol]) -> bool {
    let balanced = |x: &[Symbol], y: &[Symbol]| {
        let mut state = StackState::new();
        x.iter().chain(a).chain(y).all(|&s| state.push(s)) && state.form().is_identity()
    };
    if !balanced(l, r) {
        return false;
    }
    (0..=l.len()).all(|ls| (0..=r.len()).all(|rp| (ls == 0 && rp == r.len()) || !balanced(&l[ls..], &r[..rp])))
}

/// Right parts that close every opener in `pending` (bottom first) and
/// stop at the first moment they are all closed.
fn first_passage_closers(m: u32, pending: &[u32], max_len: usize) -> Vec<Vec<Symbol>> {
    fn rec(m: u32, stack: &mut Vec<u32>, path: &mut Vec<Symbol>, max_len: usize, out: &mut Vec<Vec<Symbol>>) {
        let Some(&top) = stack.last() else {
            out.push(path.clone());
            return;
        };
        if path.len() + stack.len() > max_len {
            return;
        }
        stack.pop();
        path.push(Symbol::close(top));
        rec(m, stack, path, max_len, out);
        path.pop();
        stack.push(top);
        for c in 1..=m {
            stack.push(c);
            path.push(Symbol::open(c));
            rec(m, stack, path, max_len, out);
            path.pop();
            stack.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, &mut pending.to_vec(), &mut Vec::new(), max_len, &mut out);
    out
}

/// Every minimal balanced extension of an admissible `a` with total
/// length `<= max_len`, sorted by word then offset.
pub fn minimal_balanced_extensions(a: &Word, max_len: usize) -> Result<Vec<Extension>, HolonomyError> {
    let (betas, alphas) = match reduce(a) {
        MonoidForm::Zero => return Err(HolonomyError::Inadmissible(a.to_string())),
        MonoidForm::Reduced { betas, alphas } => (betas, alphas),
    };
    let m = a.m();
    let Some(budget) = max_len.checked_sub(a.len()) else {
        return Ok(Vec::new());
    };
    // a left part read backwards is a right part of the mirrored problem
    let mirrored: Vec<u32> = betas.iter().rev().copied().collect();
    let lefts: Vec<Vec<Symbol>> = first_passage_closers(m, &mirrored, budget)
        .into_iter()
        .map(|p| p.into_iter().rev().map(Symbol::dual).collect())
        .collect();
    let rights = first_passage_closers(m, &alphas, budget);
    let mut out = Vec::new();
    for l in &lefts {
        for r in rights.iter().filter(|r| l.len() + r.len() <= budget) {
            let mut symbols = l.clone();
            symbols.extend_from_slice(a.symbols());
            symbols.extend_from_slice(r);
            out.push(Extension { word: Word::from_trusted(m, symbols), offset: l.len() });
        }
    }
    out.sort();
    Ok(out)
}

/// Brute-force counterpart of [`minimal_balanced_extensions`]: tries
/// every `(l, r)` pair of admissible-looking words and keeps those
/// passing the direct minimality test.
pub fn minimal_balanced_extensions_brute(a: &Word, max_len: usize) -> Result<Vec<Extension>, HolonomyError> {
    if reduce(a).is_zero() {
        return Err(HolonomyError::Inadmissible(a.to_string()));
    }
    let m = a.m();
    let Some(budget) = max_len.checked_sub(a.len()) else {
        return Ok(Vec::new());
    };
    let words = all_words(m, budget);
    let mut out = Vec::new();
    for l in &words {
        for r in words.iter().filter(|r| l.len() + r.len() <= budget) {
            if is_minimal_balanced_extension(l, a.symbols(), r) {
                let mut symbols = l.clone();
                symbols.extend_from_slice(a.symbols());
                symbols.extend_from_slice(r);
                out.push(Extension { word: Word::from_trusted(m, symbols), offset: l.len() });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Anchored cylinders `[l·a·r]` placed with `a` at a common coordinate
/// are disjoint iff no two extensions agree on their overlap.
pub fn extensions_pairwise_disjoint(exts: &[Extension]) -> bool {
    exts.iter().enumerate().all(|(x, e)| {
        exts[x + 1..].iter().all(|f| {
            let left = e.offset.min(f.offset);
            let right = (e.word.len() - e.offset).min(f.word.len() - f.offset);
            let es = &e.word.symbols()[e.offset - left..e.offset + right];
            let fs = &f.word.symbols()[f.offset - left..f.offset + right];
            es != fs
        })
    })
}

/// Number of ±1 paths of length `n` that first reach `-k` at step `n`:
/// `(k/n)·C(n, (n-k)/2)`, with the empty path for `k = 0`.
pub fn first_passage_paths(k: usize, n: usize) -> BigUint {
    if k == 0 {
        return if n == 0 { BigUint::one() } else { BigUint::zero() };
    }
    if n < k || (n - k) % 2 == 1 {
        return BigUint::zero();
    }
    let up = (n - k) / 2;
    let mut binom = BigUint::one();
    for x in 0..up as u64 {
        binom = binom * BigUint::from(n as u64 - x) / BigUint::from(x + 1);
    }
    binom * BigUint::from(k) / BigUint::from(n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionSumCheck {
    pub word: String,
    pub m: u32,
    #[serde(serialize_with = "ser_rational")]
    pub target: BigRational,
    /// `(L, S_L)` for every `L` from `|a|` to the maximum.
    #[serde(serialize_with = "ser_partial_sums")]
    pub partial_sums: Vec<(usize, BigRational)>,
    pub monotone: bool,
    pub bounded: bool,
    /// Fitted `γ` in `gap ≈ C·L^{-γ}` over even `L` in the fit range;
    /// `None` when the gap vanishes somewhere in the range.
    pub decay_exponent: Option<f64>,
    pub fit_range: (usize, usize),
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

fn ser_partial_sums<S: serde::Serializer>(v: &[(usize, BigRational)], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (l, x) in v {
        seq.serialize_element(&(l, format_rational(x)))?;
    }
    seq.end()
}

impl ExtensionSumCheck {
    pub fn gap(&self, l: usize) -> Option<BigRational> {
        self.partial_sums.iter().find(|(x, _)| *x == l).map(|(_, s)| &self.target - s)
    }
}

/// Partial sums `S_L = Σ μ̃[w]` over minimal balanced extensions with
/// `|w| <= L`.
///
/// Extensions are counted by length pair rather than listed: a left
/// part of length `p` is a first-passage path to depth `β̂(a)` with free
/// types on its inner pairs, and likewise for the right part with
/// `α̂(a)`. Every extension is balanced, so its weight is `(4m)^{-|w|/2}`.
pub fn extension_sum_check(a: &Word, max_len: usize, fit_range: (usize, usize)) -> Result<ExtensionSumCheck, HolonomyError> {
    let m = a.m();
    if reduce(a).is_zero() {
        return Err(HolonomyError::Inadmissible(a.to_string()));
    }
    let (hat_alpha, hat_beta) = hat_counts(a);
    let target = Measure { kind: MeasureKind::MuTilde, m }.cylinder_unchecked(a).into_inner();
    let budget = max_len.saturating_sub(a.len());
    let mb = BigUint::from(m);
    let sided = |depth: usize| -> Vec<BigUint> {
        (0..=budget)
            .map(|n| {
                let paths = first_passage_paths(depth, n);
                if paths.is_zero() {
                    paths
                } else {
                    paths * mb.pow(((n - depth) / 2) as u32)
                }
            })
            .collect()
    };
    let (lefts, rights) = (sided(hat_beta), sided(hat_alpha));
    // number of extensions by extra length |l| + |r|
    let mut by_extra = vec![BigUint::zero(); budget + 1];
    for (p, lc) in lefts.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
        for (q, rc) in rights.iter().enumerate().take(budget - p + 1).filter(|(_, c)| !c.is_zero()) {
            by_extra[p + q] += lc * rc;
        }
    }
    let mut partial_sums = Vec::new();
    let mut sum = BigRational::zero();
    for (extra, count) in by_extra.iter().enumerate() {
        let len = a.len() + extra;
        if !count.is_zero() {
            let weight = BigRational::new(BigInt::one(), BigInt::from(BigUint::from(4 * m as u64).pow((len / 2) as u32)));
            sum += BigRational::from_integer(BigInt::from(count.clone())) * weight;
        }
        partial_sums.push((len, sum.clone()));
    }
    let monotone = partial_sums.windows(2).all(|w| w[0].1 <= w[1].1);
    let bounded = partial_sums.iter().all(|(_, s)| *s <= target);
    let decay_exponent = fit_decay(&partial_sums, &target, fit_range);
    Ok(ExtensionSumCheck {
        word: a.to_string(),
        m,
        target,
        partial_sums,
        monotone,
        bounded,
        decay_exponent,
        fit_range,
    })
}

/// Least-squares slope of `ln gap` against `ln L` over even `L`.
fn fit_decay(partial_sums: &[(usize, BigRational)], target: &BigRational, (lo, hi): (usize, usize)) -> Option<f64> {
    let points: Vec<(f64, f64)> = partial_sums
        .iter()
        .filter(|(l, _)| *l >= lo && *l <= hi && l % 2 == 0)
        .map(|(l, s)| ((*l as f64).ln(), rational_to_f64(&(target - s))))
        .collect();
    if points.len() < 2 || points.iter().any(|&(_, g)| g <= 0.0) {
        return None;
    }
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), &(x, g)| (a + x, b + g.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), &(x, g)| (a + (x - mx) * (g.ln() - my), b + (x - mx).powi(2)));
    Some(-num / den)
}

// ---------------------------------------------------------------------------
// Non-synchronization

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SyncWitness {
    pub w: Word,
    pub l: Word,
    pub r: Word,
    pub i: u32,
    pub j: u32,
    /// `a_i·l·w` is admissible.
    pub left_admissible: bool,
    /// `w·r·b_j` is admissible.
    pub right_admissible: bool,
    /// `a_i·l·w·r·b_j` is inadmissible.
    pub joined_inadmissible: bool,
}

impl SyncWitness {
    pub fn certified(&self) -> bool {
        self.left_admissible && self.right_admissible && self.joined_inadmissible
    }
}

/// Shows `w` is not synchronizing: `l` closes its unmatched closers from
/// the left, `r` closes its pending openers, and a mismatched outer pair
/// `a_1 … b_2` then clashes through the balanced middle.
pub fn sync_witness(w: &Word) -> Result<SyncWitness, HolonomyError> {
    let m = w.m();
    if m < 2 {
        return Err(HolonomyError::FullShift);
    }
    let (betas, alphas) = match reduce(w) {
        MonoidForm::Zero => return Err(HolonomyError::Inadmissible(w.to_string())),
        MonoidForm::Reduced { betas, alphas } => (betas, alphas),
    };
    let l = Word::from_trusted(m, betas.iter().rev().map(|&t| Symbol::open(t)).collect());
    let r = Word::from_trusted(m, alphas.iter().rev().map(|&t| Symbol::close(t)).collect());
    let (i, j) = (1, 2);
    let (ai, bj) = ([Symbol::open(i)], [Symbol::close(j)]);
    let cat = |parts: &[&[Symbol]]| parts.concat();
    let left_admissible = is_admissible(&cat(&[&ai, l.symbols(), w.symbols()]));
    let right_admissible = is_admissible(&cat(&[w.symbols(), r.symbols(), &bj]));
    let joined_inadmissible = !is_admissible(&cat(&[&ai, l.symbols(), w.symbols(), r.symbols(), &bj]));
    Ok(SyncWitness { w: w.clone(), l, r, i, j, left_admissible, right_admissible, joined_inadmissible })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str) -> Word {
        Word::parse(text, 2).unwrap()
    }

    #[test]
    fn equivalence_examples() {
        assert!(monoid_equivalent(&w("a1b1"), &w("a2b2")));
        assert!(!monoid_equivalent(&w("a1"), &w("a2")));
        assert!(!monoid_equivalent(&w("b1a1"), &w("b1a1b2a2")));
        assert!(!monoid_equivalent(&w("a1b2"), &w("a2b1")));
    }

    #[test]
    fn swap_apply_is_involutive() {
        let s = BlockSwap::new(w("a1b1"), w("a2b2"), 1).unwrap();
        let x = w("b2a1b1a1");
        let y = s.apply(&x, 0).unwrap();
        assert_eq!(y, w("b2a2b2a1"));
        assert_eq!(s.reverse().apply(&y, 0).unwrap(), x);
        assert_eq!(s.apply(&x, 1), None);
        assert!(BlockSwap::new(w("a1"), w("a2"), 0).is_err());
    }

    #[test]
    fn swap_admissibility_examples() {
        let c = block_swap_admissibility(&w("a1"), &w("a1b1"), &w("a2b2"), &w("b1")).unwrap();
        assert!(c.lhs_admissible && c.rhs_admissible && c.pass);
        let c = block_swap_admissibility(&w("a2"), &w("b2a1"), &w("b2a2"), &w("b1"));
        assert!(c.is_err());
        let c = block_swap_admissibility(&w("a2a1"), &w("b1a1b1"), &w("b1a2b2"), &w("b2")).unwrap();
        assert!(c.pass && c.lhs_admissible);
    }

    #[test]
    fn small_invariance_suite() {
        let r = invariance_suite(MeasureKind::MuTilde, 2, 4, 2);
        assert!(r.pass);
        let rec = r.records.iter().find(|x| x.pair == ("a1b1".into(), "a2b2".into())).unwrap();
        assert_eq!((rec.lhs.as_str(), rec.rhs.as_str()), ("1/8", "1/8"));
        assert!(invariance_suite(MeasureKind::MuPlus, 2, 4, 2).pass);
        assert!(invariance_suite(MeasureKind::NuOneSided, 2, 3, 2).pass);
    }

    #[test]
    fn prefix_swap_examples() {
        let s = one_sided_prefix_swap(&w("b1a1"), &w("b2a1")).unwrap();
        assert_eq!(s.nu_u.to_string(), "1/18");
        assert_eq!(s.nu_u, s.nu_u_prime);
        assert!(s.check(4).pass);
        assert_eq!(
            one_sided_prefix_swap(&w("a1"), &w("a2")),
            Err(PrefixSwapError::StackMismatch { position: 0, left: Some(1), right: Some(2) })
        );
        // b1a1 still waits on its a1, so the swap is refused
        assert_eq!(
            one_sided_prefix_swap(&w("a1b1"), &w("b1a1")),
            Err(PrefixSwapError::StackMismatch { position: 0, left: None, right: Some(1) })
        );
        let s = one_sided_prefix_swap(&w("a1b1"), &w("b2b1")).unwrap();
        assert_eq!(s.nu_u.to_string(), "1/9");
        assert_eq!(s.nu_u_prime.to_string(), "1/9");
        assert!(s.check(4).pass);
    }

    #[test]
    fn xi_examples() {
        assert_eq!(xi_surgery(&w("a2a1"), 1, 1).unwrap(), w("b1b1"));
        assert_eq!(xi_surgery(&w("a1a1a1"), 1, 1).unwrap(), w("b1b1a1"));
        assert_eq!(xi_surgery(&w("a1a2b2a2"), 2, 1).unwrap(), w("b2a2b2b2"));
        assert!(matches!(xi_surgery(&w("a1"), 1, 1), Err(HolonomyError::ShiftOutOfRange { .. })));
        assert!(matches!(xi_surgery(&w("b1a1a1"), 1, 1), Err(HolonomyError::UnmatchedClosers(1))));
        let c = xi_continuation_check(&w("a1a2a1"), 2, 2, 2, 5).unwrap();
        assert_eq!(c.violations, 0);
        assert!(c.prefixes > 1);
    }

    #[test]
    fn census_examples() {
        let c = fiber_census(2, 4, 1, 1).unwrap();
        assert!(c.pass && c.domain_size > 0);
        let c = fiber_census(2, 6, 2, 1).unwrap();
        assert_eq!(c.cross_shift_collisions, 0);
        assert_eq!(c.shifts.len(), 2);
    }

    #[test]
    fn extension_examples() {
        let e = minimal_balanced_extensions(&w("a1"), 4).unwrap();
        let has = |s: &str, off: usize| e.contains(&Extension { word: w(s), offset: off });
        assert!(has("a1b1", 0) && has("a1a1b1b1", 0) && has("a1a2b2b1", 0));
        assert!(!has("a1a1b1b1", 1));
        assert_eq!(minimal_balanced_extensions(&w("a1b1"), 10).unwrap(), vec![Extension { word: w("a1b1"), offset: 0 }]);
        assert!(minimal_balanced_extensions(&w("a1b2"), 4).is_err());
    }

    #[test]
    fn extensions_match_brute_force() {
        for a in ["a1", "b1", "a1b1", "b2a1", "a1a2", "b1b2a2"] {
            let a = w(a);
            let fast = minimal_balanced_extensions(&a, 8).unwrap();
            assert_eq!(fast, minimal_balanced_extensions_brute(&a, 8).unwrap(), "{a}");
            assert!(extensions_pairwise_disjoint(&fast));
        }
    }

    #[test]
    fn first_passage_counts() {
        assert_eq!(first_passage_paths(1, 1), BigUint::from(1u32));
        assert_eq!(first_passage_paths(1, 3), BigUint::from(1u32));
        assert_eq!(first_passage_paths(1, 5), BigUint::from(2u32));
        assert_eq!(first_passage_paths(2, 4), BigUint::from(2u32));
        assert_eq!(first_passage_paths(0, 0), BigUint::from(1u32));
        assert_eq!(first_passage_paths(2, 3), BigUint::zero());
    }

    #[test]
    fn extension_sum_examples() {
        let c = extension_sum_check(&w("a1"), 12, (2, 12)).unwrap();
        assert_eq!(c.target, BigRational::new(1.into(), 4.into()));
        assert_eq!(c.partial_sums[1], (2, BigRational::new(1.into(), 8.into())));
        assert_eq!(c.gap(4).unwrap(), BigRational::new(3.into(), 32.into()));
        assert!(c.monotone && c.bounded);
    }

    #[test]
    fn extension_sums_agree_with_listing() {
        for a in ["a1", "b2", "a2b2b1", "b1a2"] {
            let a = w(a);
            let c = extension_sum_check(&a, 9, (2, 9)).unwrap();
            let mu = Measure::new(MeasureKind::MuTilde, 2).unwrap();
            for &(len, ref s) in &c.partial_sums {
                let listed = minimal_balanced_extensions(&a, len)
                    .unwrap()
                    .iter()
                    .map(|e| mu.cylinder(&e.word).unwrap().into_inner())
                    .fold(BigRational::zero(), |x, y| x + y);
                assert_eq!(&listed, s, "{a} at {len}");
            }
        }
    }

    #[test]
    fn sync_examples() {
        let s = sync_witness(&w("a1b1")).unwrap();
        assert!(s.l.is_empty() && s.r.is_empty() && s.certified());
        let s = sync_witness(&w("b2")).unwrap();
        assert_eq!(s.l, w("a2"));
        assert!(s.certified());
        let s = sync_witness(&w("a1")).unwrap();
        assert_eq!(s.r, w("b1"));
        assert!(s.certified());
        assert_eq!(sync_witness(&Word::parse("a1", 1).unwrap()), Err(HolonomyError::FullShift));
    }
}
