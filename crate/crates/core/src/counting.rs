//! Counting admissible, balanced and Dyck words.
//!
//! Every count here comes from one of three routes: a pruned brute-force
//! enumeration (the oracle), the `(s, b)` profile recurrence, and closed
//! forms in Catalan numbers. The test suites pit them against each other.
//!
//! The profile recurrence works because a closer has exactly one
//! admissible type while openers are pending and `m` types otherwise, so
//! the type contents of the stack never change a count.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::word_algebra::monoid::StackState;
use crate::numeric::{ln_biguint, rational_to_f64};
use crate::word_algebra::profile::classify;
use crate::word_algebra::word::{Symbol, Word};

/// Largest number of admissible words a brute-force run may visit.
pub const BRUTE_FORCE_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountingError {
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,
    #[error("brute force over length {n} at m = {m} would visit {count} words (budget {budget}); use profile_counts instead")]
    BudgetExceeded { m: u32, n: usize, count: String, budget: u64 },
    #[error("series at x = m/(m+1)^2 needs m >= 2 (m = {m} sits on the radius of convergence)")]
    SeriesDomain { m: u32 },
    #[error("ratio check needs N > n >= 1, got n = {n}, N = {big_n}")]
    RatioRange { n: usize, big_n: usize },
    #[error("malformed cache file: {0}")]
    Cache(String),
}

fn check_alphabet(m: u32) -> Result<(), CountingError> {
    if m == 0 {
        Err(CountingError::EmptyAlphabet)
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Brute force

/// Refuses `(m, n)` when the admissible count exceeds the budget.
pub fn check_brute_force_budget(m: u32, n: usize) -> Result<(), CountingError> {
    check_alphabet(m)?;
    let count = count_admissible(m, n);
    if count > BigUint::from(BRUTE_FORCE_BUDGET) {
        return Err(CountingError::BudgetExceeded { m, n, count: count.to_string(), budget: BRUTE_FORCE_BUDGET });
    }
    Ok(())
}

/// Streams the admissible words of length `n` in token order.
pub fn enumerate_admissible(m: u32, n: usize) -> Result<AdmissibleWords, CountingError> {
    check_brute_force_budget(m, n)?;
    Ok(AdmissibleWords::new(m, n))
}

/// Depth-first walk over `Σ^n` that never extends a zero prefix.
#[derive(Debug, Clone)]
pub struct AdmissibleWords {
    m: u32,
    n: usize,
    alphabet: Vec<Symbol>,
    path: Vec<usize>,
    matched: Vec<bool>,
    state: StackState,
    started: bool,
    done: bool,
}

impl AdmissibleWords {
    fn new(m: u32, n: usize) -> Self {
        AdmissibleWords {
            m,
            n,
            alphabet: Symbol::alphabet(m),
            path: Vec::with_capacity(n),
            matched: Vec::with_capacity(n),
            state: StackState::new(),
            started: false,
            done: false,
        }
    }

    fn try_symbol(&mut self, idx: usize) -> bool {
        match self.state.try_push(self.alphabet[idx]) {
            Some(matched) => {
                self.path.push(idx);
                self.matched.push(matched);
                true
            }
            None => false,
        }
    }

    // Openers are always admissible, so the leftmost completion is a1…a1.
    fn descend(&mut self) {
        while self.path.len() < self.n {
            let ok = self.try_symbol(0);
            debug_assert!(ok);
        }
    }

    fn advance(&mut self) -> bool {
        while let Some(idx) = self.path.pop() {
            let matched = self.matched.pop().expect("parallel stacks");
            self.state.pop(self.alphabet[idx], matched);
            for next in idx + 1..self.alphabet.len() {
                if self.try_symbol(next) {
                    self.descend();
                    return true;
                }
            }
        }
        false
    }

    fn current(&self) -> Word {
        Word::from_trusted(self.m, self.path.iter().map(|&i| self.alphabet[i]).collect())
    }
}

impl Iterator for AdmissibleWords {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.descend();
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        if self.n == 0 {
            self.done = true;
        }
        Some(self.current())
    }
}

/// Visits every admissible word of length `<= n_max` exactly once, prefix
/// before extension. The callback sees the symbols and the reduction state.
pub fn visit_admissible<F>(m: u32, n_max: usize, prefix: &[Symbol], mut f: F)
where
    F: FnMut(&[Symbol], &StackState),
{
    let alphabet = Symbol::alphabet(m);
    let mut state = StackState::new();
    let mut path: Vec<Symbol> = Vec::with_capacity(n_max);
    for &s in prefix {
        if !state.push(s) {
            return;
        }
        path.push(s);
    }
    fn rec<F: FnMut(&[Symbol], &StackState)>(
        alphabet: &[Symbol],
        n_max: usize,
        path: &mut Vec<Symbol>,
        state: &mut StackState,
        f: &mut F,
    ) {
        f(path, state);
        if path.len() == n_max {
            return;
        }
        for &s in alphabet {
            if let Some(matched) = state.try_push(s) {
                path.push(s);
                rec(alphabet, n_max, path, state, f);
                path.pop();
                state.pop(s, matched);
            }
        }
    }
    if path.len() <= n_max {
        rec(&alphabet, n_max, &mut path, &mut state, &mut f);
    }
}

/// Counts gathered by brute force for one word length.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BruteForceCounts {
    pub total: u64,
    pub balanced: u64,
    pub dyck: u64,
    /// Keyed by `(α̂, β̂)`.
    pub by_profile: HashMap<(usize, usize), u64>,
}

impl BruteForceCounts {
    fn merge(&mut self, other: &BruteForceCounts) {
        self.total += other.total;
        self.balanced += other.balanced;
        self.dyck += other.dyck;
        for (k, v) in &other.by_profile {
            *self.by_profile.entry(*k).or_default() += v;
        }
    }
}

/// Brute-force counts for every length `0..=n_max`, sharded by first symbol.
pub fn brute_force_counts(m: u32, n_max: usize) -> Result<Vec<BruteForceCounts>, CountingError> {
    check_brute_force_budget(m, n_max)?;
    let shards: Vec<Vec<BruteForceCounts>> = Symbol::alphabet(m)
        .into_par_iter()
        .map(|first| {
            let mut out = vec![BruteForceCounts::default(); n_max + 1];
            visit_admissible(m, n_max, &[first], |path, state| {
                let c = &mut out[path.len()];
                c.total += 1;
                let key = (state.open_stack().len(), state.unmatched_betas().len());
                *c.by_profile.entry(key).or_default() += 1;
                if key == (0, 0) {
                    c.balanced += 1;
                    if classify(&Word::from_trusted(m, path.to_vec())).dyck {
                        c.dyck += 1;
                    }
                }
            });
            out
        })
        .collect();
    let mut merged = vec![BruteForceCounts::default(); n_max + 1];
    merged[0].total = 1;
    merged[0].balanced = 1;
    merged[0].by_profile.insert((0, 0), 1);
    for shard in &shards {
        for (acc, c) in merged.iter_mut().zip(shard) {
            acc.merge(c);
        }
    }
    Ok(merged)
}

// ---------------------------------------------------------------------------
// Profile recurrence

/// `N_n(s, b)`: admissible words of length `n` with `α̂ = s`, `β̂ = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileCountTable {
    m: u32,
    n: usize,
    /// Row-major `(n+1) x (n+1)`, indexed `s * (n + 1) + b`.
    counts: Vec<BigUint>,
}

impl ProfileCountTable {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: usize, b: usize) -> BigUint {
        if s > self.n || b > self.n {
            return BigUint::zero();
        }
        self.counts[s * (self.n + 1) + b].clone()
    }

    /// Nonzero entries as `(s, b, count)`, ordered by `s` then `b`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &BigUint)> + '_ {
        let width = self.n + 1;
        self.counts.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| (i / width, i % width, c))
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    pub fn balanced(&self) -> BigUint {
        self.get(0, 0)
    }

    pub fn cache_key(&self) -> String {
        format!("profile-m{}-n{}", self.m, self.n)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,s,b,count\n");
        for (s, b, c) in self.entries() {
            let _ = writeln!(out, "{},{s},{b},{c}", self.n);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<_> = self
            .entries()
            .map(|(s, b, c)| serde_json::json!({ "s": s, "b": b, "count": c.to_string() }))
            .collect();
        serde_json::json!({
            "version": CACHE_VERSION,
            "key": self.cache_key(),
            "m": self.m,
            "n": self.n,
            "counts": entries,
        })
    }

    /// Cache-file text: a version header line, the key, then the CSV.
    pub fn to_cache_text(&self) -> String {
        format!("# dycklab-profile-table v{CACHE_VERSION}\n# key {}\n{}", self.cache_key(), self.to_csv())
    }

    pub fn from_cache_text(text: &str) -> Result<Self, CountingError> {
        let bad = |msg: &str| CountingError::Cache(msg.to_string());
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty file"))?;
        if header != format!("# dycklab-profile-table v{CACHE_VERSION}") {
            return Err(bad("unsupported version header"));
        }
        let key = lines.next().and_then(|l| l.strip_prefix("# key ")).ok_or_else(|| bad("missing key line"))?;
        let (m, n) = key
            .strip_prefix("profile-m")
            .and_then(|r| r.split_once("-n"))
            .and_then(|(m, n)| Some((m.parse::<u32>().ok()?, n.parse::<usize>().ok()?)))
            .ok_or_else(|| bad("malformed key"))?;
        if lines.next() != Some("n,s,b,count") {
            return Err(bad("missing CSV header"));
        }
        let width = n + 1;
        let mut counts = vec![BigUint::zero(); width * width];
        for line in lines.filter(|l| !l.is_empty()) {
            let fields: Vec<&str> = line.split(',').collect();
            let [row_n, s, b, c] = fields[..] else {
                return Err(bad("wrong field count"));
            };
            let parse = |f: &str| f.parse::<usize>().map_err(|_| bad("bad integer"));
            if parse(row_n)? != n {
                return Err(bad("row length does not match key"));
            }
            let (s, b) = (parse(s)?, parse(b)?);
            if s > n || b > n {
                return Err(bad("profile out of range"));
            }
            counts[s * width + b] = c.parse().map_err(|_| bad("bad count"))?;
        }
        Ok(ProfileCountTable { m, n, counts })
    }
}

pub const CACHE_VERSION: u32 = 1;

/// Rolling profile recurrence; yields the table for `n = 0, 1, 2, …`.
#[derive(Debug, Clone)]
pub struct ProfileRecurrence {
    table: ProfileCountTable,
}

impl ProfileRecurrence {
    pub fn new(m: u32) -> Self {
        ProfileRecurrence { table: ProfileCountTable { m, n: 0, counts: vec![BigUint::one()] } }
    }

    pub fn table(&self) -> &ProfileCountTable {
        &self.table
    }

    /// Advances from length `n` to `n + 1`.
    pub fn step(&mut self) {
        let old = &self.table;
        let m = BigUint::from(old.m);
        let (w_old, n_new) = (old.n + 1, old.n + 1);
        let w_new = n_new + 1;
        let mut next = vec![BigUint::zero(); w_new * w_new];
        for s in 0..=old.n {
            for b in 0..=(old.n - s) {
                let c = &old.counts[s * w_old + b];
                if c.is_zero() {
                    continue;
                }
                next[(s + 1) * w_new + b] += c * &m;
                if s > 0 {
                    next[(s - 1) * w_new + b] += c;
                } else {
                    next[b + 1] += c * &m;
                }
            }
        }
        self.table = ProfileCountTable { m: old.m, n: n_new, counts: next };
    }
}

pub fn profile_counts(m: u32, n: usize) -> ProfileCountTable {
    assert!(m >= 1, "alphabet size must be at least 1");
    let mut rec = ProfileRecurrence::new(m);
    for _ in 0..n {
        rec.step();
    }
    rec.table
}

type TableCache = RwLock<HashMap<(u32, usize), Arc<ProfileCountTable>>>;

fn table_cache() -> &'static TableCache {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Process-wide memoized [`profile_counts`]. Reads run concurrently; the
/// first finished writer for a key wins and later ones reuse its table.
pub fn cached_profile_counts(m: u32, n: usize) -> Arc<ProfileCountTable> {
    if let Some(t) = table_cache().read().expect("cache lock").get(&(m, n)) {
        return Arc::clone(t);
    }
    let fresh = Arc::new(profile_counts(m, n));
    let mut guard = table_cache().write().expect("cache lock");
    Arc::clone(guard.entry((m, n)).or_insert(fresh))
}

// ---------------------------------------------------------------------------
// Closed forms and sequences

/// `a_0, …, a_{n_max}` from the recurrence on the opener stack depth alone.
pub fn admissible_sequence(m: u32, n_max: usize) -> Vec<BigUint> {
    assert!(m >= 1, "alphabet size must be at least 1");
    let mm = BigUint::from(m);
    let mut depth = vec![BigUint::one()];
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(BigUint::one());
    for _ in 0..n_max {
        let mut next = vec![BigUint::zero(); depth.len() + 1];
        for (s, c) in depth.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            next[s + 1] += c * &mm;
            if s > 0 {
                next[s - 1] += c;
            } else {
                next[0] += c * &mm;
            }
        }
        out.push(next.iter().sum());
        depth = next;
    }
    out
}

pub fn count_admissible(m: u32, n: usize) -> BigUint {
    admissible_sequence(m, n).pop().expect("nonempty")
}

pub fn catalan(k: usize) -> BigUint {
    let mut c = BigUint::one();
    for i in 0..k as u64 {
        c = c * BigUint::from(2 * (2 * i + 1)) / BigUint::from(i + 2);
    }
    c
}

/// Balanced words of length `n`: `Catalan(n/2) · m^(n/2)` for even `n`.
pub fn count_balanced(m: u32, n: usize) -> BigUint {
    if n % 2 == 1 {
        return BigUint::zero();
    }
    let k = n / 2;
    catalan(k) * BigUint::from(m).pow(k as u32)
}

/// Dyck words `a_i w b_i` with `w` balanced.
pub fn count_dyck(m: u32, n: usize) -> BigUint {
    if n < 2 || n % 2 == 1 {
        return BigUint::zero();
    }
    BigUint::from(m) * count_balanced(m, n - 2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub m: u32,
    pub terms: usize,
    /// `Σ_{k=1}^{K} Catalan(k) x^k` at `x = m/(m+1)^2`.
    pub partial_sum: BigRational,
    /// `(1 - sqrt(1 - 4x)) / (2x) - 1`, evaluated exactly.
    pub closed_form: BigRational,
    pub strictly_increasing: bool,
    /// Every partial sum up to `K` lies strictly below `1/m`.
    pub below_bound: bool,
}

impl SeriesReport {
    pub fn partial_sum_f64(&self) -> f64 {
        rational_to_f64(&self.partial_sum)
    }

    pub fn closed_form_f64(&self) -> f64 {
        rational_to_f64(&self.closed_form)
    }

    pub fn gap_to_closed_form(&self) -> f64 {
        rational_to_f64(&(&self.closed_form - &self.partial_sum))
    }
}

/// Catalan generating function at `x = m/(m+1)^2`.
pub fn catalan_series(m: u32, terms: usize) -> Result<SeriesReport, CountingError> {
    if m < 2 {
        return Err(CountingError::SeriesDomain { m });
    }
    let mm = BigUint::from(m);
    let q = BigUint::from(m + 1).pow(2);
    // S_k = numer_k / q^k with numer_k = numer_{k-1} q + Catalan(k) m^k.
    let mut numer = BigUint::zero();
    let mut denom = BigUint::one();
    let mut cat = BigUint::one();
    let mut m_pow = BigUint::one();
    let mut strictly_increasing = true;
    let mut below_bound = true;
    for k in 1..=terms as u64 {
        cat = cat * BigUint::from(2 * (2 * k - 1)) / BigUint::from(k + 1);
        m_pow *= &mm;
        let term = &cat * &m_pow;
        strictly_increasing &= !term.is_zero();
        numer = numer * &q + term;
        denom *= &q;
        below_bound &= &numer * &mm < denom;
    }
    let partial_sum = BigRational::new(BigInt::from(numer), BigInt::from(denom));

    // 1 - 4x = (m-1)^2 / (m+1)^2, so the square root is rational.
    let x = BigRational::new(BigInt::from(m), BigInt::from(q.clone()));
    let disc = BigRational::one() - BigRational::from_integer(4.into()) * &x;
    let root = exact_sqrt(&disc).expect("1 - 4x is a rational square");
    let two_x = BigRational::from_integer(2.into()) * &x;
    let closed_form = (BigRational::one() - root) / two_x - BigRational::one();

    Ok(SeriesReport { m, terms, partial_sum, closed_form, strictly_increasing, below_bound })
}

fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    let (p, q) = (r.numer().magnitude(), r.denom().magnitude());
    let (sp, sq) = (p.sqrt(), q.sqrt());
    (&sp * &sp == *p && &sq * &sq == *q && r.numer() >= &BigInt::zero())
        .then(|| BigRational::new(BigInt::from(sp), BigInt::from(sq)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: usize,
    pub count: BigUint,
    /// `a_{n+1} / a_n`.
    pub ratio: BigRational,
    /// `a_{n+1} >= (m+1) a_n`, compared exactly.
    pub ratio_at_least_m_plus_1: bool,
    /// `(1/n) ln a_n`.
    pub log_rate: f64,
}

pub fn growth_report(m: u32, n_max: usize) -> Vec<GrowthRow> {
    let seq = admissible_sequence(m, n_max + 1);
    let m1 = BigUint::from(m + 1);
    (1..=n_max)
        .map(|n| GrowthRow {
            n,
            count: seq[n].clone(),
            ratio: BigRational::new(BigInt::from(seq[n + 1].clone()), BigInt::from(seq[n].clone())),
            ratio_at_least_m_plus_1: seq[n + 1] >= &m1 * &seq[n],
            log_rate: ln_biguint(&seq[n]) / n as f64,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioLimit {
    /// `w_{2N-2n} / w_{2N}`.
    pub ratio: BigRational,
    /// `(4m)^{-n}`.
    pub limit: BigRational,
    pub relative_error: f64,
}

impl RatioLimit {
    pub fn abs_deviation(&self) -> BigRational {
        let d = &self.ratio - &self.limit;
        if d < BigRational::zero() {
            -d
        } else {
            d
        }
    }
}

/// Fraction of balanced words of length `2N` carrying a fixed balanced
/// block of length `2n` at a fixed place, against its large-`N` limit.
pub fn ratio_limit_check(m: u32, n: usize, big_n: usize) -> Result<RatioLimit, CountingError> {
    check_alphabet(m)?;
    if n < 1 || big_n <= n {
        return Err(CountingError::RatioRange { n, big_n });
    }
    // Catalan(K)/Catalan(K-1) = 2(2K-1)/(K+1); walk down from N to N-n.
    let mut ratio = BigRational::one();
    for k in (big_n - n + 1)..=big_n {
        let k = k as u64;
        ratio *= BigRational::new(BigInt::from(k + 1), BigInt::from(2 * (2 * k - 1)));
    }
    ratio /= BigRational::from_integer(BigInt::from(m).pow(n as u32));
    let limit = BigRational::new(BigInt::one(), BigInt::from(4 * m as u64).pow(n as u32));
    let relative_error = rational_to_f64(&((&ratio - &limit) / &limit)).abs();
    Ok(RatioLimit { ratio, limit, relative_error })
}

/// `a_{n+1}/a_n` as `f64`, for display.
pub fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn length_one_words() {
        let words: Vec<String> = enumerate_admissible(2, 1).unwrap().map(|w| w.to_string()).collect();
        assert_eq!(words, ["a1", "a2", "b1", "b2"]);
    }

    #[test]
    fn length_two_words() {
        let words: Vec<String> = enumerate_admissible(2, 2).unwrap().map(|w| w.to_string()).collect();
        assert_eq!(words.len(), 14);
        assert!(!words.contains(&"a1b2".to_string()));
        assert!(!words.contains(&"a2b1".to_string()));
        assert!(words.windows(2).all(|p| p[0] != p[1]));
    }

    #[test]
    fn m1_is_full_shift() {
        let words: Vec<String> = enumerate_admissible(1, 2).unwrap().map(|w| w.to_string()).collect();
        assert_eq!(words, ["a1a1", "a1b1", "b1a1", "b1b1"]);
    }

    #[test]
    fn empty_length_yields_empty_word() {
        let words: Vec<Word> = enumerate_admissible(3, 0).unwrap().collect();
        assert_eq!(words, vec![Word::empty(3)]);
    }

    #[test]
    fn budget_refusal() {
        assert!(matches!(enumerate_admissible(3, 14), Err(CountingError::BudgetExceeded { .. })));
        assert!(enumerate_admissible(2, 14).is_ok());
    }

    #[test]
    fn profile_table_small() {
        let t = profile_counts(2, 2);
        assert_eq!(t.total(), big(14));
        assert_eq!(t.balanced(), big(2));
        assert_eq!(t.get(2, 0), big(4));
        // b·b and b·a
        assert_eq!(t.get(0, 2), big(4));
        assert_eq!(t.get(1, 1), big(4));
        for m in 1..5 {
            let t = profile_counts(m, 1);
            assert_eq!(t.get(1, 0), big(m as u64));
            assert_eq!(t.get(0, 1), big(m as u64));
        }
        assert_eq!(profile_counts(2, 4).total(), big(160));
    }

    #[test]
    fn table_vanishes_off_parity() {
        let t = profile_counts(3, 7);
        for (s, b, _) in t.entries() {
            assert!(s + b <= 7 && (7 - s - b) % 2 == 0);
        }
    }

    #[test]
    fn admissible_counts() {
        assert_eq!(count_admissible(2, 1), big(4));
        assert_eq!(count_admissible(2, 2), big(14));
        assert_eq!(count_admissible(2, 3), big(48));
        assert_eq!(count_admissible(1, 10), big(1024));
    }

    #[test]
    fn balanced_and_dyck_counts() {
        assert_eq!(count_balanced(1, 6), big(5));
        assert_eq!(count_balanced(2, 2), big(2));
        assert_eq!(count_balanced(2, 4), big(8));
        assert_eq!(count_balanced(2, 5), big(0));
        assert_eq!(count_dyck(2, 2), big(2));
        assert_eq!(count_dyck(2, 4), big(4));
        assert_eq!(count_dyck(3, 2), big(3));
        assert_eq!(count_dyck(3, 0), big(0));
    }

    #[test]
    fn dyck_words_of_length_four() {
        let dyck: Vec<String> =
            enumerate_admissible(2, 4).unwrap().filter(|w| classify(w).dyck).map(|w| w.to_string()).collect();
        assert_eq!(dyck, ["a1a1b1b1", "a1a2b2b1", "a2a1b1b2", "a2a2b2b2"]);
    }

    #[test]
    fn catalan_numbers() {
        let first: Vec<u64> = (0..10).map(|k| catalan(k).try_into().unwrap()).collect();
        assert_eq!(first, [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862]);
    }

    #[test]
    fn series_single_term() {
        let r = catalan_series(2, 1).unwrap();
        assert_eq!(r.partial_sum, BigRational::new(2.into(), 9.into()));
        assert!(r.below_bound);
    }

    #[test]
    fn series_closed_form_is_inverse_m() {
        for m in 2..6u32 {
            let r = catalan_series(m, 10).unwrap();
            assert_eq!(r.closed_form, BigRational::new(1.into(), m.into()));
        }
    }

    #[test]
    fn series_refuses_m1() {
        assert_eq!(catalan_series(1, 10), Err(CountingError::SeriesDomain { m: 1 }));
    }

    #[test]
    fn series_converges() {
        let r = catalan_series(2, 500).unwrap();
        assert!(r.strictly_increasing && r.below_bound);
        assert!((r.partial_sum_f64() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn first_growth_ratio() {
        let rows = growth_report(2, 3);
        assert_eq!(rows[0].ratio, BigRational::new(14.into(), 4.into()));
        assert!(rows.iter().all(|r| r.ratio_at_least_m_plus_1));
        let rows = growth_report(1, 5);
        assert!(rows.iter().all(|r| r.ratio == BigRational::from_integer(2.into())));
    }

    #[test]
    fn ratio_limit_closed_form() {
        let r = ratio_limit_check(2, 1, 500).unwrap();
        assert_eq!(r.ratio, BigRational::new(501.into(), (1998 * 2).into()));
        assert_eq!(r.limit, BigRational::new(1.into(), 8.into()));
        assert!(r.relative_error < 0.005);
        assert!(ratio_limit_check(2, 3, 3).is_err());
        assert!(ratio_limit_check(2, 0, 3).is_err());
        let r = ratio_limit_check(1, 1, 500).unwrap();
        assert!((ratio_f64(&r.ratio) - 0.25).abs() < 1e-3);
    }

    #[test]
    fn cache_text_roundtrip() {
        let t = profile_counts(3, 9);
        let text = t.to_cache_text();
        assert!(text.starts_with("# dycklab-profile-table v1\n# key profile-m3-n9\nn,s,b,count\n"));
        assert_eq!(ProfileCountTable::from_cache_text(&text).unwrap(), t);
        assert!(ProfileCountTable::from_cache_text("# dycklab-profile-table v0\n").is_err());
    }

    #[test]
    fn cached_tables_are_shared() {
        let a = cached_profile_counts(2, 6);
        let b = cached_profile_counts(2, 6);
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(*a, profile_counts(2, 6));
    }

    #[test]
    fn json_export_shape() {
        let j = profile_counts(2, 2).to_json();
        assert_eq!(j["key"], "profile-m2-n2");
        assert_eq!(j["counts"].as_array().unwrap().len(), 4);
    }
}
