//! Finite windows of typical points, and a chi-square harness against
//! the exact cylinder values.
//!
//! Randomness is counter based. The bit (or symbol) at coordinate `c` is
//! a pure function of `(seed, c)`: coordinates are grouped in chunks and
//! each chunk reads its own ChaCha8 stream, selected with `set_stream`.
//! Extending a window therefore never disturbs what was already drawn,
//! and two windows with the same seed agree on their overlap. Labels are
//! keyed by index the same way.
//!
//! `mu-tilde` resolves closers by scanning left for their partner. The
//! leftward first passage of a fair walk has a heavy tail (the chance of
//! needing more than `t` steps decays like `t^{-1/2}`), so a hard budget
//! alone would fail on a small but fixed fraction of draws. After the
//! explicit budget is spent, each pending partner is reached with an
//! exact first-passage jump instead (see [`TailPolicy`]). The one-sided
//! laws resolve openers to the right; for `m = 1` that walk is fair too,
//! and past the budget the pending types are drawn directly.

use std::collections::HashMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::counting::{count_admissible, visit_admissible};
use crate::measures::{Measure, MeasureKind};
use crate::word_algebra::monoid::is_admissible;
use crate::word_algebra::{Symbol, Word};

/// Explicit extension budget, in coordinates.
pub const DEFAULT_BUDGET: u64 = 1_000_000;
/// Largest number of cells the chi-square harness tabulates.
pub const MAX_CELLS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplerError {
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,
    #[error("extension budget of {budget} coordinates exhausted (seed {seed})")]
    BudgetExhausted { seed: u64, budget: u64 },
    #[error("coordinate {n} outside the walk window [{left}, {right}]")]
    OutOfWindow { n: i64, left: i64, right: i64 },
    #[error("walk window must contain coordinate 0 or start right after it")]
    WindowOffOrigin,
    #[error("{cells} cells exceed the harness limit of {limit}")]
    CellLimit { cells: String, limit: u64 },
    #[error("block length must be at least 1")]
    EmptyBlock,
}

/// What to do when extension runs past the budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailPolicy {
    /// Draw each remaining first-passage length from its exact law.
    #[default]
    FirstPassageJump,
    /// Report [`SamplerError::BudgetExhausted`].
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub budget: u64,
    pub tail: TailPolicy,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { budget: DEFAULT_BUDGET, tail: TailPolicy::default() }
    }
}

// ---------------------------------------------------------------------------
// Counter-based streams

const DOMAIN_BITS: u64 = 1;
const DOMAIN_LABELS: u64 = 2;
const DOMAIN_JUMPS: u64 = 3;
const DOMAIN_PLUS: u64 = 4;
const DOMAIN_MINUS: u64 = 5;
const DOMAIN_NU: u64 = 6;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn stream_id(domain: u64, chunk: i128) -> u64 {
    let lo = chunk as u64;
    let hi = (chunk >> 64) as u64;
    splitmix64(splitmix64(lo ^ domain.rotate_left(48)) ^ hi)
}

fn chunk_rng(seed: u64, domain: u64, chunk: i128) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(domain, chunk));
    rng
}

/// Seed of the `index`-th independent sample drawn under `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

const BIT_CHUNK: i64 = 4096;

/// Fair bits indexed by coordinate.
struct BitSource {
    seed: u64,
    chunk: Option<i64>,
    words: [u64; (BIT_CHUNK / 64) as usize],
}

impl BitSource {
    fn new(seed: u64) -> Self {
        BitSource { seed, chunk: None, words: [0; (BIT_CHUNK / 64) as usize] }
    }

    fn bit(&mut self, c: i64) -> u8 {
        let chunk = c.div_euclid(BIT_CHUNK);
        if self.chunk != Some(chunk) {
            let mut rng = chunk_rng(self.seed, DOMAIN_BITS, chunk as i128);
            for w in self.words.iter_mut() {
                *w = rng.next_u64();
            }
            self.chunk = Some(chunk);
        }
        let offset = c.rem_euclid(BIT_CHUNK) as usize;
        ((self.words[offset / 64] >> (offset % 64)) & 1) as u8
    }

    /// The aligned byte holding coordinate `c`; bit `k` is coordinate
    /// `c - c mod 8 + k`.
    fn byte(&mut self, c: i64) -> u8 {
        self.bit(c);
        let offset = c.rem_euclid(BIT_CHUNK) as usize;
        (self.words[offset / 64] >> ((offset % 64) & !7)) as u8
    }
}

const SYMBOL_CHUNK: i64 = 64;

/// Uniform draws from `0..=m` indexed by coordinate.
struct SymbolSource {
    seed: u64,
    domain: u64,
    m: u32,
    chunk: Option<i64>,
    values: Vec<u32>,
}

impl SymbolSource {
    fn new(seed: u64, domain: u64, m: u32) -> Self {
        SymbolSource { seed, domain, m, chunk: None, values: Vec::with_capacity(SYMBOL_CHUNK as usize) }
    }

    fn get(&mut self, c: i64) -> u32 {
        let chunk = c.div_euclid(SYMBOL_CHUNK);
        if self.chunk != Some(chunk) {
            let mut rng = chunk_rng(self.seed, self.domain, chunk as i128);
            self.values.clear();
            self.values.extend((0..SYMBOL_CHUNK).map(|_| rng.gen_range(0..=self.m)));
            self.chunk = Some(chunk);
        }
        self.values[c.rem_euclid(SYMBOL_CHUNK) as usize]
    }
}

const LABEL_CHUNK: i128 = 16;

/// Lazily drawn i.i.d. uniform labels in `1..=m`, indexed by any integer.
/// A label never changes once read, and its value depends only on the
/// seed and the index.
#[derive(Debug, Clone)]
pub struct LabelStore {
    seed: u64,
    m: u32,
    labels: HashMap<i128, u32>,
}

impl LabelStore {
    pub fn new(m: u32, seed: u64) -> Self {
        LabelStore { seed, m, labels: HashMap::new() }
    }

    pub fn label(&mut self, index: i128) -> u32 {
        if let Some(&l) = self.labels.get(&index) {
            return l;
        }
        let chunk = index.div_euclid(LABEL_CHUNK);
        let mut rng = chunk_rng(self.seed, DOMAIN_LABELS, chunk);
        let base = chunk * LABEL_CHUNK;
        for k in 0..LABEL_CHUNK {
            let l = rng.gen_range(1..=self.m);
            self.labels.entry(base + k).or_insert(l);
        }
        self.labels[&index]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Walk functionals

/// Bits `z` on `[left, right]` with heights `H̃_i` for `i` in
/// `[left, right + 1]`, normalized by `H̃_0 = 0`. Bit 1 is an opener.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WalkWindow {
    left: i64,
    z: Vec<u8>,
    heights: Vec<i64>,
}

impl WalkWindow {
    /// The window must touch the origin: `left <= 0 <= right + 1`.
    pub fn new(left: i64, z: Vec<u8>) -> Result<Self, SamplerError> {
        let right_edge = left + z.len() as i64;
        if left > 0 || right_edge < 0 {
            return Err(SamplerError::WindowOffOrigin);
        }
        let mut heights = Vec::with_capacity(z.len() + 1);
        let mut h = 0i64;
        for &b in &z {
            heights.push(h);
            h += if b == 1 { 1 } else { -1 };
        }
        heights.push(h);
        let shift = heights[(-left) as usize];
        heights.iter_mut().for_each(|x| *x -= shift);
        Ok(WalkWindow { left, z, heights })
    }

    pub fn left(&self) -> i64 {
        self.left
    }

    pub fn right(&self) -> i64 {
        self.left + self.z.len() as i64 - 1
    }

    pub fn z(&self, n: i64) -> Option<u8> {
        usize::try_from(n - self.left).ok().and_then(|i| self.z.get(i).copied())
    }

    /// `H̃_i`, defined for `i` in `[left, right + 1]`.
    pub fn height(&self, i: i64) -> Option<i64> {
        usize::try_from(i - self.left).ok().and_then(|k| self.heights.get(k).copied())
    }

    fn check(&self, n: i64) -> Result<(), SamplerError> {
        if n < self.left || n > self.right() {
            return Err(SamplerError::OutOfWindow { n, left: self.left, right: self.right() });
        }
        Ok(())
    }

    /// Label index `γ_k`: the number of openers in `[0, k]` for `k >= 0`,
    /// minus the number in `[k, -1]` for `k < 0`.
    pub fn gamma(&self, k: i64) -> Result<i64, SamplerError> {
        self.check(k)?;
        let count = |range: std::ops::RangeInclusive<i64>| range.map(|i| self.z(i).unwrap_or(0) as i64).sum::<i64>();
        if k >= 0 {
            self.check(0)?;
            Ok(count(0..=k))
        } else {
            Ok(-count(k..=-1))
        }
    }

    /// `ε_n = max{l < n : H̃_l <= H̃_{n+1}}`, or `None` when no such `l`
    /// lies in the window.
    pub fn epsilon(&self, n: i64) -> Result<Option<i64>, SamplerError> {
        self.check(n)?;
        let target = self.height(n + 1).expect("n + 1 <= right + 1");
        Ok((self.left..n).rev().find(|&l| self.height(l).expect("in window") <= target))
    }
}

// ---------------------------------------------------------------------------
// Samples

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleWindow {
    pub kind: MeasureKind,
    pub m: u32,
    pub left: i64,
    pub right: i64,
    pub word: Word,
    pub seed: u64,
    /// Coordinates generated explicitly outside the window.
    pub extension_depth: u64,
    /// Partners reached past the budget, by a first-passage jump or a
    /// direct type draw.
    pub tail_jumps: u64,
}

/// A `mu-tilde` window with the walk that produced it.
#[derive(Debug, Clone)]
pub struct TracedSample {
    pub window: SampleWindow,
    /// The explicit part of the walk, from the leftmost coordinate read up
    /// to the right end of the window.
    pub walk: WalkWindow,
    /// For each window coordinate, the label index it reads: `γ_n` for an
    /// opener, `γ` of its partner for a closer.
    pub label_indices: Vec<i128>,
    /// For each closer, the coordinate of its partner.
    pub partners: Vec<Option<i128>>,
}

/// `P(T > t)` for the first time `T` a fair ±1 walk from 0 hits -1:
/// `C(t, ⌊t/2⌋) / 2^t`.
pub fn first_passage_survival(t: u128) -> f64 {
    // odd and even neighbours share the value: q_t = C(2K, K) / 4^K, K = ⌈t/2⌉
    let half = t.div_ceil(2);
    if half <= 512 {
        return (1..=half as u32).map(|i| (2 * i - 1) as f64 / (2 * i) as f64).product();
    }
    let k = half as f64;
    (-0.5 * (std::f64::consts::PI * k).ln() - 1.0 / (8.0 * k) + 1.0 / (192.0 * k.powi(3)) - 1.0 / (640.0 * k.powi(5))).exp()
}

/// Inverse-CDF draw of that first-passage time (always odd).
fn draw_first_passage<R: Rng>(rng: &mut R) -> u128 {
    // strictly inside (0, 1)
    let u: f64 = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64) + f64::EPSILON / 2.0;
    let (mut lo, mut hi) = (0u128, 1u128);
    while first_passage_survival(hi) >= u {
        lo = hi;
        hi *= 2;
    }
    // survival(lo) >= u > survival(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if first_passage_survival(mid) >= u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi | 1
}

/// For each byte read low bit first (1 = opener, which lowers the number
/// of outside closers waiting): the lowest running change and the net
/// change.
const BYTE_STEPS: [(i8, i8); 256] = {
    let mut table = [(0i8, 0i8); 256];
    let mut b = 0;
    while b < 256 {
        let (mut x, mut low) = (0i8, 0i8);
        let mut k = 0;
        while k < 8 {
            x += if (b >> k) & 1 == 1 { -1 } else { 1 };
            if x < low {
                low = x;
            }
            k += 1;
        }
        table[b] = (low, x);
        b += 1;
    }
    table
};

struct TildeDraw {
    word: Word,
    extension_depth: u64,
    tail_jumps: u64,
    extension_bits: Vec<u8>,
    label_indices: Vec<i128>,
    partners: Vec<Option<i128>>,
}

fn draw_mu_tilde(m: u32, left: i64, right: i64, seed: u64, config: &SamplerConfig, trace: bool) -> Result<TildeDraw, SamplerError> {
    debug_assert!(left <= 0 && right >= 0);
    let len = (right - left + 1) as usize;
    let mut bits = BitSource::new(seed);
    let z: Vec<u8> = (left..=right).map(|c| bits.bit(c)).collect();

    let mut label_indices = vec![0i128; len];
    let mut partners: Vec<Option<i128>> = vec![None; len];
    // γ for openers inside the window
    let mut run = 0i128;
    for c in 0..=right {
        let i = (c - left) as usize;
        run += z[i] as i128;
        if z[i] == 1 {
            label_indices[i] = run;
        }
    }
    let mut run = 0i128;
    for c in (left..0).rev() {
        let i = (c - left) as usize;
        run += z[i] as i128;
        if z[i] == 1 {
            label_indices[i] = -run;
        }
    }
    let mut openers_left = run;

    let mut stack: Vec<usize> = Vec::new();
    let mut unmatched: Vec<usize> = Vec::new();
    for i in 0..len {
        if z[i] == 1 {
            stack.push(i);
        } else if let Some(o) = stack.pop() {
            label_indices[i] = label_indices[o];
            partners[i] = Some(left as i128 + o as i128);
        } else {
            unmatched.push(i);
        }
    }

    let mut extension_depth = 0u64;
    let mut tail_jumps = 0u64;
    let mut extension_bits = Vec::new();
    if m > 1 {
        // window closers still waiting, leftmost on top, under `outside`
        // closers met during the extension
        let mut waiting: Vec<usize> = unmatched.iter().rev().copied().collect();
        let mut outside = 0u64;
        let mut cur = left as i128 - 1;
        while !waiting.is_empty() && extension_depth < config.budget {
            if !trace && extension_depth + 8 <= config.budget && cur.rem_euclid(8) == 7 {
                let (low, net) = BYTE_STEPS[bits.byte(cur as i64).reverse_bits() as usize];
                if outside as i64 + low as i64 >= 0 {
                    let byte = bits.byte(cur as i64);
                    outside = (outside as i64 + net as i64) as u64;
                    openers_left += byte.count_ones() as i128;
                    extension_depth += 8;
                    cur -= 8;
                    continue;
                }
            }
            let b = bits.bit(cur as i64);
            if trace {
                extension_bits.push(b);
            }
            extension_depth += 1;
            if b == 1 {
                openers_left += 1;
                if outside > 0 {
                    outside -= 1;
                } else {
                    let i = waiting.pop().expect("nonempty");
                    label_indices[i] = -openers_left;
                    partners[i] = Some(cur);
                }
            } else {
                outside += 1;
            }
            cur -= 1;
        }
        if !waiting.is_empty() {
            if config.tail == TailPolicy::Fail {
                return Err(SamplerError::BudgetExhausted { seed, budget: config.budget });
            }
            let mut rng = chunk_rng(seed, DOMAIN_JUMPS, 0);
            let mut jump = |cur: &mut i128, openers_left: &mut i128| {
                let t = draw_first_passage(&mut rng) as i128;
                *openers_left += (t + 1) / 2;
                *cur -= t;
                *cur + 1
            };
            for _ in 0..outside {
                jump(&mut cur, &mut openers_left);
                tail_jumps += 1;
            }
            while let Some(i) = waiting.pop() {
                let partner = jump(&mut cur, &mut openers_left);
                tail_jumps += 1;
                label_indices[i] = -openers_left;
                partners[i] = Some(partner);
            }
        }
    }

    let mut labels = LabelStore::new(m, seed);
    let symbols: Vec<Symbol> = z
        .iter()
        .zip(&label_indices)
        .map(|(&b, &idx)| {
            let t = if m == 1 { 1 } else { labels.label(idx) };
            if b == 1 { Symbol::open(t) } else { Symbol::close(t) }
        })
        .collect();
    Ok(TildeDraw {
        word: Word::from_trusted(m, symbols),
        extension_depth,
        tail_jumps,
        extension_bits,
        label_indices,
        partners,
    })
}

/// Opener types resolved by the partner to the right. Closers carry their
/// own type; openers are a single untyped symbol. This is the `nu` law,
/// and the `mu-minus` law on any window.
fn draw_rightward(m: u32, left: i64, right: i64, seed: u64, domain: u64, config: &SamplerConfig) -> Result<(Vec<Symbol>, u64, u64), SamplerError> {
    let mut source = SymbolSource::new(seed, domain, m);
    let mut symbols: Vec<Symbol> = Vec::with_capacity((right - left + 1) as usize);
    let mut stack: Vec<usize> = Vec::new();
    for c in left..=right {
        let v = source.get(c);
        if v == 0 {
            stack.push(symbols.len());
            symbols.push(Symbol::open(0));
        } else {
            if let Some(o) = stack.pop() {
                symbols[o] = Symbol::open(v);
            }
            symbols.push(Symbol::close(v));
        }
    }
    let mut depth = 0u64;
    let mut outside = 0usize;
    let mut c = right + 1;
    while !stack.is_empty() {
        if depth == config.budget {
            if config.tail == TailPolicy::Fail {
                return Err(SamplerError::BudgetExhausted { seed, budget: config.budget });
            }
            // a partner's type is uniform whenever it turns up
            let mut rng = chunk_rng(seed, DOMAIN_JUMPS, domain as i128);
            let jumps = stack.len() as u64;
            while let Some(o) = stack.pop() {
                symbols[o] = Symbol::open(rng.gen_range(1..=m));
            }
            return Ok((symbols, depth, jumps));
        }
        let v = source.get(c);
        depth += 1;
        c += 1;
        if v == 0 {
            outside += 1;
        } else if outside > 0 {
            outside -= 1;
        } else {
            let o = stack.pop().expect("nonempty");
            symbols[o] = Symbol::open(v);
        }
    }
    Ok((symbols, depth, 0))
}

fn check_m(m: u32) -> Result<(), SamplerError> {
    if m == 0 {
        Err(SamplerError::EmptyAlphabet)
    } else {
        Ok(())
    }
}

/// Draws the window `[left, right]` of a typical point for `kind`.
/// Two-sided kinds need `left <= 0 <= right`; `nu` needs `left >= 0`.
pub fn sample_range(kind: MeasureKind, m: u32, left: i64, right: i64, seed: u64, config: &SamplerConfig) -> Result<SampleWindow, SamplerError> {
    check_m(m)?;
    let window = |word: Word, extension_depth: u64, tail_jumps: u64| SampleWindow {
        kind,
        m,
        left,
        right,
        word,
        seed,
        extension_depth,
        tail_jumps,
    };
    match kind {
        MeasureKind::MuTilde => {
            if left > 0 || right < 0 {
                return Err(SamplerError::WindowOffOrigin);
            }
            let d = draw_mu_tilde(m, left, right, seed, config, false)?;
            Ok(window(d.word, d.extension_depth, d.tail_jumps))
        }
        MeasureKind::MuMinus | MeasureKind::NuOneSided => {
            let domain = if kind == MeasureKind::MuMinus { DOMAIN_MINUS } else { DOMAIN_NU };
            let (symbols, depth, jumps) = draw_rightward(m, left, right, seed, domain, config)?;
            Ok(window(Word::from_trusted(m, symbols), depth, jumps))
        }
        MeasureKind::MuPlus => {
            // the mirror image of a right-resolved draw on the reflected window
            let (symbols, depth, jumps) = draw_rightward(m, -right, -left, seed, DOMAIN_PLUS, config)?;
            Ok(window(Word::from_trusted(m, symbols).mirror(), depth, jumps))
        }
    }
}

/// `mu-tilde` on `[-n, n]`.
pub fn sample_mu_tilde(m: u32, n: i64, seed: u64) -> Result<SampleWindow, SamplerError> {
    sample_range(MeasureKind::MuTilde, m, -n, n, seed, &SamplerConfig::default())
}

/// `mu-plus` on `[-n, n]`.
pub fn sample_mu_plus(m: u32, n: i64, seed: u64) -> Result<SampleWindow, SamplerError> {
    sample_range(MeasureKind::MuPlus, m, -n, n, seed, &SamplerConfig::default())
}

/// `mu-minus` on `[-n, n]`.
pub fn sample_mu_minus(m: u32, n: i64, seed: u64) -> Result<SampleWindow, SamplerError> {
    sample_range(MeasureKind::MuMinus, m, -n, n, seed, &SamplerConfig::default())
}

/// `nu` on coordinates `0..n`.
pub fn sample_nu(m: u32, n: i64, seed: u64) -> Result<SampleWindow, SamplerError> {
    if n < 1 {
        return Err(SamplerError::EmptyBlock);
    }
    sample_range(MeasureKind::NuOneSided, m, 0, n - 1, seed, &SamplerConfig::default())
}

/// A `mu-tilde` draw on `[-n, n]` along with its walk and label indices.
pub fn sample_mu_tilde_traced(m: u32, n: i64, seed: u64, config: &SamplerConfig) -> Result<TracedSample, SamplerError> {
    check_m(m)?;
    let d = draw_mu_tilde(m, -n, n, seed, config, true)?;
    let mut z: Vec<u8> = d.extension_bits.iter().rev().copied().collect();
    z.extend(d.word.symbols().iter().map(|s| s.is_open() as u8));
    let walk = WalkWindow::new(-n - d.extension_bits.len() as i64, z)?;
    Ok(TracedSample {
        window: SampleWindow {
            kind: MeasureKind::MuTilde,
            m,
            left: -n,
            right: n,
            word: d.word,
            seed,
            extension_depth: d.extension_depth,
            tail_jumps: d.tail_jumps,
        },
        walk,
        label_indices: d.label_indices,
        partners: d.partners,
    })
}

// ---------------------------------------------------------------------------
// Harness

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareReport {
    pub kind: MeasureKind,
    pub m: u32,
    pub block_len: usize,
    pub samples: u64,
    pub seed: u64,
    pub cells: usize,
    pub dof: usize,
    pub statistic: f64,
    /// 99.9% quantile of the chi-square law with `dof` degrees of freedom.
    pub threshold: f64,
    /// Largest `|observed - expected| / sd` over single cells.
    pub max_cell_z: f64,
    pub inadmissible: u64,
    pub tail_jumps: u64,
    pub pass: bool,
}

fn encode(symbols: &[Symbol], m: u32) -> u64 {
    symbols.iter().fold(0u64, |acc, s| {
        let digit = if s.is_open() { s.index - 1 } else { m + s.index - 1 };
        acc * (2 * m as u64) + digit as u64
    })
}

/// Block `[left, left + len)` the harness reads for `kind`.
fn harness_block(kind: MeasureKind, block_len: usize) -> (i64, i64) {
    let left = if kind.is_two_sided() { -((block_len / 2) as i64) } else { 0 };
    (left, left + block_len as i64 - 1)
}

/// Draws `samples` independent blocks of length `block_len` and compares
/// their frequencies with the exact cylinder values.
pub fn empirical_vs_exact(kind: MeasureKind, m: u32, block_len: usize, samples: u64, seed: u64, config: &SamplerConfig) -> Result<ChiSquareReport, SamplerError> {
    check_m(m)?;
    if block_len == 0 {
        return Err(SamplerError::EmptyBlock);
    }
    let cells_total = count_admissible(m, block_len);
    if cells_total > MAX_CELLS.into() {
        return Err(SamplerError::CellLimit { cells: cells_total.to_string(), limit: MAX_CELLS });
    }
    let measure = Measure::new(kind, m).expect("m >= 1");
    let mut cells: Vec<(u64, f64)> = Vec::new();
    visit_admissible(m, block_len, &[], |path, _| {
        if path.len() == block_len {
            let p = measure.cylinder_unchecked(&Word::from_trusted(m, path.to_vec())).to_f64();
            cells.push((encode(path, m), p));
        }
    });
    let index: HashMap<u64, usize> = cells.iter().enumerate().map(|(i, &(code, _))| (code, i)).collect();
    let (left, right) = harness_block(kind, block_len);

    const BATCH: u64 = 4096;
    let batches = samples.div_ceil(BATCH);
    let (counts, inadmissible, tail_jumps) = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut counts = vec![0u64; cells.len()];
            let (mut bad, mut jumps) = (0u64, 0u64);
            for k in b * BATCH..((b + 1) * BATCH).min(samples) {
                let w = sample_range(kind, m, left, right, derive_seed(seed, k), config)?;
                jumps += w.tail_jumps;
                match index.get(&encode(w.word.symbols(), m)) {
                    Some(&i) if is_admissible(w.word.symbols()) => counts[i] += 1,
                    _ => bad += 1,
                }
            }
            Ok((counts, bad, jumps))
        })
        .try_reduce(
            || (vec![0u64; cells.len()], 0, 0),
            |(mut a, x, y), (b, u, v)| {
                a.iter_mut().zip(&b).for_each(|(p, q)| *p += q);
                Ok((a, x + u, y + v))
            },
        )?;

    let n = samples as f64;
    let mut statistic = 0.0;
    let mut max_cell_z: f64 = 0.0;
    for (&(_, p), &o) in cells.iter().zip(&counts) {
        let e = n * p;
        statistic += (o as f64 - e).powi(2) / e;
        let sd = (n * p * (1.0 - p)).sqrt();
        if sd > 0.0 {
            max_cell_z = max_cell_z.max((o as f64 - e).abs() / sd);
        }
    }
    let dof = cells.len().saturating_sub(1);
    let threshold = if dof == 0 {
        0.0
    } else {
        ChiSquared::new(dof as f64).expect("positive dof").inverse_cdf(0.999)
    };
    Ok(ChiSquareReport {
        kind,
        m,
        block_len,
        samples,
        seed,
        cells: cells.len(),
        dof,
        statistic,
        threshold,
        max_cell_z,
        inadmissible,
        tail_jumps,
        pass: inadmissible == 0 && statistic <= threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunsTest {
    pub n: usize,
    pub ones: usize,
    pub runs: usize,
    pub expected: f64,
    pub sd: f64,
    pub z: f64,
    pub pass: bool,
}

/// Wald–Wolfowitz runs test, passing when `|z| <= 3`.
pub fn runs_test(bits: &[u8]) -> RunsTest {
    let n = bits.len();
    let ones = bits.iter().filter(|&&b| b == 1).count();
    let runs = if n == 0 { 0 } else { 1 + bits.windows(2).filter(|w| w[0] != w[1]).count() };
    let (n1, n0, nf) = (ones as f64, (n - ones) as f64, n as f64);
    let expected = 2.0 * n1 * n0 / nf + 1.0;
    let sd = ((expected - 1.0) * (expected - 2.0) / (nf - 1.0)).sqrt();
    let z = (runs as f64 - expected) / sd;
    RunsTest { n, ones, runs, expected, sd, z, pass: z.is_finite() && z.abs() <= 3.0 }
}

/// Opener indicator of a word.
pub fn bit_projection(w: &Word) -> Vec<u8> {
    w.symbols().iter().map(|s| s.is_open() as u8).collect()
}
