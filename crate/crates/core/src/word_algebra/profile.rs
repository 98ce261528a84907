//! Height functionals and matched/unmatched statistics of words.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::word_algebra::monoid::{reduce, MonoidForm};
use crate::word_algebra::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightProfile {
    /// `H_0 = 0, H_1, …, H_n`.
    pub heights: Vec<i64>,
    /// Minimum over all prefix heights, including the empty prefix.
    pub min_height: i64,
    pub final_height: i64,
}

pub fn height_profile(w: &Word) -> HeightProfile {
    let mut heights = Vec::with_capacity(w.len() + 1);
    let mut h = 0i64;
    let mut min_height = 0i64;
    heights.push(0);
    for s in w.symbols() {
        h += s.step();
        min_height = min_height.min(h);
        heights.push(h);
    }
    HeightProfile { heights, min_height, final_height: h }
}

/// Matched-pair count and unmatched symbols of an admissible word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnmatchedProfile {
    pub n1: usize,
    pub hat_alpha: usize,
    pub hat_beta: usize,
    pub alpha_positions: Vec<usize>,
    pub beta_positions: Vec<usize>,
}

impl UnmatchedProfile {
    /// Unmatched symbols of either kind.
    pub fn n2(&self) -> usize {
        self.hat_alpha + self.hat_beta
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("word `{0}` is not admissible")]
pub struct InadmissibleWord(pub String);

/// Counts from the height walk alone, without positions. Valid for
/// admissible words; inadmissible words get the same numbers but they
/// carry no meaning.
#[inline]
pub(crate) fn hat_counts(w: &Word) -> (usize, usize) {
    let mut h = 0i64;
    let mut min = 0i64;
    for s in w.symbols() {
        h += s.step();
        min = min.min(h);
    }
    ((h - min) as usize, (-min) as usize)
}

/// Positions are read off the height walk. A closer at `t` is unmatched
/// when it sets a new prefix minimum. An opener at `t` is unmatched when
/// the walk never returns to `H_t` afterwards, which is the same test
/// applied to the mirrored word.
pub fn unmatched_profile(w: &Word) -> Result<UnmatchedProfile, InadmissibleWord> {
    if reduce(w).is_zero() {
        return Err(InadmissibleWord(w.to_string()));
    }
    let hp = height_profile(w);
    let n = w.len();
    let mut beta_positions = Vec::new();
    let mut running_min = 0i64;
    for t in 0..n {
        if hp.heights[t + 1] < running_min {
            running_min = hp.heights[t + 1];
            beta_positions.push(t);
        }
    }
    // suffix_min[t] = min_{k >= t} H_k
    let mut suffix_min = vec![0i64; n + 1];
    suffix_min[n] = hp.heights[n];
    for t in (0..n).rev() {
        suffix_min[t] = hp.heights[t].min(suffix_min[t + 1]);
    }
    let alpha_positions: Vec<usize> = (0..n)
        .filter(|&t| w.symbols()[t].is_open() && suffix_min[t + 1] > hp.heights[t])
        .collect();
    let hat_alpha = (hp.final_height - hp.min_height) as usize;
    let hat_beta = (-hp.min_height) as usize;
    debug_assert_eq!(alpha_positions.len(), hat_alpha);
    debug_assert_eq!(beta_positions.len(), hat_beta);
    Ok(UnmatchedProfile { n1: (n - hat_alpha - hat_beta) / 2, hat_alpha, hat_beta, alpha_positions, beta_positions })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub admissible: bool,
    pub balanced: bool,
    pub dyck: bool,
}

pub fn classify(w: &Word) -> Classification {
    let form = reduce(w);
    let admissible = !form.is_zero();
    let balanced = form.is_identity();
    let syms = w.symbols();
    let dyck = balanced && syms.len() >= 2 && syms[0].is_open() && {
        let last = syms[syms.len() - 1];
        last.is_close() && last.index == syms[0].index && {
            let hp = height_profile(w);
            hp.heights[1..syms.len()].iter().all(|&h| h > 0)
        }
    };
    Classification { admissible, balanced, dyck }
}

pub fn is_balanced(w: &Word) -> bool {
    matches!(reduce(w), MonoidForm::Reduced { ref betas, ref alphas } if betas.is_empty() && alphas.is_empty())
}
