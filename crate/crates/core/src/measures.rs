//! Exact cylinder measures and entropies.
//!
//! Four probabilities are covered:
//!
//! * `mu-plus`: the maximal-entropy measure carried by points whose
//!   closers are all matched from the left. It is the pushforward of the
//!   uniform product measure on `{a1..am, b}` with closer types restored
//!   from their partners, so each unmatched closer in a window pays an
//!   extra `1/m`.
//! * `mu-minus`: the mirror image, where unmatched openers pay `1/m`.
//! * `mu-tilde`: built from a fair ±1 walk and i.i.d. uniform labels, with
//!   `μ̃[w] = 2^{-|w|} m^{-(n1+n2)}`.
//! * `nu`: the tail-invariant probability of the one-sided shift. It
//!   shares the `mu-minus` cylinder law but only right extensions exist.
//!
//! Each cylinder value depends on a word only through `(|w|, α̂, β̂)`,
//! which is what lets the entropy code run over profile tables instead of
//! word lists.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counting::{profile_counts, ProfileCountTable, ProfileRecurrence};
use crate::numeric::{format_rational, ln_biguint, rational_to_f64};
use crate::word_algebra::monoid::reduce;
use crate::word_algebra::profile::hat_counts;
use crate::word_algebra::{Symbol, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MeasureKind {
    #[serde(rename = "mu-plus")]
    MuPlus,
    #[serde(rename = "mu-minus")]
    MuMinus,
    #[serde(rename = "mu-tilde")]
    MuTilde,
    #[serde(rename = "nu")]
    NuOneSided,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 4] =
        [MeasureKind::MuPlus, MeasureKind::MuMinus, MeasureKind::MuTilde, MeasureKind::NuOneSided];

    pub const TWO_SIDED: [MeasureKind; 3] = [MeasureKind::MuPlus, MeasureKind::MuMinus, MeasureKind::MuTilde];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::MuPlus => "mu-plus",
            MeasureKind::MuMinus => "mu-minus",
            MeasureKind::MuTilde => "mu-tilde",
            MeasureKind::NuOneSided => "nu",
        }
    }

    pub fn is_two_sided(self) -> bool {
        !matches!(self, MeasureKind::NuOneSided)
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown measure `{0}` (expected mu-plus, mu-minus, mu-tilde or nu)")]
pub struct UnknownMeasure(pub String);

impl FromStr for MeasureKind {
    type Err = UnknownMeasure;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MeasureKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| UnknownMeasure(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,
    #[error("word lives in alphabet of size {found}, measure is configured for {expected}")]
    AlphabetMismatch { expected: u32, found: u32 },
}

/// Exact value of a cylinder, in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CylinderMeasure(BigRational);

impl CylinderMeasure {
    pub fn zero() -> Self {
        CylinderMeasure(BigRational::zero())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

impl fmt::Display for CylinderMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl Serialize for CylinderMeasure {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// The `(base, m-exponent)` pair with `value = base^{-len} · m^{-k}`.
#[inline]
fn weight_exponents(kind: MeasureKind, m: u32, len: usize, hat_alpha: usize, hat_beta: usize) -> (u64, usize) {
    match kind {
        MeasureKind::MuTilde => (2, (len + hat_alpha + hat_beta) / 2),
        MeasureKind::MuPlus => (m as u64 + 1, hat_beta),
        MeasureKind::MuMinus | MeasureKind::NuOneSided => (m as u64 + 1, hat_alpha),
    }
}

/// Cylinder value of any admissible word with the given profile.
pub fn profile_weight(kind: MeasureKind, m: u32, len: usize, hat_alpha: usize, hat_beta: usize) -> BigRational {
    let (base, k) = weight_exponents(kind, m, len, hat_alpha, hat_beta);
    let denom = BigUint::from(base).pow(len as u32) * BigUint::from(m).pow(k as u32);
    BigRational::new(BigInt::one(), BigInt::from(denom))
}

/// `-ln` of [`profile_weight`].
pub fn profile_neg_log(kind: MeasureKind, m: u32, len: usize, hat_alpha: usize, hat_beta: usize) -> f64 {
    let (base, k) = weight_exponents(kind, m, len, hat_alpha, hat_beta);
    len as f64 * (base as f64).ln() + k as f64 * (m as f64).ln()
}

/// One of the four measures on a fixed alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Measure {
    pub kind: MeasureKind,
    pub m: u32,
}

impl Measure {
    pub fn new(kind: MeasureKind, m: u32) -> Result<Self, MeasureError> {
        if m == 0 {
            return Err(MeasureError::EmptyAlphabet);
        }
        Ok(Measure { kind, m })
    }

    pub fn cylinder(&self, w: &Word) -> Result<CylinderMeasure, MeasureError> {
        if w.m() != self.m {
            return Err(MeasureError::AlphabetMismatch { expected: self.m, found: w.m() });
        }
        Ok(self.cylinder_unchecked(w))
    }

    pub(crate) fn cylinder_unchecked(&self, w: &Word) -> CylinderMeasure {
        if reduce(w).is_zero() {
            return CylinderMeasure::zero();
        }
        let (hat_alpha, hat_beta) = hat_counts(w);
        CylinderMeasure(profile_weight(self.kind, self.m, w.len(), hat_alpha, hat_beta))
    }

    /// Exact `Σ_{|w| = n} μ[w]`, summed over the profile table.
    pub fn total_mass(&self, n: usize) -> BigRational {
        total_mass_of(self.kind, &profile_counts(self.m, n))
    }
}

pub fn total_mass_of(kind: MeasureKind, table: &ProfileCountTable) -> BigRational {
    table
        .entries()
        .map(|(s, b, c)| BigRational::from_integer(BigInt::from(c.clone())) * profile_weight(kind, table.m(), table.n(), s, b))
        .fold(BigRational::zero(), |acc, x| acc + x)
}

/// Convenience wrapper around [`Measure::cylinder`].
pub fn cylinder_measure(kind: MeasureKind, w: &Word, m: u32) -> Result<CylinderMeasure, MeasureError> {
    Measure::new(kind, m)?.cylinder(w)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub kind: MeasureKind,
    pub word: String,
    pub value: CylinderMeasure,
    /// `Σ_c μ[w c]`.
    pub right_sum: CylinderMeasure,
    /// `Σ_c μ[c w]`; absent for the one-sided measure.
    pub left_sum: Option<CylinderMeasure>,
    pub pass: bool,
}

impl ConsistencyReport {
    pub fn right_residual(&self) -> BigRational {
        self.value.value() - self.right_sum.value()
    }

    pub fn left_residual(&self) -> Option<BigRational> {
        self.left_sum.as_ref().map(|l| self.value.value() - l.value())
    }
}

/// Checks the marginalization identities exactly.
pub fn consistency_check(measure: &Measure, w: &Word) -> Result<ConsistencyReport, MeasureError> {
    let value = measure.cylinder(w)?;
    let alphabet = Symbol::alphabet(measure.m);
    let extend = |left: bool| {
        let total = alphabet
            .iter()
            .map(|&c| {
                let mut syms = Vec::with_capacity(w.len() + 1);
                if left {
                    syms.push(c);
                    syms.extend_from_slice(w.symbols());
                } else {
                    syms.extend_from_slice(w.symbols());
                    syms.push(c);
                }
                measure.cylinder_unchecked(&Word::from_trusted(measure.m, syms)).into_inner()
            })
            .fold(BigRational::zero(), |acc, x| acc + x);
        CylinderMeasure(total)
    };
    let right_sum = extend(false);
    let left_sum = measure.kind.is_two_sided().then(|| extend(true));
    let pass = right_sum == value && left_sum.as_ref().is_none_or(|l| *l == value);
    Ok(ConsistencyReport { kind: measure.kind, word: w.to_string(), value, right_sum, left_sum, pass })
}

// ---------------------------------------------------------------------------
// Entropy

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockEntropy {
    pub n: usize,
    /// `H_n` in nats.
    pub total: f64,
    /// `H_n / n`.
    pub per_symbol: f64,
}

fn entropy_of_table(kind: MeasureKind, table: &ProfileCountTable) -> BlockEntropy {
    let (m, n) = (table.m(), table.n());
    let total: f64 = table
        .entries()
        .map(|(s, b, c)| {
            let neg_log = profile_neg_log(kind, m, n, s, b);
            // class mass N·p, formed in log space to stay inside f64 range
            let mass = (ln_biguint(c) - neg_log).exp();
            mass * neg_log
        })
        .sum();
    BlockEntropy { n, total, per_symbol: if n == 0 { 0.0 } else { total / n as f64 } }
}

/// `H_n(μ) = -Σ_{|w|=n} μ[w] ln μ[w]`.
pub fn block_entropy(kind: MeasureKind, m: u32, n: usize) -> BlockEntropy {
    entropy_of_table(kind, &profile_counts(m, n))
}

/// `H_1, …, H_{n_max}` from a single pass of the profile recurrence.
pub fn block_entropy_sequence(kind: MeasureKind, m: u32, n_max: usize) -> Vec<BlockEntropy> {
    let mut rec = ProfileRecurrence::new(m);
    (1..=n_max)
        .map(|_| {
            rec.step();
            entropy_of_table(kind, rec.table())
        })
        .collect()
}

/// Probability that `n` fair ±1 steps never dip below the start:
/// `C(n, ⌊n/2⌋) / 2^n`.
pub fn nonnegative_walk_probability(n: usize) -> BigRational {
    let k = n / 2;
    let mut binom = BigUint::one();
    for i in 0..k as u64 {
        binom = binom * BigUint::from(n as u64 - i) / BigUint::from(i + 1);
    }
    BigRational::new(BigInt::from(binom), BigInt::from(BigUint::one() << n))
}

/// Number of `n`-step ±1 paths from 0 that stay `>= 0`, by dynamic
/// programming over the current height.
pub fn nonnegative_walk_count_dp(n: usize) -> BigUint {
    let mut by_height = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); by_height.len() + 1];
        for (h, c) in by_height.iter().enumerate() {
            next[h + 1] += c;
            if h > 0 {
                next[h - 1] += c;
            }
        }
        by_height = next;
    }
    by_height.iter().sum()
}

/// `ϖ` of an observed past, given in its natural left-to-right order
/// `x_{-n} … x_{-1}`: the minimum over suffixes (including the empty one)
/// of closers minus openers. It is negative exactly when the past holds an
/// opener with no partner inside the past.
pub fn past_minimum(past: &Word) -> i64 {
    let mut h = 0i64;
    let mut min = 0i64;
    for s in past.symbols().iter().rev() {
        h -= s.step();
        min = min.min(h);
    }
    min
}

/// `h(x_0 | past)` under `μ̃` for an admissible past: `ln(2m)` when no
/// opener in the past is waiting for a partner, `ln 2 + ½ ln m` otherwise.
pub fn conditional_entropy_given_past(m: u32, past: &Word) -> f64 {
    let m = m as f64;
    if past_minimum(past) >= 0 {
        (2.0 * m).ln()
    } else {
        std::f64::consts::LN_2 + 0.5 * m.ln()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalEntropy {
    pub n: usize,
    /// `μ̃(ϖ >= 0)` for a past of length `n`.
    pub q: BigRational,
    pub h: f64,
}

/// `h_n = q_n ln(2m) + (1 - q_n)(ln 2 + ½ ln m)`.
pub fn conditional_entropy_sequence(m: u32, n: usize) -> ConditionalEntropy {
    let q = nonnegative_walk_probability(n);
    let qf = rational_to_f64(&q);
    let mf = m as f64;
    let h = qf * (2.0 * mf).ln() + (1.0 - qf) * (std::f64::consts::LN_2 + 0.5 * mf.ln());
    ConditionalEntropy { n, q, h }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyConstants {
    pub m: u32,
    /// `ln 2 + ½ ln m`.
    pub h_tilde: f64,
    /// `ln(m + 1)`.
    pub h_top: f64,
    /// Entropy of the product distribution `(1/2m, …, 1/2m, 1/2)` on
    /// `{a1..am, b}`, which bounds the zero-drift stratum.
    pub a0_bound: f64,
    pub tilde_below_top: bool,
}

pub fn entropy_constants(m: u32) -> EntropyConstants {
    let mf = m as f64;
    let h_tilde = std::f64::consts::LN_2 + 0.5 * mf.ln();
    let h_top = (mf + 1.0).ln();
    let p_open = 1.0 / (2.0 * mf);
    let a0_bound = -(mf * p_open * p_open.ln() + 0.5 * 0.5f64.ln());
    EntropyConstants { m, h_tilde, h_top, a0_bound, tilde_below_top: h_tilde < h_top - 1e-12 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str) -> Word {
        Word::parse(text, 2).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn tilde_examples() {
        let mu = Measure::new(MeasureKind::MuTilde, 2).unwrap();
        assert_eq!(mu.cylinder(&w("a1b1")).unwrap().value(), &q(1, 8));
        assert_eq!(mu.cylinder(&w("a1b2")).unwrap().value(), &q(0, 1));
        assert_eq!(mu.cylinder(&w("a1")).unwrap().value(), &q(1, 4));
    }

    #[test]
    fn plus_single_symbols() {
        let mu = Measure::new(MeasureKind::MuPlus, 2).unwrap();
        assert_eq!(mu.cylinder(&w("b1")).unwrap().value(), &q(1, 6));
        assert_eq!(mu.cylinder(&w("a2")).unwrap().value(), &q(1, 3));
        assert_eq!(mu.total_mass(1), BigRational::one());
    }

    #[test]
    fn alphabet_mismatch() {
        let mu = Measure::new(MeasureKind::MuTilde, 3).unwrap();
        assert_eq!(mu.cylinder(&w("a1")), Err(MeasureError::AlphabetMismatch { expected: 3, found: 2 }));
        assert!(Measure::new(MeasureKind::MuTilde, 0).is_err());
    }

    #[test]
    fn consistency_examples() {
        let r = consistency_check(&Measure::new(MeasureKind::MuTilde, 2).unwrap(), &w("a1")).unwrap();
        assert!(r.pass);
        assert_eq!(r.right_sum.value(), &(q(1, 16) + q(1, 16) + q(1, 8)));
        let r = consistency_check(&Measure::new(MeasureKind::MuPlus, 2).unwrap(), &Word::empty(2)).unwrap();
        assert!(r.pass && r.value.value().is_one());
        let r = consistency_check(&Measure::new(MeasureKind::MuMinus, 2).unwrap(), &w("b1a1b1")).unwrap();
        assert!(r.pass && r.left_residual().unwrap().is_zero() && r.right_residual().is_zero());
        let r = consistency_check(&Measure::new(MeasureKind::NuOneSided, 2).unwrap(), &w("a2b2a1")).unwrap();
        assert!(r.pass && r.left_sum.is_none());
    }

    #[test]
    fn kind_names_roundtrip() {
        for k in MeasureKind::ALL {
            assert_eq!(k.name().parse::<MeasureKind>().unwrap(), k);
            assert_eq!(serde_json::to_value(k).unwrap(), k.name());
        }
        assert!("mu".parse::<MeasureKind>().is_err());
    }

    #[test]
    fn value_serializes_as_fraction() {
        let v = cylinder_measure(MeasureKind::MuTilde, &w("a1b1"), 2).unwrap();
        assert_eq!(serde_json::to_value(&v).unwrap(), "1/8");
        assert_eq!(CylinderMeasure::zero().to_string(), "0/1");
    }

    #[test]
    fn one_symbol_entropy() {
        let h = block_entropy(MeasureKind::MuTilde, 2, 1);
        assert!((h.total - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn first_conditional_entropy() {
        let c = conditional_entropy_sequence(2, 1);
        assert_eq!(c.q, q(1, 2));
        assert!((c.h - 1.75 * std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn past_branches() {
        let ln2 = std::f64::consts::LN_2;
        // a closer just before time 0 leaves the next closer free
        assert!((conditional_entropy_given_past(2, &w("b1")) - 4f64.ln()).abs() < 1e-12);
        // a pending opener forces the next closer's type
        assert!((conditional_entropy_given_past(2, &w("a1")) - 1.5 * ln2).abs() < 1e-12);
        assert!((conditional_entropy_given_past(2, &w("a1a2b2")) - 1.5 * ln2).abs() < 1e-12);
        assert!((conditional_entropy_given_past(2, &w("a1b1")) - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn ballot_closed_form_matches_dp() {
        for n in 0..60 {
            let dp = nonnegative_walk_count_dp(n);
            let expected = BigRational::new(BigInt::from(dp), BigInt::from(BigUint::one() << n));
            assert_eq!(nonnegative_walk_probability(n), expected, "n = {n}");
        }
    }

    #[test]
    fn constants() {
        let c = entropy_constants(2);
        assert!((c.h_tilde - 1.039720770839918).abs() < 1e-12);
        assert!((c.h_top - 3f64.ln()).abs() < 1e-12);
        assert!((c.a0_bound - c.h_tilde).abs() < 1e-12);
        assert!(c.tilde_below_top);
        let c = entropy_constants(1);
        assert!((c.h_tilde - c.h_top).abs() < 1e-12);
        assert!(!c.tilde_below_top);
    }
}
