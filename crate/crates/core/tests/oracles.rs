//! Independent oracles for the closed forms and dynamic programs.

use std::collections::HashMap;

use dycklab::counting::{brute_force_counts, profile_counts};
use dycklab::holonomies::{admissible_words, xi_continuation_check, xi_surgery};
use dycklab::measures::{
    block_entropy, conditional_entropy_given_past, conditional_entropy_sequence, past_minimum, Measure, MeasureKind,
};
use dycklab::numeric::rational_to_f64;
use dycklab::word_algebra::unmatched_profile;
use dycklab::{Symbol, Word};
use num_bigint::BigUint;

#[test]
fn profile_table_matches_enumeration() {
    for m in 1..=3u32 {
        let brute = brute_force_counts(m, 8).unwrap();
        for (n, counts) in brute.iter().enumerate() {
            let table = profile_counts(m, n);
            let from_table: HashMap<(usize, usize), u64> =
                table.entries().filter(|(_, _, c)| **c > BigUint::from(0u32)).map(|(s, b, c)| ((s, b), c.try_into().unwrap())).collect();
            assert_eq!(from_table, counts.by_profile, "m={m} n={n}");
        }
    }
}

#[test]
fn block_entropy_matches_enumeration() {
    for m in 1..=3u32 {
        let words = admissible_words(m, 7);
        for kind in MeasureKind::ALL {
            let mu = Measure::new(kind, m).unwrap();
            let mut by_len = [0.0f64; 8];
            for w in &words {
                let p = mu.cylinder(w).unwrap().to_f64();
                by_len[w.len()] -= p * p.ln();
            }
            for (n, h) in by_len.iter().enumerate() {
                let dp = block_entropy(kind, m, n).total;
                assert!((dp - h).abs() < 1e-10, "{kind} m={m} n={n}: {dp} vs {h}");
            }
        }
    }
}

/// `h(x_0 | past)` straight from cylinder values, using shift invariance.
fn conditional_entropy_oracle(m: u32, past: &Word) -> f64 {
    let mu = Measure::new(MeasureKind::MuTilde, m).unwrap();
    let base = mu.cylinder(past).unwrap().to_f64();
    Symbol::alphabet(m)
        .into_iter()
        .map(|c| {
            let mut next = past.clone();
            next.push(c).unwrap();
            mu.cylinder(&next).unwrap().to_f64() / base
        })
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

#[test]
fn conditional_entropy_branches_match_cylinder_oracle() {
    for m in 1..=3u32 {
        for past in admissible_words(m, 6) {
            let oracle = conditional_entropy_oracle(m, &past);
            let formula = conditional_entropy_given_past(m, &past);
            assert!((oracle - formula).abs() < 1e-12, "m={m} past={past} ϖ={}: {oracle} vs {formula}", past_minimum(&past));
        }
    }
}

#[test]
fn conditional_entropy_sequence_is_the_average_over_pasts() {
    for m in 2..=3u32 {
        let mu = Measure::new(MeasureKind::MuTilde, m).unwrap();
        for n in 0..=7usize {
            let average: f64 = admissible_words(m, n)
                .iter()
                .filter(|w| w.len() == n)
                .map(|w| mu.cylinder(w).unwrap().to_f64() * conditional_entropy_given_past(m, w))
                .sum();
            let c = conditional_entropy_sequence(m, n);
            assert!((average - c.h).abs() < 1e-10, "m={m} n={n}: {average} vs {}", c.h);
            let q: f64 = admissible_words(m, n)
                .iter()
                .filter(|w| w.len() == n && past_minimum(w) >= 0)
                .map(|w| mu.cylinder(w).unwrap().to_f64())
                .sum();
            assert!((q - rational_to_f64(&c.q)).abs() < 1e-10);
        }
    }
}

#[test]
fn xi_preserves_every_continuation() {
    let m = 2;
    for b in admissible_words(m, 5) {
        let Ok(p) = unmatched_profile(&b) else { continue };
        if p.hat_beta != 0 || p.hat_alpha < 2 {
            continue;
        }
        for t in 1..p.hat_alpha {
            for i in 1..=m {
                let image = xi_surgery(&b, i, t).unwrap();
                let q = unmatched_profile(&image).unwrap();
                assert_eq!((q.hat_alpha, q.hat_beta), (p.hat_alpha - t - 1, t + 1), "{b} → {image}");
                let check = xi_continuation_check(&b, i, t, 2, 5).unwrap();
                assert_eq!(check.violations, 0, "{b} t={t} i={i}: {:?}", check.first_violation);
            }
        }
    }
}
