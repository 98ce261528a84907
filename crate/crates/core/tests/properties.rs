use dycklab::holonomies::{monoid_equivalent, sync_witness};
use dycklab::measures::{consistency_check, Measure, MeasureKind};
use dycklab::samplers::{sample_range, SamplerConfig, DEFAULT_BUDGET};
use dycklab::word_algebra::{reduce, unmatched_profile};
use dycklab::{Symbol, Word};
use proptest::prelude::*;

fn word(m: u32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((any::<bool>(), 1..=m), 0..=max_len).prop_map(move |v| {
        let symbols = v.into_iter().map(|(open, i)| if open { Symbol::open(i) } else { Symbol::close(i) }).collect();
        Word::new(m, symbols).unwrap()
    })
}

/// Random words biased towards admissibility: closers copy the type of
/// the innermost pending opener most of the time.
fn admissible_word(m: u32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0u8..3, 1..=m), 0..=max_len).prop_map(move |v| {
        let mut stack = Vec::new();
        let symbols = v
            .into_iter()
            .map(|(kind, i)| match (kind, stack.last()) {
                (0, _) => {
                    stack.push(i);
                    Symbol::open(i)
                }
                (_, Some(&top)) => {
                    stack.pop();
                    Symbol::close(top)
                }
                (_, None) => Symbol::close(i),
            })
            .collect();
        Word::new(m, symbols).unwrap()
    })
}

proptest! {
    #[test]
    fn reduction_is_a_homomorphism(u in word(3, 8), v in word(3, 8)) {
        let joined = reduce(&u.concat(&v).unwrap());
        prop_assert_eq!(joined, reduce(&u).concat(&reduce(&v)));
    }

    #[test]
    fn mirror_is_an_involution_preserving_admissibility(w in word(3, 12)) {
        prop_assert_eq!(w.mirror().mirror(), w.clone());
        prop_assert_eq!(reduce(&w).is_zero(), reduce(&w.mirror()).is_zero());
    }

    #[test]
    fn profile_accounts_for_every_symbol(w in admissible_word(3, 16)) {
        let p = unmatched_profile(&w).unwrap();
        prop_assert_eq!(2 * p.n1 + p.hat_alpha + p.hat_beta, w.len());
        prop_assert_eq!(p.alpha_positions.len(), p.hat_alpha);
        prop_assert_eq!(p.beta_positions.len(), p.hat_beta);
    }

    #[test]
    fn measures_are_consistent(w in admissible_word(3, 10)) {
        for kind in MeasureKind::ALL {
            let r = consistency_check(&Measure::new(kind, 3).unwrap(), &w).unwrap();
            prop_assert!(r.pass, "{} on {}", kind, w);
        }
    }

    #[test]
    fn minus_is_the_mirror_of_plus(w in word(3, 10)) {
        let plus = Measure::new(MeasureKind::MuPlus, 3).unwrap();
        let minus = Measure::new(MeasureKind::MuMinus, 3).unwrap();
        prop_assert_eq!(minus.cylinder(&w).unwrap(), plus.cylinder(&w.mirror()).unwrap());
    }

    #[test]
    fn equivalent_words_have_equal_measures(w in admissible_word(2, 8), v in admissible_word(2, 8)) {
        if monoid_equivalent(&w, &v) {
            for kind in MeasureKind::ALL {
                let mu = Measure::new(kind, 2).unwrap();
                prop_assert_eq!(mu.cylinder(&w).unwrap(), mu.cylinder(&v).unwrap());
            }
        }
    }

    #[test]
    fn witnesses_certify(w in admissible_word(4, 14)) {
        prop_assume!(!reduce(&w).is_zero());
        prop_assert!(sync_witness(&w).unwrap().certified());
    }

    #[test]
    fn samples_are_admissible_and_reproducible(seed in any::<u64>(), m in 1u32..=4, n in 0i64..12) {
        let config = SamplerConfig::default();
        for kind in MeasureKind::ALL {
            let (l, r) = if kind.is_two_sided() { (-n, n) } else { (0, 2 * n) };
            let a = sample_range(kind, m, l, r, seed, &config).unwrap();
            prop_assert!(!reduce(&a.word).is_zero(), "{} {}", kind, a.word);
            prop_assert_eq!(&a, &sample_range(kind, m, l, r, seed, &config).unwrap());
        }
    }

    #[test]
    fn overlapping_windows_agree(seed in any::<u64>(), n in 0i64..10, extra in 1i64..10) {
        let config = SamplerConfig::default();
        for kind in MeasureKind::ALL {
            let (l, r) = if kind.is_two_sided() { (-n, n) } else { (0, n) };
            let small = sample_range(kind, 3, l, r, seed, &config).unwrap();
            let big = sample_range(kind, 3, l - if kind.is_two_sided() { extra } else { 0 }, r + extra, seed, &config).unwrap();
            // a tail jump draws fresh first-passage lengths, so only
            // fully explicit draws are comparable
            if small.tail_jumps > 0 || big.tail_jumps > 0 {
                continue;
            }
            let offset = (l - big.left) as usize;
            prop_assert_eq!(small.word.symbols(), &big.word.symbols()[offset..offset + small.word.len()]);
        }
    }
}

#[test]
fn fair_rightward_walk_past_the_budget() {
    // m = 1 leaves an opener of this window unresolved after the full budget
    let seed = 12808052945767935586;
    let hit: Vec<_> = MeasureKind::ALL
        .into_iter()
        .filter(|&k| k != MeasureKind::MuTilde)
        .map(|k| {
            let (l, r) = if k.is_two_sided() { (-1, 1) } else { (0, 2) };
            sample_range(k, 1, l, r, seed, &SamplerConfig::default()).unwrap()
        })
        .filter(|w| w.tail_jumps > 0)
        .collect();
    assert!(!hit.is_empty());
    for w in hit {
        assert!(!reduce(&w.word).is_zero());
        assert_eq!(w.extension_depth, DEFAULT_BUDGET);
    }
}
