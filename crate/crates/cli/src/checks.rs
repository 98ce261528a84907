//! Check kinds named by the fixtures. Each computes an `actual` value
//! from the inputs and decides `pass` against the fixture's expectation.

use dycklab::counting::{
    brute_force_counts, catalan, catalan_series, count_admissible, count_balanced, count_dyck, growth_report, profile_counts,
    ratio_limit_check,
};
use dycklab::holonomies::{
    admissible_words, extension_sum_check, fiber_census, invariance_suite, minimal_balanced_extensions, one_sided_prefix_swap,
    prefix_swap_suite, sync_witness, xi_surgery, PrefixSwapError,
};
use dycklab::measures::{
    block_entropy, block_entropy_sequence, conditional_entropy_sequence, consistency_check, cylinder_measure, entropy_constants,
    nonnegative_walk_count_dp, nonnegative_walk_probability, total_mass_of, Measure, MeasureKind,
};
use dycklab::numeric::{format_rational, parse_rational};
use dycklab::samplers::{bit_projection, derive_seed, empirical_vs_exact, runs_test, sample_range, SamplerConfig};
use dycklab::word_algebra::{is_balanced, reduce};
use dycklab::Word;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::{Planned, Record};

type Outcome = Result<(Value, bool), String>;

/// Checks that consume the run's seed.
pub fn needs_seed(check: &str) -> bool {
    matches!(check, "chi-square" | "admissibility" | "runs")
}

pub fn run(p: &Planned) -> Record {
    let f = &p.fixture;
    let (actual, pass) = match evaluate(&f.check, &p.inputs, &f.expected) {
        Ok(v) => v,
        Err(e) => (json!({ "error": e }), false),
    };
    Record {
        id: p.id.clone(),
        check: f.check.clone(),
        provenance: f.provenance,
        reference: f.reference.clone(),
        inputs: p.inputs.clone(),
        expected: f.expected.clone(),
        actual,
        pass,
    }
}

fn int(v: &Value, key: &str) -> Result<u64, String> {
    v.get(key).and_then(Value::as_u64).ok_or_else(|| format!("missing integer `{key}`"))
}

fn float(v: &Value, key: &str) -> Result<f64, String> {
    v.get(key).and_then(Value::as_f64).ok_or_else(|| format!("missing number `{key}`"))
}

fn text<'a>(v: &'a Value, key: &str) -> Result<&'a str, String> {
    v.get(key).and_then(Value::as_str).ok_or_else(|| format!("missing string `{key}`"))
}

fn alphabet(v: &Value) -> Result<u32, String> {
    Ok(int(v, "m")? as u32)
}

fn kind(v: &Value) -> Result<MeasureKind, String> {
    text(v, "kind")?.parse().map_err(|e| format!("{e}"))
}

fn word(v: &Value, key: &str, m: u32) -> Result<Word, String> {
    Word::parse(text(v, key)?, m).map_err(|e| format!("`{key}`: {e}"))
}

fn rational(v: &Value) -> Result<num_rational::BigRational, String> {
    v.as_str().and_then(parse_rational).ok_or_else(|| format!("expected a rational string, found {v}"))
}

/// Every key of the expected object equals the same key of `actual`.
fn matches_fields(actual: &Value, expected: &Value) -> bool {
    expected.as_object().is_some_and(|e| e.iter().all(|(k, v)| actual.get(k) == Some(v)))
}

fn evaluate(check: &str, inputs: &Value, expected: &Value) -> Outcome {
    match check {
        "count-total" | "count-balanced" | "count-dyck" => {
            let (m, n) = (alphabet(inputs)?, int(inputs, "n")? as usize);
            let count = match check {
                "count-total" => count_admissible(m, n),
                "count-balanced" => count_balanced(m, n),
                _ => count_dyck(m, n),
            };
            let actual = Value::String(count.to_string());
            let pass = &actual == expected;
            Ok((actual, pass))
        }
        "profile-table" => {
            let t = profile_counts(alphabet(inputs)?, int(inputs, "n")? as usize);
            let entries: serde_json::Map<String, Value> = t
                .entries()
                .filter(|(_, _, c)| !c.is_zero())
                .map(|(s, b, c)| (format!("{s},{b}"), Value::String(c.to_string())))
                .collect();
            let actual = json!({ "total": t.total().to_string(), "balanced": t.balanced().to_string(), "entries": entries });
            let pass = matches_fields(&actual, expected);
            Ok((actual, pass))
        }
        "balanced-closed-form" => {
            let (m, max_n) = (alphabet(inputs)?, int(inputs, "max_n")? as usize);
            let brute = brute_force_counts(m, max_n).map_err(|e| e.to_string())?;
            let mismatches: Vec<usize> = (0..=max_n / 2)
                .filter(|&k| {
                    let formula = catalan(k) * num_bigint::BigUint::from(m).pow(k as u32);
                    formula != count_balanced(m, 2 * k) || formula != num_bigint::BigUint::from(brute[2 * k].balanced)
                })
                .map(|k| 2 * k)
                .collect();
            let actual = json!({ "mismatches": mismatches.len(), "lengths": mismatches });
            Ok((actual.clone(), matches_fields(&actual, expected)))
        }
        "recurrence-vs-enumeration" => {
            let (m, max_n) = (alphabet(inputs)?, int(inputs, "max_n")? as usize);
            let brute = brute_force_counts(m, max_n).map_err(|e| e.to_string())?;
            let mismatches: Vec<usize> = (0..=max_n)
                .filter(|&n| {
                    let table = profile_counts(m, n);
                    let grouped = table.entries().filter(|(_, _, c)| !c.is_zero()).count() == brute[n].by_profile.len()
                        && brute[n].by_profile.iter().all(|(&(s, b), &c)| table.get(s, b) == c.into());
                    !grouped
                        || table.total() != brute[n].total.into()
                        || count_admissible(m, n) != brute[n].total.into()
                        || count_dyck(m, n) != brute[n].dyck.into()
                })
                .collect();
            let actual = json!({ "mismatches": mismatches.len(), "lengths": mismatches });
            Ok((actual.clone(), matches_fields(&actual, expected)))
        }
        "growth-ratio" => {
            let rows = growth_report(alphabet(inputs)?, int(inputs, "ratio_max_n")? as usize);
            let violations: Vec<usize> = rows.iter().filter(|r| !r.ratio_at_least_m_plus_1).map(|r| r.n).collect();
            let last = rows.last().map(|r| r.log_rate);
            let actual = json!({ "violations": violations.len(), "at": violations, "rows": rows.len(), "final_log_rate": last });
            Ok((actual.clone(), expected.get("violations") == actual.get("violations")))
        }
        "series-bound" => {
            let r = catalan_series(alphabet(inputs)?, int(inputs, "terms")? as usize).map_err(|e| e.to_string())?;
            let gap = r.gap_to_closed_form();
            let pass = r.closed_form == rational(&expected["closed_form"])?
                && gap.abs() < float(expected, "tolerance")?
                && r.strictly_increasing
                && r.below_bound;
            let actual = json!({
                "closed_form": format_rational(&r.closed_form),
                "partial_sum": r.partial_sum_f64(),
                "gap": gap,
                "strictly_increasing": r.strictly_increasing,
                "below_bound": r.below_bound,
            });
            Ok((actual, pass))
        }
        "series-partial-sum" => {
            let r = catalan_series(alphabet(inputs)?, int(inputs, "terms")? as usize).map_err(|e| e.to_string())?;
            let pass = r.partial_sum == rational(expected)?;
            Ok((Value::String(format_rational(&r.partial_sum)), pass))
        }
        "cylinder" => {
            let m = alphabet(inputs)?;
            let value = cylinder_measure(kind(inputs)?, &word(inputs, "word", m)?, m).map_err(|e| e.to_string())?;
            let pass = value.value() == &rational(expected)?;
            Ok((Value::String(value.to_string()), pass))
        }
        "normalization" => {
            let (m, max_n) = (alphabet(inputs)?, int(inputs, "max_n")? as usize);
            let mut failures = Vec::new();
            for n in 0..=max_n {
                let table = profile_counts(m, n);
                for k in MeasureKind::ALL {
                    if !total_mass_of(k, &table).is_one() {
                        failures.push(format!("{k} n={n} (table)"));
                    }
                }
            }
            let enum_len = max_n.min(8);
            let words = admissible_words(m, enum_len);
            for k in MeasureKind::ALL {
                let mu = Measure::new(k, m).map_err(|e| e.to_string())?;
                let mut sums = vec![num_rational::BigRational::zero(); enum_len + 1];
                for w in &words {
                    sums[w.len()] += mu.cylinder(w).map_err(|e| e.to_string())?.into_inner();
                }
                failures.extend(sums.iter().enumerate().filter(|(_, s)| !s.is_one()).map(|(n, _)| format!("{k} n={n} (enumeration)")));
            }
            let actual = json!({ "failures": failures.len(), "first": failures.first() });
            Ok((actual.clone(), expected.get("failures") == actual.get("failures")))
        }
        "consistency" | "mirror-symmetry" | "balanced-law" => {
            let m = alphabet(inputs)?;
            let words = admissible_words(m, int(inputs, "max_len")? as usize);
            let mut failures = Vec::new();
            let mut checked = 0usize;
            match check {
                "consistency" => {
                    for k in MeasureKind::ALL {
                        let mu = Measure::new(k, m).map_err(|e| e.to_string())?;
                        for w in &words {
                            checked += 1;
                            if !consistency_check(&mu, w).map_err(|e| e.to_string())?.pass {
                                failures.push(format!("{k} {w}"));
                            }
                        }
                    }
                }
                "mirror-symmetry" => {
                    let plus = Measure::new(MeasureKind::MuPlus, m).map_err(|e| e.to_string())?;
                    let minus = Measure::new(MeasureKind::MuMinus, m).map_err(|e| e.to_string())?;
                    for w in &words {
                        checked += 1;
                        if minus.cylinder(w).map_err(|e| e.to_string())? != plus.cylinder(&w.mirror()).map_err(|e| e.to_string())? {
                            failures.push(w.to_string());
                        }
                    }
                }
                _ => {
                    let mu = Measure::new(MeasureKind::MuTilde, m).map_err(|e| e.to_string())?;
                    for w in words.iter().filter(|w| is_balanced(w)) {
                        checked += 1;
                        let denom = num_bigint::BigInt::from(2u32).pow(w.len() as u32) * num_bigint::BigInt::from(m).pow(w.len() as u32 / 2);
                        let law = num_rational::BigRational::new(1.into(), denom);
                        if mu.cylinder(w).map_err(|e| e.to_string())?.into_inner() != law {
                            failures.push(w.to_string());
                        }
                    }
                }
            }
            let actual = json!({ "failures": failures.len(), "checked": checked, "first": failures.first() });
            Ok((actual.clone(), expected.get("failures") == actual.get("failures")))
        }
        "ratio-limit" => {
            let r = ratio_limit_check(alphabet(inputs)?, int(inputs, "n")? as usize, int(inputs, "big_n")? as usize)
                .map_err(|e| e.to_string())?;
            let pass = r.limit == rational(&expected["limit"])? && r.relative_error < float(expected, "max_relative_error")?;
            let actual = json!({ "ratio": format_rational(&r.ratio), "limit": format_rational(&r.limit), "relative_error": r.relative_error });
            Ok((actual, pass))
        }
        "invariance" => {
            let r = invariance_suite(
                kind(inputs)?,
                alphabet(inputs)?,
                int(inputs, "max_block")? as usize,
                int(inputs, "max_context")? as usize,
            );
            let first = r.records.iter().find(|rec| !rec.equal);
            let actual = json!({
                "pairs": r.pairs,
                "checks": r.checks,
                "admissibility_violations": r.admissibility_violations,
                "measure_violations": r.measure_violations,
                "first_failure": first,
            });
            Ok((actual.clone(), r.pass && matches_fields(&actual, expected)))
        }
        "prefix-swap-suite" => {
            let r = prefix_swap_suite(alphabet(inputs)?, int(inputs, "max_prefix")? as usize, int(inputs, "max_continuation")? as usize);
            let actual = json!({
                "accepted": r.accepted,
                "rejected": r.rejected,
                "failures": r.failures.len(),
                "first_failure": r.failures.first(),
            });
            Ok((actual.clone(), r.pass && matches_fields(&actual, expected)))
        }
        "prefix-swap" => {
            let m = alphabet(inputs)?;
            let (u, u_prime) = (word(inputs, "u", m)?, word(inputs, "u_prime", m)?);
            let actual = match one_sided_prefix_swap(&u, &u_prime) {
                Ok(s) => {
                    let check = s.check(6);
                    json!({
                        "accepted": true,
                        "stack": s.stack,
                        "nu": s.nu_u.to_string(),
                        "nu_prime": s.nu_u_prime.to_string(),
                        "continuations_preserved": check.pass,
                    })
                }
                Err(PrefixSwapError::StackMismatch { position, left, right }) => {
                    json!({ "accepted": false, "position": position, "stacks": [left, right] })
                }
                Err(e) => return Err(e.to_string()),
            };
            let mut pass = actual["accepted"] == expected["accepted"];
            if actual["accepted"] == true {
                pass &= actual["continuations_preserved"] == true && actual["nu"] == actual["nu_prime"];
                if let Some(nu) = expected.get("nu") {
                    pass &= rational(&actual["nu"])? == rational(nu)?;
                }
            }
            Ok((actual, pass))
        }
        "xi-surgery" => {
            let m = alphabet(inputs)?;
            let image = xi_surgery(&word(inputs, "b", m)?, int(inputs, "i")? as u32, int(inputs, "t")? as usize)
                .map_err(|e| e.to_string())?;
            let actual = Value::String(image.to_string());
            Ok((actual.clone(), &actual == expected))
        }
        "xi-census" => {
            let m = alphabet(inputs)?;
            let (max_k, max_j) = (int(inputs, "max_k")? as usize, int(inputs, "max_j")? as usize);
            let mut censuses = 0;
            let mut failing = Vec::new();
            for k in 1..=max_k {
                for j in 1..=max_j {
                    for i in 1..=m {
                        let c = fiber_census(m, k, j, i).map_err(|e| e.to_string())?;
                        censuses += 1;
                        if !c.pass {
                            failing.push(json!({ "k": k, "j": j, "i": i }));
                        }
                    }
                }
            }
            let actual = json!({ "failing": failing.len(), "censuses": censuses, "first": failing.first() });
            Ok((actual.clone(), expected.get("failing") == actual.get("failing")))
        }
        "extension-sum" => {
            let m = alphabet(inputs)?;
            let fit = inputs.get("fit").and_then(Value::as_array).ok_or("missing `fit`")?;
            let fit = (
                fit.first().and_then(Value::as_u64).ok_or("bad `fit`")? as usize,
                fit.get(1).and_then(Value::as_u64).ok_or("bad `fit`")? as usize,
            );
            let c = extension_sum_check(&word(inputs, "a", m)?, int(inputs, "max_len")? as usize, fit).map_err(|e| e.to_string())?;
            let (lo, hi) = (float(expected, "exponent_min")?, float(expected, "exponent_max")?);
            let pass = Some(c.monotone) == expected["monotone"].as_bool()
                && Some(c.bounded) == expected["bounded"].as_bool()
                && c.decay_exponent.is_some_and(|g| (lo..=hi).contains(&g));
            let last = c.partial_sums.last().map(|(_, s)| format_rational(s));
            let actual = json!({
                "monotone": c.monotone,
                "bounded": c.bounded,
                "decay_exponent": c.decay_exponent,
                "target": format_rational(&c.target),
                "final_partial_sum": last,
            });
            Ok((actual, pass))
        }
        "extension-partial" => {
            let m = alphabet(inputs)?;
            let exts = minimal_balanced_extensions(&word(inputs, "a", m)?, int(inputs, "len")? as usize).map_err(|e| e.to_string())?;
            let mut sum = num_rational::BigRational::zero();
            for e in &exts {
                sum += cylinder_measure(MeasureKind::MuTilde, &e.word, m).map_err(|e| e.to_string())?.into_inner();
            }
            let pass = sum == rational(expected)?;
            Ok((Value::String(format_rational(&sum)), pass))
        }
        "conditional-entropy" => {
            let c = conditional_entropy_sequence(alphabet(inputs)?, int(inputs, "n")? as usize);
            let gap = (c.h - float(expected, "value")?).abs();
            Ok((json!({ "h": c.h, "gap": gap }), gap < float(expected, "tolerance")?))
        }
        "walk-probability" => {
            let max_n = int(inputs, "max_n")? as usize;
            let mismatches: Vec<usize> = (0..=max_n)
                .filter(|&n| {
                    let scaled = nonnegative_walk_probability(n) * num_rational::BigRational::from_integer(num_bigint::BigInt::from(2u32).pow(n as u32));
                    scaled != num_rational::BigRational::from_integer(nonnegative_walk_count_dp(n).into())
                })
                .collect();
            let actual = json!({ "mismatches": mismatches.len(), "at": mismatches });
            Ok((actual.clone(), expected.get("mismatches") == actual.get("mismatches")))
        }
        "block-entropy-value" => {
            let b = block_entropy(kind(inputs)?, alphabet(inputs)?, int(inputs, "n")? as usize);
            let pass = (b.total - float(expected, "value")?).abs() <= float(expected, "tolerance")?;
            Ok((json!({ "total": b.total, "per_symbol": b.per_symbol }), pass))
        }
        "block-entropy-shape" => {
            let seq = block_entropy_sequence(kind(inputs)?, alphabet(inputs)?, int(inputs, "max_n")? as usize);
            let non_increasing = seq.windows(2).all(|w| w[1].per_symbol <= w[0].per_symbol + 1e-12);
            let min = seq.iter().map(|b| b.per_symbol).fold(f64::INFINITY, f64::min);
            let pass = Some(non_increasing) == expected["non_increasing"].as_bool() && min >= float(expected, "lower_bound")?;
            Ok((json!({ "non_increasing": non_increasing, "minimum": min }), pass))
        }
        "block-entropy-gap" => {
            let n = int(inputs, "n")? as usize;
            let b = block_entropy(kind(inputs)?, alphabet(inputs)?, n);
            let gap = b.per_symbol - float(expected, "limit")?;
            Ok((json!({ "per_symbol": b.per_symbol, "gap": gap }), gap.abs() <= float(expected, "max_gap")?))
        }
        "entropy-constants" => {
            let c = entropy_constants(alphabet(inputs)?);
            let tol = float(expected, "tolerance")?;
            let pass = (c.h_tilde - float(expected, "h_tilde")?).abs() <= tol && (c.h_top - float(expected, "h_top")?).abs() <= tol;
            Ok((json!({ "h_tilde": c.h_tilde, "h_top": c.h_top }), pass))
        }
        "tilde-below-top" => {
            let c = entropy_constants(alphabet(inputs)?);
            let actual = Value::Bool(c.tilde_below_top);
            Ok((actual.clone(), &actual == expected))
        }
        "chi-square" => {
            if float(expected, "quantile")? != 0.999 {
                return Err("only the 0.999 quantile is implemented".into());
            }
            let r = empirical_vs_exact(
                kind(inputs)?,
                alphabet(inputs)?,
                int(inputs, "block_len")? as usize,
                int(inputs, "samples")?,
                int(inputs, "seed")?,
                &SamplerConfig::default(),
            )
            .map_err(|e| e.to_string())?;
            let mut pass = r.pass && Some(r.dof as u64) == expected["dof"].as_u64();
            if let Some(z) = expected.get("max_cell_z").and_then(Value::as_f64) {
                pass &= r.max_cell_z <= z;
            }
            let actual = json!({
                "statistic": r.statistic,
                "threshold": r.threshold,
                "dof": r.dof,
                "max_cell_z": r.max_cell_z,
                "inadmissible": r.inadmissible,
                "tail_jumps": r.tail_jumps,
            });
            Ok((actual, pass))
        }
        "admissibility" => {
            let (m, hw, windows, seed) = (alphabet(inputs)?, int(inputs, "half_width")? as i64, int(inputs, "windows")?, int(inputs, "seed")?);
            let config = SamplerConfig::default();
            let mut per_kind = serde_json::Map::new();
            let mut total = 0u64;
            for k in MeasureKind::ALL {
                let (l, r) = if k.is_two_sided() { (-hw, hw) } else { (0, 2 * hw) };
                let bad = (0..windows)
                    .into_par_iter()
                    .map(|i| sample_range(k, m, l, r, derive_seed(seed, i), &config).map(|s| u64::from(reduce(&s.word).is_zero())))
                    .sum::<Result<u64, _>>()
                    .map_err(|e| e.to_string())?;
                total += bad;
                per_kind.insert(k.name().into(), bad.into());
            }
            let actual = json!({ "inadmissible": total, "by_kind": per_kind });
            Ok((actual.clone(), expected.get("inadmissible") == actual.get("inadmissible")))
        }
        "runs" => {
            let hw = int(inputs, "half_width")? as i64;
            let s = sample_range(MeasureKind::MuTilde, alphabet(inputs)?, -hw, hw, int(inputs, "seed")?, &SamplerConfig::default())
                .map_err(|e| e.to_string())?;
            let t = runs_test(&bit_projection(&s.word));
            Ok((json!({ "n": t.n, "runs": t.runs, "z": t.z }), t.z.abs() <= float(expected, "max_abs_z")?))
        }
        "witness-sweep" => {
            let words = admissible_words(alphabet(inputs)?, int(inputs, "max_len")? as usize);
            let mut uncertified = Vec::new();
            for w in &words {
                if !sync_witness(w).map_err(|e| e.to_string())?.certified() {
                    uncertified.push(w.to_string());
                }
            }
            let actual = json!({ "uncertified": uncertified.len(), "words": words.len(), "first": uncertified.first() });
            Ok((actual.clone(), expected.get("uncertified") == actual.get("uncertified")))
        }
        "witness" => {
            let m = alphabet(inputs)?;
            let s = sync_witness(&word(inputs, "w", m)?).map_err(|e| e.to_string())?;
            let actual = json!({ "l": s.l.to_string(), "r": s.r.to_string(), "i": s.i, "j": s.j, "certified": s.certified() });
            Ok((actual.clone(), s.certified() && matches_fields(&actual, expected)))
        }
        "witness-refused" => {
            let m = alphabet(inputs)?;
            let actual = match sync_witness(&word(inputs, "w", m)?) {
                Ok(s) => json!({ "refused": false, "l": s.l.to_string(), "r": s.r.to_string() }),
                Err(e) => json!({ "refused": true, "error": e.to_string() }),
            };
            Ok((actual.clone(), matches_fields(&actual, expected)))
        }
        other => Err(format!("unknown check kind `{other}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::Suite;
    use crate::report::load_fixtures;

    #[test]
    fn every_fixture_names_a_known_check() {
        for suite in Suite::EACH {
            for f in load_fixtures(suite, None).unwrap().checks {
                let probe = evaluate(&f.check, &json!({}), &f.expected);
                assert!(!matches!(&probe, Err(e) if e.starts_with("unknown check")), "{}", f.id);
            }
        }
    }

    #[test]
    fn wrong_expectation_fails() {
        let (actual, pass) = evaluate("count-balanced", &json!({ "m": 1, "n": 6 }), &json!("6")).unwrap();
        assert_eq!(actual, json!("5"));
        assert!(!pass);
    }
}
