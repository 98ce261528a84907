use std::collections::BTreeMap;
use std::io::Write;

use dycklab::counting::{brute_force_counts, count_admissible, count_balanced, count_dyck, profile_counts};
use dycklab::holonomies::{block_swap_admissibility, invariance_suite, one_sided_prefix_swap, sync_witness, xi_surgery, PrefixSwapError};
use dycklab::measures::{
    block_entropy_sequence, conditional_entropy_given_past, conditional_entropy_sequence, consistency_check, entropy_constants,
    Measure, MeasureKind,
};
use dycklab::numeric::format_rational;
use dycklab::samplers::{derive_seed, sample_range, SamplerConfig};
use dycklab::Word;
use rayon::prelude::*;
use serde_json::json;

use crate::args::{CountArgs, EntropyCommand, Format, HolonomyCommand, MeasureArgs, SampleArgs, Suite, VerifyArgs, WitnessArgs};
use crate::checks;
use crate::report::{load_fixtures, plan, Overrides, Report};
use crate::Failure;

fn parse_word(text: &str, m: u32) -> Result<Word, Failure> {
    Word::parse(text, m).map_err(|e| Failure::Usage(format!("word `{text}`: {e}")))
}

fn print_json(value: &impl serde::Serialize) {
    out!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

pub fn count(a: CountArgs) -> Result<(), Failure> {
    if a.m == 0 {
        return Err(Failure::Usage("--m must be at least 1".into()));
    }
    if a.table {
        let table = profile_counts(a.m, a.n);
        if a.brute {
            let brute = brute_force_counts(a.m, a.n).map_err(|e| Failure::Usage(e.to_string()))?;
            let agree = brute[a.n].by_profile.iter().all(|(&(s, b), &c)| table.get(s, b) == c.into())
                && table.total() == brute[a.n].total.into();
            if !agree {
                return Err(Failure::Check(format!("profile table disagrees with enumeration at m={} n={}", a.m, a.n)));
            }
        }
        match a.format {
            Format::Csv => out_raw!("{}", table.to_csv()),
            Format::Json => print_json(&table.to_json()),
            Format::Text => {
                for (s, b, c) in table.entries() {
                    if !num_traits::Zero::is_zero(c) {
                        out!("s={s} b={b} {c}");
                    }
                }
                out!("total {}", table.total());
            }
        }
        return Ok(());
    }
    let (what, value) = if a.balanced {
        ("balanced", count_balanced(a.m, a.n))
    } else if a.dyck {
        ("dyck", count_dyck(a.m, a.n))
    } else {
        ("admissible", count_admissible(a.m, a.n))
    };
    if a.brute {
        let brute = brute_force_counts(a.m, a.n).map_err(|e| Failure::Usage(e.to_string()))?;
        let c = &brute[a.n];
        let by_enum = match what {
            "balanced" => c.balanced,
            "dyck" => c.dyck,
            _ => c.total,
        };
        if value != by_enum.into() {
            return Err(Failure::Check(format!("{what} count {value} but enumeration finds {by_enum}")));
        }
    }
    match a.format {
        Format::Json => print_json(&json!({ "m": a.m, "n": a.n, "count": what, "value": value.to_string() })),
        Format::Csv => out!("m,n,{what}\n{},{},{value}", a.m, a.n),
        Format::Text => out!("{value}"),
    }
    Ok(())
}

pub fn measure(a: MeasureArgs) -> Result<(), Failure> {
    let mu = Measure::new(a.measure, a.m).map_err(|e| Failure::Usage(e.to_string()))?;
    let w = parse_word(&a.word, a.m)?;
    let value = mu.cylinder(&w).map_err(|e| Failure::Usage(e.to_string()))?;
    let consistency = if a.consistency { Some(consistency_check(&mu, &w).map_err(|e| Failure::Usage(e.to_string()))?) } else { None };
    match a.format {
        Format::Json => {
            let mut out = json!({ "kind": a.measure, "word": w, "m": a.m, "value": value });
            if let Some(c) = &consistency {
                out["consistency"] = serde_json::to_value(c).expect("serializable");
            }
            print_json(&out);
        }
        Format::Csv => out!("kind,word,m,value\n{},{},{},{}", a.measure, w, a.m, value),
        Format::Text => {
            out!("{value}");
            if let Some(c) = &consistency {
                let left = c.left_sum.as_ref().map(|s| s.to_string()).unwrap_or_else(|| "n/a".into());
                out!("right sum {}, left sum {left}: {}", c.right_sum, if c.pass { "consistent" } else { "INCONSISTENT" });
            }
        }
    }
    match consistency {
        Some(c) if !c.pass => Err(Failure::Check(format!("{} is not consistent at {w}", a.measure))),
        _ => Ok(()),
    }
}

pub fn entropy(cmd: EntropyCommand) -> Result<(), Failure> {
    match cmd {
        EntropyCommand::Constants { m, format } => {
            if m == 0 {
                return Err(Failure::Usage("--m must be at least 1".into()));
            }
            let c = entropy_constants(m);
            match format {
                Format::Json => print_json(&c),
                Format::Csv => out!("m,h_tilde,h_top\n{m},{},{}", c.h_tilde, c.h_top),
                Format::Text => out!("h_tilde {:.12}\nh_top   {:.12}", c.h_tilde, c.h_top),
            }
        }
        EntropyCommand::Conditional { m, n, past, curve, format } => {
            if m == 0 {
                return Err(Failure::Usage("--m must be at least 1".into()));
            }
            if let Some(past) = past {
                let w = parse_word(&past, m)?;
                let h = conditional_entropy_given_past(m, &w);
                match format {
                    Format::Json => print_json(&json!({ "m": m, "past": w, "h": h })),
                    _ => out!("{h}"),
                }
                return Ok(());
            }
            let limit = entropy_constants(m).h_tilde;
            let ns: Vec<usize> = if curve { (1..=n).collect() } else { vec![n] };
            let rows: Vec<_> = ns.par_iter().map(|&k| conditional_entropy_sequence(m, k)).collect();
            match format {
                Format::Json => print_json(
                    &rows.iter().map(|c| json!({ "n": c.n, "q": format_rational(&c.q), "h": c.h, "gap": c.h - limit })).collect::<Vec<_>>(),
                ),
                Format::Csv => {
                    let mut out = std::io::stdout().lock();
                    let _ = writeln!(out, "n,q,h,gap");
                    for c in &rows {
                        let _ = writeln!(out, "{},{},{},{}", c.n, dycklab::numeric::rational_to_f64(&c.q), c.h, c.h - limit);
                    }
                }
                Format::Text => {
                    for c in &rows {
                        out!("n={} h={:.12} gap={:.3e}", c.n, c.h, c.h - limit);
                    }
                }
            }
        }
        EntropyCommand::Block { measure, m, max_n, format } => {
            if m == 0 {
                return Err(Failure::Usage("--m must be at least 1".into()));
            }
            let seq = block_entropy_sequence(measure, m, max_n);
            match format {
                Format::Json => print_json(&seq),
                Format::Csv => {
                    let mut out = std::io::stdout().lock();
                    let _ = writeln!(out, "n,H_n,H_n_over_n");
                    for b in &seq {
                        let _ = writeln!(out, "{},{},{}", b.n, b.total, b.per_symbol);
                    }
                }
                Format::Text => {
                    for b in &seq {
                        out!("n={:<4} H={:.10} H/n={:.10}", b.n, b.total, b.per_symbol);
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn sample(a: SampleArgs) -> Result<(), Failure> {
    if a.window < 0 || (!a.measure.is_two_sided() && a.window == 0) {
        return Err(Failure::Usage("--window must be positive".into()));
    }
    let (left, right) = if a.measure.is_two_sided() { (-a.window, a.window) } else { (0, a.window - 1) };
    let config = SamplerConfig { budget: a.budget.unwrap_or(SamplerConfig::default().budget), ..SamplerConfig::default() };
    let samples = (0..a.count)
        .into_par_iter()
        .map(|k| sample_range(a.measure, a.m, left, right, derive_seed(a.seed, k), &config))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Check(e.to_string()))?;
    match a.format {
        Format::Json => print_json(
            &samples
                .iter()
                .map(|s| json!({ "word": s.word, "seed": s.seed, "extension_depth": s.extension_depth }))
                .collect::<Vec<_>>(),
        ),
        Format::Csv => {
            out!("seed,left,right,extension_depth,word");
            for s in &samples {
                out!("{},{},{},{},{}", s.seed, s.left, s.right, s.extension_depth, s.word);
            }
        }
        Format::Text => {
            for s in &samples {
                out!("{}", s.word);
            }
        }
    }
    Ok(())
}

pub fn holonomy(cmd: HolonomyCommand) -> Result<(), Failure> {
    match cmd {
        HolonomyCommand::Swap { m, u, w, w_prime, v } => {
            let (u, w, w_prime, v) = (parse_word(&u, m)?, parse_word(&w, m)?, parse_word(&w_prime, m)?, parse_word(&v, m)?);
            let check = block_swap_admissibility(&u, &w, &w_prime, &v).map_err(|e| Failure::Usage(e.to_string()))?;
            let lhs = Word::join(&[&u, &w, &v]).expect("same alphabet");
            let rhs = Word::join(&[&u, &w_prime, &v]).expect("same alphabet");
            let mut equal = true;
            let measures: Vec<_> = MeasureKind::ALL
                .into_iter()
                .map(|k| {
                    let mu = Measure::new(k, m).expect("m ≥ 1");
                    let (a, b) = (mu.cylinder(&lhs).expect("checked"), mu.cylinder(&rhs).expect("checked"));
                    equal &= a == b;
                    json!({ "kind": k, "lhs": a, "rhs": b, "equal": a == b })
                })
                .collect();
            print_json(&json!({ "lhs": lhs, "rhs": rhs, "admissibility": check, "measures": measures }));
            if !(check.pass && equal) {
                return Err(Failure::Check("swap changes admissibility or a measure".into()));
            }
        }
        HolonomyCommand::Suite { measure, m, max_block, max_context } => {
            if m == 0 {
                return Err(Failure::Usage("--m must be at least 1".into()));
            }
            let r = invariance_suite(measure, m, max_block, max_context);
            let records: Vec<_> = r
                .records
                .iter()
                .map(|rec| match &rec.first_violation {
                    Some(v) => json!({ "pair": rec.pair, "context": v.context, "lhs": v.lhs, "rhs": v.rhs, "equal": false }),
                    None => json!({ "pair": rec.pair, "context": ["", ""], "lhs": rec.lhs, "rhs": rec.rhs, "equal": rec.equal }),
                })
                .collect();
            print_json(&records);
            if !r.pass {
                return Err(Failure::Check(format!(
                    "{} admissibility and {} measure violations",
                    r.admissibility_violations, r.measure_violations
                )));
            }
        }
        HolonomyCommand::Prefix { m, u, u_prime, max_continuation } => {
            let (u, u_prime) = (parse_word(&u, m)?, parse_word(&u_prime, m)?);
            match one_sided_prefix_swap(&u, &u_prime) {
                Ok(s) => {
                    let check = s.check(max_continuation);
                    print_json(&json!({ "accepted": true, "swap": s, "continuations": check }));
                    if !check.pass {
                        return Err(Failure::Check("prefix swap broke a continuation".into()));
                    }
                }
                Err(PrefixSwapError::StackMismatch { position, left, right }) => {
                    print_json(&json!({ "accepted": false, "position": position, "stacks": [left, right] }));
                }
                Err(e) => return Err(Failure::Usage(e.to_string())),
            }
        }
        HolonomyCommand::Xi { m, b, i, t } => {
            let image = xi_surgery(&parse_word(&b, m)?, i, t).map_err(|e| Failure::Usage(e.to_string()))?;
            out!("{image}");
        }
    }
    Ok(())
}

pub fn witness(a: WitnessArgs) -> Result<(), Failure> {
    let w = parse_word(&a.word, a.m)?;
    let s = sync_witness(&w).map_err(|e| Failure::Usage(e.to_string()))?;
    let left = Word::join(&[&s.l, &w]).expect("same alphabet");
    let right = Word::join(&[&w, &s.r]).expect("same alphabet");
    match a.format {
        Format::Json => print_json(&json!({ "witness": s, "certified": s.certified() })),
        _ => {
            out!("l = {:?}, r = {:?}, i = {}, j = {}", s.l.to_string(), s.r.to_string(), s.i, s.j);
            out!("a{}·{left} admissible: {}", s.i, s.left_admissible);
            out!("{right}·b{} admissible: {}", s.j, s.right_admissible);
            out!("a{}·{left}{}·b{} inadmissible: {}", s.i, s.r, s.j, s.joined_inadmissible);
        }
    }
    if !s.certified() {
        return Err(Failure::Check(format!("witness for {w} is not certified")));
    }
    Ok(())
}

pub fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let suites: Vec<Suite> = if a.suite == Suite::All { Suite::EACH.to_vec() } else { vec![a.suite] };
    let overrides = Overrides { m: a.m.clone(), max_n: a.max_n, samples: a.samples, seed: a.seed };
    let mut planned = Vec::new();
    for suite in suites {
        let file = load_fixtures(suite, a.fixtures.as_deref()).map_err(Failure::Usage)?;
        planned.extend(plan(&file, &overrides));
    }
    let seeds: BTreeMap<String, u64> =
        planned.iter().filter_map(|p| p.inputs.get("seed").and_then(|s| s.as_u64()).map(|s| (p.id.clone(), s))).collect();
    let jobs = a.jobs.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)).max(1);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Failure::Usage(e.to_string()))?;
    let records: Vec<_> = pool.install(|| planned.par_iter().map(checks::run).collect());
    let report = Report::new(a.suite.name(), records, seeds);
    let text = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
    match &a.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        None => out_raw!("{text}"),
    }
    let failed: Vec<_> = report.records.iter().filter(|r| !r.pass).collect();
    if failed.is_empty() {
        return Ok(());
    }
    for r in &failed {
        eprintln!("FAILED {}", serde_json::to_string(r).expect("serializable"));
    }
    Err(Failure::Check(format!("{} of {} checks failed", failed.len(), report.summary.checks)))
}
