//! Fixture files, check records and the versioned JSON report.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::args::Suite;

pub const SCHEMA: &str = "dycklab-report/1";

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Stated in the published result.
    Published,
    /// Immediate from the definitions.
    Trivial,
    /// Worked out independently (by hand or by an oracle run).
    Derived,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub id: String,
    pub check: String,
    /// Fixed inputs of a single check.
    #[serde(default)]
    pub inputs: Option<Value>,
    /// Inputs of a sweep; `m` is a list and each entry becomes one check.
    #[serde(default)]
    pub scope: Option<Value>,
    pub expected: Value,
    pub provenance: Provenance,
    pub reference: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureFile {
    pub suite: String,
    pub checks: Vec<Fixture>,
}

fn builtin(suite: Suite) -> &'static str {
    match suite {
        Suite::Counting => include_str!("../fixtures/counting.json"),
        Suite::Series => include_str!("../fixtures/series.json"),
        Suite::Measures => include_str!("../fixtures/measures.json"),
        Suite::Holonomy => include_str!("../fixtures/holonomy.json"),
        Suite::Entropy => include_str!("../fixtures/entropy.json"),
        Suite::Sampling => include_str!("../fixtures/sampling.json"),
        Suite::Sync => include_str!("../fixtures/sync.json"),
        Suite::All => unreachable!("`all` has no fixture file"),
    }
}

pub fn load_fixtures(suite: Suite, dir: Option<&Path>) -> Result<FixtureFile, String> {
    let text = match dir {
        Some(dir) => {
            let path = dir.join(format!("{}.json", suite.name()));
            std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => builtin(suite).to_string(),
    };
    let file: FixtureFile = serde_json::from_str(&text).map_err(|e| format!("{} fixtures: {e}", suite.name()))?;
    if file.suite != suite.name() {
        return Err(format!("fixture file for `{}` declares suite `{}`", suite.name(), file.suite));
    }
    for f in &file.checks {
        if f.inputs.is_some() == f.scope.is_some() {
            return Err(format!("fixture {}: exactly one of `inputs` and `scope` is required", f.id));
        }
    }
    Ok(file)
}

/// Command-line overrides applied to fixture inputs.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub m: Vec<u32>,
    pub max_n: Option<usize>,
    pub samples: Option<u64>,
    pub seed: u64,
}

/// One runnable check: a fixture together with concrete inputs.
#[derive(Debug, Clone)]
pub struct Planned {
    pub id: String,
    pub fixture: Fixture,
    pub inputs: Value,
}

fn input_m(inputs: &Value) -> Option<u32> {
    inputs.get("m").and_then(Value::as_u64).map(|m| m as u32)
}

fn apply_overrides(check: &str, mut inputs: Map<String, Value>, o: &Overrides) -> Map<String, Value> {
    if crate::checks::needs_seed(check) {
        inputs.insert("seed".into(), o.seed.into());
    }
    if let (Some(n), Some(v)) = (o.max_n, inputs.get_mut("max_n")) {
        *v = n.into();
    }
    if let (Some(s), Some(v)) = (o.samples, inputs.get_mut("samples")) {
        *v = s.into();
    }
    inputs
}

/// Expands sweeps over their alphabet sizes and filters fixed checks by
/// the requested sizes.
pub fn plan(file: &FixtureFile, o: &Overrides) -> Vec<Planned> {
    let mut out = Vec::new();
    for f in &file.checks {
        if let Some(inputs) = &f.inputs {
            if !o.m.is_empty() && input_m(inputs).is_some_and(|m| !o.m.contains(&m)) {
                continue;
            }
            let inputs = apply_overrides(&f.check, inputs.as_object().cloned().unwrap_or_default(), o);
            out.push(Planned { id: f.id.clone(), fixture: f.clone(), inputs: Value::Object(inputs) });
            continue;
        }
        let scope = f.scope.as_ref().and_then(Value::as_object).cloned().unwrap_or_default();
        let ms: Vec<u32> = if o.m.is_empty() {
            scope.get("m").and_then(Value::as_array).map(|a| a.iter().filter_map(Value::as_u64).map(|m| m as u32).collect()).unwrap_or_default()
        } else {
            o.m.clone()
        };
        for m in ms {
            let mut inputs = scope.clone();
            inputs.insert("m".into(), m.into());
            let inputs = apply_overrides(&f.check, inputs, o);
            out.push(Planned { id: format!("{}/m{m}", f.id), fixture: f.clone(), inputs: Value::Object(inputs) });
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub id: String,
    pub check: String,
    pub provenance: Provenance,
    pub reference: String,
    pub inputs: Value,
    pub expected: Value,
    pub actual: Value,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Stamp {
    pub dycklab: &'static str,
    pub rustc: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub suite: String,
    pub version: Stamp,
    pub seeds: BTreeMap<String, u64>,
    pub summary: Summary,
    pub records: Vec<Record>,
    /// The only field that differs between identical runs.
    pub generated_unix_seconds: u64,
}

impl Report {
    pub fn new(suite: &str, mut records: Vec<Record>, seeds: BTreeMap<String, u64>) -> Self {
        records.sort_by(|a, b| a.id.cmp(&b.id));
        let passed = records.iter().filter(|r| r.pass).count();
        let generated_unix_seconds =
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Report {
            schema: SCHEMA,
            suite: suite.to_string(),
            version: Stamp { dycklab: env!("CARGO_PKG_VERSION"), rustc: env!("DYCKLAB_RUSTC_VERSION") },
            seeds,
            summary: Summary { checks: records.len(), passed, failed: records.len() - passed },
            records,
            generated_unix_seconds,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_fixtures_parse_and_have_unique_ids() {
        let mut ids = std::collections::HashSet::new();
        for suite in Suite::EACH {
            let file = load_fixtures(suite, None).unwrap();
            for f in &file.checks {
                assert!(f.id.starts_with(suite.name()), "{}", f.id);
                assert!(ids.insert(f.id.clone()), "duplicate {}", f.id);
            }
        }
    }

    #[test]
    fn sweeps_expand_per_alphabet_size() {
        let file = load_fixtures(Suite::Counting, None).unwrap();
        let all = plan(&file, &Overrides::default());
        assert!(all.iter().any(|p| p.id == "counting.growth-ratio/m3"));
        let only2 = plan(&file, &Overrides { m: vec![2], max_n: Some(10), ..Default::default() });
        assert!(only2.iter().all(|p| p.inputs["m"] == 2));
        let sweep = only2.iter().find(|p| p.id == "counting.recurrence-vs-enumeration/m2").unwrap();
        assert_eq!(sweep.inputs["max_n"], 10);
    }
}
