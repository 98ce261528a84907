//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string. The plain functions underneath
//! are what the native tests call.

use dycklab::measures::{block_entropy_sequence, conditional_entropy_sequence, entropy_constants, Measure, MeasureKind};
use dycklab::samplers::{sample_range, SamplerConfig};
use dycklab::word_algebra::{height_profile, unmatched_profile};
use dycklab::Word;
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_WINDOW: i64 = 2000;
const MAX_ENTROPY_N: usize = 400;

fn kind(name: &str) -> Result<MeasureKind, String> {
    name.parse().map_err(|e| format!("{e}"))
}

/// Partner index inside the word for every matched symbol.
fn partners(w: &Word) -> Vec<Option<usize>> {
    let mut out = vec![None; w.len()];
    let mut stack = Vec::new();
    for (i, s) in w.symbols().iter().enumerate() {
        if s.is_open() {
            stack.push(i);
        } else if let Some(j) = stack.pop() {
            out[i] = Some(j);
            out[j] = Some(i);
        }
    }
    out
}

pub fn sample_json(measure: &str, m: u32, n: i64, seed: u64) -> Result<String, String> {
    let kind = kind(measure)?;
    if !(1..=MAX_WINDOW).contains(&n) {
        return Err(format!("window must be between 1 and {MAX_WINDOW}"));
    }
    let (left, right) = if kind.is_two_sided() { (-n, n) } else { (0, n - 1) };
    let s = sample_range(kind, m, left, right, seed, &SamplerConfig::default()).map_err(|e| e.to_string())?;
    let symbols: Vec<String> = s.word.symbols().iter().map(|c| c.to_string()).collect();
    Ok(json!({
        "left": s.left,
        "word": s.word,
        "symbols": symbols,
        "heights": height_profile(&s.word).heights,
        "partners": partners(&s.word),
        "extension_depth": s.extension_depth,
        "tail_jumps": s.tail_jumps,
    })
    .to_string())
}

pub fn cylinder_json(word: &str, m: u32) -> Result<String, String> {
    let w = Word::parse(word, m).map_err(|e| e.to_string())?;
    let profile = unmatched_profile(&w).ok();
    let values: Vec<_> = MeasureKind::ALL
        .into_iter()
        .map(|k| {
            let v = Measure::new(k, m).and_then(|mu| mu.cylinder(&w)).map_err(|e| e.to_string())?;
            Ok(json!({ "kind": k, "value": v, "approx": v.to_f64() }))
        })
        .collect::<Result<_, String>>()?;
    Ok(json!({
        "word": w,
        "admissible": profile.is_some(),
        "profile": profile,
        "heights": height_profile(&w).heights,
        "measures": values,
    })
    .to_string())
}

pub fn entropy_json(m: u32, max_n: usize) -> Result<String, String> {
    if m == 0 || !(1..=MAX_ENTROPY_N).contains(&max_n) {
        return Err(format!("need m ≥ 1 and 1 ≤ n ≤ {MAX_ENTROPY_N}"));
    }
    let block: Vec<_> = MeasureKind::ALL
        .into_iter()
        .map(|k| json!({ "kind": k, "rate": block_entropy_sequence(k, m, max_n).iter().map(|b| b.per_symbol).collect::<Vec<_>>() }))
        .collect();
    let conditional: Vec<f64> = (1..=max_n).map(|n| conditional_entropy_sequence(m, n).h).collect();
    let c = entropy_constants(m);
    Ok(json!({ "m": m, "block": block, "conditional": conditional, "h_tilde": c.h_tilde, "h_top": c.h_top }).to_string())
}

#[wasm_bindgen]
pub fn sample(measure: &str, m: u32, n: i32, seed: u32) -> Result<String, JsValue> {
    sample_json(measure, m, n.into(), seed.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn cylinder(word: &str, m: u32) -> Result<String, JsValue> {
    cylinder_json(word, m).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn entropy(m: u32, max_n: u32) -> Result<String, JsValue> {
    entropy_json(m, max_n as usize).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn sample_heights_follow_word() {
        let v: Value = serde_json::from_str(&sample_json("mu-tilde", 2, 10, 3).unwrap()).unwrap();
        let symbols = v["symbols"].as_array().unwrap();
        let heights = v["heights"].as_array().unwrap();
        assert_eq!(symbols.len(), 21);
        assert_eq!(heights.len(), 22);
        for (i, s) in symbols.iter().enumerate() {
            let step = if s.as_str().unwrap().starts_with('a') { 1 } else { -1 };
            assert_eq!(heights[i + 1].as_i64().unwrap() - heights[i].as_i64().unwrap(), step);
        }
    }

    #[test]
    fn partners_are_symmetric_and_same_type() {
        let w = Word::parse("b1a1a2b2b1a1", 2).unwrap();
        let p = partners(&w);
        assert_eq!(p, [None, Some(4), Some(3), Some(2), Some(1), None]);
    }

    #[test]
    fn cylinder_reports_all_kinds() {
        let v: Value = serde_json::from_str(&cylinder_json("a1b1", 2).unwrap()).unwrap();
        assert_eq!(v["admissible"], true);
        let tilde = v["measures"].as_array().unwrap().iter().find(|x| x["kind"] == "mu-tilde").unwrap();
        assert_eq!(tilde["value"], "1/8");
        let v: Value = serde_json::from_str(&cylinder_json("a1b2", 2).unwrap()).unwrap();
        assert_eq!(v["admissible"], false);
        assert!(cylinder_json("a3", 2).is_err());
    }

    #[test]
    fn entropy_curves_have_requested_length() {
        let v: Value = serde_json::from_str(&entropy_json(2, 12).unwrap()).unwrap();
        assert_eq!(v["conditional"].as_array().unwrap().len(), 12);
        for b in v["block"].as_array().unwrap() {
            assert_eq!(b["rate"].as_array().unwrap().len(), 12);
        }
        assert!(entropy_json(2, 0).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(sample_json("mu-zero", 2, 5, 1).is_err());
        assert!(sample_json("nu", 2, 0, 1).is_err());
        assert!(sample_json("nu", 2, MAX_WINDOW + 1, 1).is_err());
    }
}
