use dycklab_web::{cylinder_json, entropy_json, sample_json};
use serde_json::Value;

#[test]
fn every_kind_samples_reproducibly() {
    for kind in ["mu-tilde", "mu-plus", "mu-minus", "nu"] {
        let a = sample_json(kind, 3, 25, 9).unwrap();
        assert_eq!(a, sample_json(kind, 3, 25, 9).unwrap());
        let v: Value = serde_json::from_str(&a).unwrap();
        let partners = v["partners"].as_array().unwrap();
        for (i, p) in partners.iter().enumerate() {
            if let Some(j) = p.as_u64() {
                assert_eq!(partners[j as usize].as_u64(), Some(i as u64));
            }
        }
    }
}

#[test]
fn cylinder_values_sum_to_one_over_single_symbols() {
    for kind in ["mu-tilde", "mu-plus", "mu-minus", "nu"] {
        let total: f64 = ["a1", "a2", "b1", "b2"]
            .iter()
            .map(|w| {
                let v: Value = serde_json::from_str(&cylinder_json(w, 2).unwrap()).unwrap();
                v["measures"].as_array().unwrap().iter().find(|x| x["kind"] == kind).unwrap()["approx"].as_f64().unwrap()
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-12, "{kind}");
    }
}

#[test]
fn entropy_rates_approach_the_constants() {
    let v: Value = serde_json::from_str(&entropy_json(2, 200).unwrap()).unwrap();
    let plus = v["block"].as_array().unwrap().iter().find(|b| b["kind"] == "mu-plus").unwrap();
    let last = plus["rate"].as_array().unwrap().last().unwrap().as_f64().unwrap();
    assert!((last - v["h_top"].as_f64().unwrap()).abs() < 0.02);
    let h = v["conditional"].as_array().unwrap().last().unwrap().as_f64().unwrap();
    assert!((h - v["h_tilde"].as_f64().unwrap()).abs() < 0.1);
}
