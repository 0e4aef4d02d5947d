//! Browser bindings. Every export takes `.sub` text and returns a JSON
//! document: either the result object or `{"error": "..."}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use substrata::*;

fn respond(r: std::result::Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn parse(text: &str) -> std::result::Result<SubFile, String> {
    SubFile::parse(text).map_err(|e| e.to_string())
}

fn word(text: &str, alphabet: &[Letter]) -> std::result::Result<Word, String> {
    let t = text.trim();
    if t.is_empty() || t == "ε" {
        return Ok(Word::empty());
    }
    if alphabet.iter().any(|a| a.as_str() == t) {
        return Ok(Word::from_letters(vec![Letter::new(t).map_err(|e| e.to_string())?]));
    }
    if t.contains(char::is_whitespace) {
        return Word::parse(t).map_err(|e| e.to_string());
    }
    Ok(Word::from_chars(t))
}

fn fixpoint_impl(sub: &str, length: usize) -> std::result::Result<Value, String> {
    let spec = SubstitutiveSpec::from_sub_file(&parse(sub)?).map_err(|e| e.to_string())?;
    let prefix = spec.fixpoint_prefix(length).map_err(|e| e.to_string())?;
    let complexity: Vec<usize> = (1..=8)
        .map(|n| spec.factor_set(n).map(|f| f.truncate(n).len() - f.truncate(n - 1).len()))
        .collect::<Result<_>>()
        .map_err(|e| e.to_string())?;
    Ok(json!({ "prefix": prefix.compact(), "complexity": complexity }))
}

fn occurrences_impl(sub: &str, v: &str, u: &str, w: &str, limit: u64) -> std::result::Result<Value, String> {
    let spec = AutomaticSpec::from_sub_file(&parse(sub)?).map_err(|e| e.to_string())?;
    let outs = spec.spec.outputs().to_vec();
    let (v, u, w) = (word(v, &outs)?, word(u, &outs)?, word(w, &outs)?);
    let set = occurrence_set(&spec, &v, &u, &w).map_err(|e| e.to_string())?;
    let members: Vec<u64> = evaluate(&set, limit).into_iter().collect();
    Ok(json!({ "set": set.to_string(), "members": members, "limit": limit }))
}

fn common_factors_impl(x: &str, y: &str, depth: usize) -> std::result::Result<Value, String> {
    let xs = AutomaticSpec::from_sub_file(&parse(x)?).map_err(|e| e.to_string())?;
    let ys = AutomaticSpec::from_sub_file(&parse(y)?).map_err(|e| e.to_string())?;
    let rep = analyze_common_factors(&xs, &ys, depth).map_err(|e| e.to_string())?;
    let common = common_factors_upto(&xs.spec, &ys.spec, depth).map_err(|e| e.to_string())?;
    let certified = match rep.result.certification {
        Certification::Certified { .. } => true,
        Certification::Conjectured { .. } => false,
    };
    Ok(json!({
        "triples": rep.result.triples.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "certified": certified,
        "matches_brute_force": rep.result.language(depth) == common,
    }))
}

/// Prefix of the coded fixed point, plus factor complexity for lengths 1 to 8.
#[wasm_bindgen]
pub fn fixpoint(sub: &str, length: usize) -> String {
    respond(fixpoint_impl(sub, length))
}

/// Occurrence set of `v uⁿ w`, with its members up to `limit`.
#[wasm_bindgen]
pub fn occurrences(sub: &str, v: &str, u: &str, w: &str, limit: u64) -> String {
    respond(occurrences_impl(sub, v, u, w, limit))
}

#[wasm_bindgen]
pub fn common_factors(x: &str, y: &str, depth: usize) -> String {
    respond(common_factors_impl(x, y, depth))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TM: &str = "alphabet: 0 1\nrule 0 -> 0 1\nrule 1 -> 1 0\nseed: 0\nbase: 2\n";
    const X: &str = "alphabet: 0 1 2\nrule 0 -> 0 1 2\nrule 1 -> 1 1 1\nrule 2 -> 2 2 2\nseed: 0\nbase: 3\n";
    const Y: &str = "alphabet: 0 1 2\nrule 0 -> 0 1 2 1\nrule 1 -> 1 1 1 1\nrule 2 -> 2 2 2 2\nseed: 0\nbase: 4\n";

    fn get(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn prefix_and_complexity() {
        let v = get(fixpoint(TM, 8));
        assert_eq!(v["prefix"], "01101001");
        assert_eq!(v["complexity"], json!([2, 4, 6, 10, 12, 16, 20, 22]));
    }

    #[test]
    fn occurrence_members() {
        let v = get(occurrences(X, "0", "1", "2", 10));
        assert_eq!(v["set"], "{1}");
        assert_eq!(v["members"], json!([1]));
    }

    #[test]
    fn common_factors_of_runs() {
        let v = get(common_factors(X, Y, 10));
        assert_eq!(v["triples"], json!(["^w(1)(2)^w", "^w(2)(1)^w", "^w()012111()^w"]));
        assert_eq!(v["certified"], true);
        assert_eq!(v["matches_brute_force"], true);
    }

    #[test]
    fn errors_are_reported() {
        assert!(get(fixpoint("rule 0 -> 1", 4))["error"].is_string());
        assert!(get(common_factors(TM, TM, 4))["error"].is_string());
    }
}
