use std::io::Write as _;
use std::path::Path;
use std::result::Result;
use std::time::Instant;

use serde_json::{json, Value};

use substrata::language::subshift_language;
use substrata::*;

use crate::report::{read_input, Failure, Input, RunReport, EXIT_MISMATCH, EXIT_UNCERTIFIED};
use crate::{Cli, Command};

fn sub_file(path: &Path, inputs: &mut Vec<Input>) -> Result<SubFile, Failure> {
    let text = read_input(path, inputs)?;
    SubFile::parse(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn triples_file(path: &Path, inputs: &mut Vec<Input>) -> Result<Vec<BiWordTriple>, Failure> {
    let text = read_input(path, inputs)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap();
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            BiWordTriple::parse_bar(line)
                .map_err(|e| Failure::input(format!("{}:{}: {e}", path.display(), i + 1)))?,
        );
    }
    Ok(out)
}

/// A word on the command line: a single letter of the alphabet, a
/// whitespace-separated token list, or one letter per character.
fn cli_word(text: &str, alphabet: &[Letter]) -> Result<Word, Failure> {
    let t = text.trim();
    if t.is_empty() || t == "ε" {
        return Ok(Word::empty());
    }
    if alphabet.iter().any(|a| a.as_str() == t) {
        return Ok(Word::from_letters(vec![Letter::new(t).map_err(Failure::from)?]));
    }
    if t.contains(char::is_whitespace) {
        return Word::parse(t).map_err(Failure::from);
    }
    Ok(Word::from_chars(t))
}

fn letters(phi: &Substitution, ix: &[usize]) -> Vec<String> {
    ix.iter().map(|&i| phi.letter(i).to_string()).collect()
}

fn transitivity(v: &TransitivityVerdict) -> String {
    match v {
        TransitivityVerdict::CertifiedTransitive { witness } => format!("transitive (generated by {witness})"),
        TransitivityVerdict::CertifiedNotTransitive => "not transitive".into(),
        TransitivityVerdict::Unknown { depth_checked } => format!("unknown (checked to depth {depth_checked})"),
    }
}

fn periodicity(p: &Periodicity) -> String {
    match p {
        Periodicity::Certified { preperiod, period } => {
            format!("eventually periodic: preperiod {preperiod}, period {}", period.compact())
        }
        Periodicity::PresumedAperiodic { n, complexity } => {
            format!("presumed aperiodic (complexity {complexity} at length {n})")
        }
    }
}

fn certification(c: &Certification) -> String {
    match c {
        Certification::Certified { depth } => format!("certified (depth {depth})"),
        Certification::Conjectured { depth, verified_to } => {
            format!("conjectured (depth {depth}, verified to {verified_to})")
        }
    }
}

fn analyze(phi: &Substitution) -> Result<Value, Failure> {
    let mut out = json!({
        "letters": phi.alphabet().iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        "growing": phi.is_growing(),
        "bounded_letters": letters(phi, &phi.bounded_letters()),
        "constant_length": phi.constant_length(),
    });
    if !phi.is_growing() {
        return Ok(out);
    }
    let cls = classify_letters(phi)?;
    let first = is_idempotent(phi)?;
    let o = out.as_object_mut().unwrap();
    o.insert("idempotent_exponent".into(), json!(idempotent_exponent(phi)?));
    o.insert(
        "idempotency_of_phi".into(),
        json!({
            "property1": first.property1,
            "property2": first.property2,
            "property3": first.property3,
            "property4": first.property4,
        }),
    );
    o.insert(
        "classes".into(),
        json!(cls.classes.iter().map(|c| letters(phi, c).join(" ")).collect::<Vec<_>>()),
    );
    o.insert("minimal_letters".into(), json!(letters(phi, &cls.minimal)));
    o.insert("prolongable".into(), json!(letters(phi, &cls.prolongable)));
    o.insert("backwards_prolongable".into(), json!(letters(phi, &cls.backwards_prolongable)));
    o.insert("very_ample".into(), json!(letters(phi, &cls.very_ample)));
    o.insert("transitivity".into(), json!(transitivity(&is_transitive(phi)?)));
    Ok(out)
}

fn subsystems(phi: &Substitution) -> Result<Value, Failure> {
    let minimal: Vec<Value> = minimal_subsystems(phi)?
        .iter()
        .map(|m| {
            json!({
                "class": m.class.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" "),
                "periodicity": periodicity(&m.periodicity),
            })
        })
        .collect();
    let generators: Vec<Value> = transitive_generators(phi)?
        .iter()
        .map(|d| {
            let prefix = generator_prefix(d, phi, 16).map(|w| w.compact()).ok();
            json!({ "generator": d.to_string(), "prefix": prefix })
        })
        .collect();
    Ok(json!({
        "minimal_subsystems": minimal,
        "transitivity": transitivity(&is_transitive(phi)?),
        "generators": generators,
    }))
}

fn set_payload(s: &OccurrenceSet) -> Value {
    json!({
        "set": s.to_string(),
        "finite": s.is_finite(),
        "structure": serde_json::to_value(s).unwrap(),
    })
}

// A closed pipe downstream is not an error worth a panic.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

pub fn run(cli: &Cli) -> Result<u8, Failure> {
    let start = Instant::now();
    let mut inputs = Vec::new();
    let mut report = RunReport {
        command: String::new(),
        inputs: Vec::new(),
        result: Value::Null,
        verification: Vec::new(),
        elapsed_ms: 0,
    };
    let mut exit = 0;
    match &cli.command {
        Command::Analyze { file } => {
            report.command = "analyze".into();
            let f = sub_file(file, &mut inputs)?;
            report.result = analyze(&f.phi)?;
        }
        Command::Fixpoint { file, length } => {
            report.command = "fixpoint".into();
            let spec = SubstitutiveSpec::from_sub_file(&sub_file(file, &mut inputs)?)?;
            report.result = json!({
                "seed": spec.seed_letter().to_string(),
                "length": length,
                "prefix": spec.fixpoint_prefix(*length)?.compact(),
            });
        }
        Command::Factors { file, maxlen, subshift } => {
            report.command = "factors".into();
            let f = sub_file(file, &mut inputs)?;
            let words: Vec<Word> = if *subshift {
                let all: Vec<usize> = (0..f.phi.size()).collect();
                subshift_language(&f.phi, &all, *maxlen)?.iter().map(|w| f.phi.decode(w)).collect()
            } else {
                let spec = SubstitutiveSpec::from_sub_file(&f)?;
                spec.factor_set(*maxlen)?.sorted().into_iter().cloned().collect()
            };
            let strata: Vec<Value> = (1..=*maxlen)
                .map(|n| {
                    let ws: Vec<String> = words.iter().filter(|w| w.len() == n).map(Word::compact).collect();
                    json!({ "length": n, "count": ws.len(), "words": ws })
                })
                .collect();
            report.result = json!({
                "language": if *subshift { "subshift" } else { "fixed point" },
                "factors": strata,
            });
        }
        Command::Subsystems { file } => {
            report.command = "subsystems".into();
            let f = sub_file(file, &mut inputs)?;
            report.result = subsystems(&f.phi)?;
        }
        Command::Occurrences {
            file,
            v,
            u,
            w,
            verify,
            against,
            bound,
        } => {
            report.command = "occurrences".into();
            let spec = AutomaticSpec::from_sub_file(&sub_file(file, &mut inputs)?)?;
            let outs = spec.spec.outputs().to_vec();
            let (v, u, w) = (cli_word(v, &outs)?, cli_word(u, &outs)?, cli_word(w, &outs)?);
            let s = occurrence_set(&spec, &v, &u, &w)?;
            let mut result = json!({
                "v": v.compact(),
                "u": u.compact(),
                "w": w.compact(),
                "base": spec.base,
                "occurrences": set_payload(&s),
            });
            if let Some(n) = verify {
                let brute = occurrence_brute(&spec.spec, &v, &u, &w, *n, None)?;
                let closed = evaluate(&s, *n);
                let diff: Vec<u64> = closed.symmetric_difference(&brute).copied().collect();
                report.check(
                    format!("closed form against brute force on [0, {n}]"),
                    diff.is_empty(),
                    Some(format!("differ at {diff:?}")),
                );
            }
            if let Some(path) = against {
                let other = AutomaticSpec::from_sub_file(&sub_file(path, &mut inputs)?)?;
                let t = occurrence_set(&other, &v, &u, &w)?;
                let meet = intersect_occurrence_sets(&s, &t, *bound)?;
                let o = result.as_object_mut().unwrap();
                o.insert("other_base".into(), json!(other.base));
                o.insert("other_occurrences".into(), set_payload(&t));
                o.insert("intersection".into(), json!(meet.set.to_string()));
                o.insert("exhaustive_up_to_exponent".into(), json!(meet.searched_to));
            }
            report.result = result;
        }
        Command::CommonFactors { x, y, depth, strict } => {
            report.command = "common-factors".into();
            let xs = AutomaticSpec::from_sub_file(&sub_file(x, &mut inputs)?)?;
            let ys = AutomaticSpec::from_sub_file(&sub_file(y, &mut inputs)?)?;
            let rep = analyze_common_factors(&xs, &ys, *depth)?;
            let sets: Vec<Value> = rep
                .special_sets
                .iter()
                .map(|s| {
                    let res = match &s.resolution {
                        Resolution::Infinite { triple, certificate } => {
                            format!("{triple} ({certificate:?})")
                        }
                        Resolution::Undecided { triple } => format!("{triple} (undecided)"),
                        Resolution::Finite { words } => format!(
                            "finite: {}",
                            words.iter().map(Word::compact).collect::<Vec<_>>().join(", ")
                        ),
                    };
                    json!({
                        "left": s.left.compact(),
                        "middle": s.middle.compact(),
                        "right": s.right.compact(),
                        "resolution": res,
                    })
                })
                .collect();
            report.result = json!({
                "triples": rep.result.triples.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                "certification": certification(&rep.result.certification),
                "cyclic_common": rep.cyclic_common.iter().map(Word::compact).collect::<Vec<_>>(),
                "cyclic_complete": rep.cyclic_complete,
                "ell": rep.ell,
                "realized_bound": rep.realized_bound,
                "special_sets": sets,
            });
            let common = common_factors_upto(&xs.spec, &ys.spec, *depth)?;
            report.check(
                format!("union of triples equals the common factors at depth {depth}"),
                rep.result.language(*depth) == common,
                None,
            );
            if *strict && !rep.result.certification.is_certified() {
                exit = EXIT_UNCERTIFIED;
            }
        }
        Command::Construct { triples, k, l, out } => {
            report.command = "construct".into();
            let ts = triples_file(triples, &mut inputs)?;
            let pair = construct_witnesses(&ts, *k, *l)?;
            std::fs::create_dir_all(out).map_err(|e| Failure::input(format!("{}: {e}", out.display())))?;
            let mut written = Vec::new();
            for (name, spec) in [("x.sub", &pair.x_spec), ("y.sub", &pair.y_spec)] {
                let path = out.join(name);
                std::fs::write(&path, spec.spec.to_sub_file(Some(spec.base)).to_text())
                    .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                written.push(path.display().to_string());
            }
            let depth = 8;
            let strata = verify_witness(&pair.x_spec.spec, &pair.y_spec.spec, &ts, depth)?;
            report.check(
                format!("common factors equal the union up to length {depth}"),
                strata.iter().all(|s| s.matches),
                None,
            );
            report.result = json!({
                "triples": ts.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                "k": pair.x_spec.base,
                "l": pair.y_spec.base,
                "x_states": pair.x_automaton.delta.len(),
                "y_states": pair.y_automaton.delta.len(),
                "x_params": serde_json::to_value(&pair.x_params).unwrap(),
                "y_params": serde_json::to_value(&pair.y_params).unwrap(),
                "written": written,
            });
        }
        Command::VerifyWitness { x, y, triples, depth } => {
            report.command = "verify-witness".into();
            let xs = SubstitutiveSpec::from_sub_file(&sub_file(x, &mut inputs)?)?;
            let ys = SubstitutiveSpec::from_sub_file(&sub_file(y, &mut inputs)?)?;
            let ts = triples_file(triples, &mut inputs)?;
            let strata = verify_witness(&xs, &ys, &ts, *depth)?;
            for s in &strata {
                report.check(
                    format!("length {}", s.length),
                    s.matches,
                    Some(format!("expected {} factors, found {}", s.expected, s.found)),
                );
            }
            report.result = json!({
                "depth": depth,
                "triples": ts.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            });
        }
    }
    report.inputs = inputs;
    report.elapsed_ms = start.elapsed().as_millis();
    if report.mismatched() {
        exit = EXIT_MISMATCH;
    }
    let json = serde_json::to_string_pretty(&report).unwrap();
    match &cli.json {
        Some(None) => emit(&(json + "\n")),
        Some(Some(path)) => {
            emit(&report.to_text());
            std::fs::write(path, json + "\n").map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        }
        None => emit(&report.to_text()),
    }
    Ok(exit)
}
