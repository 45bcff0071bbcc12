//! One function per subcommand; each returns the full stdout payload so
//! that `main` prints exactly once and output stays byte-deterministic.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use wtower::clasper::{self, EffectReport, SurgeryClass};
use wtower::eta as eta_mod;
use wtower::forest::{parse_forest, ForestEntry, IntersectionForest, TowerOrder};
use wtower::ihx::{RelationLattice, TreeVector};
use wtower::normalize::{normalize, NormalizeOptions};
use wtower::tree::{parse_framed, parse_tree, Tree};

use crate::CliError;

fn at<E: Display>(name: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::domain(format!("{name}: {e}"))
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(at(&path.display().to_string()))
}

/// Forest files are accepted in both the line grammar and the JSON mirror.
fn load_forest(path: &Path) -> Result<IntersectionForest, CliError> {
    let name = path.display().to_string();
    let text = read_input(path)?;
    if text.trim_start().starts_with('{') {
        IntersectionForest::from_json(&text).map_err(at(&name))
    } else {
        parse_forest(&text).map_err(at(&name))
    }
}

fn display_names(files: &[PathBuf]) -> Vec<String> {
    files.iter().map(|p| p.display().to_string()).collect()
}

/// A single input prints bare; several inputs get `name: ` prefixes.
fn human_lines(names: &[String], lines: &[String]) -> String {
    if names.len() == 1 {
        format!("{}\n", lines[0])
    } else {
        names
            .iter()
            .zip(lines)
            .map(|(n, l)| format!("{n}: {l}\n"))
            .collect()
    }
}

/// One input -> one object; several -> one array in input order.
fn render_json(mut vals: Vec<Value>) -> String {
    let v = if vals.len() == 1 {
        vals.pop().expect("one element")
    } else {
        Value::Array(vals)
    };
    let mut s = serde_json::to_string_pretty(&v).expect("report serialization");
    s.push('\n');
    s
}

fn kind(t: &Tree) -> &'static str {
    match t {
        Tree::Rooted(_) => "rooted",
        Tree::Framed(_) => "framed",
        Tree::Twisted(_) => "twisted",
    }
}

pub fn tree_order(exprs: &[String], json_mode: bool) -> Result<String, CliError> {
    let mut lines = Vec::new();
    let mut vals = Vec::new();
    for e in exprs {
        let t = parse_tree(e).map_err(at(e))?;
        lines.push(t.order().to_string());
        vals.push(json!({"input": e, "kind": kind(&t), "order": t.order()}));
    }
    Ok(if json_mode {
        render_json(vals)
    } else {
        human_lines(exprs, &lines)
    })
}

pub fn tree_canon(exprs: &[String], json_mode: bool) -> Result<String, CliError> {
    let mut lines = Vec::new();
    let mut vals = Vec::new();
    for e in exprs {
        let t = parse_tree(e).map_err(at(e))?;
        let key = t.canonical().to_string();
        vals.push(json!({"input": e, "kind": kind(&t), "canonical": key}));
        lines.push(key);
    }
    Ok(if json_mode {
        render_json(vals)
    } else {
        human_lines(exprs, &lines)
    })
}

pub fn tree_bad(exprs: &[String], json_mode: bool) -> Result<String, CliError> {
    let mut lines = Vec::new();
    let mut vals = Vec::new();
    for e in exprs {
        let t = parse_tree(e).map_err(at(e))?;
        let bad = t.is_beta_bad().map_err(at(e))?;
        let detail = if bad {
            Some(match &t {
                Tree::Framed(ft) => match ft.label_count(2) {
                    0 => "no 2-labels".to_string(),
                    1 => "single 2-label".to_string(),
                    _ => format!("t_{}", ft.order()),
                },
                Tree::Twisted(_) => "no 2-labels".to_string(),
                Tree::Rooted(_) => unreachable!("badness rejects bare bracketings"),
            })
        } else {
            None
        };
        lines.push(match &detail {
            Some(d) => format!("beta-bad ({d})"),
            None => "not beta-bad".to_string(),
        });
        vals.push(json!({"input": e, "beta_bad": bad, "detail": detail}));
    }
    Ok(if json_mode {
        render_json(vals)
    } else {
        human_lines(exprs, &lines)
    })
}

fn order_value(o: TowerOrder) -> Value {
    match o {
        TowerOrder::Finite(v) => json!(v),
        TowerOrder::Infinite => json!("inf"),
    }
}

pub fn forest_order(files: &[PathBuf], json_mode: bool) -> Result<String, CliError> {
    let names = display_names(files);
    let mut lines = Vec::new();
    let mut vals = Vec::new();
    for (path, name) in files.iter().zip(&names) {
        let f = load_forest(path)?;
        let o = f.tower_order();
        lines.push(o.to_string());
        vals.push(json!({"input": name, "tower_order": order_value(o)}));
    }
    Ok(if json_mode {
        render_json(vals)
    } else {
        human_lines(&names, &lines)
    })
}

pub fn forest_cochran(files: &[PathBuf], json_mode: bool) -> Result<String, CliError> {
    let names = display_names(files);
    let mut lines = Vec::new();
    let mut vals = Vec::new();
    for (path, name) in files.iter().zip(&names) {
        let f = load_forest(path)?;
        let o = f.cochran_order().map_err(at(name))?;
        lines.push(o.to_string());
        vals.push(json!({"input": name, "cochran_order": order_value(o)}));
    }
    Ok(if json_mode {
        render_json(vals)
    } else {
        human_lines(&names, &lines)
    })
}

/// Reporting ceiling for one beta listing: every index up to and including
/// the ceiling is covered, and `Inf` additionally certifies that all
/// higher invariants vanish.
enum Ceiling {
    Num(i64),
    Inf,
}

pub fn forest_beta(
    files: &[PathBuf],
    max: Option<u32>,
    json_mode: bool,
) -> Result<String, CliError> {
    let names = display_names(files);
    let mut lines = Vec::new();
    let mut vals = Vec::new();
    for (path, name) in files.iter().zip(&names) {
        let f = load_forest(path)?;
        let c = f.cochran_order().map_err(at(name))?;
        let (map, ceiling) = match c {
            TowerOrder::Finite(cv) => {
                let m = f.beta_vector(max).map_err(at(name))?;
                let u = cv.div_euclid(2).min(max.map_or(i64::MAX, i64::from));
                (m, Ceiling::Num(u))
            }
            TowerOrder::Infinite => {
                // Every twisted entry has some order <= d0, so invariants
                // past d0 are exactly zero and the answer is complete.
                let d0 = f
                    .entries
                    .iter()
                    .filter(|e| matches!(e, ForestEntry::Twisted { .. }))
                    .map(ForestEntry::order)
                    .max()
                    .unwrap_or(0);
                let depth = max.unwrap_or(d0);
                let m = f.beta_vector(Some(depth)).map_err(at(name))?;
                if max.is_none_or(|d| d >= d0) {
                    (m, Ceiling::Inf)
                } else {
                    (m, Ceiling::Num(i64::from(depth)))
                }
            }
        };
        let last_nonzero = map
            .iter()
            .rev()
            .find(|(_, v)| **v != 0)
            .map_or(0, |(i, _)| *i);
        let mut parts: Vec<String> = (1..=last_nonzero)
            .map(|i| format!("beta^{i} = {}", map[&i]))
            .collect();
        let tail_start = last_nonzero + 1;
        let tail_end = match ceiling {
            Ceiling::Inf => Some("inf".to_string()),
            Ceiling::Num(u) if i64::from(tail_start) <= u => Some(u.to_string()),
            Ceiling::Num(_) => None,
        };
        if let Some(end) = tail_end {
            parts.push(format!("beta^i = 0 for {tail_start} <= i <= {end}"));
        }
        lines.push(if parts.is_empty() {
            format!("no beta invariants defined (cochran order {c})")
        } else {
            parts.join("; ")
        });
        vals.push(json!({
            "input": name,
            "cochran_order": order_value(c),
            "beta": map.iter().map(|(i, v)| json!([i, v])).collect::<Vec<_>>(),
            "zero_from": match ceiling {
                Ceiling::Inf => json!(last_nonzero + 1),
                Ceiling::Num(_) => Value::Null,
            },
        }));
    }
    Ok(if json_mode {
        render_json(vals)
    } else {
        human_lines(&names, &lines)
    })
}

pub fn forest_normalize(
    files: &[PathBuf],
    target: u32,
    assume_eliminable: bool,
    log: Option<&Path>,
    json_mode: bool,
) -> Result<String, CliError> {
    if log.is_some() && files.len() > 1 {
        return Err(CliError::usage("--log requires a single input file"));
    }
    let mut opts = NormalizeOptions::new(target);
    opts.assume_eliminable = assume_eliminable;
    let names = display_names(files);
    let mut blocks = Vec::new();
    let mut vals = Vec::new();
    for (path, name) in files.iter().zip(&names) {
        let f = load_forest(path)?;
        let (out, moves) = normalize(&f, &opts).map_err(at(name))?;
        if let Some(log_path) = log {
            let mut body = moves.to_json();
            body.push('\n');
            fs::write(log_path, body).map_err(at(&log_path.display().to_string()))?;
        }
        vals.push(json!({
            "input": name,
            "target": target,
            "assume_eliminable": assume_eliminable,
            "forest": embedded_json(&out.to_json()),
            "log": embedded_json(&moves.to_json()),
        }));
        blocks.push(out.render());
    }
    Ok(if json_mode {
        render_json(vals)
    } else if names.len() == 1 {
        blocks.pop().expect("one block")
    } else {
        let sections: Vec<String> = names
            .iter()
            .zip(&blocks)
            .map(|(n, b)| format!("# {n}\n{b}"))
            .collect();
        sections.join("\n")
    })
}

fn embedded_json(text: &str) -> Value {
    serde_json::from_str(text).expect("library reports are valid JSON")
}

pub fn eta(files: &[PathBuf], x_series: bool, json_mode: bool) -> Result<String, CliError> {
    let names = display_names(files);
    let mut lines = Vec::new();
    let mut vals = Vec::new();
    for (path, name) in files.iter().zip(&names) {
        let text = read_input(path)?;
        let changes = eta_mod::parse_crossings(&text).map_err(at(name))?;
        let poly = eta_mod::eta(&changes).map_err(at(name))?;
        let series = poly.to_x_poly().map_err(at(name))?;
        lines.push(if x_series {
            series.to_string()
        } else {
            poly.to_string()
        });
        let terms = poly
            .terms()
            .map(|(e, c)| Ok(json!([e, json_int(c, name)?])))
            .collect::<Result<Vec<_>, CliError>>()?;
        let coeffs = series
            .coeffs()
            .iter()
            .map(|c| json_int(c, name))
            .collect::<Result<Vec<_>, CliError>>()?;
        vals.push(json!({
            "input": name,
            "eta": {"terms": terms},
            "beta_series": coeffs,
        }));
    }
    Ok(if json_mode {
        render_json(vals)
    } else {
        human_lines(&names, &lines)
    })
}

fn json_int(c: &num::BigInt, name: &str) -> Result<i64, CliError> {
    i64::try_from(c).map_err(|_| {
        CliError::domain(format!(
            "{name}: coefficient {c} exceeds the JSON integer range"
        ))
    })
}

fn class_parts(c: SurgeryClass) -> (&'static str, Option<u32>) {
    match c {
        SurgeryClass::LinkingChanger => ("linking-changer", None),
        SurgeryClass::TInf { i } => ("twist-caterpillar", Some(i)),
        SurgeryClass::Tn { n } => ("caterpillar", Some(n)),
        SurgeryClass::FramedTwoTwos { ones } => ("framed-two-twos", Some(ones)),
        SurgeryClass::FramedManyTwos => ("framed-many-twos", None),
        SurgeryClass::TwistedOneTwo => ("twisted-one-two", None),
        SurgeryClass::TwistedTwoTwos => ("twisted-two-twos", None),
        SurgeryClass::BetaBadOther => ("beta-bad-other", None),
    }
}

fn report_value(r: &EffectReport) -> Value {
    json!({
        "delta": r.delta.iter().map(|(i, v)| json!([i, v])).collect::<Vec<_>>(),
        "indeterminate_from": r.indeterminate_from,
        "undefined": r.undefined,
    })
}

/// The effects report is JSON in both output modes.
pub fn clasper_effects(files: &[PathBuf], max: u32) -> Result<String, CliError> {
    let names = display_names(files);
    let mut vals = Vec::new();
    for (path, name) in files.iter().zip(&names) {
        let f = load_forest(path)?;
        let mut entries = Vec::new();
        for e in &f.entries {
            let (class, detail) = class_parts(clasper::classify(e).map_err(at(name))?);
            let rep = clasper::effect(e, max).map_err(at(name))?;
            let mut v = report_value(&rep);
            let obj = v.as_object_mut().expect("report object");
            obj.insert("surgery".to_string(), json!(e.to_string()));
            obj.insert("class".to_string(), json!(class));
            obj.insert("detail".to_string(), json!(detail));
            entries.push(v);
        }
        let agg = clasper::aggregate(&f.entries, max).map_err(at(name))?;
        vals.push(json!({
            "input": name,
            "max": max,
            "entries": entries,
            "aggregate": report_value(&agg),
        }));
    }
    Ok(render_json(vals))
}

pub fn ihx_reduce(
    files: &[PathBuf],
    order: u32,
    labels: &[u32],
    json_mode: bool,
) -> Result<String, CliError> {
    let lattice = RelationLattice::with_order_bound(labels, order)
        .map_err(|e| CliError::domain(e.to_string()))?;
    let names = display_names(files);
    let mut lines = Vec::new();
    let mut vals = Vec::new();
    for (path, name) in files.iter().zip(&names) {
        let text = read_input(path)?;
        let mut v = TreeVector::zero(labels).map_err(at(name))?;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let here = format!("{name}:{}", no + 1);
            let (cs, ts) = line
                .split_once('*')
                .ok_or_else(|| CliError::domain(format!("{here}: expected `INT * <tree>`")))?;
            let coeff: i64 = cs.trim().parse().map_err(|_| {
                CliError::domain(format!("{here}: bad coefficient `{}`", cs.trim()))
            })?;
            let tree = parse_framed(ts.trim()).map_err(at(&here))?;
            v.add_tree(&tree, coeff).map_err(at(&here))?;
        }
        let reduced = lattice.reduce(&v).map_err(at(name))?;
        lines.push(reduced.to_string());
        vals.push(json!({
            "input": name,
            "order": order,
            "labels": labels,
            "reduced": reduced
                .terms()
                .map(|(k, c)| json!({"coeff": c, "tree": k.to_string()}))
                .collect::<Vec<_>>(),
            "is_zero": reduced.is_zero_vector(),
        }));
    }
    Ok(if json_mode {
        render_json(vals)
    } else {
        human_lines(&names, &lines)
    })
}
