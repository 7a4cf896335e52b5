//! JSON and DOT serialization.
//!
//! Guards are written as unions of boxes, each box a list of per-axis
//! `[lo, hi]` pairs with `hi = null` for +∞. Real bounds may be wrapped as
//! `{"na": x}` to mean the next double above `x`. Equality guards are
//! written as `{"in": [...]}` or `{"not_in": [...]}`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::SMealy;
use crate::algebra::{na, Algebra, Axis, AxisKind, Char, EqSet, Interval, Predicate, Scalar, Word};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct FileAutomaton {
    algebra: Value,
    states: usize,
    #[serde(default)]
    initial: usize,
    #[serde(default)]
    outputs: Vec<String>,
    transitions: Vec<FileTransition>,
}

#[derive(Serialize, Deserialize)]
struct FileTransition {
    from: usize,
    guard: Value,
    to: usize,
    out: String,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_real(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| parse_err(format!("bad number {n}"))),
        Value::Object(o) if o.len() == 1 && o.contains_key("na") => Ok(na(parse_real(&o["na"])?)),
        other => Err(parse_err(format!("expected a real value, found {other}"))),
    }
}

fn parse_nat(v: &Value) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| parse_err(format!("expected a natural, found {v}")))
}

fn parse_scalar(kind: AxisKind, v: &Value) -> Result<Scalar> {
    match kind {
        AxisKind::Nat => parse_nat(v).map(Scalar::Nat),
        AxisKind::Real => Scalar::real(parse_real(v)?),
    }
}

fn parse_axis(v: &Value) -> Result<Axis> {
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| parse_err("algebra without kind"))?;
    let bound = |key: &str| v.get(key).filter(|b| !b.is_null());
    match kind {
        "interval-nat" => Axis::nat_range(
            bound("min").map(parse_nat).transpose()?.unwrap_or(0),
            bound("max").map(parse_nat).transpose()?,
        ),
        "interval-real" => Axis::real_range(
            bound("min").map(parse_real).transpose()?.unwrap_or(0.0),
            bound("max").map(parse_real).transpose()?,
        ),
        other => Err(parse_err(format!("{other} cannot be a product component"))),
    }
}

pub(crate) fn parse_algebra(v: &Value) -> Result<Algebra> {
    match v.get("kind").and_then(Value::as_str) {
        Some("product") => {
            let comps = v
                .get("components")
                .and_then(Value::as_array)
                .ok_or_else(|| parse_err("product without components"))?;
            Algebra::product(comps.iter().map(parse_axis).collect::<Result<_>>()?)
        }
        Some("equality") => {
            let carrier = match v.get("carrier") {
                None | Some(Value::Null) => None,
                Some(Value::Array(xs)) => Some(
                    xs.iter()
                        .map(parse_nat)
                        .collect::<Result<BTreeSet<u64>>>()?,
                ),
                Some(other) => return Err(parse_err(format!("bad carrier {other}"))),
            };
            Algebra::equality(carrier)
        }
        _ => Ok(Algebra::Intervals(vec![parse_axis(v)?])),
    }
}

fn scalar_json(s: Scalar) -> Value {
    match s {
        Scalar::Nat(n) | Scalar::Sym(n) => json!(n),
        Scalar::Real(r) => json!(r.get()),
    }
}

fn axis_json(a: &Axis) -> Value {
    let kind = match a.kind {
        AxisKind::Nat => "interval-nat",
        AxisKind::Real => "interval-real",
    };
    json!({"kind": kind, "min": scalar_json(a.min), "max": a.sup.map(scalar_json)})
}

pub(crate) fn algebra_json(alg: &Algebra) -> Value {
    match alg {
        Algebra::Intervals(axes) if axes.len() == 1 => axis_json(&axes[0]),
        Algebra::Intervals(axes) => {
            json!({"kind": "product", "components": axes.iter().map(axis_json).collect::<Vec<_>>()})
        }
        Algebra::Equality { carrier } => json!({"kind": "equality", "carrier": carrier}),
    }
}

fn parse_char(alg: &Algebra, v: &Value) -> Result<Char> {
    let c = match alg {
        Algebra::Intervals(axes) => {
            let parts: Vec<&Value> = match v {
                Value::Array(xs) => xs.iter().collect(),
                single => vec![single],
            };
            if parts.len() != axes.len() {
                return Err(parse_err(format!("{v} has the wrong arity")));
            }
            Char::new(
                axes.iter()
                    .zip(parts)
                    .map(|(ax, p)| parse_scalar(ax.kind, p))
                    .collect::<Result<Vec<_>>>()?,
            )
        }
        Algebra::Equality { .. } => Char::sym(parse_nat(v)?),
    };
    alg.check_char(&c)?;
    Ok(c)
}

/// Reads a word written as a JSON array of characters, each a number or an
/// array with one entry per axis, e.g. `[0, 20]` or `[[0, 1.5], [2, 3]]`.
pub fn word_from_json(alg: &Algebra, text: &str) -> Result<Word> {
    let v: Value = serde_json::from_str(text)?;
    let xs = v
        .as_array()
        .ok_or_else(|| parse_err("a word must be a JSON array"))?;
    xs.iter().map(|c| parse_char(alg, c)).collect()
}

fn parse_guard(alg: &Algebra, v: &Value) -> Result<Predicate> {
    match alg {
        Algebra::Intervals(axes) => {
            let boxes = v
                .as_array()
                .ok_or_else(|| parse_err("guard must be an array of boxes"))?;
            let mut parsed = Vec::with_capacity(boxes.len());
            for b in boxes {
                let ivs = b
                    .as_array()
                    .ok_or_else(|| parse_err("box must be an array of intervals"))?;
                if ivs.len() != axes.len() {
                    return Err(parse_err(format!("box {b} has the wrong arity")));
                }
                let mut row = Vec::with_capacity(ivs.len());
                for (ax, iv) in axes.iter().zip(ivs) {
                    let pair = iv
                        .as_array()
                        .filter(|p| p.len() == 2)
                        .ok_or_else(|| parse_err(format!("bad interval {iv}")))?;
                    let lo = parse_scalar(ax.kind, &pair[0])?;
                    let hi = if pair[1].is_null() {
                        None
                    } else {
                        Some(parse_scalar(ax.kind, &pair[1])?)
                    };
                    row.push(Interval::new(lo, hi)?);
                }
                parsed.push(row);
            }
            alg.from_boxes(&parsed)
        }
        Algebra::Equality { .. } => {
            let list = |key: &str| -> Result<Option<BTreeSet<u64>>> {
                v.get(key)
                    .map(|xs| {
                        xs.as_array()
                            .ok_or_else(|| parse_err(format!("{key} must be an array")))?
                            .iter()
                            .map(parse_nat)
                            .collect()
                    })
                    .transpose()
            };
            match (list("in")?, list("not_in")?) {
                (Some(xs), None) => alg.eq_set(EqSet::Finite(xs)),
                (None, Some(xs)) => alg.eq_set(EqSet::Cofinite(xs)),
                _ => Err(parse_err(format!("bad equality guard {v}"))),
            }
        }
    }
}

fn guard_json(alg: &Algebra, p: &Predicate) -> Result<Value> {
    Ok(match p {
        Predicate::Boxes(_) => Value::Array(
            alg.boxes(p)?
                .iter()
                .map(|b| {
                    Value::Array(
                        b.iter()
                            .map(|iv| json!([scalar_json(iv.lo), iv.hi.map(scalar_json)]))
                            .collect(),
                    )
                })
                .collect(),
        ),
        Predicate::Eq(EqSet::Finite(xs)) => json!({"in": xs}),
        Predicate::Eq(EqSet::Cofinite(xs)) => json!({"not_in": xs}),
    })
}

/// Parses and validates an automaton.
pub fn from_json(text: &str) -> Result<SMealy> {
    let file: FileAutomaton = serde_json::from_str(text)?;
    let alg = parse_algebra(&file.algebra)?;
    let transitions = file
        .transitions
        .iter()
        .map(|t| Ok((t.from, parse_guard(&alg, &t.guard)?, t.to, t.out.clone())))
        .collect::<Result<Vec<_>>>()?;
    SMealy::new_valid(alg, file.states, file.initial, file.outputs, transitions)
}

pub fn to_json(m: &SMealy) -> Result<String> {
    let file = FileAutomaton {
        algebra: algebra_json(m.algebra()),
        states: m.states(),
        initial: 0,
        outputs: m.outputs().to_vec(),
        transitions: m
            .transitions()
            .iter()
            .map(|t| {
                Ok(FileTransition {
                    from: t.from,
                    guard: guard_json(m.algebra(), &t.guard)?,
                    to: t.to,
                    out: m.outputs()[t.out].clone(),
                })
            })
            .collect::<Result<_>>()?,
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn to_dot(m: &SMealy) -> String {
    let mut s = String::from("digraph smealy {\n  rankdir=LR;\n  start [shape=point];\n");
    for q in 0..m.states() {
        let shape = if q == 0 { "doublecircle" } else { "circle" };
        s.push_str(&format!("  q{q} [shape={shape}];\n"));
    }
    s.push_str("  start -> q0;\n");
    for t in m.transitions() {
        let label = format!("{} | {}", m.algebra().display(&t.guard), m.outputs()[t.out]);
        s.push_str(&format!(
            "  q{} -> q{} [label=\"{}\"];\n",
            t.from,
            t.to,
            label.replace('"', "\\\"")
        ));
    }
    s.push_str("}\n");
    s
}
