//! JSON forms of lattices, points, classes, tables and walls. Rationals are
//! strings `"p/q"` (or `"n"` for integers).

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::{fmt_rational, parse_rational, BiPoly, Q};
use crate::charge::{central_charge, phase_in_01, ChargeError, StabilityPoint};
use crate::hall::{parse_value, ExprError, ITable};
use crate::invariants::InvariantReport;
use crate::lattice::{LatticeError, MukaiVector, NsLattice, RationalDivisor};
use crate::walls::Wall;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad rational {0:?}")]
    Rational(String),
    #[error("bad value expression {text:?}: {source}")]
    Expr { text: String, source: ExprError },
    #[error("invalid lattice: {0}")]
    Lattice(#[from] LatticeError),
    #[error("{0}")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub gram: Vec<Vec<i64>>,
    pub epsilon: i64,
}

pub fn lattice_to_json(l: &NsLattice) -> Value {
    json!({ "gram": l.gram(), "epsilon": l.epsilon() })
}

pub fn lattice_from_json(s: &str) -> Result<NsLattice, IoError> {
    let j: LatticeJson = serde_json::from_str(s)?;
    Ok(NsLattice::new(j.gram, j.epsilon)?)
}

pub fn rat(x: &Q) -> Value {
    Value::String(fmt_rational(x))
}

pub fn parse_rat(s: &str) -> Result<Q, IoError> {
    parse_rational(s.trim()).map_err(|_| IoError::Rational(s.to_string()))
}

fn rat_from_value(v: &Value) -> Result<Q, IoError> {
    match v {
        Value::String(s) => parse_rat(s),
        Value::Number(n) if n.is_i64() => parse_rat(&n.to_string()),
        other => Err(IoError::Rational(other.to_string())),
    }
}

pub fn divisor_to_json(d: &RationalDivisor) -> Value {
    Value::Array(d.0.iter().map(rat).collect())
}

pub fn divisor_from_value(v: &Value) -> Result<RationalDivisor, IoError> {
    let arr = v.as_array().ok_or_else(|| IoError::Shape("divisor must be an array".into()))?;
    Ok(RationalDivisor(arr.iter().map(rat_from_value).collect::<Result<_, _>>()?))
}

/// `{"beta": [...], "omega": [...]}`
pub fn point_to_json(beta: &RationalDivisor, omega: &RationalDivisor) -> Value {
    json!({ "beta": divisor_to_json(beta), "omega": divisor_to_json(omega) })
}

pub fn point_from_json(s: &str) -> Result<(RationalDivisor, RationalDivisor), IoError> {
    let v: Value = serde_json::from_str(s)?;
    let beta = v.get("beta").ok_or_else(|| IoError::Shape("point needs \"beta\"".into()))?;
    let omega = v.get("omega").ok_or_else(|| IoError::Shape("point needs \"omega\"".into()))?;
    Ok((divisor_from_value(beta)?, divisor_from_value(omega)?))
}

pub fn class_to_json(v: &MukaiVector) -> Value {
    serde_json::to_value(v).expect("plain struct")
}

pub fn class_from_json(s: &str) -> Result<MukaiVector, IoError> {
    Ok(serde_json::from_str(s)?)
}

pub fn classes_to_json(vs: &[MukaiVector]) -> Value {
    Value::Array(vs.iter().map(class_to_json).collect())
}

/// `{"entries": [{"class": {...}, "value": "..."}]}`, sorted by class.
pub fn itable_to_json(t: &ITable) -> Value {
    let entries: Vec<Value> = t
        .entries()
        .iter()
        .map(|(v, x)| json!({ "class": class_to_json(v), "value": x.to_string() }))
        .collect();
    json!({ "entries": entries })
}

#[derive(Deserialize)]
struct EntryJson {
    class: MukaiVector,
    value: String,
}

#[derive(Deserialize)]
struct TableJson {
    entries: Vec<EntryJson>,
}

/// Entries listed twice are summed.
pub fn itable_from_json(s: &str) -> Result<ITable, IoError> {
    let t: TableJson = serde_json::from_str(s)?;
    let mut out = ITable::new();
    for e in t.entries {
        let x = parse_value(&e.value).map_err(|source| IoError::Expr { text: e.value.clone(), source })?;
        let old = out.get(&e.class);
        out.insert(e.class, old.add(&x));
    }
    Ok(out)
}

/// `{"i,j": "coef"}` for the terms `b^i t^j`.
pub fn bipoly_to_json(p: &BiPoly) -> Value {
    let m: serde_json::Map<String, Value> = p.terms().iter().map(|((i, j), c)| (format!("{i},{j}"), rat(c))).collect();
    Value::Object(m)
}

pub fn bipoly_from_value(v: &Value) -> Result<BiPoly, IoError> {
    let obj = v.as_object().ok_or_else(|| IoError::Shape("polynomial must be an object".into()))?;
    let mut terms = BTreeMap::new();
    for (k, c) in obj {
        let (i, j) = k.split_once(',').ok_or_else(|| IoError::Shape(format!("bad exponent key {k:?}")))?;
        let i: u32 = i.trim().parse().map_err(|_| IoError::Shape(format!("bad exponent key {k:?}")))?;
        let j: u32 = j.trim().parse().map_err(|_| IoError::Shape(format!("bad exponent key {k:?}")))?;
        terms.insert((i, j), rat_from_value(c)?);
    }
    Ok(BiPoly::from_terms(terms))
}

pub fn wall_to_json(w: &Wall) -> Value {
    json!({
        "vi": class_to_json(&w.vi),
        "vj": class_to_json(&w.vj),
        "poly": bipoly_to_json(&w.poly),
        "side": "re_pos",
        "members": classes_to_json(&w.members),
    })
}

pub fn walls_to_json(ws: &[Wall]) -> Value {
    Value::Array(ws.iter().map(wall_to_json).collect())
}

/// Wall records read back for rendering: the pair and the polynomial.
pub fn wall_polys_from_json(s: &str) -> Result<Vec<(MukaiVector, MukaiVector, BiPoly)>, IoError> {
    let v: Value = serde_json::from_str(s)?;
    let arr = v.as_array().ok_or_else(|| IoError::Shape("walls must be an array".into()))?;
    arr.iter()
        .map(|w| {
            let vi = serde_json::from_value(w.get("vi").cloned().unwrap_or(Value::Null))?;
            let vj = serde_json::from_value(w.get("vj").cloned().unwrap_or(Value::Null))?;
            let p = bipoly_from_value(w.get("poly").unwrap_or(&Value::Null))?;
            Ok((vi, vj, p))
        })
        .collect()
}

/// `{"re", "im", "heart_phase"}`. The phase is `null` outside the heart
/// image, `{"phase": "1"}` on the negative real axis and otherwise
/// `{"cot_pi_phase": Re/Im}`.
pub fn charge_to_json(p: &StabilityPoint, v: &MukaiVector) -> Result<Value, ChargeError> {
    let z = central_charge(p, v);
    let phase = match phase_in_01(p, v) {
        Ok(_) if z.im.is_zero() => json!({ "phase": "1" }),
        Ok(_) => json!({ "cot_pi_phase": rat(&(&z.re / &z.im)) }),
        Err(ChargeError::OutsideHeartImage(_)) => Value::Null,
        Err(e) => return Err(e),
    };
    Ok(json!({ "re": rat(&z.re), "im": rat(&z.im), "heart_phase": phase }))
}

pub fn report_to_json(r: &InvariantReport, provenance: bool) -> Value {
    let mut o = json!({
        "alpha": class_to_json(&r.alpha),
        "decompositions": r.decomposition_count,
        "j": r.j.to_string(),
    });
    if provenance {
        o["provenance"] = r
            .provenance
            .iter()
            .map(|c| json!({ "parts": classes_to_json(&c.parts), "weight": c.weight.to_string() }))
            .collect();
    }
    o
}
