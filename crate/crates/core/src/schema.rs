//! JSON encodings of rings, values, polynomials, families and reports.
//!
//! Readers take the JSON path of the value they are given so that errors
//! point at the offending field. Writers produce stable key order.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::poly::{BiPoly, Poly};
use crate::ring::{RingDescriptor, RingValue};
use crate::series::TruncatedAlphaFamily;
use crate::twist::{AlphaFamily, Base, Status, VerificationReport, Witness};

pub const SCHEMA_VERSION: u64 = 1;

pub fn schema_error(path: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

pub fn child(path: &str, key: &str) -> String {
    format!("{path}.{key}")
}

pub fn field<'a>(v: &'a Value, path: &str, key: &str) -> Result<&'a Value> {
    let obj = v
        .as_object()
        .ok_or_else(|| schema_error(path, "expected an object"))?;
    obj.get(key)
        .ok_or_else(|| schema_error(&child(path, key), "missing field"))
}

pub fn opt_field<'a>(v: &'a Value, key: &str) -> Option<&'a Value> {
    v.as_object().and_then(|o| o.get(key)).filter(|x| !x.is_null())
}

pub fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| schema_error(path, "expected a non-negative integer"))
}

pub fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| schema_error(path, "expected a string"))
}

pub fn usize_field(v: &Value, path: &str, key: &str) -> Result<usize> {
    as_usize(field(v, path, key)?, &child(path, key))
}

pub fn opt_usize(v: &Value, path: &str, key: &str) -> Result<Option<usize>> {
    opt_field(v, key)
        .map(|x| as_usize(x, &child(path, key)))
        .transpose()
}

pub fn ring_from_json(v: &Value, path: &str) -> Result<RingDescriptor> {
    match v {
        Value::String(s) => match s.as_str() {
            "Q" => Ok(RingDescriptor::Rationals),
            "Z" => Ok(RingDescriptor::Integers),
            other => match other.strip_prefix("Z/").map(str::parse::<u64>) {
                Some(Ok(n)) => RingDescriptor::mod_n(n).map_err(|e| schema_error(path, e.to_string())),
                _ => Err(schema_error(path, format!("unknown ring {other:?}"))),
            },
        },
        Value::Object(_) => {
            let n = field(v, path, "mod")?
                .as_u64()
                .ok_or_else(|| schema_error(&child(path, "mod"), "expected an integer"))?;
            RingDescriptor::mod_n(n).map_err(|e| schema_error(&child(path, "mod"), e.to_string()))
        }
        _ => Err(schema_error(path, "expected \"Q\", \"Z\" or {\"mod\": n}")),
    }
}

/// Ring of an object's `"ring"` field, defaulting to `Q`.
pub fn ring_field(v: &Value, path: &str) -> Result<RingDescriptor> {
    match opt_field(v, "ring") {
        Some(r) => ring_from_json(r, &child(path, "ring")),
        None => Ok(RingDescriptor::Rationals),
    }
}

pub fn ring_to_json(r: RingDescriptor) -> Value {
    match r {
        RingDescriptor::Rationals => json!("Q"),
        RingDescriptor::Integers => json!("Z"),
        RingDescriptor::ModN(n) => json!({ "mod": n }),
    }
}

pub fn value_from_json(ring: RingDescriptor, v: &Value, path: &str) -> Result<RingValue> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        Value::Object(_) => {
            let r = ring_from_json(field(v, path, "ring")?, &child(path, "ring"))?;
            if r != ring {
                return Err(schema_error(
                    &child(path, "ring"),
                    format!("ring {r} does not match {ring}"),
                ));
            }
            return value_from_json(ring, field(v, path, "value")?, &child(path, "value"));
        }
        _ => return Err(schema_error(path, "expected an integer or a \"p/q\" string")),
    };
    RingValue::parse(ring, &text).map_err(|e| schema_error(path, e.to_string()))
}

pub fn value_to_json(v: &RingValue) -> Value {
    Value::String(v.to_string())
}

/// `{"ring": ..., "value": ...}`.
pub fn ring_value_to_json(v: &RingValue) -> Value {
    json!({ "ring": ring_to_json(v.ring()), "value": value_to_json(v) })
}

/// Accepts `"1 + 2Y^3"`, an integer constant, or `{"coeffs": {"deg": value}}`.
pub fn poly_from_json(ring: RingDescriptor, v: &Value, path: &str) -> Result<Poly> {
    match v {
        Value::String(s) => Poly::parse(ring, s).map_err(|e| schema_error(path, e.to_string())),
        Value::Number(_) => Ok(Poly::constant(value_from_json(ring, v, path)?)),
        Value::Object(_) => {
            let cpath = child(path, "coeffs");
            let coeffs = field(v, path, "coeffs")?
                .as_object()
                .ok_or_else(|| schema_error(&cpath, "expected an object of degree → value"))?;
            let mut out = Poly::zero(ring);
            for (k, c) in coeffs {
                let p = child(&cpath, k);
                let d: usize = k
                    .parse()
                    .map_err(|_| schema_error(&p, "degree keys must be non-negative integers"))?;
                out.add_term(d, &value_from_json(ring, c, &p)?);
            }
            Ok(out)
        }
        _ => Err(schema_error(path, "expected a polynomial")),
    }
}

pub fn poly_to_json(p: &Poly) -> Value {
    let coeffs: Map<String, Value> = p
        .terms()
        .map(|(d, c)| (d.to_string(), value_to_json(c)))
        .collect();
    json!({ "coeffs": coeffs })
}

/// Accepts `[[i, j, value], ...]` or `{"coeffs": [[i, j, value], ...]}`.
pub fn bipoly_from_json(ring: RingDescriptor, v: &Value, path: &str) -> Result<BiPoly> {
    let (arr, apath) = match v {
        Value::Array(a) => (a, path.to_string()),
        Value::Object(_) => {
            let p = child(path, "coeffs");
            let a = field(v, path, "coeffs")?
                .as_array()
                .ok_or_else(|| schema_error(&p, "expected an array"))?;
            (a, p)
        }
        _ => return Err(schema_error(path, "expected [[i, j, value], ...]")),
    };
    let mut out = BiPoly::zero(ring);
    for (k, entry) in arr.iter().enumerate() {
        let p = format!("{apath}[{k}]");
        let triple = entry
            .as_array()
            .filter(|t| t.len() == 3)
            .ok_or_else(|| schema_error(&p, "expected [i, j, value]"))?;
        let i = as_usize(&triple[0], &format!("{p}[0]"))?;
        let j = as_usize(&triple[1], &format!("{p}[1]"))?;
        let c = value_from_json(ring, &triple[2], &format!("{p}[2]"))?;
        out.add_term(i, j, &c);
    }
    Ok(out)
}

pub fn bipoly_to_json(b: &BiPoly) -> Value {
    let coeffs: Vec<Value> = b
        .terms()
        .map(|(i, j, c)| json!([i, j, value_to_json(c)]))
        .collect();
    json!({ "coeffs": coeffs })
}

pub fn base_from_json(v: &Value, path: &str) -> Result<Base> {
    match v {
        Value::String(s) if s == "polyX" => Ok(Base::PolyX),
        Value::Object(_) => {
            let n = usize_field(v, path, "quot")?;
            if n == 0 {
                return Err(schema_error(&child(path, "quot"), "order must be positive"));
            }
            Ok(Base::Quot(n))
        }
        _ => Err(schema_error(path, "expected \"polyX\" or {\"quot\": n}")),
    }
}

pub fn base_to_json(b: Base) -> Value {
    match b {
        Base::PolyX => json!("polyX"),
        Base::Quot(n) => json!({ "quot": n }),
    }
}

fn cell_key(j: usize, m: usize) -> String {
    format!("{j},{m}")
}

fn parse_cell_key(k: &str, path: &str) -> Result<(usize, usize)> {
    let bad = || schema_error(path, "cell keys must look like \"j,m\"");
    let (a, b) = k.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn tables_to_json<'a>(cells: impl Iterator<Item = ((usize, usize), &'a Poly)>) -> Value {
    let mut out = Map::new();
    for ((j, m), p) in cells {
        out.insert(cell_key(j, m), poly_to_json(p));
    }
    Value::Object(out)
}

/// `{"base", "ring", "q": [[i, j, v]]}` or `{"base", "ring", "alpha_tables":
/// {"j,m": poly}}`, with optional `"y_limit"` and `"assume_upper_bounded"`.
pub fn family_from_json(v: &Value, path: &str) -> Result<AlphaFamily> {
    let ring = ring_field(v, path)?;
    let base = match opt_field(v, "base") {
        Some(b) => base_from_json(b, &child(path, "base"))?,
        None => Base::PolyX,
    };
    let mut fam = if let Some(t) = opt_field(v, "alpha_tables") {
        let tpath = child(path, "alpha_tables");
        let obj = t
            .as_object()
            .ok_or_else(|| schema_error(&tpath, "expected an object of \"j,m\" → polynomial"))?;
        let mut tables = BTreeMap::new();
        for (k, p) in obj {
            let kp = child(&tpath, k);
            let key = parse_cell_key(k, &kp)?;
            tables.insert(key, poly_from_json(ring, p, &kp)?);
        }
        AlphaFamily::from_tables(ring, base, &tables).map_err(|e| schema_error(&tpath, e.to_string()))?
    } else {
        let q = bipoly_from_json(ring, field(v, path, "q")?, &child(path, "q"))?;
        AlphaFamily::from_q(base, &q).map_err(|e| schema_error(&child(path, "q"), e.to_string()))?
    };
    if let Some(l) = opt_usize(v, path, "y_limit")? {
        fam = fam.with_y_limit(l);
    }
    if let Some(s) = opt_usize(v, path, "assume_upper_bounded")? {
        fam = fam.assume_upper_bounded(s);
    }
    Ok(fam)
}

pub fn family_to_json(fam: &AlphaFamily) -> Value {
    let cells = fam.stored_cells();
    json!({
        "base": base_to_json(fam.base()),
        "ring": ring_to_json(fam.ring()),
        "q": bipoly_to_json(&fam.q_matrix()),
        "alpha_tables": tables_to_json(cells.iter().map(|(k, p)| (*k, p))),
        "y_limit": fam.y_limit(),
        "provenance": fam.provenance(),
    })
}

pub fn series_to_json(fam: &TruncatedAlphaFamily) -> Value {
    let (nx, ny) = fam.orders();
    let table = fam.table();
    json!({
        "ring": ring_to_json(fam.ring()),
        "nx": nx,
        "ny": ny,
        "a": bipoly_to_json(fam.matrix()),
        "nilpotency_index": fam.nilpotency_index(),
        "working_precision": fam.working_precision(),
        "alpha_tables": tables_to_json(table.iter().map(|(k, p)| (*k, p))),
        "provenance": fam.provenance(),
    })
}

fn pair(p: (usize, usize)) -> Value {
    json!([p.0, p.1])
}

fn pair_from(v: &Value, path: &str) -> Result<(usize, usize)> {
    let a = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| schema_error(path, "expected [x_deg, y_deg]"))?;
    Ok((as_usize(&a[0], &format!("{path}[0]"))?, as_usize(&a[1], &format!("{path}[1]"))?))
}

pub fn witness_to_json(w: &Witness) -> Value {
    let mut v = match w {
        Witness::Unit { j, value } => json!({ "kind": "unit", "j": j, "value": poly_to_json(value) }),
        Witness::Split { j, u, v, lhs, rhs } => json!({
            "kind": "split", "j": j, "u": u, "v": v,
            "lhs": poly_to_json(lhs), "rhs": poly_to_json(rhs),
        }),
        Witness::YPower { r1, r2, k, lhs, rhs } => json!({
            "kind": "y_power", "r1": r1, "r2": r2, "k": k,
            "lhs": bipoly_to_json(lhs), "rhs": bipoly_to_json(rhs),
        }),
        Witness::Associativity { m1, m2, m3, lhs, rhs } => json!({
            "kind": "associativity", "m1": pair(*m1), "m2": pair(*m2), "m3": pair(*m3),
            "lhs": bipoly_to_json(lhs), "rhs": bipoly_to_json(rhs),
        }),
        Witness::Iota { check, l, lhs, rhs } => json!({
            "kind": "iota", "check": check, "l": l,
            "lhs": poly_to_json(lhs), "rhs": poly_to_json(rhs),
        }),
        Witness::Containment { j, n, value } => {
            json!({ "kind": "containment", "j": j, "n": n, "value": poly_to_json(value) })
        }
        Witness::ZeroColumn { n, value } => {
            json!({ "kind": "zero_column", "n": n, "value": poly_to_json(value) })
        }
    };
    v["description"] = json!(w.describe());
    v["degree"] = json!(w.degree());
    v
}

pub fn witness_from_json(ring: RingDescriptor, v: &Value, path: &str) -> Result<Witness> {
    let kind = as_str(field(v, path, "kind")?, &child(path, "kind"))?;
    let n = |k: &str| usize_field(v, path, k);
    let p = |k: &str| poly_from_json(ring, field(v, path, k)?, &child(path, k));
    let b = |k: &str| bipoly_from_json(ring, field(v, path, k)?, &child(path, k));
    let pr = |k: &str| pair_from(field(v, path, k)?, &child(path, k));
    Ok(match kind {
        "unit" => Witness::Unit { j: n("j")?, value: p("value")? },
        "split" => Witness::Split {
            j: n("j")?,
            u: n("u")?,
            v: n("v")?,
            lhs: p("lhs")?,
            rhs: p("rhs")?,
        },
        "y_power" => Witness::YPower {
            r1: n("r1")?,
            r2: n("r2")?,
            k: n("k")?,
            lhs: b("lhs")?,
            rhs: b("rhs")?,
        },
        "associativity" => Witness::Associativity {
            m1: pr("m1")?,
            m2: pr("m2")?,
            m3: pr("m3")?,
            lhs: b("lhs")?,
            rhs: b("rhs")?,
        },
        "iota" => Witness::Iota {
            check: as_str(field(v, path, "check")?, &child(path, "check"))?.to_string(),
            l: n("l")?,
            lhs: p("lhs")?,
            rhs: p("rhs")?,
        },
        "containment" => Witness::Containment { j: n("j")?, n: n("n")?, value: p("value")? },
        "zero_column" => Witness::ZeroColumn { n: n("n")?, value: p("value")? },
        other => return Err(schema_error(&child(path, "kind"), format!("unknown witness kind {other:?}"))),
    })
}

pub fn status_name(s: &Status) -> &'static str {
    match s {
        Status::Verified => "Verified",
        Status::Refuted => "Refuted",
        Status::Inconclusive => "Inconclusive",
    }
}

pub fn report_to_json(r: &VerificationReport) -> Value {
    json!({
        "status": status_name(&r.status),
        "degree_bound": r.degree_bound,
        "y_truncation": r.y_truncation,
        "hypothesis": r.hypothesis,
        "checks": r.checks,
        "note": r.note,
        "witness": r.witness.as_ref().map(witness_to_json),
    })
}
