#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64 as C;
use serde_json::Value;
use thopf::ModelParams;

pub mod solver;

/// The kinetics evaluated at complex arguments, written out independently of
/// the library.
pub fn kinetics_c(p: &ModelParams, x: [C; 4]) -> [C; 2] {
    let [u, v, ut, vt] = x;
    [
        u * (1.0 - u) - p.a * u * v / (u + p.b),
        p.r * v * (1.0 - vt / ut),
    ]
}

/// Taylor coefficient of `prod z_j^{k_j}` of `f` at the origin, from the
/// discrete Cauchy integral over circles of radius `rho` with `n` nodes per
/// variable. Exact up to aliasing of order `sum k + n` terms.
pub fn taylor_coeff<const K: usize>(
    f: impl Fn([C; K]) -> C,
    powers: [usize; K],
    rho: f64,
    n: usize,
) -> C {
    let total: usize = powers.iter().sum();
    let mut idx = [0usize; K];
    let mut acc = C::new(0.0, 0.0);
    let count = n.pow(K as u32);
    for _ in 0..count {
        let mut z = [C::new(0.0, 0.0); K];
        let mut phase = 0.0;
        for j in 0..K {
            let th = 2.0 * PI * idx[j] as f64 / n as f64;
            z[j] = C::from_polar(rho, th);
            phase += powers[j] as f64 * th;
        }
        acc += f(z) * C::from_polar(1.0, -phase);
        for j in 0..K {
            idx[j] += 1;
            if idx[j] < n {
                break;
            }
            idx[j] = 0;
        }
    }
    acc / count as f64 / rho.powi(total as i32)
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

pub fn schema_path(kind: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs/schemas")
        .join(format!("{kind}.v1.json"))
}

pub fn load_schema(kind: &str) -> Value {
    let text = std::fs::read_to_string(schema_path(kind)).expect("schema file");
    serde_json::from_str(&text).expect("schema json")
}

fn type_ok(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "integer" => v.is_i64() || v.is_u64(),
        "number" => v.is_number(),
        _ => false,
    }
}

/// Validates the subset of JSON Schema used by the shipped schemas: `type`,
/// `const`, `enum`, `required`, `properties`, `items`, `minItems`, `maxItems`.
pub fn validate(schema: &Value, doc: &Value, path: &str) -> Result<(), String> {
    if let Some(t) = schema.get("type") {
        let ok = match t {
            Value::String(s) => type_ok(s, doc),
            Value::Array(ts) => ts.iter().any(|t| type_ok(t.as_str().unwrap_or(""), doc)),
            _ => false,
        };
        if !ok {
            return Err(format!("{path}: expected type {t}, got {doc}"));
        }
    }
    if doc.is_null() {
        return Ok(());
    }
    if let Some(c) = schema.get("const") {
        if c != doc {
            return Err(format!("{path}: expected {c}, got {doc}"));
        }
    }
    if let Some(Value::Array(opts)) = schema.get("enum") {
        if !opts.contains(doc) {
            return Err(format!("{path}: {doc} not in {opts:?}"));
        }
    }
    if let (Some(Value::Array(req)), Some(obj)) = (schema.get("required"), doc.as_object()) {
        for key in req {
            let key = key.as_str().unwrap();
            if !obj.contains_key(key) {
                return Err(format!("{path}: missing `{key}`"));
            }
        }
    }
    if let (Some(Value::Object(props)), Some(obj)) = (schema.get("properties"), doc.as_object()) {
        for (key, sub) in props {
            if let Some(v) = obj.get(key) {
                validate(sub, v, &format!("{path}.{key}"))?;
            }
        }
    }
    if let Some(arr) = doc.as_array() {
        if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
            if (arr.len() as u64) < min {
                return Err(format!("{path}: fewer than {min} items"));
            }
        }
        if let Some(max) = schema.get("maxItems").and_then(Value::as_u64) {
            if (arr.len() as u64) > max {
                return Err(format!("{path}: more than {max} items"));
            }
        }
        if let Some(items) = schema.get("items") {
            for (i, v) in arr.iter().enumerate() {
                validate(items, v, &format!("{path}[{i}]"))?;
            }
        }
    }
    Ok(())
}
