//! JSON instance files.
//!
//! Keys: `n`, `c`, `Q` (row-major), optional `h`/`G`/`g`, optional
//! `constraints` (`{coeffs, sense, rhs}` with sense `<=`, `>=` or `=`) and
//! optional `fixed` (one-based index to 0/1). Numbers are decimal literals and
//! are read exactly; a rational without a finite decimal expansion is written
//! as a `"p/q"` string, which the reader also accepts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_traits::{One, ToPrimitive, Zero};
use serde_json::{Map, Value};

use super::{ProblemInstance, QuadConstraint, Sense, SideConstraint};
use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, terminating_decimal, Rational};

pub fn load_instance(document: &str) -> Result<ProblemInstance> {
    let root: Value = serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = root.as_object().ok_or_else(|| Error::Parse("instance must be a JSON object".into()))?;

    let n = obj.get("n").and_then(Value::as_u64).ok_or_else(|| Error::Parse("missing or invalid `n`".into()))? as usize;
    if n == 0 {
        return Err(Error::Dimension("`n` must be positive".into()));
    }

    let c = vector(required(obj, "c")?, "c")?;
    expect_len(&c, n, "c")?;
    let q = matrix(required(obj, "Q")?, "Q")?;

    let quad = match (obj.get("h"), obj.get("G"), obj.get("g")) {
        (None, None, None) => None,
        (Some(h), Some(g_matrix), Some(g)) => {
            let h = vector(h, "h")?;
            expect_len(&h, n, "h")?;
            Some(QuadConstraint { h, g_matrix: matrix(g_matrix, "G")?, rhs: number(g, "g")? })
        }
        _ => return Err(Error::Parse("`h`, `G` and `g` must appear together".into())),
    };

    let mut side = Vec::new();
    if let Some(list) = obj.get("constraints") {
        let list = list.as_array().ok_or_else(|| Error::Parse("`constraints` must be a list".into()))?;
        for (k, entry) in list.iter().enumerate() {
            let what = format!("constraints[{k}]");
            let entry = entry.as_object().ok_or_else(|| Error::Parse(format!("{what} must be an object")))?;
            let coeffs = vector(required(entry, "coeffs")?, &what)?;
            let sense = required(entry, "sense")?
                .as_str()
                .ok_or_else(|| Error::Parse(format!("{what}.sense must be a string")))?
                .parse::<Sense>()?;
            let rhs = number(required(entry, "rhs")?, &what)?;
            side.push(SideConstraint { coeffs, sense, rhs });
        }
    }

    let mut fixed = BTreeMap::new();
    if let Some(map) = obj.get("fixed") {
        let map = map.as_object().ok_or_else(|| Error::Parse("`fixed` must be an object".into()))?;
        for (key, value) in map {
            let index: usize = key.parse().map_err(|_| Error::Parse(format!("fixed key `{key}` is not an index")))?;
            if index == 0 || index > n {
                return Err(Error::Dimension(format!("fixed index {index} outside 1..={n}")));
            }
            let v = number(value, "fixed")?;
            let v = if v.is_zero() {
                0
            } else if v.is_one() {
                1
            } else {
                return Err(Error::Value(format!("fixing of x{index} must be 0 or 1")));
            };
            fixed.insert(index - 1, v);
        }
    }

    ProblemInstance::new(c, q, quad, side, fixed)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<ProblemInstance> {
    load_instance(&std::fs::read_to_string(path)?)
}

/// Serializes with keys in the documented order.
pub fn save_instance(inst: &ProblemInstance) -> String {
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"n\": {},", inst.n());
    let _ = write!(out, "  \"c\": {}", row_text(inst.c()));
    out.push_str(",\n  \"Q\": ");
    matrix_text(&mut out, inst.q());
    if let Some(qc) = inst.quad() {
        let _ = write!(out, ",\n  \"h\": {}", row_text(&qc.h));
        out.push_str(",\n  \"G\": ");
        matrix_text(&mut out, &qc.g_matrix);
        let _ = write!(out, ",\n  \"g\": {}", number_text(&qc.rhs));
    }
    if !inst.side_constraints().is_empty() {
        out.push_str(",\n  \"constraints\": [\n");
        let rows: Vec<String> = inst
            .side_constraints()
            .iter()
            .map(|row| {
                format!(
                    "    {{\"coeffs\": {}, \"sense\": \"{}\", \"rhs\": {}}}",
                    row_text(&row.coeffs),
                    row.sense.symbol(),
                    number_text(&row.rhs)
                )
            })
            .collect();
        out.push_str(&rows.join(",\n"));
        out.push_str("\n  ]");
    }
    if !inst.fixed().is_empty() {
        let entries: Vec<String> = inst.fixed().iter().map(|(i, v)| format!("\"{}\": {v}", i + 1)).collect();
        let _ = write!(out, ",\n  \"fixed\": {{{}}}", entries.join(", "));
    }
    out.push_str("\n}\n");
    out
}

pub fn write_instance(path: impl AsRef<Path>, inst: &ProblemInstance) -> Result<()> {
    std::fs::write(path, save_instance(inst))?;
    Ok(())
}

fn number_text(r: &Rational) -> String {
    match terminating_decimal(r) {
        Some(text) => text,
        None => format!("\"{}\"", format_rational(r)),
    }
}

fn row_text(row: &[Rational]) -> String {
    let items: Vec<String> = row.iter().map(number_text).collect();
    format!("[{}]", items.join(", "))
}

fn matrix_text(out: &mut String, m: &[Vec<Rational>]) {
    out.push_str("[\n");
    let rows: Vec<String> = m.iter().map(|r| format!("    {}", row_text(r))).collect();
    out.push_str(&rows.join(",\n"));
    out.push_str("\n  ]");
}

fn required<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::Parse(format!("missing key `{key}`")))
}

fn number(value: &Value, what: &str) -> Result<Rational> {
    let text = match value {
        Value::Number(num) => num.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(Error::Parse(format!("{what}: expected a number"))),
    };
    let r = parse_rational(&text).ok_or_else(|| Error::Value(format!("{what}: `{text}` is not a finite number")))?;
    if !r.to_f64().is_some_and(f64::is_finite) {
        return Err(Error::Value(format!("{what}: `{text}` is out of floating-point range")));
    }
    Ok(r)
}

fn vector(value: &Value, what: &str) -> Result<Vec<Rational>> {
    value
        .as_array()
        .ok_or_else(|| Error::Parse(format!("`{what}` must be a list")))?
        .iter()
        .map(|v| number(v, what))
        .collect()
}

fn matrix(value: &Value, what: &str) -> Result<Vec<Vec<Rational>>> {
    value
        .as_array()
        .ok_or_else(|| Error::Parse(format!("`{what}` must be a list of rows")))?
        .iter()
        .map(|row| vector(row, what))
        .collect()
}

fn expect_len(v: &[Rational], n: usize, what: &str) -> Result<()> {
    if v.len() != n {
        return Err(Error::Dimension(format!("`{what}` has length {}, expected {n}", v.len())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::{mat, w1};
    use crate::instance::{generate_random, GeneratorConfig};

    const W1: &str = r#"{"n": 2, "c": [0, 0], "Q": [[0, -1], [-1, 0]],
        "h": [0, 0], "G": [[0, 1], [1, 0]], "g": 1}"#;

    #[test]
    fn loads_w1() {
        assert_eq!(load_instance(W1).unwrap(), w1());
    }

    #[test]
    fn symmetrizes_on_load() {
        let inst = load_instance(r#"{"n": 2, "c": [0, 0], "Q": [[0, 2], [0, 0]]}"#).unwrap();
        assert_eq!(inst.q(), mat(&[&[0, 1], &[1, 0]]).as_slice());
    }

    #[test]
    fn reports_dimension_errors() {
        let err = load_instance(r#"{"n": 2, "c": [0, 0, 0], "Q": [[0, 0], [0, 0]]}"#);
        assert!(matches!(err, Err(Error::Dimension(_))));
        let err = load_instance(r#"{"n": 2, "c": [0, 0], "Q": [[0, 0]]}"#);
        assert!(matches!(err, Err(Error::Dimension(_))));
        let err = load_instance(r#"{"n": 2, "c": [0, 0], "Q": [[0, 0], [0, 0]], "fixed": {"3": 1}}"#);
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn reports_parse_and_value_errors() {
        assert!(matches!(load_instance("{"), Err(Error::Parse(_))));
        assert!(matches!(load_instance(r#"{"c": [0]}"#), Err(Error::Parse(_))));
        let err = load_instance(r#"{"n": 1, "c": ["NaN"], "Q": [[0]]}"#);
        assert!(matches!(err, Err(Error::Value(_))));
        let err = load_instance(r#"{"n": 1, "c": [1e400], "Q": [[0]]}"#);
        assert!(matches!(err, Err(Error::Value(_))));
        let err = load_instance(r#"{"n": 1, "c": [0], "Q": [[0]], "fixed": {"1": 0.5}}"#);
        assert!(matches!(err, Err(Error::Value(_))));
    }

    #[test]
    fn decimals_are_read_exactly() {
        let inst = load_instance(r#"{"n": 1, "c": [0.1], "Q": [["1/3"]]}"#).unwrap();
        assert_eq!(inst.c()[0], parse_rational("1/10").unwrap());
        assert_eq!(inst.q()[0][0], parse_rational("1/3").unwrap());
    }

    #[test]
    fn writer_emits_keys_in_order() {
        let text = save_instance(&w1());
        let keys = ["\"n\"", "\"c\"", "\"Q\"", "\"h\"", "\"G\"", "\"g\""];
        let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    proptest::proptest! {
        #[test]
        fn save_load_round_trip(seed in 0u64..200, card in proptest::option::of(0usize..5)) {
            let inst = generate_random(&GeneratorConfig {
                n: 5,
                seed,
                cardinality: card,
                with_quad_constraint: seed % 2 == 0,
                ..GeneratorConfig::default()
            }).unwrap();
            let fixed = BTreeMap::from([(seed as usize % 5, (seed % 2) as u8)]);
            let inst = inst.with_fixed(fixed).unwrap();
            let back = load_instance(&save_instance(&inst)).unwrap();
            proptest::prop_assert_eq!(back, inst);
        }
    }

    #[test]
    fn non_decimal_rationals_round_trip_as_strings() {
        let inst = load_instance(r#"{"n": 1, "c": ["-2/3"], "Q": [[0.5]]}"#).unwrap();
        let text = save_instance(&inst);
        assert!(text.contains("\"-2/3\""));
        assert_eq!(load_instance(&text).unwrap(), inst);
    }
}
