//! Algebraic LP text in the CPLEX style.
//!
//! The Bounds section lists every column in model order, so the reader
//! recovers the column layout. Row provenance and model metadata are kept
//! in `\` comment lines.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::Sense;

use super::mps::{cut_list, number, parse_cut_list, parse_number};
use super::{LinearModel, ModelRow, ModelVariant, VarRole, Variable};

pub fn write_lp_text(model: &LinearModel<f64>) -> String {
    let names: Vec<&str> = model.variables.iter().map(|v| v.name.as_str()).collect();
    let mut out = String::new();
    out.push_str("\\ qlin model\n");
    let _ = writeln!(out, "\\ variant: {}", model.variant.map_or("none", |v| v.name()));
    let _ = writeln!(out, "\\ cuts: {}", cut_list(&model.cuts));
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, &model.objective, &names);
    if model.objective_constant != 0.0 {
        let c = model.objective_constant;
        let sign = if c < 0.0 { "-" } else { "+" };
        let _ = write!(out, " {sign} {}", number(c.abs()));
    }
    out.push_str("\nSubject To\n");
    for row in &model.rows {
        let _ = writeln!(out, "\\ provenance: {}", row.provenance);
        let _ = write!(out, " {}:", row.name);
        write_terms(&mut out, &row.coeffs, &names);
        let _ = writeln!(out, " {} {}", row.sense.symbol(), number(row.rhs));
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        let name = &v.name;
        let _ = match (v.lower, v.upper) {
            (Some(l), Some(u)) if l == u => writeln!(out, " {name} = {}", number(l)),
            (Some(l), Some(u)) => writeln!(out, " {} <= {name} <= {}", number(l), number(u)),
            (Some(l), None) => writeln!(out, " {name} >= {}", number(l)),
            (None, Some(u)) => writeln!(out, " -inf <= {name} <= {}", number(u)),
            (None, None) => writeln!(out, " {name} free"),
        };
    }
    let binaries: Vec<&str> = model.variables.iter().filter(|v| v.binary).map(|v| v.name.as_str()).collect();
    if !binaries.is_empty() {
        let _ = writeln!(out, "Binaries\n {}", binaries.join(" "));
    }
    out.push_str("End\n");
    out
}

fn write_terms(out: &mut String, terms: &[(usize, f64)], names: &[&str]) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (k, &(j, a)) in terms.iter().enumerate() {
        let sign = if a < 0.0 { "-" } else { "+" };
        if k == 0 && a >= 0.0 {
            let _ = write!(out, " {} {}", number(a), names[j]);
        } else {
            let _ = write!(out, " {sign} {} {}", number(a.abs()), names[j]);
        }
    }
}

pub fn read_lp_text(text: &str) -> Result<LinearModel<f64>> {
    let mut variant = None;
    let mut cuts = Vec::new();
    let mut section = "";
    let mut provenance = String::new();
    let mut objective_tokens: Vec<String> = Vec::new();
    let mut raw_rows: Vec<(String, Vec<String>, Sense, f64, String)> = Vec::new();
    let mut vars: Vec<Variable<f64>> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut binaries: Vec<String> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let err = |msg: &str| Error::Parse(format!("LP line {}: {msg}", lineno + 1));
        let trimmed = line.trim();
        if let Some(comment) = trimmed.strip_prefix('\\') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("variant: ") {
                variant = if v == "none" { None } else { Some(v.parse::<ModelVariant>()?) };
            } else if let Some(c) = comment.strip_prefix("cuts: ") {
                cuts = parse_cut_list(c)?;
            } else if let Some(p) = comment.strip_prefix("provenance: ") {
                provenance = p.to_string();
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        if !line.starts_with(' ') {
            section = match trimmed {
                "Minimize" | "Subject To" | "Bounds" | "Binaries" | "End" => trimmed,
                _ => return Err(err("unknown section")),
            };
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match section {
            "Minimize" => {
                let rest = tokens.strip_prefix(&["obj:"]).ok_or_else(|| err("expected `obj:`"))?;
                objective_tokens = rest.iter().map(|s| s.to_string()).collect();
            }
            "Subject To" => {
                let name = tokens.first().and_then(|t| t.strip_suffix(':')).ok_or_else(|| err("expected row name"))?;
                let n = tokens.len();
                if n < 4 {
                    return Err(err("row too short"));
                }
                let sense: Sense = tokens[n - 2].parse()?;
                let rhs = parse_number(tokens[n - 1]).ok_or_else(|| err("bad right-hand side"))?;
                let body = tokens[1..n - 2].iter().map(|s| s.to_string()).collect();
                raw_rows.push((name.to_string(), body, sense, rhs, std::mem::take(&mut provenance)));
            }
            "Bounds" => {
                let (name, lower, upper) = match tokens.as_slice() {
                    [name, "free"] => (*name, None, None),
                    [name, "=", v] => {
                        let v = parse_number(v).ok_or_else(|| err("bad bound"))?;
                        (*name, Some(v), Some(v))
                    }
                    [name, ">=", v] => (*name, Some(parse_number(v).ok_or_else(|| err("bad bound"))?), None),
                    ["-inf", "<=", name, "<=", u] => {
                        (*name, None, Some(parse_number(u).ok_or_else(|| err("bad bound"))?))
                    }
                    [l, "<=", name, "<=", u] => (
                        *name,
                        Some(parse_number(l).ok_or_else(|| err("bad bound"))?),
                        Some(parse_number(u).ok_or_else(|| err("bad bound"))?),
                    ),
                    _ => return Err(err("unrecognized bound")),
                };
                let (role, idx) = role_of(name).ok_or_else(|| err("unrecognized column name"))?;
                index.insert(name.to_string(), vars.len());
                vars.push(Variable { name: name.to_string(), role, index: idx, lower, upper, binary: false });
            }
            "Binaries" => binaries.extend(tokens.iter().map(|s| s.to_string())),
            _ => return Err(err("data outside a section")),
        }
    }

    for name in binaries {
        let j = *index.get(&name).ok_or_else(|| Error::Parse(format!("binary `{name}` has no bounds entry")))?;
        vars[j].binary = true;
    }
    let mut model = LinearModel::new(variant);
    model.cuts = cuts;
    model.variables = vars;
    let (objective, constant) = parse_terms(&objective_tokens, &index)?;
    model.set_objective(objective, constant);
    for (name, body, sense, rhs, provenance) in raw_rows {
        let (terms, constant) = parse_terms(&body, &index)?;
        if constant != 0.0 {
            return Err(Error::Parse(format!("row `{name}` has a constant term")));
        }
        model.rows.push(ModelRow { name, coeffs: super::merge_terms(terms), sense, rhs, provenance });
    }
    Ok(model)
}

/// `[sign] number [name]` sequences; a number without a name is a constant.
fn parse_terms(tokens: &[String], index: &HashMap<String, usize>) -> Result<(Vec<(usize, f64)>, f64)> {
    let bad = |t: &str| Error::Parse(format!("unexpected token `{t}` in linear expression"));
    let mut terms = Vec::new();
    let mut constant = 0.0;
    let mut k = 0;
    while k < tokens.len() {
        let mut sign = 1.0;
        match tokens[k].as_str() {
            "+" => k += 1,
            "-" => {
                sign = -1.0;
                k += 1;
            }
            _ => {}
        }
        let t = tokens.get(k).ok_or_else(|| bad("end of line"))?;
        let value = parse_number(t).ok_or_else(|| bad(t))?;
        k += 1;
        match tokens.get(k) {
            Some(name) if index.contains_key(name) => {
                terms.push((index[name], sign * value));
                k += 1;
            }
            Some(t) if t != "+" && t != "-" => return Err(bad(t)),
            _ => constant += sign * value,
        }
    }
    Ok((terms, constant))
}

/// Role and zero-based index from a generated column name such as `sp3`.
fn role_of(name: &str) -> Option<(VarRole, usize)> {
    let split = name.find(|c: char| c.is_ascii_digit())?;
    let (prefix, digits) = name.split_at(split);
    let k: usize = digits.parse().ok()?;
    let role = [
        VarRole::X,
        VarRole::Gamma,
        VarRole::Lambda,
        VarRole::SPrime,
        VarRole::ZPrime,
        VarRole::S,
        VarRole::Y,
        VarRole::Z,
        VarRole::RegionY,
    ]
    .into_iter()
    .find(|r| r.prefix() == prefix)?;
    Some((role, k.checked_sub(1)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{compute_bound_set, BoundOptions};
    use crate::instance::fixtures::{w1, w2};
    use crate::models::{add_cuts, build_model, CutFamily};

    #[test]
    fn round_trips_every_variant() {
        let opts = BoundOptions { conditional: true, ..BoundOptions::default() };
        for inst in [w1(), w2()] {
            let b = compute_bound_set(&inst, &opts).unwrap();
            for v in ModelVariant::ALL {
                let m = build_model(&inst, &b, v).unwrap();
                assert_eq!(read_lp_text(&write_lp_text(&m)).unwrap(), m, "{v}");
            }
        }
    }

    #[test]
    fn provenance_appears_as_comments() {
        let opts = BoundOptions { conditional: true, ..BoundOptions::default() };
        let b = compute_bound_set(&w1(), &opts).unwrap();
        let m = build_model(&w1(), &b, ModelVariant::NbpBar).unwrap();
        let m = add_cuts(&m, &w1(), &b, CutFamily::Theta).unwrap();
        let text = write_lp_text(&m);
        assert!(text.contains("\\ provenance: cut-theta-upper-at-one"));
        assert!(text.contains("Binaries\n x1 x2\n"));
        let mut m2 = m.clone();
        m2.objective_constant = -1.25;
        assert_eq!(read_lp_text(&write_lp_text(&m2)).unwrap(), m2);
    }

    #[test]
    fn role_names_parse() {
        assert_eq!(role_of("sp3"), Some((VarRole::SPrime, 2)));
        assert_eq!(role_of("s12"), Some((VarRole::S, 11)));
        assert_eq!(role_of("ry1"), Some((VarRole::RegionY, 0)));
        assert_eq!(role_of("q1"), None);
        assert_eq!(role_of("x0"), None);
    }
}
