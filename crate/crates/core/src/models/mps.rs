//! Fixed-format MPS.
//!
//! Names longer than eight characters are replaced by `C{k}` / `R{k}` for
//! the whole model. Model metadata (variant, cuts, roles, full names and row
//! provenance) travels in `* qlin` comment lines so the reader can rebuild
//! the exact model.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::Sense;

use super::{CutFamily, LinearModel, ModelRow, ModelVariant, VarRole, Variable};

const OBJ: &str = "OBJ";

pub fn write_mps(model: &LinearModel<f64>) -> String {
    let col_names = field_names(model.variables.iter().map(|v| v.name.as_str()), 'C');
    let row_names = field_names(model.rows.iter().map(|r| r.name.as_str()), 'R');

    let mut out = String::new();
    out.push_str("* qlin model\n");
    let variant = model.variant.map_or("none", |v| v.name());
    let _ = writeln!(out, "* qlin variant {variant}");
    let _ = writeln!(out, "* qlin cuts {}", cut_list(&model.cuts));
    for (v, short) in model.variables.iter().zip(&col_names) {
        let _ = writeln!(out, "* qlin var {short} {} {} {}", v.role.tag(), v.index, v.name);
    }
    for (r, short) in model.rows.iter().zip(&row_names) {
        let _ = writeln!(out, "* qlin row {short} {} {}", r.name, r.provenance);
    }

    out.push_str("NAME          QLIN\nROWS\n");
    let _ = writeln!(out, " N  {OBJ}");
    for (r, short) in model.rows.iter().zip(&row_names) {
        let code = match r.sense {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        let _ = writeln!(out, " {code}  {short}");
    }

    // column-major view of the rows
    let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.num_vars()];
    for (k, row) in model.rows.iter().enumerate() {
        for &(j, a) in &row.coeffs {
            entries[j].push((k, a));
        }
    }
    let objective: HashMap<usize, f64> = model.objective.iter().copied().collect();

    out.push_str("COLUMNS\n");
    let mut in_marker = false;
    let mut marker = 0;
    for (j, var) in model.variables.iter().enumerate() {
        if var.binary != in_marker {
            let kind = if var.binary { "INTORG" } else { "INTEND" };
            if var.binary {
                marker += 1;
            }
            let _ = writeln!(out, "    {:<8}  {:<8}  {kind}", format!("M{marker}"), "'MARKER'");
            in_marker = var.binary;
        }
        let name = &col_names[j];
        let mut wrote = false;
        if let Some(c) = objective.get(&j) {
            let _ = writeln!(out, "    {name:<8}  {OBJ:<8}  {:>12}", number(*c));
            wrote = true;
        }
        for &(k, a) in &entries[j] {
            let _ = writeln!(out, "    {name:<8}  {:<8}  {:>12}", row_names[k], number(a));
            wrote = true;
        }
        if !wrote {
            let _ = writeln!(out, "    {name:<8}  {OBJ:<8}  {:>12}", number(0.0));
        }
    }
    if in_marker {
        let _ = writeln!(out, "    {:<8}  {:<8}  INTEND", format!("M{marker}"), "'MARKER'");
    }

    out.push_str("RHS\n");
    if model.objective_constant != 0.0 {
        let _ = writeln!(out, "    {:<8}  {OBJ:<8}  {:>12}", "RHS", number(-model.objective_constant));
    }
    for (r, short) in model.rows.iter().zip(&row_names) {
        if r.rhs != 0.0 {
            let _ = writeln!(out, "    {:<8}  {short:<8}  {:>12}", "RHS", number(r.rhs));
        }
    }

    out.push_str("BOUNDS\n");
    for (v, name) in model.variables.iter().zip(&col_names) {
        let mut bound = |code: &str, value: Option<f64>| {
            let _ = match value {
                Some(x) => writeln!(out, " {code} {:<8}  {name:<8}  {:>12}", "BND", number(x)),
                None => writeln!(out, " {code} {:<8}  {name}", "BND"),
            };
        };
        match (v.lower, v.upper) {
            (Some(l), Some(u)) if l == u => bound("FX", Some(l)),
            _ if v.binary => bound("BV", None),
            (None, None) => bound("FR", None),
            (lower, upper) => {
                match lower {
                    None => bound("MI", None),
                    Some(l) if l != 0.0 => bound("LO", Some(l)),
                    Some(_) => {}
                }
                if let Some(u) = upper {
                    bound("UP", Some(u));
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

pub fn read_mps(text: &str) -> Result<LinearModel<f64>> {
    let mut variant = None;
    let mut cuts = Vec::new();
    let mut var_meta: HashMap<String, (VarRole, usize, String)> = HashMap::new();
    let mut row_meta: HashMap<String, (String, String)> = HashMap::new();

    let mut section = "";
    let mut rows: Vec<ModelRow<f64>> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut vars: Vec<Variable<f64>> = Vec::new();
    let mut var_index: HashMap<String, usize> = HashMap::new();
    let mut objective: Vec<(usize, f64)> = Vec::new();
    let mut constant = 0.0;
    let mut integer = false;
    let mut terms: Vec<Vec<(usize, f64)>> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let err = |msg: &str| Error::Parse(format!("MPS line {}: {msg}", lineno + 1));
        if let Some(meta) = line.strip_prefix("* qlin ") {
            let f: Vec<&str> = meta.split_whitespace().collect();
            match f.as_slice() {
                ["variant", "none"] => variant = None,
                ["variant", v] => variant = Some(v.parse::<ModelVariant>()?),
                ["cuts", list] => cuts = parse_cut_list(list)?,
                ["var", short, role, index, full] => {
                    let index = index.parse().map_err(|_| err("bad variable index"))?;
                    var_meta.insert(short.to_string(), (role.parse()?, index, full.to_string()));
                }
                ["row", short, full, prov @ ..] => {
                    row_meta.insert(short.to_string(), (full.to_string(), prov.join(" ")));
                }
                _ => {}
            }
            continue;
        }
        if line.starts_with('*') || line.trim().is_empty() {
            continue;
        }
        if !line.starts_with(' ') {
            section = line.split_whitespace().next().unwrap_or("");
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        match section {
            "ROWS" => {
                let [code, name] = f.as_slice() else { return Err(err("expected sense and name")) };
                let sense = match *code {
                    "N" => continue,
                    "L" => Sense::Le,
                    "G" => Sense::Ge,
                    "E" => Sense::Eq,
                    _ => return Err(err("unknown row type")),
                };
                row_index.insert(name.to_string(), rows.len());
                let (full, provenance) =
                    row_meta.get(*name).cloned().unwrap_or_else(|| (name.to_string(), "mps".into()));
                rows.push(ModelRow { name: full, coeffs: Vec::new(), sense, rhs: 0.0, provenance });
                terms.push(Vec::new());
            }
            "COLUMNS" => {
                if f.get(1) == Some(&"'MARKER'") {
                    integer = f.get(2) == Some(&"'INTORG'") || f.get(2) == Some(&"INTORG");
                    continue;
                }
                if f.len() < 3 || f.len().is_multiple_of(2) {
                    return Err(err("expected column, row, value"));
                }
                let j = match var_index.get(f[0]) {
                    Some(&j) => j,
                    None => {
                        let (role, index, name) =
                            var_meta.get(f[0]).cloned().unwrap_or((VarRole::X, vars.len(), f[0].to_string()));
                        let bounds = if integer { (Some(0.0), Some(1.0)) } else { (Some(0.0), None) };
                        vars.push(Variable { name, role, index, lower: bounds.0, upper: bounds.1, binary: integer });
                        var_index.insert(f[0].to_string(), vars.len() - 1);
                        vars.len() - 1
                    }
                };
                for pair in f[1..].chunks(2) {
                    let value = parse_number(pair[1]).ok_or_else(|| err("bad number"))?;
                    if pair[0] == OBJ {
                        objective.push((j, value));
                    } else {
                        let k = *row_index.get(pair[0]).ok_or_else(|| err("unknown row"))?;
                        terms[k].push((j, value));
                    }
                }
            }
            "RHS" => {
                for pair in f[1..].chunks(2) {
                    let [row, value] = pair else { return Err(err("expected row and value")) };
                    let value = parse_number(value).ok_or_else(|| err("bad number"))?;
                    if *row == OBJ {
                        constant = -value;
                    } else {
                        let k = *row_index.get(*row).ok_or_else(|| err("unknown row"))?;
                        rows[k].rhs = value;
                    }
                }
            }
            "BOUNDS" => {
                let (code, col) = match f.as_slice() {
                    [code, _, col, ..] => (*code, *col),
                    _ => return Err(err("expected bound type, set and column")),
                };
                let j = *var_index.get(col).ok_or_else(|| err("unknown column"))?;
                let value =
                    || -> Result<f64> { f.get(3).and_then(|v| parse_number(v)).ok_or_else(|| err("bad bound value")) };
                let v = &mut vars[j];
                match code {
                    "FX" => {
                        let x = value()?;
                        v.lower = Some(x);
                        v.upper = Some(x);
                    }
                    "BV" => {
                        v.lower = Some(0.0);
                        v.upper = Some(1.0);
                        v.binary = true;
                    }
                    "FR" => {
                        v.lower = None;
                        v.upper = None;
                    }
                    "MI" => v.lower = None,
                    "LO" => v.lower = Some(value()?),
                    "UP" => v.upper = Some(value()?),
                    _ => return Err(err("unknown bound type")),
                }
            }
            _ => return Err(err("data outside a section")),
        }
    }

    let mut model = LinearModel::new(variant);
    model.cuts = cuts;
    model.variables = vars;
    for (row, t) in rows.iter_mut().zip(terms) {
        row.coeffs = super::merge_terms(t);
    }
    model.rows = rows;
    model.set_objective(objective, constant);
    Ok(model)
}

pub(super) fn cut_list(cuts: &[CutFamily]) -> String {
    if cuts.is_empty() {
        "none".into()
    } else {
        cuts.iter().map(|c| c.name()).collect::<Vec<_>>().join(",")
    }
}

pub(super) fn parse_cut_list(text: &str) -> Result<Vec<CutFamily>> {
    if text == "none" {
        return Ok(Vec::new());
    }
    text.split(',').map(str::parse).collect()
}

/// Shortest round-trip decimal, switching to exponent form past 12 chars.
pub(super) fn number(v: f64) -> String {
    let plain = format!("{v}");
    if plain.len() <= 12 {
        plain
    } else {
        format!("{v:e}")
    }
}

pub(super) fn parse_number(text: &str) -> Option<f64> {
    text.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn field_names<'a>(names: impl Iterator<Item = &'a str> + Clone, prefix: char) -> Vec<String> {
    let fits = names.clone().all(|n| !n.is_empty() && n.len() <= 8 && !n.contains(char::is_whitespace) && n != OBJ);
    if fits {
        names.map(str::to_string).collect()
    } else {
        names.enumerate().map(|(k, _)| format!("{prefix}{}", k + 1)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{compute_bound_set, BoundOptions};
    use crate::instance::fixtures::w1;
    use crate::models::{add_cuts, build_model};

    fn model(variant: ModelVariant) -> LinearModel<f64> {
        let opts = BoundOptions { conditional: true, ..BoundOptions::default() };
        let b = compute_bound_set(&w1(), &opts).unwrap();
        build_model(&w1(), &b, variant).unwrap()
    }

    #[test]
    fn round_trips_every_variant() {
        for v in ModelVariant::ALL {
            let m = model(v);
            assert_eq!(read_mps(&write_mps(&m)).unwrap(), m, "{v}");
        }
    }

    #[test]
    fn one_marker_pair_for_contiguous_binaries() {
        let text = write_mps(&model(ModelVariant::BpBar));
        assert_eq!(text.matches("INTORG").count(), 1);
        assert_eq!(text.matches("INTEND").count(), 1);
    }

    #[test]
    fn long_names_are_shortened_and_restored() {
        let mut m = model(ModelVariant::NbpBar);
        m.rows[0].name = "a_very_long_row_name".into();
        m.objective_constant = 2.5;
        let text = write_mps(&m);
        assert!(text.contains(" E  R1\n"));
        let back = read_mps(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn emission_is_deterministic_and_carries_cuts() {
        let opts = BoundOptions { conditional: true, ..BoundOptions::default() };
        let b = compute_bound_set(&w1(), &opts).unwrap();
        let m = build_model(&w1(), &b, ModelVariant::NbpBar).unwrap();
        let m = add_cuts(&m, &w1(), &b, CutFamily::Cond).unwrap();
        assert_eq!(write_mps(&m), write_mps(&m));
        assert_eq!(read_mps(&write_mps(&m)).unwrap(), m);
    }

    #[test]
    fn long_numbers_use_exponent_form() {
        assert_eq!(number(0.5), "0.5");
        assert_eq!(number(1e-20), "1e-20");
        assert_eq!(parse_number(&number(0.1 + 0.2)), Some(0.1 + 0.2));
    }
}
