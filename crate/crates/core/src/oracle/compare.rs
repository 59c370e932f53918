use std::fmt::{self, Write as _};
use std::time::Instant;

use crate::bnb::{solve_milp, MilpConfig, MilpSolution, MilpStatus};
use crate::bounds::{compute_bound_set, BoundOptions, BoundSet};
use crate::error::Result;
use crate::format::format_g12;
use crate::instance::ProblemInstance;
use crate::models::{add_cuts, build_model, check_lift, CutFamily, LinearModel, ModelVariant};
use crate::scalar::Scalar;

use super::{enumerate_optimum, OracleResult, OracleStatus};

pub const CSV_HEADER: &str = "instance_id,variant,cuts,lp_bound,milp_obj,oracle_obj,nodes,millis";

/// Absolute tolerance scaled by `max(1, |reference|)`.
const TOL: f64 = 1e-6;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL * b.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FlagKind {
    /// The LP bound exceeds the MILP or oracle optimum.
    LpAboveOptimum,
    /// MILP status or value disagrees with enumeration.
    OracleMismatch,
    /// The MILP's `x` is infeasible or has a different objective.
    ExtractedPointInvalid,
    /// The canonical lift of an oracle minimizer violates the model or
    /// misses its objective.
    LiftInfeasible,
    NbpLooserThanBpBar,
    CutLoweredBound,
    CutChangedOptimum,
}

impl FlagKind {
    pub fn name(self) -> &'static str {
        match self {
            FlagKind::LpAboveOptimum => "lp-above-optimum",
            FlagKind::OracleMismatch => "oracle-mismatch",
            FlagKind::ExtractedPointInvalid => "extracted-point-invalid",
            FlagKind::LiftInfeasible => "lift-infeasible",
            FlagKind::NbpLooserThanBpBar => "nbp-looser-than-bp-bar",
            FlagKind::CutLoweredBound => "cut-lowered-bound",
            FlagKind::CutChangedOptimum => "cut-changed-optimum",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flag {
    pub kind: FlagKind,
    pub variant: ModelVariant,
    pub cuts: Option<CutFamily>,
    pub detail: String,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}: {}", self.kind.name(), self.variant, cuts_name(self.cuts), self.detail)
    }
}

fn cuts_name(cuts: Option<CutFamily>) -> &'static str {
    cuts.map_or("none", CutFamily::name)
}

/// Outcome of one model against the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceCheck {
    pub milp: MilpSolution<f64>,
    /// Problems found; empty means the model passed.
    pub issues: Vec<(FlagKind, String)>,
}

impl EquivalenceCheck {
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Builds the model in `S`, lifts every oracle minimizer into it, solves
/// the MILP in floating point and compares both directions with the oracle.
pub fn verify_equivalence<S: Scalar>(
    inst: &ProblemInstance,
    bounds: &BoundSet<S>,
    variant: ModelVariant,
    cuts: Option<CutFamily>,
    oracle: &OracleResult,
    milp: &MilpConfig,
) -> Result<EquivalenceCheck> {
    let model = combo_model(inst, bounds, variant, cuts)?;
    let (check, _) = equivalence_for(inst, &model, bounds, oracle, milp)?;
    Ok(check)
}

fn combo_model<S: Scalar>(
    inst: &ProblemInstance,
    bounds: &BoundSet<S>,
    variant: ModelVariant,
    cuts: Option<CutFamily>,
) -> Result<LinearModel<S>> {
    let model = build_model(inst, bounds, variant)?;
    match cuts {
        Some(family) => add_cuts(&model, inst, bounds, family),
        None => Ok(model),
    }
}

fn equivalence_for<S: Scalar>(
    inst: &ProblemInstance,
    model: &LinearModel<S>,
    bounds: &BoundSet<S>,
    oracle: &OracleResult,
    milp: &MilpConfig,
) -> Result<(EquivalenceCheck, u128)> {
    let mut issues = Vec::new();
    let tol = if S::EXACT { S::zero() } else { S::approx(TOL) };
    for x in &oracle.argmins {
        let lift = check_lift(model, inst, bounds, x, &tol)?;
        if !lift.feasible() {
            let (what, by) = &lift.violations[0];
            issues.push((
                FlagKind::LiftInfeasible,
                format!("lift of {} violates {what} by {}", point_text(x), format_g12(by.as_f64())),
            ));
        } else if !lift.objective_matches(&S::approx(TOL * lift.instance_objective.as_f64().abs().max(1.0))) {
            issues.push((
                FlagKind::LiftInfeasible,
                format!(
                    "lift of {} has objective {} instead of {}",
                    point_text(x),
                    format_g12(lift.model_objective.as_f64()),
                    format_g12(lift.instance_objective.as_f64())
                ),
            ));
        }
    }

    let start = Instant::now();
    let sol = solve_milp(&model.to_f64(), milp)?;
    let millis = start.elapsed().as_millis();
    let oracle_value = oracle.objective.as_ref().map(|v| v.as_f64());
    match (sol.status, sol.objective, oracle_value) {
        (MilpStatus::NodeLimit, _, _) => {
            issues.push((FlagKind::OracleMismatch, format!("node limit reached after {} nodes", sol.nodes)));
        }
        (MilpStatus::Infeasible, _, None) => {}
        (MilpStatus::Optimal, Some(m), Some(o)) => {
            if !close(m, o) {
                issues.push((
                    FlagKind::OracleMismatch,
                    format!("MILP optimum {} but oracle optimum {}", format_g12(m), format_g12(o)),
                ));
            }
            let x = sol.x.as_deref().unwrap_or_default();
            let value = inst.evaluate_point(x)?;
            let original = value.objective.as_f64();
            if !value.feasible {
                issues.push((FlagKind::ExtractedPointInvalid, format!("{} is infeasible", point_text(x))));
            } else if !close(original, o) || !close(m, original) {
                issues.push((
                    FlagKind::ExtractedPointInvalid,
                    format!("{} has objective {}", point_text(x), format_g12(original)),
                ));
            }
        }
        (status, _, o) => {
            let oracle_text = o.map_or("infeasible".to_string(), format_g12);
            issues.push((FlagKind::OracleMismatch, format!("MILP status {status:?} but oracle {oracle_text}")));
        }
    }
    Ok((EquivalenceCheck { milp: sol, issues }, millis))
}

fn point_text(x: &[u8]) -> String {
    let parts: Vec<String> = x.iter().map(u8::to_string).collect();
    format!("({})", parts.join(","))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOptions {
    pub bounds: BoundOptions,
    pub milp: MilpConfig,
    pub instance_id: String,
    /// Records solve times; off by default so the CSV is reproducible.
    pub timing: bool,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            bounds: BoundOptions { conditional: true, ..BoundOptions::default() },
            milp: MilpConfig::default(),
            instance_id: "instance".into(),
            timing: false,
        }
    }
}

/// One `(variant, cuts)` combination. `None` in an objective cell means
/// infeasible; `milp_objective` is also `None` after a node limit, which
/// `milp_status` records.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub variant: ModelVariant,
    pub cuts: Option<CutFamily>,
    pub lp_bound: Option<f64>,
    pub milp_status: MilpStatus,
    pub milp_objective: Option<f64>,
    pub oracle_objective: Option<Option<f64>>,
    pub nodes: usize,
    pub millis: Option<u128>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub instance_id: String,
    pub theta: Option<f64>,
    pub rows: Vec<ComparisonRow>,
    pub flags: Vec<Flag>,
}

impl ComparisonReport {
    pub fn row(&self, variant: ModelVariant, cuts: Option<CutFamily>) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.variant == variant && r.cuts == cuts)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        let value = |v: Option<f64>| v.map_or("inf".to_string(), format_g12);
        for r in &self.rows {
            let milp = match r.milp_status {
                MilpStatus::NodeLimit => "NA".to_string(),
                _ => value(r.milp_objective),
            };
            let oracle = r.oracle_objective.map_or("NA".to_string(), value);
            let millis = r.millis.map_or("NA".to_string(), |m| m.to_string());
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.instance_id,
                r.variant,
                cuts_name(r.cuts),
                value(r.lp_bound),
                milp,
                oracle,
                r.nodes,
                millis
            );
        }
        out
    }
}

/// Variants and cut families in report order. `NBP-bar` needs conditional
/// bounds and every cut family needs the quadratic constraint.
fn combinations(conditional: bool, has_quad: bool) -> Vec<(ModelVariant, Option<CutFamily>)> {
    let mut out = Vec::new();
    for variant in ModelVariant::ALL {
        if variant.needs_conditional() && !conditional {
            continue;
        }
        out.push((variant, None));
        if has_quad {
            for family in CutFamily::ALL {
                if family.compatible_with(variant) {
                    out.push((variant, Some(family)));
                }
            }
        }
    }
    out
}

/// Floating-point bounds from `options`, then [`compare_with_bounds`].
pub fn compare_relaxations(inst: &ProblemInstance, options: &CompareOptions) -> Result<ComparisonReport> {
    let bounds = compute_bound_set::<f64>(inst, &options.bounds)?;
    compare_with_bounds(inst, &bounds, options)
}

/// Solves every valid combination and records the expectation checks as
/// flags. Instances beyond the oracle limit get `NA` oracle cells and only
/// the relaxation comparisons.
pub fn compare_with_bounds<S: Scalar>(
    inst: &ProblemInstance,
    bounds: &BoundSet<S>,
    options: &CompareOptions,
) -> Result<ComparisonReport> {
    let oracle = match enumerate_optimum(inst) {
        Ok(r) => Some(r),
        Err(crate::error::Error::TooLarge(_)) => None,
        Err(e) => return Err(e),
    };
    let unknown =
        OracleResult { status: OracleStatus::Infeasible, objective: None, argmins: Vec::new(), feasible_count: 0 };
    let oracle_value = oracle.as_ref().map(|o| o.objective.as_ref().map(|v| v.as_f64()));

    let mut rows = Vec::new();
    let mut flags = Vec::new();
    let combos = combinations(bounds.gamma_cond.is_some(), inst.has_quad_constraint());
    for (variant, cuts) in combos {
        let model = combo_model(inst, bounds, variant, cuts)?;
        let (check, millis) =
            equivalence_for(inst, &model, bounds, oracle.as_ref().unwrap_or(&unknown), &options.milp)?;
        let mut issues = check.issues;
        if oracle.is_none() {
            issues.retain(|(kind, _)| !matches!(kind, FlagKind::OracleMismatch | FlagKind::ExtractedPointInvalid));
        }
        let sol = check.milp;
        let lp_bound = sol.root_bound;
        if let Some(lp) = lp_bound {
            let optima = [sol.objective, oracle_value.flatten()];
            if let Some(opt) = optima.into_iter().flatten().find(|&opt| lp > opt + TOL * opt.abs().max(1.0)) {
                issues.push((
                    FlagKind::LpAboveOptimum,
                    format!("LP bound {} above optimum {}", format_g12(lp), format_g12(opt)),
                ));
            }
        }
        flags.extend(issues.into_iter().map(|(kind, detail)| Flag { kind, variant, cuts, detail }));
        rows.push(ComparisonRow {
            variant,
            cuts,
            lp_bound,
            milp_status: sol.status,
            milp_objective: sol.objective,
            oracle_objective: oracle_value,
            nodes: sol.nodes,
            millis: options.timing.then_some(millis),
        });
    }
    flags.extend(relaxation_flags(&rows));
    Ok(ComparisonReport {
        instance_id: options.instance_id.clone(),
        theta: bounds.theta.as_ref().map(|t| t.as_f64()),
        rows,
        flags,
    })
}

/// Tightness expectations between rows: NBP-bar against BP-bar, and every
/// cut row against its uncut model.
fn relaxation_flags(rows: &[ComparisonRow]) -> Vec<Flag> {
    let find = |v, c| rows.iter().find(|r: &&ComparisonRow| r.variant == v && r.cuts == c);
    let infinite = |b: Option<f64>| b.unwrap_or(f64::INFINITY);
    let mut flags = Vec::new();
    if let (Some(nbp), Some(bar)) = (find(ModelVariant::NbpBar, None), find(ModelVariant::BpBar, None)) {
        let (a, b) = (infinite(nbp.lp_bound), infinite(bar.lp_bound));
        if a < b && !close(a, b) {
            flags.push(Flag {
                kind: FlagKind::NbpLooserThanBpBar,
                variant: ModelVariant::NbpBar,
                cuts: None,
                detail: format!("LP bound {} below BP-bar {}", format_g12(a), format_g12(b)),
            });
        }
    }
    for row in rows.iter().filter(|r| r.cuts.is_some()) {
        let Some(base) = find(row.variant, None) else { continue };
        let (cut, plain) = (infinite(row.lp_bound), infinite(base.lp_bound));
        if cut < plain && !close(cut, plain) {
            flags.push(Flag {
                kind: FlagKind::CutLoweredBound,
                variant: row.variant,
                cuts: row.cuts,
                detail: format!("LP bound {} below uncut {}", format_g12(cut), format_g12(plain)),
            });
        }
        let same = match (row.milp_objective, base.milp_objective) {
            (Some(a), Some(b)) => close(a, b),
            (a, b) => a.is_none() && b.is_none() && row.milp_status == base.milp_status,
        };
        if !same {
            let text = |v: Option<f64>| v.map_or("none".to_string(), format_g12);
            flags.push(Flag {
                kind: FlagKind::CutChangedOptimum,
                variant: row.variant,
                cuts: row.cuts,
                detail: format!("MILP optimum {} versus uncut {}", text(row.milp_objective), text(base.milp_objective)),
            });
        }
    }
    flags
}
