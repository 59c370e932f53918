use num_traits::Zero;

use crate::bnb::MilpConfig;
use crate::bounds::{compute_bound_set, BoundOptions, BoundSet, ConditionalBounds, RowBounds};
use crate::envelopes::check_identities;
use crate::error::Result;
use crate::instance::ProblemInstance;
use crate::scalar::{Rational, Scalar};

use super::compare::{compare_with_bounds, CompareOptions, ComparisonReport};
use super::feasible_points;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    /// `conditional` is always switched on.
    pub bounds: BoundOptions,
    pub milp: MilpConfig,
    pub instance_id: String,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { bounds: BoundOptions::default(), milp: MilpConfig::default(), instance_id: "instance".into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub feasible_points: usize,
    /// One line per point whose identities fail.
    pub identity_failures: Vec<String>,
    pub dominance_failures: Vec<String>,
    pub comparison: ComparisonReport,
}

impl CheckReport {
    pub fn flag_count(&self) -> usize {
        self.identity_failures.len() + self.dominance_failures.len() + self.comparison.flags.len()
    }

    pub fn passed(&self) -> bool {
        self.flag_count() == 0
    }
}

/// Exact conditional bounds, the identity checks on every feasible point,
/// bound dominance, and the full comparison against the oracle.
pub fn check_instance(inst: &ProblemInstance, options: &CheckOptions) -> Result<CheckReport> {
    let bound_options = BoundOptions { conditional: true, ..options.bounds.clone() };
    let bounds = compute_bound_set::<Rational>(inst, &bound_options)?;
    let points = feasible_points(inst)?;
    let mut identity_failures = Vec::new();
    for x in &points {
        let report = check_identities(inst, &bounds, x)?;
        let bad: Vec<String> = report
            .entries
            .iter()
            .filter(|e| !e.residual().is_zero() || !e.sandwiched())
            .map(|e| format!("{} row {} ({:?})", e.matrix, e.i + 1, e.pair))
            .collect();
        if !bad.is_empty() {
            let text: Vec<String> = x.iter().map(u8::to_string).collect();
            identity_failures.push(format!("identities fail at ({}): {}", text.join(","), bad.join("; ")));
        }
    }
    let dominance_failures = dominance_violations(&bounds, &Rational::approx(1e-9));
    let compare = CompareOptions {
        bounds: bound_options,
        milp: options.milp.clone(),
        instance_id: options.instance_id.clone(),
        timing: false,
    };
    let comparison = compare_with_bounds(inst, &bounds, &compare)?;
    Ok(CheckReport { feasible_points: points.len(), identity_failures, dominance_failures, comparison })
}

/// Conditional bounds must lie inside the unconditional range: maxima no
/// larger and minima no smaller, up to `tol`. Each failure is described
/// by one string.
pub fn dominance_violations<S: Scalar>(bounds: &BoundSet<S>, tol: &S) -> Vec<String> {
    let mut out = Vec::new();
    let pairs = [
        ("gamma", Some(&bounds.gamma), bounds.gamma_cond.as_ref()),
        ("lambda", bounds.lambda.as_ref(), bounds.lambda_cond.as_ref()),
        ("w", bounds.w.as_ref(), bounds.w_cond.as_ref()),
    ];
    for (name, plain, cond) in pairs {
        if let (Some(plain), Some(cond)) = (plain, cond) {
            contained(name, plain, cond, tol, &mut out);
        }
    }
    out
}

fn contained<S: Scalar>(name: &str, plain: &RowBounds<S>, cond: &ConditionalBounds<S>, tol: &S, out: &mut Vec<String>) {
    for i in 0..plain.min.len() {
        let max = plain.max[i].clone() + tol.clone();
        let min = plain.min[i].clone() - tol.clone();
        for (label, v) in [("max_at_zero", &cond.max_at_zero[i]), ("max_at_one", &cond.max_at_one[i])] {
            if *v > max {
                out.push(format!("{name} {label}[{}] = {} exceeds max {}", i + 1, v.as_f64(), plain.max[i].as_f64()));
            }
        }
        for (label, v) in [("min_at_one", &cond.min_at_one[i]), ("min_at_zero", &cond.min_at_zero[i])] {
            if *v < min {
                out.push(format!("{name} {label}[{}] = {} below min {}", i + 1, v.as_f64(), plain.min[i].as_f64()));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::{w1, w2};

    #[test]
    fn fixtures_pass_the_suite() {
        for inst in [w1(), w2()] {
            let report = check_instance(&inst, &CheckOptions::default()).unwrap();
            assert!(report.passed(), "{report:?}");
            assert!(report.feasible_points > 0);
        }
    }

    #[test]
    fn dominance_catches_a_widened_bound() {
        let mut b =
            compute_bound_set::<f64>(&w2(), &BoundOptions { conditional: true, ..BoundOptions::default() }).unwrap();
        assert!(dominance_violations(&b, &1e-9).is_empty());
        b.gamma_cond.as_mut().unwrap().max_at_one[0] = b.gamma.max[0] + 1.0;
        let found = dominance_violations(&b, &1e-9);
        assert_eq!(found.len(), 1);
        assert!(found[0].starts_with("gamma max_at_one[1]"));
    }
}
