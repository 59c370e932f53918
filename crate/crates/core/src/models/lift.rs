use crate::bounds::BoundSet;
use crate::error::{Error, Result};
use crate::instance::ProblemInstance;
use crate::scalar::Scalar;

use super::{LinearModel, ModelVariant, VarRole};

/// Values of every model column at a binary point: product variables take
/// `x_i Q_i x` or `x_i G_i x`, shifted the way the variant defines them.
pub fn canonical_lift<S: Scalar>(
    model: &LinearModel<S>,
    inst: &ProblemInstance,
    bounds: &BoundSet<S>,
    x: &[u8],
) -> Result<Vec<S>> {
    inst.check_point(x)?;
    let n = inst.n();
    let xs: Vec<S> = x.iter().map(|&v| S::from_i64(v.into())).collect();
    let row_value =
        |row: Vec<S>| -> S { row.into_iter().zip(x).filter(|(_, &xi)| xi == 1).fold(S::zero(), |acc, (a, _)| acc + a) };
    let q: Vec<S> = (0..n).map(|i| row_value(inst.q_row(i))).collect();
    let p: Option<Vec<S>> = inst.has_quad_constraint().then(|| (0..n).map(|i| row_value(inst.g_row(i))).collect());
    let conditional = model.variant == Some(ModelVariant::NbpBar);

    let mut point = Vec::with_capacity(model.num_vars());
    for var in &model.variables {
        let i = var.index;
        let xi = xs[i].clone();
        let one_minus = S::one() - xi.clone();
        let need_p = || p.as_ref().map(|p| p[i].clone()).ok_or(Error::MissingConstraint);
        let value = match var.role {
            VarRole::X => xi,
            VarRole::Gamma => q[i].clone(),
            VarRole::Lambda => need_p()?,
            VarRole::SPrime => xi * q[i].clone(),
            VarRole::ZPrime | VarRole::RegionY => xi * need_p()?,
            VarRole::S => {
                let a = if conditional {
                    &cond(bounds, "conditional gamma bounds", |b| b.gamma_cond.as_ref())?.min_at_one[i]
                } else {
                    &bounds.gamma.min[i]
                };
                xi.clone() * q[i].clone() - a.clone() * xi
            }
            VarRole::Y => {
                if conditional {
                    let c = cond(bounds, "conditional gamma bounds", |b| b.gamma_cond.as_ref())?;
                    one_minus * (c.max_at_zero[i].clone() - q[i].clone())
                } else {
                    q[i].clone() - xi * q[i].clone() - bounds.gamma.min[i].clone() * one_minus
                }
            }
            VarRole::Z => {
                let b = if conditional {
                    cond(bounds, "conditional lambda bounds", |b| b.lambda_cond.as_ref())?.min_at_one[i].clone()
                } else {
                    bounds.lambda.as_ref().ok_or(Error::MissingBounds("lambda bounds"))?.min[i].clone()
                };
                xi.clone() * need_p()? - b * xi
            }
        };
        point.push(value);
    }
    Ok(point)
}

fn cond<'a, S, T>(
    bounds: &'a BoundSet<S>,
    what: &'static str,
    get: impl Fn(&'a BoundSet<S>) -> Option<&'a T>,
) -> Result<&'a T> {
    get(bounds).ok_or(Error::MissingBounds(what))
}

/// Outcome of lifting one binary point into a model.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftCheck<S> {
    pub point: Vec<S>,
    /// Rows and bounds violated by more than the tolerance.
    pub violations: Vec<(String, S)>,
    pub model_objective: S,
    pub instance_objective: S,
}

impl<S: Scalar> LiftCheck<S> {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn objective_matches(&self, tol: &S) -> bool {
        (self.model_objective.clone() - self.instance_objective.clone()).abs() <= *tol
    }
}

/// Lifts `x` and evaluates every row and the objective. With exact scalars
/// pass a zero tolerance.
pub fn check_lift<S: Scalar>(
    model: &LinearModel<S>,
    inst: &ProblemInstance,
    bounds: &BoundSet<S>,
    x: &[u8],
    tol: &S,
) -> Result<LiftCheck<S>> {
    let point = canonical_lift(model, inst, bounds, x)?;
    let violations = model.violations(&point, tol);
    let model_objective = model.objective_value(&point);
    let instance_objective = S::from_rational(&inst.evaluate_point(x)?.objective);
    Ok(LiftCheck { point, violations, model_objective, instance_objective })
}
