use crate::bounds::{BoundSet, ConditionalBounds};
use crate::error::{Error, Result};
use crate::instance::{ProblemInstance, Sense};
use crate::scalar::Scalar;

use super::{CutFamily, LinearModel, VarRole};

/// Appends one family of root cuts.
///
/// All families bound `x_i (G - Q)_i x` (or `x_i (theta G - Q)_i x`), which
/// the model's `s`, `z` and `x` columns express linearly at binary points.
pub fn add_cuts<S: Scalar>(
    model: &LinearModel<S>,
    inst: &ProblemInstance,
    bounds: &BoundSet<S>,
    family: CutFamily,
) -> Result<LinearModel<S>> {
    let incompatible = || Error::IncompatibleVariant {
        variant: model.variant.map_or_else(|| "custom".to_string(), |v| v.to_string()),
        cuts: family.to_string(),
    };
    let variant = model.variant.ok_or_else(incompatible)?;
    if !inst.has_quad_constraint() || !family.compatible_with(variant) {
        return Err(incompatible());
    }
    let n = inst.n();
    let cols = |role| -> Result<Vec<usize>> {
        let c = model.columns(role);
        if c.len() == n {
            Ok(c)
        } else {
            Err(incompatible())
        }
    };
    let (x, s, z) = (cols(VarRole::X)?, cols(VarRole::S)?, cols(VarRole::Z)?);

    let mut out = model.clone();
    match family {
        CutFamily::Base => {
            let lambda = bounds.lambda.as_ref().ok_or(Error::MissingBounds("lambda bounds"))?;
            let w = bounds.w.as_ref().ok_or(Error::MissingBounds("w bounds"))?;
            for i in 0..n {
                let coef = lambda.min[i].clone() - bounds.gamma.min[i].clone() - w.max[i].clone();
                out.add_row(
                    format!("cb{}", i + 1),
                    [(x[i], coef), (s[i], -S::one()), (z[i], S::one())],
                    Sense::Le,
                    S::zero(),
                    "cut-base",
                );
            }
        }
        CutFamily::Cond | CutFamily::Theta => {
            let gamma = bounds.gamma_cond.as_ref().ok_or(Error::MissingBounds("conditional gamma bounds"))?;
            let lambda = bounds.lambda_cond.as_ref().ok_or(Error::MissingBounds("conditional lambda bounds"))?;
            let (theta, wb, prefix) = if family == CutFamily::Cond {
                let w = bounds.w_cond.as_ref().ok_or(Error::MissingBounds("conditional w bounds"))?;
                (S::one(), w, "cc")
            } else {
                let t = bounds.theta.clone().ok_or(Error::MissingBounds("theta"))?;
                let w = bounds.w_theta.as_ref().ok_or(Error::MissingBounds("theta w bounds"))?;
                (t, w, "ct")
            };
            let tag = format!("cut-{}", family.name());
            let cols = CutColumns { x: &x, s: &s, z: &z };
            conditional_cuts(&mut out, inst, &cols, gamma, lambda, wb, &theta, prefix, &tag);
        }
    }
    out.cuts.push(family);
    Ok(out)
}

struct CutColumns<'a> {
    x: &'a [usize],
    s: &'a [usize],
    z: &'a [usize],
}

/// With `T_i = theta z_i - s_i + (theta lambda_lo1 - gamma_lo1) x_i`, equal
/// to `x_i M_i x` for `M = theta G - Q` at binary points, emits the two
/// convex and two concave envelope rows of `x_i M_i x`.
#[allow(clippy::too_many_arguments)]
fn conditional_cuts<S: Scalar>(
    model: &mut LinearModel<S>,
    inst: &ProblemInstance,
    cols: &CutColumns<'_>,
    gamma: &ConditionalBounds<S>,
    lambda: &ConditionalBounds<S>,
    wb: &ConditionalBounds<S>,
    theta: &S,
    prefix: &str,
    tag: &str,
) {
    let n = inst.n();
    for i in 0..n {
        let xi = cols.x[i];
        let shift = theta.clone() * lambda.min_at_one[i].clone() - gamma.min_at_one[i].clone();
        let t_terms = [(cols.z[i], theta.clone()), (cols.s[i], -S::one()), (xi, shift)];
        let q = inst.q_row::<S>(i);
        let g = inst.g_row::<S>(i);
        // same evaluation order as the bound rows, so theta = 1 is exact
        let minus_row: Vec<(usize, S)> =
            (0..n).map(|j| (cols.x[j], q[j].clone() - theta.clone() * g[j].clone())).collect();
        let (lo1, bar1) = (wb.min_at_one[i].clone(), wb.max_at_zero[i].clone());
        let (lo2, bar2) = (wb.min_at_zero[i].clone(), wb.max_at_one[i].clone());
        let k = i + 1;

        let mut a = t_terms.to_vec();
        a.push((xi, -bar2));
        model.add_row(format!("{prefix}a{k}"), a, Sense::Le, S::zero(), &format!("{tag}-upper-at-one"));

        let mut b = t_terms.to_vec();
        b.extend(minus_row.iter().cloned());
        b.push((xi, -lo2.clone()));
        model.add_row(format!("{prefix}b{k}"), b, Sense::Le, -lo2, &format!("{tag}-upper-at-zero"));

        let mut c = t_terms.to_vec();
        c.push((xi, -lo1));
        model.add_row(format!("{prefix}c{k}"), c, Sense::Ge, S::zero(), &format!("{tag}-lower-at-one"));

        let mut d = t_terms.to_vec();
        d.extend(minus_row.iter().cloned());
        d.push((xi, -bar1.clone()));
        model.add_row(format!("{prefix}d{k}"), d, Sense::Ge, -bar1, &format!("{tag}-lower-at-zero"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{compute_bound_set, BoundOptions, ThetaMode};
    use crate::instance::fixtures::{w1, w2};
    use crate::models::{build_model, ModelVariant};

    fn bounds(theta: ThetaMode) -> BoundSet<f64> {
        let opts = BoundOptions { conditional: true, theta_mode: theta, ..BoundOptions::default() };
        compute_bound_set(&w1(), &opts).unwrap()
    }

    #[test]
    fn base_cut_on_w1() {
        let b = bounds(ThetaMode::Frobenius);
        let m = build_model(&w1(), &b, ModelVariant::BpBar).unwrap();
        let cut = add_cuts(&m, &w1(), &b, CutFamily::Base).unwrap();
        let row = cut.rows.iter().find(|r| r.name == "cb1").unwrap();
        let x1 = cut.column(VarRole::X, 0).unwrap();
        let s1 = cut.column(VarRole::S, 0).unwrap();
        let z1 = cut.column(VarRole::Z, 0).unwrap();
        assert_eq!(row.coeffs, vec![(x1, -1.0), (s1, -1.0), (z1, 1.0)]);
        assert_eq!((row.sense, row.rhs), (Sense::Le, 0.0));
        assert_eq!(cut.cuts, vec![CutFamily::Base]);
    }

    #[test]
    fn theta_one_rows_equal_cond_rows() {
        let b = bounds(ThetaMode::Fixed(1.0));
        let m = build_model(&w1(), &b, ModelVariant::NbpBar).unwrap();
        let cond = add_cuts(&m, &w1(), &b, CutFamily::Cond).unwrap();
        let theta = add_cuts(&m, &w1(), &b, CutFamily::Theta).unwrap();
        let added = m.num_rows();
        assert_eq!(cond.num_rows(), added + 8);
        for (a, c) in cond.rows[added..].iter().zip(&theta.rows[added..]) {
            assert_eq!((&a.coeffs, a.sense, &a.rhs), (&c.coeffs, c.sense, &c.rhs));
        }
    }

    #[test]
    fn incompatible_pairs_are_rejected() {
        let b = bounds(ThetaMode::Frobenius);
        let bp = build_model(&w1(), &b, ModelVariant::Bp).unwrap();
        let nbp = build_model(&w1(), &b, ModelVariant::NbpBar).unwrap();
        let bar = build_model(&w1(), &b, ModelVariant::BpBar).unwrap();
        for (m, f) in
            [(&bp, CutFamily::Base), (&nbp, CutFamily::Base), (&bar, CutFamily::Cond), (&bar, CutFamily::Theta)]
        {
            assert!(matches!(add_cuts(m, &w1(), &b, f), Err(Error::IncompatibleVariant { .. })));
        }
        let opts = BoundOptions { conditional: true, ..BoundOptions::default() };
        let b2 = compute_bound_set::<f64>(&w2(), &opts).unwrap();
        let m2 = build_model(&w2(), &b2, ModelVariant::BpBar).unwrap();
        assert!(matches!(add_cuts(&m2, &w2(), &b2, CutFamily::Base), Err(Error::IncompatibleVariant { .. })));
    }
}
