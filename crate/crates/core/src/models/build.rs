use crate::bounds::{BoundSet, ConditionalBounds, RowBounds};
use crate::error::{Error, Result};
use crate::instance::{ProblemInstance, Sense};
use crate::scalar::Scalar;

use super::{scaled_terms, LinearModel, ModelVariant, VarRole};

/// Builds `variant` from the instance and its bound parameters.
///
/// Fixings (from the instance and from bound preprocessing) become variable
/// bounds on `x`. Without a quadratic constraint the `G`-side variables and
/// rows are left out.
pub fn build_model<S: Scalar>(
    inst: &ProblemInstance,
    bounds: &BoundSet<S>,
    variant: ModelVariant,
) -> Result<LinearModel<S>> {
    let n = inst.n();
    if bounds.gamma.min.len() != n {
        return Err(Error::Dimension(format!("bound set covers {} rows, instance has {n}", bounds.gamma.min.len())));
    }
    let lambda = match inst.quad() {
        Some(_) => Some(bounds.lambda.as_ref().ok_or(Error::MissingBounds("lambda bounds"))?),
        None => None,
    };

    let mut m = LinearModel::new(Some(variant));
    let x: Vec<usize> = (0..n).map(|i| m.add_var(VarRole::X, i, None, None, true)).collect();
    for (i, v) in bounds.all_fixings(inst) {
        let v = S::from_i64(v.into());
        m.variables[x[i]].lower = Some(v.clone());
        m.variables[x[i]].upper = Some(v);
    }

    let ctx = Context { inst, x: &x };
    match variant {
        ModelVariant::Bp => ctx.bp(&mut m, &bounds.gamma, lambda),
        ModelVariant::BpCompact => ctx.bp_compact(&mut m, &bounds.gamma, lambda),
        ModelVariant::BpBar => ctx.bp_bar(&mut m, &bounds.gamma, lambda, false),
        ModelVariant::Small => ctx.bp_bar(&mut m, &bounds.gamma, lambda, true),
        ModelVariant::NbpBar => {
            let gamma = bounds.gamma_cond.as_ref().ok_or(Error::MissingBounds("conditional gamma bounds"))?;
            let lambda = match inst.quad() {
                Some(_) => Some(bounds.lambda_cond.as_ref().ok_or(Error::MissingBounds("conditional lambda bounds"))?),
                None => None,
            };
            ctx.nbp_bar(&mut m, gamma, lambda)
        }
    }

    for (k, row) in inst.side_constraints().iter().enumerate() {
        let terms: Vec<(usize, S)> = x.iter().zip(&row.coeffs).map(|(&j, a)| (j, S::from_rational(a))).collect();
        m.add_row(format!("side{}", k + 1), terms, row.sense, S::from_rational(&row.rhs), "side-constraint");
    }
    Ok(m)
}

struct Context<'a> {
    inst: &'a ProblemInstance,
    x: &'a [usize],
}

impl Context<'_> {
    fn n(&self) -> usize {
        self.x.len()
    }

    fn q_terms<S: Scalar>(&self, i: usize, coef: S) -> Vec<(usize, S)> {
        scaled_terms(self.x, &self.inst.q_row::<S>(i), &coef)
    }

    fn g_terms<S: Scalar>(&self, i: usize, coef: S) -> Vec<(usize, S)> {
        scaled_terms(self.x, &self.inst.g_row::<S>(i), &coef)
    }

    /// `h'x + sum(cols) + shift'x >= g`.
    fn quad_row<S: Scalar>(&self, m: &mut LinearModel<S>, cols: &[usize], shift: &[S]) {
        let qc = self.inst.quad().expect("caller checked the constraint");
        let mut terms: Vec<(usize, S)> = self.x.iter().zip(&qc.h).map(|(&j, a)| (j, S::from_rational(a))).collect();
        terms.extend(cols.iter().map(|&c| (c, S::one())));
        terms.extend(self.x.iter().zip(shift).map(|(&j, a)| (j, a.clone())));
        m.add_row("quad".into(), terms, Sense::Ge, S::from_rational(&qc.rhs), "quadratic-constraint");
    }

    /// `c'x + sum(s) + shift'x`.
    fn objective<S: Scalar>(&self, m: &mut LinearModel<S>, s: &[usize], shift: Option<&[S]>) {
        let mut terms: Vec<(usize, S)> =
            self.x.iter().zip(self.inst.c()).map(|(&j, a)| (j, S::from_rational(a))).collect();
        terms.extend(s.iter().map(|&c| (c, S::one())));
        if let Some(shift) = shift {
            terms.extend(self.x.iter().zip(shift).map(|(&j, a)| (j, a.clone())));
        }
        m.set_objective(terms, S::zero());
    }

    fn bp<S: Scalar>(&self, m: &mut LinearModel<S>, gamma: &RowBounds<S>, lambda: Option<&RowBounds<S>>) {
        let n = self.n();
        let x = self.x;
        let gam: Vec<usize> = (0..n).map(|i| m.add_var(VarRole::Gamma, i, None, None, false)).collect();
        let lam: Vec<usize> = match lambda {
            Some(_) => (0..n).map(|i| m.add_var(VarRole::Lambda, i, None, None, false)).collect(),
            None => Vec::new(),
        };
        let sp: Vec<usize> = (0..n).map(|i| m.add_var(VarRole::SPrime, i, None, None, false)).collect();
        let zp: Vec<usize> = match lambda {
            Some(_) => (0..n).map(|i| m.add_var(VarRole::ZPrime, i, None, None, false)).collect(),
            None => Vec::new(),
        };
        self.objective(m, &sp, None);

        for i in 0..n {
            let mut terms = self.q_terms(i, S::one());
            terms.push((gam[i], -S::one()));
            m.add_row(format!("qd{}", i + 1), terms, Sense::Eq, S::zero(), "gamma-definition");
        }
        if let Some(lambda) = lambda {
            self.quad_row(m, &zp, &[]);
            for i in 0..n {
                let mut terms = self.g_terms(i, S::one());
                terms.push((lam[i], -S::one()));
                m.add_row(format!("gd{}", i + 1), terms, Sense::Eq, S::zero(), "lambda-definition");
            }
            envelope_rows(m, "zp", "z-prime", &zp, &lam, x, lambda);
        }
        envelope_rows(m, "sp", "s-prime", &sp, &gam, x, gamma);
    }

    fn bp_compact<S: Scalar>(&self, m: &mut LinearModel<S>, gamma: &RowBounds<S>, lambda: Option<&RowBounds<S>>) {
        let n = self.n();
        let x = self.x;
        let zero = || Some(S::zero());
        let s: Vec<usize> = (0..n).map(|i| m.add_var(VarRole::S, i, zero(), None, false)).collect();
        let y: Vec<usize> = (0..n).map(|i| m.add_var(VarRole::Y, i, zero(), None, false)).collect();
        let (z, lam): (Vec<usize>, Vec<usize>) = match lambda {
            Some(_) => (
                (0..n).map(|i| m.add_var(VarRole::Z, i, zero(), None, false)).collect(),
                (0..n).map(|i| m.add_var(VarRole::Lambda, i, None, None, false)).collect(),
            ),
            None => (Vec::new(), Vec::new()),
        };
        self.objective(m, &s, Some(&gamma.min));

        for i in 0..n {
            let mut terms = self.q_terms(i, S::one());
            terms.push((y[i], -S::one()));
            terms.push((s[i], -S::one()));
            m.add_row(format!("qs{}", i + 1), terms, Sense::Eq, gamma.min[i].clone(), "q-row-split");
        }
        if let Some(lambda) = lambda {
            self.quad_row(m, &z, &lambda.min);
            for i in 0..n {
                let mut terms = self.g_terms(i, S::one());
                terms.push((lam[i], -S::one()));
                m.add_row(format!("gd{}", i + 1), terms, Sense::Eq, S::zero(), "lambda-definition");
            }
        }
        for i in 0..n {
            let range = gamma.max[i].clone() - gamma.min[i].clone();
            m.add_row(
                format!("su{}", i + 1),
                [(s[i], S::one()), (x[i], -range.clone())],
                Sense::Le,
                S::zero(),
                "s-upper",
            );
            m.add_row(format!("yu{}", i + 1), [(y[i], S::one()), (x[i], range.clone())], Sense::Le, range, "y-upper");
        }
        if let Some(lambda) = lambda {
            for i in 0..n {
                let range = lambda.max[i].clone() - lambda.min[i].clone();
                m.add_row(
                    format!("zu{}", i + 1),
                    [(z[i], S::one()), (x[i], -range.clone())],
                    Sense::Le,
                    S::zero(),
                    "z-upper",
                );
                m.add_row(
                    format!("lzl{}", i + 1),
                    [(lam[i], S::one()), (z[i], -S::one())],
                    Sense::Ge,
                    lambda.min[i].clone(),
                    "lambda-z-lower",
                );
                m.add_row(
                    format!("lzu{}", i + 1),
                    [(lam[i], S::one()), (z[i], -S::one()), (x[i], range)],
                    Sense::Le,
                    lambda.max[i].clone(),
                    "lambda-z-upper",
                );
            }
        }
    }

    /// The relaxed compact model; `small` drops the sign bounds on `y`, `z`.
    fn bp_bar<S: Scalar>(
        &self,
        m: &mut LinearModel<S>,
        gamma: &RowBounds<S>,
        lambda: Option<&RowBounds<S>>,
        small: bool,
    ) {
        let n = self.n();
        let x = self.x;
        let sign = || if small { None } else { Some(S::zero()) };
        let s: Vec<usize> = (0..n).map(|i| m.add_var(VarRole::S, i, Some(S::zero()), None, false)).collect();
        let y: Vec<usize> = (0..n).map(|i| m.add_var(VarRole::Y, i, sign(), None, false)).collect();
        let z: Vec<usize> = match lambda {
            Some(_) => (0..n).map(|i| m.add_var(VarRole::Z, i, sign(), None, false)).collect(),
            None => Vec::new(),
        };
        self.objective(m, &s, Some(&gamma.min));

        for i in 0..n {
            let mut terms = self.q_terms(i, S::one());
            terms.push((y[i], -S::one()));
            terms.push((s[i], -S::one()));
            m.add_row(format!("qs{}", i + 1), terms, Sense::Eq, gamma.min[i].clone(), "q-row-split");
        }
        for i in 0..n {
            let range = gamma.max[i].clone() - gamma.min[i].clone();
            m.add_row(format!("yu{}", i + 1), [(y[i], S::one()), (x[i], range.clone())], Sense::Le, range, "y-upper");
        }
        if let Some(lambda) = lambda {
            self.quad_row(m, &z, &lambda.min);
            for i in 0..n {
                let mut terms = self.g_terms(i, S::one());
                terms.push((z[i], -S::one()));
                m.add_row(format!("gl{}", i + 1), terms, Sense::Ge, lambda.min[i].clone(), "g-row-lower");
            }
            for i in 0..n {
                let range = lambda.max[i].clone() - lambda.min[i].clone();
                m.add_row(format!("zu{}", i + 1), [(z[i], S::one()), (x[i], -range)], Sense::Le, S::zero(), "z-upper");
            }
        }
    }

    /// Conditional-bound model with `s_i = x_i Q_i x - min_at_one_i x_i`,
    /// `y_i = (1 - x_i)(max_at_zero_i - Q_i x)` and
    /// `z_i = x_i G_i x - min_at_one_i x_i` at binary points.
    fn nbp_bar<S: Scalar>(
        &self,
        m: &mut LinearModel<S>,
        gamma: &ConditionalBounds<S>,
        lambda: Option<&ConditionalBounds<S>>,
    ) {
        let n = self.n();
        let x = self.x;
        let s: Vec<usize> = (0..n).map(|i| m.add_var(VarRole::S, i, Some(S::zero()), None, false)).collect();
        let y: Vec<usize> = (0..n).map(|i| m.add_var(VarRole::Y, i, Some(S::zero()), None, false)).collect();
        let z: Vec<usize> = match lambda {
            Some(_) => (0..n).map(|i| m.add_var(VarRole::Z, i, None, None, false)).collect(),
            None => Vec::new(),
        };
        self.objective(m, &s, Some(&gamma.min_at_one));

        for i in 0..n {
            let bar1 = gamma.max_at_zero[i].clone();
            let mut terms = self.q_terms(i, S::one());
            terms.push((s[i], -S::one()));
            terms.push((y[i], S::one()));
            terms.push((x[i], bar1.clone() - gamma.min_at_one[i].clone()));
            m.add_row(format!("qs{}", i + 1), terms, Sense::Eq, bar1, "q-row-split-conditional");
        }
        for i in 0..n {
            let range = gamma.max_at_zero[i].clone() - gamma.min_at_zero[i].clone();
            m.add_row(
                format!("yu{}", i + 1),
                [(y[i], S::one()), (x[i], range.clone())],
                Sense::Le,
                range,
                "y-upper-conditional",
            );
        }
        if let Some(lambda) = lambda {
            self.quad_row(m, &z, &lambda.min_at_one);
            for i in 0..n {
                let range = lambda.max_at_one[i].clone() - lambda.min_at_one[i].clone();
                m.add_row(
                    format!("zu{}", i + 1),
                    [(z[i], S::one()), (x[i], -range)],
                    Sense::Le,
                    S::zero(),
                    "z-upper-conditional",
                );
            }
            for i in 0..n {
                let lo2 = lambda.min_at_zero[i].clone();
                let mut terms = self.g_terms(i, S::one());
                terms.push((z[i], -S::one()));
                terms.push((x[i], lo2.clone() - lambda.min_at_one[i].clone()));
                m.add_row(format!("gl{}", i + 1), terms, Sense::Ge, lo2, "g-row-lower-conditional");
            }
        }
    }
}

/// The four product-linearization rows for `v_i = x_i u_i` with
/// `u_i` in `[min_i, max_i]`.
fn envelope_rows<S: Scalar>(
    m: &mut LinearModel<S>,
    prefix: &str,
    tag: &str,
    v: &[usize],
    u: &[usize],
    x: &[usize],
    b: &RowBounds<S>,
) {
    for i in 0..v.len() {
        let (lo, hi) = (b.min[i].clone(), b.max[i].clone());
        let k = i + 1;
        m.add_row(
            format!("{prefix}a{k}"),
            [(v[i], S::one()), (x[i], -lo.clone())],
            Sense::Ge,
            S::zero(),
            &format!("{tag}-lower-at-one"),
        );
        m.add_row(
            format!("{prefix}b{k}"),
            [(v[i], S::one()), (x[i], -hi.clone())],
            Sense::Le,
            S::zero(),
            &format!("{tag}-upper-at-one"),
        );
        m.add_row(
            format!("{prefix}c{k}"),
            [(u[i], S::one()), (v[i], -S::one()), (x[i], lo.clone())],
            Sense::Ge,
            lo,
            &format!("{tag}-upper-at-zero"),
        );
        m.add_row(
            format!("{prefix}d{k}"),
            [(u[i], S::one()), (v[i], -S::one()), (x[i], hi.clone())],
            Sense::Le,
            hi,
            &format!("{tag}-lower-at-zero"),
        );
    }
}
