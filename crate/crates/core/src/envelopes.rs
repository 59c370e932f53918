//! Piecewise-linear envelopes of `x_i M_i x` over the unit box.
//!
//! With `lo <= M_i x <= hi` on the region, `x_i M_i x` is bounded below by
//! `max(lo x_i, M_i x + hi x_i - hi)` and above by
//! `min(hi x_i, M_i x + lo x_i - lo)`. At binary points both are equalities,
//! which [`check_identities`] verifies row by row.

use crate::bounds::{BoundSet, ConditionalBounds, RowBounds};
use crate::error::{Error, Result};
use crate::instance::ProblemInstance;
use crate::scalar::{max_of, min_of, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeParams<S> {
    pub row: Vec<S>,
    pub lo: S,
    pub hi: S,
    pub i: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeKind {
    /// Convex underestimator.
    Lower,
    /// Concave overestimator.
    Upper,
}

pub fn envelope_value<S: Scalar>(p: &EnvelopeParams<S>, kind: EnvelopeKind, x: &[S]) -> S {
    let rx = p.row.iter().zip(x).fold(S::zero(), |acc, (a, v)| acc + a.clone() * v.clone());
    let xi = x[p.i].clone();
    match kind {
        EnvelopeKind::Lower => max_of(p.lo.clone() * xi.clone(), rx + p.hi.clone() * xi - p.hi.clone()),
        EnvelopeKind::Upper => min_of(p.hi.clone() * xi.clone(), rx + p.lo.clone() * xi - p.lo.clone()),
    }
}

/// Which bound pair fed an envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    /// Unconditional minimum and maximum for both envelopes.
    Plain,
    /// `(min_at_one, max_at_zero)` for the lower envelope and
    /// `(min_at_zero, max_at_one)` for the upper one.
    Conditional,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityEntry<S> {
    /// `Q`, `G`, `G-Q` or `tG-Q`.
    pub matrix: &'static str,
    pub pair: PairKind,
    pub i: usize,
    pub product: S,
    pub lower: S,
    pub upper: S,
}

impl<S: Scalar> IdentityEntry<S> {
    pub fn residual(&self) -> S {
        max_of((self.lower.clone() - self.product.clone()).abs(), (self.upper.clone() - self.product.clone()).abs())
    }

    pub fn sandwiched(&self) -> bool {
        self.lower <= self.product && self.product <= self.upper
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport<S> {
    pub entries: Vec<IdentityEntry<S>>,
    pub max_residual: S,
    pub sandwich_holds: bool,
}

type Family<'a, S> = (&'static str, Vec<Vec<S>>, Option<&'a RowBounds<S>>, Option<&'a ConditionalBounds<S>>);

/// Evaluates both envelopes of every row at a feasible binary point, for
/// `Q`, `G`, `G - Q` and (when present) `theta G - Q`, with each bound pair
/// the set provides.
pub fn check_identities<S: Scalar>(
    inst: &ProblemInstance,
    bounds: &BoundSet<S>,
    x: &[u8],
) -> Result<IdentityReport<S>> {
    if !inst.is_feasible(x)? {
        return Err(Error::InfeasiblePoint);
    }
    let n = inst.n();
    let xs: Vec<S> = x.iter().map(|&v| S::from_i64(v.into())).collect();
    let q_rows: Vec<Vec<S>> = (0..n).map(|i| inst.q_row(i)).collect();
    let mut families: Vec<Family<'_, S>> = vec![("Q", q_rows.clone(), Some(&bounds.gamma), bounds.gamma_cond.as_ref())];
    if inst.has_quad_constraint() {
        let g_rows: Vec<Vec<S>> = (0..n).map(|i| inst.g_row(i)).collect();
        let combine = |t: &S| -> Vec<Vec<S>> {
            g_rows
                .iter()
                .zip(&q_rows)
                .map(|(g, q)| g.iter().zip(q).map(|(a, b)| t.clone() * a.clone() - b.clone()).collect())
                .collect()
        };
        families.push(("G", g_rows.clone(), bounds.lambda.as_ref(), bounds.lambda_cond.as_ref()));
        families.push(("G-Q", combine(&S::one()), bounds.w.as_ref(), bounds.w_cond.as_ref()));
        if let Some(t) = &bounds.theta {
            families.push(("tG-Q", combine(t), None, bounds.w_theta.as_ref()));
        }
    }

    let mut entries = Vec::new();
    for (matrix, rows, plain, cond) in &families {
        for (i, row) in rows.iter().enumerate() {
            let product = if x[i] == 1 {
                row.iter().zip(x).filter(|(_, &v)| v == 1).fold(S::zero(), |acc, (a, _)| acc + a.clone())
            } else {
                S::zero()
            };
            let eval = |lo: &S, hi: &S, kind| {
                let p = EnvelopeParams { row: row.clone(), lo: lo.clone(), hi: hi.clone(), i };
                envelope_value(&p, kind, &xs)
            };
            if let Some(b) = plain {
                entries.push(IdentityEntry {
                    matrix,
                    pair: PairKind::Plain,
                    i,
                    product: product.clone(),
                    lower: eval(&b.min[i], &b.max[i], EnvelopeKind::Lower),
                    upper: eval(&b.min[i], &b.max[i], EnvelopeKind::Upper),
                });
            }
            if let Some(c) = cond {
                entries.push(IdentityEntry {
                    matrix,
                    pair: PairKind::Conditional,
                    i,
                    product,
                    lower: eval(&c.min_at_one[i], &c.max_at_zero[i], EnvelopeKind::Lower),
                    upper: eval(&c.min_at_zero[i], &c.max_at_one[i], EnvelopeKind::Upper),
                });
            }
        }
    }
    let max_residual = entries.iter().fold(S::zero(), |acc, e| max_of(acc, e.residual()));
    let sandwich_holds = entries.iter().all(IdentityEntry::sandwiched);
    Ok(IdentityReport { entries, max_residual, sandwich_holds })
}
