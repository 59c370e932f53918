//! LP bound parameters for the rows of `Q`, `G` and `G - Q`.
//!
//! Every parameter is the optimum of a row over a polyhedral region that
//! contains all feasible binary points: the continuous relaxation of the
//! side constraints, optionally tightened by a linear relaxation of the
//! quadratic constraint. Conditional parameters additionally fix the row's
//! own variable to 0 or 1. A fixing that empties the region proves the
//! variable takes the other value, so it is recorded and the computation
//! restarts on the smaller region.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::{ProblemInstance, Sense};
use crate::models::{LinearModel, VarRole};
use crate::scalar::{max_of, Rational, Scalar};
use crate::simplex::{solve_lp, LpStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Extreme<S> {
    Value(S),
    /// The region (with the fixing, if any) has no points.
    Infeasible,
}

/// Optimum of `row . x` over `region`, optionally with `x_i = v`.
///
/// `row` covers the `X` columns, which come first in every region.
pub fn row_extremes<S: Scalar>(
    row: &[S],
    region: &LinearModel<S>,
    direction: Direction,
    fixing: Option<(usize, u8)>,
) -> Result<Extreme<S>> {
    let mut objective = vec![S::zero(); region.num_vars()];
    for (j, a) in row.iter().enumerate() {
        objective[j] = match direction {
            Direction::Min => a.clone(),
            Direction::Max => -a.clone(),
        };
    }
    let mut lp = region.to_lp_with(objective);
    if let Some((i, v)) = fixing {
        let v = if v == 0 { S::zero() } else { S::one() };
        lp.lower[i] = Some(v.clone());
        lp.upper[i] = Some(v);
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => {
            let x = sol.x.expect("optimal solution has a point");
            let value = row.iter().zip(&x).fold(S::zero(), |acc, (a, xi)| acc + a.clone() * xi.clone());
            Ok(Extreme::Value(value))
        }
        LpStatus::Infeasible => Ok(Extreme::Infeasible),
        // x lives in the unit box, so a row over x cannot be unbounded
        LpStatus::Unbounded => Err(Error::Unbounded),
    }
}

/// The continuous relaxation: `x` in `[0, 1]^n`, side constraints and the
/// given fixings as variable bounds.
pub fn relaxation_region<S: Scalar>(inst: &ProblemInstance, fixed: &BTreeMap<usize, u8>) -> LinearModel<S> {
    let mut region = LinearModel::new(None);
    for i in 0..inst.n() {
        let (lo, hi) = match fixed.get(&i) {
            Some(&v) => (S::from_i64(v.into()), S::from_i64(v.into())),
            None => (S::zero(), S::one()),
        };
        region.add_var(VarRole::X, i, Some(lo), Some(hi), false);
    }
    for (k, row) in inst.side_constraints().iter().enumerate() {
        let terms = row.coeffs.iter().enumerate().map(|(j, a)| (j, S::from_rational(a)));
        region.add_row(format!("side{}", k + 1), terms, row.sense, S::from_rational(&row.rhs), "side-constraint");
    }
    region
}

/// Adds `y` variables and the rows `h'x + sum(y) >= g`,
/// `y_i <= max_at_one_i x_i` and `y_i <= G_i x + min_at_zero_i (x_i - 1)`,
/// which hold at every feasible binary point with `y_i = x_i G_i x`.
pub fn enhanced_region<S: Scalar>(
    inst: &ProblemInstance,
    base: &LinearModel<S>,
    lambda_max_at_one: &[S],
    lambda_min_at_zero: &[S],
) -> Result<LinearModel<S>> {
    let qc = inst.quad().ok_or(Error::MissingConstraint)?;
    let n = inst.n();
    let mut region = base.clone();
    let y: Vec<usize> = (0..n).map(|i| region.add_var(VarRole::RegionY, i, None, None, false)).collect();
    let mut terms: Vec<(usize, S)> = qc.h.iter().enumerate().map(|(j, a)| (j, S::from_rational(a))).collect();
    terms.extend(y.iter().map(|&c| (c, S::one())));
    region.add_row("rquad".into(), terms, Sense::Ge, S::from_rational(&qc.rhs), "region-quadratic");
    for i in 0..n {
        region.add_row(
            format!("ryu{}", i + 1),
            [(y[i], S::one()), (i, -lambda_max_at_one[i].clone())],
            Sense::Le,
            S::zero(),
            "region-envelope-upper",
        );
        let mut terms: Vec<(usize, S)> = inst.g_row::<S>(i).into_iter().enumerate().map(|(j, a)| (j, -a)).collect();
        terms.push((y[i], S::one()));
        terms.push((i, -lambda_min_at_zero[i].clone()));
        region.add_row(
            format!("ryg{}", i + 1),
            terms,
            Sense::Le,
            -lambda_min_at_zero[i].clone(),
            "region-envelope-row",
        );
    }
    Ok(region)
}

/// Unconditional minimum and maximum per row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowBounds<S> {
    pub min: Vec<S>,
    pub max: Vec<S>,
}

/// Row extremes with the row's own variable fixed.
///
/// For an index whose variable is fixed (by the instance or by
/// preprocessing) every entry equals the unconditional bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalBounds<S> {
    /// Maximum of `M_i x` with `x_i = 0`.
    pub max_at_zero: Vec<S>,
    /// Minimum of `M_i x` with `x_i = 1`.
    pub min_at_one: Vec<S>,
    /// Maximum of `M_i x` with `x_i = 1`.
    pub max_at_one: Vec<S>,
    /// Minimum of `M_i x` with `x_i = 0`.
    pub min_at_zero: Vec<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundSet<S> {
    /// Rows of `Q`.
    pub gamma: RowBounds<S>,
    /// Rows of `G`, over the plain relaxation.
    pub lambda: Option<RowBounds<S>>,
    /// Rows of `G - Q`.
    pub w: Option<RowBounds<S>>,
    pub gamma_cond: Option<ConditionalBounds<S>>,
    pub lambda_cond: Option<ConditionalBounds<S>>,
    pub w_cond: Option<ConditionalBounds<S>>,
    pub theta: Option<S>,
    /// Rows of `theta G - Q`.
    pub w_theta: Option<ConditionalBounds<S>>,
    /// Fixings proven by infeasible conditional LPs, excluding the
    /// instance's own fixings.
    pub forced: BTreeMap<usize, u8>,
    pub enhanced: bool,
}

impl<S: Scalar> BoundSet<S> {
    /// Instance fixings together with the forced ones.
    pub fn all_fixings(&self, inst: &ProblemInstance) -> BTreeMap<usize, u8> {
        let mut out = inst.fixed().clone();
        out.extend(self.forced.iter().map(|(&i, &v)| (i, v)));
        out
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> BoundSet<T> {
        let vec = |v: &[S]| v.iter().map(&f).collect::<Vec<T>>();
        let rb = |b: &RowBounds<S>| RowBounds { min: vec(&b.min), max: vec(&b.max) };
        let cb = |b: &ConditionalBounds<S>| ConditionalBounds {
            max_at_zero: vec(&b.max_at_zero),
            min_at_one: vec(&b.min_at_one),
            max_at_one: vec(&b.max_at_one),
            min_at_zero: vec(&b.min_at_zero),
        };
        BoundSet {
            gamma: rb(&self.gamma),
            lambda: self.lambda.as_ref().map(rb),
            w: self.w.as_ref().map(rb),
            gamma_cond: self.gamma_cond.as_ref().map(cb),
            lambda_cond: self.lambda_cond.as_ref().map(cb),
            w_cond: self.w_cond.as_ref().map(cb),
            theta: self.theta.as_ref().map(&f),
            w_theta: self.w_theta.as_ref().map(cb),
            forced: self.forced.clone(),
            enhanced: self.enhanced,
        }
    }

    pub fn to_f64(&self) -> BoundSet<f64> {
        self.map(|v| v.as_f64())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    /// Lower end of the grid; raised to `eps` when smaller.
    pub lo: f64,
    pub hi: f64,
    /// Number of intervals; the grid has `steps + 1` points.
    pub steps: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { lo: 0.1, hi: 10.0, steps: 100 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ThetaMode {
    /// `tr(QG) / tr(GG)` when the numerator is positive, else 1.
    Frobenius,
    /// Minimizes the spread of the `theta G - Q` bounds on a grid.
    Grid(GridConfig),
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundOptions {
    pub conditional: bool,
    pub enhanced: bool,
    pub theta_mode: ThetaMode,
    /// Lower clamp for the multiplier.
    pub eps: f64,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self { conditional: false, enhanced: false, theta_mode: ThetaMode::Frobenius, eps: 1e-3 }
    }
}

impl BoundOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::Value("eps must be positive".into()));
        }
        match &self.theta_mode {
            ThetaMode::Fixed(t) if !(*t > 0.0 && t.is_finite()) => {
                Err(Error::Value("fixed theta must be positive".into()))
            }
            ThetaMode::Grid(g) if !(g.hi.is_finite() && g.hi >= g.lo.max(self.eps) && g.steps > 0) => {
                Err(Error::Value("grid needs hi >= max(lo, eps) and steps > 0".into()))
            }
            _ => Ok(()),
        }
    }
}

pub fn compute_bound_set<S: Scalar>(inst: &ProblemInstance, options: &BoundOptions) -> Result<BoundSet<S>> {
    options.validate()?;
    if options.enhanced && !inst.has_quad_constraint() {
        return Err(Error::MissingConstraint);
    }
    let n = inst.n();
    let q_rows: Vec<Vec<S>> = (0..n).map(|i| inst.q_row(i)).collect();
    let g_rows: Option<Vec<Vec<S>>> = inst.has_quad_constraint().then(|| (0..n).map(|i| inst.g_row(i)).collect());
    let w_rows: Option<Vec<Vec<S>>> = g_rows.as_ref().map(|g| combine_rows(g, &q_rows, &S::one()));

    let mut forced: BTreeMap<usize, u8> = BTreeMap::new();
    'restart: loop {
        let mut fixings = inst.fixed().clone();
        fixings.extend(forced.iter().map(|(&i, &v)| (i, v)));
        let base = relaxation_region::<S>(inst, &fixings);

        let mut lambda = None;
        let mut lambda_cond = None;
        if let Some(g_rows) = &g_rows {
            let uncond = unconditional(g_rows, &base)?;
            if options.conditional || options.enhanced {
                match conditional_rows(g_rows, &base, &fixings, &uncond)? {
                    Ok(c) => lambda_cond = Some(c),
                    Err(new) => {
                        absorb(&mut forced, new, inst)?;
                        continue 'restart;
                    }
                }
            }
            lambda = Some(uncond);
        }

        let region = match (&lambda_cond, options.enhanced) {
            (Some(lc), true) => enhanced_region(inst, &base, &lc.max_at_one, &lc.min_at_zero)?,
            _ => base,
        };

        let gamma = unconditional(&q_rows, &region)?;
        let w = match &w_rows {
            Some(rows) => Some(unconditional(rows, &region)?),
            None => None,
        };

        let mut gamma_cond = None;
        let mut w_cond = None;
        let mut theta = None;
        let mut w_theta = None;
        if options.conditional {
            match conditional_rows(&q_rows, &region, &fixings, &gamma)? {
                Ok(c) => gamma_cond = Some(c),
                Err(new) => {
                    absorb(&mut forced, new, inst)?;
                    continue 'restart;
                }
            }
            if let (Some(rows), Some(w)) = (&w_rows, &w) {
                match conditional_rows(rows, &region, &fixings, w)? {
                    Ok(c) => w_cond = Some(c),
                    Err(new) => {
                        absorb(&mut forced, new, inst)?;
                        continue 'restart;
                    }
                }
                let t = choose_theta(inst, &options.theta_mode, &region, options.eps)?;
                match theta_bounds(&q_rows, g_rows.as_ref().unwrap(), &t, &region, &fixings)? {
                    Ok(c) => w_theta = Some(c),
                    Err(new) => {
                        absorb(&mut forced, new, inst)?;
                        continue 'restart;
                    }
                }
                theta = Some(t);
            }
        }

        return Ok(BoundSet {
            gamma,
            lambda,
            w,
            gamma_cond,
            lambda_cond,
            w_cond,
            theta,
            w_theta,
            forced,
            enhanced: options.enhanced,
        });
    }
}

/// Chooses the multiplier for the `theta G - Q` family. Grid search skips
/// indices fixed in `region`.
pub fn choose_theta<S: Scalar>(
    inst: &ProblemInstance,
    mode: &ThetaMode,
    region: &LinearModel<S>,
    eps: f64,
) -> Result<S> {
    let qc = inst.quad().ok_or(Error::MissingConstraint)?;
    match mode {
        ThetaMode::Fixed(t) => Ok(S::approx(*t)),
        ThetaMode::Frobenius => {
            let t = frobenius_ratio(inst.q(), &qc.g_matrix);
            Ok(max_of(S::from_rational(&t), S::approx(eps)))
        }
        ThetaMode::Grid(grid) => {
            let n = inst.n();
            let q_rows: Vec<Vec<S>> = (0..n).map(|i| inst.q_row(i)).collect();
            let g_rows: Vec<Vec<S>> = (0..n).map(|i| inst.g_row(i)).collect();
            let fixed = region_fixings(region);
            let free: Vec<usize> = (0..n).filter(|i| !fixed.contains_key(i)).collect();
            let lo = S::approx(grid.lo.max(eps));
            let hi = S::approx(grid.hi);
            let steps = S::from_i64(grid.steps as i64);

            let scores: Vec<Option<S>> = (0..=grid.steps)
                .into_par_iter()
                .map(|k| {
                    let t = lo.clone() + (hi.clone() - lo.clone()) * S::from_i64(k as i64) / steps.clone();
                    let rows = combine_rows(&g_rows, &q_rows, &t);
                    let mut total = S::zero();
                    for &i in &free {
                        let hi_v = row_extremes(&rows[i], region, Direction::Max, Some((i, 0)))?;
                        let lo_v = row_extremes(&rows[i], region, Direction::Min, Some((i, 1)))?;
                        match (hi_v, lo_v) {
                            (Extreme::Value(a), Extreme::Value(b)) => {
                                let d = a - b;
                                total = total + d.clone() * d;
                            }
                            // an infeasible side is caught by the bound computation
                            _ => return Ok(None),
                        }
                    }
                    Ok(Some(total))
                })
                .collect::<Result<_>>()?;

            let mut best: Option<(usize, S)> = None;
            for (k, score) in scores.into_iter().enumerate() {
                if let Some(s) = score {
                    if best.as_ref().is_none_or(|(_, b)| s < *b) {
                        best = Some((k, s));
                    }
                }
            }
            let k = best.map_or(0, |(k, _)| k);
            Ok(lo.clone() + (hi - lo) * S::from_i64(k as i64) / steps)
        }
    }
}

/// `tr(QG') / tr(GG')` when the numerator is positive and `G != 0`,
/// otherwise 1.
pub fn frobenius_ratio(q: &[Vec<Rational>], g: &[Vec<Rational>]) -> Rational {
    let mut qg = Rational::zero();
    let mut gg = Rational::zero();
    for (q_row, g_row) in q.iter().zip(g) {
        for (a, b) in q_row.iter().zip(g_row) {
            qg += a * b;
            gg += b * b;
        }
    }
    if qg > Rational::zero() && !gg.is_zero() {
        qg / gg
    } else {
        Rational::one()
    }
}

/// `t * a_i - b_i` for every row. At `t = 1` this is bitwise `a_i - b_i`.
fn combine_rows<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>], t: &S) -> Vec<Vec<S>> {
    a.iter()
        .zip(b)
        .map(|(ar, br)| ar.iter().zip(br).map(|(x, y)| t.clone() * x.clone() - y.clone()).collect())
        .collect()
}

fn region_fixings<S: Scalar>(region: &LinearModel<S>) -> BTreeMap<usize, u8> {
    region
        .variables
        .iter()
        .filter(|v| v.role == VarRole::X)
        .filter_map(|v| match (&v.lower, &v.upper) {
            (Some(l), Some(u)) if l == u => Some((v.index, if l.is_zero() { 0 } else { 1 })),
            _ => None,
        })
        .collect()
}

fn unconditional<S: Scalar>(rows: &[Vec<S>], region: &LinearModel<S>) -> Result<RowBounds<S>> {
    let pairs: Vec<(S, S)> = rows
        .par_iter()
        .map(|row| {
            let lo = row_extremes(row, region, Direction::Min, None)?;
            let hi = row_extremes(row, region, Direction::Max, None)?;
            match (lo, hi) {
                (Extreme::Value(a), Extreme::Value(b)) => Ok((a, b)),
                _ => Err(Error::InfeasibleInstance("the continuous relaxation is empty".into())),
            }
        })
        .collect::<Result<_>>()?;
    let (min, max) = pairs.into_iter().unzip();
    Ok(RowBounds { min, max })
}

/// Fixings `(i, v)` whose conditional LP was infeasible, so `x_i = 1 - v`.
type Infeasible = Vec<(usize, u8)>;

fn theta_bounds<S: Scalar>(
    q_rows: &[Vec<S>],
    g_rows: &[Vec<S>],
    theta: &S,
    region: &LinearModel<S>,
    fixed: &BTreeMap<usize, u8>,
) -> Result<Result<ConditionalBounds<S>, Infeasible>> {
    let rows = combine_rows(g_rows, q_rows, theta);
    let uncond = unconditional(&rows, region)?;
    conditional_rows(&rows, region, fixed, &uncond)
}

fn conditional_rows<S: Scalar>(
    rows: &[Vec<S>],
    region: &LinearModel<S>,
    fixed: &BTreeMap<usize, u8>,
    uncond: &RowBounds<S>,
) -> Result<Result<ConditionalBounds<S>, Infeasible>> {
    type Side<S> = Option<(S, S)>;
    let sides: Vec<(Side<S>, Side<S>)> = rows
        .par_iter()
        .enumerate()
        .map(|(i, row)| {
            if fixed.contains_key(&i) {
                let pair = (uncond.min[i].clone(), uncond.max[i].clone());
                return Ok((Some(pair.clone()), Some(pair)));
            }
            let side = |v: u8| -> Result<Side<S>> {
                let lo = row_extremes(row, region, Direction::Min, Some((i, v)))?;
                let hi = row_extremes(row, region, Direction::Max, Some((i, v)))?;
                Ok(match (lo, hi) {
                    (Extreme::Value(a), Extreme::Value(b)) => Some((a, b)),
                    _ => None,
                })
            };
            Ok((side(0)?, side(1)?))
        })
        .collect::<Result<_>>()?;

    let mut infeasible = Vec::new();
    for (i, (zero, one)) in sides.iter().enumerate() {
        if zero.is_none() {
            infeasible.push((i, 0));
        }
        if one.is_none() {
            infeasible.push((i, 1));
        }
    }
    if !infeasible.is_empty() {
        return Ok(Err(infeasible));
    }

    let mut out = ConditionalBounds {
        max_at_zero: Vec::with_capacity(rows.len()),
        min_at_one: Vec::with_capacity(rows.len()),
        max_at_one: Vec::with_capacity(rows.len()),
        min_at_zero: Vec::with_capacity(rows.len()),
    };
    for (zero, one) in sides {
        let (min0, max0) = zero.expect("checked above");
        let (min1, max1) = one.expect("checked above");
        out.max_at_zero.push(max0);
        out.min_at_one.push(min1);
        out.max_at_one.push(max1);
        out.min_at_zero.push(min0);
    }
    Ok(Ok(out))
}

fn absorb(forced: &mut BTreeMap<usize, u8>, found: Infeasible, inst: &ProblemInstance) -> Result<()> {
    let mut by_index: BTreeMap<usize, Vec<u8>> = BTreeMap::new();
    for (i, v) in found {
        by_index.entry(i).or_default().push(v);
    }
    for (i, values) in by_index {
        if values.len() > 1 {
            return Err(Error::InfeasibleInstance(format!("x{} can be neither 0 nor 1", i + 1)));
        }
        debug_assert!(!inst.fixed().contains_key(&i));
        forced.insert(i, 1 - values[0]);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::{ints, mat, w1, w2};
    use crate::instance::{QuadConstraint, SideConstraint};
    use crate::scalar::rational_from_int;

    fn r(v: i64) -> Rational {
        rational_from_int(v)
    }

    fn box_region(n: usize) -> LinearModel<f64> {
        let mut region = LinearModel::new(None);
        for i in 0..n {
            region.add_var(VarRole::X, i, Some(0.0), Some(1.0), false);
        }
        region
    }

    #[test]
    fn extremes_over_the_box() {
        let region = box_region(2);
        let row = [0.0, -1.0];
        assert_eq!(row_extremes(&row, &region, Direction::Max, None).unwrap(), Extreme::Value(0.0));
        assert_eq!(row_extremes(&row, &region, Direction::Min, None).unwrap(), Extreme::Value(-1.0));
    }

    #[test]
    fn fixing_tightens_over_side_constraint() {
        let region = relaxation_region::<f64>(&w2(), &BTreeMap::new());
        let row = [0.0, 2.0];
        assert_eq!(row_extremes(&row, &region, Direction::Max, Some((0, 1))).unwrap(), Extreme::Value(0.0));
        assert_eq!(row_extremes(&row, &region, Direction::Max, None).unwrap(), Extreme::Value(2.0));
    }

    #[test]
    fn w1_plain_bounds() {
        let b = compute_bound_set::<Rational>(&w1(), &BoundOptions::default()).unwrap();
        assert_eq!(b.gamma.min, ints(&[-1, -1]));
        assert_eq!(b.gamma.max, ints(&[0, 0]));
        let lambda = b.lambda.unwrap();
        assert_eq!(lambda.min, ints(&[0, 0]));
        assert_eq!(lambda.max, ints(&[1, 1]));
        assert_eq!(b.w.unwrap().max, ints(&[2, 2]));
        assert!(b.gamma_cond.is_none() && b.theta.is_none());
    }

    #[test]
    fn w1_conditional_bounds_match_plain() {
        let opts = BoundOptions { conditional: true, ..BoundOptions::default() };
        let b = compute_bound_set::<Rational>(&w1(), &opts).unwrap();
        let c = b.gamma_cond.unwrap();
        assert_eq!(c.min_at_one, ints(&[-1, -1]));
        assert_eq!(c.max_at_zero, ints(&[0, 0]));
        assert_eq!(c.max_at_one, ints(&[0, 0]));
        assert_eq!(c.min_at_zero, ints(&[-1, -1]));
        assert!(b.forced.is_empty());
        // tr(QG) = -2, so the fallback multiplier applies
        assert_eq!(b.theta, Some(r(1)));
    }

    #[test]
    fn w2_conditional_bound_is_strictly_tighter() {
        let opts = BoundOptions { conditional: true, ..BoundOptions::default() };
        let b = compute_bound_set::<Rational>(&w2(), &opts).unwrap();
        assert_eq!(b.gamma.max, ints(&[2, 2]));
        assert_eq!(b.gamma_cond.unwrap().max_at_one, ints(&[0, 0]));
        assert!(b.lambda.is_none() && b.w.is_none() && b.theta.is_none());
    }

    #[test]
    fn enhanced_region_of_w1() {
        let inst = w1();
        let base = relaxation_region::<Rational>(&inst, &BTreeMap::new());
        let region = enhanced_region(&inst, &base, &ints(&[1, 1]), &ints(&[0, 0])).unwrap();
        assert_eq!(region.num_vars(), 4);
        assert_eq!(region.num_rows(), 5);
        let x1 = [r(1), r(0)];
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(row_extremes(&x1, &region, Direction::Min, None).unwrap(), Extreme::Value(half));
        let x2 = [r(0), r(1)];
        assert_eq!(row_extremes(&x2, &region, Direction::Max, Some((0, 0))).unwrap(), Extreme::Infeasible);
    }

    #[test]
    fn enhanced_w1_forces_both_variables() {
        let opts = BoundOptions { conditional: true, enhanced: true, ..BoundOptions::default() };
        let b = compute_bound_set::<f64>(&w1(), &opts).unwrap();
        assert_eq!(b.forced, BTreeMap::from([(0, 1), (1, 1)]));
        assert!(b.enhanced);
    }

    #[test]
    fn enhanced_needs_a_quadratic_constraint() {
        let opts = BoundOptions { enhanced: true, ..BoundOptions::default() };
        assert!(matches!(compute_bound_set::<f64>(&w2(), &opts), Err(Error::MissingConstraint)));
    }

    #[test]
    fn frobenius_cases() {
        assert_eq!(frobenius_ratio(&mat(&[&[2, 4], &[4, 2]]), &mat(&[&[1, 2], &[2, 1]])), r(2));
        assert_eq!(frobenius_ratio(&mat(&[&[1, 0], &[0, 1]]), &mat(&[&[0, 1], &[1, 0]])), r(1));
        assert_eq!(frobenius_ratio(&mat(&[&[0, -1], &[-1, 0]]), &mat(&[&[0, 1], &[1, 0]])), r(1));
    }

    #[test]
    fn frobenius_is_clamped_at_eps() {
        // Q = G/100 gives 0.01, below eps = 0.05
        let inst = ProblemInstance::new(
            ints(&[0, 0]),
            vec![vec![r(0), Rational::new(1.into(), 100.into())], vec![Rational::new(1.into(), 100.into()), r(0)]],
            Some(QuadConstraint { h: ints(&[0, 0]), g_matrix: mat(&[&[0, 1], &[1, 0]]), rhs: r(0) }),
            vec![],
            BTreeMap::new(),
        )
        .unwrap();
        let region = relaxation_region::<f64>(&inst, &BTreeMap::new());
        let t = choose_theta(&inst, &ThetaMode::Frobenius, &region, 0.05).unwrap();
        assert_eq!(t, 0.05);
    }

    #[test]
    fn theta_one_matches_plain_family() {
        let inst = crate::instance::generate_random(&crate::instance::GeneratorConfig {
            n: 5,
            seed: 4,
            with_quad_constraint: true,
            cardinality: Some(3),
            ..Default::default()
        })
        .unwrap();
        let opts = BoundOptions { conditional: true, theta_mode: ThetaMode::Fixed(1.0), ..BoundOptions::default() };
        let b = compute_bound_set::<f64>(&inst, &opts).unwrap();
        assert_eq!(b.w_theta, b.w_cond);
    }

    #[test]
    fn grid_prefers_lowest_point_on_ties() {
        // with every variable fixed the score is zero everywhere
        let inst = w1().with_fixed(BTreeMap::from([(0, 1), (1, 1)])).unwrap();
        let region = relaxation_region::<f64>(&inst, inst.fixed());
        let t = choose_theta(&inst, &ThetaMode::Grid(GridConfig::default()), &region, 1e-3).unwrap();
        assert_eq!(t, 0.1);
    }

    #[test]
    fn contradictory_fixings_are_reported() {
        // x1 + x2 >= 2 and x1 + x2 <= 1 leave no point
        let inst = ProblemInstance::new(
            ints(&[0, 0]),
            mat(&[&[0, 1], &[1, 0]]),
            None,
            vec![
                SideConstraint { coeffs: ints(&[1, 1]), sense: Sense::Ge, rhs: r(2) },
                SideConstraint { coeffs: ints(&[1, 1]), sense: Sense::Le, rhs: r(1) },
            ],
            BTreeMap::new(),
        )
        .unwrap();
        let err = compute_bound_set::<f64>(&inst, &BoundOptions::default());
        assert!(matches!(err, Err(Error::InfeasibleInstance(_))));
    }
}
