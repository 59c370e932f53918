//! Problem data for binary quadratic programs with one quadratic constraint.
//!
//! The instance minimizes `c'x + x'Qx` over binary `x` subject to an optional
//! constraint `h'x + x'Gx >= g`, linear side constraints and explicit fixings.
//! All data is held as exact rationals; solver code converts rows to its own
//! scalar type on demand.

mod generate;
mod io;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

pub use generate::{generate_random, GeneratorConfig};
pub use io::{load_instance, read_instance, save_instance, write_instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    /// `lhs (sense) rhs` with slack `tol`.
    pub fn holds<S: Scalar>(self, lhs: &S, rhs: &S, tol: &S) -> bool {
        match self {
            Sense::Le => lhs.clone() <= rhs.clone() + tol.clone(),
            Sense::Ge => lhs.clone() >= rhs.clone() - tol.clone(),
            Sense::Eq => (lhs.clone() - rhs.clone()).abs() <= *tol,
        }
    }

    /// Amount by which `lhs (sense) rhs` is violated, zero when it holds.
    pub fn violation<S: Scalar>(self, lhs: &S, rhs: &S) -> S {
        let diff = lhs.clone() - rhs.clone();
        match self {
            Sense::Le if diff > S::zero() => diff,
            Sense::Ge if diff < S::zero() => -diff,
            Sense::Eq => diff.abs(),
            _ => S::zero(),
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Sense {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "<=" => Ok(Sense::Le),
            ">=" => Ok(Sense::Ge),
            "=" | "==" => Ok(Sense::Eq),
            other => Err(Error::Parse(format!("unknown constraint sense `{other}`"))),
        }
    }
}

/// The quadratic constraint `h'x + x'Gx >= g`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadConstraint {
    pub h: Vec<Rational>,
    pub g_matrix: Vec<Vec<Rational>>,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SideConstraint {
    pub coeffs: Vec<Rational>,
    pub sense: Sense,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    n: usize,
    c: Vec<Rational>,
    q: Vec<Vec<Rational>>,
    quad: Option<QuadConstraint>,
    side: Vec<SideConstraint>,
    fixed: BTreeMap<usize, u8>,
}

/// Objective and constraint values of a binary point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointValue {
    pub objective: Rational,
    pub quad_lhs: Option<Rational>,
    pub feasible: bool,
}

impl ProblemInstance {
    /// Validates dimensions and symmetrizes `Q` and `G`. Fixing indices are
    /// zero-based here; the file format is one-based.
    pub fn new(
        c: Vec<Rational>,
        q: Vec<Vec<Rational>>,
        quad: Option<QuadConstraint>,
        side: Vec<SideConstraint>,
        fixed: BTreeMap<usize, u8>,
    ) -> Result<Self> {
        let n = c.len();
        if n == 0 {
            return Err(Error::Dimension("instance needs at least one variable".into()));
        }
        let q = symmetrize(check_square(q, n, "Q")?);
        let quad = match quad {
            Some(qc) => {
                check_len(&qc.h, n, "h")?;
                let g_matrix = symmetrize(check_square(qc.g_matrix, n, "G")?);
                Some(QuadConstraint { g_matrix, ..qc })
            }
            None => None,
        };
        for (k, row) in side.iter().enumerate() {
            check_len(&row.coeffs, n, &format!("constraint {}", k + 1))?;
        }
        for (&i, &v) in &fixed {
            if i >= n {
                return Err(Error::Dimension(format!("fixed index {} outside 1..={n}", i + 1)));
            }
            if v > 1 {
                return Err(Error::Value(format!("fixing of x{} must be 0 or 1", i + 1)));
            }
        }
        Ok(Self { n, c, q, quad, side, fixed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> &[Rational] {
        &self.c
    }

    pub fn q(&self) -> &[Vec<Rational>] {
        &self.q
    }

    pub fn quad(&self) -> Option<&QuadConstraint> {
        self.quad.as_ref()
    }

    pub fn side_constraints(&self) -> &[SideConstraint] {
        &self.side
    }

    pub fn fixed(&self) -> &BTreeMap<usize, u8> {
        &self.fixed
    }

    pub fn has_quad_constraint(&self) -> bool {
        self.quad.is_some()
    }

    /// Copy of the instance with a different quadratic right-hand side.
    pub fn with_quad_rhs(&self, rhs: Rational) -> Result<Self> {
        let mut out = self.clone();
        match out.quad.as_mut() {
            Some(qc) => qc.rhs = rhs,
            None => return Err(Error::MissingConstraint),
        }
        Ok(out)
    }

    pub fn with_fixed(&self, fixed: BTreeMap<usize, u8>) -> Result<Self> {
        Self::new(self.c.clone(), self.q.clone(), self.quad.clone(), self.side.clone(), fixed)
    }

    /// Row `i` of `Q` converted to `S`.
    pub fn q_row<S: Scalar>(&self, i: usize) -> Vec<S> {
        self.q[i].iter().map(S::from_rational).collect()
    }

    /// Row `i` of `G`; panics without a quadratic constraint.
    pub fn g_row<S: Scalar>(&self, i: usize) -> Vec<S> {
        let qc = self.quad.as_ref().expect("instance has a quadratic constraint");
        qc.g_matrix[i].iter().map(S::from_rational).collect()
    }

    pub fn evaluate_point(&self, x: &[u8]) -> Result<PointValue> {
        self.check_point(x)?;
        let objective = dot_binary(&self.c, x) + quad_form(&self.q, x);
        let quad_lhs = self.quad.as_ref().map(|qc| dot_binary(&qc.h, x) + quad_form(&qc.g_matrix, x));
        let mut feasible = self.fixed.iter().all(|(&i, &v)| x[i] == v);
        feasible &= self.side.iter().all(|row| {
            let lhs = dot_binary(&row.coeffs, x);
            row.sense.holds(&lhs, &row.rhs, &Rational::zero())
        });
        if let (Some(lhs), Some(qc)) = (&quad_lhs, &self.quad) {
            feasible &= *lhs >= qc.rhs;
        }
        Ok(PointValue { objective, quad_lhs, feasible })
    }

    pub fn is_feasible(&self, x: &[u8]) -> Result<bool> {
        Ok(self.evaluate_point(x)?.feasible)
    }

    pub(crate) fn check_point(&self, x: &[u8]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::Dimension(format!("point has length {}, expected {}", x.len(), self.n)));
        }
        if x.iter().any(|&v| v > 1) {
            return Err(Error::Value("point is not binary".into()));
        }
        Ok(())
    }
}

/// `row . x` for binary `x`.
pub fn dot_binary(row: &[Rational], x: &[u8]) -> Rational {
    row.iter().zip(x).filter(|(_, &xi)| xi == 1).fold(Rational::zero(), |acc, (a, _)| acc + a)
}

/// `x' M x` summed over pairs of ones.
fn quad_form(m: &[Vec<Rational>], x: &[u8]) -> Rational {
    let ones: Vec<usize> = (0..x.len()).filter(|&i| x[i] == 1).collect();
    let mut total = Rational::zero();
    for &i in &ones {
        for &j in &ones {
            total += &m[i][j];
        }
    }
    total
}

fn check_len(v: &[Rational], n: usize, what: &str) -> Result<()> {
    if v.len() != n {
        return Err(Error::Dimension(format!("{what} has length {}, expected {n}", v.len())));
    }
    Ok(())
}

fn check_square(m: Vec<Vec<Rational>>, n: usize, what: &str) -> Result<Vec<Vec<Rational>>> {
    if m.len() != n {
        return Err(Error::Dimension(format!("{what} has {} rows, expected {n}", m.len())));
    }
    for (i, row) in m.iter().enumerate() {
        check_len(row, n, &format!("{what} row {}", i + 1))?;
    }
    Ok(m)
}

fn symmetrize(m: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let n = m.len();
    let half = Rational::one() / Rational::from_integer(2.into());
    (0..n).map(|i| (0..n).map(|j| (&m[i][j] + &m[j][i]) * &half).collect()).collect()
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::scalar::rational_from_int;

    pub fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rational_from_int(x)).collect()
    }

    pub fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| ints(r)).collect()
    }

    /// min -2 x1 x2 s.t. 2 x1 x2 >= 1.
    pub fn w1() -> ProblemInstance {
        ProblemInstance::new(
            ints(&[0, 0]),
            mat(&[&[0, -1], &[-1, 0]]),
            Some(QuadConstraint { h: ints(&[0, 0]), g_matrix: mat(&[&[0, 1], &[1, 0]]), rhs: rational_from_int(1) }),
            vec![],
            BTreeMap::new(),
        )
        .unwrap()
    }

    /// Q = [[0,2],[2,0]] with x1 + x2 <= 1.
    pub fn w2() -> ProblemInstance {
        ProblemInstance::new(
            ints(&[0, 0]),
            mat(&[&[0, 2], &[2, 0]]),
            None,
            vec![SideConstraint { coeffs: ints(&[1, 1]), sense: Sense::Le, rhs: rational_from_int(1) }],
            BTreeMap::new(),
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::scalar::rational_from_int;

    #[test]
    fn evaluates_w1_points() {
        let inst = w1();
        let v = inst.evaluate_point(&[1, 1]).unwrap();
        assert_eq!(v.objective, rational_from_int(-2));
        assert_eq!(v.quad_lhs, Some(rational_from_int(2)));
        assert!(v.feasible);

        for x in [[1u8, 0], [0, 0]] {
            let v = inst.evaluate_point(&x).unwrap();
            assert_eq!(v.objective, rational_from_int(0));
            assert_eq!(v.quad_lhs, Some(rational_from_int(0)));
            assert!(!v.feasible);
        }
    }

    #[test]
    fn rejects_bad_points() {
        let inst = w1();
        assert!(matches!(inst.evaluate_point(&[1]), Err(Error::Dimension(_))));
        assert!(matches!(inst.evaluate_point(&[1, 2]), Err(Error::Value(_))));
    }

    #[test]
    fn symmetrizes_on_construction() {
        let inst =
            ProblemInstance::new(ints(&[0, 0]), mat(&[&[0, 2], &[0, 0]]), None, vec![], BTreeMap::new()).unwrap();
        assert_eq!(inst.q(), mat(&[&[0, 1], &[1, 0]]).as_slice());
    }

    #[test]
    fn fixings_and_side_constraints_filter_points() {
        let inst = w2().with_fixed(BTreeMap::from([(0, 1)])).unwrap();
        assert!(inst.is_feasible(&[1, 0]).unwrap());
        assert!(!inst.is_feasible(&[0, 0]).unwrap());
        assert!(!inst.is_feasible(&[1, 1]).unwrap());
        assert!(matches!(w2().with_fixed(BTreeMap::from([(2, 1)])), Err(Error::Dimension(_))));
    }

    fn rowwise_objective(inst: &ProblemInstance, x: &[u8]) -> Rational {
        let mut total = dot_binary(inst.c(), x);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 1 {
                total += dot_binary(&inst.q()[i], x);
            }
        }
        total
    }

    proptest::proptest! {
        #[test]
        fn objective_matches_rowwise_sum(seed in 0u64..500, mask in 0u32..64) {
            let inst = generate_random(&GeneratorConfig {
                n: 6,
                seed,
                with_quad_constraint: true,
                ..GeneratorConfig::default()
            })
            .unwrap();
            let x: Vec<u8> = (0..6).map(|i| ((mask >> i) & 1) as u8).collect();
            let v = inst.evaluate_point(&x).unwrap();
            proptest::prop_assert_eq!(v.objective, rowwise_objective(&inst, &x));
        }
    }
}
