//! Dense bounded-variable primal simplex.
//!
//! Variable bounds are handled directly by the ratio test instead of being
//! turned into rows. Each row gets a slack whose bounds encode the sense;
//! rows whose slack cannot absorb the initial residual get an artificial
//! column, which phase one drives to zero. Pricing is Dantzig's rule until
//! too many degenerate pivots accumulate, after which Bland's rule takes
//! over for the rest of the solve.

use crate::error::{Error, Result};
use crate::instance::Sense;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow<S> {
    pub coeffs: Vec<S>,
    pub sense: Sense,
    pub rhs: S,
}

/// `min objective'x` subject to `rows` and `lower <= x <= upper`, where
/// `None` stands for an infinite bound.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem<S> {
    pub objective: Vec<S>,
    pub lower: Vec<Option<S>>,
    pub upper: Vec<Option<S>>,
    pub rows: Vec<LpRow<S>>,
}

impl<S: Scalar> LpProblem<S> {
    /// Zero objective over the box `[lo, hi]^num_vars`.
    pub fn boxed(num_vars: usize, lo: Option<S>, hi: Option<S>) -> Self {
        Self {
            objective: vec![S::zero(); num_vars],
            lower: vec![lo; num_vars],
            upper: vec![hi; num_vars],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<S>, sense: Sense, rhs: S) {
        debug_assert_eq!(coeffs.len(), self.num_vars());
        self.rows.push(LpRow { coeffs, sense, rhs });
    }

    /// Largest row or bound violation of `x`.
    pub fn max_violation(&self, x: &[S]) -> S {
        let mut worst = S::zero();
        for (j, v) in x.iter().enumerate() {
            if let Some(l) = &self.lower[j] {
                worst = crate::scalar::max_of(worst, l.clone() - v.clone());
            }
            if let Some(u) = &self.upper[j] {
                worst = crate::scalar::max_of(worst, v.clone() - u.clone());
            }
        }
        for row in &self.rows {
            let lhs = dot(&row.coeffs, x);
            worst = crate::scalar::max_of(worst, row.sense.violation(&lhs, &row.rhs));
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<S> {
    pub status: LpStatus,
    pub x: Option<Vec<S>>,
    pub objective: Option<S>,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct SimplexConfig<S> {
    pub feasibility_tol: S,
    pub optimality_tol: S,
    pub pivot_tol: S,
    /// Degenerate pivots tolerated before switching to Bland's rule.
    pub degenerate_limit: usize,
    /// Iteration cap is `iteration_factor * (num_vars + num_rows)`.
    pub iteration_factor: usize,
}

impl<S: Scalar> Default for SimplexConfig<S> {
    fn default() -> Self {
        Self {
            feasibility_tol: S::feasibility_tol(),
            optimality_tol: S::optimality_tol(),
            pivot_tol: S::pivot_tol(),
            degenerate_limit: 1000,
            iteration_factor: 50,
        }
    }
}

pub fn solve_lp<S: Scalar>(problem: &LpProblem<S>) -> Result<LpSolution<S>> {
    solve_lp_with(problem, &SimplexConfig::default())
}

pub fn solve_lp_with<S: Scalar>(problem: &LpProblem<S>, config: &SimplexConfig<S>) -> Result<LpSolution<S>> {
    for j in 0..problem.num_vars() {
        if let (Some(l), Some(u)) = (&problem.lower[j], &problem.upper[j]) {
            if l > u {
                return Ok(LpSolution { status: LpStatus::Infeasible, x: None, objective: None, iterations: 0 });
            }
        }
    }
    let mut tableau = Tableau::new(problem, config);
    if tableau.has_artificials() {
        tableau.set_phase_one_costs();
        match tableau.run()? {
            Step::Optimal => {}
            // phase one is bounded below by zero
            Step::Unbounded => return Err(Error::Numerical { iterations: tableau.iterations }),
        }
        if tableau.infeasibility() > config.feasibility_tol {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: None,
                objective: None,
                iterations: tableau.iterations,
            });
        }
        tableau.retire_artificials();
    }
    tableau.set_costs(&problem.objective);
    let status = match tableau.run()? {
        Step::Optimal => LpStatus::Optimal,
        Step::Unbounded => LpStatus::Unbounded,
    };
    if status == LpStatus::Unbounded {
        return Ok(LpSolution { status, x: None, objective: None, iterations: tableau.iterations });
    }
    let x = tableau.x[..problem.num_vars()].to_vec();
    let objective = dot(&problem.objective, &x);
    Ok(LpSolution { status, x: Some(x), objective: Some(objective), iterations: tableau.iterations })
}

pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).filter(|(ai, _)| !ai.is_zero()).fold(S::zero(), |acc, (ai, bi)| acc + ai.clone() * bi.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free column resting at zero.
    Free,
}

enum Step {
    Optimal,
    Unbounded,
}

struct Tableau<'a, S> {
    config: &'a SimplexConfig<S>,
    /// `B^-1 A`, one row per constraint.
    rows: Vec<Vec<S>>,
    /// `B^-1 b`.
    rhs: Vec<S>,
    basis: Vec<usize>,
    status: Vec<Status>,
    lower: Vec<Option<S>>,
    upper: Vec<Option<S>>,
    x: Vec<S>,
    cost: Vec<S>,
    reduced: Vec<S>,
    first_artificial: usize,
    iterations: usize,
    iteration_limit: usize,
    degenerate: usize,
    degenerate_limit: usize,
    bland: bool,
}

impl<'a, S: Scalar> Tableau<'a, S> {
    fn new(problem: &LpProblem<S>, config: &'a SimplexConfig<S>) -> Self {
        let n = problem.num_vars();
        let m = problem.rows.len();
        let zero = S::zero();

        let mut lower = problem.lower.clone();
        let mut upper = problem.upper.clone();
        let mut status = Vec::with_capacity(n + 2 * m);
        let mut x = Vec::with_capacity(n + 2 * m);
        for j in 0..n {
            let (s, v) = match (&lower[j], &upper[j]) {
                (Some(l), _) => (Status::AtLower, l.clone()),
                (None, Some(u)) => (Status::AtUpper, u.clone()),
                (None, None) => (Status::Free, zero.clone()),
            };
            status.push(s);
            x.push(v);
        }

        // slack bounds: Le -> [0, inf), Ge -> (-inf, 0], Eq -> [0, 0]
        let mut needs_artificial = Vec::with_capacity(m);
        let mut residuals = Vec::with_capacity(m);
        for row in &problem.rows {
            let residual = row.rhs.clone() - dot(&row.coeffs, &x[..n]);
            let (lo, hi) = slack_bounds::<S>(row.sense);
            let fits = lo.as_ref().is_none_or(|l| residual >= l.clone() - config.feasibility_tol.clone())
                && hi.as_ref().is_none_or(|u| residual <= u.clone() + config.feasibility_tol.clone());
            lower.push(lo);
            upper.push(hi);
            needs_artificial.push(!fits);
            residuals.push(residual);
        }
        let artificial_count = needs_artificial.iter().filter(|&&a| a).count();
        let first_artificial = n + m;
        let ncols = n + m + artificial_count;

        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        status.extend(std::iter::repeat_n(Status::Basic, m));
        x.extend(std::iter::repeat_n(zero.clone(), m));
        let mut next_artificial = first_artificial;
        for (r, row) in problem.rows.iter().enumerate() {
            let mut t = Vec::with_capacity(ncols);
            t.extend(row.coeffs.iter().cloned());
            t.extend((0..m).map(|k| if k == r { S::one() } else { S::zero() }));
            t.extend(std::iter::repeat_n(zero.clone(), artificial_count));
            let slack = n + r;
            if needs_artificial[r] {
                // the slack rests at 0, which is the violated bound in every case
                let sign = if residuals[r] > zero { S::one() } else { -S::one() };
                status[slack] = if row.sense == Sense::Ge { Status::AtUpper } else { Status::AtLower };
                for v in t.iter_mut() {
                    if !v.is_zero() {
                        *v = v.clone() * sign.clone();
                    }
                }
                t[next_artificial] = S::one();
                rhs.push(row.rhs.clone() * sign.clone());
                lower.push(Some(zero.clone()));
                upper.push(None);
                status.push(Status::Basic);
                x.push(residuals[r].abs());
                basis.push(next_artificial);
                next_artificial += 1;
            } else {
                rhs.push(row.rhs.clone());
                x[slack] = residuals[r].clone();
                basis.push(slack);
            }
            rows.push(t);
        }

        let iteration_limit = config.iteration_factor * (n + m).max(1);
        Self {
            config,
            rows,
            rhs,
            basis,
            status,
            lower,
            upper,
            x,
            cost: vec![zero.clone(); ncols],
            reduced: vec![zero; ncols],
            first_artificial,
            iterations: 0,
            iteration_limit,
            degenerate: 0,
            degenerate_limit: config.degenerate_limit.min(iteration_limit / 4).max(1),
            bland: false,
        }
    }

    fn ncols(&self) -> usize {
        self.x.len()
    }

    fn has_artificials(&self) -> bool {
        self.ncols() > self.first_artificial
    }

    fn set_phase_one_costs(&mut self) {
        let costs: Vec<S> =
            (0..self.ncols()).map(|j| if j >= self.first_artificial { S::one() } else { S::zero() }).collect();
        self.install_costs(costs);
    }

    fn set_costs(&mut self, objective: &[S]) {
        let mut costs = vec![S::zero(); self.ncols()];
        costs[..objective.len()].clone_from_slice(objective);
        self.install_costs(costs);
    }

    fn install_costs(&mut self, costs: Vec<S>) {
        self.reduced = costs.clone();
        for (r, row) in self.rows.iter().enumerate() {
            let cb = &costs[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            for (d, t) in self.reduced.iter_mut().zip(row) {
                if !t.is_zero() {
                    *d = d.clone() - cb.clone() * t.clone();
                }
            }
        }
        for &b in &self.basis {
            self.reduced[b] = S::zero();
        }
        self.cost = costs;
    }

    fn infeasibility(&self) -> S {
        self.x[self.first_artificial..].iter().fold(S::zero(), |acc, v| acc + v.clone())
    }

    /// Fixes artificials at zero and pivots basic ones out where possible.
    /// Rows left with a basic artificial are redundant.
    fn retire_artificials(&mut self) {
        for j in self.first_artificial..self.ncols() {
            self.upper[j] = Some(S::zero());
            if self.status[j] != Status::Basic {
                self.status[j] = Status::AtLower;
                self.x[j] = S::zero();
            }
        }
        for r in 0..self.rows.len() {
            if self.basis[r] < self.first_artificial {
                continue;
            }
            let mut best: Option<(usize, S)> = None;
            for j in 0..self.first_artificial {
                if self.status[j] == Status::Basic {
                    continue;
                }
                let a = self.rows[r][j].abs();
                if a > self.config.pivot_tol && best.as_ref().is_none_or(|(_, b)| a > *b) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                let leaving = self.basis[r];
                self.pivot(r, j);
                self.status[leaving] = Status::AtLower;
                self.x[leaving] = S::zero();
            }
        }
        self.refresh_basic_values();
    }

    /// Recomputes basic values from `B^-1 b` and the nonbasic values.
    fn refresh_basic_values(&mut self) {
        let nonbasic: Vec<usize> =
            (0..self.ncols()).filter(|&j| self.status[j] != Status::Basic && !self.x[j].is_zero()).collect();
        for r in 0..self.rows.len() {
            let mut v = self.rhs[r].clone();
            for &j in &nonbasic {
                let t = &self.rows[r][j];
                if !t.is_zero() {
                    v = v - t.clone() * self.x[j].clone();
                }
            }
            self.x[self.basis[r]] = v;
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        matches!((&self.lower[j], &self.upper[j]), (Some(l), Some(u)) if l == u)
    }

    /// Entering column and direction (+1 increases the variable).
    fn price(&self) -> Option<(usize, bool)> {
        let tol = &self.config.optimality_tol;
        let mut best: Option<(usize, bool, S)> = None;
        for j in 0..self.ncols() {
            if self.status[j] == Status::Basic || self.is_fixed(j) {
                continue;
            }
            let d = &self.reduced[j];
            let increase = match self.status[j] {
                Status::AtLower if *d < -tol.clone() => true,
                Status::AtUpper if *d > *tol => false,
                Status::Free if d.abs() > *tol => *d < S::zero(),
                _ => continue,
            };
            if self.bland {
                return Some((j, increase));
            }
            let score = d.abs();
            if best.as_ref().is_none_or(|(_, _, s)| score > *s) {
                best = Some((j, increase, score));
            }
        }
        best.map(|(j, inc, _)| (j, inc))
    }

    fn run(&mut self) -> Result<Step> {
        loop {
            if self.iterations >= self.iteration_limit {
                return Err(Error::Numerical { iterations: self.iterations });
            }
            let Some((entering, increase)) = self.price() else {
                self.refresh_basic_values();
                return Ok(Step::Optimal);
            };
            self.iterations += 1;

            // ratio test: (step, row, |alpha|); row None is a bound flip
            let zero = S::zero();
            let mut limit: Option<(S, Option<usize>, S)> = None;
            if let (Some(l), Some(u)) = (&self.lower[entering], &self.upper[entering]) {
                limit = Some((u.clone() - l.clone(), None, zero.clone()));
            }
            for r in 0..self.rows.len() {
                let t = &self.rows[r][entering];
                if t.is_zero() {
                    continue;
                }
                let alpha = if increase { t.clone() } else { -t.clone() };
                let b = self.basis[r];
                let step = if alpha > self.config.pivot_tol {
                    match &self.lower[b] {
                        Some(l) => (self.x[b].clone() - l.clone()) / alpha.clone(),
                        None => continue,
                    }
                } else if alpha < -self.config.pivot_tol.clone() {
                    match &self.upper[b] {
                        Some(u) => (u.clone() - self.x[b].clone()) / -alpha.clone(),
                        None => continue,
                    }
                } else {
                    continue;
                };
                let step = crate::scalar::max_of(step, zero.clone());
                let magnitude = alpha.abs();
                let better = match &limit {
                    None => true,
                    Some((best, best_row, best_mag)) => {
                        let tie_tol = &self.config.feasibility_tol;
                        if step < best.clone() - tie_tol.clone() {
                            true
                        } else if step > best.clone() + tie_tol.clone() {
                            false
                        } else if let Some(br) = best_row {
                            // ties: Bland keeps the lowest basic index, Dantzig the largest pivot
                            if self.bland {
                                b < self.basis[*br]
                            } else {
                                magnitude > *best_mag
                            }
                        } else {
                            // bound flips win ties
                            false
                        }
                    }
                };
                if better {
                    limit = Some((step, Some(r), magnitude));
                }
            }

            let Some((step, row, _)) = limit else {
                return Ok(Step::Unbounded);
            };

            if step <= self.config.feasibility_tol {
                self.degenerate += 1;
                if self.degenerate >= self.degenerate_limit {
                    self.bland = true;
                }
            }

            // move along the edge
            if !step.is_zero() {
                let delta = if increase { step.clone() } else { -step.clone() };
                for r in 0..self.rows.len() {
                    let t = &self.rows[r][entering];
                    if !t.is_zero() {
                        let b = self.basis[r];
                        self.x[b] = self.x[b].clone() - delta.clone() * t.clone();
                    }
                }
                self.x[entering] = self.x[entering].clone() + delta;
            }

            match row {
                None => {
                    let (status, value) = if increase {
                        (Status::AtUpper, self.upper[entering].clone())
                    } else {
                        (Status::AtLower, self.lower[entering].clone())
                    };
                    self.status[entering] = status;
                    self.x[entering] = value.expect("flip bound is finite");
                }
                Some(r) => {
                    let leaving = self.basis[r];
                    let t = self.rows[r][entering].clone();
                    let decreasing = if increase { t > zero } else { t < zero };
                    let (status, value) = if decreasing {
                        (Status::AtLower, self.lower[leaving].clone())
                    } else {
                        (Status::AtUpper, self.upper[leaving].clone())
                    };
                    self.pivot(r, entering);
                    self.status[leaving] = status;
                    self.x[leaving] = value.expect("blocking bound is finite");
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.rows[r][j].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() / p.clone();
                }
            }
            self.rhs[r] = self.rhs[r].clone() / p;
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..pivot_row.len()).filter(|&k| !pivot_row[k].is_zero()).collect();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][j].clone();
            if factor.is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            for &k in &nz {
                row[k] = row[k].clone() - factor.clone() * pivot_row[k].clone();
            }
            row[j] = S::zero();
            self.rhs[i] = self.rhs[i].clone() - factor * pivot_rhs.clone();
        }
        let dj = self.reduced[j].clone();
        if !dj.is_zero() {
            for &k in &nz {
                self.reduced[k] = self.reduced[k].clone() - dj.clone() * pivot_row[k].clone();
            }
            self.reduced[j] = S::zero();
        }
        self.rows[r] = pivot_row;
        self.basis[r] = j;
        self.status[j] = Status::Basic;
    }
}

fn slack_bounds<S: Scalar>(sense: Sense) -> (Option<S>, Option<S>) {
    match sense {
        Sense::Le => (Some(S::zero()), None),
        Sense::Ge => (None, Some(S::zero())),
        Sense::Eq => (Some(S::zero()), Some(S::zero())),
    }
}
