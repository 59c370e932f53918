//! Depth-first LP-based branch-and-bound over the binary columns.
//!
//! Nodes branch on the most fractional binary (lowest column on ties) and
//! the down branch is explored first. Each node inherits the larger of its
//! parent's bound and its own LP value, which keeps the global bound (the
//! minimum over open nodes and the incumbent) non-decreasing.

use std::io::Write;

use crate::error::{Error, Result};
use crate::format::format_g12;
use crate::models::{LinearModel, VarRole};
use crate::scalar::{max_of, min_of, Scalar};
use crate::simplex::{solve_lp, LpStatus};

#[derive(Debug, Clone, PartialEq)]
pub struct MilpConfig {
    /// Relative pruning gap, applied as `gap * max(1, |incumbent|)`.
    pub gap: f64,
    pub node_limit: usize,
}

impl Default for MilpConfig {
    fn default() -> Self {
        Self { gap: 1e-6, node_limit: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    /// The node limit stopped the search; the incumbent, if any, is kept.
    NodeLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution<S> {
    pub status: MilpStatus,
    /// Includes the objective constant.
    pub objective: Option<S>,
    pub point: Option<Vec<S>>,
    /// The `X` columns in index order, rounded.
    pub x: Option<Vec<u8>>,
    pub nodes: usize,
    pub best_bound: Option<S>,
    pub root_bound: Option<S>,
}

pub fn solve_milp<S: Scalar>(model: &LinearModel<S>, config: &MilpConfig) -> Result<MilpSolution<S>> {
    solve_milp_logged(model, config, &mut std::io::sink())
}

struct Node<S> {
    fixings: Vec<(usize, u8)>,
    depth: usize,
    bound: Option<S>,
}

/// As [`solve_milp`], writing `node <id> <depth> <bound> <branch> <global>`
/// per processed node to `log`.
pub fn solve_milp_logged<S: Scalar>(
    model: &LinearModel<S>,
    config: &MilpConfig,
    log: &mut dyn Write,
) -> Result<MilpSolution<S>> {
    let base = model.to_lp();
    let binaries: Vec<usize> = (0..model.num_vars()).filter(|&j| model.variables[j].binary).collect();
    let constant = model.objective_constant.clone();
    let gap = S::approx(config.gap);
    let tol = S::integrality_tol();
    let half = S::one() / (S::one() + S::one());

    let mut stack = vec![Node { fixings: Vec::new(), depth: 0, bound: None }];
    let mut incumbent: Option<(S, Vec<S>)> = None;
    let mut nodes = 0usize;
    let mut root_bound = None;
    let mut status = MilpStatus::Optimal;

    while let Some(node) = stack.pop() {
        if nodes >= config.node_limit {
            stack.push(node);
            status = MilpStatus::NodeLimit;
            break;
        }
        let id = nodes;
        nodes += 1;

        let mut lp = base.clone();
        for &(j, v) in &node.fixings {
            let v = S::from_i64(v.into());
            lp.lower[j] = Some(v.clone());
            lp.upper[j] = Some(v);
        }
        let sol = solve_lp(&lp)?;
        let (value, x) = match sol.status {
            LpStatus::Infeasible => {
                let global = global_bound(&stack, &incumbent);
                log_node(log, id, node.depth, None, "-", global.as_ref())?;
                continue;
            }
            LpStatus::Unbounded => return Err(Error::Unbounded),
            LpStatus::Optimal => (sol.objective.expect("optimal") + constant.clone(), sol.x.expect("optimal")),
        };
        if id == 0 {
            root_bound = Some(value.clone());
        }
        let bound = match &node.bound {
            Some(b) => max_of(b.clone(), value.clone()),
            None => value.clone(),
        };

        let pruned = incumbent.as_ref().is_some_and(|(inc, _)| {
            let scale = max_of(S::one(), inc.abs());
            value >= inc.clone() - gap.clone() * scale
        });
        let branch = if pruned {
            None
        } else {
            let mut best: Option<(usize, S)> = None;
            for &j in &binaries {
                let frac = min_of(x[j].clone(), S::one() - x[j].clone());
                if frac > tol && best.as_ref().is_none_or(|(_, f)| frac > *f) {
                    best = Some((j, frac));
                }
            }
            best.map(|(j, _)| j)
        };

        match branch {
            Some(j) => {
                for v in [1u8, 0] {
                    let mut fixings = node.fixings.clone();
                    fixings.push((j, v));
                    stack.push(Node { fixings, depth: node.depth + 1, bound: Some(bound.clone()) });
                }
            }
            None if !pruned => {
                let mut point = x;
                for &j in &binaries {
                    point[j] = if point[j] >= half { S::one() } else { S::zero() };
                }
                if incumbent.as_ref().is_none_or(|(inc, _)| value < *inc) {
                    incumbent = Some((value.clone(), point));
                }
            }
            None => {}
        }
        let name = branch.map_or("-", |j| model.variables[j].name.as_str());
        let global = global_bound(&stack, &incumbent);
        log_node(log, id, node.depth, Some(&value), name, global.as_ref())?;
    }

    let best_bound = global_bound(&stack, &incumbent);
    let Some((objective, point)) = incumbent else {
        if status == MilpStatus::Optimal {
            status = MilpStatus::Infeasible;
        }
        return Ok(MilpSolution { status, objective: None, point: None, x: None, nodes, best_bound, root_bound });
    };
    let mut x_cols = model.columns(VarRole::X);
    if x_cols.is_empty() {
        x_cols = binaries;
    }
    let x = x_cols.iter().map(|&j| u8::from(point[j] >= half)).collect();
    Ok(MilpSolution {
        status,
        objective: Some(objective),
        point: Some(point),
        x: Some(x),
        nodes,
        best_bound,
        root_bound,
    })
}

fn global_bound<S: Scalar>(stack: &[Node<S>], incumbent: &Option<(S, Vec<S>)>) -> Option<S> {
    let mut out = incumbent.as_ref().map(|(v, _)| v.clone());
    for node in stack {
        if let Some(b) = &node.bound {
            out = Some(match out {
                Some(o) => min_of(o, b.clone()),
                None => b.clone(),
            });
        }
    }
    out
}

fn log_node<S: Scalar>(
    log: &mut dyn Write,
    id: usize,
    depth: usize,
    bound: Option<&S>,
    branch: &str,
    global: Option<&S>,
) -> Result<()> {
    let text = |v: Option<&S>| v.map_or_else(|| "inf".to_string(), |v| format_g12(v.as_f64()));
    writeln!(log, "node {id} {depth} {} {branch} {}", text(bound), text(global))?;
    Ok(())
}
