//! Ground truth by enumeration, and the harnesses that compare the
//! linearized models against it.
//!
//! Points are indexed by bit masks with bit `i` holding `x_{i+1}`.
//! Enumeration scales the data to integers when the magnitudes allow and
//! walks each block of masks incrementally; otherwise every point is
//! evaluated exactly in rational arithmetic.

mod compare;
mod suite;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::{ProblemInstance, Sense};
use crate::scalar::Rational;

pub use compare::{
    compare_relaxations, compare_with_bounds, verify_equivalence, CompareOptions, ComparisonReport, ComparisonRow,
    EquivalenceCheck, Flag, FlagKind, CSV_HEADER,
};
pub use suite::{check_instance, dominance_violations, CheckOptions, CheckReport};

/// Largest `n` the oracle accepts.
pub const MAX_ORACLE_N: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub status: OracleStatus,
    pub objective: Option<Rational>,
    /// Every minimizer, ordered by mask.
    pub argmins: Vec<Vec<u8>>,
    pub feasible_count: u64,
}

pub fn mask_to_point(mask: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((mask >> i) & 1) as u8).collect()
}

pub fn enumerate_optimum(inst: &ProblemInstance) -> Result<OracleResult> {
    let n = inst.n();
    if n > MAX_ORACLE_N {
        return Err(Error::TooLarge(n));
    }
    let (best, masks, count) = match IntegerData::new(inst) {
        Some(data) => data.search(),
        None => rational_search(inst)?,
    };
    Ok(match best {
        Some(objective) => OracleResult {
            status: OracleStatus::Optimal,
            objective: Some(objective),
            argmins: masks.into_iter().map(|m| mask_to_point(m, n)).collect(),
            feasible_count: count,
        },
        None => {
            OracleResult { status: OracleStatus::Infeasible, objective: None, argmins: Vec::new(), feasible_count: 0 }
        }
    })
}

/// All feasible points ordered by mask.
pub fn feasible_points(inst: &ProblemInstance) -> Result<Vec<Vec<u8>>> {
    let n = inst.n();
    if n > MAX_ORACLE_N {
        return Err(Error::TooLarge(n));
    }
    let points: Vec<Option<Vec<u8>>> = (0..1u64 << n)
        .into_par_iter()
        .map(|mask| {
            let x = mask_to_point(mask, n);
            Ok(inst.is_feasible(&x)?.then_some(x))
        })
        .collect::<Result<_>>()?;
    Ok(points.into_iter().flatten().collect())
}

type Search = (Option<Rational>, Vec<u64>, u64);

fn rational_search(inst: &ProblemInstance) -> Result<Search> {
    let n = inst.n();
    let values: Vec<Option<Rational>> = (0..1u64 << n)
        .into_par_iter()
        .map(|mask| {
            let v = inst.evaluate_point(&mask_to_point(mask, n))?;
            Ok(v.feasible.then_some(v.objective))
        })
        .collect::<Result<_>>()?;
    let mut best: Option<Rational> = None;
    let mut masks = Vec::new();
    let mut count = 0;
    for (mask, v) in values.into_iter().enumerate() {
        let Some(v) = v else { continue };
        count += 1;
        match &best {
            Some(b) if v > *b => {}
            Some(b) if v == *b => masks.push(mask as u64),
            _ => {
                best = Some(v);
                masks = vec![mask as u64];
            }
        }
    }
    Ok((best, masks, count))
}

/// Instance data scaled to `i128`. Each block of the search keeps `Qx`,
/// `Gx`, the side-constraint activities and both quadratic values up to
/// date as bits flip.
struct IntegerData {
    n: usize,
    scale: BigInt,
    c: Vec<i128>,
    q: Vec<Vec<i128>>,
    quad: Option<(Vec<i128>, Vec<Vec<i128>>, i128)>,
    side: Vec<(Vec<i128>, Sense, i128)>,
    fixed_mask: u64,
    fixed_value: u64,
}

/// Partial sums stay below this, so `i128` arithmetic cannot overflow.
const MAGNITUDE_LIMIT: f64 = 1e30;

impl IntegerData {
    fn new(inst: &ProblemInstance) -> Option<Self> {
        let objective: Vec<&Rational> = inst.c().iter().chain(inst.q().iter().flatten()).collect();
        let (scale, c_all) = scale_group(&objective)?;
        let n = inst.n();
        let c = c_all[..n].to_vec();
        let q = c_all[n..].chunks(n).map(<[i128]>::to_vec).collect();

        let quad = match inst.quad() {
            Some(qc) => {
                let items: Vec<&Rational> = qc.h.iter().chain(qc.g_matrix.iter().flatten()).chain([&qc.rhs]).collect();
                let (_, all) = scale_group(&items)?;
                let h = all[..n].to_vec();
                let g = all[n..n + n * n].chunks(n).map(<[i128]>::to_vec).collect();
                Some((h, g, all[n + n * n]))
            }
            None => None,
        };
        let mut side = Vec::new();
        for row in inst.side_constraints() {
            let items: Vec<&Rational> = row.coeffs.iter().chain([&row.rhs]).collect();
            let (_, all) = scale_group(&items)?;
            side.push((all[..n].to_vec(), row.sense, all[n]));
        }
        let mut fixed_mask = 0;
        let mut fixed_value = 0;
        for (&i, &v) in inst.fixed() {
            fixed_mask |= 1 << i;
            fixed_value |= u64::from(v) << i;
        }
        Some(Self { n, scale, c, q, quad, side, fixed_mask, fixed_value })
    }

    fn search(&self) -> Search {
        let n = self.n;
        let block_bits = n.min(12);
        let blocks = 1u64 << (n - block_bits);
        let results: Vec<(Option<i128>, Vec<u64>, u64)> =
            (0..blocks).into_par_iter().map(|b| self.search_block(b << block_bits, 1u64 << block_bits)).collect();
        let mut best: Option<i128> = None;
        let mut masks = Vec::new();
        let mut count = 0;
        for (value, block_masks, block_count) in results {
            count += block_count;
            let Some(v) = value else { continue };
            match best {
                Some(b) if v > b => {}
                Some(b) if v == b => masks.extend(block_masks),
                _ => {
                    best = Some(v);
                    masks = block_masks;
                }
            }
        }
        let objective = best.map(|v| Rational::new(BigInt::from(v), self.scale.clone()));
        (objective, masks, count)
    }

    fn search_block(&self, start: u64, len: u64) -> (Option<i128>, Vec<u64>, u64) {
        let n = self.n;
        let mut state = State::new(self, start);
        let mut best: Option<i128> = None;
        let mut masks = Vec::new();
        let mut count = 0;
        let mut mask = start;
        loop {
            if self.feasible(&state, mask) {
                count += 1;
                match best {
                    Some(b) if state.objective > b => {}
                    Some(b) if state.objective == b => masks.push(mask),
                    _ => {
                        best = Some(state.objective);
                        masks = vec![mask];
                    }
                }
            }
            if mask + 1 == start + len {
                break;
            }
            let next = mask + 1;
            let changed = mask ^ next;
            for k in 0..n {
                if changed >> k & 1 == 1 {
                    state.flip(self, k, next >> k & 1 == 1);
                }
            }
            mask = next;
        }
        (best, masks, count)
    }

    fn feasible(&self, state: &State, mask: u64) -> bool {
        if mask & self.fixed_mask != self.fixed_value {
            return false;
        }
        let sides_ok = self.side.iter().zip(&state.side).all(|((_, sense, rhs), lhs)| match sense {
            Sense::Le => lhs <= rhs,
            Sense::Ge => lhs >= rhs,
            Sense::Eq => lhs == rhs,
        });
        sides_ok && self.quad.as_ref().is_none_or(|(_, _, g)| state.quad >= *g)
    }
}

struct State {
    qx: Vec<i128>,
    gx: Vec<i128>,
    objective: i128,
    quad: i128,
    side: Vec<i128>,
}

impl State {
    fn new(data: &IntegerData, mask: u64) -> Self {
        let n = data.n;
        let mut state = State { qx: vec![0; n], gx: vec![0; n], objective: 0, quad: 0, side: vec![0; data.side.len()] };
        for k in 0..n {
            if mask >> k & 1 == 1 {
                state.flip(data, k, true);
            }
        }
        state
    }

    /// Sets `x_k` to `on`; `x_k` must currently hold the other value.
    fn flip(&mut self, data: &IntegerData, k: usize, on: bool) {
        let sign = if on { 1 } else { -1 };
        if !on {
            for (acc, row) in self.qx.iter_mut().zip(&data.q) {
                *acc -= row[k];
            }
        }
        self.objective += sign * (data.c[k] + 2 * self.qx[k] + data.q[k][k]);
        if on {
            for (acc, row) in self.qx.iter_mut().zip(&data.q) {
                *acc += row[k];
            }
        }
        if let Some((h, g, _)) = &data.quad {
            if !on {
                for (acc, row) in self.gx.iter_mut().zip(g) {
                    *acc -= row[k];
                }
            }
            self.quad += sign * (h[k] + 2 * self.gx[k] + g[k][k]);
            if on {
                for (acc, row) in self.gx.iter_mut().zip(g) {
                    *acc += row[k];
                }
            }
        }
        for (acc, (coeffs, _, _)) in self.side.iter_mut().zip(&data.side) {
            *acc += sign * coeffs[k];
        }
    }
}

/// Multiplies a group of rationals by the lcm of their denominators.
/// `None` when the scaled magnitudes could overflow.
fn scale_group(items: &[&Rational]) -> Option<(BigInt, Vec<i128>)> {
    let scale = items.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let mut total = BigInt::zero();
    let mut out = Vec::with_capacity(items.len());
    for r in items {
        let v = r.numer() * (&scale / r.denom());
        total += v.abs();
        out.push(v.to_i128()?);
    }
    // every running sum is bounded by three times the total mass
    (total.to_f64()? < MAGNITUDE_LIMIT).then_some((scale, out))
}
