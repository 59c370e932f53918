//! Instance suites and an independent LP oracle shared by the integration
//! tests and the acceptance runner.
#![allow(dead_code)]

use qlin_core::{generate_random, GeneratorConfig, LpProblem, LpRow, ProblemInstance, Sense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Mixed side constraints: cardinality rows on some seeds, knapsack rows
/// on others, both on a few.
pub fn suite_instance(seed: u64, n: usize) -> ProblemInstance {
    let cfg = GeneratorConfig {
        n,
        density: 0.6,
        coeff_range: 5,
        cardinality: (!seed.is_multiple_of(3)).then_some((n / 2).max(1) + (seed as usize % 2)),
        knapsack: seed % 4 == 1 || seed.is_multiple_of(5),
        with_quad_constraint: true,
        seed,
    };
    generate_random(&cfg).expect("suite instance")
}

/// `count` instances with `n` cycling through `lo..=hi`.
pub fn suite(count: u64, lo: usize, hi: usize) -> Vec<(u64, ProblemInstance)> {
    (0..count)
        .map(|seed| {
            let n = lo + (seed as usize) % (hi - lo + 1);
            (seed, suite_instance(seed, n))
        })
        .collect()
}

/// Small bounded LP with integer data: a few rows of every sense plus box
/// bounds on every column, so the optimum is attained at a vertex.
pub fn random_lp(seed: u64) -> LpProblem<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=4);
    let m = rng.random_range(0..=4);
    let mut lp = LpProblem::boxed(n, None, None);
    for j in 0..n {
        lp.objective[j] = rng.random_range(-5..=5) as f64;
        let lo = rng.random_range(-3..=0) as f64;
        lp.lower[j] = Some(lo);
        lp.upper[j] = Some(lo + rng.random_range(0..=4) as f64);
    }
    for _ in 0..m {
        let coeffs: Vec<f64> = (0..n).map(|_| rng.random_range(-4..=4) as f64).collect();
        let sense = match rng.random_range(0..6) {
            0 => Sense::Eq,
            1 | 2 => Sense::Ge,
            _ => Sense::Le,
        };
        let rhs = rng.random_range(-6..=6) as f64;
        lp.rows.push(LpRow { coeffs, sense, rhs });
    }
    lp
}

/// Minimum over every basic solution: each choice of `n` tight
/// constraints among rows and bounds is solved by Gaussian elimination
/// and kept when feasible. `None` when nothing is feasible.
pub fn vertex_minimum(lp: &LpProblem<f64>) -> Option<f64> {
    let n = lp.objective.len();
    let mut planes: Vec<(Vec<f64>, f64)> = lp.rows.iter().map(|r| (r.coeffs.clone(), r.rhs)).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        if let Some(l) = lp.lower[j] {
            planes.push((e.clone(), l));
        }
        if let Some(u) = lp.upper[j] {
            planes.push((e, u));
        }
    }
    let mut best: Option<f64> = None;
    let mut pick = Vec::with_capacity(n);
    choose(&planes, n, 0, &mut pick, &mut |subset| {
        let Some(x) = solve_square(subset.iter().map(|&k| &planes[k]).collect()) else { return };
        if feasible(lp, &x, 1e-9) {
            let v: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
            if best.is_none_or(|b| v < b) {
                best = Some(v);
            }
        }
    });
    best
}

fn choose(planes: &[(Vec<f64>, f64)], k: usize, from: usize, pick: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if pick.len() == k {
        f(pick);
        return;
    }
    for i in from..planes.len() {
        pick.push(i);
        choose(planes, k, i + 1, pick, f);
        pick.pop();
    }
}

fn solve_square(rows: Vec<&(Vec<f64>, f64)>) -> Option<Vec<f64>> {
    let n = rows.len();
    let mut a: Vec<Vec<f64>> = rows.iter().map(|(c, b)| c.iter().copied().chain([*b]).collect()).collect();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, p);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

pub fn feasible(lp: &LpProblem<f64>, x: &[f64], tol: f64) -> bool {
    let bounds_ok = x
        .iter()
        .enumerate()
        .all(|(j, &v)| lp.lower[j].is_none_or(|l| v >= l - tol) && lp.upper[j].is_none_or(|u| v <= u + tol));
    bounds_ok
        && lp.rows.iter().all(|r| {
            let lhs: f64 = r.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            match r.sense {
                Sense::Le => lhs <= r.rhs + tol,
                Sense::Ge => lhs >= r.rhs - tol,
                Sense::Eq => (lhs - r.rhs).abs() <= tol,
            }
        })
}
