use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dot_binary, ProblemInstance, QuadConstraint, Sense, SideConstraint};
use crate::error::{Error, Result};
use crate::scalar::{rational_from_int, Rational};

/// Seeded random instance parameters. Integer coefficients are drawn
/// uniformly from `[-coeff_range, coeff_range]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n: usize,
    /// Probability that an entry of `Q` (or `G`) is nonzero.
    pub density: f64,
    pub coeff_range: i64,
    /// Adds `e'x <= k`.
    pub cardinality: Option<usize>,
    /// Adds a knapsack row `a'x <= floor(sum(a) / 2)` with weights in
    /// `[1, coeff_range]`.
    pub knapsack: bool,
    pub with_quad_constraint: bool,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            n: 6,
            density: 0.5,
            coeff_range: 5,
            cardinality: None,
            knapsack: false,
            with_quad_constraint: false,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Value("generator needs n >= 2".into()));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::Value("density must lie in (0, 1]".into()));
        }
        if self.coeff_range < 1 {
            return Err(Error::Value("coefficient range must be at least 1".into()));
        }
        if self.cardinality.is_some_and(|k| k > self.n) {
            return Err(Error::Value("cardinality bound exceeds n".into()));
        }
        Ok(())
    }
}

pub fn generate_random(config: &GeneratorConfig) -> Result<ProblemInstance> {
    config.validate()?;
    let n = config.n;
    let bound = config.coeff_range;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let c: Vec<Rational> = (0..n).map(|_| rational_from_int(rng.random_range(-bound..=bound))).collect();
    let q = sparse_symmetric(&mut rng, n, config.density, bound);

    let mut side = Vec::new();
    if let Some(k) = config.cardinality {
        side.push(SideConstraint {
            coeffs: vec![rational_from_int(1); n],
            sense: Sense::Le,
            rhs: rational_from_int(k as i64),
        });
    }
    if config.knapsack {
        let weights: Vec<i64> = (0..n).map(|_| rng.random_range(1..=bound)).collect();
        let capacity = weights.iter().sum::<i64>() / 2;
        side.push(SideConstraint {
            coeffs: weights.into_iter().map(rational_from_int).collect(),
            sense: Sense::Le,
            rhs: rational_from_int(capacity),
        });
    }

    let quad = if config.with_quad_constraint {
        let h: Vec<Rational> = (0..n).map(|_| rational_from_int(rng.random_range(-bound..=bound))).collect();
        let g_matrix = sparse_symmetric(&mut rng, n, config.density, bound);
        let x0 = sample_side_feasible(&mut rng, n, &side).ok_or_else(|| {
            Error::Generation(format!("no point satisfying the side constraints in {} samples", n * 64))
        })?;
        let mut rhs = dot_binary(&h, &x0);
        for i in (0..n).filter(|&i| x0[i] == 1) {
            rhs += dot_binary(&g_matrix[i], &x0);
        }
        Some(QuadConstraint { h, g_matrix, rhs })
    } else {
        None
    };

    ProblemInstance::new(c, q, quad, side, BTreeMap::new())
}

fn sparse_symmetric(rng: &mut ChaCha8Rng, n: usize, density: f64, bound: i64) -> Vec<Vec<Rational>> {
    let mut m = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i..n {
            if rng.random_bool(density) {
                let mut v = rng.random_range(-bound..bound);
                if v >= 0 {
                    v += 1;
                }
                m[i][j] = v;
                m[j][i] = v;
            }
        }
    }
    m.into_iter().map(|row| row.into_iter().map(rational_from_int).collect()).collect()
}

/// Rejection sampling; the number of ones is drawn first so sparse
/// feasible sets (small cardinality bounds) are still hit.
fn sample_side_feasible(rng: &mut ChaCha8Rng, n: usize, side: &[SideConstraint]) -> Option<Vec<u8>> {
    for _ in 0..n * 64 {
        let ones = rng.random_range(0..=n);
        let mut x = vec![0u8; n];
        for i in sample(rng, n, ones) {
            x[i] = 1;
        }
        let ok = side.iter().all(|row| {
            let lhs = dot_binary(&row.coeffs, &x);
            row.sense.holds(&lhs, &row.rhs, &Rational::from_integer(0.into()))
        });
        if ok {
            return Some(x);
        }
    }
    None
}
