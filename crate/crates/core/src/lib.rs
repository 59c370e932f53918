//! Linearizations of zero-one quadratic programs.
//!
//! An instance minimizes `c'x + x'Qx` over binary `x` subject to one
//! quadratic constraint and linear side constraints. The crate computes the
//! LP bound parameters behind several mixed-integer linear reformulations,
//! builds those models with optional cut families, solves them by
//! branch-and-bound and checks the results against exhaustive enumeration.
//!
//! Numeric code is generic over [`Scalar`]; the aliases below fix the common
//! instantiations.

pub mod bnb;
pub mod bounds;
pub mod envelopes;
pub mod error;
pub mod format;
pub mod instance;
pub mod models;
pub mod oracle;
pub mod scalar;
pub mod simplex;

pub use error::{Error, Result};
pub use instance::{
    generate_random, load_instance, read_instance, save_instance, write_instance, GeneratorConfig, PointValue,
    ProblemInstance, QuadConstraint, Sense, SideConstraint,
};
pub use scalar::{format_rational, parse_rational, Rational, Scalar};
pub use simplex::{solve_lp, solve_lp_with, LpProblem, LpRow, LpSolution, LpStatus, SimplexConfig};

pub use bnb::{solve_milp, solve_milp_logged, MilpConfig, MilpSolution, MilpStatus};
pub use bounds::{compute_bound_set, BoundOptions, BoundSet, ConditionalBounds, GridConfig, RowBounds, ThetaMode};
pub use envelopes::{check_identities, IdentityReport};
pub use format::format_g12;
pub use models::{
    add_cuts, build_model, check_lift, read_lp_text, read_mps, write_lp_text, write_mps, CutFamily, LinearModel,
    ModelVariant, VarRole,
};
pub use oracle::{
    check_instance, compare_relaxations, enumerate_optimum, verify_equivalence, CheckOptions, CompareOptions,
    ComparisonReport, OracleResult, OracleStatus,
};

pub type LpProblem64 = LpProblem<f64>;
pub type LinearModel64 = LinearModel<f64>;
pub type LinearModelExact = LinearModel<Rational>;
pub type BoundSet64 = BoundSet<f64>;
pub type BoundSetExact = BoundSet<Rational>;
pub type MilpSolution64 = MilpSolution<f64>;
pub type IdentityReportExact = IdentityReport<Rational>;
