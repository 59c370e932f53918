//! Mixed-integer linear models: the container type, the linearized
//! reformulations, cut families, canonical lifts and file formats.

mod build;
mod cuts;
mod lift;
mod lp_text;
mod mps;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::instance::Sense;
use crate::scalar::Scalar;
use crate::simplex::{LpProblem, LpRow};

pub use build::build_model;
pub use cuts::add_cuts;
pub use lift::{canonical_lift, check_lift, LiftCheck};
pub use lp_text::{read_lp_text, write_lp_text};
pub use mps::{read_mps, write_mps};

/// What a model variable stands for. Indexed roles carry the row index `i`
/// they belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarRole {
    X,
    /// Copy of `Q_i x`.
    Gamma,
    /// Copy of `G_i x`.
    Lambda,
    /// Stands for `x_i Q_i x`.
    SPrime,
    /// Stands for `x_i G_i x`.
    ZPrime,
    S,
    Y,
    Z,
    /// Auxiliary variable of the enhanced bound region.
    RegionY,
}

impl VarRole {
    pub fn tag(self) -> &'static str {
        match self {
            VarRole::X => "x",
            VarRole::Gamma => "gamma",
            VarRole::Lambda => "lambda",
            VarRole::SPrime => "s_prime",
            VarRole::ZPrime => "z_prime",
            VarRole::S => "s",
            VarRole::Y => "y",
            VarRole::Z => "z",
            VarRole::RegionY => "region_y",
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            VarRole::X => "x",
            VarRole::Gamma => "gam",
            VarRole::Lambda => "lam",
            VarRole::SPrime => "sp",
            VarRole::ZPrime => "zp",
            VarRole::S => "s",
            VarRole::Y => "y",
            VarRole::Z => "z",
            VarRole::RegionY => "ry",
        }
    }
}

impl FromStr for VarRole {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "x" => VarRole::X,
            "gamma" => VarRole::Gamma,
            "lambda" => VarRole::Lambda,
            "s_prime" => VarRole::SPrime,
            "z_prime" => VarRole::ZPrime,
            "s" => VarRole::S,
            "y" => VarRole::Y,
            "z" => VarRole::Z,
            "region_y" => VarRole::RegionY,
            other => return Err(Error::Parse(format!("unknown variable role `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelVariant {
    Bp,
    BpCompact,
    BpBar,
    Small,
    NbpBar,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 5] =
        [ModelVariant::Bp, ModelVariant::BpCompact, ModelVariant::BpBar, ModelVariant::Small, ModelVariant::NbpBar];

    pub fn name(self) -> &'static str {
        match self {
            ModelVariant::Bp => "bp",
            ModelVariant::BpCompact => "bp-compact",
            ModelVariant::BpBar => "bp-bar",
            ModelVariant::Small => "small",
            ModelVariant::NbpBar => "nbp-bar",
        }
    }

    /// Whether the variant reads the conditional bound families.
    pub fn needs_conditional(self) -> bool {
        self == ModelVariant::NbpBar
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown model variant `{s}`")))
    }
}

/// Root cut families. `Theta` uses the multiplier stored in the bound set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CutFamily {
    Base,
    Cond,
    Theta,
}

impl CutFamily {
    pub const ALL: [CutFamily; 3] = [CutFamily::Base, CutFamily::Cond, CutFamily::Theta];

    pub fn name(self) -> &'static str {
        match self {
            CutFamily::Base => "base",
            CutFamily::Cond => "cond",
            CutFamily::Theta => "theta",
        }
    }

    pub fn compatible_with(self, variant: ModelVariant) -> bool {
        match self {
            CutFamily::Base => matches!(variant, ModelVariant::BpCompact | ModelVariant::BpBar | ModelVariant::Small),
            CutFamily::Cond | CutFamily::Theta => variant == ModelVariant::NbpBar,
        }
    }
}

impl fmt::Display for CutFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CutFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CutFamily::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown cut family `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable<S> {
    pub name: String,
    pub role: VarRole,
    /// Row index the variable belongs to (zero-based).
    pub index: usize,
    pub lower: Option<S>,
    pub upper: Option<S>,
    pub binary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelRow<S> {
    pub name: String,
    /// Sorted by variable index, no zero entries.
    pub coeffs: Vec<(usize, S)>,
    pub sense: Sense,
    pub rhs: S,
    pub provenance: String,
}

impl<S: Scalar> ModelRow<S> {
    pub fn activity(&self, point: &[S]) -> S {
        self.coeffs.iter().fold(S::zero(), |acc, (j, a)| acc + a.clone() * point[*j].clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel<S> {
    pub variant: Option<ModelVariant>,
    pub cuts: Vec<CutFamily>,
    pub variables: Vec<Variable<S>>,
    pub rows: Vec<ModelRow<S>>,
    pub objective: Vec<(usize, S)>,
    pub objective_constant: S,
}

impl<S: Scalar> Default for LinearModel<S> {
    fn default() -> Self {
        Self::new(None)
    }
}

impl<S: Scalar> LinearModel<S> {
    pub fn new(variant: Option<ModelVariant>) -> Self {
        Self {
            variant,
            cuts: Vec::new(),
            variables: Vec::new(),
            rows: Vec::new(),
            objective: Vec::new(),
            objective_constant: S::zero(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_binary(&self) -> usize {
        self.variables.iter().filter(|v| v.binary).count()
    }

    /// Adds `role_{index+1}` and returns its column. Binary variables get
    /// bounds `[0, 1]` regardless of the arguments.
    pub fn add_var(&mut self, role: VarRole, index: usize, lower: Option<S>, upper: Option<S>, binary: bool) -> usize {
        let (lower, upper) = if binary { (Some(S::zero()), Some(S::one())) } else { (lower, upper) };
        self.variables.push(Variable {
            name: format!("{}{}", role.prefix(), index + 1),
            role,
            index,
            lower,
            upper,
            binary,
        });
        self.variables.len() - 1
    }

    pub fn add_row(
        &mut self,
        name: String,
        terms: impl IntoIterator<Item = (usize, S)>,
        sense: Sense,
        rhs: S,
        provenance: &str,
    ) {
        debug_assert!(!provenance.is_empty());
        self.rows.push(ModelRow { name, coeffs: merge_terms(terms), sense, rhs, provenance: provenance.to_string() });
    }

    pub fn set_objective(&mut self, terms: impl IntoIterator<Item = (usize, S)>, constant: S) {
        self.objective = merge_terms(terms);
        self.objective_constant = constant;
    }

    /// Column of the variable with this role and index.
    pub fn column(&self, role: VarRole, index: usize) -> Option<usize> {
        self.variables.iter().position(|v| v.role == role && v.index == index)
    }

    /// Columns of a role ordered by index.
    pub fn columns(&self, role: VarRole) -> Vec<usize> {
        let mut cols: Vec<usize> = (0..self.variables.len()).filter(|&j| self.variables[j].role == role).collect();
        cols.sort_by_key(|&j| self.variables[j].index);
        cols
    }

    /// Same model with every integrality flag cleared.
    pub fn lp_relaxation(&self) -> Self {
        let mut out = self.clone();
        for v in &mut out.variables {
            v.binary = false;
        }
        out
    }

    pub fn objective_value(&self, point: &[S]) -> S {
        self.objective.iter().fold(self.objective_constant.clone(), |acc, (j, c)| acc + c.clone() * point[*j].clone())
    }

    /// Dense LP with the model's objective; the constant is not included.
    pub fn to_lp(&self) -> LpProblem<S> {
        let mut objective = vec![S::zero(); self.num_vars()];
        for (j, c) in &self.objective {
            objective[*j] = c.clone();
        }
        self.to_lp_with(objective)
    }

    pub(crate) fn to_lp_with(&self, objective: Vec<S>) -> LpProblem<S> {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut coeffs = vec![S::zero(); self.num_vars()];
                for (j, a) in &row.coeffs {
                    coeffs[*j] = a.clone();
                }
                LpRow { coeffs, sense: row.sense, rhs: row.rhs.clone() }
            })
            .collect();
        LpProblem {
            objective,
            lower: self.variables.iter().map(|v| v.lower.clone()).collect(),
            upper: self.variables.iter().map(|v| v.upper.clone()).collect(),
            rows,
        }
    }

    /// Row and bound violations of `point`, worst first is not implied;
    /// entries are `(description, amount)` for every violation above `tol`.
    pub fn violations(&self, point: &[S], tol: &S) -> Vec<(String, S)> {
        let mut out = Vec::new();
        for v in self.variables.iter().zip(point) {
            let (var, value) = v;
            if let Some(l) = &var.lower {
                if l.clone() - value.clone() > *tol {
                    out.push((format!("{} below lower bound", var.name), l.clone() - value.clone()));
                }
            }
            if let Some(u) = &var.upper {
                if value.clone() - u.clone() > *tol {
                    out.push((format!("{} above upper bound", var.name), value.clone() - u.clone()));
                }
            }
        }
        for row in &self.rows {
            let amount = row.sense.violation(&row.activity(point), &row.rhs);
            if amount > *tol {
                out.push((format!("row {} ({})", row.name, row.provenance), amount));
            }
        }
        out
    }

    /// Converts every number with `f`.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LinearModel<T> {
        let terms = |ts: &[(usize, S)]| -> Vec<(usize, T)> {
            ts.iter().map(|(j, a)| (*j, f(a))).filter(|(_, a)| !a.is_zero()).collect()
        };
        LinearModel {
            variant: self.variant,
            cuts: self.cuts.clone(),
            variables: self
                .variables
                .iter()
                .map(|v| Variable {
                    name: v.name.clone(),
                    role: v.role,
                    index: v.index,
                    lower: v.lower.as_ref().map(&f),
                    upper: v.upper.as_ref().map(&f),
                    binary: v.binary,
                })
                .collect(),
            rows: self
                .rows
                .iter()
                .map(|r| ModelRow {
                    name: r.name.clone(),
                    coeffs: terms(&r.coeffs),
                    sense: r.sense,
                    rhs: f(&r.rhs),
                    provenance: r.provenance.clone(),
                })
                .collect(),
            objective: terms(&self.objective),
            objective_constant: f(&self.objective_constant),
        }
    }

    pub fn to_f64(&self) -> LinearModel<f64> {
        self.map(|v| v.as_f64())
    }
}

/// Sums duplicate columns, drops zeros and sorts by column.
fn merge_terms<S: Scalar>(terms: impl IntoIterator<Item = (usize, S)>) -> Vec<(usize, S)> {
    let mut acc: BTreeMap<usize, S> = BTreeMap::new();
    for (j, a) in terms {
        if a.is_zero() {
            continue;
        }
        let slot = acc.entry(j).or_insert_with(S::zero);
        *slot = slot.clone() + a;
    }
    acc.into_iter().filter(|(_, a)| !a.is_zero()).collect()
}

/// `coef * row . x` as model terms over the `X` columns.
pub(crate) fn scaled_terms<S: Scalar>(x_cols: &[usize], row: &[S], coef: &S) -> Vec<(usize, S)> {
    x_cols.iter().zip(row).filter(|(_, a)| !a.is_zero()).map(|(&j, a)| (j, coef.clone() * a.clone())).collect()
}
