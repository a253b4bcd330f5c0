//! A small dense linear-programming solver for bounded variables.
//!
//! Models are minimisations over variables with finite bounds and rows of
//! the form `a·x {≤, ≥, =} b`. [`Simplex`] keeps its basis between calls so
//! rows can be appended and the problem re-optimised from the previous
//! basis, which is what a cutting-plane loop needs.

mod format;
mod simplex;

pub use simplex::Simplex;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    LessEq,
    GreaterEq,
    Equal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

/// Sparse linear constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Row {
    pub fn new(coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> Self {
        Row { coeffs, relation, rhs }
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the row; zero when satisfied.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.relation {
            Relation::LessEq => (lhs - self.rhs).max(0.0),
            Relation::GreaterEq => (self.rhs - lhs).max(0.0),
            Relation::Equal => (lhs - self.rhs).abs(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LpModel {
    variables: Vec<Variable>,
    objective: Vec<f64>,
    rows: Vec<Row>,
}

impl LpModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with bounds `[lower, upper]` and objective
    /// coefficient `cost`; returns its index.
    pub fn add_variable(&mut self, name: impl Into<String>, lower: f64, upper: f64, cost: f64) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            lower,
            upper,
        });
        self.objective.push(cost);
        self.variables.len() - 1
    }

    pub fn add_row(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn validate(&self) -> Result<()> {
        for (j, v) in self.variables.iter().enumerate() {
            if !v.lower.is_finite() || !v.upper.is_finite() {
                return Err(Error::InvalidModel(format!("variable {j} has an infinite bound")));
            }
            if v.lower > v.upper {
                return Err(Error::InvalidModel(format!(
                    "variable {j} has lower bound {} above upper bound {}",
                    v.lower, v.upper
                )));
            }
            if !self.objective[j].is_finite() {
                return Err(Error::InvalidModel(format!("objective coefficient {j} is not finite")));
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            validate_row(row, self.variables.len()).map_err(|e| match e {
                Error::InvalidModel(m) => Error::InvalidModel(format!("row {r}: {m}")),
                other => other,
            })?;
        }
        Ok(())
    }
}

pub(crate) fn validate_row(row: &Row, num_variables: usize) -> Result<()> {
    if !row.rhs.is_finite() {
        return Err(Error::InvalidModel("right-hand side is not finite".into()));
    }
    for &(j, a) in &row.coeffs {
        if j >= num_variables {
            return Err(Error::InvalidModel(format!("references undeclared variable {j}")));
        }
        if !a.is_finite() {
            return Err(Error::InvalidModel(format!("coefficient of variable {j} is not finite")));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpConfig {
    /// Allowed bound violation of basic variables.
    pub feasibility_tol: f64,
    /// Allowed reduced-cost sign violation at optimality.
    pub optimality_tol: f64,
    /// Smallest pivot element magnitude accepted in ratio tests.
    pub pivot_tol: f64,
    pub max_iterations: usize,
    /// Pivots between full recomputations of the basis inverse.
    pub refactor_interval: usize,
    /// Consecutive degenerate pivots before switching to the
    /// smallest-index rule.
    pub degenerate_streak: usize,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig {
            feasibility_tol: 1e-7,
            optimality_tol: 1e-7,
            pivot_tol: 1e-9,
            max_iterations: 100_000,
            refactor_interval: 64,
            degenerate_streak: 30,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
    /// Pivots and bound flips performed by this call.
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Solves `model` from scratch.
pub fn solve(model: &LpModel, config: &LpConfig) -> Result<LpSolution> {
    Simplex::new(model.clone(), config.clone())?.solve()
}
