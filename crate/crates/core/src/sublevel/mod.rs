//! The sublevel-set LP and its cutting-plane solution.
//!
//! Given similarities `S` and a fixed tree `X`, the LP minimises `⟨X, Y⟩`
//! over fractional hierarchies `Y` whose loss does not exceed `Loss(S, X)`.
//! Its optimum `δ` lower-bounds `⟨X, Y⟩` for every tree `Y` in the sublevel
//! set, so every such tree lies within Hamming distance `2(‖X‖² - δ)` of `X`.
//!
//! Bounds, level monotonicity and the sublevel row are in the base model;
//! triangle and spreading rows are added by separation until none is
//! violated.

mod certify;
pub mod separation;

use std::collections::HashSet;

pub use certify::{certify, certify_tree, CertifyConfig, Method, StabilityReport};
pub use separation::{
    most_violated_spreading, separate_spreading, separate_triangle, Cut, CutFamily, CutKey,
};

pub use crate::hctree::FractionalHierarchy;

use crate::cost::{loss, sublevel_coefficients, SimilarityMatrix};
use crate::error::{Error, Result};
use crate::hctree::{pair_count, pairs, LevelIndicator};
use crate::lp::{LpConfig, LpModel, LpStatus, Relation, Row, Simplex};
use crate::metrics::{optimality_radius, NormConstant};

/// Data, the fixed clustering, and its loss.
#[derive(Clone, Debug)]
pub struct SsInstance {
    s: SimilarityMatrix,
    x: LevelIndicator,
    loss_x: f64,
}

impl SsInstance {
    pub fn new(s: SimilarityMatrix, x: LevelIndicator) -> Result<Self> {
        let loss_x = loss(&s, &x)?;
        Ok(SsInstance { s, x, loss_x })
    }

    pub fn similarity(&self) -> &SimilarityMatrix {
        &self.s
    }

    pub fn indicator(&self) -> &LevelIndicator {
        &self.x
    }

    pub fn loss_x(&self) -> f64 {
        self.loss_x
    }

    pub fn n(&self) -> usize {
        self.s.n()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SsConfig {
    /// Rows violated by more than this are added.
    pub separation_tol: f64,
    /// Cut rounds before giving up.
    pub max_rounds: usize,
    /// Allowed overshoot of `δ` above the norm constant.
    pub radius_tol: f64,
    pub lp: LpConfig,
}

impl Default for SsConfig {
    fn default() -> Self {
        SsConfig {
            separation_tol: 1e-7,
            max_rounds: 200,
            radius_tol: crate::metrics::RADIUS_TOLERANCE,
            // Tighter than the separation tolerance so that rows already in
            // the model are never reported as violated again.
            lp: LpConfig {
                feasibility_tol: 1e-9,
                optimality_tol: 1e-9,
                ..LpConfig::default()
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SsStatus {
    /// No violated row remains; `δ` is the LP optimum.
    Converged,
    RoundLimit,
    LpIterationLimit,
    /// Separation only returned rows already in the model.
    Stalled,
}

impl SsStatus {
    pub fn is_certifying(self) -> bool {
        self == SsStatus::Converged
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SsStatus::Converged => "certified",
            SsStatus::RoundLimit => "round-limit",
            SsStatus::LpIterationLimit => "lp-iteration-limit",
            SsStatus::Stalled => "stalled",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CutCounts {
    pub triangle: usize,
    pub spreading: usize,
}

#[derive(Clone, Debug)]
pub struct SsResult {
    pub status: SsStatus,
    /// LP optimum including the level-1 entries.
    pub delta: f64,
    /// `2(‖X‖² - δ)`; present only when the cut loop converged.
    pub epsilon: Option<f64>,
    pub y_star: FractionalHierarchy,
    /// LP solves performed.
    pub rounds: usize,
    pub cuts_added: CutCounts,
    pub lp_iterations: usize,
    /// `δ` after each LP solve.
    pub delta_history: Vec<f64>,
}

/// Contribution of the pinned level-1 entries to `⟨X, Y⟩`.
fn pinned_contribution(n: usize) -> f64 {
    pair_count(n) as f64
}

/// Variables `y(i,j,t)` in tensor order with bounds `[0, 1]` (level 1 pinned
/// to 1), objective over the entries where `x = 1` at levels `t ≥ 2`, the
/// sublevel row, and monotonicity rows `y(t) ≥ y(t+1)`.
pub fn build_base_model(inst: &SsInstance) -> Result<LpModel> {
    let n = inst.n();
    let x = &inst.x;
    let mut model = LpModel::new();
    for (i, j) in pairs(n) {
        for t in 1..n {
            let name = format!("y_{}_{}_{}", i + 1, j + 1, t);
            let cost = if t == 1 { 0.0 } else { f64::from(x.get(i, j, t)) };
            let lower = if t == 1 { 1.0 } else { 0.0 };
            let index = model.add_variable(name, lower, 1.0, cost);
            debug_assert_eq!(index, x.index(i, j, t));
        }
    }

    let coefficients = sublevel_coefficients(&inst.s);
    if !coefficients.is_vacuous() {
        // Scaled by the largest similarity; the row is homogeneous in S.
        let scale = inst.s.max_entry();
        let rhs = coefficients.rhs(x)? / scale;
        let coeffs = coefficients
            .coefficients
            .values()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(k, &c)| (k, c / scale))
            .collect();
        model.add_row(Row::new(coeffs, Relation::LessEq, rhs));
    }

    for (i, j) in pairs(n) {
        for t in 1..n - 1 {
            model.add_row(Row::new(
                vec![(x.index(i, j, t), 1.0), (x.index(i, j, t + 1), -1.0)],
                Relation::GreaterEq,
                0.0,
            ));
        }
    }
    Ok(model)
}

/// Cutting-plane solution of the sublevel-set LP.
pub fn solve_ss(inst: &SsInstance, config: &SsConfig) -> Result<SsResult> {
    let n = inst.n();
    let model = build_base_model(inst)?;
    let mut simplex = Simplex::new(model, config.lp.clone())?;
    let mut solution = simplex.solve()?;
    let mut seen: HashSet<CutKey> = HashSet::new();
    let mut cuts_added = CutCounts::default();
    let mut lp_iterations = solution.iterations;
    let mut rounds = 1;
    let mut delta_history = Vec::new();

    let status = loop {
        match solution.status {
            LpStatus::Optimal => {}
            LpStatus::IterationLimit => break SsStatus::LpIterationLimit,
            LpStatus::Infeasible => {
                return Err(Error::Inconsistent(
                    "sublevel LP reported infeasible although X itself is feasible".into(),
                ))
            }
        }
        delta_history.push(solution.objective + pinned_contribution(n));

        let y = FractionalHierarchy::from_values(n, solution.primal.clone())?;
        let mut found = separate_triangle(&y, config.separation_tol);
        found.extend(separate_spreading(&y, config.separation_tol));
        if found.is_empty() {
            break SsStatus::Converged;
        }
        let fresh: Vec<Cut> = found.into_iter().filter(|c| seen.insert(c.key.clone())).collect();
        if fresh.is_empty() {
            break SsStatus::Stalled;
        }
        if rounds >= config.max_rounds {
            break SsStatus::RoundLimit;
        }
        for cut in &fresh {
            match cut.family() {
                CutFamily::Triangle => cuts_added.triangle += 1,
                CutFamily::Spreading => cuts_added.spreading += 1,
            }
        }
        solution = simplex.add_rows_and_resolve(fresh.into_iter().map(|c| c.row).collect())?;
        lp_iterations += solution.iterations;
        rounds += 1;
    };

    let delta = solution.objective + pinned_contribution(n);
    let epsilon = if status.is_certifying() {
        Some(optimality_radius(n, delta, config.radius_tol)?)
    } else {
        None
    };
    let constant = NormConstant::new(n).value as f64;
    if status.is_certifying() && delta < -config.radius_tol {
        return Err(Error::Inconsistent(format!("negative delta {delta}")));
    }
    debug_assert!(!status.is_certifying() || delta <= constant + config.radius_tol);
    Ok(SsResult {
        status,
        delta,
        epsilon,
        y_star: FractionalHierarchy::from_values(n, solution.primal)?,
        rounds,
        cuts_added,
        lp_iterations,
        delta_history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hctree::tree_to_indicator;

    fn instance(s: SimilarityMatrix, tree: &str) -> SsInstance {
        SsInstance::new(s, tree_to_indicator(&tree.parse().unwrap())).unwrap()
    }

    fn single_pair(n: usize) -> SimilarityMatrix {
        SimilarityMatrix::from_fn(n, |i, j| if (i, j) == (0, 1) { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn base_model_sizes() {
        let m = build_base_model(&instance(single_pair(2), "(1,2)")).unwrap();
        assert_eq!(m.num_variables(), 1);
        assert_eq!(m.variables()[0].lower, 1.0);
        assert_eq!(m.num_rows(), 1);

        let m = build_base_model(&instance(single_pair(3), "((1,2),3)")).unwrap();
        assert_eq!(m.num_variables(), 6);
        assert_eq!(m.variables().iter().filter(|v| v.lower == 1.0).count(), 3);
        assert_eq!(m.num_rows(), 1 + 3);

        let s4 = SimilarityMatrix::from_fn(4, |_, _| 1.0).unwrap();
        let m = build_base_model(&instance(s4, "((1,2),(3,4))")).unwrap();
        assert_eq!(m.num_variables(), 18);
        assert_eq!(m.variables().iter().filter(|v| v.lower == 1.0).count(), 6);
        assert_eq!(m.num_rows(), 1 + 12);
    }

    #[test]
    fn zero_similarity_drops_sublevel_row() {
        let zero = SimilarityMatrix::from_fn(3, |_, _| 0.0).unwrap();
        let m = build_base_model(&instance(zero, "((1,2),3)")).unwrap();
        assert_eq!(m.num_rows(), 3);
    }

    #[test]
    fn worked_single_pair() {
        let r = solve_ss(&instance(single_pair(3), "((1,2),3)"), &SsConfig::default()).unwrap();
        assert_eq!(r.status, SsStatus::Converged);
        assert!((r.delta - 5.0).abs() < 1e-9);
        assert!(r.epsilon.unwrap().abs() < 1e-9);
    }

    #[test]
    fn worked_all_ones() {
        let ones = SimilarityMatrix::from_fn(3, |_, _| 1.0).unwrap();
        let r = solve_ss(&instance(ones, "((1,2),3)"), &SsConfig::default()).unwrap();
        assert!((r.delta - 4.0).abs() < 1e-9);
        assert!((r.epsilon.unwrap() - 2.0).abs() < 1e-9);
        assert!(r.cuts_added.spreading > 0);
    }

    #[test]
    fn worked_two_points() {
        let s = SimilarityMatrix::from_fn(2, |_, _| 0.7).unwrap();
        let r = solve_ss(&instance(s, "(1,2)"), &SsConfig::default()).unwrap();
        assert_eq!(r.delta, 1.0);
        assert_eq!(r.epsilon, Some(0.0));
        assert_eq!(r.rounds, 1);
    }

    #[test]
    fn spreading_row_raises_objective() {
        // Base model of the single-pair instance stops at 3 (the level-1
        // pins); adding the violated spreading rows at t = 2 lifts it to 5.
        let inst = instance(single_pair(3), "((1,2),3)");
        let mut simplex = Simplex::new(build_base_model(&inst).unwrap(), SsConfig::default().lp).unwrap();
        let base = simplex.solve().unwrap();
        assert!(base.objective.abs() < 1e-9);
        let y = FractionalHierarchy::from_values(3, base.primal).unwrap();
        let rows: Vec<Row> = separate_spreading(&y, 1e-7).into_iter().map(|c| c.row).collect();
        assert!(!rows.is_empty());
        let next = simplex.add_rows_and_resolve(rows).unwrap();
        assert!((next.objective - 2.0).abs() < 1e-9);
    }

    #[test]
    fn round_limit_is_not_certifying() {
        let ones = SimilarityMatrix::from_fn(3, |_, _| 1.0).unwrap();
        let config = SsConfig {
            max_rounds: 1,
            ..SsConfig::default()
        };
        let r = solve_ss(&instance(ones, "((1,2),3)"), &config).unwrap();
        assert_eq!(r.status, SsStatus::RoundLimit);
        assert_eq!(r.epsilon, None);
    }
}
