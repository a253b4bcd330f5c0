use super::{validate_row, LpConfig, LpModel, LpSolution, LpStatus, Relation, Row};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VarStatus {
    Basic(usize),
    AtLower,
    AtUpper,
}

enum DualOutcome {
    PrimalFeasible,
    Infeasible,
    IterationLimit,
}

enum PrimalOutcome {
    Optimal,
    IterationLimit,
}

// Step lengths at or below this count as degenerate.
const DEGENERATE_STEP: f64 = 1e-12;

/// Bounded-variable simplex over a dense explicit basis inverse.
///
/// Every row `a·x {≤,≥,=} b` is stored as `σa·x + s = σb` with `σ = -1` for
/// `≥` rows and a slack `s ∈ [0, ∞)` (or `[0, 0]` for equalities), so the
/// all-slack basis is the identity. Structural variables start at whichever
/// bound makes their reduced cost dual feasible; the dual simplex then
/// restores primal feasibility and a primal pass removes any remaining
/// reduced-cost violations. Appended rows enter with their slack basic, which
/// keeps the current basis dual feasible for a warm restart.
#[derive(Clone, Debug)]
pub struct Simplex {
    model: LpModel,
    config: LpConfig,
    num_struct: usize,
    // Per standard-form row.
    sign: Vec<f64>,
    b: Vec<f64>,
    // Structural columns as (row, σ·coefficient).
    cols: Vec<Vec<(usize, f64)>>,
    // Per variable, structurals first then one slack per row.
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    status: Vec<VarStatus>,
    basis: Vec<usize>,
    binv: Vec<Vec<f64>>,
    since_refactor: usize,
}

impl Simplex {
    pub fn new(model: LpModel, config: LpConfig) -> Result<Self> {
        model.validate()?;
        let num_struct = model.num_variables();
        let mut lower = Vec::with_capacity(num_struct);
        let mut upper = Vec::with_capacity(num_struct);
        let mut cost = Vec::with_capacity(num_struct);
        let mut status = Vec::with_capacity(num_struct);
        for (v, &c) in model.variables().iter().zip(model.objective()) {
            lower.push(v.lower);
            upper.push(v.upper);
            cost.push(c);
            let at_upper = c < 0.0 && v.lower < v.upper;
            status.push(if at_upper { VarStatus::AtUpper } else { VarStatus::AtLower });
        }
        let mut simplex = Simplex {
            num_struct,
            sign: Vec::new(),
            b: Vec::new(),
            cols: vec![Vec::new(); num_struct],
            lower,
            upper,
            cost,
            status,
            basis: Vec::new(),
            binv: Vec::new(),
            since_refactor: 0,
            config,
            model: LpModel::default(),
        };
        for row in model.rows() {
            simplex.append_row(row);
        }
        simplex.model = model;
        Ok(simplex)
    }

    pub fn model(&self) -> &LpModel {
        &self.model
    }

    pub fn config(&self) -> &LpConfig {
        &self.config
    }

    /// Optimises from the current basis.
    pub fn solve(&mut self) -> Result<LpSolution> {
        let mut iterations = 0;
        for _ in 0..4 {
            self.refactor()?;
            match self.dual_phase(&mut iterations)? {
                DualOutcome::PrimalFeasible => {}
                DualOutcome::Infeasible => return Ok(self.solution(LpStatus::Infeasible, iterations)),
                DualOutcome::IterationLimit => {
                    return Ok(self.solution(LpStatus::IterationLimit, iterations))
                }
            }
            match self.primal_phase(&mut iterations)? {
                PrimalOutcome::Optimal => {}
                PrimalOutcome::IterationLimit => {
                    return Ok(self.solution(LpStatus::IterationLimit, iterations))
                }
            }
            // Accept only if a fresh factorisation agrees.
            self.refactor()?;
            let xb = self.basic_values();
            let y = self.duals();
            if self.max_primal_infeasibility(&xb) <= self.config.feasibility_tol
                && self.max_dual_infeasibility(&y) <= self.config.optimality_tol
            {
                return Ok(self.solution(LpStatus::Optimal, iterations));
            }
        }
        Err(Error::Numerical("solution did not stabilise after refactorisation".into()))
    }

    /// Appends `rows` to the model and re-optimises from the current basis.
    pub fn add_rows_and_resolve(&mut self, rows: Vec<Row>) -> Result<LpSolution> {
        for row in &rows {
            validate_row(row, self.num_struct)?;
        }
        for row in rows {
            self.append_row(&row);
            self.model.add_row(row);
        }
        self.solve()
    }

    fn num_rows(&self) -> usize {
        self.b.len()
    }

    fn append_row(&mut self, row: &Row) {
        let m = self.num_rows();
        let sign = if row.relation == Relation::GreaterEq { -1.0 } else { 1.0 };

        let mut coeffs = row.coeffs.clone();
        coeffs.sort_by_key(|&(j, _)| j);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
        for (j, a) in coeffs {
            match merged.last_mut() {
                Some((last, acc)) if *last == j => *acc += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        for &(j, a) in &merged {
            self.cols[j].push((m, sign * a));
        }

        self.sign.push(sign);
        self.b.push(sign * row.rhs);
        self.lower.push(0.0);
        self.upper.push(if row.relation == Relation::Equal { 0.0 } else { f64::INFINITY });
        self.cost.push(0.0);
        let slack = self.num_struct + m;
        self.status.push(VarStatus::Basic(m));

        // Extend the inverse: [[B⁻¹, 0], [-w·B⁻¹, 1]] with w the new row's
        // coefficients on the current basic variables.
        let mut new_row = vec![0.0; m + 1];
        for (r, &var) in self.basis.iter().enumerate() {
            if var >= self.num_struct {
                continue;
            }
            if let Ok(pos) = merged.binary_search_by_key(&var, |&(j, _)| j) {
                let w = sign * merged[pos].1;
                for (k, value) in new_row.iter_mut().take(m).enumerate() {
                    *value -= w * self.binv[r][k];
                }
            }
        }
        new_row[m] = 1.0;
        for row in &mut self.binv {
            row.push(0.0);
        }
        self.binv.push(new_row);
        self.basis.push(slack);
    }

    fn column_dot(&self, j: usize, v: &[f64]) -> f64 {
        if j < self.num_struct {
            self.cols[j].iter().map(|&(r, a)| a * v[r]).sum()
        } else {
            v[j - self.num_struct]
        }
    }

    /// `B⁻¹ a_j`.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.num_rows();
        let mut out = vec![0.0; m];
        if j < self.num_struct {
            for &(k, a) in &self.cols[j] {
                for (r, o) in out.iter_mut().enumerate() {
                    *o += self.binv[r][k] * a;
                }
            }
        } else {
            let k = j - self.num_struct;
            for (r, o) in out.iter_mut().enumerate() {
                *o = self.binv[r][k];
            }
        }
        out
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.num_rows();
        self.since_refactor = 0;
        if m == 0 {
            self.binv.clear();
            return Ok(());
        }
        // Dense B, then Gauss-Jordan with partial pivoting on [B | I].
        let mut a = vec![vec![0.0; m]; m];
        for (r, &var) in self.basis.iter().enumerate() {
            if var < self.num_struct {
                for &(k, v) in &self.cols[var] {
                    a[k][r] = v;
                }
            } else {
                a[var - self.num_struct][r] = 1.0;
            }
        }
        let mut inv: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let mut row = vec![0.0; m];
                row[i] = 1.0;
                row
            })
            .collect();
        for col in 0..m {
            let pivot = (col..m)
                .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
                .expect("non-empty range");
            if a[pivot][col].abs() < 1e-12 {
                return Err(Error::Numerical("singular basis".into()));
            }
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col];
            for k in 0..m {
                a[col][k] /= p;
                inv[col][k] /= p;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = a[r][col];
                if f == 0.0 {
                    continue;
                }
                for k in 0..m {
                    a[r][k] -= f * a[col][k];
                    inv[r][k] -= f * inv[col][k];
                }
            }
        }
        // Row r of B⁻¹ corresponds to basis position r.
        self.binv = inv;
        Ok(())
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.status[j] {
            VarStatus::AtLower => self.lower[j],
            VarStatus::AtUpper => self.upper[j],
            VarStatus::Basic(_) => unreachable!("basic variable has no bound value"),
        }
    }

    fn basic_values(&self) -> Vec<f64> {
        let m = self.num_rows();
        let mut rhs = self.b.clone();
        for j in 0..self.num_struct {
            if matches!(self.status[j], VarStatus::Basic(_)) {
                continue;
            }
            let v = self.nonbasic_value(j);
            if v != 0.0 {
                for &(r, a) in &self.cols[j] {
                    rhs[r] -= a * v;
                }
            }
        }
        for r in 0..m {
            let j = self.num_struct + r;
            if !matches!(self.status[j], VarStatus::Basic(_)) {
                rhs[r] -= self.nonbasic_value(j);
            }
        }
        self.binv
            .iter()
            .map(|row| row.iter().zip(&rhs).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn duals(&self) -> Vec<f64> {
        let m = self.num_rows();
        let mut y = vec![0.0; m];
        for (r, &var) in self.basis.iter().enumerate() {
            let c = self.cost[var];
            if c != 0.0 {
                for (k, yk) in y.iter_mut().enumerate() {
                    *yk += c * self.binv[r][k];
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[f64]) -> f64 {
        self.cost[j] - self.column_dot(j, y)
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.lower[j] == self.upper[j]
    }

    fn infeasibility(&self, r: usize, value: f64) -> f64 {
        let var = self.basis[r];
        (self.lower[var] - value).max(value - self.upper[var]).max(0.0)
    }

    fn max_primal_infeasibility(&self, xb: &[f64]) -> f64 {
        xb.iter()
            .enumerate()
            .map(|(r, &v)| self.infeasibility(r, v))
            .fold(0.0, f64::max)
    }

    fn max_dual_infeasibility(&self, y: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.status.len() {
            if self.is_fixed(j) {
                continue;
            }
            let d = self.reduced_cost(j, y);
            match self.status[j] {
                VarStatus::AtLower => worst = worst.max(-d),
                VarStatus::AtUpper => worst = worst.max(d),
                VarStatus::Basic(_) => {}
            }
        }
        worst
    }

    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64]) {
        let p = alpha[r];
        let pivot_row: Vec<f64> = self.binv[r].iter().map(|v| v / p).collect();
        for (k, row) in self.binv.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            let f = alpha[k];
            if f != 0.0 {
                for (v, pr) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
            }
        }
        self.binv[r] = pivot_row;
        self.basis[r] = q;
        self.status[q] = VarStatus::Basic(r);
        self.since_refactor += 1;
    }

    fn maybe_refactor(&mut self) -> Result<()> {
        if self.since_refactor >= self.config.refactor_interval {
            self.refactor()?;
        }
        Ok(())
    }

    fn dual_phase(&mut self, iterations: &mut usize) -> Result<DualOutcome> {
        let tol = self.config.feasibility_tol;
        let mut streak = 0usize;
        loop {
            if *iterations >= self.config.max_iterations {
                return Ok(DualOutcome::IterationLimit);
            }
            self.maybe_refactor()?;
            let xb = self.basic_values();
            let bland = streak > self.config.degenerate_streak;

            let mut leaving: Option<(usize, f64)> = None;
            for (r, &v) in xb.iter().enumerate() {
                let inf = self.infeasibility(r, v);
                if inf <= tol {
                    continue;
                }
                let better = match leaving {
                    None => true,
                    Some((lr, linf)) => {
                        if bland {
                            self.basis[r] < self.basis[lr]
                        } else {
                            inf > linf || (inf == linf && self.basis[r] < self.basis[lr])
                        }
                    }
                };
                if better {
                    leaving = Some((r, inf));
                }
            }
            let Some((r, _)) = leaving else {
                return Ok(DualOutcome::PrimalFeasible);
            };
            let p = self.basis[r];
            let to_lower = xb[r] < self.lower[p];

            let y = self.duals();
            let rho = self.binv[r].clone();
            // (j, |alpha|, clipped |d_j|)
            let mut candidates: Vec<(usize, f64, f64)> = Vec::new();
            for j in 0..self.status.len() {
                let at_lower = match self.status[j] {
                    VarStatus::Basic(_) => continue,
                    VarStatus::AtLower => true,
                    VarStatus::AtUpper => false,
                };
                if self.is_fixed(j) {
                    continue;
                }
                let alpha = self.column_dot(j, &rho);
                if alpha.abs() <= self.config.pivot_tol {
                    continue;
                }
                let eligible = if to_lower {
                    (at_lower && alpha < 0.0) || (!at_lower && alpha > 0.0)
                } else {
                    (at_lower && alpha > 0.0) || (!at_lower && alpha < 0.0)
                };
                if !eligible {
                    continue;
                }
                let d = self.reduced_cost(j, &y);
                let d_eff = if at_lower { d.max(0.0) } else { (-d).max(0.0) };
                candidates.push((j, alpha.abs(), d_eff));
            }
            if candidates.is_empty() {
                return Ok(DualOutcome::Infeasible);
            }

            let chosen = if bland {
                candidates
                    .iter()
                    .min_by(|a, b| (a.2 / a.1).total_cmp(&(b.2 / b.1)).then(a.0.cmp(&b.0)))
                    .copied()
            } else {
                let bound = candidates
                    .iter()
                    .map(|&(_, a, d)| (d + self.config.optimality_tol) / a)
                    .fold(f64::INFINITY, f64::min);
                candidates
                    .iter()
                    .filter(|&&(_, a, d)| d / a <= bound)
                    .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
                    .copied()
            };
            let (q, abs_alpha, d_eff) = chosen.expect("candidates not empty");
            if d_eff / abs_alpha <= DEGENERATE_STEP {
                streak += 1;
            } else {
                streak = 0;
            }

            let alpha_q = self.ftran(q);
            if alpha_q[r].abs() <= self.config.pivot_tol {
                // Row and column computations disagree; refresh and retry.
                self.refactor()?;
                *iterations += 1;
                continue;
            }
            self.pivot(r, q, &alpha_q);
            self.status[p] = if to_lower { VarStatus::AtLower } else { VarStatus::AtUpper };
            *iterations += 1;
        }
    }

    fn primal_phase(&mut self, iterations: &mut usize) -> Result<PrimalOutcome> {
        let opt_tol = self.config.optimality_tol;
        let feas_tol = self.config.feasibility_tol;
        let mut streak = 0usize;
        loop {
            if *iterations >= self.config.max_iterations {
                return Ok(PrimalOutcome::IterationLimit);
            }
            self.maybe_refactor()?;
            let bland = streak > self.config.degenerate_streak;
            let y = self.duals();

            let mut entering: Option<(usize, f64, bool)> = None;
            for j in 0..self.status.len() {
                let increase = match self.status[j] {
                    VarStatus::Basic(_) => continue,
                    VarStatus::AtLower => true,
                    VarStatus::AtUpper => false,
                };
                if self.is_fixed(j) {
                    continue;
                }
                let d = self.reduced_cost(j, &y);
                let gain = if increase { -d } else { d };
                if gain <= opt_tol {
                    continue;
                }
                if bland {
                    entering = Some((j, gain, increase));
                    break;
                }
                if entering.is_none_or(|(_, g, _)| gain > g) {
                    entering = Some((j, gain, increase));
                }
            }
            let Some((q, _, increase)) = entering else {
                return Ok(PrimalOutcome::Optimal);
            };
            let dir = if increase { 1.0 } else { -1.0 };
            let xb = self.basic_values();
            let alpha_q = self.ftran(q);

            // x_B(t) = x_B - dir·t·alpha_q; collect (row, rate, exact ratio, padded ratio).
            let mut rows: Vec<(usize, f64, f64, f64)> = Vec::new();
            for (r, &a) in alpha_q.iter().enumerate() {
                if a.abs() <= self.config.pivot_tol {
                    continue;
                }
                let var = self.basis[r];
                let rate = -dir * a;
                if rate < 0.0 {
                    let room = (xb[r] - self.lower[var]).max(0.0);
                    rows.push((r, rate, room / -rate, (room + feas_tol) / -rate));
                } else if self.upper[var].is_finite() {
                    let room = (self.upper[var] - xb[r]).max(0.0);
                    rows.push((r, rate, room / rate, (room + feas_tol) / rate));
                }
            }
            let flip = self.upper[q] - self.lower[q];

            let blocking = if bland {
                rows.iter()
                    .min_by(|a, b| {
                        a.2.total_cmp(&b.2)
                            .then(self.basis[a.0].cmp(&self.basis[b.0]))
                    })
                    .copied()
            } else {
                let bound = rows.iter().map(|x| x.3).fold(f64::INFINITY, f64::min);
                rows.iter()
                    .filter(|x| x.2 <= bound)
                    .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                    .copied()
            };

            match blocking {
                Some((r, rate, step, _)) if step < flip => {
                    if step <= DEGENERATE_STEP {
                        streak += 1;
                    } else {
                        streak = 0;
                    }
                    let p = self.basis[r];
                    self.pivot(r, q, &alpha_q);
                    self.status[p] = if rate < 0.0 { VarStatus::AtLower } else { VarStatus::AtUpper };
                }
                _ => {
                    if !flip.is_finite() {
                        return Err(Error::Numerical("unbounded direction with bounded variables".into()));
                    }
                    streak = 0;
                    self.status[q] = if increase { VarStatus::AtUpper } else { VarStatus::AtLower };
                }
            }
            *iterations += 1;
        }
    }

    fn solution(&self, status: LpStatus, iterations: usize) -> LpSolution {
        let xb = self.basic_values();
        let primal: Vec<f64> = (0..self.num_struct)
            .map(|j| match self.status[j] {
                VarStatus::Basic(r) => xb[r],
                _ => self.nonbasic_value(j),
            })
            .collect();
        LpSolution {
            status,
            objective: self.model.objective_value(&primal),
            primal,
            iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::solve;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9
    }

    #[test]
    fn single_lower_bound_row() {
        let mut m = LpModel::new();
        let y = m.add_variable("y", 0.0, 1.0, 1.0);
        m.add_row(Row::new(vec![(y, 1.0)], Relation::GreaterEq, 0.3));
        let sol = solve(&m, &LpConfig::default()).unwrap();
        assert!(sol.is_optimal());
        assert!(close(sol.objective, 0.3));
    }

    #[test]
    fn covering_row() {
        let mut m = LpModel::new();
        let a = m.add_variable("a", 0.0, 1.0, 1.0);
        let b = m.add_variable("b", 0.0, 1.0, 1.0);
        m.add_row(Row::new(vec![(a, 1.0), (b, 1.0)], Relation::GreaterEq, 1.0));
        let sol = solve(&m, &LpConfig::default()).unwrap();
        assert!(close(sol.objective, 1.0));
    }

    #[test]
    fn two_variable_vertex() {
        let mut m = LpModel::new();
        let a = m.add_variable("a", 0.0, 1.0, 3.0);
        let b = m.add_variable("b", 0.0, 1.0, 1.0);
        m.add_row(Row::new(vec![(a, 1.0), (b, 1.0)], Relation::GreaterEq, 1.0));
        m.add_row(Row::new(vec![(b, 1.0)], Relation::LessEq, 0.4));
        let sol = solve(&m, &LpConfig::default()).unwrap();
        assert!(close(sol.objective, 2.2));
        assert!(close(sol.primal[a], 0.6));
        assert!(close(sol.primal[b], 0.4));
    }

    #[test]
    fn added_rows() {
        let mut m = LpModel::new();
        let y = m.add_variable("y", 0.0, 1.0, 1.0);
        m.add_row(Row::new(vec![(y, 1.0)], Relation::GreaterEq, 0.3));
        let mut s = Simplex::new(m, LpConfig::default()).unwrap();
        assert!(close(s.solve().unwrap().objective, 0.3));
        let sol = s
            .add_rows_and_resolve(vec![Row::new(vec![(y, 1.0)], Relation::LessEq, 0.9)])
            .unwrap();
        assert!(close(sol.objective, 0.3));
        let sol = s
            .add_rows_and_resolve(vec![Row::new(vec![(y, 1.0)], Relation::GreaterEq, 0.5)])
            .unwrap();
        assert!(close(sol.objective, 0.5));
        assert_eq!(s.model().num_rows(), 3);
    }

    #[test]
    fn infeasible_model() {
        let mut m = LpModel::new();
        let a = m.add_variable("a", 0.0, 1.0, 1.0);
        let b = m.add_variable("b", 0.0, 1.0, 1.0);
        m.add_row(Row::new(vec![(a, 1.0), (b, 1.0)], Relation::GreaterEq, 2.5));
        let sol = solve(&m, &LpConfig::default()).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_and_negative_costs() {
        let mut m = LpModel::new();
        let a = m.add_variable("a", -1.0, 2.0, -1.0);
        let b = m.add_variable("b", 0.0, 3.0, -2.0);
        let c = m.add_variable("c", 1.0, 1.0, 5.0);
        m.add_row(Row::new(vec![(a, 1.0), (b, 1.0)], Relation::Equal, 2.0));
        m.add_row(Row::new(vec![(b, 1.0), (c, -1.0)], Relation::LessEq, 0.5));
        let sol = solve(&m, &LpConfig::default()).unwrap();
        // b ≤ 1.5, a = 2 - b; objective -a - 2b + 5 = -2 - b + 5, minimised at b = 1.5.
        assert!(close(sol.objective, 1.5));
        assert!(close(sol.primal[b], 1.5));
    }

    #[test]
    fn iteration_limit() {
        let mut m = LpModel::new();
        let a = m.add_variable("a", 0.0, 1.0, 1.0);
        let b = m.add_variable("b", 0.0, 1.0, 1.0);
        m.add_row(Row::new(vec![(a, 1.0), (b, 1.0)], Relation::GreaterEq, 1.0));
        let config = LpConfig {
            max_iterations: 0,
            ..LpConfig::default()
        };
        assert_eq!(solve(&m, &config).unwrap().status, LpStatus::IterationLimit);
    }

    #[test]
    fn rejects_bad_models() {
        let mut m = LpModel::new();
        m.add_variable("a", 0.0, f64::INFINITY, 1.0);
        assert!(solve(&m, &LpConfig::default()).is_err());

        let mut m = LpModel::new();
        m.add_variable("a", 0.0, 1.0, 1.0);
        m.add_row(Row::new(vec![(3, 1.0)], Relation::LessEq, 1.0));
        assert!(matches!(solve(&m, &LpConfig::default()), Err(Error::InvalidModel(_))));
    }
}
