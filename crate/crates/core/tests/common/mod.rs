//! Test-only oracles and instance generators. Nothing here calls into the
//! code paths it is used to check.
#![allow(dead_code)]

use hcss_core::cost::SimilarityMatrix;
use hcss_core::hctree::{FractionalHierarchy, Merge, Tree};
use hcss_core::lp::{LpModel, Relation, Row};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn integer_similarity<R: Rng>(rng: &mut R, n: usize) -> SimilarityMatrix {
    SimilarityMatrix::from_fn(n, |_, _| f64::from(rng.gen_range(0..=3u8))).unwrap()
}

pub fn continuous_similarity<R: Rng>(rng: &mut R, n: usize) -> SimilarityMatrix {
    SimilarityMatrix::from_fn(n, |_, _| rng.gen_range(0.0..1.0)).unwrap()
}

pub fn random_fractional<R: Rng>(rng: &mut R, n: usize) -> FractionalHierarchy {
    let len = n * (n - 1) / 2 * (n - 1);
    let values = (0..len)
        .map(|_| match rng.gen_range(0..4) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen_range(0.0..1.0),
        })
        .collect();
    FractionalHierarchy::from_values(n, values).unwrap()
}

/// Uniformly random pair of live clusters merged at each step. Reaches every
/// tree, though not uniformly.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> Tree {
    let mut live: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n - 1);
    while live.len() > 1 {
        let a = live.swap_remove(rng.gen_range(0..live.len()));
        let b = live.swap_remove(rng.gen_range(0..live.len()));
        merges.push(Merge { left: a, right: b });
        live.push(n + merges.len() - 1);
    }
    Tree::new(n, merges).unwrap()
}

/// Leaf count of the smallest cluster holding both `i` and `j`, found by
/// scanning every cluster's member list.
pub fn lca_size_by_scan(tree: &Tree, i: usize, j: usize) -> usize {
    tree.clusters()
        .iter()
        .filter(|c| c.contains(&i) && c.contains(&j))
        .map(Vec::len)
        .min()
        .unwrap()
}

/// Dasgupta's cost `Σ_{i<j} S_ij · s(i,j)`, from the scan above.
pub fn dasgupta_cost(s: &SimilarityMatrix, tree: &Tree) -> f64 {
    let n = tree.n();
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            total += s.get(i, j) * lca_size_by_scan(tree, i, j) as f64;
        }
    }
    total
}

/// Exhaustive maximum of `|S| - t - Σ_{j ∈ S\{i}} y(i,j,t)` over all
/// `S ∋ i` with `|S| > t`, or `None` when no such set exists.
pub fn brute_force_spreading(y: &FractionalHierarchy, i: usize, t: usize) -> Option<f64> {
    let n = y.n();
    let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << others.len()) {
        let size = mask.count_ones() as usize + 1;
        if size <= t {
            continue;
        }
        let sum: f64 = others
            .iter()
            .enumerate()
            .filter(|(b, _)| mask & (1 << b) != 0)
            .map(|(_, &j)| y.get(i, j, t))
            .sum();
        let v = (size - t) as f64 - sum;
        best = Some(best.map_or(v, |b: f64| b.max(v)));
    }
    best
}

/// A random feasible-or-not LP with finite bounds together with a point that
/// satisfies every row when `feasible_point` is `Some`.
pub struct RandomLp {
    pub model: LpModel,
    pub feasible_point: Option<Vec<f64>>,
}

pub fn random_lp<R: Rng>(rng: &mut R, vars: usize, rows: usize, force_feasible: bool) -> RandomLp {
    let mut model = LpModel::new();
    let mut point = Vec::with_capacity(vars);
    for j in 0..vars {
        let lower = if rng.gen_bool(0.5) { 0.0 } else { -1.0 };
        let upper = if rng.gen_bool(0.1) { lower } else { lower + rng.gen_range(0.5..2.0) };
        let cost = if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(-1.0..1.0) };
        model.add_variable(format!("x{j}"), lower, upper, cost);
        point.push(rng.gen_range(lower..=upper));
    }
    let feasible = force_feasible || rng.gen_bool(0.8);
    for _ in 0..rows {
        let mut coeffs = Vec::new();
        for j in 0..vars {
            if rng.gen_bool(0.7) {
                coeffs.push((j, (rng.gen_range(-1.0f64..1.0) * 4.0).round() / 4.0));
            }
        }
        if coeffs.is_empty() {
            coeffs.push((rng.gen_range(0..vars), 1.0));
        }
        let activity: f64 = coeffs.iter().map(|&(j, a)| a * point[j]).sum();
        let relation = match rng.gen_range(0..10) {
            0 => Relation::Equal,
            1..=4 => Relation::LessEq,
            _ => Relation::GreaterEq,
        };
        let rhs = if feasible {
            match relation {
                Relation::Equal => activity,
                Relation::LessEq => activity + rng.gen_range(0.0..0.5),
                Relation::GreaterEq => activity - rng.gen_range(0.0..0.5),
            }
        } else {
            rng.gen_range(-2.0..2.0)
        };
        model.add_row(Row::new(coeffs, relation, rhs));
    }
    RandomLp {
        model,
        feasible_point: feasible.then_some(point),
    }
}

/// Independent blocks solved separately give a ground truth for a large
/// model: the optimum is the sum of block optima. Variables and rows are
/// shuffled so the structure is hidden from the solver.
pub struct BlockLp {
    pub model: LpModel,
    pub blocks: Vec<LpModel>,
    pub feasible_point: Vec<f64>,
}

pub fn block_lp<R: Rng>(rng: &mut R, blocks: usize, block_vars: usize, block_rows: usize) -> BlockLp {
    let parts: Vec<RandomLp> = (0..blocks)
        .map(|_| random_lp(rng, block_vars, block_rows, true))
        .collect();
    let total = blocks * block_vars;
    let mut perm: Vec<usize> = (0..total).collect();
    perm.shuffle(rng);

    // perm[global position in block order] = index in the combined model.
    let mut slots: Vec<Option<(String, f64, f64, f64)>> = vec![None; total];
    let mut point = vec![0.0; total];
    let mut rows = Vec::new();
    for (b, part) in parts.iter().enumerate() {
        for (j, v) in part.model.variables().iter().enumerate() {
            let g = perm[b * block_vars + j];
            slots[g] = Some((format!("b{b}_{}", v.name), v.lower, v.upper, part.model.objective()[j]));
            point[g] = part.feasible_point.as_ref().unwrap()[j];
        }
        for row in part.model.rows() {
            let coeffs = row.coeffs.iter().map(|&(j, a)| (perm[b * block_vars + j], a)).collect();
            rows.push(Row::new(coeffs, row.relation, row.rhs));
        }
    }
    rows.shuffle(rng);
    let mut model = LpModel::new();
    for slot in slots {
        let (name, lower, upper, cost) = slot.unwrap();
        model.add_variable(name, lower, upper, cost);
    }
    for row in rows {
        model.add_row(row);
    }
    BlockLp {
        model,
        blocks: parts.into_iter().map(|p| p.model).collect(),
        feasible_point: point,
    }
}

/// Outcome of vertex enumeration: `None` when infeasible.
pub fn vertex_enumeration(model: &LpModel) -> Option<f64> {
    let d = model.num_variables();
    // Every row and bound as a hyperplane; a vertex is the unique solution
    // of d linearly independent active hyperplanes that is also feasible.
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in model.rows() {
        let mut a = vec![0.0; d];
        for &(j, c) in &row.coeffs {
            a[j] += c;
        }
        planes.push((a, row.rhs));
    }
    for (j, v) in model.variables().iter().enumerate() {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        planes.push((e.clone(), v.lower));
        if v.upper != v.lower {
            planes.push((e, v.upper));
        }
    }
    let feasible = |x: &[f64]| {
        let tol = 1e-9;
        model.variables().iter().zip(x).all(|(v, &xi)| xi >= v.lower - tol && xi <= v.upper + tol)
            && model.rows().iter().all(|r| {
                let lhs: f64 = r.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
                let slack = tol * (1.0 + r.rhs.abs());
                match r.relation {
                    Relation::LessEq => lhs <= r.rhs + slack,
                    Relation::GreaterEq => lhs >= r.rhs - slack,
                    Relation::Equal => (lhs - r.rhs).abs() <= slack,
                }
            })
    };

    let mut best: Option<f64> = None;
    let mut chosen = Vec::with_capacity(d);
    combinations(planes.len(), d, 0, &mut chosen, &mut |idx| {
        let system: Vec<(Vec<f64>, f64)> = idx.iter().map(|&k| planes[k].clone()).collect();
        if let Some(x) = solve_square(&system, d) {
            if feasible(&x) {
                let value: f64 = model.objective().iter().zip(&x).map(|(c, v)| c * v).sum();
                best = Some(best.map_or(value, |b: f64| b.min(value)));
            }
        }
    });
    best
}

fn combinations(n: usize, k: usize, start: usize, chosen: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if chosen.len() == k {
        f(chosen);
        return;
    }
    for i in start..n {
        if n - i < k - chosen.len() {
            break;
        }
        chosen.push(i);
        combinations(n, k, i + 1, chosen, f);
        chosen.pop();
    }
}

/// Gauss-Jordan solve of a square system; `None` when singular.
fn solve_square(system: &[(Vec<f64>, f64)], d: usize) -> Option<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = system
        .iter()
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(*b);
            r
        })
        .collect();
    let rows = a.len();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..d {
        let Some(p) = (r..rows).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())) else {
            break;
        };
        if a[p][c].abs() < 1e-10 {
            continue;
        }
        a.swap(r, p);
        let pv = a[r][c];
        for k in c..=d {
            a[r][k] /= pv;
        }
        for i in 0..rows {
            if i != r {
                let f = a[i][c];
                if f != 0.0 {
                    for k in c..=d {
                        a[i][k] -= f * a[r][k];
                    }
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    if pivot_cols.len() < d {
        return None;
    }
    for row in a.iter().skip(d) {
        if row[d].abs() > 1e-9 {
            return None;
        }
    }
    let mut x = vec![0.0; d];
    for (i, &c) in pivot_cols.iter().enumerate() {
        x[c] = a[i][d];
    }
    Some(x)
}
