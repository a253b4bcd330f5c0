//! Separation oracles for the lazily generated constraint families.

use crate::hctree::FractionalHierarchy;
use crate::lp::{Relation, Row};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CutFamily {
    Triangle,
    Spreading,
}

/// Identity of a cut, used to avoid adding the same row twice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CutKey {
    /// `y(a,m,t) + y(m,c,t) ≥ y(a,c,t)` with `a < c`.
    Triangle { t: usize, a: usize, middle: usize, c: usize },
    /// `Σ_{j ∈ set \ {i}} y(i,j,t) ≥ |set| - t`, `set` sorted.
    Spreading { i: usize, t: usize, set: Vec<usize> },
}

/// A violated row; variable indices are flat tensor indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Cut {
    pub key: CutKey,
    pub row: Row,
    pub violation: f64,
}

impl Cut {
    pub fn family(&self) -> CutFamily {
        match self.key {
            CutKey::Triangle { .. } => CutFamily::Triangle,
            CutKey::Spreading { .. } => CutFamily::Spreading,
        }
    }
}

/// Every orientation of every triple, level by level, violated by more than
/// `tol`. Output is ordered by level, then triple.
pub fn separate_triangle(y: &FractionalHierarchy, tol: f64) -> Vec<Cut> {
    let n = y.n();
    let mut cuts = Vec::new();
    for t in 1..n {
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    // (ends a < c, middle m)
                    for (a, m, c) in [(j, i, k), (i, j, k), (i, k, j)] {
                        let violation = y.get(a, c, t) - y.get(a, m, t) - y.get(m, c, t);
                        if violation > tol {
                            let row = Row::new(
                                vec![
                                    (y.index(a, m, t), 1.0),
                                    (y.index(m, c, t), 1.0),
                                    (y.index(a, c, t), -1.0),
                                ],
                                Relation::GreaterEq,
                                0.0,
                            );
                            cuts.push(Cut {
                                key: CutKey::Triangle { t, a, middle: m, c },
                                row,
                                violation,
                            });
                        }
                    }
                }
            }
        }
    }
    cuts
}

/// Most violated spreading set for point `i` at level `t`.
///
/// The violation of `S` is `1 - t + Σ_{j ∈ S\{i}} (1 - y(i,j,t))`, which only
/// grows as members are added, so the best set of each size is a prefix of
/// the other points sorted by `y(i,·,t)`. Scans prefixes with `|S| > t` and
/// keeps the smallest one attaining the maximum. Returns `(sorted set,
/// violation)`; the violation may be nonpositive.
pub fn most_violated_spreading(y: &FractionalHierarchy, i: usize, t: usize) -> Option<(Vec<usize>, f64)> {
    let n = y.n();
    if t >= n {
        return None;
    }
    let mut others: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (y.get(i, j, t), j)).collect();
    others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut prefix = 0.0;
    let mut best: Option<(usize, f64)> = None;
    for (k, &(v, _)) in others.iter().enumerate() {
        prefix += v;
        let members = k + 1;
        if members < t {
            continue;
        }
        let violation = (members + 1 - t) as f64 - prefix;
        if best.is_none_or(|(_, b)| violation > b) {
            best = Some((members, violation));
        }
    }
    best.map(|(members, violation)| {
        let mut set: Vec<usize> = others[..members].iter().map(|&(_, j)| j).collect();
        set.push(i);
        set.sort_unstable();
        (set, violation)
    })
}

/// One most-violated spreading row per `(i, t)` when its violation exceeds
/// `tol`, ordered by `(t, i)`.
pub fn separate_spreading(y: &FractionalHierarchy, tol: f64) -> Vec<Cut> {
    let n = y.n();
    let mut cuts = Vec::new();
    for t in 1..n {
        for i in 0..n {
            let Some((set, violation)) = most_violated_spreading(y, i, t) else {
                continue;
            };
            if violation <= tol {
                continue;
            }
            let coeffs = set
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| (y.index(i, j, t), 1.0))
                .collect();
            let rhs = (set.len() - t) as f64;
            cuts.push(Cut {
                key: CutKey::Spreading { i, t, set },
                row: Row::new(coeffs, Relation::GreaterEq, rhs),
                violation,
            });
        }
    }
    cuts
}
