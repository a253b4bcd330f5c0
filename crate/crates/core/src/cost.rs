//! Dasgupta's cost in level-indicator form.

use crate::error::{Error, Result};
use crate::hctree::{lca_sizes, pair_count, pair_index, pairs, LevelTensor, Tree};

/// Symmetric, nonnegative similarities with a zero diagonal, stored as the
/// strict upper triangle in pair order.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    upper: Vec<f64>,
}

impl SimilarityMatrix {
    /// Builds from a dense row-major `n × n` matrix. The input must already
    /// be exactly symmetric with a zero diagonal.
    pub fn from_dense(n: usize, entries: &[f64]) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewPoints(n));
        }
        if entries.len() != n * n {
            return Err(Error::InvalidSimilarity(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                entries.len()
            )));
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::InvalidSimilarity(format!(
                    "diagonal entry ({i}, {i}) is {}",
                    entries[i * n + i]
                )));
            }
            for j in 0..n {
                let v = entries[i * n + j];
                if !v.is_finite() {
                    return Err(Error::InvalidSimilarity(format!("entry ({i}, {j}) is {v}")));
                }
                if v < 0.0 {
                    return Err(Error::NegativeSimilarity { row: i, col: j, value: v });
                }
                if v != entries[j * n + i] {
                    return Err(Error::InvalidSimilarity(format!(
                        "entries ({i}, {j}) and ({j}, {i}) differ"
                    )));
                }
            }
        }
        let upper = pairs(n).map(|(i, j)| entries[i * n + j]).collect();
        Ok(SimilarityMatrix { n, upper })
    }

    /// Builds from a function of the pair `(i, j)`, `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewPoints(n));
        }
        let mut upper = Vec::with_capacity(pair_count(n));
        for (i, j) in pairs(n) {
            let v = f(i, j);
            if !v.is_finite() {
                return Err(Error::InvalidSimilarity(format!("entry ({i}, {j}) is {v}")));
            }
            if v < 0.0 {
                return Err(Error::NegativeSimilarity { row: i, col: j, value: v });
            }
            upper.push(v);
        }
        Ok(SimilarityMatrix { n, upper })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.upper[pair_index(self.n, i, j)]
        }
    }

    /// Upper-triangle entries in pair order.
    pub fn pair_values(&self) -> &[f64] {
        &self.upper
    }

    pub fn pair_sum(&self) -> f64 {
        self.upper.iter().sum()
    }

    pub fn max_entry(&self) -> f64 {
        self.upper.iter().copied().fold(0.0, f64::max)
    }

    /// Copy with one pair changed, used by monotonicity checks.
    pub fn with_entry(&self, i: usize, j: usize, value: f64) -> Result<Self> {
        if value < 0.0 {
            return Err(Error::NegativeSimilarity { row: i, col: j, value });
        }
        let mut out = self.clone();
        out.upper[pair_index(self.n, i, j)] = value;
        Ok(out)
    }
}

/// `2 Σ_{i<j} S(i,j) Σ_t x(i,j,t) + 2 Σ_{i<j} S(i,j)`; the factor two
/// restores the ordered-pair sums.
pub fn loss<T>(s: &SimilarityMatrix, x: &LevelTensor<T>) -> Result<f64>
where
    T: Copy + Into<f64>,
{
    if x.n() != s.n {
        return Err(Error::DimensionMismatch {
            expected: s.n,
            found: x.n(),
        });
    }
    let levels = s.n - 1;
    let mut total = 0.0;
    for (p, &w) in s.upper.iter().enumerate() {
        let row = &x.values()[p * levels..(p + 1) * levels];
        let level_sum: f64 = row.iter().map(|&v| v.into()).sum();
        total += w * (level_sum + 1.0);
    }
    Ok(2.0 * total)
}

/// Direct form of the cost, `2 Σ_{i<j} S(i,j)·|leaves(lca(i,j))|`.
pub fn tree_loss(s: &SimilarityMatrix, tree: &Tree) -> Result<f64> {
    if tree.n() != s.n {
        return Err(Error::DimensionMismatch {
            expected: s.n,
            found: tree.n(),
        });
    }
    let sizes = lca_sizes(tree);
    Ok(2.0
        * s.upper
            .iter()
            .zip(sizes.sizes())
            .map(|(&w, &size)| w * f64::from(size))
            .sum::<f64>())
}

/// Linear part of the sublevel constraint `Loss(S, Y) ≤ Loss(S, X)` after
/// the constant and the factor two cancel.
#[derive(Clone, Debug, PartialEq)]
pub struct SublevelCoefficients {
    /// Coefficient of `y(i,j,t)`, which is `S(i,j)` at every level.
    pub coefficients: LevelTensor<f64>,
}

impl SublevelCoefficients {
    /// Right-hand side `Σ_{i<j} S(i,j) Σ_t x(i,j,t)` for a fixed clustering.
    pub fn rhs<T>(&self, x: &LevelTensor<T>) -> Result<f64>
    where
        T: Copy + Into<f64>,
    {
        crate::metrics::inner_product(&self.coefficients, x)
    }

    pub fn is_vacuous(&self) -> bool {
        self.coefficients.values().iter().all(|&c| c == 0.0)
    }
}

pub fn sublevel_coefficients(s: &SimilarityMatrix) -> SublevelCoefficients {
    let levels = s.n - 1;
    let values = s
        .upper
        .iter()
        .flat_map(|&w| std::iter::repeat_n(w, levels))
        .collect();
    SublevelCoefficients {
        coefficients: LevelTensor::from_values(s.n, values).expect("layout matches"),
    }
}
