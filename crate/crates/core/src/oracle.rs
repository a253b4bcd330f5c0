//! Ground truth by enumerating every tree.

use crate::cost::{tree_loss, SimilarityMatrix};
use crate::error::{Error, Result};
use crate::hctree::{enumerate_trees, tree_to_indicator, LevelIndicator, Tree};
use crate::metrics::{hamming, inner_product_count, norm_sq, NormConstant};

/// Slack on the Hamming bound when checking a certificate.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-6;

// Relative slack on loss comparisons; near-ties count as inside the sublevel
// set, which only makes the check stricter.
const LOSS_TIE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ExactSublevel {
    /// `min ⟨X, Y⟩` over trees `Y` with `Loss(S, Y) ≤ Loss(S, X)`.
    pub delta_int: u64,
    /// A tree attaining `delta_int`.
    pub argmin: Tree,
    /// `max d_H(X, Y)` over the same trees.
    pub max_dist: u64,
    /// Number of trees in the sublevel set.
    pub feasible: usize,
}

pub fn exact_sublevel(s: &SimilarityMatrix, x: &LevelIndicator, cap: usize) -> Result<ExactSublevel> {
    let n = s.n();
    if x.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.n(),
        });
    }
    let loss_x = crate::cost::loss(s, x)?;
    let threshold = loss_x + LOSS_TIE * loss_x.abs().max(1.0);
    let mut best: Option<(u64, Tree)> = None;
    let mut max_dist = 0;
    let mut feasible = 0;
    for tree in enumerate_trees(n, cap)? {
        if tree_loss(s, &tree)? > threshold {
            continue;
        }
        feasible += 1;
        let y = tree_to_indicator(&tree);
        let overlap = inner_product_count(x, &y)?;
        max_dist = max_dist.max(hamming(x, &y)?);
        if best.as_ref().is_none_or(|(b, _)| overlap < *b) {
            best = Some((overlap, tree));
        }
    }
    let (delta_int, argmin) = best.ok_or_else(|| {
        Error::Inconsistent("no tree reaches the loss of X; X is not a tree indicator".into())
    })?;
    Ok(ExactSublevel {
        delta_int,
        argmin,
        max_dist,
        feasible,
    })
}

#[derive(Clone, Debug)]
pub struct CertificateCheck {
    pub valid: bool,
    pub exact: ExactSublevel,
    pub epsilon: f64,
}

/// Valid iff every tree in the sublevel set lies within `epsilon` of `x`.
pub fn verify_certificate(s: &SimilarityMatrix, x: &LevelIndicator, epsilon: f64, cap: usize) -> Result<CertificateCheck> {
    let exact = exact_sublevel(s, x, cap)?;
    Ok(CertificateCheck {
        valid: exact.max_dist as f64 <= epsilon + CERTIFICATE_TOLERANCE,
        exact,
        epsilon,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormCheck {
    pub valid: bool,
    pub expected: u64,
    /// Distinct `‖X‖²` values seen across trees.
    pub observed: Vec<u64>,
    pub trees: usize,
}

pub fn verify_norm_constant(n: usize, cap: usize) -> Result<NormCheck> {
    let expected = NormConstant::new(n).value;
    let mut observed: Vec<u64> = Vec::new();
    let mut trees = 0;
    for tree in enumerate_trees(n, cap)? {
        trees += 1;
        let v = norm_sq(&tree_to_indicator(&tree));
        if !observed.contains(&v) {
            observed.push(v);
        }
    }
    observed.sort_unstable();
    Ok(NormCheck {
        valid: observed == [expected],
        expected,
        observed,
        trees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hctree::DEFAULT_ENUMERATION_CAP;

    const CAP: usize = DEFAULT_ENUMERATION_CAP;

    fn x(s: &str) -> LevelIndicator {
        tree_to_indicator(&s.parse().unwrap())
    }

    #[test]
    fn single_pair_instance() {
        let s = SimilarityMatrix::from_fn(3, |i, j| if (i, j) == (0, 1) { 1.0 } else { 0.0 }).unwrap();
        let e = exact_sublevel(&s, &x("((1,2),3)"), CAP).unwrap();
        assert_eq!((e.delta_int, e.max_dist, e.feasible), (5, 0, 1));
    }

    #[test]
    fn all_ones_instance() {
        let s = SimilarityMatrix::from_fn(3, |_, _| 1.0).unwrap();
        let e = exact_sublevel(&s, &x("((1,2),3)"), CAP).unwrap();
        assert_eq!((e.delta_int, e.max_dist, e.feasible), (4, 2, 3));
    }

    #[test]
    fn two_points() {
        let s = SimilarityMatrix::from_fn(2, |_, _| 1.0).unwrap();
        let e = exact_sublevel(&s, &x("(1,2)"), CAP).unwrap();
        assert_eq!((e.delta_int, e.max_dist), (1, 0));
    }

    #[test]
    fn certificate_negative_control() {
        let s = SimilarityMatrix::from_fn(3, |_, _| 1.0).unwrap();
        assert!(verify_certificate(&s, &x("((1,2),3)"), 2.0, CAP).unwrap().valid);
        assert!(!verify_certificate(&s, &x("((1,2),3)"), 1.5, CAP).unwrap().valid);
    }

    #[test]
    fn norm_constants() {
        for (n, value, trees) in [(3, 5, 3), (4, 14, 15), (5, 30, 105)] {
            let check = verify_norm_constant(n, CAP).unwrap();
            assert!(check.valid);
            assert_eq!(check.expected, value);
            assert_eq!(check.trees, trees);
        }
        assert!(verify_norm_constant(9, CAP).is_err());
    }
}
