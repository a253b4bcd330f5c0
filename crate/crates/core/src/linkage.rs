//! Candidate hierarchies: greedy agglomeration on similarities, or the exact
//! minimiser by enumeration for small `n`.

use std::fmt;
use std::str::FromStr;

use crate::cost::{tree_loss, SimilarityMatrix};
use crate::error::{Error, Result};
use crate::hctree::{enumerate_trees, Merge, Tree};

/// Inter-cluster similarity statistic; the pair with the largest value merges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LinkageRule {
    /// Largest cross-pair similarity.
    MaxPairwise,
    /// Mean cross-pair similarity.
    Average,
    /// Smallest cross-pair similarity.
    MinPairwise,
}

impl LinkageRule {
    pub const ALL: [LinkageRule; 3] = [
        LinkageRule::MaxPairwise,
        LinkageRule::Average,
        LinkageRule::MinPairwise,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LinkageRule::MaxPairwise => "max-pairwise",
            LinkageRule::Average => "average",
            LinkageRule::MinPairwise => "min-pairwise",
        }
    }
}

impl fmt::Display for LinkageRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LinkageRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LinkageRule::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::InvalidModel(format!("unknown linkage rule '{s}'")))
    }
}

// Statistics closer than this (relative) are treated as ties.
const TIE_TOLERANCE: f64 = 1e-12;

struct Cluster {
    id: usize,
    members: Vec<usize>,
}

fn statistic(s: &SimilarityMatrix, a: &[usize], b: &[usize], rule: LinkageRule) -> f64 {
    let cross = a.iter().flat_map(|&i| b.iter().map(move |&j| s.get(i, j)));
    match rule {
        LinkageRule::MaxPairwise => cross.fold(f64::NEG_INFINITY, f64::max),
        LinkageRule::MinPairwise => cross.fold(f64::INFINITY, f64::min),
        LinkageRule::Average => cross.sum::<f64>() / (a.len() * b.len()) as f64,
    }
}

/// Merges, at every step, the live pair of clusters with the largest
/// statistic. Ties go to the lexicographically smallest pair of minimum
/// member labels.
pub fn agglomerate(s: &SimilarityMatrix, rule: LinkageRule) -> Tree {
    let n = s.n();
    let mut live: Vec<Cluster> = (0..n).map(|i| Cluster { id: i, members: vec![i] }).collect();
    let mut merges = Vec::with_capacity(n - 1);
    while live.len() > 1 {
        // Live clusters are kept sorted by minimum member, so scanning
        // (a, b) with a < b visits pairs in tie-break order.
        let mut best: Option<(usize, usize, f64)> = None;
        for a in 0..live.len() {
            for b in a + 1..live.len() {
                let value = statistic(s, &live[a].members, &live[b].members, rule);
                let better = match best {
                    None => true,
                    Some((_, _, v)) => value > v + TIE_TOLERANCE * v.abs().max(1.0),
                };
                if better {
                    best = Some((a, b, value));
                }
            }
        }
        let (a, b, _) = best.expect("at least two live clusters");
        let right = live.remove(b);
        let left = live.remove(a);
        merges.push(Merge {
            left: left.id,
            right: right.id,
        });
        let mut members = left.members;
        members.extend(right.members);
        members.sort_unstable();
        let merged = Cluster {
            id: n + merges.len() - 1,
            members,
        };
        let pos = live
            .iter()
            .position(|c| c.members[0] > merged.members[0])
            .unwrap_or(live.len());
        live.insert(pos, merged);
    }
    Tree::new(n, merges).expect("agglomeration yields a valid tree")
}

/// Minimum-loss tree by enumeration; ties keep the first tree enumerated.
pub fn exhaustive_best(s: &SimilarityMatrix, cap: usize) -> Result<(Tree, f64)> {
    let mut best: Option<(Tree, f64)> = None;
    for tree in enumerate_trees(s.n(), cap)? {
        let value = tree_loss(s, &tree)?;
        if best.as_ref().is_none_or(|(_, b)| value < *b) {
            best = Some((tree, value));
        }
    }
    Ok(best.expect("at least one tree"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hctree::{lca_sizes, DEFAULT_ENUMERATION_CAP};

    fn two_block() -> SimilarityMatrix {
        SimilarityMatrix::from_fn(4, |i, j| if i / 2 == j / 2 { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn single_pair_merges_first() {
        let s = SimilarityMatrix::from_fn(3, |i, j| if (i, j) == (0, 1) { 1.0 } else { 0.0 }).unwrap();
        let tree = agglomerate(&s, LinkageRule::Average);
        assert_eq!(tree.merges()[0], Merge { left: 0, right: 1 });
    }

    #[test]
    fn equal_similarities_follow_tie_break() {
        let s = SimilarityMatrix::from_fn(5, |_, _| 0.1).unwrap();
        for rule in LinkageRule::ALL {
            let tree = agglomerate(&s, rule);
            assert_eq!(
                tree.merges(),
                &[
                    Merge { left: 0, right: 1 },
                    Merge { left: 5, right: 2 },
                    Merge { left: 6, right: 3 },
                    Merge { left: 7, right: 4 },
                ]
            );
        }
    }

    #[test]
    fn two_blocks_split_at_top() {
        for rule in LinkageRule::ALL {
            let tree = agglomerate(&two_block(), rule);
            let sizes = lca_sizes(&tree);
            assert_eq!(sizes.get(0, 1), 2);
            assert_eq!(sizes.get(2, 3), 2);
            assert_eq!(tree_loss(&two_block(), &tree).unwrap(), 8.0);
        }
    }

    #[test]
    fn exhaustive_examples() {
        let s2 = SimilarityMatrix::from_fn(2, |_, _| 3.0).unwrap();
        let (tree, value) = exhaustive_best(&s2, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(tree.n(), 2);
        assert_eq!(value, 12.0);

        let s3 = SimilarityMatrix::from_fn(3, |i, j| if (i, j) == (0, 1) { 1.0 } else { 0.0 }).unwrap();
        let (tree, value) = exhaustive_best(&s3, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(lca_sizes(&tree).get(0, 1), 2);
        assert_eq!(value, 4.0);

        let (_, value) = exhaustive_best(&two_block(), DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(value, 8.0);
    }

    #[test]
    fn exhaustive_respects_cap() {
        let s = SimilarityMatrix::from_fn(9, |_, _| 1.0).unwrap();
        assert!(matches!(
            exhaustive_best(&s, DEFAULT_ENUMERATION_CAP),
            Err(Error::EnumerationCap { .. })
        ));
    }

    #[test]
    fn rule_names_round_trip() {
        for rule in LinkageRule::ALL {
            assert_eq!(rule.as_str().parse::<LinkageRule>().unwrap(), rule);
        }
        assert!("ward".parse::<LinkageRule>().is_err());
    }
}
