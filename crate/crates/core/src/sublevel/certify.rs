use std::fmt;
use std::str::FromStr;

use super::{solve_ss, SsConfig, SsInstance, SsResult};
use crate::cost::SimilarityMatrix;
use crate::error::{Error, Result};
use crate::hctree::{tree_to_indicator, Tree, DEFAULT_ENUMERATION_CAP};
use crate::linkage::{agglomerate, exhaustive_best, LinkageRule};
use crate::metrics::NormConstant;

/// How the candidate clustering is produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Linkage(LinkageRule),
    Exhaustive,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Linkage(LinkageRule::Average),
        Method::Linkage(LinkageRule::MaxPairwise),
        Method::Linkage(LinkageRule::MinPairwise),
        Method::Exhaustive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Linkage(rule) => rule.as_str(),
            Method::Exhaustive => "exhaustive",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "exhaustive" {
            Ok(Method::Exhaustive)
        } else {
            s.parse().map(Method::Linkage)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifyConfig {
    pub ss: SsConfig,
    pub enumeration_cap: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            ss: SsConfig::default(),
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub n: usize,
    pub method: Method,
    pub tree: Tree,
    pub loss_x: f64,
    pub norm_constant: u64,
    pub delta: f64,
    /// Radius of the Hamming ball holding every tree with loss ≤ `loss_x`;
    /// `None` when the cut loop did not converge.
    pub epsilon: Option<f64>,
    /// `epsilon / (2 · norm_constant)`.
    pub epsilon_relative: Option<f64>,
    pub solve: SsResult,
}

impl StabilityReport {
    pub fn is_certified(&self) -> bool {
        self.epsilon.is_some()
    }
}

/// Builds the candidate tree with `method`, then certifies it.
pub fn certify(s: &SimilarityMatrix, method: Method, config: &CertifyConfig) -> Result<StabilityReport> {
    let tree = match method {
        Method::Linkage(rule) => agglomerate(s, rule),
        Method::Exhaustive => exhaustive_best(s, config.enumeration_cap)?.0,
    };
    certify_tree(s, tree, method, config)
}

/// Certifies a given tree.
pub fn certify_tree(s: &SimilarityMatrix, tree: Tree, method: Method, config: &CertifyConfig) -> Result<StabilityReport> {
    if tree.n() != s.n() {
        return Err(Error::DimensionMismatch {
            expected: s.n(),
            found: tree.n(),
        });
    }
    let inst = SsInstance::new(s.clone(), tree_to_indicator(&tree))?;
    let solve = solve_ss(&inst, &config.ss)?;
    let norm_constant = NormConstant::new(s.n()).value;
    let epsilon_relative = solve.epsilon.map(|e| e / (2.0 * norm_constant as f64));
    Ok(StabilityReport {
        n: s.n(),
        method,
        tree,
        loss_x: inst.loss_x(),
        norm_constant,
        delta: solve.delta,
        epsilon: solve.epsilon,
        epsilon_relative,
        solve,
    })
}
