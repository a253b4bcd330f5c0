use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use hcss_core::cost::tree_loss;
use hcss_core::hctree::{enumerate_trees, tree_to_indicator, Tree, DEFAULT_ENUMERATION_CAP};
use hcss_core::lp::LpConfig;
use hcss_core::metrics::NormConstant;
use hcss_core::oracle::{verify_certificate, CERTIFICATE_TOLERANCE};
use hcss_core::sublevel::{certify, CertifyConfig, Method, SsConfig};

use crate::input::read_similarity;
use crate::report::{to_json, CertifyReport, EnumerateReport, EnumeratedTree, LossReport, OracleSection};
use crate::{CliError, EXIT_CERTIFIED, EXIT_NOT_CERTIFIED, EXIT_ORACLE_VIOLATION};

#[derive(Debug, Parser)]
#[command(name = "hcss", version, about = "Optimality certificates for hierarchical clusterings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a hierarchy and bound the distance to every hierarchy of equal or lower loss.
    Certify(CertifyArgs),
    /// Certify, then check the bound against every tree by enumeration.
    OracleCheck(OracleArgs),
    /// Loss of a given tree or of a method's tree.
    Loss(LossArgs),
    /// List every tree on n leaves.
    Enumerate(EnumerateArgs),
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Similarity matrix file.
    pub input: PathBuf,
    /// average, max-pairwise, min-pairwise or exhaustive.
    #[arg(long, default_value = "average")]
    pub method: String,
    /// Violation tolerance for adding cuts.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_rounds: usize,
    /// Simplex iteration limit per LP solve.
    #[arg(long, default_value_t = 100_000)]
    pub max_lp_iterations: usize,
    /// Largest n for which trees are enumerated.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
    /// Include the LP solution in the report.
    #[arg(long)]
    pub emit_ystar: bool,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub certify: CertifyArgs,
    /// Check this radius instead of the computed one.
    #[arg(long, hide = true)]
    pub epsilon_override: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LossArgs {
    pub input: PathBuf,
    /// Tree such as "((1,2),(3,4))" with 1-based labels.
    #[arg(long, conflicts_with = "method")]
    pub tree: Option<String>,
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    /// Number of leaves.
    pub n: usize,
    /// Similarity matrix whose loss is reported for each tree.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Validated settings shared by `certify` and `oracle-check`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub method: Method,
    pub certify: CertifyConfig,
    pub emit_ystar: bool,
    pub out: Option<PathBuf>,
}

pub const MAX_TOLERANCE: f64 = 1e-2;

impl RunConfig {
    pub fn from_args(args: &CertifyArgs) -> Result<Self, CliError> {
        let method: Method = args.method.parse()?;
        if !(args.tol > 0.0 && args.tol <= MAX_TOLERANCE) {
            return Err(CliError::Config(format!("--tol must lie in (0, {MAX_TOLERANCE}], got {}", args.tol)));
        }
        for (name, value) in [
            ("--max-rounds", args.max_rounds),
            ("--max-lp-iterations", args.max_lp_iterations),
            ("--cap", args.cap),
        ] {
            if value == 0 {
                return Err(CliError::Config(format!("{name} must be positive")));
            }
        }
        let defaults = SsConfig::default();
        let ss = SsConfig {
            separation_tol: args.tol,
            max_rounds: args.max_rounds,
            lp: LpConfig {
                max_iterations: args.max_lp_iterations,
                ..defaults.lp.clone()
            },
            ..defaults
        };
        Ok(RunConfig {
            input: args.input.clone(),
            method,
            certify: CertifyConfig {
                ss,
                enumeration_cap: args.cap,
            },
            emit_ystar: args.emit_ystar,
            out: args.out.clone(),
        })
    }
}

/// What `main` should print and return.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub report: String,
    pub out: Option<PathBuf>,
    pub warnings: Vec<String>,
    /// One-line summary for stderr.
    pub message: Option<String>,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Certify(args) => run_certify(&RunConfig::from_args(args)?),
        Command::OracleCheck(args) => run_oracle_check(&RunConfig::from_args(&args.certify)?, args.epsilon_override),
        Command::Loss(args) => run_loss(args),
        Command::Enumerate(args) => run_enumerate(args),
    }
}

pub fn run_certify(config: &RunConfig) -> Result<Outcome, CliError> {
    let parsed = read_similarity(&config.input)?;
    let result = certify(&parsed.matrix, config.method, &config.certify)?;
    let report = CertifyReport::new(&result, parsed.warnings.clone(), config.emit_ystar);
    let (code, message) = if result.is_certified() {
        (EXIT_CERTIFIED, None)
    } else {
        (
            EXIT_NOT_CERTIFIED,
            Some(format!("no certificate: cut loop ended with status {}", report.status)),
        )
    };
    Ok(Outcome {
        code,
        report: to_json(&report),
        out: config.out.clone(),
        warnings: parsed.warnings,
        message,
    })
}

pub fn run_oracle_check(config: &RunConfig, epsilon_override: Option<f64>) -> Result<Outcome, CliError> {
    let parsed = read_similarity(&config.input)?;
    let s = &parsed.matrix;
    let cap = config.certify.enumeration_cap;
    if s.n() > cap {
        return Err(hcss_core::Error::EnumerationCap { n: s.n(), cap }.into());
    }
    let result = certify(s, config.method, &config.certify)?;
    let mut report = CertifyReport::new(&result, parsed.warnings.clone(), config.emit_ystar);
    let Some(epsilon) = epsilon_override.or(result.epsilon) else {
        return Ok(Outcome {
            code: EXIT_NOT_CERTIFIED,
            report: to_json(&report),
            out: config.out.clone(),
            warnings: parsed.warnings,
            message: Some(format!("no certificate to check: status {}", report.status)),
        });
    };
    let check = verify_certificate(s, &tree_to_indicator(&result.tree), epsilon, cap)?;
    let delta_sound = result.delta <= check.exact.delta_int as f64 + CERTIFICATE_TOLERANCE;
    let valid = check.valid && delta_sound;
    report.oracle = Some(OracleSection {
        delta_int: check.exact.delta_int,
        max_dist: check.exact.max_dist,
        feasible_trees: check.exact.feasible,
        epsilon_checked: epsilon,
        verdict: if valid { "valid" } else { "invalid" },
    });
    let (code, message) = if valid {
        (EXIT_CERTIFIED, None)
    } else {
        (
            EXIT_ORACLE_VIOLATION,
            Some(format!(
                "certificate violated: max distance {} vs epsilon {epsilon}, delta {} vs exact {}",
                check.exact.max_dist, result.delta, check.exact.delta_int
            )),
        )
    };
    Ok(Outcome {
        code,
        report: to_json(&report),
        out: config.out.clone(),
        warnings: parsed.warnings,
        message,
    })
}

fn run_loss(args: &LossArgs) -> Result<Outcome, CliError> {
    let parsed = read_similarity(&args.input)?;
    let s = &parsed.matrix;
    let tree: Tree = match (&args.tree, &args.method) {
        (Some(text), _) => text.parse()?,
        (None, method) => {
            let method: Method = method.as_deref().unwrap_or("average").parse()?;
            let config = CertifyConfig {
                enumeration_cap: args.cap,
                ..CertifyConfig::default()
            };
            match method {
                Method::Linkage(rule) => hcss_core::linkage::agglomerate(s, rule),
                Method::Exhaustive => hcss_core::linkage::exhaustive_best(s, config.enumeration_cap)?.0,
            }
        }
    };
    if tree.n() != s.n() {
        return Err(hcss_core::Error::DimensionMismatch {
            expected: s.n(),
            found: tree.n(),
        }
        .into());
    }
    let report = LossReport {
        n: s.n(),
        tree: tree.to_nested(),
        loss: tree_loss(s, &tree)?,
        warnings: parsed.warnings.clone(),
    };
    Ok(Outcome {
        code: EXIT_CERTIFIED,
        report: to_json(&report),
        out: args.out.clone(),
        warnings: parsed.warnings,
        message: None,
    })
}

fn run_enumerate(args: &EnumerateArgs) -> Result<Outcome, CliError> {
    let parsed = args.input.as_deref().map(read_similarity).transpose()?;
    if let Some(p) = &parsed {
        if p.matrix.n() != args.n {
            return Err(hcss_core::Error::DimensionMismatch {
                expected: args.n,
                found: p.matrix.n(),
            }
            .into());
        }
    }
    let mut trees = Vec::new();
    for tree in enumerate_trees(args.n, args.cap)? {
        let loss = parsed.as_ref().map(|p| tree_loss(&p.matrix, &tree)).transpose()?;
        trees.push(EnumeratedTree {
            tree: tree.to_nested(),
            loss,
        });
    }
    let warnings = parsed.map(|p| p.warnings).unwrap_or_default();
    let report = EnumerateReport {
        n: args.n,
        count: trees.len(),
        norm_constant: NormConstant::new(args.n).value,
        trees,
        warnings: warnings.clone(),
    };
    Ok(Outcome {
        code: EXIT_CERTIFIED,
        report: to_json(&report),
        out: args.out.clone(),
        warnings,
        message: None,
    })
}
