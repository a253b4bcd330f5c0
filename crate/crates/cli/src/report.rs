//! JSON reports. Floats are rounded to 12 significant digits so that reports
//! diff cleanly across platforms.

use serde::{Serialize, Serializer};

use hcss_core::hctree::pairs;
use hcss_core::sublevel::StabilityReport;

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round_significant(value: f64) -> f64 {
    if value == 0.0 || !value.is_finite() {
        // Also folds -0.0 into 0.0.
        return if value == 0.0 { 0.0 } else { value };
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, value)
        .parse()
        .expect("formatted float parses")
}

fn rounded<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_significant(*value))
}

fn rounded_opt<S: Serializer>(value: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => s.serialize_some(&round_significant(*v)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Cuts {
    pub triangle: usize,
    pub spreading: usize,
}

/// One LP value, 1-based points and levels.
#[derive(Clone, Debug, Serialize)]
pub struct YEntry {
    pub i: usize,
    pub j: usize,
    pub t: usize,
    #[serde(serialize_with = "rounded")]
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleSection {
    pub delta_int: u64,
    pub max_dist: u64,
    pub feasible_trees: usize,
    /// The radius that was checked; differs from `epsilon` only under the
    /// test override.
    #[serde(serialize_with = "rounded")]
    pub epsilon_checked: f64,
    pub verdict: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifyReport {
    pub n: usize,
    pub method: String,
    pub tree: String,
    #[serde(serialize_with = "rounded")]
    pub loss_x: f64,
    pub norm_constant: u64,
    #[serde(serialize_with = "rounded")]
    pub delta: f64,
    #[serde(serialize_with = "rounded_opt")]
    pub epsilon: Option<f64>,
    #[serde(serialize_with = "rounded_opt")]
    pub epsilon_relative: Option<f64>,
    pub rounds: usize,
    pub cuts: Cuts,
    pub lp_iterations: usize,
    pub status: &'static str,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_star: Option<Vec<YEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
}

impl CertifyReport {
    pub fn new(report: &StabilityReport, warnings: Vec<String>, emit_ystar: bool) -> Self {
        let n = report.n;
        let y_star = emit_ystar.then(|| {
            let y = &report.solve.y_star;
            pairs(n)
                .flat_map(|(i, j)| {
                    (1..n).map(move |t| YEntry {
                        i: i + 1,
                        j: j + 1,
                        t,
                        value: y.get(i, j, t),
                    })
                })
                .collect()
        });
        CertifyReport {
            n,
            method: report.method.as_str().to_string(),
            tree: report.tree.to_nested(),
            loss_x: report.loss_x,
            norm_constant: report.norm_constant,
            delta: report.delta,
            epsilon: report.epsilon,
            epsilon_relative: report.epsilon_relative,
            rounds: report.solve.rounds,
            cuts: Cuts {
                triangle: report.solve.cuts_added.triangle,
                spreading: report.solve.cuts_added.spreading,
            },
            lp_iterations: report.solve.lp_iterations,
            status: report.solve.status.as_str(),
            warnings,
            y_star,
            oracle: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LossReport {
    pub n: usize,
    pub tree: String,
    #[serde(serialize_with = "rounded")]
    pub loss: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnumeratedTree {
    pub tree: String,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "rounded_opt")]
    pub loss: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnumerateReport {
    pub n: usize,
    pub count: usize,
    pub norm_constant: u64,
    pub trees: Vec<EnumeratedTree>,
    pub warnings: Vec<String>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_significant(0.1 + 0.2), 0.3);
        assert_eq!(round_significant(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_significant(123_456_789.123_456_79), 123456789.123);
        assert_eq!(round_significant(-0.0).to_bits(), 0.0f64.to_bits());
        assert_eq!(round_significant(8.0), 8.0);
        assert_eq!(round_significant(-2.5e-13), -2.5e-13);
    }

    #[test]
    fn absent_loss_is_omitted() {
        let e = EnumeratedTree {
            tree: "(1,2)".into(),
            loss: None,
        };
        assert_eq!(serde_json::to_string(&e).unwrap(), r#"{"tree":"(1,2)"}"#);
    }
}
