//! Similarity matrix text format.
//!
//! One row per line, entries separated by commas or whitespace. Blank lines
//! and lines starting with `#` are skipped. An optional first row of labels
//! and an optional first column of labels are recognised when every cell in
//! them is non-numeric.

use std::fs;
use std::path::Path;

use hcss_core::cost::SimilarityMatrix;

use crate::CliError;

/// Largest `|S_ij - S_ji|` tolerated without a warning.
pub const ASYMMETRY_WARNING: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct ParsedMatrix {
    pub matrix: SimilarityMatrix,
    pub labels: Option<Vec<String>>,
    pub warnings: Vec<String>,
}

pub fn read_similarity(path: &Path) -> Result<ParsedMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_similarity(&text)
}

struct Line<'a> {
    number: usize,
    cells: Vec<&'a str>,
}

fn split(line: &str) -> Vec<&str> {
    if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

fn number(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn parse_similarity(text: &str) -> Result<ParsedMatrix, CliError> {
    let mut lines: Vec<Line> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(k, l)| Line {
            number: k + 1,
            cells: split(l),
        })
        .collect();
    if lines.is_empty() {
        return Err(CliError::Parse {
            line: 1,
            column: 1,
            message: "no matrix rows".into(),
        });
    }

    let mut labels = None;
    let first = &lines[0];
    let header = first
        .cells
        .iter()
        .enumerate()
        .all(|(k, c)| number(c).is_none() && !(c.is_empty() && k > 0));
    if header && lines.len() > 1 {
        labels = Some(first.cells.iter().map(|c| c.to_string()).collect::<Vec<String>>());
        lines.remove(0);
    }

    let label_column = lines.iter().all(|l| l.cells.first().is_some_and(|c| number(c).is_none()));
    if let (true, Some(names)) = (label_column, labels.as_mut()) {
        // The corner cell above the label column.
        if names.len() == lines[0].cells.len() {
            names.remove(0);
        }
    }
    if label_column {
        let names: Vec<String> = lines.iter().map(|l| l.cells[0].to_string()).collect();
        for l in &mut lines {
            l.cells.remove(0);
        }
        labels.get_or_insert(names);
    }
    let column_offset = usize::from(label_column);

    let n = lines.len();
    if n < 2 {
        return Err(CliError::TooFewPoints(n));
    }
    let mut dense = vec![0.0; n * n];
    for (r, line) in lines.iter().enumerate() {
        if line.cells.len() != n {
            return Err(CliError::Parse {
                line: line.number,
                column: line.cells.len().min(n) + 1 + column_offset,
                message: format!("row {} has {} entries, expected {n} (matrix must be square)", r + 1, line.cells.len()),
            });
        }
        for (c, cell) in line.cells.iter().enumerate() {
            let value = number(cell).ok_or_else(|| CliError::Parse {
                line: line.number,
                column: c + 1 + column_offset,
                message: format!("entry ({}, {}) '{cell}' is not a finite number", r + 1, c + 1),
            })?;
            if value < 0.0 {
                return Err(CliError::Negative {
                    row: r + 1,
                    col: c + 1,
                    value,
                });
            }
            dense[r * n + c] = value;
        }
    }
    if let Some(names) = &labels {
        if names.len() != n {
            return Err(CliError::Parse {
                line: 1,
                column: 1,
                message: format!("{} labels for a {n} x {n} matrix", names.len()),
            });
        }
    }

    let mut warnings = Vec::new();
    let nonzero_diagonal: Vec<usize> = (0..n).filter(|&i| dense[i * n + i] != 0.0).collect();
    if !nonzero_diagonal.is_empty() {
        let listed: Vec<String> = nonzero_diagonal.iter().map(|i| (i + 1).to_string()).collect();
        warnings.push(format!("nonzero diagonal set to 0 at rows {}", listed.join(", ")));
    }
    let mut worst: Option<(usize, usize, f64)> = None;
    for i in 0..n {
        for j in i + 1..n {
            let gap = (dense[i * n + j] - dense[j * n + i]).abs();
            if gap > ASYMMETRY_WARNING && worst.is_none_or(|(_, _, g)| gap > g) {
                worst = Some((i, j, gap));
            }
        }
    }
    if let Some((i, j, gap)) = worst {
        warnings.push(format!(
            "asymmetric input averaged as (S + S^T)/2; largest gap {gap:.6e} at ({}, {})",
            i + 1,
            j + 1
        ));
    }
    let matrix = SimilarityMatrix::from_fn(n, |i, j| (dense[i * n + j] + dense[j * n + i]) / 2.0)?;
    Ok(ParsedMatrix {
        matrix,
        labels,
        warnings,
    })
}
