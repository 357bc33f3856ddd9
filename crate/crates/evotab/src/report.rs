//! Export helpers: CSV and JSON renderings of results, written atomically.
//!
//! CSV numbers are printed with six significant digits (stable against
//! last-bit noise, precise enough to compare with published tables); JSON
//! carries full double precision.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::analysis::{DistributionPlan, PersistenceReport, Ranking};
use crate::engine::{RestPoint, Trajectory};
use crate::error::Result;
use crate::matrix::Matrix;

/// Format with `sig` significant digits in plain decimal notation.
pub fn format_significant(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - exponent).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

fn sig6(x: f64) -> String {
    format_significant(x, 6)
}

/// Write `contents` to `path` atomically (temp file + rename), so a crashed
/// run never leaves a truncated report behind.
pub fn write_atomic(path: impl AsRef<Path>, contents: &str) -> Result<()> {
    let path = path.as_ref();
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// `label,score,rank` rows, best first.
pub fn ranking_csv(ranking: &Ranking) -> String {
    let mut out = String::from("label,score,rank\n");
    for entry in &ranking.entries {
        out.push_str(&format!(
            "{},{},{}\n",
            entry.label,
            sig6(entry.score),
            entry.rank
        ));
    }
    out
}

/// `label,share,deviation` rows in organism order.
pub fn distribution_csv(plan: &DistributionPlan) -> String {
    let mut out = String::from("label,share,deviation\n");
    for ((label, share), deviation) in plan.labels.iter().zip(&plan.shares).zip(&plan.deviations) {
        out.push_str(&format!(
            "{},{},{}\n",
            label,
            sig6(*share),
            sig6(*deviation)
        ));
    }
    out
}

/// Labeled matrix dump, row-major.
pub fn matrix_csv(matrix: &Matrix, row_labels: &[String], col_labels: &[String]) -> String {
    assert_eq!(row_labels.len(), matrix.rows());
    assert_eq!(col_labels.len(), matrix.cols());
    let mut out = String::new();
    out.push_str(&format!("label,{}\n", col_labels.join(",")));
    for (i, label) in row_labels.iter().enumerate() {
        let cells: Vec<String> = matrix.row(i).iter().map(|&v| sig6(v)).collect();
        out.push_str(&format!("{},{}\n", label, cells.join(",")));
    }
    out
}

/// Long-format trajectory: one `iteration,gene,gamma` row per gene per
/// recorded iterate. This is the plotting contract for fitness-over-time
/// figures.
pub fn trajectory_csv(trajectory: &Trajectory, gene_labels: &[String]) -> String {
    let mut out = String::from("iteration,gene,gamma\n");
    for point in &trajectory.iterates {
        for (label, gamma) in gene_labels.iter().zip(&point.gamma) {
            out.push_str(&format!("{},{},{}\n", point.iteration, label, sig6(*gamma)));
        }
    }
    out
}

/// `gene,min_gamma,final_gamma,persistent` rows.
pub fn persistence_csv(report: &PersistenceReport) -> String {
    let mut out = String::from("gene,min_gamma,final_gamma,persistent\n");
    for gene in &report.genes {
        out.push_str(&format!(
            "{},{},{},{}\n",
            gene.label,
            sig6(gene.min_gamma),
            sig6(gene.final_gamma),
            gene.persistent
        ));
    }
    out
}

/// Rest point as a JSON record with full double precision.
#[derive(Debug, Serialize)]
struct RestPointRecord<'a> {
    genes: &'a [String],
    #[serde(flatten)]
    rest: &'a RestPoint,
}

pub fn restpoint_json(rest: &RestPoint, gene_labels: &[String]) -> String {
    let record = RestPointRecord {
        genes: gene_labels,
        rest,
    };
    serde_json::to_string_pretty(&record).expect("rest point serializes") + "\n"
}

/// One JSON object bundling all results of a run.
pub fn bundle_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("report bundle serializes") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{RankEntry, TieBreak};
    use crate::engine::SolveMethod;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(0.145248, 6), "0.145248");
        assert_eq!(format_significant(-7.6923, 6), "-7.69230");
        assert_eq!(format_significant(0.0, 6), "0");
        assert_eq!(format_significant(123456.0, 6), "123456");
        assert_eq!(format_significant(0.000123456789, 6), "0.000123457");
    }

    #[test]
    fn ranking_csv_layout() {
        let ranking = Ranking {
            entries: vec![
                RankEntry {
                    label: "b".into(),
                    score: 0.5,
                    rank: 1,
                },
                RankEntry {
                    label: "a".into(),
                    score: 0.25,
                    rank: 2,
                },
            ],
            tie_break: TieBreak::OriginalIndex,
        };
        let csv = ranking_csv(&ranking);
        assert_eq!(csv, "label,score,rank\nb,0.500000,1\na,0.250000,2\n");
    }

    #[test]
    fn atomic_write_creates_no_temp_leftovers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, "hello\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "hello\n");
        let leftovers: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_name() != "out.csv")
            .collect();
        assert!(leftovers.is_empty());
    }

    #[test]
    fn restpoint_json_round_trips_gamma_exactly() {
        let rest = RestPoint {
            gamma: vec![0.123456789012345, 0.876543210987655],
            bc_residual: 1e-12,
            iterations: 42,
            converged: true,
            method: SolveMethod::Iterated,
            tail: None,
        };
        let json = restpoint_json(&rest, &["g1".to_string(), "g2".to_string()]);
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        let gamma: Vec<f64> = parsed["gamma"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect();
        assert_eq!(gamma, rest.gamma);
        assert_eq!(parsed["converged"], serde_json::json!(true));
    }
}
