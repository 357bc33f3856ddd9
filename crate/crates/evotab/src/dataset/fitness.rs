//! Normalization of a raw table into the fitness matrix, and sanitization
//! (dropping trivial columns, merging duplicates).

use crate::dataset::schema::{Direction, Schema};
use crate::dataset::table::RawTable;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// What sanitization changed, so reports can name dropped features.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct Provenance {
    /// Labels of constant columns that were removed.
    pub removed_constant: Vec<String>,
    /// `(kept, removed)` pairs of exact-duplicate columns that were merged.
    pub merged_duplicates: Vec<(String, String)>,
}

impl Provenance {
    pub fn is_empty(&self) -> bool {
        self.removed_constant.is_empty() && self.merged_duplicates.is_empty()
    }
}

/// Column-normalized data: every entry lies in `[0, 1]` and larger means
/// fitter. Row and column labels ride along so results can name them.
#[derive(Debug, Clone)]
pub struct FitnessMatrix {
    pub values: Matrix,
    pub row_labels: Vec<String>,
    pub column_labels: Vec<String>,
    pub provenance: Provenance,
}

impl FitnessMatrix {
    /// Assemble from parts, checking the `[0, 1]` range and label counts.
    pub fn new(
        values: Matrix,
        row_labels: Vec<String>,
        column_labels: Vec<String>,
    ) -> Result<Self> {
        if row_labels.len() != values.rows() {
            return Err(Error::Dimension {
                context: "fitness matrix row labels",
                expected: values.rows(),
                actual: row_labels.len(),
            });
        }
        if column_labels.len() != values.cols() {
            return Err(Error::Dimension {
                context: "fitness matrix column labels",
                expected: values.cols(),
                actual: column_labels.len(),
            });
        }
        for i in 0..values.rows() {
            for j in 0..values.cols() {
                let v = values.get(i, j);
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Cell {
                        row: row_labels[i].clone(),
                        column: column_labels[j].clone(),
                        message: format!("fitness value {v} outside [0, 1]"),
                    });
                }
            }
        }
        Ok(FitnessMatrix {
            values,
            row_labels,
            column_labels,
            provenance: Provenance::default(),
        })
    }

    /// Number of organisms (rows).
    pub fn organism_count(&self) -> usize {
        self.values.rows()
    }

    /// Number of genes (columns).
    pub fn gene_count(&self) -> usize {
        self.values.cols()
    }
}

/// Map each raw column into `[0, 1]` by its declared direction:
/// `x / max` for direct columns, `1 - x / max` for inverse ones, so the
/// best raw value maps to 1 (direct) or 0 (inverse).
///
/// Raw values must be nonnegative and each column must have a positive
/// maximum; violations are reported per column/cell.
pub fn normalize(raw: &RawTable, schema: &Schema) -> Result<FitnessMatrix> {
    let n = raw.values.rows();
    let m = raw.values.cols();
    let mut values = Matrix::zeros(n, m);

    for j in 0..m {
        let name = &raw.column_names[j];
        let direction = schema
            .direction_of(name)
            .ok_or_else(|| Error::Schema(format!("column '{}' has no schema entry", name)))?;
        let mut max = f64::NEG_INFINITY;
        for i in 0..n {
            let v = raw.values.get(i, j);
            if v < 0.0 {
                return Err(Error::Cell {
                    row: raw.row_labels[i].clone(),
                    column: name.clone(),
                    message: format!("negative raw value {v}; features must be nonnegative"),
                });
            }
            max = max.max(v);
        }
        if max <= 0.0 {
            return Err(Error::DegenerateColumn {
                column: name.clone(),
                reason: "column maximum is not positive, cannot normalize".to_string(),
            });
        }
        for i in 0..n {
            let x = raw.values.get(i, j) / max;
            let v = match direction {
                Direction::Direct => x,
                Direction::Inverse => 1.0 - x,
            };
            values.set(i, j, v);
        }
    }

    FitnessMatrix::new(values, raw.row_labels.clone(), raw.column_names.clone())
}

/// Remove constant columns and merge exact-duplicate columns (the first
/// label is kept), recording both in the provenance report. Errors if fewer
/// than two columns survive.
pub fn sanitize(fm: FitnessMatrix) -> Result<FitnessMatrix> {
    let n = fm.values.rows();
    let m = fm.values.cols();
    let mut provenance = fm.provenance.clone();

    let mut kept: Vec<usize> = Vec::new();
    for j in 0..m {
        let col = fm.values.column(j);
        let constant = col.iter().all(|&v| v == col[0]);
        if constant {
            provenance
                .removed_constant
                .push(fm.column_labels[j].clone());
            continue;
        }
        if let Some(&dup) = kept.iter().find(|&&k| fm.values.column(k) == col) {
            provenance
                .merged_duplicates
                .push((fm.column_labels[dup].clone(), fm.column_labels[j].clone()));
            continue;
        }
        kept.push(j);
    }

    if kept.len() < 2 {
        return Err(Error::UnusableData(format!(
            "only {} informative column(s) remain after dropping constants and duplicates",
            kept.len()
        )));
    }

    let mut values = Matrix::zeros(n, kept.len());
    for (new_j, &old_j) in kept.iter().enumerate() {
        for i in 0..n {
            values.set(i, new_j, fm.values.get(i, old_j));
        }
    }
    let column_labels = kept.iter().map(|&j| fm.column_labels[j].clone()).collect();

    Ok(FitnessMatrix {
        values,
        row_labels: fm.row_labels,
        column_labels,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::schema::Direction;

    fn table(names: &[&str], labels: &[&str], rows: &[Vec<f64>]) -> RawTable {
        RawTable {
            column_names: names.iter().map(|s| s.to_string()).collect(),
            row_labels: labels.iter().map(|s| s.to_string()).collect(),
            values: Matrix::from_rows(rows),
        }
    }

    #[test]
    fn inverse_column_maps_best_to_high_fitness() {
        // distance-style column: 20 km is near, 200 km is the worst
        let raw = table(&["distance"], &["A", "J"], &[vec![20.0], vec![200.0]]);
        let schema = Schema::from_pairs(&[("distance", Direction::Inverse)], None);
        let fm = normalize(&raw, &schema).unwrap();
        assert!((fm.values.get(0, 0) - 0.90).abs() < 1e-12);
        assert!((fm.values.get(1, 0) - 0.00).abs() < 1e-12);
    }

    #[test]
    fn direct_column_divides_by_max() {
        let raw = table(&["space"], &["A", "I"], &[vec![400.0], vec![650.0]]);
        let schema = Schema::from_pairs(&[("space", Direction::Direct)], None);
        let fm = normalize(&raw, &schema).unwrap();
        assert!((fm.values.get(0, 0) - 400.0 / 650.0).abs() < 1e-12);
        assert_eq!(fm.values.get(1, 0), 1.0);
    }

    #[test]
    fn direct_cell_at_column_max_maps_to_one() {
        let raw = table(
            &["a", "b"],
            &["r1", "r2"],
            &[vec![3.0, 7.0], vec![1.0, 9.0]],
        );
        let schema =
            Schema::from_pairs(&[("a", Direction::Direct), ("b", Direction::Direct)], None);
        let fm = normalize(&raw, &schema).unwrap();
        assert_eq!(fm.values.get(0, 0), 1.0);
        assert_eq!(fm.values.get(1, 1), 1.0);
    }

    #[test]
    fn all_zero_direct_column_is_degenerate() {
        let raw = table(&["z"], &["r1", "r2"], &[vec![0.0], vec![0.0]]);
        let schema = Schema::from_pairs(&[("z", Direction::Direct)], None);
        let err = normalize(&raw, &schema).unwrap_err();
        assert!(matches!(err, Error::DegenerateColumn { .. }), "{err}");
    }

    #[test]
    fn negative_raw_value_is_a_domain_error() {
        let raw = table(&["a"], &["r1", "r2"], &[vec![1.0], vec![-2.0]]);
        let schema = Schema::from_pairs(&[("a", Direction::Direct)], None);
        let err = normalize(&raw, &schema).unwrap_err();
        assert!(matches!(err, Error::Cell { .. }), "{err}");
    }

    #[test]
    fn sanitize_removes_constant_column_and_reports_it() {
        let values = Matrix::from_rows(&[vec![0.5, 0.1, 0.9], vec![0.5, 0.4, 0.2]]);
        let fm = FitnessMatrix::new(
            values,
            vec!["r1".into(), "r2".into()],
            vec!["flat".into(), "a".into(), "b".into()],
        )
        .unwrap();
        let clean = sanitize(fm).unwrap();
        assert_eq!(clean.column_labels, vec!["a", "b"]);
        assert_eq!(clean.provenance.removed_constant, vec!["flat"]);
    }

    #[test]
    fn sanitize_merges_exact_duplicates_keeping_first_label() {
        let values = Matrix::from_rows(&[vec![0.1, 0.9, 0.1], vec![0.4, 0.2, 0.4]]);
        let fm = FitnessMatrix::new(
            values,
            vec!["r1".into(), "r2".into()],
            vec!["a".into(), "b".into(), "a_copy".into()],
        )
        .unwrap();
        let clean = sanitize(fm).unwrap();
        assert_eq!(clean.gene_count(), 2);
        assert_eq!(clean.column_labels, vec!["a", "b"]);
        assert_eq!(
            clean.provenance.merged_duplicates,
            vec![("a".to_string(), "a_copy".to_string())]
        );
    }

    #[test]
    fn sanitize_errors_when_everything_is_trivial() {
        let values = Matrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        let fm = FitnessMatrix::new(
            values,
            vec!["r1".into(), "r2".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        assert!(matches!(sanitize(fm), Err(Error::UnusableData(_))));
    }

    #[test]
    fn fitness_matrix_rejects_out_of_range_entries() {
        let values = Matrix::from_rows(&[vec![0.5, 1.2], vec![0.1, 0.3]]);
        let err = FitnessMatrix::new(
            values,
            vec!["r1".into(), "r2".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Cell { .. }), "{err}");
    }
}
