//! CSV ingestion into a rectangular numeric table.

use std::io::Read;
use std::path::Path;

use crate::dataset::schema::Schema;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Raw numeric table: `n >= 2` labeled organism rows over `m_raw >= 1`
/// feature columns, in file order.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub column_names: Vec<String>,
    pub row_labels: Vec<String>,
    pub values: Matrix,
}

/// Parse a CSV stream (header row + data rows) against `schema`.
///
/// Every header column must either be the declared label column or have a
/// schema direction, and every schema column must appear in the header.
/// Ragged rows and non-numeric cells are reported with their coordinates.
pub fn load_table(source: impl Read, schema: &Schema) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);

    let headers: Vec<String> = reader
        .headers()
        .map_err(csv_error_with_row)?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() {
        return Err(Error::Parse {
            row: 0,
            message: "empty input: no header row".to_string(),
        });
    }

    let label_index = match &schema.label_column {
        Some(name) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Schema(format!("label column '{}' not in header", name)))?,
        ),
        None => None,
    };

    let mut column_names: Vec<String> = Vec::new();
    let mut column_indices: Vec<usize> = Vec::new();
    for (idx, header) in headers.iter().enumerate() {
        if Some(idx) == label_index {
            continue;
        }
        if schema.direction_of(header).is_none() {
            return Err(Error::Schema(format!(
                "header column '{}' has no schema entry",
                header
            )));
        }
        column_names.push(header.clone());
        column_indices.push(idx);
    }
    for declared in &schema.columns {
        if !column_names.contains(&declared.name) {
            return Err(Error::Schema(format!(
                "schema column '{}' not in header",
                declared.name
            )));
        }
    }
    if column_names.is_empty() {
        return Err(Error::Schema("no feature columns in header".to_string()));
    }

    let mut row_labels: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error_with_row)?;
        let label = match label_index {
            Some(idx) => record
                .get(idx)
                .map(str::to_string)
                .unwrap_or_else(|| (row_idx + 1).to_string()),
            None => (row_idx + 1).to_string(),
        };
        let mut row = Vec::with_capacity(column_indices.len());
        for (&col_idx, name) in column_indices.iter().zip(&column_names) {
            let field = record.get(col_idx).ok_or_else(|| Error::Parse {
                row: row_idx + 1,
                message: format!("missing field for column '{}'", name),
            })?;
            let value: f64 = field.parse().map_err(|_| Error::Cell {
                row: label.clone(),
                column: name.clone(),
                message: format!("'{}' is not a number", field),
            })?;
            if !value.is_finite() {
                return Err(Error::Cell {
                    row: label.clone(),
                    column: name.clone(),
                    message: format!("'{}' is not finite", field),
                });
            }
            row.push(value);
        }
        row_labels.push(label);
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(Error::Parse {
            row: 0,
            message: "empty input: no data rows".to_string(),
        });
    }
    if rows.len() < 2 {
        return Err(Error::UnusableData(
            "at least two data rows are required".to_string(),
        ));
    }

    Ok(RawTable {
        column_names,
        row_labels,
        values: Matrix::from_rows(&rows),
    })
}

/// Load from a file path.
pub fn load_table_from_path(path: impl AsRef<Path>, schema: &Schema) -> Result<RawTable> {
    let file = std::fs::File::open(path.as_ref()).map_err(|e| {
        Error::UnusableData(format!(
            "cannot open input file '{}': {}",
            path.as_ref().display(),
            e
        ))
    })?;
    load_table(file, schema)
}

fn csv_error_with_row(err: csv::Error) -> Error {
    if let csv::ErrorKind::UnequalLengths {
        pos,
        expected_len,
        len,
    } = err.kind()
    {
        let row = pos.as_ref().map_or(0, |p| p.record() as usize);
        return Error::Parse {
            row,
            message: format!(
                "ragged row: expected {} fields, found {}",
                expected_len, len
            ),
        };
    }
    Error::Csv(err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::schema::Direction;

    fn demo_schema() -> Schema {
        Schema::from_pairs(
            &[("a", Direction::Direct), ("b", Direction::Inverse)],
            Some("id"),
        )
    }

    #[test]
    fn loads_labels_and_values_in_file_order() {
        let csv = "id,a,b\nx,1,2\ny,3,4\n";
        let table = load_table(csv.as_bytes(), &demo_schema()).unwrap();
        assert_eq!(table.row_labels, vec!["x", "y"]);
        assert_eq!(table.column_names, vec!["a", "b"]);
        assert_eq!(table.values.row(0), &[1.0, 2.0]);
        assert_eq!(table.values.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn empty_input_is_a_parse_error() {
        let err = load_table("".as_bytes(), &demo_schema()).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn ragged_row_reports_row_index() {
        let csv = "id,a,b\nx,1,2\ny,3\n";
        let err = load_table(csv.as_bytes(), &demo_schema()).unwrap_err();
        match err {
            Error::Parse { row, message } => {
                assert_eq!(row, 2);
                assert!(message.contains("ragged"), "{message}");
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn non_numeric_cell_reports_coordinates() {
        let csv = "id,a,b\nx,1,2\ny,oops,4\n";
        let err = load_table(csv.as_bytes(), &demo_schema()).unwrap_err();
        match err {
            Error::Cell { row, column, .. } => {
                assert_eq!(row, "y");
                assert_eq!(column, "a");
            }
            other => panic!("expected cell error, got {other}"),
        }
    }

    #[test]
    fn header_without_schema_entry_is_a_schema_error() {
        let csv = "id,a,b,extra\nx,1,2,3\ny,4,5,6\n";
        let err = load_table(csv.as_bytes(), &demo_schema()).unwrap_err();
        assert!(matches!(err, Error::Schema(_)), "{err}");
    }

    #[test]
    fn schema_entry_missing_from_header_is_a_schema_error() {
        let csv = "id,a\nx,1\ny,2\n";
        let err = load_table(csv.as_bytes(), &demo_schema()).unwrap_err();
        match err {
            Error::Schema(msg) => assert!(msg.contains("'b'"), "{msg}"),
            other => panic!("expected schema error, got {other}"),
        }
    }

    #[test]
    fn single_row_is_rejected() {
        let csv = "id,a,b\nx,1,2\n";
        let err = load_table(csv.as_bytes(), &demo_schema()).unwrap_err();
        assert!(matches!(err, Error::UnusableData(_)), "{err}");
    }

    #[test]
    fn missing_label_column_defaults_to_indices() {
        let schema = Schema::from_pairs(&[("a", Direction::Direct)], None);
        let csv = "a\n1\n2\n";
        let table = load_table(csv.as_bytes(), &schema).unwrap();
        assert_eq!(table.row_labels, vec!["1", "2"]);
    }
}
