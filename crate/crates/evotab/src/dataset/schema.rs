//! Column schema: which direction each feature is scored in, and which
//! column (if any) carries the row labels.
//!
//! The sidecar format is plain key-value text, one column per line:
//!
//! ```text
//! # comments and blank lines are ignored
//! store    = label
//! distance = inverse
//! space    = direct
//! ```

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Scoring direction of a feature column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Larger raw values are better.
    Direct,
    /// Smaller raw values are better.
    Inverse,
}

/// One schema entry: a named feature column and its direction. The direction
/// is fixed for the whole column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSchema {
    pub name: String,
    pub direction: Direction,
}

/// Parsed schema sidecar: feature columns plus an optional label column.
#[derive(Debug, Clone, Default)]
pub struct Schema {
    pub columns: Vec<ColumnSchema>,
    pub label_column: Option<String>,
}

impl Schema {
    /// Build directly from (name, direction) pairs; handy in tests and
    /// embedded use.
    pub fn from_pairs(pairs: &[(&str, Direction)], label_column: Option<&str>) -> Self {
        Schema {
            columns: pairs
                .iter()
                .map(|(name, direction)| ColumnSchema {
                    name: (*name).to_string(),
                    direction: *direction,
                })
                .collect(),
            label_column: label_column.map(str::to_string),
        }
    }

    /// Parse the key-value sidecar text.
    pub fn parse(text: &str) -> Result<Self> {
        let mut schema = Schema::default();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, value) = line.split_once('=').ok_or_else(|| {
                Error::Schema(format!(
                    "line {}: expected 'column = direct|inverse|label', got '{}'",
                    lineno + 1,
                    line
                ))
            })?;
            let name = name.trim();
            let value = value.trim().to_ascii_lowercase();
            if name.is_empty() {
                return Err(Error::Schema(format!(
                    "line {}: empty column name",
                    lineno + 1
                )));
            }
            if schema.label_column.as_deref() == Some(name)
                || schema.columns.iter().any(|c| c.name == name)
            {
                return Err(Error::Schema(format!(
                    "column '{}' declared more than once",
                    name
                )));
            }
            match value.as_str() {
                "direct" => schema.columns.push(ColumnSchema {
                    name: name.to_string(),
                    direction: Direction::Direct,
                }),
                "inverse" => schema.columns.push(ColumnSchema {
                    name: name.to_string(),
                    direction: Direction::Inverse,
                }),
                "label" => {
                    if let Some(existing) = &schema.label_column {
                        return Err(Error::Schema(format!(
                            "two label columns declared: '{}' and '{}'",
                            existing, name
                        )));
                    }
                    schema.label_column = Some(name.to_string());
                }
                other => {
                    return Err(Error::Schema(format!(
                        "column '{}': unknown direction '{}' (expected direct, inverse or label)",
                        name, other
                    )))
                }
            }
        }
        if schema.columns.is_empty() {
            return Err(Error::Schema(
                "schema declares no feature columns".to_string(),
            ));
        }
        Ok(schema)
    }

    /// Read and parse a sidecar file.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| {
            Error::Schema(format!(
                "cannot read schema file '{}': {}",
                path.display(),
                e
            ))
        })?;
        Self::parse(&text)
    }

    /// Direction declared for `name`, if any.
    pub fn direction_of(&self, name: &str) -> Option<Direction> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.direction)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_directions_label_and_comments() {
        let schema =
            Schema::parse("# demo\nstore = label\ndistance = inverse\n\nspace = direct\n").unwrap();
        assert_eq!(schema.label_column.as_deref(), Some("store"));
        assert_eq!(schema.direction_of("distance"), Some(Direction::Inverse));
        assert_eq!(schema.direction_of("space"), Some(Direction::Direct));
        assert_eq!(schema.direction_of("missing"), None);
    }

    #[test]
    fn rejects_unknown_direction() {
        let err = Schema::parse("a = upward\n").unwrap_err();
        assert!(err.to_string().contains("unknown direction"));
    }

    #[test]
    fn rejects_duplicate_column() {
        let err = Schema::parse("a = direct\na = inverse\n").unwrap_err();
        assert!(err.to_string().contains("more than once"));
    }

    #[test]
    fn rejects_two_label_columns() {
        let err = Schema::parse("a = label\nb = label\nc = direct\n").unwrap_err();
        assert!(err.to_string().contains("two label columns"));
    }

    #[test]
    fn rejects_feature_free_schema() {
        assert!(Schema::parse("a = label\n").is_err());
    }
}
