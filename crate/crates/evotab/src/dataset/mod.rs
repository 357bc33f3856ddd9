//! Data ingestion and gamma-independent preprocessing.
//!
//! The pipeline is: parse a CSV into a [`RawTable`], [`normalize`] it into a
//! [`FitnessMatrix`], [`sanitize`] away trivial columns, then precompute
//! [`Moments`] and [`KinshipMatrices`]. Everything here depends only on the
//! input data, never on the evolving gene fitness, so it runs exactly once
//! per dataset.

mod fitness;
mod kinship;
mod moments;
mod schema;
mod table;

pub use fitness::{normalize, sanitize, FitnessMatrix, Provenance};
pub use kinship::{compute_kinship, KinshipMatrices, KinshipNorm};
pub use moments::{compute_moments, Moments};
pub use schema::{ColumnSchema, Direction, Schema};
pub use table::{load_table, load_table_from_path, RawTable};

use crate::error::Result;

/// Convenience: load, normalize and sanitize in one call.
pub fn load_fitness_matrix(source: impl std::io::Read, schema: &Schema) -> Result<FitnessMatrix> {
    let raw = load_table(source, schema)?;
    sanitize(normalize(&raw, schema)?)
}
