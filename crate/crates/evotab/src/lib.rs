//! Evolutionary game dynamics on tabular data.
//!
//! `evotab` treats a numeric table as an evolutionary system: columns are
//! competing *genes* (features), rows are *organisms* (records) whose
//! fitness aggregates gene contributions. The table is normalized into a
//! fitness matrix with entries in `[0, 1]`, a strategy turns the current
//! gene weights into per-gene fitness differentials, and a discrete
//! replicator iteration evolves the weights until they settle on a rest
//! point. The converged weights rank features, score and rank records, and
//! yield proportional distribution plans.
//!
//! Two strategy families are built in:
//!
//! * **dombal** (dominant gene / balanced organism) depends only on column
//!   means, is linear in the weights, and has a closed-form rest point;
//! * **altsel** (altruistic gene / selfish organism) couples genes through
//!   kinship (column/row similarity) and second moments, evaluated via
//!   precomputed payoff matrices.
//!
//! Convex mixes of the two are supported, including a deterministic grid
//! search that fits mix weights to target scores.
//!
//! ```
//! use evotab::dataset::{load_table, normalize, sanitize, Schema};
//! use evotab::dataset::KinshipNorm;
//! use evotab::engine::{run, ReplicatorConfig};
//! use evotab::strategies::{PreparedStrategy, Strategy};
//!
//! let csv = "\
//! item,price,quality
//! pen,2,7
//! ink,4,9
//! pad,3,5
//! ";
//! let schema = Schema::parse("item = label\nprice = inverse\nquality = direct\n")?;
//! let table = load_table(csv.as_bytes(), &schema)?;
//! let fitness = sanitize(normalize(&table, &schema)?)?;
//!
//! let strategy = PreparedStrategy::prepare(&fitness, Strategy::DomBal, KinshipNorm::L1)?;
//! let (_, rest) = run(&fitness, &strategy, &ReplicatorConfig::default())?;
//! assert!(rest.converged);
//! let total: f64 = rest.gamma.iter().sum();
//! assert!((total - 1.0).abs() < 1e-9);
//! # Ok::<(), evotab::Error>(())
//! ```

pub mod analysis;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod matrix;
pub mod report;
pub mod strategies;

pub use error::{Error, Result};

// The guide chapters double as doc-tests so their snippets can never drift
// from the library.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(getting_started, "../../../book/src/getting-started.md");
    chapter!(fitness_matrix, "../../../book/src/fitness-matrix.md");
    chapter!(moments_kinship, "../../../book/src/moments-and-kinship.md");
    chapter!(strategies, "../../../book/src/strategies.md");
    chapter!(dynamics, "../../../book/src/replicator-dynamics.md");
    chapter!(analysis, "../../../book/src/rankings-and-distribution.md");
    chapter!(fitting, "../../../book/src/fitting-mixes.md");
    chapter!(cli, "../../../book/src/cli.md");
}
