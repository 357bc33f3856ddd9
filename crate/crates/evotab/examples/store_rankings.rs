//! Full pipeline on the bundled store dataset: both strategies, ranked
//! genes and organisms, and the distribution plan.
//!
//! Run from the repository root: `cargo run -p evotab --example store_rankings`

use evotab::analysis::{distribution, rank_genes, rank_organisms};
use evotab::dataset::{load_table_from_path, normalize, sanitize, KinshipNorm, Schema};
use evotab::engine::{run, ReplicatorConfig};
use evotab::strategies::{PreparedStrategy, Strategy};

fn main() -> Result<(), evotab::Error> {
    let schema = Schema::from_path("data/stores.schema")?;
    let raw = load_table_from_path("data/stores.csv", &schema)?;
    let fitness = sanitize(normalize(&raw, &schema)?)?;

    for strategy in [Strategy::DomBal, Strategy::AltSel] {
        let prepared =
            PreparedStrategy::prepare(&fitness, strategy.clone(), KinshipNorm::default())?;
        let (_, rest) = run(&fitness, &prepared, &ReplicatorConfig::default())?;
        println!(
            "== {} (converged in {} iterations, residual {:.2e}) ==",
            strategy.name(),
            rest.iterations,
            rest.bc_residual
        );

        let genes = rank_genes(&rest, &fitness.column_labels)?;
        println!("  features by importance:");
        for entry in &genes.entries {
            println!(
                "    {:>2}. {:<13} {:.4}",
                entry.rank, entry.label, entry.score
            );
        }

        let organisms = rank_organisms(&rest, &fitness)?;
        let order: Vec<&str> = organisms.entries.iter().map(|e| e.label.as_str()).collect();
        println!("  stores by fitness: {}", order.join(" > "));

        let plan = distribution(&rest, &fitness)?;
        println!(
            "  stores above the uniform delivery rate: {:?}\n",
            plan.above_mean()
        );
    }
    Ok(())
}
