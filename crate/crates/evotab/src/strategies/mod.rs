//! Evolutionary strategies: the delta functions that drive the replicator,
//! and their precomputed payoff matrices.
//!
//! Two pure combinations are built in. The dominant/balanced pair depends
//! only on column means and is linear in gamma; the altruistic/selfish pair
//! couples genes through kinship and factors into the quadratic form
//! `gamma_j [D gamma]_j`. Convex mixes of the two are supported via
//! [`StrategyMix`].

mod altsel;
mod dombal;
mod mix;
mod mixed;

pub use altsel::{build_altsel_payoff, delta_altsel, PayoffBundle};
pub use dombal::{build_dombal_payoff, delta_dombal, delta_explicit_dombal};
pub use mix::StrategyMix;
pub use mixed::{delta_mixed, delta_mixed_per_gene, organism_fitness, PerGeneMix};

use serde::Serialize;

use crate::dataset::{compute_kinship, compute_moments, FitnessMatrix, KinshipNorm, Moments};
use crate::error::{Error, Result};

/// Which delta function drives a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    DomBal,
    AltSel,
    Mixed(StrategyMix),
    /// Experimental: one weight set per gene; no convergence or persistence
    /// guarantee, watch the persistence report.
    MixedPerGene(PerGeneMix),
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::DomBal => "dombal",
            Strategy::AltSel => "altsel",
            Strategy::Mixed(_) => "mixed",
            Strategy::MixedPerGene(_) => "mixed-per-gene",
        }
    }
}

/// A strategy with every gamma-independent quantity precomputed, ready to be
/// evaluated once per replicator iteration.
#[derive(Debug, Clone)]
pub struct PreparedStrategy {
    pub strategy: Strategy,
    pub moments: Moments,
    pub payoffs: Option<PayoffBundle>,
}

impl PreparedStrategy {
    /// Precompute moments (and, where the strategy needs them, kinship and
    /// payoff matrices) for `fm`.
    pub fn prepare(fm: &FitnessMatrix, strategy: Strategy, norm: KinshipNorm) -> Result<Self> {
        let moments = compute_moments(fm);
        let needs_payoffs = match &strategy {
            Strategy::DomBal => false,
            Strategy::AltSel => true,
            Strategy::Mixed(mix) => {
                mix.validate()?;
                mix.needs_payoffs()
            }
            Strategy::MixedPerGene(per_gene) => per_gene.needs_payoffs(),
        };
        let payoffs = if needs_payoffs {
            let kinship = compute_kinship(fm, norm);
            Some(build_altsel_payoff(fm, &moments, &kinship)?)
        } else {
            None
        };
        Ok(PreparedStrategy {
            strategy,
            moments,
            payoffs,
        })
    }

    /// Evaluate the delta vector at `gamma`.
    pub fn delta(&self, fm: &FitnessMatrix, gamma: &[f64]) -> Result<Vec<f64>> {
        match &self.strategy {
            Strategy::DomBal => delta_dombal(gamma, &self.moments),
            Strategy::AltSel => {
                let bundle = self.payoffs.as_ref().ok_or_else(|| {
                    Error::Config("altsel strategy prepared without payoffs".to_string())
                })?;
                delta_altsel(gamma, bundle)
            }
            Strategy::Mixed(mix) => {
                delta_mixed(gamma, fm, &self.moments, self.payoffs.as_ref(), mix)
            }
            Strategy::MixedPerGene(per_gene) => {
                delta_mixed_per_gene(gamma, fm, self.payoffs.as_ref(), per_gene)
            }
        }
    }
}
