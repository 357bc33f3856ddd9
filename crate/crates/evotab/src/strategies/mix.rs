//! Convex mixes of the gene strategies (dominant/altruistic) and the
//! organism strategies (balanced/selfish).

use serde::Serialize;

use crate::error::{Error, Result};

const MIX_SUM_TOL: f64 = 1e-12;

/// Mixing weights. `gene_dom + gene_alt = 1` and
/// `organism_bal + organism_sel = 1`, both within 1e-12.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrategyMix {
    pub gene_dom: f64,
    pub gene_alt: f64,
    pub organism_bal: f64,
    pub organism_sel: f64,
}

impl StrategyMix {
    /// Build from the two free weights; the complements are implied.
    pub fn new(gene_dom: f64, organism_bal: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gene_dom) || !(0.0..=1.0).contains(&organism_bal) {
            return Err(Error::Config(format!(
                "mix weights must lie in [0, 1], got gene_dom={gene_dom}, organism_bal={organism_bal}"
            )));
        }
        Ok(StrategyMix {
            gene_dom,
            gene_alt: 1.0 - gene_dom,
            organism_bal,
            organism_sel: 1.0 - organism_bal,
        })
    }

    /// Build from all four weights, validating the normalization.
    pub fn from_weights(
        gene_dom: f64,
        gene_alt: f64,
        organism_bal: f64,
        organism_sel: f64,
    ) -> Result<Self> {
        for (name, w) in [
            ("gene_dom", gene_dom),
            ("gene_alt", gene_alt),
            ("organism_bal", organism_bal),
            ("organism_sel", organism_sel),
        ] {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Config(format!(
                    "mix weight {name}={w} must be finite and nonnegative"
                )));
            }
        }
        let mix = StrategyMix {
            gene_dom,
            gene_alt,
            organism_bal,
            organism_sel,
        };
        mix.validate()?;
        Ok(mix)
    }

    /// Pure dominant/balanced combination.
    pub fn pure_dombal() -> Self {
        StrategyMix {
            gene_dom: 1.0,
            gene_alt: 0.0,
            organism_bal: 1.0,
            organism_sel: 0.0,
        }
    }

    /// Pure altruistic/selfish combination.
    pub fn pure_altsel() -> Self {
        StrategyMix {
            gene_dom: 0.0,
            gene_alt: 1.0,
            organism_bal: 0.0,
            organism_sel: 1.0,
        }
    }

    pub fn is_pure_dombal(&self) -> bool {
        self.gene_dom == 1.0 && self.organism_bal == 1.0
    }

    pub fn is_pure_altsel(&self) -> bool {
        self.gene_alt == 1.0 && self.organism_sel == 1.0
    }

    /// Whether evaluating this mix requires the altsel payoff matrices.
    pub fn needs_payoffs(&self) -> bool {
        self.gene_alt > 0.0 || self.organism_sel > 0.0
    }

    /// Check the two normalization constraints.
    pub fn validate(&self) -> Result<()> {
        if (self.gene_dom + self.gene_alt - 1.0).abs() > MIX_SUM_TOL
            || (self.organism_bal + self.organism_sel - 1.0).abs() > MIX_SUM_TOL
        {
            return Err(Error::Config(format!(
                "mix weights must sum to 1 per side: gene {} + {}, organism {} + {}",
                self.gene_dom, self.gene_alt, self.organism_bal, self.organism_sel
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_fills_complements() {
        let mix = StrategyMix::new(0.3, 0.8).unwrap();
        assert!((mix.gene_alt - 0.7).abs() < 1e-15);
        assert!((mix.organism_sel - 0.2).abs() < 1e-15);
        mix.validate().unwrap();
    }

    #[test]
    fn unnormalized_weights_are_rejected() {
        assert!(StrategyMix::from_weights(0.5, 0.6, 1.0, 0.0).is_err());
        assert!(StrategyMix::from_weights(-0.1, 1.1, 1.0, 0.0).is_err());
    }

    #[test]
    fn pure_constructors_are_pure() {
        assert!(StrategyMix::pure_dombal().is_pure_dombal());
        assert!(StrategyMix::pure_altsel().is_pure_altsel());
        assert!(!StrategyMix::pure_dombal().needs_payoffs());
        assert!(StrategyMix::pure_altsel().needs_payoffs());
    }
}
