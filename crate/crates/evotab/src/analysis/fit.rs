//! Grid-search fitting of mixed-strategy weights against target organism
//! scores.
//!
//! For every grid cell `(gene_dom, organism_bal)` the mixed dynamics is run
//! to convergence on each training set, the resulting organism fitness is
//! min-max rescaled, and the mean squared error against the (equally
//! rescaled) targets is averaged over training sets. The cell with the
//! smallest error wins; exact ties go to the more dominant/balanced cell, so
//! the search is fully deterministic.

use crate::dataset::{FitnessMatrix, KinshipNorm};
use crate::engine::{run, ReplicatorConfig};
use crate::error::{Error, Result};
use crate::strategies::{organism_fitness, PreparedStrategy, Strategy, StrategyMix};

/// Grid and engine settings for [`fit_mix`].
#[derive(Debug, Clone)]
pub struct FitConfig {
    /// Candidate values for the dominant gene weight.
    pub gene_weights: Vec<f64>,
    /// Candidate values for the balanced organism weight.
    pub organism_weights: Vec<f64>,
    pub engine: ReplicatorConfig,
    pub norm: KinshipNorm,
}

impl Default for FitConfig {
    fn default() -> Self {
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        FitConfig {
            gene_weights: grid.clone(),
            organism_weights: grid,
            engine: ReplicatorConfig::default(),
            norm: KinshipNorm::default(),
        }
    }
}

/// Winning cell of the grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub mix: StrategyMix,
    /// Mean squared error of the winning cell, averaged over training sets.
    pub mse: f64,
    pub cells_evaluated: usize,
    /// Cells skipped because their dynamics failed or did not converge.
    pub cells_skipped: usize,
}

/// Rescale to [0, 1]; a constant vector maps to all zeros.
fn min_max_rescale(values: &[f64]) -> Vec<f64> {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max <= min {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - min) / (max - min)).collect()
}

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// Exhaustive deterministic grid search over strategy mixes.
pub fn fit_mix(training: &[(FitnessMatrix, Vec<f64>)], config: &FitConfig) -> Result<FitOutcome> {
    if training.is_empty() {
        return Err(Error::Fit("no training pairs supplied".to_string()));
    }
    for (fm, targets) in training {
        if targets.len() != fm.organism_count() {
            return Err(Error::Dimension {
                context: "fit_mix targets",
                expected: fm.organism_count(),
                actual: targets.len(),
            });
        }
    }
    if config.gene_weights.is_empty() || config.organism_weights.is_empty() {
        return Err(Error::Fit("empty weight grid".to_string()));
    }
    for w in config.gene_weights.iter().chain(&config.organism_weights) {
        if !w.is_finite() {
            return Err(Error::Fit(format!("grid weight {w} is not finite")));
        }
    }

    let rescaled_targets: Vec<Vec<f64>> = training
        .iter()
        .map(|(_, targets)| min_max_rescale(targets))
        .collect();

    // Cells ordered most-dominant/balanced first, so the first strict
    // minimum automatically wins exact ties in the dombal-heavier cell.
    let mut cells: Vec<(f64, f64)> = Vec::new();
    for &gd in &config.gene_weights {
        for &ob in &config.organism_weights {
            cells.push((gd, ob));
        }
    }
    cells.sort_by(|a, b| {
        let heavy_a = a.0 + a.1;
        let heavy_b = b.0 + b.1;
        heavy_b
            .partial_cmp(&heavy_a)
            .unwrap()
            .then(b.0.partial_cmp(&a.0).unwrap())
            .then(b.1.partial_cmp(&a.1).unwrap())
    });

    let mut best: Option<(StrategyMix, f64)> = None;
    let mut evaluated = 0usize;
    let mut skipped = 0usize;

    for (gd, ob) in cells {
        let mix = StrategyMix::new(gd, ob)?;
        let mut total = 0.0;
        let mut failed = false;
        for ((fm, _), target) in training.iter().zip(&rescaled_targets) {
            let prepared = match PreparedStrategy::prepare(fm, Strategy::Mixed(mix), config.norm) {
                Ok(p) => p,
                Err(_) => {
                    failed = true;
                    break;
                }
            };
            let rest = match run(fm, &prepared, &config.engine) {
                Ok((_, rest)) if rest.converged => rest,
                _ => {
                    failed = true;
                    break;
                }
            };
            let r = organism_fitness(&rest.gamma, fm)?;
            total += mse(&min_max_rescale(&r), target);
        }
        if failed {
            skipped += 1;
            continue;
        }
        evaluated += 1;
        let score = total / training.len() as f64;
        let improves = match &best {
            None => true,
            Some((_, best_score)) => score < *best_score,
        };
        if improves {
            best = Some((mix, score));
        }
    }

    match best {
        Some((mix, mse)) => Ok(FitOutcome {
            mix,
            mse,
            cells_evaluated: evaluated,
            cells_skipped: skipped,
        }),
        None => Err(Error::Fit(format!(
            "all {skipped} grid cells failed to converge"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn fm(rows: &[Vec<f64>]) -> FitnessMatrix {
        let values = Matrix::from_rows(rows);
        let row_labels = (0..values.rows()).map(|i| format!("r{i}")).collect();
        let column_labels = (0..values.cols()).map(|j| format!("c{j}")).collect();
        FitnessMatrix::new(values, row_labels, column_labels).unwrap()
    }

    fn demo_matrix() -> FitnessMatrix {
        fm(&[
            vec![0.2, 0.9, 0.4],
            vec![0.7, 0.1, 0.8],
            vec![0.3, 0.5, 0.6],
            vec![0.9, 0.2, 0.1],
        ])
    }

    #[test]
    fn single_cell_grid_returns_that_cell() {
        let data = demo_matrix();
        let targets = vec![0.5, 0.6, 0.4, 0.3];
        let config = FitConfig {
            gene_weights: vec![0.3],
            organism_weights: vec![0.7],
            ..FitConfig::default()
        };
        let outcome = fit_mix(&[(data, targets)], &config).unwrap();
        assert_eq!(outcome.mix, StrategyMix::new(0.3, 0.7).unwrap());
        assert_eq!(outcome.cells_evaluated, 1);
    }

    #[test]
    fn wrong_target_length_is_a_dimension_error() {
        let data = demo_matrix();
        let err = fit_mix(&[(data, vec![0.5, 0.5])], &FitConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Dimension { .. }), "{err}");
    }

    #[test]
    fn empty_training_is_rejected() {
        assert!(fit_mix(&[], &FitConfig::default()).is_err());
    }

    #[test]
    fn fit_is_deterministic() {
        let config = FitConfig {
            gene_weights: vec![0.0, 0.5, 1.0],
            organism_weights: vec![0.0, 0.5, 1.0],
            ..FitConfig::default()
        };
        let targets = vec![0.5, 0.6, 0.4, 0.3];
        let first = fit_mix(&[(demo_matrix(), targets.clone())], &config).unwrap();
        let second = fit_mix(&[(demo_matrix(), targets)], &config).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn rescale_handles_constant_vectors() {
        assert_eq!(min_max_rescale(&[2.0, 2.0, 2.0]), vec![0.0, 0.0, 0.0]);
        let scaled = min_max_rescale(&[1.0, 3.0, 2.0]);
        assert_eq!(scaled, vec![0.0, 1.0, 0.5]);
    }
}
