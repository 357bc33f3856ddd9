//! Turning converged fitness into decisions: rankings, distribution shares
//! and persistence reports.

mod fit;

pub use fit::{fit_mix, FitConfig, FitOutcome};

use serde::Serialize;

use crate::dataset::FitnessMatrix;
use crate::engine::{RestPoint, Trajectory};
use crate::error::{Error, Result};
use crate::strategies::organism_fitness;

/// Genes below this final fitness count as (effectively) extinct.
pub const PERSISTENCE_THRESHOLD: f64 = 1e-6;

/// How ties between equal scores are broken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Equal scores keep their original row/column order.
    OriginalIndex,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankEntry {
    pub label: String,
    pub score: f64,
    /// 1-based rank; consecutive, ties broken deterministically.
    pub rank: usize,
}

/// Scores sorted best-first.
#[derive(Debug, Clone, Serialize)]
pub struct Ranking {
    pub entries: Vec<RankEntry>,
    pub tie_break: TieBreak,
}

impl Ranking {
    fn from_scores(labels: &[String], scores: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        // stable sort by descending score; original index breaks ties
        order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
        let entries = order
            .into_iter()
            .enumerate()
            .map(|(pos, idx)| RankEntry {
                label: labels[idx].clone(),
                score: scores[idx],
                rank: pos + 1,
            })
            .collect();
        Ranking {
            entries,
            tie_break: TieBreak::OriginalIndex,
        }
    }

    pub fn top(&self) -> &RankEntry {
        &self.entries[0]
    }

    pub fn bottom(&self) -> &RankEntry {
        self.entries.last().expect("ranking is never empty")
    }
}

fn require_converged(rest: &RestPoint) -> Result<()> {
    if !rest.converged {
        return Err(Error::Unconverged {
            iterations: rest.iterations,
            detail: format!(
                "rest-point residual {:.3e}; rankings require a converged run",
                rest.bc_residual
            ),
        });
    }
    Ok(())
}

/// Rank genes by their converged fitness share.
pub fn rank_genes(rest: &RestPoint, gene_labels: &[String]) -> Result<Ranking> {
    require_converged(rest)?;
    if gene_labels.len() != rest.gamma.len() {
        return Err(Error::Dimension {
            context: "rank_genes labels",
            expected: rest.gamma.len(),
            actual: gene_labels.len(),
        });
    }
    Ok(Ranking::from_scores(gene_labels, &rest.gamma))
}

/// Rank organisms by their gamma-weighted fitness at the rest point.
pub fn rank_organisms(rest: &RestPoint, fm: &FitnessMatrix) -> Result<Ranking> {
    require_converged(rest)?;
    let scores = organism_fitness(&rest.gamma, fm)?;
    Ok(Ranking::from_scores(&fm.row_labels, &scores))
}

/// Per-organism share of a delivery plus the relative deviation from the
/// uniform rate.
#[derive(Debug, Clone, Serialize)]
pub struct DistributionPlan {
    pub labels: Vec<String>,
    /// Nonnegative, sums to 1.
    pub shares: Vec<f64>,
    /// `n * share - 1`; sums to 0.
    pub deviations: Vec<f64>,
}

impl DistributionPlan {
    /// Labels of organisms that should receive more than the uniform rate.
    pub fn above_mean(&self) -> Vec<&str> {
        self.labels
            .iter()
            .zip(&self.deviations)
            .filter(|(_, d)| **d > 0.0)
            .map(|(l, _)| l.as_str())
            .collect()
    }

    /// Labels of the `k` organisms with the largest deviations.
    pub fn top_k(&self, k: usize) -> Vec<&str> {
        let mut order: Vec<usize> = (0..self.deviations.len()).collect();
        order.sort_by(|&a, &b| {
            self.deviations[b]
                .partial_cmp(&self.deviations[a])
                .unwrap()
                .then(a.cmp(&b))
        });
        order
            .into_iter()
            .take(k)
            .map(|i| self.labels[i].as_str())
            .collect()
    }
}

/// Proportional distribution: `share_i = r_i / sum_t r_t`, deviation
/// `n * share_i - 1`.
pub fn distribution(rest: &RestPoint, fm: &FitnessMatrix) -> Result<DistributionPlan> {
    require_converged(rest)?;
    let r = organism_fitness(&rest.gamma, fm)?;
    let total: f64 = r.iter().sum();
    if total <= 0.0 {
        return Err(Error::UnusableData(
            "total organism fitness is zero; no distribution exists".to_string(),
        ));
    }
    let n = r.len() as f64;
    let shares: Vec<f64> = r.iter().map(|x| x / total).collect();
    let deviations: Vec<f64> = shares.iter().map(|s| n * s - 1.0).collect();
    Ok(DistributionPlan {
        labels: fm.row_labels.clone(),
        shares,
        deviations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GenePersistence {
    pub label: String,
    /// Smallest fitness seen at any iteration.
    pub min_gamma: f64,
    pub final_gamma: f64,
    pub persistent: bool,
}

/// Persistence summary of one run: did every gene survive?
#[derive(Debug, Clone, Serialize)]
pub struct PersistenceReport {
    pub genes: Vec<GenePersistence>,
    pub all_persistent: bool,
    pub threshold: f64,
}

/// Build the persistence report for a completed run.
pub fn persistence_report(
    trajectory: &Trajectory,
    rest: &RestPoint,
    gene_labels: &[String],
) -> PersistenceReport {
    let genes: Vec<GenePersistence> = gene_labels
        .iter()
        .zip(trajectory.min_gamma.iter().zip(&rest.gamma))
        .map(|(label, (&min_gamma, &final_gamma))| GenePersistence {
            label: label.clone(),
            min_gamma,
            final_gamma,
            persistent: final_gamma > PERSISTENCE_THRESHOLD,
        })
        .collect();
    PersistenceReport {
        all_persistent: genes.iter().all(|g| g.persistent),
        genes,
        threshold: PERSISTENCE_THRESHOLD,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::SolveMethod;
    use crate::matrix::Matrix;

    fn fm(rows: &[Vec<f64>]) -> FitnessMatrix {
        let values = Matrix::from_rows(rows);
        let row_labels = (0..values.rows()).map(|i| format!("r{i}")).collect();
        let column_labels = (0..values.cols()).map(|j| format!("c{j}")).collect();
        FitnessMatrix::new(values, row_labels, column_labels).unwrap()
    }

    fn rest(gamma: Vec<f64>, converged: bool) -> RestPoint {
        RestPoint {
            gamma,
            bc_residual: 0.0,
            iterations: 10,
            converged,
            method: SolveMethod::Iterated,
            tail: None,
        }
    }

    #[test]
    fn genes_are_ranked_by_descending_fitness() {
        let labels = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let ranking = rank_genes(&rest(vec![0.2, 0.5, 0.3], true), &labels).unwrap();
        let order: Vec<&str> = ranking.entries.iter().map(|e| e.label.as_str()).collect();
        assert_eq!(order, vec!["b", "c", "a"]);
        assert_eq!(ranking.entries[0].rank, 1);
        assert_eq!(ranking.entries[2].rank, 3);
    }

    #[test]
    fn equal_scores_keep_original_order() {
        let labels = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let ranking = rank_genes(&rest(vec![1.0 / 3.0; 3], true), &labels).unwrap();
        let order: Vec<&str> = ranking.entries.iter().map(|e| e.label.as_str()).collect();
        assert_eq!(order, vec!["a", "b", "c"]);
    }

    #[test]
    fn unconverged_input_is_refused() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let err = rank_genes(&rest(vec![0.5, 0.5], false), &labels).unwrap_err();
        assert!(matches!(err, Error::Unconverged { .. }), "{err}");
    }

    #[test]
    fn identical_rows_tie_in_original_order() {
        let data = fm(&[vec![0.4, 0.6], vec![0.4, 0.6]]);
        let ranking = rank_organisms(&rest(vec![0.5, 0.5], true), &data).unwrap();
        let order: Vec<&str> = ranking.entries.iter().map(|e| e.label.as_str()).collect();
        assert_eq!(order, vec!["r0", "r1"]);
    }

    #[test]
    fn equal_fitness_gives_uniform_shares_and_zero_deviations() {
        let data = fm(&[vec![0.4, 0.6], vec![0.4, 0.6], vec![0.4, 0.6]]);
        let plan = distribution(&rest(vec![0.5, 0.5], true), &data).unwrap();
        for share in &plan.shares {
            assert!((share - 1.0 / 3.0).abs() < 1e-15);
        }
        for dev in &plan.deviations {
            assert!(dev.abs() < 1e-12);
        }
        assert!(plan.above_mean().is_empty());
    }

    #[test]
    fn deviations_sum_to_zero_and_shares_to_one() {
        let data = fm(&[vec![0.9, 0.8], vec![0.1, 0.3], vec![0.5, 0.6]]);
        let plan = distribution(&rest(vec![0.7, 0.3], true), &data).unwrap();
        let share_sum: f64 = plan.shares.iter().sum();
        let dev_sum: f64 = plan.deviations.iter().sum();
        assert!((share_sum - 1.0).abs() < 1e-12);
        assert!(dev_sum.abs() < 1e-9);
    }

    #[test]
    fn zero_total_fitness_is_degenerate() {
        let data = fm(&[vec![0.0, 0.5], vec![0.0, 0.9]]);
        let err = distribution(&rest(vec![1.0, 0.0], true), &data).unwrap_err();
        assert!(matches!(err, Error::UnusableData(_)), "{err}");
    }

    #[test]
    fn persistence_flags_a_decayed_gene() {
        let trajectory = Trajectory {
            iterates: Vec::new(),
            min_gamma: vec![0.2, 1e-9],
        };
        let final_rest = rest(vec![0.999999999, 1e-9], true);
        let labels = vec!["keep".to_string(), "gone".to_string()];
        let report = persistence_report(&trajectory, &final_rest, &labels);
        assert!(!report.all_persistent);
        assert!(report.genes[0].persistent);
        assert!(!report.genes[1].persistent);
    }
}
