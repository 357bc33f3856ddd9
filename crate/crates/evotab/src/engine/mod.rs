//! The discrete replicator iteration and its convergence machinery.
//!
//! One step multiplies every gene weight by `1 + h * delta_j` and
//! renormalizes; the denominator keeps gamma on the simplex. A run iterates
//! until successive gammas differ by less than the tolerance, then certifies
//! the final point with the rest-point residual (all active deltas equal the
//! gamma-weighted mean delta).

mod lv;
mod multistart;

pub use lv::{lv_fixed_point, lv_map, lv_rest_point, LvOutcome};
pub use multistart::{multi_start, MultiStartOutcome};

use serde::Serialize;

use crate::dataset::{FitnessMatrix, Moments};
use crate::error::{Error, Result};
use crate::strategies::{delta_dombal, PreparedStrategy};

/// Residual threshold below which a point counts as a certified rest point.
pub const REST_POINT_RESIDUAL_TOL: f64 = 1e-8;
/// Gamma entries below this are treated as extinct when restricting the
/// residual to the support.
const SUPPORT_EPS: f64 = 1e-14;
/// Maximum number of step-size halvings before a step aborts.
const MAX_HALVINGS: u32 = 10;

/// Iteration parameters.
#[derive(Debug, Clone)]
pub struct ReplicatorConfig {
    /// Step size `h`, strictly between 0 and 1.
    pub step_size: f64,
    pub max_iterations: usize,
    /// Convergence threshold on `max_j |gamma'_j - gamma_j|`.
    pub convergence_tol: f64,
    /// Starting point; `None` means uniform `1/m`. Must be strictly interior
    /// and sum to 1.
    pub initial_gamma: Option<Vec<f64>>,
    /// Record every iterate (otherwise only the per-gene minimum is kept).
    pub record_trajectory: bool,
}

impl Default for ReplicatorConfig {
    fn default() -> Self {
        ReplicatorConfig {
            step_size: 0.5,
            max_iterations: 10_000,
            convergence_tol: 1e-10,
            initial_gamma: None,
            record_trajectory: false,
        }
    }
}

impl ReplicatorConfig {
    fn starting_gamma(&self, m: usize) -> Result<Vec<f64>> {
        if !(self.step_size > 0.0 && self.step_size < 1.0) {
            return Err(Error::Config(format!(
                "step size must lie in (0, 1), got {}",
                self.step_size
            )));
        }
        if self.convergence_tol <= 0.0 {
            return Err(Error::Config(format!(
                "convergence tolerance must be positive, got {}",
                self.convergence_tol
            )));
        }
        match &self.initial_gamma {
            None => Ok(vec![1.0 / m as f64; m]),
            Some(gamma) => {
                if gamma.len() != m {
                    return Err(Error::Dimension {
                        context: "initial gamma",
                        expected: m,
                        actual: gamma.len(),
                    });
                }
                let sum: f64 = gamma.iter().sum();
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(Error::Config(format!(
                        "initial gamma must sum to 1, got {sum}"
                    )));
                }
                if gamma.iter().any(|&g| g <= 0.0) {
                    return Err(Error::Config(
                        "initial gamma must be strictly interior (all entries > 0)".to_string(),
                    ));
                }
                Ok(gamma.clone())
            }
        }
    }
}

/// One recorded iterate.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryPoint {
    pub iteration: usize,
    pub gamma: Vec<f64>,
    pub delta: Vec<f64>,
}

/// Iteration history of one run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Recorded iterates (empty unless requested in the config).
    pub iterates: Vec<TrajectoryPoint>,
    /// Per-gene minimum of gamma over the whole run.
    pub min_gamma: Vec<f64>,
}

/// How a rest point was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Iterated,
    ClosedFormDomBal,
    LvLinear,
}

/// What the tail of a non-converged run looked like.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailBehavior {
    /// Step sizes were still shrinking; the budget was simply too small.
    Stalled,
    /// Step sizes stopped shrinking; the iteration bounces without settling.
    Oscillating,
}

/// Final state of a run.
#[derive(Debug, Clone, Serialize)]
pub struct RestPoint {
    pub gamma: Vec<f64>,
    /// Max deviation of any active delta from the gamma-weighted mean delta.
    pub bc_residual: f64,
    pub iterations: usize,
    /// True only when the iterate difference dropped below tolerance, the
    /// residual certifies a rest point, and every gene survived.
    pub converged: bool,
    pub method: SolveMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailBehavior>,
}

/// Rest-point residual: `max_j |delta_j - sum_l gamma_l delta_l|` over the
/// support of gamma. Zero exactly at rest points.
pub fn bc_residual(gamma: &[f64], delta: &[f64]) -> f64 {
    let mean: f64 = gamma.iter().zip(delta).map(|(g, d)| g * d).sum();
    gamma
        .iter()
        .zip(delta)
        .filter(|(g, _)| **g > SUPPORT_EPS)
        .map(|(_, d)| (d - mean).abs())
        .fold(0.0, f64::max)
}

/// One replicator step. If `1 + h * delta_j` is nonpositive for any gene
/// still in the population, the step is retried with `h` halved, up to ten
/// times, before aborting.
pub fn step(gamma: &[f64], delta: &[f64], h: f64) -> Result<Vec<f64>> {
    assert_eq!(gamma.len(), delta.len(), "step dimension mismatch");
    let mut h_try = h;
    for _ in 0..=MAX_HALVINGS {
        let admissible = gamma
            .iter()
            .zip(delta)
            .all(|(&g, &d)| g <= 0.0 || 1.0 + h_try * d > 0.0);
        if admissible {
            let weights: Vec<f64> = gamma
                .iter()
                .zip(delta)
                .map(|(&g, &d)| g * (1.0 + h_try * d))
                .collect();
            let total: f64 = weights.iter().sum();
            return Ok(weights.into_iter().map(|w| w / total).collect());
        }
        h_try *= 0.5;
    }
    Err(Error::StepSize {
        halvings: MAX_HALVINGS,
    })
}

/// Iterate the replicator until convergence or the iteration budget runs
/// out. Non-convergence is reported (`converged = false` plus a tail
/// classification), never silently truncated.
pub fn run(
    fm: &FitnessMatrix,
    strategy: &PreparedStrategy,
    config: &ReplicatorConfig,
) -> Result<(Trajectory, RestPoint)> {
    let m = fm.gene_count();
    let mut gamma = config.starting_gamma(m)?;
    let mut min_gamma = gamma.clone();
    let mut iterates = Vec::new();
    let mut recent_diffs: Vec<f64> = Vec::new();

    let mut iterations = 0;
    let mut diff_converged = false;
    let mut final_delta = strategy.delta(fm, &gamma)?;

    for k in 0..config.max_iterations {
        let delta = strategy.delta(fm, &gamma)?;
        if config.record_trajectory {
            iterates.push(TrajectoryPoint {
                iteration: k,
                gamma: gamma.clone(),
                delta: delta.clone(),
            });
        }
        let next = step(&gamma, &delta, config.step_size)?;
        let diff = gamma
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        for (mg, g) in min_gamma.iter_mut().zip(&next) {
            *mg = mg.min(*g);
        }
        recent_diffs.push(diff);
        if recent_diffs.len() > 10 {
            recent_diffs.remove(0);
        }
        gamma = next;
        iterations = k + 1;
        if diff < config.convergence_tol {
            diff_converged = true;
            final_delta = strategy.delta(fm, &gamma)?;
            break;
        }
        if k + 1 == config.max_iterations {
            final_delta = strategy.delta(fm, &gamma)?;
        }
    }

    if config.record_trajectory {
        iterates.push(TrajectoryPoint {
            iteration: iterations,
            gamma: gamma.clone(),
            delta: final_delta.clone(),
        });
    }

    let residual = bc_residual(&gamma, &final_delta);
    let persistent = gamma.iter().all(|&g| g > 0.0);
    let converged = diff_converged && residual < REST_POINT_RESIDUAL_TOL && persistent;
    let tail = if converged {
        None
    } else {
        Some(classify_tail(&recent_diffs))
    };

    Ok((
        Trajectory {
            iterates,
            min_gamma,
        },
        RestPoint {
            gamma,
            bc_residual: residual,
            iterations,
            converged,
            method: SolveMethod::Iterated,
            tail,
        },
    ))
}

/// Stalled if the step size is still clearly shrinking over the last ten
/// iterations, oscillating otherwise.
fn classify_tail(recent_diffs: &[f64]) -> TailBehavior {
    match (recent_diffs.first(), recent_diffs.last()) {
        (Some(&first), Some(&last)) if last < 0.9 * first => TailBehavior::Stalled,
        (Some(_), Some(_)) => TailBehavior::Oscillating,
        _ => TailBehavior::Stalled,
    }
}

/// Closed-form dominant/balanced rest point:
/// `gamma_j` proportional to `1 / (mean_j + 1/2)`.
pub fn dombal_rest_point(moments: &Moments) -> RestPoint {
    let weights: Vec<f64> = moments
        .column_means
        .iter()
        .map(|mean| 1.0 / (mean + 0.5))
        .collect();
    let total: f64 = weights.iter().sum();
    let gamma: Vec<f64> = weights.into_iter().map(|w| w / total).collect();
    let delta = delta_dombal(&gamma, moments).expect("gamma built for these moments");
    RestPoint {
        bc_residual: bc_residual(&gamma, &delta),
        gamma,
        iterations: 0,
        converged: true,
        method: SolveMethod::ClosedFormDomBal,
        tail: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::compute_moments;
    use crate::dataset::FitnessMatrix;
    use crate::dataset::KinshipNorm;
    use crate::matrix::Matrix;
    use crate::strategies::{PreparedStrategy, Strategy};

    fn fm(rows: &[Vec<f64>]) -> FitnessMatrix {
        let values = Matrix::from_rows(rows);
        let row_labels = (0..values.rows()).map(|i| format!("r{i}")).collect();
        let column_labels = (0..values.cols()).map(|j| format!("c{j}")).collect();
        FitnessMatrix::new(values, row_labels, column_labels).unwrap()
    }

    #[test]
    fn equal_deltas_leave_gamma_fixed() {
        let gamma = [0.2, 0.5, 0.3];
        let next = step(&gamma, &[0.7, 0.7, 0.7], 0.5).unwrap();
        for (a, b) in gamma.iter().zip(&next) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn hand_checked_two_gene_step() {
        let next = step(&[0.5, 0.5], &[1.0, 0.0], 0.5).unwrap();
        assert!((next[0] - 0.6).abs() < 1e-15);
        assert!((next[1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn extinct_genes_stay_extinct() {
        let next = step(&[0.7, 0.0, 0.3], &[0.1, 5.0, -0.2], 0.5).unwrap();
        assert_eq!(next[1], 0.0);
        let sum: f64 = next.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn step_halves_h_for_out_of_range_deltas() {
        // 1 + 0.5 * (-3) < 0, but 1 + 0.25 * (-3) > 0
        let next = step(&[0.5, 0.5], &[-3.0, 0.0], 0.5).unwrap();
        let sum: f64 = next.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(next[0] < 0.5);
    }

    #[test]
    fn step_aborts_when_halving_cannot_help() {
        let err = step(&[0.5, 0.5], &[f64::NEG_INFINITY, 0.0], 0.5).unwrap_err();
        assert!(matches!(err, Error::StepSize { .. }), "{err}");
    }

    #[test]
    fn denominator_equals_one_plus_h_mean_delta() {
        // algebraic identity on the simplex, checked numerically
        let gamma = [0.3, 0.45, 0.25];
        let delta = [0.8, -0.4, 0.2];
        let h = 0.37;
        let denom: f64 = gamma
            .iter()
            .zip(&delta)
            .map(|(g, d)| g * (1.0 + h * d))
            .sum();
        let mean: f64 = gamma.iter().zip(&delta).map(|(g, d)| g * d).sum();
        assert!((denom - (1.0 + h * mean)).abs() < 1e-12);
    }

    #[test]
    fn bc_residual_is_zero_for_constant_delta() {
        assert_eq!(bc_residual(&[0.2, 0.3, 0.5], &[0.4, 0.4, 0.4]), 0.0);
    }

    #[test]
    fn bc_residual_ignores_extinct_genes() {
        let residual = bc_residual(&[0.5, 0.5, 0.0], &[0.1, 0.1, 99.0]);
        assert!(residual < 1e-15, "{residual}");
    }

    #[test]
    fn constant_delta_shift_preserves_fixed_points() {
        let gamma = [0.4, 0.6];
        let delta = [0.2, 0.2];
        for c in [-0.5, 0.0, 1.3] {
            let shifted: Vec<f64> = delta.iter().map(|d| d + c).collect();
            let next = step(&gamma, &shifted, 0.5).unwrap();
            for (a, b) in gamma.iter().zip(&next) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn dombal_iteration_reaches_the_closed_form_point() {
        let data = fm(&[
            vec![0.2, 0.9, 0.4],
            vec![0.7, 0.1, 0.8],
            vec![0.3, 0.5, 0.6],
        ]);
        let moments = compute_moments(&data);
        let strategy = PreparedStrategy::prepare(&data, Strategy::DomBal, KinshipNorm::L1).unwrap();
        let (_, rest) = run(&data, &strategy, &ReplicatorConfig::default()).unwrap();
        assert!(rest.converged);
        let closed = dombal_rest_point(&moments);
        for (a, b) in rest.gamma.iter().zip(&closed.gamma) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        assert!(closed.bc_residual < 1e-12);
    }

    #[test]
    fn closed_form_is_uniform_for_equal_means() {
        let data = fm(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let rest = dombal_rest_point(&compute_moments(&data));
        assert!((rest.gamma[0] - 0.5).abs() < 1e-15);
        assert!((rest.gamma[1] - 0.5).abs() < 1e-15);
        assert!(rest.converged);
    }

    #[test]
    fn non_convergence_is_reported_not_truncated() {
        let data = fm(&[
            vec![0.2, 0.9, 0.4],
            vec![0.7, 0.1, 0.8],
            vec![0.3, 0.5, 0.6],
        ]);
        let strategy = PreparedStrategy::prepare(&data, Strategy::DomBal, KinshipNorm::L1).unwrap();
        let config = ReplicatorConfig {
            max_iterations: 3,
            record_trajectory: true,
            ..ReplicatorConfig::default()
        };
        let (trajectory, rest) = run(&data, &strategy, &config).unwrap();
        assert!(!rest.converged);
        assert_eq!(rest.iterations, 3);
        assert!(rest.tail.is_some());
        // initial point plus one per executed step
        assert_eq!(trajectory.iterates.len(), 4);
    }

    #[test]
    fn trajectory_tracks_min_gamma() {
        let data = fm(&[vec![0.9, 0.1], vec![1.0, 0.0]]);
        let strategy = PreparedStrategy::prepare(&data, Strategy::DomBal, KinshipNorm::L1).unwrap();
        let (trajectory, rest) = run(&data, &strategy, &ReplicatorConfig::default()).unwrap();
        assert!(rest.converged);
        for (min_g, final_g) in trajectory.min_gamma.iter().zip(&rest.gamma) {
            assert!(min_g <= final_g);
        }
    }

    #[test]
    fn bad_initial_gamma_is_rejected() {
        let data = fm(&[vec![0.2, 0.9], vec![0.7, 0.1]]);
        let strategy = PreparedStrategy::prepare(&data, Strategy::DomBal, KinshipNorm::L1).unwrap();
        for initial in [vec![0.5, 0.6], vec![1.0, 0.0], vec![0.5, 0.25, 0.25]] {
            let config = ReplicatorConfig {
                initial_gamma: Some(initial),
                ..ReplicatorConfig::default()
            };
            assert!(run(&data, &strategy, &config).is_err());
        }
    }
}
