//! The dominant gene strategy combined with the balanced organism strategy.
//!
//! Per organism, the dominant gene contribution is `gamma_j (phi_ij - 1/2)`
//! and the balanced organism contribution is `-2 (gamma_j phi_ij - r_i / m)`
//! (the form without the removable `r_i = 0` singularity). Averaging over
//! organisms collapses everything into first moments, giving the closed form
//!
//! ```text
//! delta_j = -gamma_j (mean_j + 1/2) + (2/m) sum_s gamma_s mean_s
//! ```
//!
//! which is linear in gamma with payoff matrix
//! `A[j][j] = (2/m - 1) mean_j - 1/2`, `A[j][l] = (2/m) mean_l` off the
//! diagonal.

use crate::dataset::{FitnessMatrix, Moments};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::Dimension {
            context,
            expected,
            actual,
        });
    }
    Ok(())
}

/// Closed-form dominant/balanced delta from column means alone.
pub fn delta_dombal(gamma: &[f64], moments: &Moments) -> Result<Vec<f64>> {
    let m = moments.gene_count();
    check_len("delta_dombal gamma", m, gamma.len())?;
    let weighted_mean: f64 = gamma
        .iter()
        .zip(&moments.column_means)
        .map(|(g, mean)| g * mean)
        .sum();
    let coupling = 2.0 / m as f64 * weighted_mean;
    Ok(gamma
        .iter()
        .zip(&moments.column_means)
        .map(|(g, mean)| -g * (mean + 0.5) + coupling)
        .collect())
}

/// Dominant gene contribution averaged over organisms:
/// `(1/n) sum_i gamma_j (phi_ij - 1/2)`.
pub(crate) fn delta_gene_dom(gamma: &[f64], fm: &FitnessMatrix) -> Vec<f64> {
    let n = fm.organism_count();
    let m = fm.gene_count();
    (0..m)
        .map(|j| {
            let s: f64 = (0..n).map(|i| fm.values.get(i, j) - 0.5).sum();
            gamma[j] * s / n as f64
        })
        .collect()
}

/// Balanced organism contribution averaged over organisms:
/// `(1/n) sum_i -2 (gamma_j phi_ij - r_i / m)` with
/// `r_i = sum_l gamma_l phi_il`.
pub(crate) fn delta_org_bal(gamma: &[f64], fm: &FitnessMatrix) -> Vec<f64> {
    let n = fm.organism_count();
    let m = fm.gene_count();
    let r: Vec<f64> = (0..n)
        .map(|i| fm.values.row(i).iter().zip(gamma).map(|(p, g)| p * g).sum())
        .collect();
    (0..m)
        .map(|j| {
            let s: f64 = (0..n)
                .map(|i| -2.0 * (gamma[j] * fm.values.get(i, j) - r[i] / m as f64))
                .sum();
            s / n as f64
        })
        .collect()
}

/// Per-cell evaluation of the dominant/balanced delta, summed organism by
/// organism. Algebraically identical to [`delta_dombal`]; kept as the
/// explicit route for cross-checking and as the building block of mixed
/// strategies.
pub fn delta_explicit_dombal(gamma: &[f64], fm: &FitnessMatrix) -> Result<Vec<f64>> {
    check_len("delta_explicit_dombal gamma", fm.gene_count(), gamma.len())?;
    let gene = delta_gene_dom(gamma, fm);
    let organism = delta_org_bal(gamma, fm);
    Ok(gene.iter().zip(&organism).map(|(a, b)| a + b).collect())
}

/// The linear payoff matrix of the dominant/balanced combination. Depends
/// only on the column means, so it is precomputed once per dataset.
pub fn build_dombal_payoff(moments: &Moments) -> Matrix {
    let m = moments.gene_count();
    let mut a = Matrix::zeros(m, m);
    for j in 0..m {
        for l in 0..m {
            let v = if j == l {
                (2.0 / m as f64 - 1.0) * moments.column_means[j] - 0.5
            } else {
                2.0 / m as f64 * moments.column_means[l]
            };
            a.set(j, l, v);
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::compute_moments;

    fn fm(rows: &[Vec<f64>]) -> FitnessMatrix {
        let values = Matrix::from_rows(rows);
        let row_labels = (0..values.rows()).map(|i| format!("r{i}")).collect();
        let column_labels = (0..values.cols()).map(|j| format!("c{j}")).collect();
        FitnessMatrix::new(values, row_labels, column_labels).unwrap()
    }

    #[test]
    fn symmetric_half_means_vanish_at_uniform_gamma() {
        // all column means 1/2: delta_j = -gamma_j + 1/m, zero at uniform
        let data = fm(&[vec![0.0, 1.0, 0.5], vec![1.0, 0.0, 0.5]]);
        let moments = compute_moments(&data);
        let gamma = vec![1.0 / 3.0; 3];
        let delta = delta_dombal(&gamma, &moments).unwrap();
        for d in delta {
            assert!(d.abs() < 1e-15, "{d}");
        }
    }

    #[test]
    fn explicit_matches_hand_arithmetic_for_single_organism() {
        let data = fm(&[vec![1.0, 0.0]]);
        let gamma = [0.5, 0.5];
        let delta = delta_explicit_dombal(&gamma, &data).unwrap();
        assert!((delta[0] - (-0.25)).abs() < 1e-15, "{}", delta[0]);
        assert!((delta[1] - 0.25).abs() < 1e-15, "{}", delta[1]);
    }

    #[test]
    fn all_half_matrix_gives_zero_delta() {
        let data = fm(&[vec![0.5, 0.5], vec![0.5, 0.5]]);
        let delta = delta_explicit_dombal(&[0.5, 0.5], &data).unwrap();
        for d in delta {
            assert!(d.abs() < 1e-15);
        }
    }

    #[test]
    fn payoff_matrix_for_two_half_means() {
        let data = fm(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let a = build_dombal_payoff(&compute_moments(&data));
        assert!((a.get(0, 0) + 0.5).abs() < 1e-15);
        assert!((a.get(0, 1) - 0.5).abs() < 1e-15);
        assert!((a.get(1, 0) - 0.5).abs() < 1e-15);
        assert!((a.get(1, 1) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_form_equals_payoff_product() {
        let data = fm(&[
            vec![0.2, 0.9, 0.4],
            vec![0.7, 0.1, 0.8],
            vec![0.3, 0.5, 0.6],
        ]);
        let moments = compute_moments(&data);
        let a = build_dombal_payoff(&moments);
        let gamma = [0.5, 0.3, 0.2];
        let direct = delta_dombal(&gamma, &moments).unwrap();
        let via_matrix = a.mat_vec(&gamma);
        for (x, y) in direct.iter().zip(&via_matrix) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let data = fm(&[vec![0.2, 0.9], vec![0.7, 0.1]]);
        let moments = compute_moments(&data);
        assert!(delta_dombal(&[1.0], &moments).is_err());
        assert!(delta_explicit_dombal(&[1.0, 0.0, 0.0], &data).is_err());
    }
}
