//! The altruistic gene strategy combined with the selfish organism strategy,
//! and its precomputed payoff matrices.
//!
//! Both contributions are quadratic in gamma but factor as
//! `delta_j = gamma_j [D gamma]_j` once all gamma-independent terms are
//! collected into matrices:
//!
//! * `Dg[j][l] = (1/(n nu_g)) sum_i (phi_ij - 1/2) kg[j][l] (phi_il - phi_ij)`
//!   for `l != j`, zero on the diagonal (a gene has no altruism term with
//!   itself);
//! * `Dw[j][l] = -(2/(n^2 nu_w)) sum_{i,t} phi_ij kw[i][t] (phi_il - phi_tl)`;
//! * `D = Dg + Dw`.
//!
//! The organism term proportional to `r_i / m` is the same for every gene
//! and is dropped: constant fitness shifts cancel in the replicator, so rest
//! points are unaffected.
//!
//! Both dispersions must be positive, otherwise the scaling is undefined and
//! callers should fall back to the dominant/balanced strategy.

use crate::dataset::{FitnessMatrix, KinshipMatrices, Moments};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::strategies::dombal::build_dombal_payoff;

const DISPERSION_EPS: f64 = 1e-12;

/// All gamma-independent payoff matrices for one dataset.
#[derive(Debug, Clone)]
pub struct PayoffBundle {
    /// Linear dominant/balanced payoff matrix `A`.
    pub dombal_a: Matrix,
    /// Altruistic gene transfer matrix `Dg` (zero diagonal).
    pub altsel_dg: Matrix,
    /// Selfish organism transfer matrix `Dw` (symmetric).
    pub altsel_dw: Matrix,
    /// Combined matrix `D = Dg + Dw`.
    pub altsel_d: Matrix,
}

impl PayoffBundle {
    pub fn gene_count(&self) -> usize {
        self.altsel_d.rows()
    }
}

/// Precompute the payoff matrices. Errors with a degenerate-dispersion
/// diagnostic when either dispersion is numerically zero.
pub fn build_altsel_payoff(
    fm: &FitnessMatrix,
    moments: &Moments,
    kinship: &KinshipMatrices,
) -> Result<PayoffBundle> {
    if moments.gene_dispersion <= DISPERSION_EPS {
        return Err(Error::DegenerateDispersion {
            kind: "gene",
            value: moments.gene_dispersion,
        });
    }
    if moments.organism_dispersion <= DISPERSION_EPS {
        return Err(Error::DegenerateDispersion {
            kind: "organism",
            value: moments.organism_dispersion,
        });
    }

    let n = fm.organism_count();
    let m = fm.gene_count();
    let phi = &fm.values;

    let gene_scale = 1.0 / (n as f64 * moments.gene_dispersion);
    let mut dg = Matrix::zeros(m, m);
    for j in 0..m {
        for l in 0..m {
            if l == j {
                continue;
            }
            let mut sum = 0.0;
            for i in 0..n {
                sum += (phi.get(i, j) - 0.5) * (phi.get(i, l) - phi.get(i, j));
            }
            dg.set(j, l, gene_scale * kinship.gene.get(j, l) * sum);
        }
    }

    let organism_scale = -2.0 / (n as f64 * n as f64 * moments.organism_dispersion);
    let mut dw = Matrix::zeros(m, m);
    for j in 0..m {
        for l in 0..m {
            let mut sum = 0.0;
            for i in 0..n {
                let mut pair = 0.0;
                for t in 0..n {
                    pair += kinship.organism.get(i, t) * (phi.get(i, l) - phi.get(t, l));
                }
                sum += phi.get(i, j) * pair;
            }
            dw.set(j, l, organism_scale * sum);
        }
    }

    let mut d = Matrix::zeros(m, m);
    for j in 0..m {
        for l in 0..m {
            d.set(j, l, dg.get(j, l) + dw.get(j, l));
        }
    }

    Ok(PayoffBundle {
        dombal_a: build_dombal_payoff(moments),
        altsel_dg: dg,
        altsel_dw: dw,
        altsel_d: d,
    })
}

/// Altruistic/selfish delta: `delta_j = gamma_j [D gamma]_j`.
pub fn delta_altsel(gamma: &[f64], bundle: &PayoffBundle) -> Result<Vec<f64>> {
    let m = bundle.gene_count();
    if gamma.len() != m {
        return Err(Error::Dimension {
            context: "delta_altsel gamma",
            expected: m,
            actual: gamma.len(),
        });
    }
    let d_gamma = bundle.altsel_d.mat_vec(gamma);
    Ok(gamma.iter().zip(&d_gamma).map(|(g, dg)| g * dg).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{compute_kinship, compute_moments, KinshipNorm};

    fn fm(rows: &[Vec<f64>]) -> FitnessMatrix {
        let values = Matrix::from_rows(rows);
        let row_labels = (0..values.rows()).map(|i| format!("r{i}")).collect();
        let column_labels = (0..values.cols()).map(|j| format!("c{j}")).collect();
        FitnessMatrix::new(values, row_labels, column_labels).unwrap()
    }

    fn bundle_for(data: &FitnessMatrix) -> PayoffBundle {
        let moments = compute_moments(data);
        let kinship = compute_kinship(data, KinshipNorm::L1);
        build_altsel_payoff(data, &moments, &kinship).unwrap()
    }

    #[test]
    fn gene_matrix_has_zero_diagonal() {
        let data = fm(&[
            vec![0.2, 0.9, 0.4],
            vec![0.7, 0.1, 0.8],
            vec![0.3, 0.5, 0.6],
        ]);
        let bundle = bundle_for(&data);
        for j in 0..3 {
            assert_eq!(bundle.altsel_dg.get(j, j), 0.0);
        }
    }

    #[test]
    fn organism_matrix_is_symmetric() {
        let data = fm(&[
            vec![0.2, 0.9, 0.4],
            vec![0.7, 0.1, 0.8],
            vec![0.3, 0.5, 0.6],
            vec![0.9, 0.2, 0.1],
        ]);
        let bundle = bundle_for(&data);
        for j in 0..3 {
            for l in 0..3 {
                let diff = (bundle.altsel_dw.get(j, l) - bundle.altsel_dw.get(l, j)).abs();
                assert!(diff < 1e-12, "asymmetry {diff} at ({j}, {l})");
            }
        }
    }

    #[test]
    fn combined_matrix_is_entrywise_sum() {
        let data = fm(&[vec![0.2, 0.9], vec![0.7, 0.1], vec![0.3, 0.5]]);
        let bundle = bundle_for(&data);
        for j in 0..2 {
            for l in 0..2 {
                let sum = bundle.altsel_dg.get(j, l) + bundle.altsel_dw.get(j, l);
                assert_eq!(bundle.altsel_d.get(j, l), sum);
            }
        }
    }

    #[test]
    fn zero_gene_dispersion_is_degenerate() {
        // columns are permutations of each other: equal means, distinct columns
        let data = fm(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]]);
        let moments = compute_moments(&data);
        assert_eq!(moments.gene_dispersion, 0.0);
        let kinship = compute_kinship(&data, KinshipNorm::L1);
        let err = build_altsel_payoff(&data, &moments, &kinship).unwrap_err();
        assert!(
            matches!(err, Error::DegenerateDispersion { kind: "gene", .. }),
            "{err}"
        );
    }

    #[test]
    fn identical_rows_keep_unit_kinship_and_contribute_no_pair_term() {
        // rows 0 and 1 identical; their (i,t) pair differences vanish
        let data = fm(&[
            vec![0.4, 0.6, 0.2],
            vec![0.4, 0.6, 0.2],
            vec![0.9, 0.1, 0.8],
        ]);
        let moments = compute_moments(&data);
        let kinship = compute_kinship(&data, KinshipNorm::L1);
        assert_eq!(kinship.organism.get(0, 1), 1.0);
        let bundle = build_altsel_payoff(&data, &moments, &kinship).unwrap();
        // recompute Dw skipping the identical pair; must agree exactly
        let n = 3;
        let scale = -2.0 / (9.0 * moments.organism_dispersion);
        for j in 0..3 {
            for l in 0..3 {
                let mut sum = 0.0;
                for i in 0..n {
                    for t in 0..n {
                        if (i, t) == (0, 1) || (i, t) == (1, 0) {
                            continue; // identical rows: zero contribution
                        }
                        sum += data.values.get(i, j)
                            * kinship.organism.get(i, t)
                            * (data.values.get(i, l) - data.values.get(t, l));
                    }
                }
                let diff = (bundle.altsel_dw.get(j, l) - scale * sum).abs();
                assert!(diff < 1e-12, "{diff}");
            }
        }
    }

    #[test]
    fn vertex_gamma_selects_a_single_diagonal_entry() {
        let data = fm(&[vec![0.2, 0.9], vec![0.7, 0.1], vec![0.3, 0.5]]);
        let bundle = bundle_for(&data);
        let delta = delta_altsel(&[1.0, 0.0], &bundle).unwrap();
        assert_eq!(delta[0], bundle.altsel_d.get(0, 0));
        assert_eq!(delta[1], 0.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let data = fm(&[vec![0.2, 0.9], vec![0.7, 0.1], vec![0.3, 0.5]]);
        let bundle = bundle_for(&data);
        assert!(delta_altsel(&[1.0], &bundle).is_err());
    }
}
