//! Kinship (similarity) matrices between genes and between organisms.
//!
//! Kinship between two genes is one minus their column distance scaled by
//! the organism count; between two organisms, one minus their row distance
//! scaled by the gene count. The default norm is L2 (Euclidean): that is
//! the choice that reproduces the reference payoff matrices entry for
//! entry (see the altsel payoff tests). The L1 variant, under which every
//! kinship entry spans the full `[0, 1]` range, stays available for
//! experimentation.

use serde::Serialize;

use crate::dataset::fitness::FitnessMatrix;
use crate::matrix::Matrix;

/// Distance norm used inside the kinship formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KinshipNorm {
    L1,
    #[default]
    L2,
}

impl KinshipNorm {
    fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            KinshipNorm::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            KinshipNorm::L2 => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// Symmetric kinship matrices with unit diagonals.
#[derive(Debug, Clone)]
pub struct KinshipMatrices {
    /// Gene-gene kinship, `m x m`.
    pub gene: Matrix,
    /// Organism-organism kinship, `n x n`.
    pub organism: Matrix,
    pub norm: KinshipNorm,
}

/// Compute both kinship matrices for a sanitized fitness matrix.
pub fn compute_kinship(fm: &FitnessMatrix, norm: KinshipNorm) -> KinshipMatrices {
    let n = fm.organism_count();
    let m = fm.gene_count();

    let columns: Vec<Vec<f64>> = (0..m).map(|j| fm.values.column(j)).collect();
    let mut gene = Matrix::zeros(m, m);
    for j in 0..m {
        gene.set(j, j, 1.0);
        for l in j + 1..m {
            let k = 1.0 - norm.distance(&columns[j], &columns[l]) / n as f64;
            gene.set(j, l, k);
            gene.set(l, j, k);
        }
    }

    let mut organism = Matrix::zeros(n, n);
    for i in 0..n {
        organism.set(i, i, 1.0);
        for t in i + 1..n {
            let k = 1.0 - norm.distance(fm.values.row(i), fm.values.row(t)) / m as f64;
            organism.set(i, t, k);
            organism.set(t, i, k);
        }
    }

    KinshipMatrices {
        gene,
        organism,
        norm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::fitness::FitnessMatrix;

    fn fm(rows: &[Vec<f64>]) -> FitnessMatrix {
        let values = Matrix::from_rows(rows);
        let row_labels = (0..values.rows()).map(|i| format!("r{i}")).collect();
        let column_labels = (0..values.cols()).map(|j| format!("c{j}")).collect();
        FitnessMatrix::new(values, row_labels, column_labels).unwrap()
    }

    #[test]
    fn diagonal_is_one() {
        let k = compute_kinship(
            &fm(&[vec![0.2, 0.9], vec![0.7, 0.1], vec![0.3, 0.5]]),
            KinshipNorm::L1,
        );
        for j in 0..2 {
            assert_eq!(k.gene.get(j, j), 1.0);
        }
        for i in 0..3 {
            assert_eq!(k.organism.get(i, i), 1.0);
        }
    }

    #[test]
    fn opposite_binary_columns_have_zero_l1_kinship() {
        let k = compute_kinship(&fm(&[vec![1.0, 0.0], vec![1.0, 0.0]]), KinshipNorm::L1);
        assert_eq!(k.gene.get(0, 1), 0.0);
    }

    #[test]
    fn identical_rows_have_unit_kinship() {
        let k = compute_kinship(
            &fm(&[vec![0.4, 0.6], vec![0.4, 0.6], vec![0.9, 0.1]]),
            KinshipNorm::L1,
        );
        assert_eq!(k.organism.get(0, 1), 1.0);
    }

    #[test]
    fn l2_kinship_differs_from_l1_but_stays_at_most_one() {
        let data = fm(&[vec![0.2, 0.9], vec![0.7, 0.1], vec![0.3, 0.5]]);
        let k1 = compute_kinship(&data, KinshipNorm::L1);
        let k2 = compute_kinship(&data, KinshipNorm::L2);
        assert!(k2.gene.get(0, 1) > k1.gene.get(0, 1));
        assert!(k2.gene.get(0, 1) <= 1.0);
    }
}
