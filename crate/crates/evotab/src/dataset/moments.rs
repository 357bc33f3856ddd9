//! Gamma-independent statistics of a fitness matrix: column means, second
//! moments, dispersions and the harmonic (uniform-weight) organism fitness.

use crate::dataset::fitness::FitnessMatrix;
use crate::matrix::Matrix;

/// Precomputed moments of a sanitized fitness matrix.
///
/// * `column_means[j]` — mean of gene `j` over all organisms.
/// * `second_moments[(j, l)]` — mean of the product of genes `j` and `l`.
/// * `gene_dispersion` — average absolute difference between column means
///   over distinct gene pairs; zero exactly when all column means coincide.
/// * `harmonic_fitness[i]` — row mean of organism `i` (organism fitness at
///   uniform gene weights).
/// * `organism_dispersion` — average absolute difference between harmonic
///   fitness values over distinct organism pairs; zero exactly when all
///   rows have the same mean.
///
/// The dispersions average over the `m (m - 1)` (resp. `n (n - 1)`) ordered
/// distinct pairs, not all `m^2` index pairs: that pair convention is what
/// reproduces the reference payoff matrices (see the altsel payoff tests).
#[derive(Debug, Clone)]
pub struct Moments {
    pub column_means: Vec<f64>,
    pub second_moments: Matrix,
    pub gene_dispersion: f64,
    pub harmonic_fitness: Vec<f64>,
    pub organism_dispersion: f64,
}

impl Moments {
    pub fn gene_count(&self) -> usize {
        self.column_means.len()
    }
}

/// Compute all moments in one pass over the matrix.
pub fn compute_moments(fm: &FitnessMatrix) -> Moments {
    let n = fm.organism_count();
    let m = fm.gene_count();
    let phi = &fm.values;

    let column_means: Vec<f64> = (0..m)
        .map(|j| (0..n).map(|i| phi.get(i, j)).sum::<f64>() / n as f64)
        .collect();

    let mut second_moments = Matrix::zeros(m, m);
    for j in 0..m {
        for l in j..m {
            let v = (0..n).map(|i| phi.get(i, j) * phi.get(i, l)).sum::<f64>() / n as f64;
            second_moments.set(j, l, v);
            second_moments.set(l, j, v);
        }
    }

    let gene_dispersion = pair_average_abs_diff(&column_means);

    let harmonic_fitness: Vec<f64> = (0..n)
        .map(|i| phi.row(i).iter().sum::<f64>() / m as f64)
        .collect();

    let organism_dispersion = pair_average_abs_diff(&harmonic_fitness);

    Moments {
        column_means,
        second_moments,
        gene_dispersion,
        harmonic_fitness,
        organism_dispersion,
    }
}

/// Mean of `|v[a] - v[b]|` over the ordered distinct pairs `a != b`.
fn pair_average_abs_diff(values: &[f64]) -> f64 {
    let k = values.len();
    if k < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for a in 0..k {
        for b in 0..k {
            if a != b {
                total += (values[a] - values[b]).abs();
            }
        }
    }
    total / (k * (k - 1)) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(rows: &[Vec<f64>]) -> FitnessMatrix {
        let values = Matrix::from_rows(rows);
        let row_labels = (0..values.rows()).map(|i| format!("r{i}")).collect();
        let column_labels = (0..values.cols()).map(|j| format!("c{j}")).collect();
        FitnessMatrix::new(values, row_labels, column_labels).unwrap()
    }

    #[test]
    fn means_and_harmonic_fitness_are_row_and_column_averages() {
        let m = compute_moments(&fm(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]));
        assert!((m.column_means[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.column_means[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.harmonic_fitness[0] - 0.5).abs() < 1e-15);
        assert!((m.harmonic_fitness[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_matrix_has_zero_dispersions() {
        let m = compute_moments(&fm(&[vec![0.5, 0.5], vec![0.5, 0.5]]));
        assert_eq!(m.gene_dispersion, 0.0);
        assert_eq!(m.organism_dispersion, 0.0);
    }

    #[test]
    fn binary_column_second_moment_equals_its_mean() {
        // phi^2 = phi for 0/1 entries, so the diagonal second moment is the mean
        let m = compute_moments(&fm(&[vec![1.0, 0.3], vec![0.0, 0.6], vec![1.0, 0.9]]));
        assert!((m.second_moments.get(0, 0) - m.column_means[0]).abs() < 1e-15);
    }

    #[test]
    fn dispersion_averages_over_distinct_pairs() {
        // means are 0 and 1: the only distinct pair differs by 1
        let m = compute_moments(&fm(&[vec![0.0, 1.0], vec![0.0, 1.0]]));
        assert!((m.gene_dispersion - 1.0).abs() < 1e-15);
        assert_eq!(m.organism_dispersion, 0.0);
    }

    #[test]
    fn second_moments_are_symmetric() {
        let m = compute_moments(&fm(&[
            vec![0.2, 0.9, 0.4],
            vec![0.7, 0.1, 0.8],
            vec![0.3, 0.5, 0.6],
        ]));
        for j in 0..3 {
            for l in 0..3 {
                assert_eq!(m.second_moments.get(j, l), m.second_moments.get(l, j));
            }
        }
    }
}
