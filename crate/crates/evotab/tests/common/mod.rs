//! Shared fixtures and independent oracles for the integration suites.

#![allow(dead_code)]

use evotab::dataset::{
    compute_kinship, compute_moments, load_table_from_path, normalize, sanitize, FitnessMatrix,
    KinshipMatrices, KinshipNorm, Moments, Schema,
};
use evotab::matrix::Matrix;

/// Deterministic PRNG for test data (splitmix64).
pub struct TestRng {
    state: u64,
}

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }
}

/// Random interior simplex point.
pub fn random_simplex(m: usize, rng: &mut TestRng) -> Vec<f64> {
    let raw: Vec<f64> = (0..m)
        .map(|_| -(1.0 - rng.unit()).ln().max(1e-12))
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Random sanitized fitness matrix with entries uniform in [0, 1].
pub fn random_fitness_matrix(n: usize, m: usize, rng: &mut TestRng) -> FitnessMatrix {
    loop {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| rng.unit()).collect())
            .collect();
        let values = Matrix::from_rows(&rows);
        let row_labels = (0..n).map(|i| format!("row{i}")).collect();
        let column_labels = (0..m).map(|j| format!("col{j}")).collect();
        let fm = FitnessMatrix::new(values, row_labels, column_labels).unwrap();
        // random continuous entries essentially never produce trivial
        // columns, but stay safe
        if let Ok(clean) = sanitize(fm) {
            if clean.gene_count() == m {
                return clean;
            }
        }
    }
}

/// Path to the bundled store dataset.
pub fn data_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

/// The example store dataset, loaded through the full ingestion pipeline.
pub fn stores() -> FitnessMatrix {
    let schema = Schema::from_path(data_path("stores.schema")).unwrap();
    let raw = load_table_from_path(data_path("stores.csv"), &schema).unwrap();
    sanitize(normalize(&raw, &schema).unwrap()).unwrap()
}

/// Independent double-loop oracle for the pair-averaged dispersion.
pub fn dispersion_oracle(values: &[f64]) -> f64 {
    let k = values.len();
    if k < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for a in 0..k {
        for b in 0..k {
            if a != b {
                total += (values[a] - values[b]).abs();
                pairs += 1;
            }
        }
    }
    total / pairs as f64
}

/// Brute-force altruistic/selfish delta straight from the per-organism
/// definitions (with the gene-independent organism term dropped, matching
/// the production convention). Independent of the payoff-matrix route.
pub fn altsel_delta_oracle(
    gamma: &[f64],
    fm: &FitnessMatrix,
    moments: &Moments,
    kinship: &KinshipMatrices,
) -> Vec<f64> {
    let n = fm.organism_count();
    let m = fm.gene_count();
    let phi = &fm.values;
    let r: Vec<f64> = (0..n)
        .map(|i| (0..m).map(|l| gamma[l] * phi.get(i, l)).sum())
        .collect();

    let mut delta = vec![0.0; m];
    for j in 0..m {
        let mut total = 0.0;
        for i in 0..n {
            // altruistic gene part: dominant factor times kin-weighted
            // fitness differences
            let dom = gamma[j] * (phi.get(i, j) - 0.5);
            let mut alt = 0.0;
            for l in 0..m {
                if l != j {
                    alt += gamma[l] * kinship.gene.get(j, l) * (phi.get(i, l) - phi.get(i, j));
                }
            }
            let gene_term = dom * alt / moments.gene_dispersion;

            // selfish organism part: balanced factor (gene-independent
            // branch dropped) times kin-weighted fitness gaps
            let mut sel = 0.0;
            for t in 0..n {
                if t != i {
                    sel += kinship.organism.get(i, t) * (r[i] - r[t]);
                }
            }
            let organism_term =
                -2.0 * gamma[j] * phi.get(i, j) * sel / (n as f64 * moments.organism_dispersion);

            total += gene_term + organism_term;
        }
        delta[j] = total / n as f64;
    }
    delta
}

/// Max absolute componentwise difference.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn moments_and_kinship(fm: &FitnessMatrix, norm: KinshipNorm) -> (Moments, KinshipMatrices) {
    (compute_moments(fm), compute_kinship(fm, norm))
}
