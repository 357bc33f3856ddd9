//! Multi-start runs from random interior points, used to check that the
//! dynamics lands on the same rest point regardless of where it starts.

use crate::dataset::FitnessMatrix;
use crate::engine::{run, ReplicatorConfig, RestPoint};
use crate::error::Result;
use crate::strategies::PreparedStrategy;

/// Small deterministic PRNG (splitmix64). Seeded runs are reproducible
/// forever, independent of any external RNG crate's version.
#[derive(Debug, Clone)]
pub(crate) struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub(crate) fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub(crate) fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in the open interval (0, 1).
    pub(crate) fn next_unit(&mut self) -> f64 {
        loop {
            let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            if u > 0.0 && u < 1.0 {
                return u;
            }
        }
    }
}

/// Uniformly distributed strictly interior simplex point (normalized
/// exponentials).
pub(crate) fn random_interior_gamma(m: usize, rng: &mut SplitMix64) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| -rng.next_unit().ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Outcome of a batch of runs from random interior starts.
#[derive(Debug, Clone)]
pub struct MultiStartOutcome {
    pub rest_points: Vec<RestPoint>,
    /// Largest entrywise gap between any two final gammas.
    pub max_pairwise_gap: f64,
    pub all_converged: bool,
}

/// Run `starts` times from seeded random interior points.
pub fn multi_start(
    fm: &FitnessMatrix,
    strategy: &PreparedStrategy,
    config: &ReplicatorConfig,
    starts: usize,
    seed: u64,
) -> Result<MultiStartOutcome> {
    let mut rng = SplitMix64::new(seed);
    let mut rest_points = Vec::with_capacity(starts);
    for _ in 0..starts {
        let mut run_config = config.clone();
        run_config.initial_gamma = Some(random_interior_gamma(fm.gene_count(), &mut rng));
        run_config.record_trajectory = false;
        let (_, rest) = run(fm, strategy, &run_config)?;
        rest_points.push(rest);
    }

    let mut max_gap = 0.0_f64;
    for a in 0..rest_points.len() {
        for b in a + 1..rest_points.len() {
            let gap = rest_points[a]
                .gamma
                .iter()
                .zip(&rest_points[b].gamma)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            max_gap = max_gap.max(gap);
        }
    }

    Ok(MultiStartOutcome {
        all_converged: rest_points.iter().all(|r| r.converged),
        rest_points,
        max_pairwise_gap: max_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{FitnessMatrix, KinshipNorm};
    use crate::matrix::Matrix;
    use crate::strategies::{PreparedStrategy, Strategy};

    #[test]
    fn random_gammas_are_interior_simplex_points() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..50 {
            let gamma = random_interior_gamma(5, &mut rng);
            let sum: f64 = gamma.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            assert!(gamma.iter().all(|&g| g > 0.0));
        }
    }

    #[test]
    fn seeded_multi_start_is_deterministic() {
        let values = Matrix::from_rows(&[
            vec![0.2, 0.9, 0.4],
            vec![0.7, 0.1, 0.8],
            vec![0.3, 0.5, 0.6],
        ]);
        let fm = FitnessMatrix::new(
            values,
            vec!["a".into(), "b".into(), "c".into()],
            vec!["x".into(), "y".into(), "z".into()],
        )
        .unwrap();
        let strategy = PreparedStrategy::prepare(&fm, Strategy::DomBal, KinshipNorm::L1).unwrap();
        let config = ReplicatorConfig::default();
        let first = multi_start(&fm, &strategy, &config, 4, 42).unwrap();
        let second = multi_start(&fm, &strategy, &config, 4, 42).unwrap();
        assert!(first.all_converged);
        assert!(first.max_pairwise_gap < 1e-6);
        for (a, b) in first.rest_points.iter().zip(&second.rest_points) {
            assert_eq!(a.gamma, b.gamma);
        }
    }
}
