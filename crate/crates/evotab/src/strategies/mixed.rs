//! Mixed strategies and organism fitness.

use crate::dataset::{FitnessMatrix, Moments};
use crate::error::{Error, Result};
use crate::strategies::altsel::{delta_altsel, PayoffBundle};
use crate::strategies::dombal::{delta_explicit_dombal, delta_gene_dom, delta_org_bal};
use crate::strategies::mix::StrategyMix;

/// Gamma-weighted organism fitness `r_i = sum_l gamma_l phi_il`.
pub fn organism_fitness(gamma: &[f64], fm: &FitnessMatrix) -> Result<Vec<f64>> {
    if gamma.len() != fm.gene_count() {
        return Err(Error::Dimension {
            context: "organism_fitness gamma",
            expected: fm.gene_count(),
            actual: gamma.len(),
        });
    }
    Ok((0..fm.organism_count())
        .map(|i| fm.values.row(i).iter().zip(gamma).map(|(p, g)| p * g).sum())
        .collect())
}

/// Blend of the four strategy components with the mix weights.
///
/// Pure mixes delegate to the corresponding pure evaluator, so the pure
/// limits reproduce [`delta_explicit_dombal`] and [`delta_altsel`] exactly.
/// Components with zero weight are never evaluated, which also means the
/// payoff bundle is only required when an altruistic/selfish weight is
/// positive.
pub fn delta_mixed(
    gamma: &[f64],
    fm: &FitnessMatrix,
    moments: &Moments,
    bundle: Option<&PayoffBundle>,
    mix: &StrategyMix,
) -> Result<Vec<f64>> {
    mix.validate()?;
    let m = fm.gene_count();
    if gamma.len() != m {
        return Err(Error::Dimension {
            context: "delta_mixed gamma",
            expected: m,
            actual: gamma.len(),
        });
    }
    debug_assert_eq!(moments.gene_count(), m);

    if mix.is_pure_dombal() {
        return delta_explicit_dombal(gamma, fm);
    }
    if mix.is_pure_altsel() {
        let bundle = bundle.ok_or_else(|| {
            Error::Config("altruistic/selfish components require payoff matrices".to_string())
        })?;
        return delta_altsel(gamma, bundle);
    }

    let mut delta = vec![0.0; m];
    if mix.gene_dom > 0.0 {
        for (d, c) in delta.iter_mut().zip(delta_gene_dom(gamma, fm)) {
            *d += mix.gene_dom * c;
        }
    }
    if mix.organism_bal > 0.0 {
        for (d, c) in delta.iter_mut().zip(delta_org_bal(gamma, fm)) {
            *d += mix.organism_bal * c;
        }
    }
    if mix.needs_payoffs() {
        let bundle = bundle.ok_or_else(|| {
            Error::Config("altruistic/selfish components require payoff matrices".to_string())
        })?;
        if mix.gene_alt > 0.0 {
            let dg_gamma = bundle.altsel_dg.mat_vec(gamma);
            for (j, d) in delta.iter_mut().enumerate() {
                *d += mix.gene_alt * gamma[j] * dg_gamma[j];
            }
        }
        if mix.organism_sel > 0.0 {
            let dw_gamma = bundle.altsel_dw.mat_vec(gamma);
            for (j, d) in delta.iter_mut().enumerate() {
                *d += mix.organism_sel * gamma[j] * dw_gamma[j];
            }
        }
    }
    Ok(delta)
}

/// Experimental: an individual set of mixing weights for every gene.
///
/// Unlike the uniform mix, heterogeneous per-gene weights carry no
/// convergence or persistence guarantee; runs driven by this configuration
/// should be treated as exploratory and judged by their persistence report.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PerGeneMix {
    mixes: Vec<StrategyMix>,
}

impl PerGeneMix {
    /// Validate every per-gene weight set.
    pub fn new(mixes: Vec<StrategyMix>) -> Result<Self> {
        if mixes.is_empty() {
            return Err(Error::Config(
                "per-gene mix needs at least one gene".to_string(),
            ));
        }
        for mix in &mixes {
            mix.validate()?;
        }
        Ok(PerGeneMix { mixes })
    }

    pub fn gene_count(&self) -> usize {
        self.mixes.len()
    }

    pub fn mixes(&self) -> &[StrategyMix] {
        &self.mixes
    }

    /// Whether any gene blends in an altruistic or selfish component.
    pub fn needs_payoffs(&self) -> bool {
        self.mixes.iter().any(StrategyMix::needs_payoffs)
    }
}

/// Per-gene blend: gene `j` weights the four strategy components with its
/// own mix.
pub fn delta_mixed_per_gene(
    gamma: &[f64],
    fm: &FitnessMatrix,
    bundle: Option<&PayoffBundle>,
    per_gene: &PerGeneMix,
) -> Result<Vec<f64>> {
    let m = fm.gene_count();
    if per_gene.gene_count() != m {
        return Err(Error::Dimension {
            context: "per-gene mix",
            expected: m,
            actual: per_gene.gene_count(),
        });
    }
    if gamma.len() != m {
        return Err(Error::Dimension {
            context: "delta_mixed_per_gene gamma",
            expected: m,
            actual: gamma.len(),
        });
    }

    let gene_dom = delta_gene_dom(gamma, fm);
    let org_bal = delta_org_bal(gamma, fm);
    let (dg_gamma, dw_gamma) = if per_gene.needs_payoffs() {
        let bundle = bundle.ok_or_else(|| {
            Error::Config("altruistic/selfish components require payoff matrices".to_string())
        })?;
        (
            Some(bundle.altsel_dg.mat_vec(gamma)),
            Some(bundle.altsel_dw.mat_vec(gamma)),
        )
    } else {
        (None, None)
    };

    Ok((0..m)
        .map(|j| {
            let mix = &per_gene.mixes()[j];
            let mut d = mix.gene_dom * gene_dom[j] + mix.organism_bal * org_bal[j];
            if mix.gene_alt > 0.0 {
                d += mix.gene_alt * gamma[j] * dg_gamma.as_ref().expect("payoffs prepared")[j];
            }
            if mix.organism_sel > 0.0 {
                d += mix.organism_sel * gamma[j] * dw_gamma.as_ref().expect("payoffs prepared")[j];
            }
            d
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{compute_kinship, compute_moments, KinshipNorm};
    use crate::matrix::Matrix;
    use crate::strategies::altsel::build_altsel_payoff;

    fn fm(rows: &[Vec<f64>]) -> FitnessMatrix {
        let values = Matrix::from_rows(rows);
        let row_labels = (0..values.rows()).map(|i| format!("r{i}")).collect();
        let column_labels = (0..values.cols()).map(|j| format!("c{j}")).collect();
        FitnessMatrix::new(values, row_labels, column_labels).unwrap()
    }

    fn demo() -> (FitnessMatrix, Moments, PayoffBundle) {
        let data = fm(&[
            vec![0.2, 0.9, 0.4],
            vec![0.7, 0.1, 0.8],
            vec![0.3, 0.5, 0.6],
            vec![0.9, 0.2, 0.1],
        ]);
        let moments = compute_moments(&data);
        let kinship = compute_kinship(&data, KinshipNorm::L1);
        let bundle = build_altsel_payoff(&data, &moments, &kinship).unwrap();
        (data, moments, bundle)
    }

    #[test]
    fn organism_fitness_at_uniform_gamma_is_harmonic() {
        let (data, moments, _) = demo();
        let m = data.gene_count();
        let r = organism_fitness(&vec![1.0 / m as f64; m], &data).unwrap();
        for (a, b) in r.iter().zip(&moments.harmonic_fitness) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn organism_fitness_at_vertex_gamma_selects_a_column() {
        let (data, _, _) = demo();
        let r = organism_fitness(&[0.0, 1.0, 0.0], &data).unwrap();
        assert_eq!(r, data.values.column(1));
    }

    #[test]
    fn pure_dombal_mix_equals_explicit_dombal_exactly() {
        let (data, moments, bundle) = demo();
        let gamma = [0.5, 0.2, 0.3];
        let mixed = delta_mixed(
            &gamma,
            &data,
            &moments,
            Some(&bundle),
            &StrategyMix::pure_dombal(),
        )
        .unwrap();
        let pure = delta_explicit_dombal(&gamma, &data).unwrap();
        assert_eq!(mixed, pure);
    }

    #[test]
    fn pure_altsel_mix_equals_delta_altsel_exactly() {
        let (data, moments, bundle) = demo();
        let gamma = [0.5, 0.2, 0.3];
        let mixed = delta_mixed(
            &gamma,
            &data,
            &moments,
            Some(&bundle),
            &StrategyMix::pure_altsel(),
        )
        .unwrap();
        let pure = delta_altsel(&gamma, &bundle).unwrap();
        assert_eq!(mixed, pure);
    }

    #[test]
    fn half_half_mix_is_the_mean_of_the_pure_deltas() {
        let (data, moments, bundle) = demo();
        let gamma = [0.4, 0.35, 0.25];
        let mix = StrategyMix::new(0.5, 0.5).unwrap();
        let blended = delta_mixed(&gamma, &data, &moments, Some(&bundle), &mix).unwrap();
        let dombal = delta_explicit_dombal(&gamma, &data).unwrap();
        let altsel = delta_altsel(&gamma, &bundle).unwrap();
        for j in 0..3 {
            let mean = 0.5 * (dombal[j] + altsel[j]);
            assert!((blended[j] - mean).abs() < 1e-12, "{}", blended[j] - mean);
        }
    }

    #[test]
    fn altsel_weights_without_bundle_are_a_config_error() {
        let (data, moments, _) = demo();
        let mix = StrategyMix::new(0.5, 0.5).unwrap();
        let err = delta_mixed(&[0.4, 0.35, 0.25], &data, &moments, None, &mix).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
    }

    #[test]
    fn unnormalized_mix_is_rejected() {
        let (data, moments, bundle) = demo();
        let mix = StrategyMix {
            gene_dom: 0.5,
            gene_alt: 0.6,
            organism_bal: 1.0,
            organism_sel: 0.0,
        };
        let err =
            delta_mixed(&[0.4, 0.35, 0.25], &data, &moments, Some(&bundle), &mix).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
    }

    #[test]
    fn homogeneous_per_gene_mix_reduces_to_the_uniform_blend() {
        let (data, moments, bundle) = demo();
        let gamma = [0.4, 0.35, 0.25];
        let mix = StrategyMix::new(0.3, 0.6).unwrap();
        let per_gene = PerGeneMix::new(vec![mix; 3]).unwrap();
        let uniform = delta_mixed(&gamma, &data, &moments, Some(&bundle), &mix).unwrap();
        let individual = delta_mixed_per_gene(&gamma, &data, Some(&bundle), &per_gene).unwrap();
        for (a, b) in uniform.iter().zip(&individual) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn heterogeneous_per_gene_mix_weights_each_gene_independently() {
        let (data, _, bundle) = demo();
        let gamma = [0.4, 0.35, 0.25];
        let per_gene = PerGeneMix::new(vec![
            StrategyMix::pure_dombal(),
            StrategyMix::pure_altsel(),
            StrategyMix::new(0.5, 0.5).unwrap(),
        ])
        .unwrap();
        let delta = delta_mixed_per_gene(&gamma, &data, Some(&bundle), &per_gene).unwrap();
        let dombal = delta_explicit_dombal(&gamma, &data).unwrap();
        let altsel = delta_altsel(&gamma, &bundle).unwrap();
        assert!((delta[0] - dombal[0]).abs() < 1e-15);
        assert!((delta[1] - altsel[1]).abs() < 1e-15);
        assert!((delta[2] - 0.5 * (dombal[2] + altsel[2])).abs() < 1e-12);
    }

    #[test]
    fn per_gene_mix_length_must_match_gene_count() {
        let (data, _, bundle) = demo();
        let per_gene = PerGeneMix::new(vec![StrategyMix::pure_dombal(); 2]).unwrap();
        let err =
            delta_mixed_per_gene(&[0.4, 0.35, 0.25], &data, Some(&bundle), &per_gene).unwrap_err();
        assert!(matches!(err, Error::Dimension { .. }), "{err}");
    }
}
