//! Property suite: the numerical invariants behind every module, checked on
//! randomized inputs with independent oracles where one exists.

mod common;

use proptest::prelude::*;

use common::{altsel_delta_oracle, dispersion_oracle, max_abs_diff};
use evotab::analysis::{distribution, rank_genes};
use evotab::dataset::{
    compute_kinship, compute_moments, normalize, Direction, FitnessMatrix, KinshipNorm, RawTable,
    Schema,
};
use evotab::engine::{bc_residual, step, RestPoint, SolveMethod};
use evotab::matrix::Matrix;
use evotab::strategies::{
    build_altsel_payoff, build_dombal_payoff, delta_altsel, delta_dombal, delta_explicit_dombal,
};

fn fitness(rows: Vec<Vec<f64>>) -> FitnessMatrix {
    let values = Matrix::from_rows(&rows);
    let row_labels = (0..values.rows()).map(|i| format!("row{i}")).collect();
    let column_labels = (0..values.cols()).map(|j| format!("col{j}")).collect();
    FitnessMatrix::new(values, row_labels, column_labels).unwrap()
}

fn entries(max_n: usize, max_m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2..=max_n, 2..=max_m).prop_flat_map(|(n, m)| {
        proptest::collection::vec(proptest::collection::vec(0.0..=1.0f64, m), n)
    })
}

fn simplex(m: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(1e-3..1.0f64, m).prop_map(|raw| {
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / total).collect()
    })
}

fn converged_rest(gamma: Vec<f64>) -> RestPoint {
    RestPoint {
        gamma,
        bc_residual: 0.0,
        iterations: 1,
        converged: true,
        method: SolveMethod::Iterated,
        tail: None,
    }
}

proptest! {
    /// Normalizing an already-normalized table (all column maxima 1, direct
    /// columns) is the identity.
    #[test]
    fn normalization_is_idempotent_on_normalized_input(rows in entries(8, 5)) {
        let mut rows = rows;
        // force every column maximum to exactly 1
        let m = rows[0].len();
        for j in 0..m {
            rows[0][j] = 1.0;
        }
        let names: Vec<String> = (0..m).map(|j| format!("col{j}")).collect();
        let schema = Schema {
            columns: names
                .iter()
                .map(|name| evotab::dataset::ColumnSchema {
                    name: name.clone(),
                    direction: Direction::Direct,
                })
                .collect(),
            label_column: None,
        };
        let table = RawTable {
            column_names: names,
            row_labels: (0..rows.len()).map(|i| format!("row{i}")).collect(),
            values: Matrix::from_rows(&rows),
        };
        let fm = normalize(&table, &schema).unwrap();
        for i in 0..rows.len() {
            for j in 0..m {
                prop_assert_eq!(fm.values.get(i, j), rows[i][j]);
            }
        }
    }

    /// Kinship matrices are symmetric with unit diagonal and entries at most
    /// one; under L1 they are also nonnegative.
    #[test]
    fn kinship_invariants(rows in entries(8, 6)) {
        let fm = fitness(rows);
        for norm in [KinshipNorm::L1, KinshipNorm::L2] {
            let k = compute_kinship(&fm, norm);
            for matrix in [&k.gene, &k.organism] {
                let dim = matrix.rows();
                for a in 0..dim {
                    prop_assert_eq!(matrix.get(a, a), 1.0);
                    for b in 0..dim {
                        prop_assert_eq!(matrix.get(a, b), matrix.get(b, a));
                        prop_assert!(matrix.get(a, b) <= 1.0 + 1e-12);
                        if norm == KinshipNorm::L1 {
                            prop_assert!(matrix.get(a, b) >= -1e-12);
                        }
                    }
                }
            }
        }
    }

    /// Second moments are symmetric and confined to [0, 1].
    #[test]
    fn second_moment_invariants(rows in entries(8, 6)) {
        let fm = fitness(rows);
        let moments = compute_moments(&fm);
        let m = fm.gene_count();
        for j in 0..m {
            for l in 0..m {
                let v = moments.second_moments.get(j, l);
                prop_assert_eq!(v, moments.second_moments.get(l, j));
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
        for mean in &moments.column_means {
            prop_assert!((0.0..=1.0).contains(mean));
        }
        for r in &moments.harmonic_fitness {
            prop_assert!((0.0..=1.0).contains(r));
        }
        prop_assert!((0.0..=1.0).contains(&moments.gene_dispersion));
        prop_assert!((0.0..=1.0).contains(&moments.organism_dispersion));
    }

    /// Dispersions equal the independent double-loop oracle to 1e-12 on
    /// random 10x7 matrices.
    #[test]
    fn dispersion_matches_oracle(rows in entries(10, 7)) {
        let fm = fitness(rows);
        let moments = compute_moments(&fm);
        let gene_oracle = dispersion_oracle(&moments.column_means);
        let organism_oracle = dispersion_oracle(&moments.harmonic_fitness);
        prop_assert!((moments.gene_dispersion - gene_oracle).abs() < 1e-12);
        prop_assert!((moments.organism_dispersion - organism_oracle).abs() < 1e-12);
    }

    /// Closed-form and explicit dominant/balanced deltas agree to 1e-12 on
    /// matrices up to 20x10.
    #[test]
    fn dombal_closed_form_equals_explicit(rows in entries(20, 10), seed in any::<u64>()) {
        let fm = fitness(rows);
        let moments = compute_moments(&fm);
        let mut rng = common::TestRng::new(seed);
        let gamma = common::random_simplex(fm.gene_count(), &mut rng);
        let closed = delta_dombal(&gamma, &moments).unwrap();
        let explicit = delta_explicit_dombal(&gamma, &fm).unwrap();
        prop_assert!(max_abs_diff(&closed, &explicit) < 1e-12);
    }

    /// The dominant/balanced delta is the linear form A*gamma on the simplex.
    #[test]
    fn dombal_delta_is_linear_in_gamma(rows in entries(12, 8), seed in any::<u64>()) {
        let fm = fitness(rows);
        let moments = compute_moments(&fm);
        let a = build_dombal_payoff(&moments);
        let mut rng = common::TestRng::new(seed);
        let gamma = common::random_simplex(fm.gene_count(), &mut rng);
        let direct = delta_dombal(&gamma, &moments).unwrap();
        let linear = a.mat_vec(&gamma);
        prop_assert!(max_abs_diff(&direct, &linear) < 1e-12);
    }

    /// Payoff-matrix invariants: Dw symmetric to 1e-12, Dg diagonal exactly
    /// zero, D the entrywise sum.
    #[test]
    fn altsel_payoff_invariants(rows in entries(10, 7)) {
        let fm = fitness(rows);
        let moments = compute_moments(&fm);
        prop_assume!(moments.gene_dispersion > 1e-6);
        prop_assume!(moments.organism_dispersion > 1e-6);
        let kinship = compute_kinship(&fm, KinshipNorm::L2);
        let bundle = build_altsel_payoff(&fm, &moments, &kinship).unwrap();
        let m = fm.gene_count();
        for j in 0..m {
            prop_assert_eq!(bundle.altsel_dg.get(j, j), 0.0);
            for l in 0..m {
                let asym = (bundle.altsel_dw.get(j, l) - bundle.altsel_dw.get(l, j)).abs();
                prop_assert!(asym < 1e-12);
                let sum = bundle.altsel_dg.get(j, l) + bundle.altsel_dw.get(j, l);
                prop_assert_eq!(bundle.altsel_d.get(j, l), sum);
            }
        }
    }

    /// The payoff-matrix route agrees with the brute-force per-organism
    /// evaluation of the altruistic/selfish delta to 1e-10.
    #[test]
    fn altsel_delta_matches_brute_force_oracle(rows in entries(8, 6), seed in any::<u64>()) {
        let fm = fitness(rows);
        let moments = compute_moments(&fm);
        prop_assume!(moments.gene_dispersion > 1e-6);
        prop_assume!(moments.organism_dispersion > 1e-6);
        let kinship = compute_kinship(&fm, KinshipNorm::L2);
        let bundle = build_altsel_payoff(&fm, &moments, &kinship).unwrap();
        let mut rng = common::TestRng::new(seed);
        let gamma = common::random_simplex(fm.gene_count(), &mut rng);
        let fast = delta_altsel(&gamma, &bundle).unwrap();
        let oracle = altsel_delta_oracle(&gamma, &fm, &moments, &kinship);
        prop_assert!(max_abs_diff(&fast, &oracle) < 1e-10);
    }

    /// At a simplex vertex the altruistic/selfish delta has support only on
    /// that vertex.
    #[test]
    fn altsel_delta_at_vertex_has_single_support(rows in entries(8, 6), vertex_seed in any::<u64>()) {
        let fm = fitness(rows);
        let moments = compute_moments(&fm);
        prop_assume!(moments.gene_dispersion > 1e-6);
        prop_assume!(moments.organism_dispersion > 1e-6);
        let kinship = compute_kinship(&fm, KinshipNorm::L2);
        let bundle = build_altsel_payoff(&fm, &moments, &kinship).unwrap();
        let m = fm.gene_count();
        let j = (vertex_seed % m as u64) as usize;
        let mut gamma = vec![0.0; m];
        gamma[j] = 1.0;
        let delta = delta_altsel(&gamma, &bundle).unwrap();
        for (l, d) in delta.iter().enumerate() {
            if l == j {
                prop_assert_eq!(*d, bundle.altsel_d.get(j, j));
            } else {
                prop_assert_eq!(*d, 0.0);
            }
        }
    }

    /// A simplex point with equal deltas on its support is a fixed point of
    /// the step, and stays one under any constant delta shift.
    #[test]
    fn equal_deltas_fix_gamma_under_shifts(gamma in simplex(5), level in -0.9..4.0f64, shift in -0.9..0.9f64) {
        let delta = vec![level; 5];
        let next = step(&gamma, &delta, 0.5).unwrap();
        prop_assert!(max_abs_diff(&gamma, &next) < 1e-12);
        let shifted: Vec<f64> = delta.iter().map(|d| d + shift).collect();
        let next = step(&gamma, &shifted, 0.5).unwrap();
        prop_assert!(max_abs_diff(&gamma, &next) < 1e-12);
        prop_assert!(bc_residual(&gamma, &shifted) < 1e-12);
    }

    /// Conversely, a visibly unequal delta over the support moves gamma.
    #[test]
    fn unequal_deltas_move_gamma(gamma in simplex(4)) {
        let delta = [1.0, 0.0, 0.0, 0.0];
        prop_assume!(bc_residual(&gamma, &delta) > 1e-6);
        let next = step(&gamma, &delta, 0.5).unwrap();
        prop_assert!(max_abs_diff(&gamma, &next) > 1e-9);
    }

    /// Ranking is invariant under positive rescaling of the scores.
    #[test]
    fn ranking_is_scale_invariant(scores in proptest::collection::vec(0.0..1.0f64, 2..10), factor in 0.01..100.0f64) {
        let labels: Vec<String> = (0..scores.len()).map(|i| format!("g{i}")).collect();
        let base = rank_genes(&converged_rest(scores.clone()), &labels).unwrap();
        let scaled: Vec<f64> = scores.iter().map(|s| s * factor).collect();
        let rescaled = rank_genes(&converged_rest(scaled), &labels).unwrap();
        for (a, b) in base.entries.iter().zip(&rescaled.entries) {
            prop_assert_eq!(&a.label, &b.label);
            prop_assert_eq!(a.rank, b.rank);
        }
    }

    /// Permuting organisms permutes the distribution shares identically, and
    /// deviations always sum to zero.
    #[test]
    fn distribution_is_permutation_equivariant(rows in entries(8, 5), gamma_seed in any::<u64>()) {
        let fm = fitness(rows.clone());
        let mut rng = common::TestRng::new(gamma_seed);
        let gamma = common::random_simplex(fm.gene_count(), &mut rng);
        let rest = converged_rest(gamma.clone());
        let plan = distribution(&rest, &fm).unwrap();

        let dev_sum: f64 = plan.deviations.iter().sum();
        prop_assert!(dev_sum.abs() < 1e-9);
        let share_sum: f64 = plan.shares.iter().sum();
        prop_assert!((share_sum - 1.0).abs() < 1e-12);

        // rotate the organisms by one
        let n = rows.len();
        let rotated: Vec<Vec<f64>> = (0..n).map(|i| rows[(i + 1) % n].clone()).collect();
        let fm_rotated = fitness(rotated);
        let plan_rotated = distribution(&converged_rest(gamma), &fm_rotated).unwrap();
        for i in 0..n {
            prop_assert!((plan.shares[(i + 1) % n] - plan_rotated.shares[i]).abs() < 1e-12);
        }
    }
}
