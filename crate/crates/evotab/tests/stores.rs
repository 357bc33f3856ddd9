//! Regression fixtures on the bundled store dataset (beyond the acceptance
//! criteria): pinned values derived by hand or by independent summation.

mod common;

use common::{data_path, max_abs_diff, stores, TestRng};
use evotab::dataset::{
    compute_kinship, compute_moments, load_table_from_path, KinshipNorm, Schema,
};
use evotab::engine::{multi_start, ReplicatorConfig};
use evotab::strategies::{PreparedStrategy, Strategy};

#[test]
fn raw_table_has_ten_stores_and_seven_features() {
    let schema = Schema::from_path(data_path("stores.schema")).unwrap();
    let raw = load_table_from_path(data_path("stores.csv"), &schema).unwrap();
    assert_eq!(raw.row_labels.len(), 10);
    assert_eq!(raw.column_names.len(), 7);
    assert_eq!(raw.row_labels[0], "A");
    assert_eq!(raw.row_labels[9], "J");
}

#[test]
fn sanitize_leaves_the_store_matrix_untouched() {
    let fm = stores();
    assert_eq!(fm.gene_count(), 7);
    assert_eq!(fm.organism_count(), 10);
    assert!(fm.provenance.is_empty());
}

#[test]
#[allow(clippy::excessive_precision)]
fn dombal_delta_at_uniform_matches_hand_derivation() {
    // delta_j = (2 * mean(means) - 1/2 - mean_j) / 7 at uniform gamma,
    // evaluated by hand from the exact column means
    let expected = [
        0.016759487677855028,
        0.017253993172360529,
        0.008462784381151729,
        0.005410281328648686,
        -0.004056838852757215,
        0.006997582915950271,
        0.040330916249283600,
    ];
    let fm = stores();
    let moments = compute_moments(&fm);
    let gamma = vec![1.0 / 7.0; 7];
    let delta = evotab::strategies::delta_dombal(&gamma, &moments).unwrap();
    assert!(
        max_abs_diff(&delta, &expected) < 1e-9,
        "delta {delta:?} vs hand values {expected:?}"
    );
}

#[test]
fn gene_kinship_between_distance_and_space_is_pinned() {
    let fm = stores();
    // independent direct summation over the ten organisms
    let col_distance = fm.values.column(0);
    let col_space = fm.values.column(1);
    let l1: f64 = col_distance
        .iter()
        .zip(&col_space)
        .map(|(a, b)| (a - b).abs())
        .sum();
    let l2: f64 = col_distance
        .iter()
        .zip(&col_space)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();

    let k1 = compute_kinship(&fm, KinshipNorm::L1);
    assert!((k1.gene.get(0, 1) - (1.0 - l1 / 10.0)).abs() < 1e-12);
    assert!(
        (k1.gene.get(0, 1) - 0.585).abs() < 1e-12,
        "{}",
        k1.gene.get(0, 1)
    );

    let k2 = compute_kinship(&fm, KinshipNorm::L2);
    assert!((k2.gene.get(0, 1) - (1.0 - l2 / 10.0)).abs() < 1e-12);
    assert!(
        (k2.gene.get(0, 1) - 0.8433699001925861).abs() < 1e-12,
        "{}",
        k2.gene.get(0, 1)
    );
}

#[test]
fn dombal_payoff_flagship_diagonal_is_pinned() {
    let fm = stores();
    let moments = compute_moments(&fm);
    let a = evotab::strategies::build_dombal_payoff(&moments);
    // (2/7 - 1) * 0.4 - 1/2
    let expected = (2.0 / 7.0 - 1.0) * 0.4 - 0.5;
    assert!((a.get(6, 6) - expected).abs() < 1e-12);
    assert!((a.get(6, 6) - (-0.785714285714)).abs() < 1e-10);
}

#[test]
fn altsel_delta_at_uniform_matches_published_row_sums() {
    // row sums of the published combined payoff matrix divided by 49
    let expected = [
        -6.08 / 49.0,
        -2.17 / 49.0,
        -2.35 / 49.0,
        -3.58 / 49.0,
        -2.73 / 49.0,
        -3.39 / 49.0,
        -15.81 / 49.0,
    ];
    let fm = stores();
    let strategy = PreparedStrategy::prepare(&fm, Strategy::AltSel, KinshipNorm::L2).unwrap();
    let gamma = vec![1.0 / 7.0; 7];
    let delta = strategy.delta(&fm, &gamma).unwrap();
    assert!(
        max_abs_diff(&delta, &expected) < 1e-3,
        "delta {delta:?} vs published-derived {expected:?}"
    );
}

#[test]
fn lv_map_of_the_dombal_payoff_is_diagonal() {
    // subtracting the last payoff row leaves -(mean_j + 1/2) on the
    // diagonal and the last gene's mean + 1/2 as the intercept
    let fm = stores();
    let moments = compute_moments(&fm);
    let a = evotab::strategies::build_dombal_payoff(&moments);
    let (reduced, b) = evotab::engine::lv_map(&a);
    for j in 0..6 {
        assert!((b[j] - (moments.column_means[6] + 0.5)).abs() < 1e-12);
        for l in 0..6 {
            let expected = if j == l {
                -(moments.column_means[j] + 0.5)
            } else {
                0.0
            };
            assert!(
                (reduced.get(j, l) - expected).abs() < 1e-12,
                "reduced[{j}][{l}] = {}",
                reduced.get(j, l)
            );
        }
    }
}

#[test]
fn uniform_gamma_is_not_a_dombal_rest_point() {
    let fm = stores();
    let moments = compute_moments(&fm);
    let gamma = vec![1.0 / 7.0; 7];
    let delta = evotab::strategies::delta_dombal(&gamma, &moments).unwrap();
    assert!(evotab::engine::bc_residual(&gamma, &delta) > 0.001);
}

#[test]
fn combined_payoff_matrix_has_full_rank() {
    let fm = stores();
    let moments = compute_moments(&fm);
    let kinship = compute_kinship(&fm, KinshipNorm::default());
    let bundle = evotab::strategies::build_altsel_payoff(&fm, &moments, &kinship).unwrap();
    assert_eq!(bundle.altsel_d.rank(), 7);
}

#[test]
fn converged_altsel_run_is_persistent() {
    let fm = stores();
    let strategy =
        PreparedStrategy::prepare(&fm, Strategy::AltSel, KinshipNorm::default()).unwrap();
    let (trajectory, rest) =
        evotab::engine::run(&fm, &strategy, &ReplicatorConfig::default()).unwrap();
    assert!(rest.converged);
    let report = evotab::analysis::persistence_report(&trajectory, &rest, &fm.column_labels);
    assert!(report.all_persistent);
    let min_final = rest.gamma.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(min_final > 0.01, "weakest surviving gene at {min_final}");
}

#[test]
fn ten_random_interior_starts_agree_for_both_strategies() {
    let fm = stores();
    let config = ReplicatorConfig::default();
    let mut rng = TestRng::new(0xe5707ab);
    for strategy in [Strategy::DomBal, Strategy::AltSel] {
        let prepared = PreparedStrategy::prepare(&fm, strategy.clone(), KinshipNorm::L2).unwrap();
        let outcome = multi_start(&fm, &prepared, &config, 10, rng.next_u64()).unwrap();
        assert!(outcome.all_converged, "{strategy:?} run did not converge");
        assert!(
            outcome.max_pairwise_gap < 1e-6,
            "{strategy:?} starts disagree by {}",
            outcome.max_pairwise_gap
        );
    }
}
