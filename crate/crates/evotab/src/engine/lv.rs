//! The linear-replicator / Lotka-Volterra correspondence.
//!
//! Adding a constant to a column of the payoff matrix does not change the
//! linear replicator dynamics, so any `m x m` payoff matrix can be reduced
//! to an equivalent system whose last row is zero. The reduced
//! `(m-1) x (m-1)` system is a Lotka-Volterra equation whose fixed point
//! solves a plain linear system, giving a direct (non-iterative) route to
//! the rest point when the solution is interior.

use crate::engine::{bc_residual, RestPoint, SolveMethod};
use crate::matrix::Matrix;

/// Map a payoff matrix to its Lotka-Volterra normal form:
/// `b_j = a[j][m-1] - a[m-1][m-1]` and
/// `a'[j][l] = a[j][l] - a[m-1][l]` for the leading `(m-1)` indices.
pub fn lv_map(a: &Matrix) -> (Matrix, Vec<f64>) {
    let m = a.rows();
    assert_eq!(m, a.cols(), "lv_map requires a square matrix");
    assert!(m >= 2, "lv_map requires at least two genes");
    let last = m - 1;
    let mut reduced = Matrix::zeros(last, last);
    let mut b = vec![0.0; last];
    for j in 0..last {
        b[j] = a.get(j, last) - a.get(last, last);
        for l in 0..last {
            reduced.set(j, l, a.get(j, l) - a.get(last, l));
        }
    }
    (reduced, b)
}

/// Result of the direct Lotka-Volterra solve.
#[derive(Debug, Clone, PartialEq)]
pub enum LvOutcome {
    /// Valid interior fixed point on the simplex.
    Interior(Vec<f64>),
    /// The reduced system is singular; carries its numerical rank.
    Singular { rank: usize },
    /// The linear solution exists but leaves the (interior of the) simplex.
    Exterior,
}

impl LvOutcome {
    pub fn interior(&self) -> Option<&[f64]> {
        match self {
            LvOutcome::Interior(gamma) => Some(gamma),
            _ => None,
        }
    }
}

/// [`lv_fixed_point`] packaged as a certified rest point of the linear
/// replicator with payoff matrix `a` (method `lv_linear`). `None` when the
/// system is singular or its solution leaves the simplex interior.
pub fn lv_rest_point(a: &Matrix) -> Option<RestPoint> {
    let LvOutcome::Interior(gamma) = lv_fixed_point(a) else {
        return None;
    };
    let delta = a.mat_vec(&gamma);
    Some(RestPoint {
        bc_residual: bc_residual(&gamma, &delta),
        gamma,
        iterations: 0,
        converged: true,
        method: SolveMethod::LvLinear,
        tail: None,
    })
}

/// Solve `A' y = -b`, set `y_m = 1` and renormalize onto the simplex.
/// Returns [`LvOutcome::Exterior`] when any `y` component is nonpositive and
/// [`LvOutcome::Singular`] when the reduced system has no unique solution.
pub fn lv_fixed_point(a: &Matrix) -> LvOutcome {
    let (reduced, b) = lv_map(a);
    let rhs: Vec<f64> = b.iter().map(|x| -x).collect();
    let Some(mut y) = reduced.solve(&rhs) else {
        return LvOutcome::Singular {
            rank: reduced.rank(),
        };
    };
    y.push(1.0);
    if y.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
        return LvOutcome::Exterior;
    }
    let total: f64 = y.iter().sum();
    LvOutcome::Interior(y.into_iter().map(|v| v / total).collect())
}
