mod common;

use common::{manufactured, transport_harness};
use emduality::eom::{equivariance_check, residuals, transport_config, ChartMap};
use emduality::symplectic::SymplecticMatrix;
use emduality::RMat;

#[test]
fn residuals_are_equivariant() {
    let (gap, sd, assembly) = transport_harness(5, 2024);
    assert!(gap <= 1e-9, "{gap:e}");
    assert!(sd <= 1e-10, "{sd:e}");
    assert!(assembly <= 1e-9, "{assembly:e}");
}

#[test]
fn trivial_pair_changes_nothing() {
    let cfg = manufactured("t3", 1, 7);
    let eq = equivariance_check(&ChartMap::Identity, &SymplecticMatrix::identity(2), &cfg).unwrap();
    assert_eq!(eq.max_gap(), 0.0);
}

/// `τ ↦ τ + 1` with `A = [[1, 0], [1, 1]]` is a duality of `N = τ`, so the
/// transported configuration is a configuration of the same theory.
#[test]
fn uduality_pair_keeps_the_theory() {
    let cfg = manufactured("identity-tau", 0, 7);
    let f = ChartMap::parse("translate:1").unwrap();
    let a = SymplecticMatrix::new(RMat::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 1.0])).unwrap();
    let moved = transport_config(&f, &a, &cfg).unwrap();
    let same = moved.with_theory(cfg.theory.clone());
    let before = residuals(&cfg).unwrap();
    let after = residuals(&same).unwrap();
    for k in 0..before.nodes.len() {
        assert!((after.einstein[k] - before.einstein[k]).amax() <= 1e-9);
    }
    assert!((after.scalar_max - before.scalar_max).abs() <= 1e-9);
}

/// A Möbius map with `b ≠ 0` is nonlinear in the chart, so differencing the
/// transported scalars differs from transporting the differenced scalars by
/// `O(h²)`.  The gap must shrink by about 4 per halving.
#[test]
fn nonlinear_isometry_gap_is_discretization() {
    use emduality::eom::{FieldConfiguration, GridPatch, Theory};
    use emduality::field::{eta, M4};
    use emduality::model::builtin;
    let f = ChartMap::parse("mobius:0.9,0.3,-0.2,1.044444444444444").unwrap();
    let a = SymplecticMatrix::new(RMat::from_row_slice(4, 4, &[
        1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.3, 0.1, 1.0, 0.0, 0.1, -0.2, 0.0, 1.0,
    ]))
    .unwrap();
    let gaps: Vec<f64> = [0.08, 0.04, 0.02]
        .iter()
        .map(|&h| {
            let cfg = FieldConfiguration::from_fn(
                GridPatch::centered([0.0; 4], h, 7).unwrap(),
                Theory::new(builtin("axio-dilaton").unwrap()),
                |x| {
                    let mut g = eta();
                    g[(1, 1)] += 0.1 * x[0].sin();
                    g
                },
                |x| vec![0.2 + 0.3 * x[0].sin(), 1.2 + 0.2 * x[1].cos() + 0.1 * x[3]],
                |x| {
                    let mut m = M4::zeros();
                    m[(0, 1)] = 0.3 + 0.1 * x[2].cos();
                    m[(1, 0)] = -m[(0, 1)];
                    vec![m, m * 0.5]
                },
            )
            .unwrap();
            equivariance_check(&f, &a, &cfg).unwrap().max_gap()
        })
        .collect();
    for w in gaps.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..=4.5).contains(&ratio), "{gaps:?}");
    }
}
