mod common;

use common::{ads_ricci_errors, spinor_stats};

#[test]
fn ads_metric_is_einstein() {
    let e = ads_ricci_errors(1.0, &[0.1, 0.05, 0.025]);
    for w in e.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.8..=2.2).contains(&order), "{e:?}");
    }
}

#[test]
fn killing_spinors() {
    let s = spinor_stats(1.0);
    assert!(s.minkowski_residual <= 1e-14, "{s:?}");
    assert!((1.8..=2.2).contains(&s.order), "{s:?}");
    assert!(s.path_defect[1] < s.path_defect[0], "{s:?}");
    assert!(s.wrong_lambda_residual > 100.0 * s.residual[0], "{s:?}");
    assert!(s.algebraic <= 1e-10, "{s:?}");
    assert!((0.5f64.sqrt()..=2.0f64.sqrt()).contains(&s.c_ratio), "{s:?}");
}
