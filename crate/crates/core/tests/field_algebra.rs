mod common;

use common::{random_block, random_metric, self_duality_stats, stress_invariance};
use emduality::field::{self, Metric};
use emduality::sampling::{random_taming, rng};
use proptest::prelude::*;

#[test]
fn twisted_self_duality_equivalence() {
    let s = self_duality_stats(500, 7);
    assert!(s.assembled <= 1e-10, "{s:?}");
    assert!(s.fixed_is_assembled <= 1e-10, "{s:?}");
    assert!(s.anti_min > 1e-3, "{s:?}");
    assert!(s.cvcn <= 1e-10, "{s:?}");
    assert!(s.star_squared <= 1e-12, "{s:?}");
    assert!(s.twisted_star_squared <= 1e-12, "{s:?}");
}

#[test]
fn stress_is_duality_invariant() {
    let (inv, forms) = stress_invariance(200, 9);
    assert!(inv <= 1e-10, "{inv:e}");
    assert!(forms <= 1e-10, "{forms:e}");
}

#[test]
fn minkowski_star_sign() {
    let g = Metric::minkowski();
    let mut w = field::M4::zeros();
    w[(0, 1)] = 1.0;
    w[(1, 0)] = -1.0;
    let s = field::hodge(&g, &w);
    assert_eq!(s[(2, 3)], -1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projections_are_idempotent(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let g = random_metric(&mut r);
        let j = random_taming(n, &mut r);
        let v = random_block(&mut r, 2 * n);
        let (p, m) = field::project_sd(&g, &j, &v).unwrap();
        let (pp, pm) = field::project_sd(&g, &j, &p).unwrap();
        let scale = v.max_abs();
        prop_assert!((pp - p.clone()).max_abs() <= 1e-12 * scale.max(1.0) * 10.0);
        prop_assert!(pm.max_abs() <= 1e-11 * scale.max(1.0));
        prop_assert!((p + m - v).max_abs() <= 1e-12 * scale.max(1.0));
    }
}
