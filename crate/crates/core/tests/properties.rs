//! Property tests over the mathematical primitives and the bound dualities.

use proptest::prelude::*;

use tfqkd_core::bounds::{three, two};
use tfqkd_core::math::{
    binary_entropy, coherent_coefficient, plob_bound, poisson_weight,
};
use tfqkd_core::types::{GainTable, IntensitySet, Outcome};

proptest! {
    #[test]
    fn entropy_symmetric(x in 0.0..=1.0f64) {
        let h = binary_entropy(x).unwrap();
        let h_mirror = binary_entropy(1.0 - x).unwrap();
        prop_assert!((h - h_mirror).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&h));
    }

    #[test]
    fn plob_monotone(e1 in 0.0..0.99f64, e2 in 0.0..0.99f64) {
        prop_assume!(e1 < e2);
        prop_assert!(plob_bound(e1).unwrap() < plob_bound(e2).unwrap());
    }

    #[test]
    fn coherent_squares_to_poisson(alpha2 in 0.0..5.0f64, n in 0usize..30) {
        let c = coherent_coefficient(alpha2, n).unwrap();
        let p = poisson_weight(alpha2, n).unwrap();
        prop_assert!((c * c - p).abs() <= 1e-14 * p.max(1e-300));
    }

    #[test]
    fn bessel_even_and_bounded_below(x in -30.0..30.0f64) {
        let i0 = tfqkd_core::channel::bessel_i0(x);
        prop_assert!(i0 >= 1.0);
        prop_assert_eq!(i0, tfqkd_core::channel::bessel_i0(-x));
    }

    #[test]
    fn two_decoy_transpose_duality(
        mu0 in 0.05..1.0f64,
        ratio in 1e-4..0.2f64,
        q in proptest::collection::vec(0.0..=1.0f64, 4),
    ) {
        let mu1 = mu0 * ratio;
        let set = IntensitySet::descending(vec![mu0, mu1]).unwrap();
        let gains = GainTable::new(Outcome::ClickC, 2, q.clone()).unwrap();
        let gains_t = gains.transposed();
        let a = two::TwoDecoyInput::new(&set, gains).unwrap();
        let b = two::TwoDecoyInput::new(&set, gains_t).unwrap();
        prop_assert_eq!(two::bound_y20(&a), two::bound_y02(&b));
        prop_assert_eq!(two::bound_y02(&a), two::bound_y20(&b));
        prop_assert_eq!(two::bound_yn0(&a, 3).unwrap(), two::bound_y0m(&b, 3).unwrap());
    }

    #[test]
    fn three_decoy_transpose_duality(
        mu0 in 0.1..1.0f64,
        r1 in 0.05..0.3f64,
        r2 in 0.05..0.3f64,
        q in proptest::collection::vec(0.0..=1.0f64, 9),
    ) {
        let mu = vec![mu0, mu0 * r1, mu0 * r1 * r2];
        let set = IntensitySet::descending(mu).unwrap();
        let gains = GainTable::new(Outcome::ClickC, 3, q.clone()).unwrap();
        let gains_t = gains.transposed();
        let a = three::three_decoy_bounds(&three::ThreeDecoyInput::new(&set, gains).unwrap()).unwrap();
        let b = three::three_decoy_bounds(&three::ThreeDecoyInput::new(&set, gains_t).unwrap()).unwrap();
        prop_assert_eq!(a.upper_or_one(2, 0), b.upper_or_one(0, 2));
        prop_assert_eq!(a.upper_or_one(4, 0), b.upper_or_one(0, 4));
        prop_assert_eq!(a.upper_or_one(3, 1), b.upper_or_one(1, 3));
    }

    #[test]
    fn bounds_stay_in_unit_interval(
        mu0 in 0.05..1.0f64,
        ratio in 1e-3..0.2f64,
        q in proptest::collection::vec(0.0..=1.0f64, 4),
    ) {
        let set = IntensitySet::descending(vec![mu0, mu0 * ratio]).unwrap();
        let gains = GainTable::new(Outcome::ClickC, 2, q).unwrap();
        let input = two::TwoDecoyInput::new(&set, gains).unwrap();
        let b = two::two_decoy_bounds(&input).unwrap();
        for v in b.upper.values() {
            prop_assert!((0.0..=1.0).contains(v));
        }
        let l = b.lower_y22.unwrap();
        prop_assert!((0.0..=1.0).contains(&l));
        if let Some(&u22) = b.upper.get(&(2, 2)) {
            prop_assert!(l <= u22);
        }
    }
}
