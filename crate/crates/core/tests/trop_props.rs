mod common;

use common::{fan2, functional, int, trfn};
use proptest::prelude::*;
use tropfan_core::fan::{check_balanced, refine_by, validate};
use tropfan_core::lattice::LinearFunctional;
use tropfan_core::trop::{
    intersection_number, product_1d, product_2d, stable_intersect, Hypersurface, StableIntersection,
};
use tropfan_core::{Fan, TrFn};

/// A 2-dimensional fan in R^3 or R^4 with two functions and a linear functional on the same space.
fn instance() -> impl Strategy<Value = (Fan, TrFn, TrFn, LinearFunctional<tropfan_core::Int>)> {
    prop_oneof![Just(3usize), Just(4usize)]
        .prop_flat_map(|n| (fan2(n), trfn(n), trfn(n), functional(n, 3).prop_map(|l| LinearFunctional::from_i64s(&l))))
}

fn curve(f: &Fan, t: &TrFn) -> Fan {
    product_2d(t, f).expect("product").cycle
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_fans_are_valid_and_balanced((f, _, _, _) in instance()) {
        prop_assert!(validate(&f).is_empty());
        prop_assert!(check_balanced(&f).is_balanced());
    }

    #[test]
    fn shift_by_a_linear_function_changes_nothing((f, t1, t2, l) in instance()) {
        prop_assert_eq!(curve(&f, &t1).ray_weights(), curve(&f, &t1.shift(&l)).ray_weights());
        let plain = intersection_number(&[t1.clone(), t2.clone()], &f).unwrap();
        prop_assert_eq!(&plain, &intersection_number(&[t1.shift(&l), t2.clone()], &f).unwrap());
        prop_assert_eq!(&plain, &intersection_number(&[t1.clone(), t2.shift(&l)], &f).unwrap());
    }

    #[test]
    fn products_commute((f, t1, t2, _) in instance()) {
        prop_assert_eq!(
            intersection_number(&[t1.clone(), t2.clone()], &f).unwrap(),
            intersection_number(&[t2, t1], &f).unwrap()
        );
    }

    #[test]
    fn product_is_independent_of_the_representative((f, t, aux, _) in instance()) {
        let refined = refine_by(&f, &aux);
        prop_assert!(validate(&refined).is_empty());
        prop_assert!(check_balanced(&refined).is_balanced());
        prop_assert_eq!(curve(&f, &t).ray_weights(), curve(&refined, &t).ray_weights());
    }

    #[test]
    fn product_matches_stable_intersection((f, t, _, _) in instance(), seed in any::<u64>()) {
        let stable = match stable_intersect(&f, &Hypersurface::of(&t), seed).unwrap() {
            StableIntersection::Curve(c) => c,
            StableIntersection::Point(_) => panic!("a 2-dimensional fan meets a hypersurface in a curve"),
        };
        prop_assert_eq!(curve(&f, &t).ray_weights(), stable);
    }

    #[test]
    fn weights_are_nonnegative((f, t, s, _) in instance()) {
        let c = curve(&f, &t.normalize());
        prop_assert!(c.weights().iter().all(|w| *w > int(0)));
        prop_assert!(check_balanced(&c).is_balanced());
        if !c.is_empty() {
            prop_assert!(product_1d(&s.normalize(), &c).unwrap().weight >= int(0));
        }
    }
}
