use epspace::norm::norm_exhaustive;
use epspace::rational::ratio;
use epspace::{norm_bb, FinSet, SpaceConfig, SparseVector};
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;

fn vector() -> impl Strategy<Value = SparseVector> {
    proptest::collection::btree_map(1usize..=10, (-12i64..=12, 1i64..=6), 0..8).prop_map(|m| {
        SparseVector::from_pairs(m.into_iter().map(|(c, (n, d))| (c, ratio(n, d))))
    })
}

fn norm(x: &SparseVector) -> BigRational {
    norm_bb(x, &SpaceConfig::toy()).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn engines_agree(x in vector()) {
        let t = SpaceConfig::toy();
        prop_assert_eq!(norm_bb(&x, &t).unwrap().value, norm_exhaustive(&x, &t).unwrap().value);
    }

    #[test]
    fn suppression(x in vector(), keep in proptest::collection::btree_set(1usize..=10, 0..10)) {
        let set = FinSet::from_sorted(keep.into_iter().collect());
        prop_assert!(norm(&x.restrict(&set)) <= norm(&x));
    }

    #[test]
    fn shrinking_toward_zero(x in vector(), shrink in proptest::collection::vec(0i64..=4, 10)) {
        // y_i = t_i x_i with t_i ∈ [0, 1]: a convex combination of suppressions.
        let y = SparseVector::from_pairs(
            x.iter().map(|(c, v)| (c, v * ratio(shrink[c - 1], 4))),
        );
        prop_assert!(norm(&y) <= norm(&x));
    }

    #[test]
    fn homogeneous(x in vector(), n in -5i64..=5, d in 1i64..=4) {
        let c = ratio(n, d);
        prop_assert_eq!(norm(&x.scale(&c)), c.abs() * norm(&x));
    }

    #[test]
    fn triangle(x in vector(), y in vector()) {
        prop_assert!(norm(&x.add(&y)) <= norm(&x) + norm(&y));
    }

    #[test]
    fn between_sup_and_l1(x in vector()) {
        let v = norm(&x);
        prop_assert!(x.max_abs() <= v && v <= x.l1());
    }
}

#[test]
fn sign_changes_can_raise_the_norm() {
    // Only suppression unconditionality holds: the norming functionals are
    // positive, so e3 - e6 and e3/2 + e6 are not comparable.
    let x: SparseVector = "3:1,6:-1".parse().unwrap();
    let y: SparseVector = "3:1/2,6:1".parse().unwrap();
    assert_eq!(norm(&x), ratio(1, 1));
    assert_eq!(norm(&y), ratio(3, 2));
}
