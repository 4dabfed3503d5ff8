//! End-to-end use of the public API on small spaces.

use fracint_core::geometry::{greedy_disjoint_cover, k_coefficient};
use fracint_core::harness::{generate_space, SpaceFamily, WeightScheme};
use fracint_core::maximal::{doubling_maximal, lp_norm, sharp_maximal};
use fracint_core::mspace::{check_metric, check_upper_doubling, from_coords};
use fracint_core::operators::{
    apply_fractional_integral, check_kernel_size, commutator, multilinear_commutator,
    standard_kernel,
};
use fracint_core::rbmo::rbmo_norm;
use fracint_core::{Ball, CanonicalFamily, DominatingSpec, Error, FieldFunction};
use proptest::prelude::*;

fn values(v: impl IntoIterator<Item = f64>) -> FieldFunction {
    FieldFunction::new(v.into_iter().collect()).unwrap()
}

#[test]
fn coordinates_to_operators() {
    let coords: Vec<Vec<f64>> = (0..12).map(|i| vec![f64::from(i).powf(1.3)]).collect();
    let weights = (0..12).map(|i| 1.0 + 0.1 * f64::from(i)).collect();
    let space = from_coords(&coords, weights, DominatingSpec::Power { c: 4.0, k: 1.0 }, None).unwrap();
    assert!(check_metric(&space, 3).pass);
    assert!(check_upper_doubling(&space).pass);

    let kernel = standard_kernel(&space, 0.3, 1.0).unwrap();
    assert!(check_kernel_size(&space, &kernel).pass);

    let f = values((0..12).map(|i| (f64::from(i) * 0.7).sin()));
    let g = values((0..12).map(|i| f64::from(i % 3)));
    let i_f = apply_fractional_integral(&space, &kernel, &f).unwrap();
    let i_g = apply_fractional_integral(&space, &kernel, &g).unwrap();
    let i_sum = apply_fractional_integral(&space, &kernel, &f.axpy(2.0, &g)).unwrap();
    assert!(i_sum.max_abs_diff(&i_f.axpy(2.0, &i_g)) < 1e-12);

    let c = FieldFunction::constant(12, 3.5);
    assert!(commutator(&space, &kernel, &c, &f).unwrap().max_abs() < 1e-12);
    let ml = multilinear_commutator(&space, &kernel, &[g.clone(), c], &f).unwrap();
    assert!(ml.max_abs() < 1e-12);

    let nf = doubling_maximal(&space, &f).unwrap();
    for x in 0..12 {
        assert!(f[x].abs() <= nf[x]);
    }
    let sharp = sharp_maximal(&space, &f, 0.0).unwrap();
    let shifted = sharp_maximal(&space, &f.shifted(10.0), 0.0).unwrap();
    assert!(sharp.max_abs_diff(&shifted) < 1e-9);
    assert!(lp_norm(&space, &nf, 2.0).unwrap() >= lp_norm(&space, &f, 2.0).unwrap() * (1.0 - 1e-12));
}

#[test]
fn family_cover_and_k() {
    let space = generate_space(&SpaceFamily::Grid2d { side: 4 }, &WeightScheme::Uniform).unwrap();
    let family = CanonicalFamily::build(&space).unwrap();
    assert!(!family.is_empty());
    let kept = greedy_disjoint_cover(&space, family.balls(), 5.0).unwrap();
    for (i, a) in kept.iter().enumerate() {
        for b in &kept[i + 1..] {
            assert!(a.is_disjoint_from(b));
        }
    }
    let inner = Ball::new(&space, 5, 1.0);
    let outer = Ball::new(&space, 5, 3.0);
    let k = k_coefficient(&space, &inner, &outer, 0.0).unwrap();
    assert!((1.0..=3.0).contains(&k));
    assert_eq!(
        k_coefficient(&space, &Ball::new(&space, 5, 0.0), &outer, 0.0),
        Err(Error::DegenerateBall)
    );
}

#[test]
fn malformed_input_is_rejected() {
    let lambda = DominatingSpec::Power { c: 2.0, k: 1.0 };
    assert_eq!(
        from_coords(&[], vec![], lambda.clone(), None).unwrap_err(),
        Error::EmptySpace
    );
    assert!(matches!(
        from_coords(&[vec![0.0], vec![1.0]], vec![1.0], lambda.clone(), None),
        Err(Error::DimensionMismatch { .. })
    ));
    assert!(matches!(
        from_coords(&[vec![0.0], vec![1.0]], vec![1.0, -1.0], lambda, None),
        Err(Error::NonpositiveWeight { index: 1, .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rbmo_norm_is_shift_invariant_and_homogeneous(
        vals in proptest::collection::vec(-5.0f64..5.0, 9),
        shift in -10.0f64..10.0,
    ) {
        let space = generate_space(&SpaceFamily::Grid2d { side: 3 }, &WeightScheme::Uniform).unwrap();
        let b = values(vals);
        let base = rbmo_norm(&space, &b, 6.0).unwrap().norm_value;
        let moved = rbmo_norm(&space, &b.shifted(shift), 6.0).unwrap().norm_value;
        let doubled = rbmo_norm(&space, &b.scaled(2.0), 6.0).unwrap().norm_value;
        prop_assert!((base - moved).abs() <= 1e-9 * (1.0 + base));
        prop_assert!((doubled - 2.0 * base).abs() <= 1e-12 * (1.0 + base));
    }
}
