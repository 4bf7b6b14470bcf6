use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use pisot_core::algebraic::{homoclinic_profile, pisot_set_test, trace_power_sequence};
use pisot_core::{dist_to_int, Error, FieldElement, LaurentTranslate, NumberField, PvStatus};
use proptest::prelude::*;

const PV_FIELDS: [&[i64]; 6] = [&[-1, -1], &[-1, -1, 0], &[-2, -2], &[-1, -3], &[-1, 0, 0, -1], &[-1, -1, -1]];

fn field(i: usize) -> NumberField {
    NumberField::new(PV_FIELDS[i % PV_FIELDS.len()]).unwrap()
}

#[test]
fn certification_table() {
    let status = |c: &[i64]| NumberField::new(c).map(|f| f.pv_status());
    assert_eq!(status(&[-1, -1]).unwrap(), PvStatus::Pv);
    assert_eq!(status(&[-1, -1, 0]).unwrap(), PvStatus::Pv);
    assert_eq!(status(&[-2, 0]).unwrap(), PvStatus::NotPv);
    assert_eq!(status(&[-8, -2, -1]).unwrap(), PvStatus::NotPv);
    assert!(matches!(status(&[-1, 0]), Err(Error::Reducible { .. })));
    assert!(matches!(status(&[1, -2]), Err(Error::Reducible { .. }) | Err(Error::Degenerate)));
}

#[test]
fn lucas_numbers() {
    let f = field(0);
    let s = trace_power_sequence(&f, &FieldElement::one(2), 30).unwrap();
    let (mut a, mut b) = (2i64, 1i64);
    for v in &s {
        assert_eq!(*v, BigRational::from_integer(a.into()));
        (a, b) = (b, a + b);
    }
}

#[test]
fn triangle_inequality_sampled() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let x: f64 = rng.random_range(-1e6..1e6);
        let y: f64 = rng.random_range(-1e6..1e6);
        assert!(dist_to_int(x + y) <= dist_to_int(x) + dist_to_int(y) + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn traces_integral_and_match_conjugate_sums(fi in 0usize..6, coords in prop::collection::vec(-20i64..20, 4)) {
        let f = field(fi);
        let mu = FieldElement::from_integers(&coords[..f.degree()]);
        let s = trace_power_sequence(&f, &mu, 30).unwrap();
        let sig = f.conjugates(&mu);
        for (j, v) in s.iter().enumerate() {
            prop_assert!(v.is_integer());
            let float: Complex64 = sig.iter().zip(f.roots()).map(|(m, a)| m * a.powi(j as i32)).sum();
            let exact = v.to_f64().unwrap();
            prop_assert!((float.re - exact).abs() <= 1e-6 * exact.abs().max(1.0), "j = {}", j);
        }
    }

    #[test]
    fn triangle_inequality(x in -1e9f64..1e9, y in -1e9f64..1e9) {
        prop_assert!(dist_to_int(x + y) <= dist_to_int(x) + dist_to_int(y) + 1e-6);
    }

    #[test]
    fn matrices_intertwine(fi in 0usize..6) {
        let m = field(fi).matrices().unwrap();
        prop_assert!(m.intertwining_residual() < 1e-8);
        prop_assert!(m.dual_residual() < 1e-8);
        let disc = field(fi).discriminant().to_f64().unwrap().abs();
        prop_assert!((m.det_v().norm_sqr() - disc).abs() < 1e-8 * disc);
    }

    #[test]
    fn laurent_embedding_is_additive(
        fi in 0usize..6,
        a in prop::collection::btree_map(-6i64..6, -5i64..5, 0..4),
        b in prop::collection::btree_map(-6i64..6, -5i64..5, 0..4),
    ) {
        let f = field(fi);
        let t1 = LaurentTranslate::new(a);
        let t2 = LaurentTranslate::new(b);
        let (e1, x1) = f.laurent_embed(&t1);
        let (e2, x2) = f.laurent_embed(&t2);
        let (e12, x12) = f.laurent_embed(&t1.add(&t2));
        prop_assert_eq!(&e1 + &e2, e12);
        prop_assert!((x1 + x2 - x12).abs() < 1e-9 * (1.0 + x1.abs() + x2.abs()));
    }

    #[test]
    fn pisot_set_members_are_homoclinic(fi in 0usize..6, coords in prop::collection::vec(-9i64..9, 4), den in 1i64..4) {
        let f = field(fi);
        let d = f.degree();
        let mut mu = FieldElement::from_integers(&coords[..d]);
        prop_assume!(!mu.is_zero());
        mu = mu.scale(&BigRational::new(1.into(), den.into()));
        if pisot_set_test(&f, &mu).unwrap() {
            let p = homoclinic_profile(&f, &mu, 0, 200).unwrap();
            prop_assert_eq!(p.shift, 0);
            prop_assert!(p.bound_holds);
            prop_assert!(p.slope <= p.expected_slope + 0.05, "{} vs {}", p.slope, p.expected_slope);
        }
    }
}
