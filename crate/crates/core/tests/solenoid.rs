use num_rational::BigRational;
use pisot_core::algebraic::homoclinic_profile;
use pisot_core::solenoid::{enumerate_y, eval_a, in_u, kernel_window_test, theta, theta_exact};
use pisot_core::{BuiltinMask, FieldElement, LatticeCylinder, NumberField, UNeighborhood};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn golden() -> NumberField {
    NumberField::new(&[-1, -1]).unwrap()
}

#[test]
fn solenoidal_representation_all_builtins() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for b in BuiltinMask::all() {
        let m = b.build().unwrap();
        let (lo, hi) = m.exponent_range();
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let y: f64 = rng.random_range(-100.0..100.0);
            let g = theta(m.field(), y, lo, hi).unwrap();
            worst = worst.max((eval_a(&m, &g).unwrap() - m.eval_symbol(y).value).norm());
        }
        assert!(worst < 1e-10, "{b}: {worst}");
    }
}

#[test]
fn density_converges() {
    let f = golden();
    let u = UNeighborhood::uniform(&f, 0, 0.1).unwrap();
    let mut errs = Vec::new();
    for l in [1e3, 1e4, 1e5] {
        let cyl = LatticeCylinder::new(&f, l, u.clone()).unwrap();
        let y = enumerate_y(&f, &cyl).unwrap();
        assert_eq!(y.duplicates, 0);
        errs.push((y.density(l) - cyl.gamma()).abs() / cyl.gamma());
    }
    assert!(errs[1] < 0.1 && errs[2] < 0.1, "{errs:?}");
    assert!(errs[0] > errs[2], "{errs:?}");
}

#[test]
fn enumeration_round_trip_and_sigma_invariance() {
    for (c, m, e, l) in [(vec![-1, -1], 0, 0.1, 2000.0), (vec![-1, -1, 0], 0, 0.4, 300.0), (vec![-2, -2], 1, 0.2, 500.0)] {
        let f = NumberField::new(&c).unwrap();
        let u = UNeighborhood::uniform(&f, m, e).unwrap();
        let cyl = LatticeCylinder::new(&f, l, u.clone()).unwrap();
        let ys = enumerate_y(&f, &cyl).unwrap();
        assert!(!ys.points.is_empty());
        for &y in &ys.points {
            let w = in_u(&f, y, &u).unwrap().unwrap_or_else(|| panic!("{c:?}: {y} not in U"));
            assert!((f.embed(&w.lambda) - y).abs() < 1e-6 * y.abs().max(1.0));
            let ay = f.alpha() * y;
            if ay.abs() < l {
                assert!(in_u(&f, ay, &u).unwrap().is_some(), "{c:?}: alpha {y}");
            }
        }
    }
}

#[test]
fn homoclinic_points_and_others() {
    let f = golden();
    let lam = FieldElement::from_integers(&[3, -1]);
    let g = theta_exact(&f, &lam, -40, 60).unwrap();
    assert!(g.get(60).unwrap().min(1.0 - g.get(60).unwrap()) < 1e-10);
    assert!(g.get(-40).unwrap().min(1.0 - g.get(-40).unwrap()) < 1e-7);
    let p = homoclinic_profile(&f, &lam, 0, 120).unwrap();
    assert!(p.slope <= p.expected_slope + 0.05);
    // sqrt(2) is not in Q(alpha); its orbit stays spread out
    let g = theta(&f, 2f64.sqrt(), 0, 30).unwrap();
    let tail = g.iter().filter(|(j, _)| *j > 20).map(|(_, v)| v.min(1.0 - v)).fold(0.0, f64::max);
    assert!(tail > 0.05);
    // 1/2 fails the trace test
    let half = FieldElement::rational(2, BigRational::new(1.into(), 2.into()));
    let g = theta_exact(&f, &half, 0, 60).unwrap();
    let tail = g.iter().filter(|(j, _)| *j > 40).map(|(_, v)| v.min(1.0 - v)).fold(0.0, f64::max);
    assert!(tail > 0.1);
}

#[test]
fn kernel_membership() {
    let f = NumberField::new(&[-2, -2]).unwrap();
    let g = theta_exact(&f, &FieldElement::one(2), -6, 20).unwrap();
    assert!(!kernel_window_test(&f, &g).unwrap());
    let z = pisot_core::SolenoidWindow::zeros(-3, 3).unwrap();
    assert!(kernel_window_test(&f, &z).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_shift_compatibility(y in -50.0f64..50.0, k in 1i64..5) {
        let f = golden();
        let a = f.alpha();
        let g = theta(&f, y, -5, 20).unwrap();
        let h = theta(&f, y * a.powi(k as i32), -5, 20).unwrap();
        let s = g.shift(k).unwrap();
        for (j, v) in s.iter() {
            let d = (v - h.get(j).unwrap()).abs();
            prop_assert!(d.min(1.0 - d) < 1e-8);
        }
    }

    #[test]
    fn witnesses_are_exact(n1 in -500i64..500, n2 in -500i64..500) {
        let f = golden();
        let u = UNeighborhood::uniform(&f, 0, 0.3).unwrap();
        let lam = FieldElement::from_integers(&[n1, n2]);
        let y = f.embed(&lam);
        let sig = f.conjugates(&lam)[1].re;
        let w = in_u(&f, y, &u).unwrap();
        if sig.abs() < 0.29 {
            let w = w.unwrap();
            prop_assert_eq!(w.lambda, lam);
        } else if sig.abs() > 0.31 {
            prop_assert!(w.is_none());
        }
    }
}
