use heatflow::evolve::solve;
use heatflow::heatkernel::{h_exact_h3, heat_kernel};
use heatflow::hgeom::{distance, poisson_power_angle, sphere_reduce_with, CosAngle, HPoint, Y_WINDOW};
use heatflow::massfn::{mass_high, mass_low, weight_norm, ComponentKind, InitialDatum};
use proptest::prelude::*;

fn unit(theta: f64, phi: f64) -> Vec<f64> {
    vec![theta.cos(), theta.sin() * phi.cos(), theta.sin() * phi.sin()]
}

fn two_heats(w1: f64, d1: f64, w2: f64, d2: f64) -> (InitialDatum, InitialDatum, InitialDatum) {
    let a = InitialDatum::displaced_heat(3, 1.0, d1).unwrap();
    let b = InitialDatum::displaced_heat(3, 0.5, d2).unwrap();
    let both = InitialDatum::new(3)
        .with(a.components[0].kind.clone(), w1)
        .unwrap()
        .with(b.components[0].kind.clone(), w2)
        .unwrap();
    (a, b, both)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distance_is_a_metric(
        r1 in 0.0f64..30.0, t1 in 0.0f64..3.14, p1 in 0.0f64..6.28,
        r2 in 0.0f64..30.0, t2 in 0.0f64..3.14, p2 in 0.0f64..6.28,
        r3 in 0.0f64..30.0, t3 in 0.0f64..3.14,
    ) {
        let a = HPoint::new(3, r1, unit(t1, p1)).unwrap();
        let b = HPoint::new(3, r2, unit(t2, p2)).unwrap();
        let c = HPoint::axial(3, r3, t3).unwrap();
        let ab = distance(&a, &b).unwrap();
        prop_assert!((ab - distance(&b, &a).unwrap()).abs() <= 1e-9 * (1.0 + ab));
        prop_assert!(ab <= distance(&a, &c).unwrap() + distance(&c, &b).unwrap() + 1e-9);
        prop_assert!(ab <= r1 + r2 + 1e-9 && ab >= (r1 - r2).abs() - 1e-9);
    }

    #[test]
    fn exact_kernel_positive_and_decreasing(t in 0.1f64..500.0, r in 0.0f64..300.0, dr in 0.01f64..5.0) {
        let a = h_exact_h3(t, r).unwrap();
        let b = h_exact_h3(t, r + dr).unwrap();
        prop_assert!(a.sign() > 0 && b.sign() > 0);
        prop_assert!(b.ln_abs() < a.ln_abs());
        prop_assert_eq!(heat_kernel(3, t, r).unwrap().ln_abs(), a.ln_abs());
    }

    #[test]
    fn poisson_power_averages_to_one(n in 2usize..5, s in 0.0f64..10.0) {
        let v: f64 = sphere_reduce_with(n, -Y_WINDOW - s, Y_WINDOW, 1e-12, |a| {
            Ok(poisson_power_angle(s, a, (n - 1) as f64).to_f64())
        }).unwrap();
        prop_assert!((v - 1.0).abs() < 1e-8);
    }

    #[test]
    fn masses_are_linear(
        w1 in -3.0f64..3.0, d1 in 0.0f64..4.0, w2 in -3.0f64..3.0, d2 in 0.0f64..4.0,
        p in 1.0f64..1.99, th in 0.0f64..3.14, r in 0.0f64..20.0,
    ) {
        let (a, b, both) = two_heats(w1, d1, w2, d2);
        let w = unit(th, 0.4);
        let lhs = mass_low(&both, p, &w).unwrap();
        let rhs = w1 * mass_low(&a, p, &w).unwrap() + w2 * mass_low(&b, p, &w).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
        let x = HPoint::axial(3, r, th).unwrap();
        let lhs = mass_high(&both, 2.0, &x).unwrap();
        let rhs = w1 * mass_high(&a, 2.0, &x).unwrap() + w2 * mass_high(&b, 2.0, &x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn mass_low_bounded_by_weight_norm(d in 0.0f64..4.0, p in 1.0f64..1.99, th in 0.0f64..3.14, ph in 0.0f64..6.28) {
        let u = InitialDatum::displaced_heat(3, 1.0, d).unwrap();
        let m = mass_low(&u, p, &unit(th, ph)).unwrap();
        prop_assert!(m.abs() <= weight_norm(&u, p).unwrap() * (1.0 + 1e-9));
    }

    #[test]
    fn radial_mass_is_direction_free(p in 1.0f64..2.0, th in 0.0f64..3.14, ph in 0.0f64..6.28) {
        let u = InitialDatum::radial_bump(3, 1.0).unwrap();
        let a = mass_low(&u, p, &[1.0, 0.0, 0.0]).unwrap();
        let b = mass_low(&u, p, &unit(th, ph)).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn solve_is_linear(
        w1 in -3.0f64..3.0, d1 in 0.0f64..4.0, w2 in -3.0f64..3.0, d2 in 0.0f64..4.0,
        t in 0.5f64..200.0, r in 0.0f64..100.0, th in 0.0f64..3.14,
    ) {
        let (a, b, both) = two_heats(w1, d1, w2, d2);
        let ang = CosAngle::from_theta(th);
        let lhs = solve(&both, t, r, ang).unwrap().to_f64();
        let ua = solve(&a, t, r, ang).unwrap().to_f64();
        let ub = solve(&b, t, r, ang).unwrap().to_f64();
        let rhs = w1 * ua + w2 * ub;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (w1.abs() * ua + w2.abs() * ub) + f64::MIN_POSITIVE);
    }
}

#[test]
fn displaced_heat_kind_round_trips() {
    let u = InitialDatum::displaced_heat(3, 2.0, 1.5).unwrap();
    assert!(matches!(u.components[0].kind, ComponentKind::DisplacedHeat { s, .. } if s == 2.0));
}
