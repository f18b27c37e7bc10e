use hyperex::quad::{adaptive, QuadSpec};
use hyperex::specfun::{bessel_j0, exp_integral_ei, principal_sqrt, scaled_e1, BranchedComplex, EULER_GAMMA};
use hyperex::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn e1_quadrature(x: f64) -> f64 {
    // E1(x) = ∫_0^1 e^{-x/t}/t dt
    let q = QuadSpec::default();
    adaptive(|t: f64| if t == 0.0 { 0.0 } else { (-x / t).exp() / t }, 0.0, 1.0, 1e-15, 1e-14, q.max_intervals)
        .unwrap()
        .value
}

#[test]
fn ei_at_minus_one_matches_quadrature() {
    let ei = exp_integral_ei(-1.0).unwrap();
    assert!((ei + e1_quadrature(1.0)).abs() < 1e-12);
    assert!((ei + 0.219_383_934_395_520_27).abs() < 1e-15);
}

#[test]
fn ei_regimes_are_continuous() {
    for x in [-1.0f64, 40.0] {
        let h = 1e-9 * x.abs();
        let lo = exp_integral_ei(x - h).unwrap();
        let hi = exp_integral_ei(x + h).unwrap();
        let slope = x.exp() / x;
        assert!(((hi - lo) / (2.0 * h) - slope).abs() < 1e-4 * slope.abs(), "x={x}");
    }
}

#[test]
fn ei_derivative_is_exp_over_x() {
    for x in [-30.0, -5.0, -1.5, -0.5, 0.3, 2.0, 10.0, 55.0] {
        let h = 1e-5 * f64::abs(x);
        let fd = (exp_integral_ei(x + h).unwrap() - exp_integral_ei(x - h).unwrap()) / (2.0 * h);
        let exact = f64::exp(x) / x;
        assert!((fd - exact).abs() < 1e-7 * exact.abs(), "x={x}: {fd} vs {exact}");
    }
}

#[test]
fn ei_small_argument_expansion() {
    let x = 1e-8f64;
    let expected = EULER_GAMMA + x.ln() + x;
    assert!((exp_integral_ei(x).unwrap() - expected).abs() < 1e-15);
}

#[test]
fn ei_guards() {
    assert!(matches!(exp_integral_ei(0.0), Err(Error::Domain(_))));
    assert!(matches!(exp_integral_ei(f64::NAN), Err(Error::Domain(_))));
    assert!(matches!(exp_integral_ei(701.0), Err(Error::Overflow(_))));
    assert_eq!(exp_integral_ei(f64::NEG_INFINITY).unwrap(), 0.0);
}

#[test]
fn scaled_e1_agrees_with_ei() {
    for x in [0.01, 0.7, 1.0, 3.0, 25.0] {
        let direct = -f64::exp(x) * exp_integral_ei(-x).unwrap();
        assert!((scaled_e1(x).unwrap() - direct).abs() < 1e-13 * direct);
    }
    assert!((scaled_e1(3.0).unwrap() - 3.0f64.exp() * e1_quadrature(3.0)).abs() < 1e-12);
}

#[test]
fn principal_sqrt_squares_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let z = BranchedComplex::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
        let w = principal_sqrt(z).unwrap();
        assert!(w.re >= 0.0);
        let back = w.square();
        assert!((back - z).abs() <= 1e-14 * z.abs().max(1.0));
    }
}

#[test]
fn principal_sqrt_branch_cut() {
    assert!(matches!(principal_sqrt(BranchedComplex::real(-4.0)), Err(Error::BranchCut { .. })));
    let above = principal_sqrt(BranchedComplex::new(-4.0, 1e-300)).unwrap();
    let below = principal_sqrt(BranchedComplex::new(-4.0, -1e-300)).unwrap();
    assert!((above.im - 2.0).abs() < 1e-15 && (below.im + 2.0).abs() < 1e-15);
    assert_eq!(principal_sqrt(BranchedComplex::real(9.0)).unwrap(), BranchedComplex::real(3.0));
}

#[test]
fn bessel_j0_zeros_and_integral() {
    for zero in [2.404_825_557_695_773, 5.520_078_110_286_311, 8.653_727_912_911_013] {
        assert!(bessel_j0(zero).abs() < 1e-14);
    }
    let q = QuadSpec::default();
    for x in [0.5, 3.0, 12.0, 40.0] {
        let integral =
            adaptive(|t: f64| f64::cos(x * f64::sin(t)), 0.0, std::f64::consts::PI, 1e-15, 1e-14, q.max_intervals)
                .unwrap()
                .value
                / std::f64::consts::PI;
        assert!((bessel_j0(x) - integral).abs() < 1e-13, "x={x}");
    }
}

proptest! {
    #[test]
    fn ei_is_decreasing_on_negative_axis(x in -60.0f64..-1.0, dx in 1e-3f64..0.99) {
        prop_assert!(exp_integral_ei(x + dx).unwrap() < exp_integral_ei(x).unwrap());
    }

    #[test]
    fn sqrt_recip_commutes(re in -20.0f64..20.0, im in 0.01f64..20.0) {
        let z = BranchedComplex::new(re, im);
        let a = principal_sqrt(z.recip()).unwrap();
        let b = principal_sqrt(z).unwrap().recip();
        prop_assert!((a - b).abs() < 1e-13 * a.abs());
    }
}
