use std::f64::consts::PI;

use hyperex::geometry::{random_lorentz, HyperboloidParams, SpacetimePoint};
use hyperex::measures::{
    conv_pairing_oracle, conv_point_oracle, pair_with_closed, surface_integral, ConvClosedForm, MeasureSpec,
};
use hyperex::quad::{QuadRule, QuadSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn upper(d: usize, s: f64) -> MeasureSpec {
    MeasureSpec::upper(HyperboloidParams::new(d, s).unwrap())
}

#[test]
fn point_oracle_matches_closed_form_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for d in [2, 3] {
        let s = 1.3;
        let form = ConvClosedForm::new(d, 2, s).unwrap();
        let spec = upper(d, s);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let xi: Vec<f64> = (0..d).map(|_| rng.gen_range(-8.0..8.0)).collect();
            let r2: f64 = xi.iter().map(|x| x * x).sum();
            let excess = (2.0 * s).powi(2) * 10f64.powf(rng.gen_range(-4.0..3.0));
            let p = SpacetimePoint::new(xi, (4.0 * s * s + excess + r2).sqrt());
            let oracle = conv_point_oracle(&spec, 2, &p, &QuadSpec::default()).unwrap();
            let closed = form.eval(&p);
            worst = worst.max((oracle.value - closed).abs() / closed);
        }
        assert!(worst <= 1e-6, "d = {d}: worst relative error {worst:e}");
    }
}

#[test]
fn point_oracle_values_are_lorentz_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let spec = upper(2, 1.0);
    let p = SpacetimePoint::new(vec![0.4, 1.1], 4.0);
    let base = conv_point_oracle(&spec, 2, &p, &QuadSpec::default()).unwrap().value;
    for _ in 0..10 {
        let l = random_lorentz(&mut rng, 2, 0.6);
        let moved = conv_point_oracle(&spec, 2, &l.apply(&p), &QuadSpec::default()).unwrap().value;
        assert!((moved - base).abs() < 1e-9 * base);
    }
}

#[test]
fn tensor_pairing_matches_closed_form_through_gaussian_window() {
    for (d, tau0) in [(2usize, 5.0), (3, 5.0)] {
        let g = move |r: f64, tau: f64| (-0.25 * r * r - (tau - tau0).powi(2)).exp();
        let form = ConvClosedForm::new(d, 2, 1.0).unwrap();
        let quad = QuadSpec::default().with_radius(12.0).with_resolution(16, 24);
        let closed = pair_with_closed(&form, g, &QuadSpec::default().with_radius(12.0)).unwrap();
        let oracle = conv_pairing_oracle(&upper(d, 1.0), 2, g, &quad).unwrap();
        let rel = (oracle.value - closed.value).abs() / closed.value;
        assert!(rel < 1e-6, "d = {d}: {} vs {} (rel {rel:e})", oracle.value, closed.value);
    }
}

#[test]
fn monte_carlo_pairing_matches_triple_closed_form() {
    let g = |r: f64, tau: f64| (-0.25 * r * r - 0.5 * (tau - 6.0).powi(2)).exp();
    let form = ConvClosedForm::new(2, 3, 1.0).unwrap();
    let closed = pair_with_closed(&form, g, &QuadSpec::default().with_radius(15.0)).unwrap();
    let quad = QuadSpec::default().with_rule(QuadRule::MonteCarlo).with_samples(200_000).with_seed(5);
    let mc = conv_pairing_oracle(&upper(2, 1.0), 3, g, &quad).unwrap();
    assert!((mc.value - closed.value).abs() < 3.0 * mc.error, "{} ± {} vs {}", mc.value, mc.error, closed.value);
    assert!(mc.error < 0.05 * closed.value);
}

#[test]
fn monte_carlo_is_deterministic_per_seed() {
    let g = |r: f64, tau: f64| (-r * r - tau).exp();
    let quad = QuadSpec::default().with_samples(50_000).with_seed(11);
    let a = conv_pairing_oracle(&upper(3, 1.0), 3, g, &quad).unwrap();
    let b = conv_pairing_oracle(&upper(3, 1.0), 3, g, &quad).unwrap();
    assert_eq!(a, b);
    let c = conv_pairing_oracle(&upper(3, 1.0), 3, g, &quad.clone().with_seed(12)).unwrap();
    assert_ne!(a.value, c.value);
}

#[test]
fn monte_carlo_reproduces_product_of_norms() {
    // Pairing σ^{(∗3)} with e^{−2aτ} factorises into (π e^{−2as}/a)³ for d = 2.
    let a = 1.0f64;
    let expected = (PI * (-2.0 * a).exp() / a).powi(3);
    let quad = QuadSpec::default().with_samples(100_000).with_seed(3).with_importance_rate(1.0);
    let mc = conv_pairing_oracle(&upper(2, 1.0), 3, |_, tau| (-2.0 * a * tau).exp(), &quad).unwrap();
    assert!((mc.value - expected).abs() < 4.0 * mc.error, "{} ± {} vs {expected}", mc.value, mc.error);
    // With the matching importance rate every weight is identical.
    let exact = conv_pairing_oracle(
        &upper(2, 1.0),
        3,
        |_, tau| (-2.0 * a * tau).exp(),
        &quad.clone().with_importance_rate(2.0 * a),
    )
    .unwrap();
    assert!((exact.value - expected).abs() < 1e-12 * expected);
}

#[test]
fn monte_carlo_normaliser_in_three_dimensions() {
    // ∫ e^{−2aψ} dx/ψ over ℝ³ equals 4π ∫_s^∞ e^{−2au} √(u² − s²) du = 4π s K₁(2as)/(2a);
    // compare the n = 2 pairing with e^{−2aτ} against the tensor rule.
    let g = |_: f64, tau: f64| (-2.0 * tau).exp();
    let tensor = conv_pairing_oracle(&upper(3, 1.0), 2, g, &QuadSpec::default().with_radius(20.0)).unwrap();
    let mc = conv_pairing_oracle(
        &upper(3, 1.0),
        2,
        g,
        &QuadSpec::default().with_rule(QuadRule::MonteCarlo).with_samples(100_000).with_importance_rate(2.0),
    )
    .unwrap();
    assert!((mc.value - tensor.value).abs() < 1e-10 * tensor.value);
}

#[test]
fn surface_measure_is_lorentz_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for d in [2, 3] {
        let params = HyperboloidParams::new(d, 1.0).unwrap();
        let spec = MeasureSpec::upper(params);
        let quad = if d == 2 {
            QuadSpec::default().with_radius(15.0).with_resolution(16, 32)
        } else {
            QuadSpec::default().with_radius(15.0).with_resolution(16, 24)
        };
        for _ in 0..3 {
            let c: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let tc = params.psi_vec(&c);
            let g = |xi: &[f64], tau: f64| {
                let dx: f64 = xi.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum();
                (-dx - (tau - tc).powi(2)).exp()
            };
            let l = random_lorentz(&mut rng, d, 0.5);
            let moved = |xi: &[f64], tau: f64| {
                let q = l.apply(&SpacetimePoint::new(xi.to_vec(), tau));
                g(&q.xi, q.tau)
            };
            let a = surface_integral(&spec, g, 10.0, &quad).unwrap();
            let b = surface_integral(&spec, moved, 10.0, &quad).unwrap();
            assert!((a.value - b.value).abs() <= 1e-6, "d = {d}: {} vs {}", a.value, b.value);
        }
    }
}

#[test]
fn closed_pairing_of_exponential_window() {
    // ∫ e^{−2aτ} σ∗σ = ‖f_a‖⁴ = (π/a)² e^{−4as} for d = 2.
    let form = ConvClosedForm::new(2, 2, 1.0).unwrap();
    let est = pair_with_closed(&form, |_, tau| (-2.0 * tau).exp(), &QuadSpec::default().with_radius(30.0)).unwrap();
    let expected = (PI / 1.0).powi(2) * (-4.0f64).exp();
    assert!((est.value - expected).abs() < 1e-10 * expected);
}
