//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on failure.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use hyperex::extension::{conv_power_l2_sq, extension_closed, extension_quadrature, ExpProfile};
use hyperex::functionals::{
    best_constant, constants_table, decreasing_profile, increasing_profile, log_grid, mass_fraction,
    mass_fraction_quadrature, monotonicity_scan, q_ratio_closed, q_ratio_quadrature, sup_norm_bound,
    two_sheeted_combiner_check, Method, SheetCount, SUPPORTED_PAIRS,
};
use hyperex::geometry::{normal_form, random_lorentz, HyperboloidParams, SpacetimePoint};
use hyperex::measures::{
    algebraic_inequality_violations, conv_pairing_oracle, conv_point_oracle, pair_with_closed, strictness_violations,
    sum_support_predicates, surface_integral, ConvClosedForm, MeasureSpec, SupportCase,
};
use hyperex::quad::{adaptive, QuadRule, QuadSpec};
use hyperex::specfun::exp_integral_ei;
use hyperex::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

type Criterion = fn() -> Result<Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn upper(d: usize, s: f64) -> MeasureSpec {
    MeasureSpec::upper(HyperboloidParams::new(d, s).unwrap())
}

fn c1_constants() -> Result<Outcome> {
    let expected = [
        2f64.powf(0.75) * PI,
        TAU.powf(5.0 / 6.0),
        TAU.powf(1.25),
        1.5f64.powf(0.25) * 2f64.powf(0.75) * PI,
        2.5f64.powf(1.0 / 3.0) * TAU.powf(5.0 / 6.0),
        1.5f64.powf(0.25) * TAU.powf(1.25),
    ];
    let table = constants_table(1.0)?;
    let worst = table.iter().zip(expected).map(|(row, e)| rel(row.value, e)).fold(0.0, f64::max);
    outcome(worst <= 1e-14, format!("max rel err {worst:.2e} (tol 1e-14)"))
}

fn c2_sup_norm_route() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (d, p) in SUPPORTED_PAIRS {
        let h = best_constant(d, p, 1.0, SheetCount::One)?.value;
        worst = worst.max(rel(sup_norm_bound(d, p, 1.0)?, h));
    }
    outcome(worst <= 1e-14, format!("max rel err {worst:.2e} (tol 1e-14)"))
}

fn c3_convolution_oracles() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for d in [2, 3] {
        let form = ConvClosedForm::new(d, 2, 1.0)?;
        let spec = upper(d, 1.0);
        for _ in 0..100 {
            let xi: Vec<f64> = (0..d).map(|_| rng.gen_range(-8.0..8.0)).collect();
            let r2: f64 = xi.iter().map(|x| x * x).sum();
            let excess = 4.0 * 10f64.powf(rng.gen_range(-4.0..3.0));
            let p = SpacetimePoint::new(xi, (4.0 + excess + r2).sqrt());
            let oracle = conv_point_oracle(&spec, 2, &p, &QuadSpec::default())?;
            worst = worst.max(rel(oracle.value, form.eval(&p)));
        }
    }
    let g = |r: f64, tau: f64| (-0.25 * r * r - 0.5 * (tau - 6.0).powi(2)).exp();
    let closed = pair_with_closed(&ConvClosedForm::new(2, 3, 1.0)?, g, &QuadSpec::default().with_radius(15.0))?;
    let quad = QuadSpec::default().with_rule(QuadRule::MonteCarlo).with_samples(1_000_000).with_seed(SEED);
    let mc = conv_pairing_oracle(&upper(2, 1.0), 3, g, &quad)?;
    let sigmas = (mc.value - closed.value).abs() / mc.error;
    outcome(
        worst <= 1e-6 && sigmas <= 3.0,
        format!(
            "point max rel err {worst:.2e} (tol 1e-6); MC pairing {:.6} vs {:.6}, {sigmas:.2} sigma (tol 3)",
            mc.value, closed.value
        ),
    )
}

fn c4_functional_limits() -> Result<Outcome> {
    let h = |d, p| best_constant(d, p, 1.0, SheetCount::One).map(|c| c.value);
    let r26 = q_ratio_closed(2, 6, 1e-3, 1.0)? / h(2, 6)?;
    let r24 = q_ratio_closed(2, 4, 1e2, 1.0)? / h(2, 4)?;
    let r34 = q_ratio_quadrature(3, 4, 1e-2, 1.0, &QuadSpec::default())?.value / h(3, 4)?;
    let pass = (0.997..1.0).contains(&r26) && (0.999..1.0).contains(&r24) && (0.95..1.0).contains(&r34);
    outcome(pass, format!("Q26/H={r26:.6} in [0.997,1); Q24/H={r24:.6} in [0.999,1); Q34/H={r34:.6} in [0.95,1)"))
}

fn c5_small_a_limit() -> Result<Outcome> {
    let a = 1e-3;
    let profile = ExpProfile::new(a, HyperboloidParams::new(3, 1.0)?)?;
    let norm = conv_power_l2_sq(&profile, 2, &QuadSpec::default())?;
    let scaled = a.powi(4) * norm.value;
    let target = 2.0 * PI.powi(3);
    let err = rel(scaled, target);
    outcome(err <= 0.01, format!("a^4 norm^2 = {scaled:.6} vs 2pi^3 = {target:.6}, rel {err:.2e} (tol 1e-2)"))
}

fn c6_extension_grid() -> Result<Outcome> {
    let profile = ExpProfile::new(1.0, HyperboloidParams::new(2, 1.0)?)?;
    let quad = QuadSpec::default();
    let mut worst: f64 = 0.0;
    for r in [0.0, 0.5, 1.0, 2.0, 4.0] {
        for t in [-3.0, -1.0, 0.0, 1.5, 4.0] {
            let x = [r, 0.0];
            let closed = extension_closed(&profile, &x, t)?;
            let numeric = extension_quadrature(&profile, &x, t, &quad)?;
            worst = worst.max((closed - numeric.value).abs());
        }
    }
    outcome(worst <= 1e-8, format!("max abs err {worst:.2e} on 5x5 grid (tol 1e-8)"))
}

fn c7_ei_gates() -> Result<Outcome> {
    let ei = exp_integral_ei(-1.0)?;
    let e1 = adaptive(|t: f64| if t == 0.0 { 0.0 } else { (-1.0 / t).exp() / t }, 0.0, 1.0, 1e-16, 1e-15, 4000)?;
    let vs_quad = (ei + e1.value).abs();
    let vs_ref = (ei + 0.219_383_934_395_52).abs();
    let grid = log_grid(1e-3, 1e2, 200);
    let dec = grid.iter().map(|&b| decreasing_profile(b)).collect::<Result<Vec<_>>>()?;
    let inc = grid.iter().map(|&b| increasing_profile(b)).collect::<Result<Vec<_>>>()?;
    let strict = dec.windows(2).all(|w| w[1] < w[0]) && inc.windows(2).all(|w| w[1] > w[0]);
    outcome(
        vs_quad <= 1e-12 && vs_ref <= 1e-12 && strict,
        format!("Ei(-1)={ei:.14}, |vs quadrature|={vs_quad:.1e}, |vs reference|={vs_ref:.1e} (tol 1e-12); 200-point scans strict: {strict}"),
    )
}

fn c8_lorentz() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut invariance: f64 = 0.0;
    let mut defect: f64 = 0.0;
    for trial in 0..20 {
        let d = if trial % 2 == 0 { 2 } else { 3 };
        let params = HyperboloidParams::new(d, 1.0)?;
        let quad = QuadSpec::default().with_radius(15.0).with_resolution(16, if d == 2 { 32 } else { 24 });
        let c: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let width = rng.gen_range(0.5..1.5);
        let tc = params.psi_vec(&c);
        let g = |xi: &[f64], tau: f64| {
            let dx: f64 = xi.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum();
            (-width * (dx + (tau - tc).powi(2))).exp()
        };
        let l = random_lorentz(&mut rng, d, 0.5);
        defect = defect.max(l.form_defect());
        let moved = |xi: &[f64], tau: f64| {
            let q = l.apply(&SpacetimePoint::new(xi.to_vec(), tau));
            g(&q.xi, q.tau)
        };
        let spec = MeasureSpec::upper(params);
        let a = surface_integral(&spec, g, 10.0, &quad)?;
        let b = surface_integral(&spec, moved, 10.0, &quad)?;
        invariance = invariance.max((a.value - b.value).abs());
    }
    let mut round_trip: f64 = 0.0;
    for d in [2, 3] {
        for _ in 0..100 {
            let xi: Vec<f64> = (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            let p = SpacetimePoint::new(xi, r + rng.gen_range(0.05..5.0));
            let (l, m) = normal_form(&p)?;
            defect = defect.max(l.form_defect());
            let back = l.inverse().apply(&SpacetimePoint::new(vec![0.0; d], m));
            let err = back.xi.iter().zip(&p.xi).map(|(a, b)| (a - b).abs()).fold((back.tau - p.tau).abs(), f64::max);
            round_trip = round_trip.max(err / p.tau);
        }
    }
    outcome(
        invariance <= 1e-6 && defect <= 1e-12 && round_trip <= 1e-10,
        format!("invariance {invariance:.1e} (tol 1e-6); form defect {defect:.1e} (tol 1e-12); round trip {round_trip:.1e} (tol 1e-10)"),
    )
}

fn c9_support_and_combiner() -> Result<Outcome> {
    let samples = 1_000_000;
    let mut support = 0;
    for d in [2, 3] {
        let params = HyperboloidParams::new(d, 1.0)?;
        for case in SupportCase::ALL {
            support += sum_support_predicates(&params, case, samples, SEED);
        }
    }
    let algebraic: usize = algebraic_inequality_violations(samples, SEED).iter().sum();
    let combiner = two_sheeted_combiner_check(samples, SEED);
    let bad = combiner.violations + combiner.equality_mismatches;
    outcome(
        support + algebraic + bad == 0,
        format!("support violations {support} (7 cases x d=2,3), scalar inequality violations {algebraic}, combiner violations {bad}; {samples} samples each"),
    )
}

fn c10_strictness() -> Result<Outcome> {
    let (checked23, v23) = strictness_violations(&ConvClosedForm::new(2, 3, 1.0)?, 200);
    let (checked32, v32) = strictness_violations(&ConvClosedForm::new(3, 2, 1.0)?, 200);
    let quad = QuadSpec::default();
    let mut tested = 0;
    let mut q_violations = 0;
    for (d, p) in SUPPORTED_PAIRS {
        let h = best_constant(d, p, 1.0, SheetCount::One)?.value;
        let (grid, method) = match (d, p) {
            (3, _) => (log_grid(1e-2, 1e1, 12), Method::Quadrature),
            _ => (log_grid(1e-3, 1e2, 60), Method::Closed),
        };
        for pt in monotonicity_scan(d, p, 1.0, &grid, method, &quad)?.points {
            tested += 1;
            if pt.q_value + pt.error >= h {
                q_violations += 1;
            }
        }
    }
    outcome(
        v23 + v32 + q_violations == 0,
        format!("conv(2,3) {v23}/{checked23}, conv(3,2) {v32}/{checked32} grid violations; Q >= H at {q_violations}/{tested} points"),
    )
}

fn c11_cauchy_schwarz_equality() -> Result<Outcome> {
    let a = 1.0;
    let profile = ExpProfile::new(a, HyperboloidParams::new(2, 1.0)?)?;
    let lhs = conv_power_l2_sq(&profile, 2, &QuadSpec::default())?;
    let form = ConvClosedForm::new(2, 2, 1.0)?;
    let g = move |r: f64, tau: f64| (-2.0 * a * tau).exp() * form.eval(&SpacetimePoint::new(vec![r, 0.0], tau));
    let rhs = conv_pairing_oracle(&upper(2, 1.0), 2, g, &QuadSpec::default().with_radius(30.0))?;
    let gap = (lhs.value - rhs.value).abs();
    let bar = lhs.error + rhs.error + 1e-12 * lhs.value;
    outcome(
        gap <= bar,
        format!("conv norm^2 = {:.12e}, pairing = {:.12e}, gap {gap:.1e} (error bar {bar:.1e})", lhs.value, rhs.value),
    )
}

fn c12_concentration() -> Result<Outcome> {
    let closed = mass_fraction(2, 1.0, 1e-3, 10.0)?;
    let numeric = mass_fraction_quadrature(1.0, 1e-3, 10.0)?;
    let near_vertex = mass_fraction(2, 1.0, 1e2, 1.0)?;
    let pass = (closed - 0.0179).abs() <= 5e-4 && (numeric - 0.0179).abs() <= 5e-4 && near_vertex >= 1.0 - 1e-3;
    outcome(
        pass,
        format!("mass(a=1e-3,R=10) closed {closed:.6}, quadrature {numeric:.6} (target 0.0179 +- 5e-4); mass(a=1e2,R=1) {near_vertex:.6} (>= 0.999)"),
    )
}

fn main() {
    let criteria: [(&str, Criterion); 12] = [
        ("constants table", c1_constants),
        ("sup-norm route to constants", c2_sup_norm_route),
        ("convolution oracles", c3_convolution_oracles),
        ("functional limits", c4_functional_limits),
        ("small-a limit of the d=3 convolution norm", c5_small_a_limit),
        ("extension closed form vs quadrature", c6_extension_grid),
        ("Ei quality gates", c7_ei_gates),
        ("Lorentz suite", c8_lorentz),
        ("support and combiner suites", c9_support_and_combiner),
        ("strictness", c10_strictness),
        ("Cauchy-Schwarz equality on exponential profiles", c11_cauchy_schwarz_equality),
        ("concentration", c12_concentration),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let ms = start.elapsed().as_millis();
        println!("criterion {:>2} {}: {name}: {detail} [{ms} ms]", i + 1, if pass { "PASS" } else { "FAIL" });
        if !pass {
            failures += 1;
        }
    }
    println!("acceptance: {}/12 passed", 12 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
