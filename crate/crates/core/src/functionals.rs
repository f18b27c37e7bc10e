//! Sharp constants, the functionals `Q_{d,p}(a, s) = ‖T_s f_a‖_p / ‖f_a‖₂`
//! on the exponential family, two-sheet combiners and concentration
//! diagnostics.

use std::f64::consts::{PI, TAU};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extension::{conv_power_l2_sq, l2_norm_sq, lp_norm_extension_via_conv, ExpProfile};
use crate::geometry::HyperboloidParams;
use crate::measures::ConvClosedForm;
use crate::quad::{adaptive, Estimate, QuadSpec};
use crate::specfun::scaled_e1;

/// One sheet `ℍ^d_s` or the two-sheeted hyperboloid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SheetCount {
    One,
    Two,
}

impl fmt::Display for SheetCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SheetCount::One => "one",
            SheetCount::Two => "two",
        })
    }
}

/// The pairs `(d, p)` with known sharp constants.
pub const SUPPORTED_PAIRS: [(usize, u32); 3] = [(2, 4), (2, 6), (3, 4)];

fn check_pair(d: usize, p: u32) -> Result<()> {
    if SUPPORTED_PAIRS.contains(&(d, p)) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("no sharp constant is known for (d, p) = ({d}, {p})")))
    }
}

fn check_mass(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("mass s must be positive and finite, got {s}")))
    }
}

/// `H_{d,p,s}` or its two-sheet counterpart.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpConstant {
    pub d: usize,
    pub p: u32,
    pub s: f64,
    pub sheet: SheetCount,
    pub value: f64,
    /// Closed expression with `s` substituted, e.g. `(3/2)^(1/4)*2^(3/4)*pi*2^(-1/4)`.
    pub symbolic: String,
}

/// `H_{d,p}` at `s = 1` with its symbolic form.
fn unit_constant(d: usize, p: u32) -> (f64, &'static str) {
    match (d, p) {
        (2, 4) => (2f64.powf(0.75) * PI, "2^(3/4)*pi"),
        (2, 6) => (TAU.powf(5.0 / 6.0), "(2*pi)^(5/6)"),
        _ => (TAU.powf(1.25), "(2*pi)^(5/4)"),
    }
}

/// Scaling exponent `(d−1)/2 − (d+1)/p` of `H_{d,p,s} = s^e H_{d,p}`.
pub fn scaling_exponent(d: usize, p: u32) -> f64 {
    (d as f64 - 1.0) / 2.0 - (d as f64 + 1.0) / p as f64
}

/// Two-sheet factor: `(3/2)^{1/4}` for `p = 4`, `(5/2)^{1/3}` for `p = 6`.
pub fn two_sheet_factor(p: u32) -> (f64, &'static str) {
    if p == 4 {
        (1.5f64.powf(0.25), "(3/2)^(1/4)")
    } else {
        (2.5f64.cbrt(), "(5/2)^(1/3)")
    }
}

pub fn best_constant(d: usize, p: u32, s: f64, sheet: SheetCount) -> Result<SharpConstant> {
    check_pair(d, p)?;
    check_mass(s)?;
    let (h, sym) = unit_constant(d, p);
    let e = scaling_exponent(d, p);
    let mut value = h * s.powf(e);
    let mut symbolic = sym.to_string();
    if e != 0.0 && s != 1.0 {
        symbolic.push_str(&format!("*{s}^({})", fraction(e)));
    }
    if sheet == SheetCount::Two {
        let (f, fsym) = two_sheet_factor(p);
        value *= f;
        symbolic = format!("{fsym}*{symbolic}");
    }
    Ok(SharpConstant { d, p, s, sheet, value, symbolic })
}

fn fraction(x: f64) -> String {
    for den in 1..=12 {
        let num = x * den as f64;
        if (num - num.round()).abs() < 1e-12 {
            let num = num.round() as i64;
            return if den == 1 { num.to_string() } else { format!("{num}/{den}") };
        }
    }
    format!("{x}")
}

/// All six constants: the three one-sheet values, then the two-sheet ones.
pub fn constants_table(s: f64) -> Result<Vec<SharpConstant>> {
    let mut out = Vec::with_capacity(6);
    for sheet in [SheetCount::One, SheetCount::Two] {
        for (d, p) in SUPPORTED_PAIRS {
            out.push(best_constant(d, p, s, sheet)?);
        }
    }
    Ok(out)
}

/// The bound `(2π)^{(d+1)/p} ‖σ_s^{(∗p/2)}‖_∞^{1/p}` on `H_{d,p,s}`.
pub fn sup_norm_bound(d: usize, p: u32, s: f64) -> Result<f64> {
    check_pair(d, p)?;
    let form = ConvClosedForm::new(d, p as usize / 2, s)?;
    let pf = p as f64;
    Ok(TAU.powf((d as f64 + 1.0) / pf) * form.sup_norm().value.powf(1.0 / pf))
}

/// Best constant of `‖fσ ∗ ⋯ ∗ fσ‖₂^{1/k} ≤ C ‖f‖₂` at `s = 1`:
/// `π^{1/4}`, `(2π)^{1/3}`, `(2π)^{1/4}` for `(d, p) = (2,4), (2,6), (3,4)`.
pub fn convolution_form_constant(d: usize, p: u32) -> Result<f64> {
    check_pair(d, p)?;
    Ok(match (d, p) {
        (2, 4) => PI.powf(0.25),
        (2, 6) => TAU.cbrt(),
        _ => TAU.powf(0.25),
    })
}

/// `b ↦ 1 − b − b² e^b Ei(−b)`, strictly decreasing from 1 to 0.
pub fn decreasing_profile(b: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::Domain(format!("argument must be positive, got {b}")));
    }
    if b > 40.0 {
        // 1 − b + b² e^b E₁(b) = Σ_{k≥2} (−1)^k k!/b^{k−1}, summed to the smallest term.
        let mut term = 2.0 / b;
        let mut sum = term;
        for k in 3..200 {
            let next = -term * k as f64 / b;
            if next.abs() >= term.abs() {
                break;
            }
            term = next;
            sum += term;
            if term.abs() < f64::EPSILON * sum.abs() {
                break;
            }
        }
        return Ok(sum);
    }
    Ok(1.0 - b + b * b * scaled_e1(b)?)
}

/// `b ↦ −b e^b Ei(−b)`, strictly increasing from 0 to 1.
pub fn increasing_profile(b: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::Domain(format!("argument must be positive, got {b}")));
    }
    Ok(b * scaled_e1(b)?)
}

/// `Q_{d,p}(a, s)` in closed form:
/// `Q_{2,6}⁶ = (2π)⁵ (1 − 6as − 36a²s² e^{6as} Ei(−6as))`,
/// `Q_{2,4}⁴ = 8 (π⁴/s) (−4as e^{4as} Ei(−4as))`.
pub fn q_ratio_closed(d: usize, p: u32, a: f64, s: f64) -> Result<f64> {
    check_pair(d, p)?;
    check_mass(s)?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("profile rate a must be positive and finite, got {a}")));
    }
    match (d, p) {
        (2, 6) => Ok((TAU.powi(5) * decreasing_profile(6.0 * a * s)?).powf(1.0 / 6.0)),
        (2, 4) => Ok((8.0 * PI.powi(4) / s * increasing_profile(4.0 * a * s)?).powf(0.25)),
        _ => Err(Error::Unsupported("no closed form for Q at (d, p) = (3, 4); use the quadrature route".into())),
    }
}

/// `Q_{d,p}(a, s)` from the convolution route and the `L²(σ_s)` norm.
pub fn q_ratio_quadrature(d: usize, p: u32, a: f64, s: f64, quad: &QuadSpec) -> Result<Estimate> {
    check_pair(d, p)?;
    let profile = ExpProfile::new(a, HyperboloidParams::new(d, s)?)?;
    let num = lp_norm_extension_via_conv(&profile, p, quad)?;
    let den = l2_norm_sq(&profile)?.sqrt();
    Ok(Estimate { value: num.value / den, error: num.error / den + 1e-13 * num.value / den })
}

/// How a functional value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Closed,
    Quadrature,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Closed => "closed",
            Method::Quadrature => "quadrature",
        })
    }
}

/// `Q_{d,p}(a, s)` at one `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalCurvePoint {
    pub a: f64,
    pub q_value: f64,
    pub error: f64,
    pub method: Method,
}

pub fn q_point(d: usize, p: u32, a: f64, s: f64, method: Method, quad: &QuadSpec) -> Result<FunctionalCurvePoint> {
    let (q_value, error) = match method {
        Method::Closed => {
            let q = q_ratio_closed(d, p, a, s)?;
            (q, 1e-13 * q)
        }
        Method::Quadrature => {
            let e = q_ratio_quadrature(d, p, a, s, quad)?;
            (e.value, e.error)
        }
    };
    Ok(FunctionalCurvePoint { a, q_value, error, method })
}

/// Direction in which `a ↦ Q_{d,p}(a, s)` moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Increasing,
    Decreasing,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trend::Increasing => "increasing",
            Trend::Decreasing => "decreasing",
        })
    }
}

/// Proven monotonicity of `Q_{d,p}` in `a`; unknown for `(3, 4)`.
pub fn expected_trend(d: usize, p: u32) -> Option<Trend> {
    match (d, p) {
        (2, 6) => Some(Trend::Decreasing),
        (2, 4) => Some(Trend::Increasing),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityScan {
    pub points: Vec<FunctionalCurvePoint>,
    /// Direction checked: the proven one, or the one of the first step if none is known.
    pub trend: Trend,
    pub strict: bool,
}

/// Evaluates `Q` over `a_grid` (in parallel, output in grid order) and checks
/// strict monotonicity in the expected direction.
pub fn monotonicity_scan(
    d: usize,
    p: u32,
    s: f64,
    a_grid: &[f64],
    method: Method,
    quad: &QuadSpec,
) -> Result<MonotonicityScan> {
    check_pair(d, p)?;
    if a_grid.len() < 2 {
        return Err(Error::Domain("monotonicity scan needs at least two grid points".into()));
    }
    if a_grid.windows(2).any(|w| !(w[0] < w[1])) || !(a_grid[0] > 0.0) {
        return Err(Error::Domain("grid must be positive and strictly increasing".into()));
    }
    let points = a_grid.par_iter().map(|&a| q_point(d, p, a, s, method, quad)).collect::<Result<Vec<_>>>()?;
    let trend = expected_trend(d, p).unwrap_or(if points[1].q_value >= points[0].q_value {
        Trend::Increasing
    } else {
        Trend::Decreasing
    });
    let strict = points.windows(2).all(|w| match trend {
        Trend::Increasing => w[1].q_value > w[0].q_value,
        Trend::Decreasing => w[1].q_value < w[0].q_value,
    });
    Ok(MonotonicityScan { points, trend, strict })
}

/// Log-spaced grid of `points` values on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (l, h) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == points {
                hi
            } else {
                (l + (h - l) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    (0..points).map(|i| if i + 1 == points { hi } else { lo + (hi - lo) * i as f64 / (points - 1) as f64 }).collect()
}

/// Relative discrepancy in `Q_{d,p}(a, s) = s^{(d−1)/2−(d+1)/p} Q_{d,p}(as, 1)`.
///
/// Closed forms are used for `d = 2`, quadrature for `(3, 4)`.
pub fn scaling_check(d: usize, p: u32, s: f64, profile_rate: f64, quad: &QuadSpec) -> Result<f64> {
    check_pair(d, p)?;
    let method = if d == 2 { Method::Closed } else { Method::Quadrature };
    let lhs = q_point(d, p, profile_rate, s, method, quad)?.q_value;
    let rhs = s.powf(scaling_exponent(d, p)) * q_point(d, p, profile_rate * s, 1.0, method, quad)?.q_value;
    Ok((lhs - rhs).abs() / rhs.abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinerReport {
    pub samples: usize,
    /// Pairs with `X² + Y² + 4XY > (3/2)(X+Y)²` beyond rounding.
    pub violations: usize,
    /// Pairs where the equality test disagrees with `X = Y`.
    pub equality_mismatches: usize,
    /// `(3/2)^{1/4}`.
    pub factor_p4: f64,
    /// `(5/2)^{1/3}`.
    pub factor_p6: f64,
    /// `|(25/4)^{1/6} − (5/2)^{1/3}|`.
    pub factor_gap: f64,
}

/// Samples `X, Y ≥ 0` and checks `X² + Y² + 4XY ≤ (3/2)(X+Y)²`, with
/// equality exactly on the diagonal. Every fourth sample is put on the
/// diagonal to exercise the equality case.
pub fn two_sheeted_combiner_check(samples: usize, seed: u64) -> CombinerReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut equality_mismatches = 0;
    for i in 0..samples {
        let x = 10f64.powf(rng.gen_range(-6.0..6.0));
        let y = if i % 4 == 0 { x } else { 10f64.powf(rng.gen_range(-6.0..6.0)) };
        let lhs = x * x + y * y + 4.0 * x * y;
        let rhs = 1.5 * (x + y) * (x + y);
        let tol = 8.0 * f64::EPSILON * rhs;
        if lhs > rhs + tol {
            violations += 1;
        }
        let equal = (rhs - lhs).abs() <= tol;
        if equal != ((x - y).abs() <= 1e-7 * (x + y)) {
            equality_mismatches += 1;
        }
    }
    let factor_p4 = two_sheet_factor(4).0;
    let factor_p6 = two_sheet_factor(6).0;
    CombinerReport {
        samples,
        violations,
        equality_mismatches,
        factor_p4,
        factor_p6,
        factor_gap: (6.25f64.powf(1.0 / 6.0) - factor_p6).abs(),
    }
}

/// `‖f_a‖²_{L²(B(0,R))} / ‖f_a‖²_{L²(σ_s)}`.
///
/// Closed form `1 − e^{−2a(ψ_s(R) − s)}` for d = 2; for d = 3 the ratio of
/// `∫_s^{ψ_s(R)} e^{−2au} √(u²−s²) du` to the full integral, by quadrature.
pub fn mass_fraction(d: usize, s: f64, a: f64, radius: f64) -> Result<f64> {
    let params = HyperboloidParams::new(d, s)?;
    if !(a > 0.0) || !(radius >= 0.0) {
        return Err(Error::Domain(format!("need a > 0 and R >= 0, got a = {a}, R = {radius}")));
    }
    let lift = radius * radius / (params.psi(radius) + s);
    if d == 2 {
        return Ok(-(-2.0 * a * lift).exp_m1());
    }
    // u = s + q², relative to e^{−2as}.
    let f = |q: f64| 2.0 * q * q * (q * q + 2.0 * s).sqrt() * (-2.0 * a * q * q).exp();
    let q_r = lift.sqrt();
    let q_max = (40.0 / a).sqrt().max(q_r);
    let inside = adaptive(f, 0.0, q_r, 1e-300, 1e-12, 4000)?.value;
    let outside = adaptive(f, q_r, q_max, 1e-300, 1e-12, 4000)?.value;
    Ok(inside / (inside + outside))
}

/// `mass_fraction` for d = 2 by quadrature of `∫_0^R e^{−2aψ} r dr/ψ` over the
/// full radial integral, independent of the closed antiderivative.
pub fn mass_fraction_quadrature(s: f64, a: f64, radius: f64) -> Result<f64> {
    let f = |r: f64| {
        let psi = s.hypot(r);
        (-2.0 * a * (psi - s)).exp() * r / psi
    };
    let inside = adaptive(f, 0.0, radius, 1e-300, 1e-12, 4000)?.value;
    let total = inside + adaptive(f, radius, radius + 1.0 + 60.0 / a, 1e-300, 1e-12, 4000)?.value;
    Ok(inside / total)
}

/// A finite-`a` probe of a limit together with a first-order Richardson
/// extrapolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitProbe {
    pub a: f64,
    pub value: f64,
    pub error: f64,
    /// `2Q(a/2) − Q(a)` for small-`a` limits, `2Q(2a) − Q(a)` for large-`a` ones.
    pub extrapolated: f64,
    /// The constant the probe approaches.
    pub limit: f64,
}

/// Probes `Q_{d,p}(a, s) → H_{d,p,s}`: `a → 0⁺` for `(2,6)` and `(3,4)`,
/// `a → ∞` for `(2,4)`.
pub fn limit_probe(d: usize, p: u32, a: f64, s: f64, method: Method, quad: &QuadSpec) -> Result<LimitProbe> {
    let limit = best_constant(d, p, s, SheetCount::One)?.value;
    let here = q_point(d, p, a, s, method, quad)?;
    let partner_a = if (d, p) == (2, 4) { 2.0 * a } else { 0.5 * a };
    let partner = q_point(d, p, partner_a, s, method, quad)?;
    Ok(LimitProbe {
        a,
        value: here.q_value,
        error: here.error,
        extrapolated: 2.0 * partner.q_value - here.q_value,
        limit,
    })
}

/// Both sides of `‖(f_aσ_s)^{(∗n)}‖₂ ≤ ‖σ_s^{(∗n)}‖_∞^{1/2} ‖f_a‖₂ⁿ`.
pub fn convolution_bound(d: usize, n: usize, a: f64, s: f64, quad: &QuadSpec) -> Result<(Estimate, f64)> {
    let form = ConvClosedForm::new(d, n, s)?;
    let profile = ExpProfile::new(a, HyperboloidParams::new(d, s)?)?;
    let sq = conv_power_l2_sq(&profile, n, quad)?;
    let lhs = Estimate { value: sq.value.sqrt(), error: 0.5 * sq.error / sq.value.sqrt() };
    let rhs = form.sup_norm().value.sqrt() * l2_norm_sq(&profile)?.powf(n as f64 / 2.0);
    Ok((lhs, rhs))
}
