//! The measures `σ_s`, `σ̄_s`, closed forms of their convolution powers, and
//! numerical oracles that compute the same quantities along unrelated routes.
//!
//! All oracles remove the delta function by a change of variables before any
//! numerical step; nothing is mollified.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{normal_form, HyperboloidParams, LorentzMap, SpacetimePoint};
use crate::quad::{adaptive, gauss_legendre, pairwise_sum, Estimate, QuadRule, QuadSpec};

/// Which sheet(s) of the two-sheeted hyperboloid carry the measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    Plus,
    Minus,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSpec {
    pub params: HyperboloidParams,
    pub sheet: Sheet,
}

impl MeasureSpec {
    pub fn new(params: HyperboloidParams, sheet: Sheet) -> Self {
        MeasureSpec { params, sheet }
    }

    /// `σ_s` on the upper sheet.
    pub fn upper(params: HyperboloidParams) -> Self {
        MeasureSpec::new(params, Sheet::Plus)
    }
}

/// Relative width of the band around `τ² − |ξ|² = (ns)²` treated as boundary.
pub const BOUNDARY_TOL: f64 = 1e-8;

/// Location of a point relative to `𝒫_{d,n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Interior,
    Boundary,
    Outside,
}

/// Where the supremum of a convolution power is reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attainment {
    /// Attained on the boundary `τ = √((ns)² + |ξ|²)` and nowhere inside.
    SupportBoundary,
    /// Approached only as `τ² − |ξ|² → ∞`.
    Infinity,
}

impl fmt::Display for Attainment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Attainment::SupportBoundary => "support-boundary",
            Attainment::Infinity => "infinity",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupNorm {
    pub value: f64,
    pub attained: Attainment,
}

/// `σ_s^{(∗n)}` in closed form for `(d, n) ∈ {(2,2), (2,3), (3,2)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvClosedForm {
    d: usize,
    n: usize,
    s: f64,
}

impl ConvClosedForm {
    pub fn new(d: usize, n: usize, s: f64) -> Result<Self> {
        if !matches!((d, n), (2, 2) | (2, 3) | (3, 2)) {
            return Err(Error::Unsupported(format!("no closed form for the {n}-fold convolution in dimension {d}")));
        }
        HyperboloidParams::new(d, s)?;
        Ok(ConvClosedForm { d, n, s })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Value as a function of `τ² − |ξ|²` (for `τ > 0`).
    pub fn of_interval(&self, m2: f64) -> f64 {
        let ns = self.n as f64 * self.s;
        if !(m2 >= ns * ns) {
            return 0.0;
        }
        let m = m2.sqrt();
        match (self.d, self.n) {
            (2, 2) => TAU / m,
            (2, 3) => TAU * TAU * (1.0 - 3.0 * self.s / m),
            _ => TAU * ((m - 2.0 * self.s) * (m + 2.0 * self.s)).sqrt() / m,
        }
    }

    pub fn eval(&self, p: &SpacetimePoint) -> f64 {
        if p.tau < 0.0 {
            return 0.0;
        }
        self.of_interval(p.interval())
    }

    pub fn region(&self, p: &SpacetimePoint) -> Region {
        let ns = self.n as f64 * self.s;
        let excess = p.interval() - ns * ns;
        let tol = BOUNDARY_TOL * (1.0 + p.tau * p.tau);
        if p.tau < 0.0 || excess <= -tol {
            Region::Outside
        } else if excess < tol {
            Region::Boundary
        } else {
            Region::Interior
        }
    }

    pub fn sup_norm(&self) -> SupNorm {
        match (self.d, self.n) {
            (2, 2) => SupNorm { value: PI / self.s, attained: Attainment::SupportBoundary },
            (2, 3) => SupNorm { value: TAU * TAU, attained: Attainment::Infinity },
            _ => SupNorm { value: TAU, attained: Attainment::Infinity },
        }
    }
}

pub fn conv_closed(form: &ConvClosedForm, p: &SpacetimePoint) -> f64 {
    form.eval(p)
}

pub fn conv_sup_norm(form: &ConvClosedForm) -> SupNorm {
    form.sup_norm()
}

/// Counts interior grid points with `conv ≥ sup`.
///
/// The grid covers `|ξ| ∈ [0, 50]` and `τ² − |ξ|² − (ns)²` log-spaced over
/// `[10⁻⁶, 10⁸]·(ns)²`; boundary-band points are skipped.
pub fn strictness_violations(form: &ConvClosedForm, grid: usize) -> (usize, usize) {
    let ns2 = (form.n as f64 * form.s).powi(2);
    let mut checked = 0;
    let mut violations = 0;
    let sup = form.sup_norm().value;
    for i in 0..grid {
        let r = 50.0 * i as f64 / (grid - 1).max(1) as f64;
        for j in 0..grid {
            let e = ns2 * 10f64.powf(-6.0 + 14.0 * j as f64 / (grid - 1).max(1) as f64);
            let p = SpacetimePoint::new(
                std::iter::once(r).chain(std::iter::repeat(0.0)).take(form.d).collect(),
                (ns2 + e + r * r).sqrt(),
            );
            if form.region(&p) != Region::Interior {
                continue;
            }
            checked += 1;
            if form.eval(&p) >= sup {
                violations += 1;
            }
        }
    }
    (checked, violations)
}

fn sphere_area(d: usize) -> f64 {
    if d == 2 {
        TAU
    } else {
        2.0 * TAU
    }
}

/// Radial nodes `v` (with `r = s sinh v`, so that `dy/ψ_s = r^{d−1} dv dΩ`)
/// and weights of a composite Gauss–Legendre rule on `[0, asinh(R/s)]`.
fn radial_nodes(s: f64, radius: f64, nodes: usize, panels: usize) -> Vec<(f64, f64, f64)> {
    let rule = gauss_legendre(nodes);
    let vmax = (radius / s).asinh();
    let h = vmax / panels as f64;
    let mut out = Vec::with_capacity(nodes * panels);
    for k in 0..panels {
        let lo = h * k as f64;
        for (v, w) in rule.mapped(lo, lo + h) {
            out.push((s * v.sinh(), s * v.cosh(), w));
        }
    }
    out
}

/// Unit directions with weights summing to the sphere area.
fn sphere_nodes(d: usize, nodes: usize, panels: usize) -> Vec<([f64; 3], f64)> {
    let nphi = (2 * panels).max(8);
    let hphi = TAU / nphi as f64;
    if d == 2 {
        return (0..nphi)
            .map(|k| {
                let phi = hphi * k as f64;
                ([phi.cos(), phi.sin(), 0.0], hphi)
            })
            .collect();
    }
    let rule = gauss_legendre(nodes);
    let cpanels = (panels / 8).max(1);
    let hc = 2.0 / cpanels as f64;
    let mut out = Vec::new();
    for k in 0..cpanels {
        let lo = -1.0 + hc * k as f64;
        for (c, w) in rule.mapped(lo, lo + hc) {
            let sn = ((1.0 - c) * (1.0 + c)).sqrt();
            for j in 0..nphi {
                let phi = hphi * j as f64;
                out.push(([sn * phi.cos(), sn * phi.sin(), c], w * hphi));
            }
        }
    }
    out
}

fn sheet_integral<G>(params: &HyperboloidParams, sign: f64, g: &G, radius: f64, nodes: usize, panels: usize) -> f64
where
    G: Fn(&[f64], f64) -> f64 + Sync,
{
    let d = params.d();
    let radial = radial_nodes(params.s(), radius, nodes, panels);
    let sphere = sphere_nodes(d, nodes, panels);
    let parts: Vec<f64> = radial
        .par_iter()
        .map(|&(r, psi, w)| {
            let mut y = [0.0; 3];
            let shell: f64 = sphere
                .iter()
                .map(|(dir, wa)| {
                    for k in 0..d {
                        y[k] = r * dir[k];
                    }
                    g(&y[..d], sign * psi) * wa
                })
                .sum();
            shell * w * r.powi(d as i32 - 1)
        })
        .collect();
    pairwise_sum(&parts)
}

/// `∫ g dσ` over the selected sheet(s), by tensor quadrature in
/// `(v, angles)` with `r = s sinh v`.
///
/// `decay_radius` declares where `g` becomes negligible; the truncation radius
/// of `quad` must cover it. The error estimate compares against the same rule
/// at half resolution.
pub fn surface_integral<G>(spec: &MeasureSpec, g: G, decay_radius: f64, quad: &QuadSpec) -> Result<Estimate>
where
    G: Fn(&[f64], f64) -> f64 + Sync,
{
    if quad.radius < decay_radius {
        return Err(Error::Budget(format!(
            "truncation radius {} does not cover the declared decay radius {decay_radius}",
            quad.radius
        )));
    }
    let signs: &[f64] = match spec.sheet {
        Sheet::Plus => &[1.0],
        Sheet::Minus => &[-1.0],
        Sheet::Both => &[1.0, -1.0],
    };
    let run = |panels: usize| -> f64 {
        signs.iter().map(|&sg| sheet_integral(&spec.params, sg, &g, quad.radius, quad.nodes, panels)).sum()
    };
    let fine = run(quad.panels);
    let coarse = run((quad.panels / 2).max(1));
    Ok(Estimate { value: fine, error: (fine - coarse).abs() })
}

/// `∫ g · σ_s^{(∗n)} dξ dτ` for `g(|ξ|, τ)` using the closed form, by nested
/// adaptive quadrature in `(τ, m = √(τ² − |ξ|²))`.
pub fn pair_with_closed<G>(form: &ConvClosedForm, g: G, quad: &QuadSpec) -> Result<Estimate>
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    let d = form.d;
    let ns = form.n as f64 * form.s;
    let tau_max = form.n as f64 * form.s.hypot(quad.radius);
    let area = sphere_area(d);
    let inner = |tau: f64| -> Result<Estimate> {
        adaptive(
            |m: f64| {
                let r = ((tau - m) * (tau + m)).max(0.0).sqrt();
                area * r.powi(d as i32 - 2) * m * g(r, tau) * form.of_interval(m * m)
            },
            ns,
            tau,
            quad.abs_tol,
            quad.rel_tol,
            quad.max_intervals,
        )
    };
    let inner_error = std::sync::Mutex::new(0.0f64);
    let outer = adaptive(
        |tau: f64| match inner(tau) {
            Ok(est) => {
                let mut e = inner_error.lock().expect("poisoned");
                *e = e.max(est.error);
                est.value
            }
            Err(_) => f64::NAN,
        },
        ns,
        tau_max,
        quad.abs_tol,
        quad.rel_tol,
        quad.max_intervals,
    )?;
    if !outer.value.is_finite() {
        return Err(Error::Budget("inner integral did not converge".into()));
    }
    let inner_err = *inner_error.lock().expect("poisoned");
    Ok(Estimate { value: outer.value, error: outer.error + inner_err * (tau_max - ns) })
}

/// `∫ g dσ_s^{(∗n)} = ∫ g(Σx_i, Σψ_s(x_i)) ∏ dx_i/ψ_s(x_i)` for a test
/// function `g(|ξ|, τ)` radial in `ξ`.
///
/// `n = 2` uses tensor Gauss–Legendre in `(v₁, v₂, relative angle)` unless
/// `quad.rule` asks for Monte-Carlo; `n = 3` always samples. The Monte-Carlo
/// error is one standard error of the mean.
pub fn conv_pairing_oracle<G>(spec: &MeasureSpec, n: usize, g: G, quad: &QuadSpec) -> Result<Estimate>
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    if spec.sheet != Sheet::Plus {
        return Err(Error::Unsupported("pairing oracle is implemented for the upper sheet".into()));
    }
    match n {
        2 if quad.rule == QuadRule::Tensor => Ok(pairing_tensor(&spec.params, &g, quad)),
        2 | 3 => pairing_monte_carlo(&spec.params, n, &g, quad),
        _ => Err(Error::Unsupported(format!("pairing oracle for n = {n}"))),
    }
}

fn pairing_tensor<G>(params: &HyperboloidParams, g: &G, quad: &QuadSpec) -> Estimate
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    let d = params.d();
    let run = |panels: usize| -> f64 {
        let radial = radial_nodes(params.s(), quad.radius, quad.nodes, panels);
        // Relative angle: cos θ nodes with weights (trapezoid on the circle for
        // d = 2, Gauss–Legendre in cos θ times 2π for d = 3).
        let angles: Vec<(f64, f64)> = if d == 2 {
            let m = (2 * panels).max(8);
            let h = TAU / m as f64;
            (0..m).map(|k| ((h * k as f64).cos(), h)).collect()
        } else {
            let cp = (panels / 8).max(1);
            let hc = 2.0 / cp as f64;
            (0..cp)
                .flat_map(|k| {
                    let lo = -1.0 + hc * k as f64;
                    gauss_legendre(quad.nodes).mapped(lo, lo + hc).map(|(c, w)| (c, TAU * w)).collect::<Vec<_>>()
                })
                .collect()
        };
        let parts: Vec<f64> = radial
            .par_iter()
            .map(|&(r1, p1, w1)| {
                let row: f64 = radial
                    .iter()
                    .map(|&(r2, p2, w2)| {
                        let tau = p1 + p2;
                        let a: f64 = angles
                            .iter()
                            .map(|&(c, wa)| {
                                let xi = (r1 * r1 + r2 * r2 + 2.0 * r1 * r2 * c).max(0.0).sqrt();
                                g(xi, tau) * wa
                            })
                            .sum();
                        a * w2 * r2.powi(d as i32 - 1)
                    })
                    .sum();
                row * w1 * r1.powi(d as i32 - 1)
            })
            .collect();
        sphere_area(d) * pairwise_sum(&parts)
    };
    let fine = run(quad.panels);
    let coarse = run((quad.panels / 2).max(1));
    Estimate { value: fine, error: (fine - coarse).abs() }
}

/// Sampler for `x ∈ ℝ^d` with density `∝ e^{−βψ_s(x)}/ψ_s(x)`.
///
/// Draws are returned with the importance factor `Z e^{βψ_s(x)}`, where `Z`
/// is the normaliser, so that `E[h(x) · factor] = ∫ h dx/ψ_s`.
#[derive(Debug, Clone, Copy)]
pub struct ShellSampler {
    d: usize,
    s: f64,
    beta: f64,
    // Z e^{βs}
    scaled_norm: f64,
}

impl ShellSampler {
    pub fn new(params: &HyperboloidParams, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("importance rate must be positive, got {beta}")));
        }
        let s = params.s();
        let scaled_norm = if params.d() == 2 {
            TAU / beta
        } else {
            // 4π ∫_0^∞ e^{−βw} √(w(w+2s)) dw with w = t².
            let tmax = (80.0 / beta).sqrt();
            let est = adaptive(
                |t: f64| 2.0 * t * t * (-beta * t * t).exp() * (t * t + 2.0 * s).sqrt(),
                0.0,
                tmax,
                1e-300,
                1e-13,
                2000,
            )?;
            2.0 * TAU * est.value
        };
        Ok(ShellSampler { d: params.d(), s, beta, scaled_norm })
    }

    fn exp_draw<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        -(1.0 - u).ln() / self.beta
    }

    /// Returns `(x, ψ_s(x), factor)`.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> ([f64; 3], f64, f64) {
        let s = self.s;
        let w = if self.d == 2 {
            self.exp_draw(rng)
        } else {
            let p_exp = s * self.beta / (s * self.beta + 1.0);
            loop {
                let w =
                    if rng.gen::<f64>() < p_exp { self.exp_draw(rng) } else { self.exp_draw(rng) + self.exp_draw(rng) };
                let accept = (w * (w + 2.0 * s)).sqrt() / (w + s);
                if rng.gen::<f64>() < accept {
                    break w;
                }
            }
        };
        let u = s + w;
        let r = (w * (w + 2.0 * s)).sqrt();
        let x = if self.d == 2 {
            let phi = TAU * rng.gen::<f64>();
            [r * phi.cos(), r * phi.sin(), 0.0]
        } else {
            let c = 2.0 * rng.gen::<f64>() - 1.0;
            let sn = ((1.0 - c) * (1.0 + c)).sqrt();
            let phi = TAU * rng.gen::<f64>();
            [r * sn * phi.cos(), r * sn * phi.sin(), r * c]
        };
        (x, u, self.scaled_norm * (self.beta * w).exp())
    }
}

const CHUNK: usize = 1 << 13;

/// Seeded Monte-Carlo over chunks with pre-assigned ChaCha streams; the
/// result depends only on the seed and the sample count.
fn pairing_monte_carlo<G>(params: &HyperboloidParams, n: usize, g: &G, quad: &QuadSpec) -> Result<Estimate>
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    if quad.samples < 2 {
        return Err(Error::Budget("Monte-Carlo needs at least two samples".into()));
    }
    let sampler = ShellSampler::new(params, quad.importance_rate)?;
    let chunks = quad.samples.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(quad.seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(quad.samples - c * CHUNK);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                let mut xi = [0.0; 3];
                let mut tau = 0.0;
                let mut weight = 1.0;
                for _ in 0..n {
                    let (x, u, f) = sampler.draw(&mut rng);
                    for k in 0..3 {
                        xi[k] += x[k];
                    }
                    tau += u;
                    weight *= f;
                }
                let y = weight * g((xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt(), tau);
                sum += y;
                sum_sq += y * y;
            }
            (sum, sum_sq)
        })
        .collect();
    let total = quad.samples as f64;
    let sum: f64 = partial.iter().map(|p| p.0).sum();
    let sum_sq: f64 = partial.iter().map(|p| p.1).sum();
    let mean = sum / total;
    let var = ((sum_sq / total - mean * mean) * total / (total - 1.0)).max(0.0);
    Ok(Estimate { value: mean, error: (var / total).sqrt() })
}

/// Result of [`conv_point_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointOracle {
    pub value: f64,
    /// Quadrature error plus the discrepancy between the two evaluation routes.
    pub error: f64,
    /// `m = √(τ² − |ξ|²)` from the normal form.
    pub mass: f64,
    /// Set when the point lies within the boundary band of the support.
    pub ill_conditioned: bool,
}

/// Boost parameter placing the reduced point `(0, m)` at a fixed off-axis
/// reference `(0.75 m, 0, …, 1.25 m)`.
const REFERENCE_BOOST: f64 = 0.6;

/// Pointwise `σ_s ∗ σ_s(p)`.
///
/// The point is reduced to `(0, m)` with the normal form, moved to a fixed
/// off-axis reference point, and evaluated there in bipolar coordinates
/// `ρ = |y|`, `ς = |ξ − y|`, where the delta function fixes `ς`. When `p` is
/// itself off-axis the bipolar integral is also taken at `p`, and the
/// disagreement is added to the error.
pub fn conv_point_oracle(spec: &MeasureSpec, n: usize, p: &SpacetimePoint, quad: &QuadSpec) -> Result<PointOracle> {
    if n != 2 {
        return Err(Error::Unsupported(format!("pointwise oracle for n = {n}")));
    }
    if spec.sheet != Sheet::Plus {
        return Err(Error::Unsupported("pointwise oracle is implemented for the upper sheet".into()));
    }
    let params = &spec.params;
    let d = params.d();
    if p.dim() != d {
        return Err(Error::Domain(format!("point has dimension {}, expected {d}", p.dim())));
    }
    let s = params.s();
    let (l, m) = normal_form(p)?;
    let reduced = l.apply(p);
    let excess = (m - 2.0 * s) * (m + 2.0 * s);
    if excess <= 0.0 {
        return Err(Error::Domain(format!(
            "point is not inside the support of the double convolution (τ² − |ξ|² = {})",
            m * m
        )));
    }
    let ill_conditioned = excess < BOUNDARY_TOL * (1.0 + p.tau * p.tau);
    let reference = LorentzMap::boost(REFERENCE_BOOST, d)?.apply(&SpacetimePoint::new(vec![0.0; d], reduced.tau));
    let at_reference = bipolar(params, reference.xi[0].abs(), reference.tau, quad)?;
    let mut error = at_reference.error + (reduced.tau - m).abs() / m * at_reference.value;
    let xi = p.xi_norm();
    if xi > 1e-6 * p.tau {
        let direct = bipolar(params, xi, p.tau, quad)?;
        error += direct.error + (direct.value - at_reference.value).abs();
    }
    Ok(PointOracle { value: at_reference.value, error, mass: m, ill_conditioned })
}

/// Endpoints `u₁ ≤ u₂` of `u = ψ_s(y)` on `{ψ_s(y) + ψ_s(ξ − y) = τ}`, found
/// by bisection on the collinear configurations.
fn energy_range(s: f64, xi: f64, tau: f64) -> (f64, f64) {
    let f = |x: f64| s.hypot(x) + s.hypot(xi - x) - tau;
    let mut hi = 0.5 * xi;
    let mut lo = hi - tau;
    while f(lo) < 0.0 {
        lo -= tau;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u1 = s.hypot(0.5 * (lo + hi));
    (u1, tau - u1)
}

fn bipolar(params: &HyperboloidParams, xi: f64, tau: f64, quad: &QuadSpec) -> Result<Estimate> {
    let s = params.s();
    let (u1, u2) = energy_range(s, xi, tau);
    if params.d() == 3 {
        // dy/(ψψ') = (1/|ξ|) du dw dφ; the integrand is constant in u.
        return Ok(Estimate { value: TAU / xi * (u2 - u1), error: 0.0 });
    }
    // d = 2: dy/(ψψ') = du dw / Area(|ξ|, ρ, ς), two mirror triangles.
    let mid = 0.5 * (u1 + u2);
    let half = 0.5 * (u2 - u1);
    let integrand = |theta: f64| {
        let u = mid + half * theta.sin();
        let w = tau - u;
        let rho = ((u - s) * (u + s)).max(0.0).sqrt();
        let sigma = ((w - s) * (w + s)).max(0.0).sqrt();
        let outer = (rho + sigma - xi) * (rho + sigma + xi);
        let inner = (xi - (rho - sigma)) * (xi + (rho - sigma));
        let area = 0.25 * (outer * inner).max(0.0).sqrt();
        if area > 0.0 {
            half * theta.cos() / area
        } else {
            0.0
        }
    };
    // After the sine substitution the integrand is analytic on the closed
    // interval; a fixed rule keeps nodes away from the endpoints, where the
    // triangle factors lose relative accuracy.
    let fine = gauss_legendre((4 * quad.nodes).min(128)).integrate(integrand, -0.5 * PI, 0.5 * PI);
    let coarse = gauss_legendre((2 * quad.nodes).min(64)).integrate(integrand, -0.5 * PI, 0.5 * PI);
    Ok(Estimate { value: fine, error: (fine - coarse).abs() })
}

/// Sheet combinations whose sums have a known support region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SupportCase {
    PlusPlus,
    PlusMinus,
    MinusMinus,
    PlusPlusPlus,
    PlusPlusMinus,
    PlusMinusMinus,
    MinusMinusMinus,
}

impl SupportCase {
    pub const ALL: [SupportCase; 7] = [
        SupportCase::PlusPlus,
        SupportCase::PlusMinus,
        SupportCase::MinusMinus,
        SupportCase::PlusPlusPlus,
        SupportCase::PlusPlusMinus,
        SupportCase::PlusMinusMinus,
        SupportCase::MinusMinusMinus,
    ];

    pub fn signs(&self) -> &'static [f64] {
        match self {
            SupportCase::PlusPlus => &[1.0, 1.0],
            SupportCase::PlusMinus => &[1.0, -1.0],
            SupportCase::MinusMinus => &[-1.0, -1.0],
            SupportCase::PlusPlusPlus => &[1.0, 1.0, 1.0],
            SupportCase::PlusPlusMinus => &[1.0, 1.0, -1.0],
            SupportCase::PlusMinusMinus => &[1.0, -1.0, -1.0],
            SupportCase::MinusMinusMinus => &[-1.0, -1.0, -1.0],
        }
    }

    /// Whether `(ξ, τ)` lies in the region asserted for this combination,
    /// with absolute slack `tol`.
    pub fn contains(&self, s: f64, xi_norm: f64, tau: f64, tol: f64) -> bool {
        let k = self.signs().len() as f64;
        let bound = (k * s).hypot(xi_norm);
        match self {
            SupportCase::PlusPlus | SupportCase::PlusPlusPlus => tau >= bound - tol,
            SupportCase::MinusMinus | SupportCase::MinusMinusMinus => tau <= -bound + tol,
            SupportCase::PlusMinus => tau.abs() <= bound + tol,
            SupportCase::PlusPlusMinus => tau >= -bound - tol,
            SupportCase::PlusMinusMinus => tau <= bound + tol,
        }
    }
}

impl fmt::Display for SupportCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.signs().iter().map(|&x| if x > 0.0 { '+' } else { '-' }).collect();
        write!(f, "({s})")
    }
}

impl FromStr for SupportCase {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim().trim_start_matches('(').trim_end_matches(')').replace(',', "");
        SupportCase::ALL
            .into_iter()
            .find(|c| c.to_string().trim_matches(|ch| ch == '(' || ch == ')') == t)
            .ok_or_else(|| Error::Domain(format!("unknown sheet combination '{text}'")))
    }
}

/// Draws `samples` tuples of points on the sheets named by `case` and
/// counts sums falling outside the asserted region.
///
/// Radii are log-uniform on `[10⁻³, 10²]` with uniform directions; one
/// extra tuple sits at the vertices (the equality configuration).
pub fn sum_support_predicates(params: &HyperboloidParams, case: SupportCase, samples: usize, seed: u64) -> usize {
    let d = params.d();
    let s = params.s();
    let chunks = samples.div_ceil(CHUNK);
    let check = |xi: &[f64; 3], tau: f64| {
        let xn = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        let tol = 1e-12 * (1.0 + tau.abs() + xn);
        !case.contains(s, xn, tau, tol)
    };
    let vertex_tau: f64 = case.signs().iter().map(|sg| sg * s).sum();
    let mut violations = usize::from(check(&[0.0; 3], vertex_tau));
    violations += (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut bad = 0;
            for _ in 0..count {
                let mut xi = [0.0; 3];
                let mut tau = 0.0;
                for &sign in case.signs() {
                    let r = 10f64.powf(rng.gen_range(-3.0..2.0));
                    let dir = random_direction(&mut rng, d);
                    for k in 0..d {
                        xi[k] += r * dir[k];
                    }
                    tau += sign * s.hypot(r);
                }
                if check(&xi, tau) {
                    bad += 1;
                }
            }
            bad
        })
        .sum::<usize>();
    violations
}

fn random_direction<R: Rng>(rng: &mut R, d: usize) -> [f64; 3] {
    if d == 2 {
        let phi = TAU * rng.gen::<f64>();
        [phi.cos(), phi.sin(), 0.0]
    } else {
        let c = 2.0 * rng.gen::<f64>() - 1.0;
        let sn = ((1.0 - c) * (1.0 + c)).sqrt();
        let phi = TAU * rng.gen::<f64>();
        [sn * phi.cos(), sn * phi.sin(), c]
    }
}

/// Violation counts for the scalar inequalities behind the sum-support
/// regions, in the order
/// `√(s²+a²)√(s²+b²) ≥ s²+ab`, `≥ ab−s²`,
/// `√(4s²+a²)√(s²+b²) ≥ 2s²+ab`, `≥ ab−2s²`.
pub fn algebraic_inequality_violations(samples: usize, seed: u64) -> [usize; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = [0; 4];
    for _ in 0..samples {
        let a = 10f64.powf(rng.gen_range(-4.0..4.0));
        let b = 10f64.powf(rng.gen_range(-4.0..4.0));
        let s = 10f64.powf(rng.gen_range(-3.0..3.0));
        let one = s.hypot(a) * s.hypot(b);
        let two = (2.0 * s).hypot(a) * s.hypot(b);
        let slack = 1e-14 * (s * s + a * b);
        let lhs = [one, one, two, two];
        let rhs = [s * s + a * b, a * b - s * s, 2.0 * s * s + a * b, a * b - 2.0 * s * s];
        for k in 0..4 {
            if lhs[k] < rhs[k] - slack {
                counts[k] += 1;
            }
        }
    }
    counts
}
