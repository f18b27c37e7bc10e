//! The extension operator `T_s f(x, t) = ∫ e^{i(x·y + tψ_s(y))} f(y) dy/ψ_s(y)`
//! on the exponential profiles `f_a = e^{−aψ_s}`, and the norms that feed the
//! extremizing functionals.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::{HyperboloidParams, SpacetimePoint};
use crate::measures::ConvClosedForm;
use crate::quad::{adaptive, Estimate, QuadSpec};
use crate::specfun::{bessel_j0, laplace_j0_kernel, BranchedComplex};

/// `f_a(y) = e^{−aψ_s(y)}` on the hyperboloid described by `params`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpProfile {
    a: f64,
    params: HyperboloidParams,
}

impl ExpProfile {
    pub fn new(a: f64, params: HyperboloidParams) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("profile rate a must be positive and finite, got {a}")));
        }
        Ok(ExpProfile { a, params })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn params(&self) -> &HyperboloidParams {
        &self.params
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        (-self.a * self.params.psi_vec(y)).exp()
    }

    /// The weight `g_a(ξ, τ) = e^{−aτ}` with `f_a = g_a` on the sheet.
    pub fn weight(&self, tau: f64) -> f64 {
        (-self.a * tau).exp()
    }
}

/// `T_s f_a(x, t) = 2π e^{−s√((a−it)² + |x|²)} / √((a−it)² + |x|²)` (d = 2).
pub fn extension_closed(profile: &ExpProfile, x: &[f64], t: f64) -> Result<BranchedComplex> {
    let params = profile.params;
    if params.d() != 2 {
        return Err(Error::Unsupported(format!(
            "closed-form extension is only available for d = 2 (got d = {})",
            params.d()
        )));
    }
    if x.len() != 2 {
        return Err(Error::Domain(format!("expected a point of R^2, got length {}", x.len())));
    }
    let lambda = BranchedComplex::new(profile.a, -t);
    Ok(laplace_j0_kernel(lambda, crate::geometry::norm(x), params.s())? * TAU)
}

/// Upper limit in `u = ψ_s` beyond which `e^{−au}` is below `quad.abs_tol`
/// relative to its value at the vertex.
fn energy_cutoff(profile: &ExpProfile, quad: &QuadSpec) -> f64 {
    let decades = (1.0 / quad.abs_tol.max(1e-300)).ln().max(30.0);
    profile.params.s() + decades / profile.a
}

/// Direct numerical `T_s f_a(x, t)` from the radial integral
/// `2π ∫_s^∞ e^{−(a−it)u} J₀(|x|√(u²−s²)) du` (d = 2) or
/// `4π ∫_s^∞ e^{−(a−it)u} sin(|x|r)/(|x|r) · r du`, `r = √(u²−s²)` (d = 3).
pub fn extension_quadrature(
    profile: &ExpProfile,
    x: &[f64],
    t: f64,
    quad: &QuadSpec,
) -> Result<Estimate<BranchedComplex>> {
    let params = profile.params;
    let d = params.d();
    if x.len() != d {
        return Err(Error::Domain(format!("expected a point of R^{d}, got length {}", x.len())));
    }
    let s = params.s();
    let a = profile.a;
    let xn = crate::geometry::norm(x);
    let u_max = energy_cutoff(profile, quad);
    let oscillations = ((t.abs() + xn) * (u_max - s)) / TAU;
    if oscillations > 50.0 * quad.max_intervals as f64 {
        return Err(Error::Budget(format!("about {oscillations:.0} oscillations exceed the quadrature budget")));
    }
    let integrand = |u: f64| {
        let r = ((u - s) * (u + s)).max(0.0).sqrt();
        let phase = BranchedComplex::new(-a * (u - s), t * u).exp();
        let radial = if d == 2 {
            TAU * bessel_j0(xn * r)
        } else if xn * r < 1e-8 {
            2.0 * TAU * r
        } else {
            2.0 * TAU * (xn * r).sin() / xn
        };
        phase * radial
    };
    // Break the range at every few oscillation periods so the adaptive rule
    // starts from a resolved partition.
    let pieces = (oscillations.ceil() as usize).clamp(1, quad.max_intervals / 4);
    let h = (u_max - s) / pieces as f64;
    let mut value = BranchedComplex::default();
    let mut error = 0.0;
    for k in 0..pieces {
        let lo = s + h * k as f64;
        let est = adaptive(integrand, lo, lo + h, quad.abs_tol / pieces as f64, quad.rel_tol, quad.max_intervals)?;
        value = value + est.value;
        error += est.error;
    }
    let scale = (-a * s).exp();
    Ok(Estimate { value: value * scale, error: error * scale })
}

/// `‖f_a‖²_{L²(σ_s)}`: `(π/a)e^{−2as}` for d = 2, and
/// `4π ∫_s^∞ e^{−2au} √(u²−s²) du` by quadrature for d = 3.
pub fn l2_norm_sq(profile: &ExpProfile) -> Result<f64> {
    let s = profile.params.s();
    let a = profile.a;
    if profile.params.d() == 2 {
        return Ok(PI / a * (-2.0 * a * s).exp());
    }
    // u = s + w, w = q²: 4π e^{−2as} ∫_0^∞ 2q² √(q² + 2s) e^{−2aq²} dq.
    let q_max = (40.0 / a).sqrt();
    let est = adaptive(
        |q: f64| 2.0 * q * q * (q * q + 2.0 * s).sqrt() * (-2.0 * a * q * q).exp(),
        0.0,
        q_max,
        1e-300,
        1e-13,
        4000,
    )?;
    Ok(2.0 * TAU * (-2.0 * a * s).exp() * est.value)
}

/// `(f_a σ_s)^{(∗n)}(p) = e^{−aτ} σ_s^{(∗n)}(p)`.
pub fn weighted_conv_closed(profile: &ExpProfile, n: usize, p: &SpacetimePoint) -> Result<f64> {
    let form = ConvClosedForm::new(profile.params.d(), n, profile.params.s())?;
    Ok(profile.weight(p.tau) * form.eval(p))
}

fn check_pair(d: usize, p_exponent: u32) -> Result<usize> {
    match (d, p_exponent) {
        (2, 4) | (3, 4) => Ok(2),
        (2, 6) => Ok(3),
        _ => Err(Error::Unsupported(format!("exponent p = {p_exponent} in dimension {d}"))),
    }
}

/// `‖(f_a σ_s)^{(∗k)}‖²_{L²(ℝ^{d+1})} = ∫ e^{−2aτ} (σ_s^{(∗k)})² dξ dτ`.
///
/// Computed in `m = √(τ² − |ξ|²)` and rapidity `η` with `τ = m cosh η`,
/// `|ξ| = m sinh η`, which turns `dξ dτ` into `|S^{d−1}| m (m sinh η)^{d−1} dm dη`:
/// an outer adaptive rule in `x = 2a(m − ks)` and an inner one in `η`.
pub fn conv_power_l2_sq(profile: &ExpProfile, k: usize, quad: &QuadSpec) -> Result<Estimate> {
    let params = profile.params;
    let d = params.d();
    let form = ConvClosedForm::new(d, k, params.s())?;
    let a = profile.a;
    let ks = k as f64 * params.s();
    let area = if d == 2 { TAU } else { 2.0 * TAU };
    let tail = (1.0 / quad.abs_tol.max(1e-300)).ln().max(40.0);
    let inner_err = std::cell::Cell::new(0.0f64);
    let failed = std::cell::Cell::new(None);
    let inner = |m: f64| -> f64 {
        // e^{−2am cosh η} relative to e^{−2am}, cut where it drops below e^{−tail}.
        let eta_max = (tail / (2.0 * a * m)).acosh_one_plus();
        let est = adaptive(
            |eta: f64| {
                let sh = (m * eta.sinh()).powi(d as i32 - 1);
                (-2.0 * a * m * (eta.cosh() - 1.0)).exp() * sh
            },
            0.0,
            eta_max,
            1e-300,
            quad.rel_tol,
            quad.max_intervals,
        );
        match est {
            Ok(e) => {
                inner_err.set(inner_err.get().max(e.error / e.value.abs().max(1e-300)));
                e.value
            }
            Err(e) => {
                failed.set(Some(e));
                0.0
            }
        }
    };
    let outer = adaptive(
        |x: f64| {
            let m = ks + x / (2.0 * a);
            let c = form.of_interval(m * m);
            area * m * c * c * (-x).exp() * inner(m) / (2.0 * a)
        },
        0.0,
        tail,
        1e-300,
        quad.rel_tol,
        quad.max_intervals,
    )?;
    if let Some(e) = failed.take() {
        return Err(e);
    }
    let scale = (-2.0 * a * ks).exp();
    let value = outer.value * scale;
    Ok(Estimate { value, error: outer.error * scale + inner_err.get() * value.abs() })
}

trait AcoshOnePlus {
    fn acosh_one_plus(self) -> f64;
}

impl AcoshOnePlus for f64 {
    /// `acosh(1 + x)` without cancellation for small `x`.
    fn acosh_one_plus(self) -> f64 {
        (self + (self * (self + 2.0)).sqrt()).ln_1p()
    }
}

/// `‖T_s f_a‖_{L^{2k}} = [(2π)^{(d+1)/2} ‖(f_a σ_s)^{(∗k)}‖₂]^{1/k}` for
/// `(d, 2k) ∈ {(2,4), (2,6), (3,4)}`.
pub fn lp_norm_extension_via_conv(profile: &ExpProfile, p_exponent: u32, quad: &QuadSpec) -> Result<Estimate> {
    let d = profile.params.d();
    let k = check_pair(d, p_exponent)?;
    let sq = conv_power_l2_sq(profile, k, quad)?;
    let c = TAU.powf((d as f64 + 1.0) / 2.0);
    let inv_k = 1.0 / k as f64;
    let value = (c * sq.value.sqrt()).powf(inv_k);
    // d(x^{1/(2k)})/x = (1/2k) x^{1/(2k)}/x
    let error = value * inv_k * 0.5 * sq.error / sq.value;
    Ok(Estimate { value, error })
}

/// `∫_{ℝ³} |T_s f_a|⁴ dx dt` by direct 2-D quadrature of the closed form
/// (d = 2), in polar coordinates of the `(|x|, t)` quarter plane with both
/// radii mapped from `[0, 1)`.
///
/// Used only to validate the convolution route; the integrand decays like
/// `1/(t² + |x|²)²` near the light cone, so the achievable accuracy is modest.
pub fn l4_norm_direct(profile: &ExpProfile, quad: &QuadSpec) -> Result<Estimate> {
    if profile.params.d() != 2 {
        return Err(Error::Unsupported("direct L4 quadrature is implemented for d = 2".into()));
    }
    let failed = std::cell::Cell::new(None);
    let inner_err = std::cell::Cell::new(0.0f64);
    let density = |rho: f64, t: f64| -> f64 {
        match extension_closed(profile, &[rho, 0.0], t) {
            Ok(v) => v.abs().powi(4) * rho,
            Err(e) => {
                failed.set(Some(e));
                0.0
            }
        }
    };
    // Polar angle φ ∈ [0, π/2] between the t axis (φ = 0) and the |x| axis;
    // the light cone sits at φ = π/4. Radius R = z/(1 − z).
    let radial = |phi: f64| -> f64 {
        let (sn, cs) = phi.sin_cos();
        let est = adaptive(
            |z: f64| {
                let big_r = z / (1.0 - z);
                let jac = 1.0 / ((1.0 - z) * (1.0 - z));
                density(big_r * sn, big_r * cs) * big_r * jac
            },
            0.0,
            1.0,
            1e-300,
            quad.rel_tol,
            quad.max_intervals,
        );
        match est {
            Ok(e) => {
                inner_err.set(inner_err.get() + e.error);
                e.value
            }
            Err(e) => {
                failed.set(Some(e));
                0.0
            }
        }
    };
    let quarter = PI / 2.0;
    let est = crate::quad::adaptive_with_breaks(
        radial,
        &[0.0, quarter / 2.0, quarter],
        1e-300,
        quad.rel_tol,
        quad.max_intervals,
    )?;
    if let Some(e) = failed.take() {
        return Err(e);
    }
    // Angular factor 2π for x ∈ ℝ², factor 2 for t < 0 (conjugate symmetry).
    let factor = 2.0 * TAU;
    Ok(Estimate { value: factor * est.value, error: factor * (est.error + inner_err.get()) })
}
