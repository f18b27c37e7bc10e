//! Special functions used by the closed forms: the exponential integral,
//! the Bessel function J₀, the principal complex square root and the
//! Laplace transform of `J₀(a√(u²−b²))`.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::quad::Integrand;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Complex number whose square roots are taken on the principal branch
/// (cut along the negative real axis).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BranchedComplex {
    pub re: f64,
    pub im: f64,
}

impl BranchedComplex {
    pub const fn new(re: f64, im: f64) -> Self {
        BranchedComplex { re, im }
    }

    pub const fn real(re: f64) -> Self {
        BranchedComplex { re, im: 0.0 }
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn conj(self) -> Self {
        BranchedComplex::new(self.re, -self.im)
    }

    pub fn exp(self) -> Self {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        BranchedComplex::new(m * c, m * s)
    }

    pub fn square(self) -> Self {
        self * self
    }

    pub fn recip(self) -> Self {
        BranchedComplex::real(1.0) / self
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl fmt::Display for BranchedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_sign_negative() {
            write!(f, "{} - {}i", self.re, -self.im)
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

impl Add for BranchedComplex {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        BranchedComplex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for BranchedComplex {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        BranchedComplex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for BranchedComplex {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        BranchedComplex::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Mul<f64> for BranchedComplex {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        BranchedComplex::new(self.re * k, self.im * k)
    }
}

impl Div for BranchedComplex {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        // Smith's algorithm.
        if o.re.abs() >= o.im.abs() {
            let r = o.im / o.re;
            let den = o.re + o.im * r;
            BranchedComplex::new((self.re + self.im * r) / den, (self.im - self.re * r) / den)
        } else {
            let r = o.re / o.im;
            let den = o.re * r + o.im;
            BranchedComplex::new((self.re * r + self.im) / den, (self.im * r - self.re) / den)
        }
    }
}

impl Neg for BranchedComplex {
    type Output = Self;
    fn neg(self) -> Self {
        BranchedComplex::new(-self.re, -self.im)
    }
}

impl Integrand for BranchedComplex {
    fn zero() -> Self {
        BranchedComplex::default()
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

/// Principal square root: `w² = z`, `Re w ≥ 0`, real and positive on the
/// positive real axis. Arguments on the negative real axis are rejected.
pub fn principal_sqrt(z: BranchedComplex) -> Result<BranchedComplex> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::BranchCut { re: z.re, im: z.im });
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Ok(BranchedComplex::default());
    }
    let r = z.abs();
    if z.re >= 0.0 {
        let wr = (0.5 * (r + z.re)).sqrt();
        Ok(BranchedComplex::new(wr, z.im / (2.0 * wr)))
    } else {
        let wi = (0.5 * (r - z.re)).sqrt().copysign(z.im);
        Ok(BranchedComplex::new(z.im / (2.0 * wi), wi))
    }
}

/// Largest argument accepted by [`exp_integral_ei`]; `Ei(700) ≈ 1.5e301`.
pub const EI_MAX_ARG: f64 = 700.0;

/// Exponential integral `Ei(x) = −∫_{−x}^∞ e^{−t}/t dt` (principal value for x > 0).
///
/// Regimes: power series for `−1 ≤ x ≤ 40`, continued fraction for
/// `x < −1`, asymptotic expansion for `x > 40`.
pub fn exp_integral_ei(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("Ei(NaN)".into()));
    }
    if x == 0.0 {
        return Err(Error::Domain("Ei has a logarithmic singularity at 0".into()));
    }
    if x > EI_MAX_ARG {
        return Err(Error::Overflow(format!("Ei({x}) exceeds the guarded range x <= {EI_MAX_ARG}")));
    }
    if x == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if x < -1.0 {
        let y = -x;
        Ok(-(-y).exp() * e1_continued_fraction(y))
    } else if x <= 40.0 {
        Ok(ei_series(x))
    } else {
        Ok(ei_asymptotic(x))
    }
}

/// `e^x E₁(x) = −e^x Ei(−x)` for `x > 0`, computed without under/overflow.
pub fn scaled_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("scaled E1 needs x > 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x > 1.0 {
        Ok(e1_continued_fraction(x))
    } else {
        Ok(-x.exp() * ei_series(-x))
    }
}

fn ei_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..500 {
        let kf = k as f64;
        term *= x / kf;
        let add = term / kf;
        sum += add;
        if add.abs() <= f64::EPSILON * 0.25 * sum.abs() {
            break;
        }
    }
    EULER_GAMMA + x.abs().ln() + sum
}

// e^x E1(x) by the modified Lentz evaluation of the even continued fraction.
fn e1_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() <= f64::EPSILON {
            break;
        }
    }
    h
}

fn ei_asymptotic(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..100 {
        let next = term * k as f64 / x;
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < f64::EPSILON * 0.25 * sum {
            break;
        }
    }
    // e^x may overflow before e^x / x does near the guard.
    (x - x.ln()).exp() * sum
}

/// Bessel function `J₀(x) = (1/2π) ∫₀^{2π} cos(x cos θ) dθ`, evaluated by
/// the periodic trapezoid rule with enough nodes to resolve the oscillation.
pub fn bessel_j0(x: f64) -> f64 {
    let b = x.abs();
    if !b.is_finite() {
        return if b.is_infinite() { 0.0 } else { f64::NAN };
    }
    let n = (b + 12.0 * b.cbrt() + 40.0).ceil() as usize;
    let h = TAU / n as f64;
    let mut terms: Vec<f64> = Vec::with_capacity(n);
    for k in 0..n {
        terms.push((b * (h * k as f64).cos()).cos());
    }
    crate::quad::pairwise_sum(&terms) / n as f64
}

/// `∫_b^∞ e^{−λu} J₀(a√(u²−b²)) du = e^{−b√(λ²+a²)} / √(λ²+a²)` for `Re λ > 0`.
pub fn laplace_j0_kernel(lambda: BranchedComplex, a: f64, b: f64) -> Result<BranchedComplex> {
    if !(lambda.re > 0.0) {
        return Err(Error::Domain(format!("Laplace kernel needs Re(lambda) > 0, got {lambda}")));
    }
    if !(a >= 0.0) || !(b >= 0.0) {
        return Err(Error::Domain(format!("Laplace kernel needs a, b >= 0, got a = {a}, b = {b}")));
    }
    let root = principal_sqrt(lambda.square() + BranchedComplex::real(a * a))?;
    Ok((-(root * b)).exp() / root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive;
    use approx::assert_relative_eq;

    fn ei_neg_quadrature(y: f64) -> f64 {
        // Ei(-y) = -∫_y^∞ e^{-t}/t dt, split at t = 1 when y < 1.
        let f = |t: f64| (-t).exp() / t;
        let mut total = 0.0;
        let mut lo = y;
        if y < 1.0 {
            total += adaptive(f, y, 1.0, 1e-16, 1e-14, 500).unwrap().value;
            lo = 1.0;
        }
        total += adaptive(f, lo, lo + 45.0, 1e-18, 1e-14, 500).unwrap().value;
        -total
    }

    #[test]
    fn ei_minus_one_matches_quadrature() {
        let q = ei_neg_quadrature(1.0);
        assert!((q - -0.219_383_934_395_52).abs() < 1e-13);
        assert!((exp_integral_ei(-1.0).unwrap() - q).abs() < 1e-14);
    }

    #[test]
    fn ei_regimes_agree_with_quadrature() {
        for &y in &[1e-6, 1e-3, 0.3, 0.999, 1.001, 2.5, 5.9, 6.1, 12.0, 30.0] {
            let q = ei_neg_quadrature(y);
            let got = exp_integral_ei(-y).unwrap();
            assert_relative_eq!(got, q, max_relative = 1e-12);
        }
    }

    #[test]
    fn ei_positive_side_via_shi() {
        // Ei(x) - Ei(-x) = 2 ∫_0^x sinh(t)/t dt
        for &x in &[1e-4, 0.5, 3.0, 6.0, 20.0, 39.0, 41.0, 80.0] {
            let shi =
                adaptive(|t: f64| if t == 0.0 { 1.0 } else { t.sinh() / t }, 0.0, x, 0.0, 1e-15, 2000).unwrap().value;
            let (pos, neg) = (exp_integral_ei(x).unwrap(), exp_integral_ei(-x).unwrap());
            let scale = pos.abs() + neg.abs();
            assert!((pos - neg - 2.0 * shi).abs() <= 1e-13 * scale, "x = {x}");
        }
    }

    #[test]
    fn ei_errors() {
        assert!(matches!(exp_integral_ei(0.0), Err(Error::Domain(_))));
        assert!(matches!(exp_integral_ei(701.0), Err(Error::Overflow(_))));
        assert!(exp_integral_ei(700.0).unwrap().is_finite());
    }

    #[test]
    fn ei_asymptotic_tail() {
        let x: f64 = 1e4;
        let v = -x * scaled_e1(x).unwrap();
        let oracle = 1.0 - 1.0 / x + 2.0 / (x * x);
        assert!((-v - oracle).abs() < 2e-4);
        assert!(((-v) - 1.0).abs() < 2e-4);
    }

    #[test]
    fn scaled_e1_matches_unscaled() {
        for &x in &[1e-3f64, 0.7, 1.0, 1.5, 10.0, 100.0] {
            let direct = -x.exp() * exp_integral_ei(-x).unwrap();
            assert_relative_eq!(scaled_e1(x).unwrap(), direct, max_relative = 1e-13);
        }
    }

    #[test]
    fn j0_values() {
        assert_eq!(bessel_j0(0.0), 1.0);
        assert_relative_eq!(bessel_j0(1.0), 0.765_197_686_557_966_6, max_relative = 1e-14);
        assert_eq!(bessel_j0(-7.3), bessel_j0(7.3));
        // Dense trapezoid as an independent oracle.
        let b = 2.5;
        let dense = crate::quad::periodic_trapezoid(|t| (b * t.cos()).cos(), 400) / TAU;
        assert!((bessel_j0(b) - dense).abs() < 1e-10);
    }

    #[test]
    fn j0_first_zero() {
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if bessel_j0(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((0.5 * (lo + hi) - 2.404_825_557_695_773).abs() < 1e-12);
    }

    #[test]
    fn j0_large_argument_against_dense_rule() {
        for &b in &[50.0, 333.3, 1000.0] {
            let dense = crate::quad::periodic_trapezoid(|t| (b * t.cos()).cos(), 8192) / TAU;
            assert!((bessel_j0(b) - dense).abs() < 1e-12, "b = {b}");
        }
    }

    #[test]
    fn principal_sqrt_examples() {
        let w = principal_sqrt(BranchedComplex::real(4.0)).unwrap();
        assert_eq!(w, BranchedComplex::real(2.0));
        let w = principal_sqrt(BranchedComplex::new(0.0, 2.0)).unwrap();
        assert_relative_eq!(w.re, 1.0, max_relative = 1e-15);
        assert_relative_eq!(w.im, 1.0, max_relative = 1e-15);
        let lam = BranchedComplex::new(1.0, -1.0);
        let w = principal_sqrt(lam.square()).unwrap();
        assert_relative_eq!(w.re, 1.0, max_relative = 1e-15);
        assert_relative_eq!(w.im, -1.0, max_relative = 1e-15);
        assert!(matches!(principal_sqrt(BranchedComplex::real(-1.0)), Err(Error::BranchCut { .. })));
    }

    #[test]
    fn principal_sqrt_of_square_recovers_right_half_plane() {
        // a > |t|: (a - it)^2 stays off the cut and the root is a - it.
        for &(a, t) in &[(1.0, 0.5), (2.0, -1.9), (3.0, 0.0), (0.5, 0.1)] {
            let lam = BranchedComplex::new(a, -t);
            let w = principal_sqrt(lam.square()).unwrap();
            assert_relative_eq!(w.re, a, max_relative = 1e-14);
            assert!((w.im + t).abs() < 1e-14);
        }
        // a < |t|: compare against the polar form.
        for &(a, t) in &[(0.5, 1.0), (0.1, -3.0), (1.0, 4.0)] {
            let z = BranchedComplex::new(a, -t).square();
            let w = principal_sqrt(z).unwrap();
            let (r, phi) = (z.abs(), z.im.atan2(z.re));
            assert_relative_eq!(w.re, r.sqrt() * (0.5 * phi).cos(), max_relative = 1e-13);
            assert_relative_eq!(w.im, r.sqrt() * (0.5 * phi).sin(), max_relative = 1e-13);
        }
    }

    #[test]
    fn laplace_kernel_small_a_limit() {
        let v = laplace_j0_kernel(BranchedComplex::real(1.0), 1e-9, 1.0).unwrap();
        assert_relative_eq!(v.re, (-1.0f64).exp(), max_relative = 1e-12);
        assert_eq!(v.im, 0.0);
        assert!(matches!(laplace_j0_kernel(BranchedComplex::new(0.0, 1.0), 1.0, 1.0), Err(Error::Domain(_))));
    }

    fn laplace_oracle(lambda: BranchedComplex, a: f64, b: f64, upper: f64) -> BranchedComplex {
        // u = b cosh(v) removes the square-root kink at u = b.
        let vmax = (upper / b).acosh();
        adaptive(
            |v: f64| {
                let u = b * v.cosh();
                let w = (-(lambda * u)).exp();
                w * (bessel_j0(a * b * v.sinh()) * b * v.sinh())
            },
            0.0,
            vmax,
            1e-15,
            1e-13,
            4000,
        )
        .unwrap()
        .value
    }

    #[test]
    fn laplace_kernel_matches_quadrature() {
        let lam = BranchedComplex::real(2.0);
        let q = laplace_oracle(lam, 1.0, 1.0, 50.0);
        let v = laplace_j0_kernel(lam, 1.0, 1.0).unwrap();
        assert!((v - q).abs() < 1e-10, "{v} vs {q}");

        let lam = BranchedComplex::new(1.0, -1.0);
        let q = laplace_oracle(lam, 1.0, 2.0, 50.0);
        let v = laplace_j0_kernel(lam, 1.0, 2.0).unwrap();
        assert!((v - q).abs() < 1e-8, "{v} vs {q}");
    }
}
