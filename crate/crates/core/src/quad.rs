//! Quadrature rules shared by the oracles: Gauss–Legendre (fixed and
//! composite), adaptive Gauss–Kronrod 21 and the periodic trapezoid rule.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Rule selector carried in a [`QuadSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadRule {
    /// Tensor Gauss–Legendre on mapped coordinates.
    Tensor,
    /// Seeded Monte-Carlo importance sampling.
    MonteCarlo,
}

/// Budget for an oracle computation.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadSpec {
    pub rule: QuadRule,
    /// Truncation radius on the frequency side (|y| ≤ radius).
    pub radius: f64,
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
    /// Panels per radial direction.
    pub panels: usize,
    /// Monte-Carlo sample count.
    pub samples: usize,
    pub seed: u64,
    /// Rate `β` of the Monte-Carlo proposal density `∝ e^{−βψ_s}/ψ_s`.
    pub importance_rate: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of subintervals for adaptive rules.
    pub max_intervals: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            rule: QuadRule::Tensor,
            radius: 40.0,
            nodes: 16,
            panels: 48,
            samples: 1_000_000,
            seed: 0,
            importance_rate: 1.0,
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_intervals: 4000,
        }
    }
}

impl QuadSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_importance_rate(mut self, rate: f64) -> Self {
        self.importance_rate = rate;
        self
    }

    pub fn with_resolution(mut self, nodes: usize, panels: usize) -> Self {
        self.nodes = nodes;
        self.panels = panels;
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn with_rule(mut self, rule: QuadRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }
}

/// A numerical result together with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<V = f64> {
    pub value: V,
    pub error: f64,
}

/// Values that can be integrated: reals and complex numbers.
pub trait Integrand: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<V: Integrand, F: Fn(f64) -> V>(&self, f: F, a: f64, b: f64) -> V {
        self.mapped(a, b).fold(V::zero(), |acc, (x, w)| acc + f(x) * w)
    }

    /// Composite rule with `panels` equal panels on [a, b].
    pub fn composite<V: Integrand, F: Fn(f64) -> V>(&self, f: F, a: f64, b: f64, panels: usize) -> V {
        let h = (b - a) / panels as f64;
        (0..panels).fold(V::zero(), |acc, k| {
            let lo = a + h * k as f64;
            acc + self.integrate(&f, lo, lo + h)
        })
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Cached Gauss–Legendre rule of the given order (orders up to 128 are cached).
pub fn gauss_legendre(n: usize) -> &'static GaussLegendre {
    static CACHE: OnceLock<Vec<GaussLegendre>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| (1..=128).map(GaussLegendre::new).collect());
    assert!((1..=128).contains(&n), "cached Gauss-Legendre orders are 1..=128");
    &cache[n - 1]
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

// Weights of the embedded 10-point Gauss rule (nodes XGK[1], XGK[3], ...).
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// One application of the 21-point Kronrod rule with its Gauss-10 error estimate.
pub fn gauss_kronrod21<V: Integrand, F: Fn(f64) -> V>(f: &F, a: f64, b: f64) -> Estimate<V> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = fc * WGK[10];
    let mut gauss = V::zero();
    for j in 0..10 {
        let dx = half * XGK[j];
        let sum = f(mid - dx) + f(mid + dx);
        kronrod = kronrod + sum * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + sum * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).magnitude();
    Estimate { value, error }
}

struct Interval<V> {
    a: f64,
    b: f64,
    est: Estimate<V>,
}

impl<V> PartialEq for Interval<V> {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}

impl<V> Eq for Interval<V> {}

impl<V> PartialOrd for Interval<V> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<V> Ord for Interval<V> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive Gauss–Kronrod integration on [a, b].
///
/// Bisects the interval with the largest error estimate until the summed
/// error is below `max(abs_tol, rel_tol * |I|)`. Fails with
/// [`Error::Budget`] if `max_intervals` is reached first.
pub fn adaptive<V: Integrand, F: Fn(f64) -> V>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Estimate<V>> {
    if a == b {
        return Ok(Estimate { value: V::zero(), error: 0.0 });
    }
    let first = gauss_kronrod21(&f, a, b);
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(Interval { a, b, est: first });

    loop {
        let tol = abs_tol.max(rel_tol * total.magnitude());
        if total_err <= tol {
            break;
        }
        if heap.len() >= max_intervals {
            return Err(Error::Budget(format!(
                "adaptive quadrature on [{a}, {b}] stopped at {} intervals with error {total_err:.3e} > {tol:.3e}",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval can no longer be split in floating point; accept it.
            heap.push(worst);
            break;
        }
        let left = gauss_kronrod21(&f, worst.a, mid);
        let right = gauss_kronrod21(&f, mid, worst.b);
        total = total - worst.est.value + left.value + right.value;
        total_err += left.error + right.error - worst.est.error;
        heap.push(Interval { a: worst.a, b: mid, est: left });
        heap.push(Interval { a: mid, b: worst.b, est: right });
    }

    // Re-sum to shed the drift of the running updates.
    let mut value = V::zero();
    let mut error = 0.0;
    for iv in heap.iter() {
        value = value + iv.est.value;
        error += iv.est.error;
    }
    Ok(Estimate { value, error })
}

/// Adaptive integration over a union of consecutive breakpoints.
pub fn adaptive_with_breaks<V: Integrand, F: Fn(f64) -> V>(
    f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Estimate<V>> {
    let pieces = breaks.len().saturating_sub(1).max(1) as f64;
    let mut value = V::zero();
    let mut error = 0.0;
    for w in breaks.windows(2) {
        let est = adaptive(&f, w[0], w[1], abs_tol / pieces, rel_tol, max_intervals)?;
        value = value + est.value;
        error += est.error;
    }
    Ok(Estimate { value, error })
}

/// Trapezoid rule for a 2π-periodic function with `n` equispaced nodes
/// (mean value times 2π). Spectrally accurate for analytic integrands.
pub fn periodic_trapezoid<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
    let h = std::f64::consts::TAU / n as f64;
    let sum = pairwise_sum(&(0..n).map(|k| f(h * k as f64)).collect::<Vec<_>>());
    sum * h
}

/// Pairwise (cascade) summation; deterministic for a fixed input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let (l, r) = values.split_at(values.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}
