//! Spacetime points, the Lorentz maps preserving the hyperboloid, and the
//! quasi-metrics `d_s`, `D_s` with the kernel `K_s = 1/(d_s + 1)`.
//!
//! Coordinates are ordered `(ξ₁, …, ξ_d, τ)` and the invariant form is
//! `x·Jy` with `J = diag(−1, …, −1, +1)`.

use rand::Rng;

use crate::error::{Error, Result};

/// Dimension `d` of the hyperboloid and its mass `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperboloidParams {
    d: usize,
    s: f64,
}

impl HyperboloidParams {
    pub fn new(d: usize, s: f64) -> Result<Self> {
        if !(d == 2 || d == 3) {
            return Err(Error::Unsupported(format!("dimension d = {d}; only d = 2 and d = 3 are supported")));
        }
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Domain(format!("mass s must be positive and finite, got {s}")));
        }
        Ok(HyperboloidParams { d, s })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `ψ_s(r) = √(s² + r²)`.
    pub fn psi(&self, r: f64) -> f64 {
        self.s.hypot(r)
    }

    pub fn psi_vec(&self, y: &[f64]) -> f64 {
        self.psi(norm(y))
    }

    /// The point `(y, ψ_s(y))` of the upper sheet.
    pub fn lift(&self, y: &[f64]) -> SpacetimePoint {
        SpacetimePoint::new(y.to_vec(), self.psi_vec(y))
    }
}

/// A frequency-side point `(ξ, τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacetimePoint {
    pub xi: Vec<f64>,
    pub tau: f64,
}

impl SpacetimePoint {
    pub fn new(xi: Vec<f64>, tau: f64) -> Self {
        SpacetimePoint { xi, tau }
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn xi_norm(&self) -> f64 {
        norm(&self.xi)
    }

    /// `τ² − |ξ|²`, factored to avoid cancellation near the cone.
    pub fn interval(&self) -> f64 {
        let r = self.xi_norm();
        (self.tau - r) * (self.tau + r)
    }

    /// Membership in the open region `{τ > √((ns)² + |ξ|²)}`.
    pub fn in_region(&self, n: usize, s: f64) -> bool {
        self.tau > 0.0 && self.interval() > (n as f64 * s).powi(2)
    }

    fn coords(&self) -> Vec<f64> {
        let mut v = self.xi.clone();
        v.push(self.tau);
        v
    }

    fn from_coords(c: &[f64]) -> Self {
        let d = c.len() - 1;
        SpacetimePoint::new(c[..d].to_vec(), c[d])
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A `(d+1)×(d+1)` linear map preserving `x·Jy`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzMap {
    d: usize,
    m: Vec<f64>,
}

impl LorentzMap {
    pub fn identity(d: usize) -> Self {
        let n = d + 1;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = 1.0;
        }
        LorentzMap { d, m }
    }

    /// Builds a map from an arbitrary matrix after checking `mᵀJm = J` and
    /// that the forward cone is preserved.
    pub fn from_matrix(d: usize, rows: &[Vec<f64>]) -> Result<Self> {
        let n = d + 1;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Validation(format!("expected a {n}x{n} matrix")));
        }
        let map = LorentzMap { d, m: rows.concat() };
        let defect = map.form_defect();
        if defect > 1e-10 {
            return Err(Error::Validation(format!("matrix does not preserve the form (defect {defect:.3e})")));
        }
        if map.entry(d, d) <= 0.0 {
            return Err(Error::Validation("matrix reverses time orientation".into()));
        }
        Ok(map)
    }

    /// The boost `L^t`: hyperbolic rotation of `(ξ₁, τ)` with factor `1/√(1−t²)`.
    pub fn boost(t: f64, d: usize) -> Result<Self> {
        if !(t.abs() < 1.0) {
            return Err(Error::Domain(format!("boost parameter must satisfy |t| < 1, got {t}")));
        }
        let gamma = 1.0 / ((1.0 - t) * (1.0 + t)).sqrt();
        let mut map = LorentzMap::identity(d);
        map.set(0, 0, gamma);
        map.set(0, d, gamma * t);
        map.set(d, 0, gamma * t);
        map.set(d, d, gamma);
        Ok(map)
    }

    /// `R_A(ξ, τ) = (Aξ, τ)` for an orthogonal `A` given as rows.
    pub fn rotation_embed(a: &[Vec<f64>]) -> Result<Self> {
        let d = a.len();
        if a.iter().any(|r| r.len() != d) {
            return Err(Error::Validation("rotation block must be square".into()));
        }
        for i in 0..d {
            for j in 0..d {
                let g: f64 = (0..d).map(|k| a[k][i] * a[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (g - target).abs() > 1e-10 {
                    return Err(Error::Validation(format!("matrix is not orthogonal: (AᵀA)[{i}][{j}] = {g}")));
                }
            }
        }
        let mut map = LorentzMap::identity(d);
        for (i, row) in a.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                map.set(i, j, v);
            }
        }
        Ok(map)
    }

    /// `P_{i,j}`: swaps spatial components `i` and `j` (1-based).
    pub fn coord_swap(i: usize, j: usize, d: usize) -> Result<Self> {
        if !(1..=d).contains(&i) || !(1..=d).contains(&j) {
            return Err(Error::Domain(format!("swap indices must lie in 1..={d}, got ({i}, {j})")));
        }
        let mut map = LorentzMap::identity(d);
        if i != j {
            let (a, b) = (i - 1, j - 1);
            map.set(a, a, 0.0);
            map.set(b, b, 0.0);
            map.set(a, b, 1.0);
            map.set(b, a, 1.0);
        }
        Ok(map)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[i * (self.d + 1) + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let n = self.d + 1;
        self.m[i * n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.m.chunks(self.d + 1).map(<[f64]>::to_vec).collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &LorentzMap) -> LorentzMap {
        assert_eq!(self.d, other.d, "dimension mismatch in compose");
        let n = self.d + 1;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = (0..n).map(|k| self.entry(i, k) * other.entry(k, j)).sum();
            }
        }
        LorentzMap { d: self.d, m }
    }

    /// Inverse `J mᵀ J`.
    pub fn inverse(&self) -> LorentzMap {
        let n = self.d + 1;
        let sign = |i: usize| if i == self.d { 1.0 } else { -1.0 };
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = sign(i) * self.entry(j, i) * sign(j);
            }
        }
        LorentzMap { d: self.d, m }
    }

    pub fn apply_coords(&self, x: &[f64]) -> Vec<f64> {
        let n = self.d + 1;
        (0..n).map(|i| dot(&self.m[i * n..(i + 1) * n], x)).collect()
    }

    pub fn apply(&self, p: &SpacetimePoint) -> SpacetimePoint {
        assert_eq!(p.dim(), self.d, "dimension mismatch in apply");
        SpacetimePoint::from_coords(&self.apply_coords(&p.coords()))
    }

    /// Largest entry of `|mᵀJm − J|`.
    pub fn form_defect(&self) -> f64 {
        let n = self.d + 1;
        let sign = |k: usize| if k == self.d { 1.0 } else { -1.0 };
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let g: f64 = (0..n).map(|k| self.entry(k, i) * sign(k) * self.entry(k, j)).sum();
                let target = if i == j { sign(i) } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    /// Samples `samples` points of the forward cone and counts those mapped outside it.
    pub fn cone_violations<R: Rng>(&self, rng: &mut R, samples: usize) -> usize {
        (0..samples)
            .filter(|_| {
                let xi: Vec<f64> = (0..self.d).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let tau = norm(&xi) * (1.0 + rng.gen_range(1e-6..2.0)) + 1e-9;
                let q = self.apply(&SpacetimePoint::new(xi, tau));
                !(q.tau > q.xi_norm())
            })
            .count()
    }
}

/// Reduces `(ξ, τ)` with `τ > |ξ|` to `(0, m)`, `m = √(τ²−|ξ|²)`.
///
/// The map is `L^t ∘ R_A` with `A ∈ O(d)` sending `ξ` to `(|ξ|, 0, …, 0)`
/// and `t = −|ξ|/τ`.
pub fn normal_form(p: &SpacetimePoint) -> Result<(LorentzMap, f64)> {
    let d = p.dim();
    let r = p.xi_norm();
    if !(p.tau > r) {
        return Err(Error::OutsideCone { tau: p.tau, xi_norm: r });
    }
    let m = p.interval().sqrt();
    if r == 0.0 {
        return Ok((LorentzMap::identity(d), m));
    }
    // Householder reflection followed by a sign flip of the first axis,
    // choosing the reflection vector that avoids cancellation.
    let sign = if p.xi[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = p.xi.clone();
    v[0] += sign * r;
    let vv = dot(&v, &v);
    let mut a = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            let delta = if i == j { 1.0 } else { 0.0 };
            a[i][j] = delta - 2.0 * v[i] * v[j] / vv;
        }
    }
    for entry in a[0].iter_mut() {
        *entry *= -sign;
    }
    let rotation = LorentzMap::rotation_embed(&a)?;
    let boost = LorentzMap::boost(-r / p.tau, d)?;
    Ok((boost.compose(&rotation), m))
}

fn wedge_sq(x: &[f64], y: &[f64]) -> f64 {
    let dlt: Vec<f64> = y.iter().zip(x).map(|(b, a)| b - a).collect();
    match x.len() {
        2 => (x[0] * dlt[1] - x[1] * dlt[0]).powi(2),
        3 => {
            let c0 = x[1] * dlt[2] - x[2] * dlt[1];
            let c1 = x[2] * dlt[0] - x[0] * dlt[2];
            let c2 = x[0] * dlt[1] - x[1] * dlt[0];
            c0 * c0 + c1 * c1 + c2 * c2
        }
        _ => {
            let xx = dot(x, x);
            (xx * dot(y, y) - dot(x, y).powi(2)).max(0.0)
        }
    }
}

// ψψ' − s² − x·y, evaluated without cancellation near the diagonal.
fn excess(params: &HyperboloidParams, x: &[f64], y: &[f64]) -> f64 {
    let s2 = params.s * params.s;
    let px = params.psi_vec(x);
    let py = params.psi_vec(y);
    let xy = dot(x, y);
    if s2 + xy > 0.0 {
        let diff_sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
        (s2 * diff_sq + wedge_sq(x, y)) / (px * py + s2 + xy)
    } else {
        px * py - s2 - xy
    }
}

/// `d_s(x, y) = (1/2s)((ψ_s(x)+ψ_s(y))² − |x+y|²)^{1/2} − 1`.
pub fn ds_metric(params: &HyperboloidParams, x: &[f64], y: &[f64]) -> f64 {
    let s = params.s;
    let e = excess(params, x, y);
    e / (s * ((4.0 * s * s + 2.0 * e).sqrt() + 2.0 * s))
}

/// `D_s(p₁, p₂) = (2s)⁻¹((τ₁+τ₂)² − |ξ₁+ξ₂|²)^{1/2} − 1`.
pub fn ds_lifted_metric(params: &HyperboloidParams, p1: &SpacetimePoint, p2: &SpacetimePoint) -> Result<f64> {
    let sum_xi: Vec<f64> = p1.xi.iter().zip(&p2.xi).map(|(a, b)| a + b).collect();
    let total = SpacetimePoint::new(sum_xi, p1.tau + p2.tau);
    let radicand = total.interval();
    if !(total.tau > 0.0 && radicand > 0.0) {
        return Err(Error::Domain(format!("D_s radicand is not positive ({radicand})")));
    }
    Ok(radicand.sqrt() / (2.0 * params.s) - 1.0)
}

/// `K_s(x, y) = 2s / ((ψ_s(x)+ψ_s(y))² − |x+y|²)^{1/2} = 1/(d_s + 1)`.
pub fn kernel_ks(params: &HyperboloidParams, x: &[f64], y: &[f64]) -> f64 {
    1.0 / (ds_metric(params, x, y) + 1.0)
}

/// Empirical constants with `c1 |x−y|² ≤ d_s(x,y) ≤ c2 |x−y|` on a ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DsBounds {
    pub radius: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Fits the local comparison constants of `d_s` on `B(0, radius)` from
/// `samples` random pairs.
pub fn fit_ds_bounds<R: Rng>(params: &HyperboloidParams, radius: f64, samples: usize, rng: &mut R) -> DsBounds {
    let mut c1 = f64::INFINITY;
    let mut c2: f64 = 0.0;
    for _ in 0..samples {
        let x = random_in_ball(rng, params.d, radius);
        let y = random_in_ball(rng, params.d, radius);
        let dist = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if dist < 1e-9 {
            continue;
        }
        let v = ds_metric(params, &x, &y);
        c1 = c1.min(v / (dist * dist));
        c2 = c2.max(v / dist);
    }
    DsBounds { radius, c1, c2 }
}

/// Counts violations of `B(y, c r) ⊂ B_{d_s}(y, r) ⊂ B(y, c'√r)` with
/// `c = 1/c2`, `c' = 1/√c1` for random centres, radii and probe points.
pub fn ball_inclusion_violations<R: Rng>(
    params: &HyperboloidParams,
    bounds: &DsBounds,
    samples: usize,
    rng: &mut R,
) -> usize {
    let c = 1.0 / bounds.c2;
    let c_prime = 1.0 / bounds.c1.sqrt();
    let mut violations = 0;
    for _ in 0..samples {
        let y = random_in_ball(rng, params.d, bounds.radius);
        let x = random_in_ball(rng, params.d, bounds.radius);
        let r = 10f64.powf(rng.gen_range(-4.0..1.0));
        let dist = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let dsv = ds_metric(params, &x, &y);
        if dist < c * r && dsv > r {
            violations += 1;
        }
        if dsv <= r && dist > c_prime * r.sqrt() {
            violations += 1;
        }
    }
    violations
}

/// Uniform sample from the Euclidean ball `B(0, radius) ⊂ ℝ^d`.
pub fn random_in_ball<R: Rng>(rng: &mut R, d: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n2 = dot(&v, &v);
        if n2 <= 1.0 {
            return v.into_iter().map(|c| c * radius).collect();
        }
    }
}

/// Uniformly distributed random rotation in `O(d)` via Gram–Schmidt of a random matrix.
pub fn random_orthogonal<R: Rng>(rng: &mut R, d: usize) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(d);
    while q.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for u in &q {
            let p = dot(&v, u);
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= p * ui;
            }
        }
        let n = norm(&v);
        if n > 1e-3 {
            q.push(v.into_iter().map(|c| c / n).collect());
        }
    }
    q
}

/// A random element of `ℒ⁺` composed from a rotation, a boost with
/// `|t| ≤ max_t`, and a coordinate swap.
pub fn random_lorentz<R: Rng>(rng: &mut R, d: usize, max_t: f64) -> LorentzMap {
    let rot = LorentzMap::rotation_embed(&random_orthogonal(rng, d)).expect("orthogonal by construction");
    let boost = LorentzMap::boost(rng.gen_range(-max_t..max_t), d).expect("|t| < 1");
    let i = rng.gen_range(1..=d);
    let j = rng.gen_range(1..=d);
    let swap = LorentzMap::coord_swap(i, j, d).expect("indices in range");
    swap.compose(&boost).compose(&rot)
}
