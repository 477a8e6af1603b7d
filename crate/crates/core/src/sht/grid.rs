use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;

use super::legendre::{legendre_row, lm_index, table_len};

/// Gauss–Legendre nodes in `cos(theta)` times a uniform `phi` ring.
///
/// With `Lg + 1` theta nodes and `2 Lg + 1` phi nodes the rule integrates every product of two
/// spherical harmonics of degree at most `Lg` exactly.
#[derive(Debug)]
pub struct SphereGrid {
    lg: u32,
    cos_theta: Vec<f64>,
    sin_theta: Vec<f64>,
    weights: Vec<f64>,
    n_phi: usize,
    roots: Vec<Complex64>,
    legendre: Vec<f64>,
}

/// Shared grid of exactness degree `lg`.
pub fn make_grid(lg: u32) -> Arc<SphereGrid> {
    Arc::new(SphereGrid::new(lg))
}

impl SphereGrid {
    pub fn new(lg: u32) -> Self {
        let n = lg as usize + 1;
        let (cos_theta, weights) = gauss_legendre(n);
        let sin_theta: Vec<f64> = cos_theta
            .iter()
            .map(|&x| (1.0 - x * x).max(0.0).sqrt())
            .collect();
        let n_phi = 2 * lg as usize + 1;
        let roots = (0..n_phi)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n_phi as f64))
            .collect();
        let mut legendre = Vec::with_capacity(n * table_len(lg));
        for (&x, &s) in cos_theta.iter().zip(&sin_theta) {
            legendre.extend(legendre_row(lg, x, s));
        }
        SphereGrid {
            lg,
            cos_theta,
            sin_theta,
            weights,
            n_phi,
            roots,
            legendre,
        }
    }

    /// Exactness degree `Lg`.
    pub fn lg(&self) -> u32 {
        self.lg
    }

    pub fn n_theta(&self) -> usize {
        self.cos_theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn n_points(&self) -> usize {
        self.n_theta() * self.n_phi
    }

    /// Nodes in `cos(theta)`, ordered by increasing theta.
    pub fn cos_theta(&self) -> &[f64] {
        &self.cos_theta
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.cos_theta[i].clamp(-1.0, 1.0).acos()
    }

    pub fn phi(&self, k: usize) -> f64 {
        TAU * k as f64 / self.n_phi as f64
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Solid-angle weight of node `(i, k)`.
    pub fn area_weight(&self, i: usize) -> f64 {
        self.weights[i] * TAU / self.n_phi as f64
    }

    /// Unit vector at node `(i, k)`.
    pub fn point(&self, i: usize, k: usize) -> [f64; 3] {
        let (c, s, p) = (self.cos_theta[i], self.sin_theta[i], self.phi(k));
        [s * p.cos(), s * p.sin(), c]
    }

    /// `exp(i m phi_k)`.
    #[inline]
    pub(crate) fn twiddle(&self, m: i64, k: usize) -> Complex64 {
        let idx = (m * k as i64).rem_euclid(self.n_phi as i64) as usize;
        self.roots[idx]
    }

    /// Normalized associated Legendre value for `m >= 0` at theta node `i`.
    #[inline]
    pub(crate) fn plm(&self, i: usize, l: u32, m: u32) -> f64 {
        self.legendre[i * table_len(self.lg) + lm_index(l, m)]
    }
}

/// Gauss–Legendre rule on `[-1, 1]` with nodes in decreasing order.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_p_and_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_p_and_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_p_and_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
