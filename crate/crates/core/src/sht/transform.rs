use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::coeffs::{BlockKey, IrrepCoeffs};
use super::grid::SphereGrid;
use super::legendre::{legendre_row, lm_index};
use crate::error::{invalid, precondition, Result};

/// Complex samples on a sphere grid, row-major over `(theta_i, phi_k)`.
#[derive(Clone, Debug)]
pub struct ScalarSignal {
    pub grid: Arc<SphereGrid>,
    pub values: Vec<Complex64>,
}

impl ScalarSignal {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(invalid(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.n_points()
            )));
        }
        Ok(ScalarSignal { grid, values })
    }

    pub fn zeros(grid: Arc<SphereGrid>) -> Self {
        let n = grid.n_points();
        ScalarSignal {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Samples `f(point)` at every node.
    pub fn from_fn(grid: Arc<SphereGrid>, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.n_points());
        for i in 0..grid.n_theta() {
            for k in 0..grid.n_phi() {
                values.push(f(grid.theta(i), grid.phi(k)));
            }
        }
        ScalarSignal { grid, values }
    }

    pub fn at(&self, i: usize, k: usize) -> Complex64 {
        self.values[i * self.grid.n_phi() + k]
    }
}

/// `Y_l^m(theta, phi)`, complex with the Condon–Shortley phase.
pub fn sh_eval(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() > l {
        return Err(invalid(format!(
            "|m| = {} exceeds l = {l}",
            m.unsigned_abs()
        )));
    }
    let row = legendre_row(l, theta.cos(), theta.sin());
    let p = row[lm_index(l, m.unsigned_abs())];
    let p = if m < 0 && m % 2 != 0 { -p } else { p };
    Ok(Complex64::from_polar(1.0, m as f64 * phi) * p)
}

/// `Pbar_l^m` extended to negative `m` by `Pbar_l^{-m} = (-1)^m Pbar_l^m`.
#[inline]
fn plm_signed(grid: &SphereGrid, i: usize, l: u32, m: i32) -> f64 {
    let p = grid.plm(i, l, m.unsigned_abs());
    if m < 0 && m % 2 != 0 {
        -p
    } else {
        p
    }
}

/// MACs of [`to_sphere`] for blocks of the given degrees, for budget projections.
pub fn synthesis_flops(grid: &SphereGrid, degrees: impl IntoIterator<Item = u32>) -> u64 {
    let mut legendre = 0u64;
    let mut mmax = None;
    for l in degrees {
        legendre += 2 * l as u64 + 1;
        mmax = Some(mmax.map_or(l, |m: u32| m.max(l)));
    }
    let Some(mmax) = mmax else { return 0 };
    grid.n_theta() as u64 * (legendre + grid.n_phi() as u64 * (2 * mmax as u64 + 1))
}

/// MACs of [`from_sphere_degrees_counted`] for the given output degrees.
pub fn analysis_flops(grid: &SphereGrid, degrees: impl IntoIterator<Item = u32>) -> u64 {
    let mut legendre = 0u64;
    let mut mmax = None;
    for l in degrees {
        legendre += 2 * l as u64 + 1;
        mmax = Some(mmax.map_or(l, |m: u32| m.max(l)));
    }
    let Some(mmax) = mmax else { return 0 };
    grid.n_theta() as u64 * (grid.n_phi() as u64 * (2 * mmax as u64 + 1) + legendre)
}

/// Synthesis `f(theta_i, phi_k) = sum x^{(l)}_m Y_l^m`; tags are ignored.
pub fn to_sphere(x: &IrrepCoeffs, grid: &Arc<SphereGrid>) -> Result<ScalarSignal> {
    to_sphere_counted(x, grid, &mut 0)
}

pub fn to_sphere_counted(
    x: &IrrepCoeffs,
    grid: &Arc<SphereGrid>,
    flops: &mut u64,
) -> Result<ScalarSignal> {
    if grid.lg() < x.lmax() {
        return Err(precondition(format!(
            "grid degree {} is below band limit {}",
            grid.lg(),
            x.lmax()
        )));
    }
    let blocks: Vec<(u32, &[Complex64])> = x.blocks().map(|(k, v)| (k.j, v)).collect();
    let mut out = ScalarSignal::zeros(Arc::clone(grid));
    let Some(mmax) = blocks.iter().map(|(j, _)| *j).max() else {
        return Ok(out);
    };
    let mm = mmax as i32;
    let n_phi = grid.n_phi();
    let mut c = vec![Complex64::new(0.0, 0.0); 2 * mmax as usize + 1];
    for i in 0..grid.n_theta() {
        c.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (l, v) in &blocks {
            let li = *l as i32;
            for m in -li..=li {
                c[(m + mm) as usize] += v[(m + li) as usize] * plm_signed(grid, i, *l, m);
            }
            *flops += 2 * *l as u64 + 1;
        }
        let row = &mut out.values[i * n_phi..(i + 1) * n_phi];
        for (k, f) in row.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in -mm..=mm {
                acc += c[(m + mm) as usize] * grid.twiddle(m as i64, k);
            }
            *f = acc;
        }
        *flops += n_phi as u64 * (2 * mmax as u64 + 1);
    }
    Ok(out)
}

/// Analysis `x^{(l)}_m = sum_nodes w f conj(Y_l^m)` for every `l <= lmax`.
pub fn from_sphere(f: &ScalarSignal, lmax: u32) -> Result<IrrepCoeffs> {
    from_sphere_counted(f, lmax, &mut 0)
}

pub fn from_sphere_counted(f: &ScalarSignal, lmax: u32, flops: &mut u64) -> Result<IrrepCoeffs> {
    let degrees: Vec<u32> = (0..=lmax).collect();
    from_sphere_degrees_counted(f, lmax, &degrees, flops)
}

/// Analysis restricted to `degrees` (each `<= lmax`); other blocks are not produced.
pub fn from_sphere_degrees_counted(
    f: &ScalarSignal,
    lmax: u32,
    degrees: &[u32],
    flops: &mut u64,
) -> Result<IrrepCoeffs> {
    let grid = &f.grid;
    if lmax > grid.lg() {
        return Err(precondition(format!(
            "analysis degree {lmax} exceeds grid degree {}",
            grid.lg()
        )));
    }
    if let Some(&l) = degrees.iter().find(|&&l| l > lmax) {
        return Err(invalid(format!(
            "requested degree {l} exceeds band limit {lmax}"
        )));
    }
    let mut out = IrrepCoeffs::new(lmax);
    let Some(&top) = degrees.iter().max() else {
        return Ok(out);
    };
    let mm = top as i32;
    let n_phi = grid.n_phi();
    let mut acc: Vec<Vec<Complex64>> = degrees
        .iter()
        .map(|&l| vec![Complex64::new(0.0, 0.0); 2 * l as usize + 1])
        .collect();
    let mut g = vec![Complex64::new(0.0, 0.0); 2 * top as usize + 1];
    for i in 0..grid.n_theta() {
        let row = &f.values[i * n_phi..(i + 1) * n_phi];
        for m in -mm..=mm {
            let mut s = Complex64::new(0.0, 0.0);
            for (k, v) in row.iter().enumerate() {
                s += v * grid.twiddle(-(m as i64), k);
            }
            g[(m + mm) as usize] = s * grid.area_weight(i);
        }
        *flops += n_phi as u64 * (2 * top as u64 + 1);
        for (&l, a) in degrees.iter().zip(acc.iter_mut()) {
            let li = l as i32;
            for m in -li..=li {
                a[(m + li) as usize] += g[(m + mm) as usize] * plm_signed(grid, i, l, m);
            }
            *flops += 2 * l as u64 + 1;
        }
    }
    for (&l, v) in degrees.iter().zip(acc) {
        out.insert(BlockKey::plain(l), v)?;
    }
    Ok(out)
}

/// `1 / sqrt(4 pi)`, the value of `Y_0^0`.
pub fn y00() -> f64 {
    1.0 / (4.0 * PI).sqrt()
}
