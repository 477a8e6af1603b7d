//! Scalar spherical harmonics on Gauss–Legendre grids.
//!
//! Synthesis and analysis are separable: a Legendre sum per theta row and a direct Fourier sum
//! per phi ring, `O(L^3)` overall. Analysis integrates against `conj(Y_l^m)`.

mod coeffs;
mod gaunt;
mod grid;
mod legendre;
mod transform;

pub use coeffs::random_vector;
pub(crate) use coeffs::{max_diff, max_norm};
pub use coeffs::{BlockKey, IrrepCoeffs, Tag};
pub use gaunt::{gaunt_coefficient, gaunt_exact};
pub use grid::{make_grid, SphereGrid};
pub use transform::{
    analysis_flops, from_sphere, from_sphere_counted, from_sphere_degrees_counted, sh_eval,
    synthesis_flops, to_sphere, to_sphere_counted, y00, ScalarSignal,
};

#[cfg(test)]
mod tests;
