//! Clebsch-Gordan, Gaunt and tensor-spherical-harmonic tensor products on the sphere.
//!
//! Modules follow the data flow: [`angular`] supplies exact coupling coefficients,
//! [`sht`] moves scalar coefficients to and from sphere grids, [`tsh`] lifts that to
//! spin-valued signals, [`tenprod`] builds every tensor product on top, [`rules`]
//! predicts which couplings survive and [`bench`] counts what they cost.

pub mod angular;
pub mod bench;
pub mod error;
pub mod io;
pub mod rules;
pub mod sht;
pub mod tenprod;
pub mod tsh;

pub use error::{Error, Result};
pub use num_complex::Complex64;
