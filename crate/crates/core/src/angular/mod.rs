//! Clebsch-Gordan coefficients, Wigner D matrices and Wigner 9j symbols.
//!
//! Coefficients that decide whether a coupling vanishes are exact ([`SqrtRational`]); the
//! float tables used inside tensor products are derived separately and tested against them.

mod cg;
mod exact;
mod ninej;
mod wigner_d;

pub use cg::{cg, cg_f64, cg_table, cg_zero, clebsch_gordan, CgKey, CgTable};
pub use exact::{factorial, Incommensurate, SqrtRational, SqrtSum};
pub use ninej::{wigner_9j, wigner_9j_spin1, wigner_9j_spin1_exact, NineJKey};
pub use wigner_d::{wigner_d_matrix, wigner_small_d, DMatrix, Rotation};

use crate::error::{invalid, Result};

/// Triangular delta on signed inputs: `Ok(1)` iff the three values can be triangle sides.
pub fn triangle_delta(a: i64, b: i64, c: i64) -> Result<u8> {
    if a < 0 || b < 0 || c < 0 {
        return Err(invalid(format!(
            "triangle_delta needs non-negative inputs, got ({a}, {b}, {c})"
        )));
    }
    Ok(u8::from(a <= b + c && b <= a + c && c <= a + b))
}

#[inline]
pub(crate) fn triangle(a: u32, b: u32, c: u32) -> bool {
    a <= b + c && b <= a + c && c <= a + b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_examples() {
        assert_eq!(triangle_delta(1, 1, 1).unwrap(), 1);
        assert_eq!(triangle_delta(0, 0, 1).unwrap(), 0);
        assert_eq!(triangle_delta(1, 2, 3).unwrap(), 1);
        assert!(triangle_delta(-1, 0, 1).is_err());
    }
}
