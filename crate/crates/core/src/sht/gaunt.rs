use std::f64::consts::PI;

use num_bigint::BigUint;

use crate::angular::{cg_zero, clebsch_gordan, SqrtRational};

/// `int Y_{l1}^{m1} Y_{l2}^{m2} conj(Y_{l3}^{m3}) dS`.
pub fn gaunt_coefficient(l1: u32, m1: i32, l2: u32, m2: i32, l3: u32, m3: i32) -> f64 {
    gaunt_exact(l1, m1, l2, m2, l3, m3).to_f64() / (4.0 * PI).sqrt()
}

/// The Gaunt coefficient times `sqrt(4 pi)`, exactly.
pub fn gaunt_exact(l1: u32, m1: i32, l2: u32, m2: i32, l3: u32, m3: i32) -> SqrtRational {
    let c = clebsch_gordan(l1, m1, l2, m2, l3, m3);
    if c.is_zero() {
        return SqrtRational::zero();
    }
    let pre = SqrtRational::new(
        1,
        BigUint::from((2 * l1 + 1) as u64 * (2 * l2 + 1) as u64),
        BigUint::from(2 * l3 as u64 + 1),
    );
    pre.mul(&c).mul(&cg_zero(l1, l2, l3))
}
