use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigUint;
use num_traits::One;

use super::cg::clebsch_gordan;
use super::exact::{factorial_i64, SqrtRational, SqrtSum};
use super::triangle;
use crate::error::{invalid, Result};

/// The 9j grid `{j1 l1 s1; j2 l2 s2; j3 l3 s3}` in row-major order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NineJKey(pub [u32; 9]);

impl NineJKey {
    pub fn rows(&self) -> [[u32; 3]; 3] {
        let g = &self.0;
        [[g[0], g[1], g[2]], [g[3], g[4], g[5]], [g[6], g[7], g[8]]]
    }

    /// True when every row and column satisfies the triangle condition.
    pub fn couples(&self) -> bool {
        let r = self.rows();
        (0..3).all(|i| triangle(r[i][0], r[i][1], r[i][2]) && triangle(r[0][i], r[1][i], r[2][i]))
    }
}

type Cache = RwLock<HashMap<NineJKey, SqrtRational>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Exact Wigner 9j symbol by contracting six CG coefficients over all magnetic numbers.
pub fn wigner_9j(key: &NineJKey) -> SqrtRational {
    if !key.couples() {
        return SqrtRational::zero();
    }
    if let Some(v) = cache().read().expect("9j cache poisoned").get(key) {
        return v.clone();
    }
    let v = contract(key);
    cache()
        .write()
        .expect("9j cache poisoned")
        .entry(*key)
        .or_insert(v)
        .clone()
}

/// `<(j1 l1)s1,(j2 l2)s2;s3 | (j1 j2)j3,(l1 l2)l3;s3> / sqrt((2s1+1)(2s2+1)(2j3+1)(2l3+1))`,
/// evaluated at total projection 0.
fn contract(key: &NineJKey) -> SqrtRational {
    let [j1, l1, s1, j2, l2, s2, j3, l3, s3] = key.0;
    let r = |j: u32| -(j as i32)..=j as i32;
    let mut sum = SqrtSum::new();
    for mj1 in r(j1) {
        for ml1 in r(l1) {
            let mu1 = mj1 + ml1;
            if mu1.unsigned_abs() > s1 || mu1.unsigned_abs() > s2 {
                continue;
            }
            let mu2 = -mu1;
            let left1 = clebsch_gordan(j1, mj1, l1, ml1, s1, mu1);
            if left1.is_zero() {
                continue;
            }
            let left3 = clebsch_gordan(s1, mu1, s2, mu2, s3, 0);
            if left3.is_zero() {
                continue;
            }
            let left13 = left1.mul_unreduced(&left3);
            for mj2 in r(j2) {
                let ml2 = mu2 - mj2;
                let muj = mj1 + mj2;
                if ml2.unsigned_abs() > l2 || muj.unsigned_abs() > j3 || muj.unsigned_abs() > l3 {
                    continue;
                }
                let mul = ml1 + ml2;
                let factors = [
                    clebsch_gordan(j2, mj2, l2, ml2, s2, mu2),
                    clebsch_gordan(j1, mj1, j2, mj2, j3, muj),
                    clebsch_gordan(l1, ml1, l2, ml2, l3, mul),
                    clebsch_gordan(j3, muj, l3, mul, s3, 0),
                ];
                if factors.iter().any(SqrtRational::is_zero) {
                    continue;
                }
                let term = factors
                    .iter()
                    .fold(left13.clone(), |acc, f| acc.mul_unreduced(f));
                sum.add(&term)
                    .expect("recoupling terms share one square-root class");
            }
        }
    }
    let norm = [2 * s1 + 1, 2 * s2 + 1, 2 * j3 + 1, 2 * l3 + 1]
        .iter()
        .fold(BigUint::one(), |acc, &d| acc * BigUint::from(d));
    sum.finish()
        .mul(&SqrtRational::new(1, BigUint::one(), norm))
}

/// Float value of `{a+lam a 1; b+mu b 1; c+nu c 1}` from the closed-form spin-1 table.
pub fn wigner_9j_spin1(a: u32, lam: i32, b: u32, mu: i32, c: u32, nu: i32) -> Result<f64> {
    wigner_9j_spin1_exact(a, lam, b, mu, c, nu).map(|v| v.to_f64())
}

/// Exact value of `{a+lam a 1; b+mu b 1; c+nu c 1}` from the closed-form spin-1 table.
///
/// Each cell is `pre * sqrt(prod(lin) * prod(num!) / (k * prod(den!)))`, optionally negated.
pub fn wigner_9j_spin1_exact(
    a: u32,
    lam: i32,
    b: u32,
    mu: i32,
    c: u32,
    nu: i32,
) -> Result<SqrtRational> {
    for (name, v) in [("lambda", lam), ("mu", mu), ("nu", nu)] {
        if !(-1..=1).contains(&v) {
            return Err(invalid(format!("{name} = {v} is outside {{-1, 0, 1}}")));
        }
    }
    let (ai, bi, ci) = (a as i64, b as i64, c as i64);
    let (ja, jb, jc) = (ai + lam as i64, bi + mu as i64, ci + nu as i64);
    if ja < 0 || jb < 0 || jc < 0 {
        return Err(invalid("a+lambda, b+mu and c+nu must be non-negative"));
    }
    let key = NineJKey([ja as u32, a, 1, jb as u32, b, 1, jc as u32, c, 1]);
    if !key.couples() {
        return Ok(SqrtRational::zero());
    }
    let cell = spin1_cell(ai, bi, ci, lam, mu, nu);
    Ok(cell.map(|c| c.eval()).unwrap_or_else(SqrtRational::zero))
}

struct Cell {
    pre: i64,
    negate: bool,
    lin: Vec<i64>,
    num: Vec<i64>,
    den: Vec<i64>,
    k: u64,
}

impl Cell {
    fn eval(&self) -> SqrtRational {
        if self.pre == 0 || self.lin.iter().any(|&t| t == 0) {
            return SqrtRational::zero();
        }
        let mut n = BigUint::from(self.pre.unsigned_abs().pow(2));
        for &t in &self.lin {
            if t < 0 {
                return SqrtRational::zero();
            }
            n *= BigUint::from(t as u64);
        }
        for &f in &self.num {
            match factorial_i64(f) {
                Some(v) => n *= v,
                None => return SqrtRational::zero(),
            }
        }
        let mut d = BigUint::from(self.k);
        for &f in &self.den {
            match factorial_i64(f) {
                Some(v) => d *= v,
                None => return SqrtRational::zero(),
            }
        }
        let sign = self.pre.signum() as i8 * if self.negate { -1 } else { 1 };
        SqrtRational::new(sign, n, d)
    }
}

fn spin1_cell(a: i64, b: i64, c: i64, lam: i32, mu: i32, nu: i32) -> Option<Cell> {
    let s = a + b + c;
    let cell = |pre: i64, negate: bool, lin: &[i64], num: &[i64], den: &[i64], k: u64| Cell {
        pre,
        negate,
        lin: lin.to_vec(),
        num: num.to_vec(),
        den: den.to_vec(),
        k,
    };
    let (a2, b2, c2) = (2 * a, 2 * b, 2 * c);
    Some(match (lam, mu, nu) {
        (1, 1, 1) => cell(
            1,
            false,
            &[s - c2 + 1, s - b2 + 1, s - a2 + 1],
            &[s + 4, a2, b2, c2],
            &[s + 1, a2 + 3, b2 + 3, c2 + 3],
            3,
        ),
        (1, 0, 1) => cell(
            c - a,
            false,
            &[2],
            &[s - b2 + 2, s + 3, a2, b2 - 1, c2],
            &[s + 1, s - b2, a2 + 3, b2 + 2, c2 + 3],
            3,
        ),
        (1, -1, 1) => cell(
            1,
            true,
            &[s + 2, s - c2, s - a2],
            &[s - b2 + 3, a2, b2 - 2, c2],
            &[s - b2, a2 + 3, b2 + 1, c2 + 3],
            3,
        ),
        (0, 1, 1) => cell(
            b - c,
            false,
            &[2],
            &[s - a2 + 2, s + 3, a2 - 1, b2, c2],
            &[s + 1, s - a2, a2 + 2, b2 + 3, c2 + 3],
            3,
        ),
        (0, 0, 1) => cell(
            2 * (c + 1),
            false,
            &[s + 2, s - c2, s - b2 + 1, s - a2 + 1],
            &[a2 - 1, b2 - 1, c2],
            &[a2 + 2, b2 + 2, c2 + 3],
            3,
        ),
        (0, -1, 1) => cell(
            -(c + b + 1),
            false,
            &[2],
            &[s - c2, s - b2 + 2, a2 - 1, b2 - 2, c2],
            &[s - c2 - 2, s - b2, a2 + 2, b2 + 1, c2 + 3],
            3,
        ),
        (-1, 1, 1) => cell(
            1,
            true,
            &[s + 2, s - c2, s - b2],
            &[s - a2 + 3, a2 - 2, b2, c2],
            &[s - a2, a2 + 1, b2 + 3, c2 + 3],
            3,
        ),
        (-1, 0, 1) => cell(
            a + c + 1,
            false,
            &[2],
            &[s - c2, s - a2 + 2, a2 - 2, b2 - 1, c2],
            &[s - c2 - 2, s - a2, a2 + 1, b2 + 2, c2 + 3],
            3,
        ),
        (-1, -1, 1) => cell(
            1,
            true,
            &[s + 1, s - b2 + 1, s - a2 + 1],
            &[s - c2, a2 - 2, b2 - 2, c2],
            &[s - c2 - 3, a2 + 1, b2 + 1, c2 + 3],
            3,
        ),

        (1, 1, 0) => cell(
            a - b,
            false,
            &[2],
            &[s - c2 + 2, s + 3, a2, b2, c2 - 1],
            &[s + 1, s - c2, a2 + 3, b2 + 3, c2 + 2],
            3,
        ),
        (1, 0, 0) => cell(
            2 * (a + 1),
            false,
            &[s + 2, s - c2 + 1, s - b2 + 1, s - a2],
            &[a2, b2 - 1, c2 - 1],
            &[a2 + 3, b2 + 2, c2 + 2],
            3,
        ),
        (1, -1, 0) => cell(
            a + b + 1,
            false,
            &[2],
            &[s - b2 + 2, s - a2, a2, b2 - 2, c2 - 1],
            &[s - b2, s - a2 - 2, a2 + 3, b2 + 1, c2 + 2],
            3,
        ),
        (0, 1, 0) => cell(
            2 * (b + 1),
            false,
            &[s + 2, s - c2 + 1, s - b2, s - a2 + 1],
            &[a2 - 1, b2, c2 - 1],
            &[a2 + 2, b2 + 3, c2 + 2],
            3,
        ),
        (0, 0, 0) => return None,
        (0, -1, 0) => cell(
            2 * b,
            false,
            &[s + 1, s - c2, s - b2 + 1, s - a2],
            &[a2 - 1, b2 - 2, c2 - 1],
            &[a2 + 2, b2 + 1, c2 + 2],
            3,
        ),
        (-1, 1, 0) => cell(
            -(a + b + 1),
            false,
            &[2],
            &[s - b2, s - a2 + 2, a2 - 2, b2, c2 - 1],
            &[s - b2 - 2, s - a2, a2 + 1, b2 + 3, c2 + 2],
            3,
        ),
        (-1, 0, 0) => cell(
            2 * a,
            false,
            &[s + 1, s - c2, s - b2, s - a2 + 1],
            &[a2 - 2, b2 - 1, c2 - 1],
            &[a2 + 1, b2 + 2, c2 + 2],
            3,
        ),
        (-1, -1, 0) => cell(
            b - a,
            false,
            &[2],
            &[s + 1, s - c2, a2 - 2, b2 - 2, c2 - 1],
            &[s - 1, s - c2 - 2, a2 + 1, b2 + 1, c2 + 2],
            3,
        ),

        (1, 1, -1) => cell(
            1,
            true,
            &[s + 2, s - b2, s - a2],
            &[s - c2 + 3, a2, b2, c2 - 2],
            &[s - c2, a2 + 3, b2 + 3, c2 + 1],
            3,
        ),
        (1, 0, -1) => cell(
            -(a + c + 1),
            false,
            &[2],
            &[s - c2 + 2, s - a2, a2, b2 - 1, c2 - 2],
            &[s - c2, s - a2 - 2, a2 + 3, b2 + 2, c2 + 1],
            3,
        ),
        (1, -1, -1) => cell(
            1,
            true,
            &[s + 1, s - c2 + 1, s - b2 + 1],
            &[s - a2, a2, b2 - 2, c2 - 2],
            &[s - a2 - 3, a2 + 3, b2 + 1, c2 + 1],
            3,
        ),
        (0, 1, -1) => cell(
            b + c + 1,
            false,
            &[2],
            &[s - c2 + 2, s - b2, a2 - 1, b2, c2 - 2],
            &[s - c2, s - b2 - 2, a2 + 2, b2 + 3, c2 + 1],
            3,
        ),
        (0, 0, -1) => cell(
            2 * c,
            false,
            &[s + 1, s - c2 + 1, s - b2, s - a2],
            &[a2 - 1, b2 - 1, c2 - 2],
            &[a2 + 2, b2 + 2, c2 + 1],
            3,
        ),
        (0, -1, -1) => cell(
            c - b,
            false,
            &[2],
            &[s + 1, s - a2, a2 - 1, b2 - 2, c2 - 2],
            &[s - 1, s - a2 - 2, a2 + 2, b2 + 1, c2 + 1],
            3,
        ),
        (-1, 1, -1) => cell(
            1,
            true,
            &[s + 1, s - c2 + 1, s - a2 + 1],
            &[s - b2, a2 - 2, b2, c2 - 2],
            &[s - b2 - 3, a2 + 1, b2 + 3, c2 + 1],
            3,
        ),
        (-1, 0, -1) => cell(
            a - c,
            false,
            &[2],
            &[s + 1, s - b2, a2 - 2, b2 - 1, c2 - 2],
            &[s - 1, s - b2 - 2, a2 + 1, b2 + 2, c2 + 1],
            3,
        ),
        (-1, -1, -1) => cell(
            1,
            false,
            &[s - c2, s - b2, s - a2],
            &[s + 1, a2 - 2, b2 - 2, c2 - 2],
            &[s - 2, a2 + 1, b2 + 1, c2 + 1],
            3,
        ),
        _ => unreachable!("range checked by caller"),
    })
}
