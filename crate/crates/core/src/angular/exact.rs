use std::cmp::Ordering;
use std::fmt;
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// A signed square root of a non-negative rational, `sign * sqrt(num / den)`.
///
/// Kept canonical: `gcd(num, den) = 1`, `den > 0`, and zero is stored as `0 * sqrt(0/1)`,
/// so structural equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SqrtRational {
    sign: i8,
    num: BigUint,
    den: BigUint,
}

impl SqrtRational {
    pub fn zero() -> Self {
        SqrtRational {
            sign: 0,
            num: BigUint::zero(),
            den: BigUint::one(),
        }
    }

    pub fn one() -> Self {
        SqrtRational {
            sign: 1,
            num: BigUint::one(),
            den: BigUint::one(),
        }
    }

    /// Builds `sign * sqrt(num / den)` and reduces it. Panics if `den` is zero.
    pub fn new(sign: i8, num: BigUint, den: BigUint) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if sign == 0 || num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num / &g, den / &g)
        };
        SqrtRational {
            sign: sign.signum(),
            num,
            den,
        }
    }

    /// The exact rational `n / d` written as a signed square root.
    pub fn from_ratio(n: &BigInt, d: &BigUint) -> Self {
        let sign = match n.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        };
        let mag = n.magnitude();
        Self::new(sign, mag * mag, d * d)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_ratio(&BigInt::from(n), &BigUint::one())
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Numerator of the squared magnitude.
    pub fn num(&self) -> &BigUint {
        &self.num
    }

    /// Denominator of the squared magnitude.
    pub fn den(&self) -> &BigUint {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn neg(&self) -> Self {
        SqrtRational {
            sign: -self.sign,
            num: self.num.clone(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &SqrtRational) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::new(
            self.sign * other.sign,
            &self.num * &other.num,
            &self.den * &other.den,
        )
    }

    /// Product without the gcd reduction, for hot accumulation loops.
    pub(crate) fn mul_unreduced(&self, other: &SqrtRational) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        SqrtRational {
            sign: self.sign * other.sign,
            num: &self.num * &other.num,
            den: &self.den * &other.den,
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        f64::from(self.sign) * ratio_sqrt_f64(&self.num, &self.den)
    }
}

impl fmt::Display for SqrtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}*sqrt({}/{})", self.sign, self.num, self.den)
        }
    }
}

/// `sqrt(n / d)` to full double precision even when `n` and `d` overflow `f64`.
fn ratio_sqrt_f64(n: &BigUint, d: &BigUint) -> f64 {
    // Scale so the integer quotient carries ~110 significant bits, with an even shift so the
    // square root of the power of two is exact.
    let e = n.bits() as i64 - d.bits() as i64;
    let mut shift = 110 - e;
    if shift % 2 != 0 {
        shift += 1;
    }
    let q = if shift >= 0 {
        (n << shift as usize) / d
    } else {
        n / (d << (-shift) as usize)
    };
    let qf = q.to_f64().unwrap_or(f64::INFINITY);
    qf.sqrt() * 2f64.powi(-(shift / 2) as i32)
}

/// Exact sum of signed square roots whose ratios are all rational.
///
/// Every term is compared with the first one; if some ratio is irrational the sum is not a
/// signed square root and [`SqrtSum::add`] reports it.
#[derive(Debug, Default)]
pub struct SqrtSum {
    base: Option<(BigUint, BigUint)>,
    coeff_num: BigInt,
    coeff_den: BigUint,
}

/// A term whose ratio to the first term of a [`SqrtSum`] is irrational.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incommensurate;

impl SqrtSum {
    pub fn new() -> Self {
        SqrtSum {
            base: None,
            coeff_num: BigInt::zero(),
            coeff_den: BigUint::one(),
        }
    }

    pub fn add(&mut self, term: &SqrtRational) -> Result<(), Incommensurate> {
        if term.is_zero() {
            return Ok(());
        }
        let Some((p0, q0)) = &self.base else {
            self.base = Some((term.num.clone(), term.den.clone()));
            self.coeff_num = BigInt::from(term.sign);
            return Ok(());
        };
        let mut rn = &term.num * q0;
        let mut rd = &term.den * p0;
        let g = rn.gcd(&rd);
        if !g.is_one() {
            rn /= &g;
            rd /= &g;
        }
        let sn = exact_sqrt(&rn).ok_or(Incommensurate)?;
        let sd = exact_sqrt(&rd).ok_or(Incommensurate)?;
        // coeff += sign * sn / sd
        let num = &self.coeff_num * BigInt::from(sd.clone())
            + BigInt::from(term.sign) * BigInt::from(sn) * BigInt::from(self.coeff_den.clone());
        let den = &self.coeff_den * &sd;
        let g = BigInt::from(den.clone()).gcd(&num).magnitude().clone();
        if g.is_zero() || g.is_one() {
            self.coeff_num = num;
            self.coeff_den = den;
        } else {
            self.coeff_num = num / BigInt::from(g.clone());
            self.coeff_den = den / g;
        }
        Ok(())
    }

    pub fn finish(self) -> SqrtRational {
        let Some((p0, q0)) = self.base else {
            return SqrtRational::zero();
        };
        let sign = match self.coeff_num.sign() {
            Sign::Minus => -1,
            Sign::NoSign => return SqrtRational::zero(),
            Sign::Plus => 1,
        };
        let c = self.coeff_num.magnitude();
        SqrtRational::new(sign, c * c * p0, &self.coeff_den * &self.coeff_den * q0)
    }
}

fn exact_sqrt(n: &BigUint) -> Option<BigUint> {
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

static FACTORIALS: RwLock<Vec<BigUint>> = RwLock::new(Vec::new());

/// `n!` as an arbitrary-precision integer, served from a grow-only table.
pub fn factorial(n: u32) -> BigUint {
    let n = n as usize;
    {
        let table = FACTORIALS.read().expect("factorial table poisoned");
        if let Some(v) = table.get(n) {
            return v.clone();
        }
    }
    let mut table = FACTORIALS.write().expect("factorial table poisoned");
    if table.is_empty() {
        table.push(BigUint::one());
    }
    while table.len() <= n {
        let k = table.len();
        let next = &table[k - 1] * BigUint::from(k);
        table.push(next);
    }
    table[n].clone()
}

/// `n!` for a possibly negative argument; `None` when `n < 0`.
pub(crate) fn factorial_i64(n: i64) -> Option<BigUint> {
    if n < 0 {
        None
    } else {
        Some(factorial(n as u32))
    }
}

impl PartialOrd for SqrtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SqrtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => {}
            o => return o,
        }
        let lhs = &self.num * &other.den;
        let rhs = &other.num * &self.den;
        if self.sign >= 0 {
            lhs.cmp(&rhs)
        } else {
            rhs.cmp(&lhs)
        }
    }
}

impl SqrtRational {
    /// `|self|`.
    pub fn abs(&self) -> Self {
        SqrtRational {
            sign: self.sign.abs(),
            num: self.num.clone(),
            den: self.den.clone(),
        }
    }

    /// Square of the value as an exact signed rational `(n, d)`; sign is preserved so that
    /// `x.signed_square()` orders like `x`.
    pub fn signed_square(&self) -> (BigInt, BigUint) {
        let n = BigInt::from(self.num.clone());
        (if self.sign < 0 { -n } else { n }, self.den.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sr(sign: i8, n: u64, d: u64) -> SqrtRational {
        SqrtRational::new(sign, BigUint::from(n), BigUint::from(d))
    }

    #[test]
    fn canonical_form() {
        assert_eq!(sr(1, 2, 4), sr(1, 1, 2));
        assert_eq!(sr(-1, 0, 7), SqrtRational::zero());
        assert_eq!(sr(1, 3, 1).to_string(), "1*sqrt(3/1)");
        assert_eq!(sr(-1, 1, 27).to_string(), "-1*sqrt(1/27)");
    }

    #[test]
    fn float_conversion_survives_huge_operands() {
        let big = factorial(300);
        let x = SqrtRational::new(1, &big * BigUint::from(2u32), big.clone());
        assert!((x.to_f64() - 2f64.sqrt()).abs() < 1e-15);
        let tiny = SqrtRational::new(-1, BigUint::one(), BigUint::from(1u64 << 60));
        assert_eq!(tiny.to_f64(), -(2f64.powi(-30)));
    }

    #[test]
    fn sums_of_commensurate_roots() {
        // sqrt(2) + sqrt(8) = 3 sqrt(2) = sqrt(18)
        let mut s = SqrtSum::new();
        s.add(&sr(1, 2, 1)).unwrap();
        s.add(&sr(1, 8, 1)).unwrap();
        assert_eq!(s.finish(), sr(1, 18, 1));
        // 1/2 - 1/2 = 0
        let mut s = SqrtSum::new();
        s.add(&sr(1, 1, 4)).unwrap();
        s.add(&sr(-1, 1, 4)).unwrap();
        assert_eq!(s.finish(), SqrtRational::zero());
        // sqrt(2) + sqrt(3) has no signed-square-root form
        let mut s = SqrtSum::new();
        s.add(&sr(1, 2, 1)).unwrap();
        assert!(s.add(&sr(1, 3, 1)).is_err());
    }

    #[test]
    fn ordering_matches_floats() {
        let vals = [
            sr(-1, 9, 1),
            sr(-1, 1, 2),
            SqrtRational::zero(),
            sr(1, 1, 3),
            sr(1, 5, 2),
        ];
        for w in vals.windows(2) {
            assert!(w[0] < w[1]);
            assert!(w[0].to_f64() < w[1].to_f64());
        }
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), BigUint::one());
        assert_eq!(factorial(10), BigUint::from(3_628_800u32));
        assert_eq!(factorial_i64(-1), None);
    }
}
