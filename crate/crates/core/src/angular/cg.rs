use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::exact::{factorial, SqrtRational};
use super::triangle;
use crate::error::{invalid, Result};

/// Labels of `C^{j3,m3}_{j1,m1,j2,m2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CgKey {
    pub j1: u32,
    pub m1: i32,
    pub j2: u32,
    pub m2: i32,
    pub j3: u32,
    pub m3: i32,
}

impl CgKey {
    pub fn new(j1: u32, m1: i32, j2: u32, m2: i32, j3: u32, m3: i32) -> Result<Self> {
        for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
            if m.unsigned_abs() > j {
                return Err(invalid(format!(
                    "|m| = {} exceeds j = {j}",
                    m.unsigned_abs()
                )));
            }
        }
        Ok(CgKey {
            j1,
            m1,
            j2,
            m2,
            j3,
            m3,
        })
    }
}

type CgCache = RwLock<HashMap<CgKey, SqrtRational>>;

fn cg_cache() -> &'static CgCache {
    static CACHE: OnceLock<CgCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Exact Condon–Shortley Clebsch-Gordan coefficient.
pub fn cg(key: &CgKey) -> SqrtRational {
    clebsch_gordan(key.j1, key.m1, key.j2, key.m2, key.j3, key.m3)
}

/// Exact `C^{j3,m3}_{j1,m1,j2,m2}`; zero for any label combination that cannot couple,
/// including out-of-range magnetic numbers.
pub fn clebsch_gordan(j1: u32, m1: i32, j2: u32, m2: i32, j3: u32, m3: i32) -> SqrtRational {
    if m1.unsigned_abs() > j1
        || m2.unsigned_abs() > j2
        || m3.unsigned_abs() > j3
        || m1 + m2 != m3
        || !triangle(j1, j2, j3)
    {
        return SqrtRational::zero();
    }
    let key = CgKey {
        j1,
        m1,
        j2,
        m2,
        j3,
        m3,
    };
    if let Some(v) = cg_cache().read().expect("cg cache poisoned").get(&key) {
        return v.clone();
    }
    let v = racah(&key);
    cg_cache()
        .write()
        .expect("cg cache poisoned")
        .entry(key)
        .or_insert(v)
        .clone()
}

/// `C^{l3,0}_{l1,0,l2,0}`.
pub fn cg_zero(l1: u32, l2: u32, l3: u32) -> SqrtRational {
    clebsch_gordan(l1, 0, l2, 0, l3, 0)
}

fn racah(k: &CgKey) -> SqrtRational {
    let (j1, m1, j2, m2, j3, m3) = (
        k.j1 as i64,
        k.m1 as i64,
        k.j2 as i64,
        k.m2 as i64,
        k.j3 as i64,
        k.m3 as i64,
    );
    let f = |n: i64| factorial(n as u32);

    let pre_num = BigUint::from((2 * j3 + 1) as u64)
        * f(j3 + j1 - j2)
        * f(j3 - j1 + j2)
        * f(j1 + j2 - j3)
        * f(j3 + m3)
        * f(j3 - m3)
        * f(j1 - m1)
        * f(j1 + m1)
        * f(j2 - m2)
        * f(j2 + m2);
    let pre_den = f(j1 + j2 + j3 + 1);

    let kmin = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let kmax = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let dens: Vec<(i64, BigUint)> = (kmin..=kmax)
        .map(|t| {
            let d = f(t)
                * f(j1 + j2 - j3 - t)
                * f(j1 - m1 - t)
                * f(j2 + m2 - t)
                * f(j3 - j2 + m1 + t)
                * f(j3 - j1 - m2 + t);
            (t, d)
        })
        .collect();
    let lcm = dens.iter().fold(BigUint::one(), |acc, (_, d)| acc.lcm(d));
    let mut sum = BigInt::zero();
    for (t, d) in &dens {
        let term = BigInt::from(&lcm / d);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    // value = sqrt(pre_num / pre_den) * sum / lcm
    let s = SqrtRational::from_ratio(&sum, &lcm);
    s.mul(&SqrtRational::new(1, pre_num, pre_den))
}

/// Dense floating-point CG block for one path `(j1, j2) -> j3`, entries `C^{j3,m1+m2}_{j1,m1,j2,m2}`.
///
/// Each row comes from a stable float recursion, so tables stay cheap at degrees where exact
/// evaluation of every entry would dominate a tensor product.
#[derive(Clone, Debug)]
pub struct CgTable {
    pub j1: u32,
    pub j2: u32,
    pub j3: u32,
    data: Vec<f64>,
}

impl CgTable {
    pub fn new(j1: u32, j2: u32, j3: u32) -> Result<Self> {
        if !triangle(j1, j2, j3) {
            return Err(crate::Error::TriangleViolation(j1, j2, j3));
        }
        Ok(build_table(j1, j2, j3))
    }

    /// `C^{j3,m1+m2}_{j1,m1,j2,m2}`, zero outside the valid ranges.
    #[inline]
    pub fn get(&self, m1: i32, m2: i32) -> f64 {
        let m3 = m1 + m2;
        if m1.unsigned_abs() > self.j1 || m2.unsigned_abs() > self.j2 || m3.unsigned_abs() > self.j3
        {
            return 0.0;
        }
        self.data[self.index(m1, m3)]
    }

    #[inline]
    fn index(&self, m1: i32, m3: i32) -> usize {
        (m3 + self.j3 as i32) as usize * (2 * self.j1 as usize + 1) + (m1 + self.j1 as i32) as usize
    }
}

fn build_table(j1: u32, j2: u32, j3: u32) -> CgTable {
    let n1 = 2 * j1 as usize + 1;
    let n3 = 2 * j3 as usize + 1;
    let mut t = CgTable {
        j1,
        j2,
        j3,
        data: vec![0.0; n1 * n3],
    };
    let parity = if (j1 + j2 - j3) % 2 == 0 { 1.0 } else { -1.0 };
    for m3 in 0..=j3 as i32 {
        let (lo, row) = recursion_row(j1 as i32, j2 as i32, j3 as i32, m3);
        for (k, v) in row.into_iter().enumerate() {
            let m1 = lo + k as i32;
            let idx = t.index(m1, m3);
            t.data[idx] = v;
            // C^{J,-M}_{j1,-m1,j2,-m2} = (-1)^{j1+j2-J} C^{J,M}_{j1,m1,j2,m2}
            let idx = t.index(-m1, -m3);
            t.data[idx] = parity * v;
        }
    }
    t
}

/// One row `m1 -> C^{J,M}_{j1,m1,j2,M-m1}` from the three-term recursion that `J^2` induces in
/// `m1`. It is run inward from both ends, where the row grows, and the halves are matched at the
/// first interior maximum of the left run. Normalization is `sum c^2 = 1` and the entry with the
/// largest `m1` is positive (Condon–Shortley).
fn recursion_row(j1: i32, j2: i32, jj: i32, mm: i32) -> (i32, Vec<f64>) {
    let lo = (-j1).max(mm - j2);
    let hi = j1.min(mm + j2);
    let n = (hi - lo + 1) as usize;
    let f = |v: i32| f64::from(v);
    // coupling between m1 and m1+1
    let a = |m: i32| (f(j1 - m) * f(j1 + m + 1) * f(j2 + mm - m) * f(j2 - mm + m + 1)).sqrt();
    let b = |m: i32| f(j1 * (j1 + 1) + j2 * (j2 + 1) + 2 * m * (mm - m) - jj * (jj + 1));
    const BIG: f64 = 1e200;

    let mut row = vec![0.0; n];
    row[0] = 1.0;
    let mut p = n - 1;
    for k in 0..n - 1 {
        let m = lo + k as i32;
        let prev = if k > 0 { a(m - 1) * row[k - 1] } else { 0.0 };
        row[k + 1] = -(b(m) * row[k] + prev) / a(m);
        if row[k + 1].abs() > BIG {
            row[..=k + 1].iter_mut().for_each(|v| *v /= BIG);
        }
        if row[k + 1].abs() < row[k].abs() {
            p = k;
            break;
        }
    }
    if p < n - 1 {
        let mut back = vec![0.0; n];
        back[n - 1] = 1.0;
        for k in (p + 1..n).rev() {
            let m = lo + k as i32;
            let next = if k + 1 < n { a(m) * back[k + 1] } else { 0.0 };
            back[k - 1] = -(b(m) * back[k] + next) / a(m - 1);
            if back[k - 1].abs() > BIG {
                back[k - 1..].iter_mut().for_each(|v| *v /= BIG);
            }
        }
        let scale = row[p] / back[p];
        for k in p + 1..n {
            row[k] = back[k] * scale;
        }
    }
    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = row[n - 1].signum() / norm;
    row.iter_mut().for_each(|v| *v *= scale);
    (lo, row)
}

type TableCache = RwLock<HashMap<(u32, u32, u32), Arc<CgTable>>>;

fn table_cache() -> &'static TableCache {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Tables up to this many entries are memoized; larger ones are rebuilt on demand so that
/// high-degree sweeps do not pin hundreds of megabytes.
const CACHED_TABLE_ENTRIES: usize = 1024;

/// Shared float CG table for `(j1, j2) -> j3`.
pub fn cg_table(j1: u32, j2: u32, j3: u32) -> Result<Arc<CgTable>> {
    let key = (j1, j2, j3);
    if let Some(t) = table_cache()
        .read()
        .expect("table cache poisoned")
        .get(&key)
    {
        return Ok(Arc::clone(t));
    }
    let t = Arc::new(CgTable::new(j1, j2, j3)?);
    if t.data.len() <= CACHED_TABLE_ENTRIES {
        table_cache()
            .write()
            .expect("table cache poisoned")
            .insert(key, Arc::clone(&t));
    }
    Ok(t)
}

/// Float `C^{j3,m3}_{j1,m1,j2,m2}`, zero when the labels cannot couple.
pub fn cg_f64(j1: u32, m1: i32, j2: u32, m2: i32, j3: u32, m3: i32) -> f64 {
    if m1 + m2 != m3 || !triangle(j1, j2, j3) {
        return 0.0;
    }
    cg_table(j1, j2, j3).map(|t| t.get(m1, m2)).unwrap_or(0.0)
}
