//! Named invariant checks, each reporting the largest deviation it observed.
//!
//! Checks are independent of each other and seeded separately, so the suite can run them on
//! several threads and still produce the same report.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use vstp_core::angular::{
    cg_f64, clebsch_gordan, wigner_9j, wigner_9j_spin1_exact, wigner_d_matrix, NineJKey, Rotation,
    SqrtRational, SqrtSum,
};
use vstp_core::bench::{
    fit_slope, projected_flops, run_bench, BenchConfig, FlopMode, Method, Setting,
};
use vstp_core::rules::{
    find_valid_ells, generalized_gaunt, interactable, interactable_by_search, vstp_rules, PathKey,
};
use vstp_core::sht::{
    from_sphere, gaunt_coefficient, make_grid, random_vector, sh_eval, to_sphere, IrrepCoeffs,
    SphereGrid,
};
use vstp_core::tenprod::{
    cgtp_full, cgtp_path, gtp, istp, simulate_cgtp_full, simulate_cgtp_path, vstp, CgtpMode,
};
use vstp_core::tsh::{tsh_decode, tsh_encode, tsh_orthonormality_check, TshCoeffs};
use vstp_core::Error;

/// Exact CG provider, swappable so a check can be run against a deliberately broken table.
pub type CgProvider<'a> = &'a (dyn Fn(u32, i32, u32, i32, u32, i32) -> SqrtRational + Sync);

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub cases: u64,
    /// First case that broke the bound, or a structural failure.
    pub failure: Option<String>,
    pub note: Option<String>,
    pub elapsed_s: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.max_deviation <= self.tolerance
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "cases": self.cases,
            "passed": self.passed(),
            "failure": self.failure,
            "note": self.note,
            "elapsed_s": self.elapsed_s,
        })
    }

    pub fn line(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{verdict} {:<24} max_dev={:.3e} tol={:.1e} cases={} ({:.2}s)",
            self.name, self.max_deviation, self.tolerance, self.cases, self.elapsed_s
        );
        if let Some(n) = &self.note {
            s.push_str(&format!("\n     note: {n}"));
        }
        if let Some(f) = &self.failure {
            s.push_str(&format!("\n     failing case: {f}"));
        }
        s
    }
}

/// Accumulates deviations and remembers the first case over tolerance.
struct Tracker {
    name: &'static str,
    tol: f64,
    max: f64,
    cases: u64,
    failure: Option<String>,
    note: Option<String>,
    start: Instant,
}

impl Tracker {
    fn new(name: &'static str, tol: f64) -> Self {
        Tracker {
            name,
            tol,
            max: 0.0,
            cases: 0,
            failure: None,
            note: None,
            start: Instant::now(),
        }
    }

    fn record(&mut self, dev: f64, case: impl FnOnce() -> String) {
        self.cases += 1;
        if dev.is_nan() || dev > self.tol {
            if self.failure.is_none() {
                self.failure = Some(format!("{} (deviation {dev:.3e})", case()));
            }
        }
        if dev.is_nan() {
            self.max = f64::INFINITY;
        } else {
            self.max = self.max.max(dev);
        }
    }

    /// Exact check: deviation 1 on failure.
    fn exact(&mut self, ok: bool, case: impl FnOnce() -> String) {
        self.record(if ok { 0.0 } else { 1.0 }, case);
    }

    fn fail(&mut self, msg: String) {
        if self.failure.is_none() {
            self.failure = Some(msg);
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            max_deviation: self.max,
            tolerance: self.tol,
            cases: self.cases,
            failure: self.failure,
            note: self.note,
            elapsed_s: self.start.elapsed().as_secs_f64(),
        }
    }
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max)
}

fn ms(j: u32) -> impl Iterator<Item = i32> {
    -(j as i32)..=j as i32
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn exact_cg(j1: u32, m1: i32, j2: u32, m2: i32, j3: u32, m3: i32) -> SqrtRational {
    clebsch_gordan(j1, m1, j2, m2, j3, m3)
}

/// `sum_{m1,m2} C^{j3,m3} C^{j3',m3} = delta_{j3,j3'}` in exact arithmetic.
pub fn cg_orthogonality(max_j: u32) -> CheckResult {
    let mut t = Tracker::new("cg_orthogonality", 0.0);
    for j1 in 0..=max_j {
        for j2 in 0..=max_j {
            let range = j1.abs_diff(j2)..=j1 + j2;
            for j3 in range.clone() {
                for k3 in range.clone() {
                    for m3 in ms(j3.min(k3)) {
                        let mut sum = SqrtSum::new();
                        let mut ok = true;
                        for m1 in ms(j1) {
                            let m2 = m3 - m1;
                            if m2.unsigned_abs() > j2 {
                                continue;
                            }
                            let term = clebsch_gordan(j1, m1, j2, m2, j3, m3)
                                .mul(&clebsch_gordan(j1, m1, j2, m2, k3, m3));
                            ok &= sum.add(&term).is_ok();
                        }
                        let want = if j3 == k3 {
                            SqrtRational::one()
                        } else {
                            SqrtRational::zero()
                        };
                        t.exact(ok && sum.finish() == want, || {
                            format!("j1={j1} j2={j2} j3={j3} j3'={k3} m3={m3}")
                        });
                    }
                }
            }
        }
    }
    t.finish()
}

/// `C^{j,mj}_{l,ml,s,ms} = (-1)^{l-ml} sqrt((2j+1)/(2s+1)) C^{s,ms}_{j,mj,l,-ml}`, exact.
pub fn cg_reorder(max_label: u32, cg: CgProvider) -> CheckResult {
    let mut t = Tracker::new("cg_reorder", 0.0);
    for l in 0..=max_label {
        for s in 0..=max_label {
            for j in l.abs_diff(s)..=(l + s).min(max_label) {
                for ml in ms(l) {
                    for m_s in ms(s) {
                        let mj = ml + m_s;
                        if mj.unsigned_abs() > j {
                            continue;
                        }
                        let lhs = cg(l, ml, s, m_s, j, mj);
                        let sign = if (l as i32 - ml) % 2 == 0 { 1 } else { -1 };
                        let factor =
                            SqrtRational::new(sign, (2 * j + 1).into(), (2 * s + 1).into());
                        let rhs = factor.mul(&cg(j, mj, l, -ml, s, m_s));
                        t.exact(lhs == rhs, || {
                            format!("C^({j},{mj})_({l},{ml}),({s},{m_s}) = {lhs} but the reordered side gives {rhs}")
                        });
                    }
                }
            }
        }
    }
    t.finish()
}

/// Recursion-built float tables against exact values.
pub fn cg_float(max_j: u32) -> CheckResult {
    let mut t = Tracker::new("cg_float_tables", 1e-13);
    for j1 in 0..=max_j {
        for j2 in 0..=max_j {
            for j3 in j1.abs_diff(j2)..=(j1 + j2).min(max_j) {
                for m1 in ms(j1) {
                    for m2 in ms(j2) {
                        let m3 = m1 + m2;
                        if m3.unsigned_abs() > j3 {
                            continue;
                        }
                        let want = clebsch_gordan(j1, m1, j2, m2, j3, m3).to_f64();
                        let got = cg_f64(j1, m1, j2, m2, j3, m3);
                        t.record((got - want).abs(), || {
                            format!("C^({j3},{m3})_({j1},{m1}),({j2},{m2})")
                        });
                    }
                }
            }
        }
    }
    t.finish()
}

pub fn wigner_d_unitarity(max_j: u32, rotations: usize, seed: u64) -> CheckResult {
    let mut t = Tracker::new("wigner_d_unitarity", 1e-12);
    let mut rng = rng_for(seed, 1);
    for r in 0..rotations {
        let rot = Rotation::random(&mut rng);
        for j in 0..=max_j {
            t.record(wigner_d_matrix(j, &rot).unitarity_defect(), || {
                format!("j={j} rotation #{r} {rot:?}")
            });
        }
    }
    t.finish()
}

/// `D^{l1}_{m1 n1} D^{l2}_{m2 n2} = sum_l3 C C D^{l3}` for `l1, l2 <= 2`.
pub fn wigner_d_product(rotations: usize, seed: u64, tol: f64) -> CheckResult {
    let mut t = Tracker::new("wigner_d_product", tol);
    let mut rng = rng_for(seed, 2);
    for _ in 0..rotations {
        let rot = Rotation::random(&mut rng);
        let d: Vec<_> = (0..=4).map(|j| wigner_d_matrix(j, &rot)).collect();
        for l1 in 0..=2u32 {
            for l2 in 0..=2u32 {
                for (m1, n1, m2, n2) in ms(l1).flat_map(|a| {
                    ms(l1).flat_map(move |b| {
                        ms(l2).flat_map(move |c| ms(l2).map(move |e| (a, b, c, e)))
                    })
                }) {
                    let lhs = d[l1 as usize].get(m1, n1) * d[l2 as usize].get(m2, n2);
                    let (m3, n3) = (m1 + m2, n1 + n2);
                    let mut rhs = Complex64::new(0.0, 0.0);
                    for l3 in l1.abs_diff(l2)..=l1 + l2 {
                        if m3.unsigned_abs() > l3 || n3.unsigned_abs() > l3 {
                            continue;
                        }
                        rhs += d[l3 as usize].get(m3, n3)
                            * cg_f64(l1, m1, l2, m2, l3, m3)
                            * cg_f64(l1, n1, l2, n2, l3, n3);
                    }
                    t.record((lhs - rhs).norm(), || {
                        format!("l1={l1} l2={l2} m=({m1},{m2}) n=({n1},{n2})")
                    });
                }
            }
        }
    }
    t.finish()
}

/// `D^l_{m,0}(g) = sqrt(4 pi / (2l+1)) conj(Y_l^m(g z))`, the phase-convention anchor.
pub fn wigner_d_harmonics(max_l: u32, rotations: usize, seed: u64) -> CheckResult {
    let mut t = Tracker::new("wigner_d_harmonics", 1e-12);
    let mut rng = rng_for(seed, 3);
    for _ in 0..rotations {
        let rot = Rotation::random(&mut rng);
        let z = rot.apply([0.0, 0.0, 1.0]);
        let (theta, phi) = (z[2].clamp(-1.0, 1.0).acos(), z[1].atan2(z[0]));
        for l in 0..=max_l {
            let d = wigner_d_matrix(l, &rot);
            for m in ms(l) {
                let y = sh_eval(l, m, theta, phi).expect("valid degree").conj()
                    * (4.0 * PI / (2 * l + 1) as f64).sqrt();
                t.record((d.get(m, 0) - y).norm(), || format!("l={l} m={m} {rot:?}"));
            }
        }
    }
    t.finish()
}

/// General contraction against the spin-1 closed forms for `a, b, c <= max`; every table cell
/// has to be reached by at least one coupling grid.
pub fn ninej_table(max: u32) -> CheckResult {
    let mut t = Tracker::new("ninej_spin1_table", 1e-12);
    let mut seen = [false; 27];
    for a in 0..=max {
        for b in 0..=max {
            for c in 0..=max {
                for (ci, (lam, mu, nu)) in cells().enumerate() {
                    let (ja, jb, jc) = (a as i32 + lam, b as i32 + mu, c as i32 + nu);
                    if ja < 0 || jb < 0 || jc < 0 {
                        continue;
                    }
                    let key = NineJKey([ja as u32, a, 1, jb as u32, b, 1, jc as u32, c, 1]);
                    if !key.couples() {
                        continue;
                    }
                    seen[ci] = true;
                    let table =
                        wigner_9j_spin1_exact(a, lam, b, mu, c, nu).expect("offsets in range");
                    let general = wigner_9j(&key);
                    let dev = if table == general {
                        0.0
                    } else {
                        (table.to_f64() - general.to_f64())
                            .abs()
                            .max(f64::MIN_POSITIVE)
                    };
                    t.record(dev, || {
                        format!("{key:?}: table {table} vs contraction {general}")
                    });
                }
            }
        }
    }
    let missing: Vec<_> = cells()
        .zip(seen)
        .filter(|(_, s)| !s)
        .map(|(c, _)| c)
        .collect();
    if !missing.is_empty() {
        t.fail(format!("table cells never exercised: {missing:?}"));
    }
    t.note = Some(format!(
        "{} of 27 cells exercised",
        seen.iter().filter(|&&s| s).count()
    ));
    t.finish()
}

fn cells() -> impl Iterator<Item = (i32, i32, i32)> {
    (-1..=1).flat_map(|l| (-1..=1).flat_map(move |m| (-1..=1).map(move |n| (l, m, n))))
}

/// Swapping two rows (or columns) multiplies the 9j by `(-1)^S`, `S` the sum of all entries.
pub fn ninej_row_swap(max: u32) -> CheckResult {
    let mut t = Tracker::new("ninej_row_swap", 0.0);
    let n = max + 1;
    let total = n.pow(9);
    for idx in 0..total {
        let mut g = [0u32; 9];
        let mut r = idx;
        for v in g.iter_mut() {
            *v = r % n;
            r /= n;
        }
        let key = NineJKey(g);
        if !key.couples() {
            continue;
        }
        let v = wigner_9j(&key);
        let sign = if g.iter().sum::<u32>() % 2 == 0 {
            1
        } else {
            -1
        };
        let want = if sign > 0 { v.clone() } else { v.neg() };
        let swapped = NineJKey([g[3], g[4], g[5], g[0], g[1], g[2], g[6], g[7], g[8]]);
        t.exact(wigner_9j(&swapped) == want, || format!("rows 1,2 of {g:?}"));
        let swapped = NineJKey([g[1], g[0], g[2], g[4], g[3], g[5], g[7], g[6], g[8]]);
        t.exact(wigner_9j(&swapped) == want, || {
            format!("columns 1,2 of {g:?}")
        });
        let transposed = NineJKey([g[0], g[3], g[6], g[1], g[4], g[7], g[2], g[5], g[8]]);
        t.exact(wigner_9j(&transposed) == v, || {
            format!("transpose of {g:?}")
        });
    }
    t.finish()
}

/// Gram matrix of `Y_l^m` by quadrature on the degree-`lg` grid.
pub fn sh_orthonormality(lg: u32) -> CheckResult {
    let mut t = Tracker::new("sh_orthonormality", 1e-12);
    let grid = SphereGrid::new(lg);
    let mut rows = Vec::new();
    for l in 0..=lg {
        for m in ms(l) {
            let mut v = Vec::with_capacity(grid.n_points());
            for i in 0..grid.n_theta() {
                for k in 0..grid.n_phi() {
                    v.push(
                        sh_eval(l, m, grid.theta(i), grid.phi(k)).expect("valid degree")
                            * grid.area_weight(i).sqrt(),
                    );
                }
            }
            rows.push(((l, m), v));
        }
    }
    for (a, (ka, va)) in rows.iter().enumerate() {
        for (b, (kb, vb)) in rows.iter().enumerate().skip(a) {
            let ip: Complex64 = va.iter().zip(vb).map(|(p, q)| p.conj() * q).sum();
            let want = if a == b { 1.0 } else { 0.0 };
            t.record((ip - want).norm(), || format!("<Y{ka:?}, Y{kb:?}>"));
        }
    }
    t.finish()
}

pub fn sht_round_trip(max_l: u32, seed: u64) -> CheckResult {
    let mut t = Tracker::new("sht_round_trip", 1e-12);
    let mut rng = rng_for(seed, 4);
    for l in 0..=max_l {
        let x = IrrepCoeffs::random(l, &mut rng);
        let grid = make_grid(l);
        let dev = to_sphere(&x, &grid)
            .and_then(|f| from_sphere(&f, l))
            .map_or(f64::INFINITY, |y| x.max_abs_diff(&y));
        t.record(dev, || format!("L={l}"));
    }
    t.finish()
}

pub fn tsh_round_trip(max_s: u32, max_l: u32, seed: u64) -> CheckResult {
    let mut t = Tracker::new("tsh_round_trip", 1e-12);
    let mut rng = rng_for(seed, 5);
    for s in 0..=max_s {
        for l in 0..=max_l {
            let x = TshCoeffs::random(s, l, &mut rng);
            let grid = make_grid(l);
            let dev = tsh_encode(&x, &grid)
                .and_then(|f| tsh_decode(&f, l))
                .map_or(f64::INFINITY, |y| x.max_abs_diff(&y));
            t.record(dev, || format!("s={s} L={l}"));
        }
    }
    t.finish()
}

pub fn tsh_orthonormality(cases: &[(u32, u32)]) -> CheckResult {
    let mut t = Tracker::new("tsh_orthonormality", 1e-12);
    for &(s, l) in cases {
        t.record(
            tsh_orthonormality_check(s, l).unwrap_or(f64::INFINITY),
            || format!("s={s} L={l}"),
        );
    }
    t.finish()
}

/// Gaunt coefficients against quadrature of the triple product on a grid of degree `l1 + l2`.
pub fn gaunt_quadrature(max_l: u32) -> CheckResult {
    let mut t = Tracker::new("gaunt_quadrature", 1e-11);
    for l1 in 0..=max_l {
        for l2 in 0..=max_l {
            let grid = SphereGrid::new(l1 + l2);
            let ys = |l: u32, m: i32| -> Vec<Complex64> {
                (0..grid.n_theta())
                    .flat_map(|i| (0..grid.n_phi()).map(move |k| (i, k)))
                    .map(|(i, k)| sh_eval(l, m, grid.theta(i), grid.phi(k)).expect("valid degree"))
                    .collect()
            };
            let w: Vec<f64> = (0..grid.n_theta())
                .flat_map(|i| std::iter::repeat(grid.area_weight(i)).take(grid.n_phi()))
                .collect();
            for l3 in l1.abs_diff(l2)..=l1 + l2 {
                for m1 in ms(l1) {
                    let y1 = ys(l1, m1);
                    for m2 in ms(l2) {
                        let m3 = m1 + m2;
                        if m3.unsigned_abs() > l3 {
                            continue;
                        }
                        let (y2, y3) = (ys(l2, m2), ys(l3, m3));
                        let q: Complex64 = (0..w.len())
                            .map(|p| y1[p] * y2[p] * y3[p].conj() * w[p])
                            .sum();
                        let want = gaunt_coefficient(l1, m1, l2, m2, l3, m3);
                        t.record((q - want).norm(), || {
                            format!("G({l1},{m1};{l2},{m2};{l3},{m3})")
                        });
                    }
                }
            }
        }
    }
    t.finish()
}

fn single_block(s: u32, j: u32, l: u32, v: Vec<Complex64>) -> TshCoeffs {
    let mut x = TshCoeffs::new(s, l);
    x.insert(j, l, v).expect("admissible block");
    x
}

/// Single-block ISTP outputs against the generalized Gaunt coefficient times the CG product.
pub fn generalized_gaunt_istp(max: u32, seed: u64, tol: f64) -> CheckResult {
    let mut t = Tracker::new("generalized_gaunt", tol);
    let mut rng = rng_for(seed, 6);
    for s1 in 0..=1u32 {
        for s2 in 0..=1u32 {
            for s3 in s1.abs_diff(s2)..=s1 + s2 {
                for (j1, l1) in TshCoeffs::admissible_keys(s1, max)
                    .into_iter()
                    .filter(|k| k.0 <= max)
                {
                    for (j2, l2) in TshCoeffs::admissible_keys(s2, max)
                        .into_iter()
                        .filter(|k| k.0 <= max)
                    {
                        let xv = random_vector(2 * j1 as usize + 1, &mut rng);
                        let yv = random_vector(2 * j2 as usize + 1, &mut rng);
                        let (x, y) = (
                            single_block(s1, j1, l1, xv.clone()),
                            single_block(s2, j2, l2, yv.clone()),
                        );
                        let l3max = l1 + l2;
                        let out = match istp(&x, &y, s3, l3max, &make_grid(l3max)) {
                            Ok(r) => r.output,
                            Err(e) => {
                                t.fail(format!("istp failed for ({j1},{l1},{s1})x({j2},{l2},{s2})->s3={s3}: {e}"));
                                continue;
                            }
                        };
                        for ((j3, l3), z) in out.blocks() {
                            let want: Vec<Complex64> = if j3 < j1.abs_diff(j2) || j3 > j1 + j2 {
                                vec![Complex64::new(0.0, 0.0); z.len()]
                            } else {
                                let g = generalized_gaunt(&PathKey::new(
                                    [j1, j2, j3],
                                    [l1, l2, l3],
                                    [s1, s2, s3],
                                ));
                                let c = cgtp_path(&xv, &yv, j3, CgtpMode::Sparse)
                                    .expect("triangle checked")
                                    .output;
                                c.iter().map(|v| v * g).collect()
                            };
                            t.record(max_diff(z, &want), || {
                                format!("j=({j1},{j2},{j3}) l=({l1},{l2},{l3}) s=({s1},{s2},{s3})")
                            });
                        }
                    }
                }
            }
        }
    }
    t.finish()
}

fn all_labels(max: u32) -> impl Iterator<Item = ([u32; 3], [u32; 3])> {
    let n = max + 1;
    (0..n.pow(6)).map(move |mut i| {
        let mut v = [0u32; 6];
        for x in v.iter_mut() {
            *x = i % n;
            i /= n;
        }
        ([v[0], v[1], v[2]], [v[3], v[4], v[5]])
    })
}

/// Outcome of comparing a rule set with exact nonvanishing over all labels `<= max`.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleScan {
    pub cases: u64,
    pub nonzero: u64,
    /// Labels where the five stated rules disagree with the coefficient.
    pub five_rule_mismatches: Vec<([u32; 3], [u32; 3])>,
    /// Labels where the five rules plus `j != l` disagree with the coefficient.
    pub six_rule_mismatches: Vec<([u32; 3], [u32; 3])>,
}

pub fn scan_rules(max: u32) -> vstp_core::Result<RuleScan> {
    let mut scan = RuleScan {
        cases: 0,
        nonzero: 0,
        five_rule_mismatches: Vec::new(),
        six_rule_mismatches: Vec::new(),
    };
    for (j, l) in all_labels(max) {
        let r = vstp_rules(&PathKey::new(j, l, [1, 1, 1]))?;
        scan.cases += 1;
        scan.nonzero += u64::from(r.coefficient_nonzero);
        if r.five_rules_passed() != r.coefficient_nonzero {
            scan.five_rule_mismatches.push((j, l));
        }
        if r.passed != r.coefficient_nonzero {
            scan.six_rule_mismatches.push((j, l));
        }
    }
    Ok(scan)
}

/// Rule flags (plus distinct columns) iff exact nonzero coefficient; the gap of the five stated
/// rules must consist of identical-column labels only.
pub fn selection_rules(max: u32) -> CheckResult {
    let mut t = Tracker::new("selection_rules", 0.0);
    match scan_rules(max) {
        Ok(scan) => {
            t.cases = scan.cases;
            t.max = scan.six_rule_mismatches.len() as f64;
            if let Some((j, l)) = scan.six_rule_mismatches.first() {
                t.fail(format!("rules and coefficient disagree at j={j:?} l={l:?}"));
            }
            if let Some((j, l)) = scan.five_rule_mismatches.iter().find(|(j, l)| j != l) {
                t.fail(format!(
                    "five-rule gap outside identical columns at j={j:?} l={l:?}"
                ));
            }
            t.note = Some(format!(
                "{} nonzero; the five stated rules alone admit {} vanishing labels, all with j = l",
                scan.nonzero,
                scan.five_rule_mismatches.len()
            ));
        }
        Err(e) => t.fail(e.to_string()),
    }
    t.finish()
}

/// `find_valid_ells` yields a nonzero path for every interactable triangle up to `max`.
pub fn completeness(max: u32) -> CheckResult {
    let mut t = Tracker::new("completeness", 0.0);
    for j1 in 0..=max {
        for j2 in 0..=max {
            for j3 in 0..=max {
                let tri = j3 >= j1.abs_diff(j2) && j3 <= j1 + j2;
                let ok = match find_valid_ells(j1, j2, j3) {
                    Ok((l1, l2, l3)) => {
                        tri && vstp_rules(&PathKey::vstp(j1, l1, j2, l2, j3, l3))
                            .is_ok_and(|r| r.passed && r.coefficient_nonzero)
                    }
                    Err(Error::NotInteractable(..)) => (j1, j2, j3) == (0, 0, 0),
                    Err(Error::TriangleViolation(..)) => !tri,
                    Err(_) => false,
                };
                let search = interactable_by_search(j1, j2, j3) == interactable(j1, j2, j3);
                t.exact(ok && search, || {
                    format!("j=({j1},{j2},{j3}): {:?}", find_valid_ells(j1, j2, j3))
                });
            }
        }
    }
    t.finish()
}

/// `simulate_cgtp_path` against `cgtp_path` for every triangle with `j <= max`.
pub fn cgtp_simulation(max: u32, pairs: usize, seed: u64, tol: f64) -> CheckResult {
    let mut t = Tracker::new("cgtp_simulation", tol);
    let mut rng = rng_for(seed, 7);
    for j1 in 0..=max {
        for j2 in 0..=max {
            for j3 in j1.abs_diff(j2)..=(j1 + j2).min(max) {
                for p in 0..pairs {
                    let x = random_vector(2 * j1 as usize + 1, &mut rng);
                    let y = random_vector(2 * j2 as usize + 1, &mut rng);
                    let want = cgtp_path(&x, &y, j3, CgtpMode::Naive)
                        .expect("triangle")
                        .output;
                    match simulate_cgtp_path(&x, &y, j3) {
                        Ok(r) => t.record(max_diff(&r.output, &want), || {
                            format!("({j1},{j2})->{j3} pair #{p}")
                        }),
                        Err(e) => t.fail(format!("({j1},{j2})->{j3}: {e}")),
                    }
                }
            }
        }
    }
    // The cross-product path is out of reach of scalar (Gaunt) products.
    let gaunt_111: f64 = (-1..=1)
        .map(|m| gaunt_coefficient(1, m, 1, -m, 1, 0).abs())
        .sum();
    if gaunt_111 != 0.0 {
        t.fail(format!(
            "Gaunt coefficients on (1,1,1) should vanish, sum |G| = {gaunt_111}"
        ));
    }
    t.note =
        Some("includes the (1,1,1) cross-product path, whose Gaunt coefficients vanish".into());
    t.finish()
}

/// Every tensor product commutes with random rotations.
pub fn equivariance(max_l: u32, rotations: usize, seed: u64, tol: f64) -> CheckResult {
    let mut t = Tracker::new("equivariance", tol);
    let mut rng = rng_for(seed, 8);
    let l = max_l;
    let grid = make_grid(2 * l);
    for r in 0..rotations {
        let rot = Rotation::random(&mut rng);
        let (x, y) = (
            IrrepCoeffs::random(l, &mut rng),
            IrrepCoeffs::random(l, &mut rng),
        );
        let (rx, ry) = (x.rotated(&rot), y.rotated(&rot));
        for (name, mode) in [
            ("cgtp_naive", CgtpMode::Naive),
            ("cgtp_sparse", CgtpMode::Sparse),
        ] {
            let dev = match (
                cgtp_full(&rx, &ry, 2 * l, mode),
                cgtp_full(&x, &y, 2 * l, mode),
            ) {
                (Ok(a), Ok(b)) => a.output.max_abs_diff(&b.output.rotated(&rot)),
                _ => f64::INFINITY,
            };
            t.record(dev, || format!("{name} rotation #{r}"));
        }
        let dev = match (gtp(&rx, &ry, 2 * l, &grid), gtp(&x, &y, 2 * l, &grid)) {
            (Ok(a), Ok(b)) => a.output.max_abs_diff(&b.output.rotated(&rot)),
            _ => f64::INFINITY,
        };
        t.record(dev, || format!("gtp rotation #{r}"));
        let dev = match (
            simulate_cgtp_full(&rx, &ry, 2 * l),
            simulate_cgtp_full(&x, &y, 2 * l),
        ) {
            (Ok(a), Ok(b)) => a.output.max_abs_diff(&b.output.rotated(&rot)),
            _ => f64::INFINITY,
        };
        t.record(dev, || format!("cgtp_via_vstp rotation #{r}"));

        let (u, v) = (
            TshCoeffs::random(1, l, &mut rng),
            TshCoeffs::random(1, l, &mut rng),
        );
        let dev = match (
            vstp(&u.rotated(&rot), &v.rotated(&rot), 2 * l, &grid),
            vstp(&u, &v, 2 * l, &grid),
        ) {
            (Ok(a), Ok(b)) => a.output.max_abs_diff(&b.output.rotated(&rot)),
            _ => f64::INFINITY,
        };
        t.record(dev, || format!("vstp rotation #{r}"));
        for (s1, s2, s3) in [(1, 2, 2), (2, 2, 2), (0, 1, 1)] {
            let (u, v) = (
                TshCoeffs::random(s1, l, &mut rng),
                TshCoeffs::random(s2, l, &mut rng),
            );
            let dev = match (
                istp(&u.rotated(&rot), &v.rotated(&rot), s3, 2 * l, &grid),
                istp(&u, &v, s3, 2 * l, &grid),
            ) {
                (Ok(a), Ok(b)) => a.output.max_abs_diff(&b.output.rotated(&rot)),
                _ => f64::INFINITY,
            };
            t.record(dev, || format!("istp s=({s1},{s2},{s3}) rotation #{r}"));
        }
    }
    t.finish()
}

/// Instrumented counts equal the closed-form projections.
pub fn flop_projection(max_l: u32, seed: u64) -> CheckResult {
    let mut t = Tracker::new("flop_projection", 0.0);
    let mut cfg = BenchConfig::new(seed);
    cfg.repeats = 1;
    cfg.budget = u64::MAX;
    for method in Method::ALL {
        for setting in Setting::ALL {
            let ls: Vec<u32> = (1..=max_l).collect();
            match run_bench(method, setting, &ls, &cfg) {
                Ok(recs) => {
                    for r in recs {
                        let p = projected_flops(method, setting, r.l).ok();
                        t.exact(p == Some(r.flops), || {
                            format!(
                                "{method} {setting} L={}: measured {} projected {p:?}",
                                r.l, r.flops
                            )
                        });
                    }
                }
                Err(e) => t.fail(format!("{method} {setting}: {e}")),
            }
        }
    }
    t.finish()
}

/// Fitted log-log slopes of MIMO flop counts.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeReport {
    pub ls: Vec<u32>,
    pub slopes: Vec<(Method, f64, FlopMode)>,
}

impl SlopeReport {
    pub fn slope(&self, m: Method) -> Option<f64> {
        self.slopes.iter().find(|s| s.0 == m).map(|s| s.1)
    }
}

/// Default L grid for the scaling fits: four points so the fit is over-determined.
pub const SLOPE_LS: [u32; 4] = [8, 16, 24, 32];

/// Slopes for every method; measured where the budget allows, projected otherwise.
pub fn mimo_slopes(ls: &[u32], measured: bool, seed: u64) -> vstp_core::Result<SlopeReport> {
    let mut slopes = Vec::new();
    for method in Method::ALL {
        let mut cfg = BenchConfig::new(seed);
        cfg.repeats = 1;
        cfg.mode = FlopMode::Projected;
        if measured {
            let worst = ls
                .iter()
                .map(|&l| projected_flops(method, Setting::Mimo, l))
                .collect::<vstp_core::Result<Vec<_>>>()?;
            if worst.iter().all(|&f| f <= cfg.budget) {
                cfg.mode = FlopMode::Measured;
            }
        }
        let recs = run_bench(method, Setting::Mimo, ls, &cfg)?;
        slopes.push((method, fit_slope(&recs)?.slope, cfg.mode));
    }
    Ok(SlopeReport {
        ls: ls.to_vec(),
        slopes,
    })
}

/// Target interval for each method's MIMO slope.
pub fn slope_window(method: Method, report: &SlopeReport) -> (f64, f64) {
    match method {
        Method::CgtpNaive => (5.5, 6.5),
        Method::CgtpSparse => (4.5, 5.5),
        Method::GtpGrid | Method::VstpGrid | Method::IstpGrid => (2.5, 3.5),
        Method::CgtpViaVstp => {
            let v = report.slope(Method::VstpGrid).unwrap_or(f64::NAN) + 2.0;
            (v - 0.5, v + 0.5)
        }
    }
}

pub fn scaling_slopes(measured: bool, seed: u64) -> CheckResult {
    let mut t = Tracker::new("scaling_slopes", 0.0);
    match mimo_slopes(&SLOPE_LS, measured, seed) {
        Ok(report) => {
            let mut parts = Vec::new();
            for &(m, slope, mode) in &report.slopes {
                let (lo, hi) = slope_window(m, &report);
                let dev = if slope.is_nan() {
                    f64::INFINITY
                } else {
                    (lo - slope).max(slope - hi).max(0.0)
                };
                t.record(dev, || {
                    format!("{m} slope {slope:.3} outside [{lo:.2}, {hi:.2}]")
                });
                let tag = if mode == FlopMode::Measured {
                    ""
                } else {
                    " projected"
                };
                parts.push(format!("{m} {slope:.2}{tag}"));
            }
            t.note = Some(format!("MIMO over L={:?}: {}", report.ls, parts.join(", ")));
        }
        Err(e) => t.fail(e.to_string()),
    }
    t.finish()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

/// Runs the suite for `level`. Checks specified at `1e-10` use `tolerance`; tighter bounds
/// are fixed.
pub fn run_suite(level: Level, tolerance: f64, seed: u64) -> Vec<CheckResult> {
    let full = level == Level::Full;
    let pick = |q: u32, f: u32| if full { f } else { q };
    type Job<'a> = Box<dyn FnOnce() -> CheckResult + Send + 'a>;
    let cg = &exact_cg;
    let jobs: Vec<Job> = vec![
        Box::new(move || cg_orthogonality(pick(2, 3))),
        Box::new(move || cg_reorder(pick(2, 3), cg)),
        Box::new(move || cg_float(pick(6, 12))),
        Box::new(move || wigner_d_unitarity(8, if full { 50 } else { 10 }, seed)),
        Box::new(move || wigner_d_product(if full { 20 } else { 5 }, seed, tolerance)),
        Box::new(move || wigner_d_harmonics(8, 10, seed)),
        Box::new(move || ninej_table(pick(3, 6))),
        Box::new(move || ninej_row_swap(pick(2, 3))),
        Box::new(move || sh_orthonormality(8)),
        Box::new(move || sht_round_trip(pick(8, 32), seed)),
        Box::new(move || tsh_round_trip(2, pick(8, 32), seed)),
        Box::new(move || {
            tsh_orthonormality(if full {
                &[(0, 8), (1, 8), (2, 8)]
            } else {
                &[(0, 4), (1, 4), (2, 5)]
            })
        }),
        Box::new(move || gaunt_quadrature(pick(3, 4))),
        Box::new(move || generalized_gaunt_istp(pick(2, 3), seed, tolerance)),
        Box::new(move || selection_rules(pick(3, 6))),
        Box::new(move || completeness(pick(6, 10))),
        Box::new(move || cgtp_simulation(pick(3, 4), if full { 20 } else { 3 }, seed, tolerance)),
        Box::new(move || equivariance(pick(3, 4), if full { 10 } else { 3 }, seed, tolerance)),
        Box::new(move || flop_projection(pick(2, 4), seed)),
        Box::new(move || scaling_slopes(full, seed)),
    ];
    let mut results: Vec<Option<CheckResult>> = vec![None; jobs.len()];
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(jobs.len());
    let queue = std::sync::Mutex::new(jobs.into_iter().enumerate().collect::<Vec<_>>());
    let done = std::sync::Mutex::new(&mut results);
    std::thread::scope(|sc| {
        for _ in 0..threads {
            sc.spawn(|| loop {
                let Some((i, job)) = queue.lock().expect("queue poisoned").pop() else {
                    break;
                };
                let r = job();
                done.lock().expect("results poisoned")[i] = Some(r);
            });
        }
    });
    results
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect()
}

pub fn report_json(
    level: Level,
    seed: u64,
    tolerance: f64,
    results: &[CheckResult],
    elapsed_s: f64,
) -> Value {
    json!({
        "level": if level == Level::Full { "full" } else { "quick" },
        "seed": seed,
        "tolerance": tolerance,
        "passed": results.iter().all(CheckResult::passed),
        "elapsed_s": elapsed_s,
        "checks": results.iter().map(CheckResult::to_json).collect::<Vec<_>>(),
    })
}
