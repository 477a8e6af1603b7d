//! Tensor products of irreps: CG contraction, pointwise products of spin signals, and the
//! encode / multiply / decode pipeline built from them.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::angular::{cg_table, triangle};
use crate::error::{invalid, precondition, Error, Result};
use crate::rules::{find_valid_ells, generalized_gaunt};
use crate::sht::{make_grid, BlockKey, IrrepCoeffs, SphereGrid, Tag};
use crate::tsh::{
    decode_flops, encode_flops, tsh_decode_keys, tsh_encode_counted, SpinSignal, TshCoeffs,
};

pub use crate::rules::PathKey;

/// Output of a tensor product together with the complex multiply-accumulates it took.
#[derive(Clone, Debug, PartialEq)]
pub struct TpoResult<T> {
    pub output: T,
    pub flops: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CgtpMode {
    /// Every `(m1, m2, m3)` triple.
    Naive,
    /// Only `m3 = m1 + m2`.
    Sparse,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn degree_of(v: &[Complex64], what: &str) -> Result<u32> {
    if v.len() % 2 == 0 {
        return Err(invalid(format!("{what} has even length {}", v.len())));
    }
    Ok((v.len() / 2) as u32)
}

/// MACs of [`cgtp_path`] for one path.
pub fn cgtp_path_flops(j1: u32, j2: u32, j3: u32, mode: CgtpMode) -> u64 {
    let (n1, n2, n3) = (2 * j1 as u64 + 1, 2 * j2 as u64 + 1, 2 * j3 as u64 + 1);
    match mode {
        CgtpMode::Naive => n1 * n2 * n3,
        CgtpMode::Sparse => {
            let (a, b, c) = (j1 as i64, j2 as i64, j3 as i64);
            (-c..=c)
                .map(|m3| (-a..=a).filter(|m1| (m3 - m1).abs() <= b).count() as u64)
                .sum()
        }
    }
}

/// `z_{m3} = sum C^{j3,m3}_{j1,m1,j2,m2} x_{m1} y_{m2}`.
pub fn cgtp_path(
    x: &[Complex64],
    y: &[Complex64],
    j3: u32,
    mode: CgtpMode,
) -> Result<TpoResult<Vec<Complex64>>> {
    let j1 = degree_of(x, "x")?;
    let j2 = degree_of(y, "y")?;
    if !triangle(j1, j2, j3) {
        return Err(Error::TriangleViolation(j1, j2, j3));
    }
    let t = cg_table(j1, j2, j3)?;
    let (a, b, c) = (j1 as i32, j2 as i32, j3 as i32);
    let mut z = vec![zero(); 2 * j3 as usize + 1];
    let mut flops = 0u64;
    for m3 in -c..=c {
        let mut acc = zero();
        for m1 in -a..=a {
            let xm = x[(m1 + a) as usize];
            match mode {
                CgtpMode::Naive => {
                    for m2 in -b..=b {
                        let coeff = if m1 + m2 == m3 { t.get(m1, m2) } else { 0.0 };
                        acc += xm * y[(m2 + b) as usize] * coeff;
                        flops += 1;
                    }
                }
                CgtpMode::Sparse => {
                    let m2 = m3 - m1;
                    if m2.abs() <= b {
                        acc += xm * y[(m2 + b) as usize] * t.get(m1, m2);
                        flops += 1;
                    }
                }
            }
        }
        z[(m3 + c) as usize] = acc;
    }
    Ok(TpoResult { output: z, flops })
}

fn plain_blocks(x: &IrrepCoeffs, what: &str) -> Result<Vec<(u32, Vec<Complex64>)>> {
    x.blocks()
        .map(|(k, v)| match k.tag {
            Tag::None => Ok((k.j, v.to_vec())),
            _ => Err(invalid(format!(
                "{what} has a tagged block {k:?}; expected one untagged block per degree"
            ))),
        })
        .collect()
}

/// Every admissible path `(j1, j2) -> j3 <= l3max`, each output keyed by its source path.
pub fn cgtp_full(
    x: &IrrepCoeffs,
    y: &IrrepCoeffs,
    l3max: u32,
    mode: CgtpMode,
) -> Result<TpoResult<IrrepCoeffs>> {
    let xs = plain_blocks(x, "x")?;
    let ys = plain_blocks(y, "y")?;
    let mut out = IrrepCoeffs::new(l3max);
    let mut flops = 0;
    for (j1, xv) in &xs {
        for (j2, yv) in &ys {
            for j3 in j1.abs_diff(*j2)..=(j1 + j2).min(l3max) {
                let r = cgtp_path(xv, yv, j3, mode)?;
                flops += r.flops;
                out.insert(
                    BlockKey {
                        j: j3,
                        tag: Tag::Path(*j1, *j2),
                    },
                    r.output,
                )?;
            }
        }
    }
    Ok(TpoResult { output: out, flops })
}

/// MACs of [`cgtp_full`] on full inputs of band limits `lx`, `ly`.
pub fn cgtp_full_flops(lx: u32, ly: u32, l3max: u32, mode: CgtpMode) -> u64 {
    let mut total = 0;
    for j1 in 0..=lx {
        for j2 in 0..=ly {
            for j3 in j1.abs_diff(j2)..=(j1 + j2).min(l3max) {
                total += cgtp_path_flops(j1, j2, j3, mode);
            }
        }
    }
    total
}

/// MACs of [`pointwise_spin_tp`] on a grid with `n_points` samples.
pub fn pointwise_flops(n_points: usize, s1: u32, s2: u32, s3: u32) -> u64 {
    cgtp_path_flops(s1, s2, s3, CgtpMode::Sparse) * n_points as u64
}

/// Per-point coupling `(f ⊗ g)^{s3}_{m3} = sum C^{s3,m3}_{s1,m1,s2,m2} f_{m1} g_{m2}`.
pub fn pointwise_spin_tp(f: &SpinSignal, g: &SpinSignal, s3: u32) -> Result<TpoResult<SpinSignal>> {
    if !Arc::ptr_eq(&f.grid, &g.grid) && f.grid.lg() != g.grid.lg() {
        return Err(invalid(format!(
            "grid mismatch: degrees {} and {}",
            f.grid.lg(),
            g.grid.lg()
        )));
    }
    let (s1, s2) = (f.s, g.s);
    if !triangle(s1, s2, s3) {
        return Err(Error::TriangleViolation(s1, s2, s3));
    }
    let t = cg_table(s1, s2, s3)?;
    let (a, b, c) = (s1 as i32, s2 as i32, s3 as i32);
    let mut out = SpinSignal::zeros(s3, Arc::clone(&f.grid));
    let mut flops = 0;
    for m3 in -c..=c {
        for m1 in -a..=a {
            let m2 = m3 - m1;
            if m2.abs() > b {
                continue;
            }
            let coeff = t.get(m1, m2);
            let (fv, gv) = (f.component(m1), g.component(m2));
            for (o, (&p, &q)) in out.component_mut(m3).iter_mut().zip(fv.iter().zip(gv)) {
                *o += p * q * coeff;
            }
            flops += fv.len() as u64;
        }
    }
    Ok(TpoResult { output: out, flops })
}

fn check_istp_grid(x: &TshCoeffs, y: &TshCoeffs, l3max: u32, grid: &SphereGrid) -> Result<()> {
    if grid.lg() < x.lmax() + y.lmax() {
        return Err(precondition(format!(
            "grid degree {} is below the product band limit {} + {}",
            grid.lg(),
            x.lmax(),
            y.lmax()
        )));
    }
    if l3max > grid.lg() {
        return Err(precondition(format!(
            "output band limit {l3max} exceeds grid degree {}",
            grid.lg()
        )));
    }
    Ok(())
}

/// Encode both inputs, couple pointwise to spin `s3`, and decode every admissible block up to `l3max`.
pub fn istp(
    x: &TshCoeffs,
    y: &TshCoeffs,
    s3: u32,
    l3max: u32,
    grid: &Arc<SphereGrid>,
) -> Result<TpoResult<TshCoeffs>> {
    istp_keys(
        x,
        y,
        s3,
        l3max,
        &TshCoeffs::admissible_keys(s3, l3max),
        grid,
    )
}

/// [`istp`] decoding only the listed output blocks.
pub fn istp_keys(
    x: &TshCoeffs,
    y: &TshCoeffs,
    s3: u32,
    l3max: u32,
    keys: &[(u32, u32)],
    grid: &Arc<SphereGrid>,
) -> Result<TpoResult<TshCoeffs>> {
    check_istp_grid(x, y, l3max, grid)?;
    if !triangle(x.s(), y.s(), s3) {
        return Err(Error::TriangleViolation(x.s(), y.s(), s3));
    }
    let mut flops = 0;
    let f = tsh_encode_counted(x, grid, &mut flops)?;
    let g = tsh_encode_counted(y, grid, &mut flops)?;
    let h = pointwise_spin_tp(&f, &g, s3)?;
    flops += h.flops;
    let output = tsh_decode_keys(&h.output, l3max, keys, &mut flops)?;
    Ok(TpoResult { output, flops })
}

/// MACs of [`istp_keys`] for the given input and output block sets.
pub fn istp_flops(
    grid: &SphereGrid,
    x: (u32, &[(u32, u32)]),
    y: (u32, &[(u32, u32)]),
    s3: u32,
    keys: &[(u32, u32)],
) -> u64 {
    encode_flops(grid, x.0, x.1)
        + encode_flops(grid, y.0, y.1)
        + pointwise_flops(grid.n_points(), x.0, y.0, s3)
        + decode_flops(grid, s3, keys)
}

fn scalar_to_tsh(x: &IrrepCoeffs, what: &str) -> Result<TshCoeffs> {
    let mut t = TshCoeffs::new(0, x.lmax());
    for (j, v) in plain_blocks(x, what)? {
        t.insert(j, j, v)?;
    }
    Ok(t)
}

/// Gaunt tensor product: the spin-0 case, with scalar signals multiplied pointwise.
pub fn gtp(
    x: &IrrepCoeffs,
    y: &IrrepCoeffs,
    l3max: u32,
    grid: &Arc<SphereGrid>,
) -> Result<TpoResult<IrrepCoeffs>> {
    let r = istp(
        &scalar_to_tsh(x, "x")?,
        &scalar_to_tsh(y, "y")?,
        0,
        l3max,
        grid,
    )?;
    let mut out = IrrepCoeffs::new(l3max);
    for ((j, _), v) in r.output.blocks() {
        out.insert(BlockKey::plain(j), v.to_vec())?;
    }
    Ok(TpoResult {
        output: out,
        flops: r.flops,
    })
}

/// Vector signal tensor product: spin 1 in, spin 1 out.
pub fn vstp(
    x: &TshCoeffs,
    y: &TshCoeffs,
    l3max: u32,
    grid: &Arc<SphereGrid>,
) -> Result<TpoResult<TshCoeffs>> {
    if x.s() != 1 || y.s() != 1 {
        return Err(invalid(format!(
            "VSTP needs spin-1 inputs, got {} and {}",
            x.s(),
            y.s()
        )));
    }
    istp(x, y, 1, l3max, grid)
}

fn single_block(s: u32, j: u32, l: u32, v: &[Complex64]) -> Result<TshCoeffs> {
    let mut t = TshCoeffs::new(s, l);
    t.insert(j, l, v.to_vec())?;
    Ok(t)
}

fn checked_gaunt(path: &PathKey) -> Result<f64> {
    let g = generalized_gaunt(path);
    if g.abs() < 1e-13 {
        return Err(Error::NumericalDegeneracy(format!(
            "generalized Gaunt coefficient {g:e} for {path:?}"
        )));
    }
    Ok(g)
}

/// One CG path computed by a single VSTP on a grid of degree `l1 + l2`.
pub fn simulate_cgtp_path(
    x: &[Complex64],
    y: &[Complex64],
    j3: u32,
) -> Result<TpoResult<Vec<Complex64>>> {
    let j1 = degree_of(x, "x")?;
    let j2 = degree_of(y, "y")?;
    if !triangle(j1, j2, j3) {
        return Err(Error::TriangleViolation(j1, j2, j3));
    }
    if (j1, j2, j3) == (0, 0, 0) {
        return Ok(TpoResult {
            output: vec![x[0] * y[0]],
            flops: 1,
        });
    }
    let (l1, l2, _) = find_valid_ells(j1, j2, j3)?;
    simulate_cgtp_path_on(x, y, j3, &make_grid(l1 + l2))
}

/// [`simulate_cgtp_path`] on a caller-supplied grid.
pub fn simulate_cgtp_path_on(
    x: &[Complex64],
    y: &[Complex64],
    j3: u32,
    grid: &Arc<SphereGrid>,
) -> Result<TpoResult<Vec<Complex64>>> {
    let j1 = degree_of(x, "x")?;
    let j2 = degree_of(y, "y")?;
    if !triangle(j1, j2, j3) {
        return Err(Error::TriangleViolation(j1, j2, j3));
    }
    if (j1, j2, j3) == (0, 0, 0) {
        return Ok(TpoResult {
            output: vec![x[0] * y[0]],
            flops: 1,
        });
    }
    let (l1, l2, l3) = find_valid_ells(j1, j2, j3)?;
    let g = checked_gaunt(&PathKey::vstp(j1, l1, j2, l2, j3, l3))?;
    let r = istp_keys(
        &single_block(1, j1, l1, x)?,
        &single_block(1, j2, l2, y)?,
        1,
        l3,
        &[(j3, l3)],
        grid,
    )?;
    let block = r.output.get(j3, l3).expect("decoded key");
    Ok(TpoResult {
        output: block.iter().map(|v| v / g).collect(),
        flops: r.flops + block.len() as u64,
    })
}

/// VSTP calls that reproduce every path of a full CGTP: one per distinct `(j1, j2, l1, l2)`,
/// each decoding all output blocks `(j3, l3)` sharing those input degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulationPlan {
    /// `(j1, j2, l1, l2) -> [(j3, l3)]`.
    pub calls: BTreeMap<(u32, u32, u32, u32), Vec<(u32, u32)>>,
    /// Whether the scalar path `(0, 0, 0)` is multiplied directly.
    pub scalar_path: bool,
}

impl SimulationPlan {
    /// Plan for full inputs of band limits `lx`, `ly`.
    pub fn new(lx: u32, ly: u32, l3max: u32) -> Result<Self> {
        Self::with_degrees(
            &(0..=lx).collect::<Vec<_>>(),
            &(0..=ly).collect::<Vec<_>>(),
            l3max,
        )
    }

    /// Plan for inputs carrying exactly the listed degrees.
    pub fn with_degrees(xs: &[u32], ys: &[u32], l3max: u32) -> Result<Self> {
        let mut calls: BTreeMap<_, Vec<_>> = BTreeMap::new();
        let mut scalar_path = false;
        for &j1 in xs {
            for &j2 in ys {
                for j3 in j1.abs_diff(j2)..=(j1 + j2).min(l3max) {
                    if (j1, j2, j3) == (0, 0, 0) {
                        scalar_path = true;
                        continue;
                    }
                    let (l1, l2, l3) = find_valid_ells(j1, j2, j3)?;
                    calls.entry((j1, j2, l1, l2)).or_default().push((j3, l3));
                }
            }
        }
        Ok(SimulationPlan { calls, scalar_path })
    }

    /// MACs of [`simulate_cgtp_full`] under this plan, grids of degree `l1 + l2`.
    pub fn flops(&self) -> u64 {
        let mut grids: BTreeMap<u32, Arc<SphereGrid>> = BTreeMap::new();
        let mut total = u64::from(self.scalar_path);
        for (&(j1, j2, l1, l2), keys) in &self.calls {
            let grid = grids.entry(l1 + l2).or_insert_with(|| make_grid(l1 + l2));
            total += istp_flops(grid, (1, &[(j1, l1)]), (1, &[(j2, l2)]), 1, keys);
            total += keys.iter().map(|&(j3, _)| 2 * j3 as u64 + 1).sum::<u64>();
        }
        total
    }
}

/// Every CG path of `x ⊗ y` up to `l3max`, each computed from a VSTP; keys match [`cgtp_full`].
pub fn simulate_cgtp_full(
    x: &IrrepCoeffs,
    y: &IrrepCoeffs,
    l3max: u32,
) -> Result<TpoResult<IrrepCoeffs>> {
    let xs: BTreeMap<u32, Vec<Complex64>> = plain_blocks(x, "x")?.into_iter().collect();
    let ys: BTreeMap<u32, Vec<Complex64>> = plain_blocks(y, "y")?.into_iter().collect();
    let plan = SimulationPlan::with_degrees(
        &xs.keys().copied().collect::<Vec<_>>(),
        &ys.keys().copied().collect::<Vec<_>>(),
        l3max,
    )?;
    let mut out = IrrepCoeffs::new(l3max);
    let mut flops = 0;
    if let (Some(a), Some(b)) = (xs.get(&0), ys.get(&0)) {
        out.insert(
            BlockKey {
                j: 0,
                tag: Tag::Path(0, 0),
            },
            vec![a[0] * b[0]],
        )?;
        flops += 1;
    }
    let mut grids: BTreeMap<u32, Arc<SphereGrid>> = BTreeMap::new();
    for (&(j1, j2, l1, l2), keys) in &plan.calls {
        let (xv, yv) = (&xs[&j1], &ys[&j2]);
        let grid = grids.entry(l1 + l2).or_insert_with(|| make_grid(l1 + l2));
        let l3top = keys
            .iter()
            .map(|&(_, l3)| l3)
            .max()
            .expect("plan entries are non-empty");
        let r = istp_keys(
            &single_block(1, j1, l1, xv)?,
            &single_block(1, j2, l2, yv)?,
            1,
            l3top,
            keys,
            grid,
        )?;
        flops += r.flops;
        for &(j3, l3) in keys {
            let g = checked_gaunt(&PathKey::vstp(j1, l1, j2, l2, j3, l3))?;
            let block = r.output.get(j3, l3).expect("decoded key");
            flops += block.len() as u64;
            out.insert(
                BlockKey {
                    j: j3,
                    tag: Tag::Path(j1, j2),
                },
                block.iter().map(|v| v / g).collect(),
            )?;
        }
    }
    Ok(TpoResult { output: out, flops })
}
