//! Tensor spherical harmonics `Y^{l,s}_{j,m}` and spin-valued signals.
//!
//! Component `m_s` of `Y^{l,s}_{j,m}` is `sum_{m_l} C^{j,m}_{l,m_l,s,m_s} Y_l^{m_l}`. Encoding and
//! decoding factor through `2s+1` scalar transforms.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::angular::{cg_f64, cg_table, triangle, wigner_d_matrix, Rotation};
use crate::error::{invalid, precondition, Result};
use crate::sht::{
    analysis_flops, from_sphere_degrees_counted, max_diff, max_norm, random_vector, sh_eval,
    synthesis_flops, to_sphere_counted, BlockKey, IrrepCoeffs, ScalarSignal, SphereGrid,
};

/// TSH expansion coefficients keyed by `(j, l)`, iterated in ascending `j`, then `l`.
#[derive(Clone, Debug, PartialEq)]
pub struct TshCoeffs {
    s: u32,
    lmax: u32,
    blocks: BTreeMap<(u32, u32), Vec<Complex64>>,
}

impl TshCoeffs {
    pub fn new(s: u32, lmax: u32) -> Self {
        TshCoeffs {
            s,
            lmax,
            blocks: BTreeMap::new(),
        }
    }

    /// Every admissible `(j, l)` with `l <= lmax`, in canonical order.
    pub fn admissible_keys(s: u32, lmax: u32) -> Vec<(u32, u32)> {
        let mut keys: Vec<(u32, u32)> = (0..=lmax)
            .flat_map(|l| (l.abs_diff(s)..=l + s).map(move |j| (j, l)))
            .collect();
        keys.sort_unstable();
        keys
    }

    pub fn zeros(s: u32, lmax: u32) -> Self {
        let mut x = TshCoeffs::new(s, lmax);
        for (j, l) in Self::admissible_keys(s, lmax) {
            x.blocks
                .insert((j, l), vec![Complex64::new(0.0, 0.0); 2 * j as usize + 1]);
        }
        x
    }

    pub fn random<R: Rng + ?Sized>(s: u32, lmax: u32, rng: &mut R) -> Self {
        let mut x = TshCoeffs::new(s, lmax);
        for (j, l) in Self::admissible_keys(s, lmax) {
            x.blocks
                .insert((j, l), random_vector(2 * j as usize + 1, rng));
        }
        x
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn lmax(&self) -> u32 {
        self.lmax
    }

    pub fn insert(&mut self, j: u32, l: u32, values: Vec<Complex64>) -> Result<()> {
        if !triangle(j, l, self.s) {
            return Err(invalid(format!(
                "(j, l, s) = ({j}, {l}, {}) violates the triangle condition",
                self.s
            )));
        }
        if l > self.lmax {
            return Err(invalid(format!(
                "orbital degree {l} exceeds band limit {}",
                self.lmax
            )));
        }
        if values.len() != 2 * j as usize + 1 {
            return Err(invalid(format!(
                "block ({j}, {l}) has length {}, expected {}",
                values.len(),
                2 * j + 1
            )));
        }
        self.blocks.insert((j, l), values);
        Ok(())
    }

    pub fn get(&self, j: u32, l: u32) -> Option<&[Complex64]> {
        self.blocks.get(&(j, l)).map(Vec::as_slice)
    }

    pub fn blocks(&self) -> impl Iterator<Item = ((u32, u32), &[Complex64])> {
        self.blocks.iter().map(|(k, v)| (*k, v.as_slice()))
    }

    pub fn keys(&self) -> Vec<(u32, u32)> {
        self.blocks.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn map_blocks(
        &self,
        mut f: impl FnMut((u32, u32), &[Complex64]) -> Vec<Complex64>,
    ) -> TshCoeffs {
        TshCoeffs {
            s: self.s,
            lmax: self.lmax,
            blocks: self.blocks.iter().map(|(k, v)| (*k, f(*k, v))).collect(),
        }
    }

    /// Every block `(j, l)` multiplied by `D^j(rot)`.
    pub fn rotated(&self, rot: &Rotation) -> TshCoeffs {
        let mut ds = BTreeMap::new();
        self.map_blocks(|(j, _), v| {
            ds.entry(j)
                .or_insert_with(|| wigner_d_matrix(j, rot))
                .apply(v)
        })
    }

    /// Largest entry-wise difference; a block missing on one side counts as zero.
    pub fn max_abs_diff(&self, other: &TshCoeffs) -> f64 {
        let mut worst = 0.0f64;
        for (k, v) in &self.blocks {
            worst = worst.max(
                other
                    .blocks
                    .get(k)
                    .map_or_else(|| max_norm(v), |w| max_diff(v, w)),
            );
        }
        for (k, w) in &other.blocks {
            if !self.blocks.contains_key(k) {
                worst = worst.max(max_norm(w));
            }
        }
        worst
    }
}

/// Samples of a spin-`s` field, one scalar array per component `m_s = -s..=s`.
#[derive(Clone, Debug)]
pub struct SpinSignal {
    pub s: u32,
    pub grid: Arc<SphereGrid>,
    components: Vec<Vec<Complex64>>,
}

impl SpinSignal {
    pub fn new(s: u32, grid: Arc<SphereGrid>, components: Vec<Vec<Complex64>>) -> Result<Self> {
        if components.len() != 2 * s as usize + 1 {
            return Err(invalid(format!(
                "spin {s} needs {} components, got {}",
                2 * s + 1,
                components.len()
            )));
        }
        if components.iter().any(|c| c.len() != grid.n_points()) {
            return Err(invalid("component length does not match the grid"));
        }
        Ok(SpinSignal {
            s,
            grid,
            components,
        })
    }

    pub fn zeros(s: u32, grid: Arc<SphereGrid>) -> Self {
        let n = grid.n_points();
        SpinSignal {
            s,
            grid,
            components: vec![vec![Complex64::new(0.0, 0.0); n]; 2 * s as usize + 1],
        }
    }

    pub fn component(&self, ms: i32) -> &[Complex64] {
        &self.components[(ms + self.s as i32) as usize]
    }

    pub fn component_mut(&mut self, ms: i32) -> &mut [Complex64] {
        let s = self.s as i32;
        &mut self.components[(ms + s) as usize]
    }

    /// The `2s+1` components at grid point `p` (row-major index).
    pub fn at(&self, p: usize) -> Vec<Complex64> {
        self.components.iter().map(|c| c[p]).collect()
    }
}

/// `Y^{l,s}_{j,m}(theta, phi)` as its `2s+1` components.
pub fn tsh_eval(j: u32, mj: i32, l: u32, s: u32, theta: f64, phi: f64) -> Result<Vec<Complex64>> {
    if !triangle(j, l, s) {
        return Err(invalid(format!(
            "(j, l, s) = ({j}, {l}, {s}) violates the triangle condition"
        )));
    }
    if mj.unsigned_abs() > j {
        return Err(invalid(format!(
            "|m| = {} exceeds j = {j}",
            mj.unsigned_abs()
        )));
    }
    let si = s as i32;
    (-si..=si)
        .map(|ms| {
            let ml = mj - ms;
            if ml.unsigned_abs() > l {
                return Ok(Complex64::new(0.0, 0.0));
            }
            Ok(sh_eval(l, ml, theta, phi)? * cg_f64(l, ml, s, ms, j, mj))
        })
        .collect()
}

/// MACs of [`tsh_encode`] for blocks with the given keys.
pub fn encode_flops(grid: &SphereGrid, s: u32, keys: &[(u32, u32)]) -> u64 {
    let degrees: BTreeSet<u32> = keys.iter().map(|&(_, l)| l).collect();
    let couple: u64 = keys.iter().map(|&(j, l)| coupling_count(j, l, s)).sum();
    couple + (2 * s as u64 + 1) * synthesis_flops(grid, degrees)
}

/// MACs of [`tsh_decode_keys`] producing the given keys.
pub fn decode_flops(grid: &SphereGrid, s: u32, keys: &[(u32, u32)]) -> u64 {
    let degrees: BTreeSet<u32> = keys.iter().map(|&(_, l)| l).collect();
    let couple: u64 = keys.iter().map(|&(j, l)| coupling_count(j, l, s)).sum();
    couple + (2 * s as u64 + 1) * analysis_flops(grid, degrees)
}

/// Number of `(m_l, m_s)` pairs with `|m_l + m_s| <= j`.
fn coupling_count(j: u32, l: u32, s: u32) -> u64 {
    let (j, l, s) = (j as i32, l as i32, s as i32);
    (-s..=s)
        .map(|ms| (-l..=l).filter(|ml| (ml + ms).abs() <= j).count() as u64)
        .sum()
}

/// Synthesizes the spin-`s` field `sum x^{(j,l)}_m Y^{l,s}_{j,m}`.
pub fn tsh_encode(x: &TshCoeffs, grid: &Arc<SphereGrid>) -> Result<SpinSignal> {
    tsh_encode_counted(x, grid, &mut 0)
}

pub fn tsh_encode_counted(
    x: &TshCoeffs,
    grid: &Arc<SphereGrid>,
    flops: &mut u64,
) -> Result<SpinSignal> {
    if grid.lg() < x.lmax() {
        return Err(precondition(format!(
            "grid degree {} is below band limit {}",
            grid.lg(),
            x.lmax()
        )));
    }
    let s = x.s() as i32;
    let degrees: BTreeSet<u32> = x.blocks().map(|((_, l), _)| l).collect();
    let mut out = SpinSignal::zeros(x.s(), Arc::clone(grid));
    for ms in -s..=s {
        // B^l_{m_l} = sum_j C^{j, m_l+m_s}_{l, m_l, s, m_s} x^{(j,l)}_{m_l+m_s}
        let mut b: BTreeMap<u32, Vec<Complex64>> = degrees
            .iter()
            .map(|&l| (l, vec![Complex64::new(0.0, 0.0); 2 * l as usize + 1]))
            .collect();
        for ((j, l), v) in x.blocks() {
            let t = cg_table(l, x.s(), j)?;
            let (ji, li) = (j as i32, l as i32);
            let bl = b.get_mut(&l).expect("degree collected above");
            for ml in -li..=li {
                let mj = ml + ms;
                if mj.abs() > ji {
                    continue;
                }
                bl[(ml + li) as usize] += v[(mj + ji) as usize] * t.get(ml, ms);
                *flops += 1;
            }
        }
        let mut scalar = IrrepCoeffs::new(x.lmax());
        for (l, v) in b {
            scalar.insert(BlockKey::plain(l), v)?;
        }
        let f = to_sphere_counted(&scalar, grid, flops)?;
        out.component_mut(ms).copy_from_slice(&f.values);
    }
    Ok(out)
}

/// Analyzes a spin field into every admissible `(j, l)` block with `l <= lmax`.
pub fn tsh_decode(f: &SpinSignal, lmax: u32) -> Result<TshCoeffs> {
    let keys = TshCoeffs::admissible_keys(f.s, lmax);
    tsh_decode_keys(f, lmax, &keys, &mut 0)
}

/// Analyzes a spin field into the listed `(j, l)` blocks only.
pub fn tsh_decode_keys(
    f: &SpinSignal,
    lmax: u32,
    keys: &[(u32, u32)],
    flops: &mut u64,
) -> Result<TshCoeffs> {
    if lmax > f.grid.lg() {
        return Err(precondition(format!(
            "analysis degree {lmax} exceeds grid degree {}",
            f.grid.lg()
        )));
    }
    let s = f.s as i32;
    let degrees: Vec<u32> = keys
        .iter()
        .map(|&(_, l)| l)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut scalar = Vec::with_capacity(2 * f.s as usize + 1);
    for ms in -s..=s {
        let sig = ScalarSignal::new(Arc::clone(&f.grid), f.component(ms).to_vec())?;
        scalar.push(from_sphere_degrees_counted(&sig, lmax, &degrees, flops)?);
    }
    let mut out = TshCoeffs::new(f.s, lmax);
    for &(j, l) in keys {
        let t = cg_table(l, f.s, j)?;
        let (ji, li) = (j as i32, l as i32);
        let mut z = vec![Complex64::new(0.0, 0.0); 2 * j as usize + 1];
        for ms in -s..=s {
            let bl = scalar[(ms + s) as usize]
                .block(l)
                .expect("degree analyzed above");
            for ml in -li..=li {
                let mj = ml + ms;
                if mj.abs() > ji {
                    continue;
                }
                z[(mj + ji) as usize] += bl[(ml + li) as usize] * t.get(ml, ms);
                *flops += 1;
            }
        }
        out.insert(j, l, z)?;
    }
    Ok(out)
}

/// `max |<Y_a, Y_b> - delta_ab|` over all TSH with `l <= lmax`, by quadrature on a grid of
/// degree `lmax` with pointwise evaluation (independent of the encode path).
pub fn tsh_orthonormality_check(s: u32, lmax: u32) -> Result<f64> {
    if lmax < s {
        return Err(precondition(format!("band limit {lmax} is below spin {s}")));
    }
    let grid = SphereGrid::new(lmax);
    let mut funcs: Vec<Vec<Complex64>> = Vec::new();
    for (j, l) in TshCoeffs::admissible_keys(s, lmax) {
        for mj in -(j as i32)..=j as i32 {
            let mut samples = Vec::with_capacity(grid.n_points() * (2 * s as usize + 1));
            for i in 0..grid.n_theta() {
                for k in 0..grid.n_phi() {
                    samples.extend(tsh_eval(j, mj, l, s, grid.theta(i), grid.phi(k))?);
                }
            }
            funcs.push(samples);
        }
    }
    let comps = 2 * s as usize + 1;
    let weights: Vec<f64> = (0..grid.n_theta())
        .flat_map(|i| std::iter::repeat(grid.area_weight(i)).take(grid.n_phi() * comps))
        .collect();
    let mut worst = 0.0f64;
    for (a, fa) in funcs.iter().enumerate() {
        for (b, fb) in funcs.iter().enumerate().skip(a) {
            let dot: Complex64 = fa
                .iter()
                .zip(fb)
                .zip(&weights)
                .map(|((x, y), w)| x.conj() * y * *w)
                .sum();
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((dot - want).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sht::{make_grid, to_sphere};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn spin_zero_is_scalar_sh() {
        for j in 0..=4u32 {
            for m in -(j as i32)..=j as i32 {
                let v = tsh_eval(j, m, j, 0, 0.7, 1.9).unwrap();
                assert_eq!(v.len(), 1);
                assert!((v[0] - sh_eval(j, m, 0.7, 1.9).unwrap()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn radial_field_has_constant_norm() {
        for (t, p) in [(0.2, 0.1), (1.4, 2.2), (2.9, 5.0)] {
            let v = tsh_eval(0, 0, 1, 1, t, p).unwrap();
            let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let want = (3.0 / (4.0 * std::f64::consts::PI)).sqrt() / 3f64.sqrt();
            assert!((norm - want).abs() < 1e-14);
        }
        assert!(tsh_eval(0, 0, 2, 1, 0.1, 0.1).is_err());
    }

    #[test]
    fn admissible_keys_respect_triangle() {
        for s in 0..=2 {
            for (j, l) in TshCoeffs::admissible_keys(s, 6) {
                assert!(triangle(j, l, s) && l <= 6);
            }
        }
        let mut x = TshCoeffs::new(1, 3);
        assert!(x.insert(3, 1, vec![Complex64::new(0.0, 0.0); 7]).is_err());
        assert!(x.insert(1, 4, vec![Complex64::new(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn spin_zero_encode_is_scalar_synthesis() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = make_grid(5);
        let x = TshCoeffs::random(0, 5, &mut rng);
        let mut scalar = IrrepCoeffs::new(5);
        for ((j, _), v) in x.blocks() {
            scalar.insert(BlockKey::plain(j), v.to_vec()).unwrap();
        }
        let a = tsh_encode(&x, &g).unwrap();
        let b = to_sphere(&scalar, &g).unwrap();
        assert!(max_diff(a.component(0), &b.values) < 1e-14);
    }

    #[test]
    fn single_block_encodes_to_its_tsh() {
        let g = make_grid(2);
        let mut x = TshCoeffs::new(1, 1);
        x.insert(0, 1, vec![Complex64::new(1.0, 0.0)]).unwrap();
        let f = tsh_encode(&x, &g).unwrap();
        for i in 0..g.n_theta() {
            for k in 0..g.n_phi() {
                let want = tsh_eval(0, 0, 1, 1, g.theta(i), g.phi(k)).unwrap();
                let got = f.at(i * g.n_phi() + k);
                assert!(max_diff(&got, &want) < 1e-14);
            }
        }
    }

    #[test]
    fn zero_signal_decodes_to_zero() {
        let g = make_grid(3);
        let x = tsh_decode(&SpinSignal::zeros(1, g), 3).unwrap();
        assert!(x.blocks().all(|(_, v)| max_norm(v) == 0.0));
    }

    #[test]
    fn unit_block_round_trip() {
        let g = make_grid(3);
        let mut x = TshCoeffs::new(1, 3);
        x.insert(
            2,
            3,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let y = tsh_decode(&tsh_encode(&x, &g).unwrap(), 3).unwrap();
        assert!(y.max_abs_diff(&x) < 1e-12);
    }

    #[test]
    fn random_round_trip_s1_l4() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = make_grid(4);
        let x = TshCoeffs::random(1, 4, &mut rng);
        let y = tsh_decode(&tsh_encode(&x, &g).unwrap(), 4).unwrap();
        assert!(y.max_abs_diff(&x) < 1e-12);
    }

    #[test]
    fn orthonormality_examples() {
        assert!(tsh_orthonormality_check(0, 4).unwrap() < 1e-12);
        assert!(tsh_orthonormality_check(1, 4).unwrap() < 1e-12);
        assert!(tsh_orthonormality_check(2, 5).unwrap() < 1e-12);
        assert!(tsh_orthonormality_check(2, 1).is_err());
    }

    #[test]
    fn flop_projections_match_counters() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = make_grid(6);
        for s in 0..=2 {
            let x = TshCoeffs::random(s, 3, &mut rng);
            let mut n = 0;
            let f = tsh_encode_counted(&x, &g, &mut n).unwrap();
            assert_eq!(n, encode_flops(&g, s, &x.keys()));
            let keys = TshCoeffs::admissible_keys(s, 5);
            let mut n = 0;
            tsh_decode_keys(&f, 5, &keys, &mut n).unwrap();
            assert_eq!(n, decode_flops(&g, s, &keys));
        }
    }
}
