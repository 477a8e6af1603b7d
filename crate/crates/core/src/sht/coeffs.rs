use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::angular::{wigner_d_matrix, Rotation};
use crate::error::{invalid, Result};

/// Secondary label carried by a coefficient block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    None,
    /// Orbital degree `l` of a TSH-derived block.
    Orbital(u32),
    /// Source path `(j1, j2)` of a CG tensor-product output block.
    Path(u32, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockKey {
    pub j: u32,
    pub tag: Tag,
}

impl BlockKey {
    pub fn plain(j: u32) -> Self {
        BlockKey { j, tag: Tag::None }
    }
}

/// Coefficient blocks `x^{(j)}_m`, each of length `2j+1` and indexed `m = -j..=j`.
#[derive(Clone, Debug, PartialEq)]
pub struct IrrepCoeffs {
    lmax: u32,
    blocks: BTreeMap<BlockKey, Vec<Complex64>>,
}

impl IrrepCoeffs {
    pub fn new(lmax: u32) -> Self {
        IrrepCoeffs {
            lmax,
            blocks: BTreeMap::new(),
        }
    }

    /// One untagged zero block for every `j <= lmax`.
    pub fn zeros(lmax: u32) -> Self {
        let mut x = IrrepCoeffs::new(lmax);
        for j in 0..=lmax {
            x.blocks.insert(
                BlockKey::plain(j),
                vec![Complex64::new(0.0, 0.0); 2 * j as usize + 1],
            );
        }
        x
    }

    /// One untagged block per `j <= lmax` with entries uniform in the unit square.
    pub fn random<R: Rng + ?Sized>(lmax: u32, rng: &mut R) -> Self {
        let mut x = IrrepCoeffs::new(lmax);
        for j in 0..=lmax {
            x.blocks
                .insert(BlockKey::plain(j), random_vector(2 * j as usize + 1, rng));
        }
        x
    }

    /// Band limit `L`.
    pub fn lmax(&self) -> u32 {
        self.lmax
    }

    pub fn insert(&mut self, key: BlockKey, values: Vec<Complex64>) -> Result<()> {
        if key.j > self.lmax {
            return Err(invalid(format!(
                "block degree {} exceeds band limit {}",
                key.j, self.lmax
            )));
        }
        if values.len() != 2 * key.j as usize + 1 {
            return Err(invalid(format!(
                "block j={} has length {}, expected {}",
                key.j,
                values.len(),
                2 * key.j + 1
            )));
        }
        self.blocks.insert(key, values);
        Ok(())
    }

    pub fn get(&self, key: &BlockKey) -> Option<&[Complex64]> {
        self.blocks.get(key).map(Vec::as_slice)
    }

    /// The untagged block of degree `j`.
    pub fn block(&self, j: u32) -> Option<&[Complex64]> {
        self.get(&BlockKey::plain(j))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&BlockKey, &[Complex64])> {
        self.blocks.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Largest absolute entry-wise difference; blocks missing on one side count as zero.
    pub fn max_abs_diff(&self, other: &IrrepCoeffs) -> f64 {
        let mut worst = 0.0f64;
        for (k, v) in &self.blocks {
            match other.blocks.get(k) {
                Some(w) => worst = worst.max(max_diff(v, w)),
                None => worst = worst.max(max_norm(v)),
            }
        }
        for (k, w) in &other.blocks {
            if !self.blocks.contains_key(k) {
                worst = worst.max(max_norm(w));
            }
        }
        worst
    }

    /// Every block multiplied by `D^j(rot)`.
    pub fn rotated(&self, rot: &Rotation) -> IrrepCoeffs {
        let mut ds = BTreeMap::new();
        self.map_blocks(|k, v| {
            ds.entry(k.j)
                .or_insert_with(|| wigner_d_matrix(k.j, rot))
                .apply(v)
        })
    }

    /// Applies `f(key, block)` to every block, e.g. a Wigner D rotation.
    pub fn map_blocks(
        &self,
        mut f: impl FnMut(&BlockKey, &[Complex64]) -> Vec<Complex64>,
    ) -> IrrepCoeffs {
        IrrepCoeffs {
            lmax: self.lmax,
            blocks: self.blocks.iter().map(|(k, v)| (*k, f(k, v))).collect(),
        }
    }
}

/// Entries with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub(crate) fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub(crate) fn max_norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}
