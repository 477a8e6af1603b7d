use num_complex::Complex64;
use rand::Rng;

use super::cg::CgTable;

/// A rotation in zyz Euler angles, `R = Rz(alpha) Ry(beta) Rz(gamma)`, acting actively.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Rotation {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Rotation { alpha, beta, gamma }
    }

    pub fn identity() -> Self {
        Rotation::new(0.0, 0.0, 0.0)
    }

    /// Haar-distributed rotation.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let tau = std::f64::consts::TAU;
        Rotation::new(
            rng.gen::<f64>() * tau,
            rng.gen_range(-1.0f64..=1.0).acos(),
            rng.gen::<f64>() * tau,
        )
    }

    pub fn inverse(&self) -> Self {
        Rotation::new(-self.gamma, -self.beta, -self.alpha)
    }

    /// The 3x3 Cartesian matrix.
    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let rz = |t: f64| {
            [
                [t.cos(), -t.sin(), 0.0],
                [t.sin(), t.cos(), 0.0],
                [0.0, 0.0, 1.0],
            ]
        };
        let ry = |t: f64| {
            [
                [t.cos(), 0.0, t.sin()],
                [0.0, 1.0, 0.0],
                [-t.sin(), 0.0, t.cos()],
            ]
        };
        matmul(&matmul(&rz(self.alpha), &ry(self.beta)), &rz(self.gamma))
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let m = self.matrix();
        [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
    }
}

fn matmul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// Square matrix indexed by `(m', m)` with `-j <= m', m <= j`.
#[derive(Clone, Debug)]
pub struct DMatrix {
    pub j: u32,
    data: Vec<Complex64>,
}

impl DMatrix {
    fn dim(&self) -> usize {
        2 * self.j as usize + 1
    }

    pub fn get(&self, mp: i32, m: i32) -> Complex64 {
        let j = self.j as i32;
        self.data[(mp + j) as usize * self.dim() + (m + j) as usize]
    }

    /// Row-major entries, rows and columns ordered `m = -j..=j`.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// `D x` for a coefficient vector of length `2j+1`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(x.len(), n, "vector length does not match 2j+1");
        (0..n)
            .map(|r| (0..n).map(|c| self.data[r * n + c] * x[c]).sum())
            .collect()
    }

    /// `max |(D D^dagger - I)_{ab}|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let dot: Complex64 = (0..n)
                    .map(|k| self.data[a * n + k] * self.data[b * n + k].conj())
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - want).norm());
            }
        }
        worst
    }
}

/// Small-d matrix `d^j_{m'm}(beta)`, row-major over `m', m = -j..=j`.
///
/// Built by coupling `d^{j-1}` with `d^1` through the top CG block, which avoids the
/// alternating factorial sums of the explicit formula.
pub fn wigner_small_d(j: u32, beta: f64) -> Vec<f64> {
    let (c, s) = (beta.cos(), beta.sin());
    let r2 = std::f64::consts::SQRT_2;
    // rows m' = -1, 0, 1; columns m = -1, 0, 1
    let d1 = [
        [(1.0 + c) / 2.0, s / r2, (1.0 - c) / 2.0],
        [-s / r2, c, s / r2],
        [(1.0 - c) / 2.0, -s / r2, (1.0 + c) / 2.0],
    ];
    let mut d = vec![1.0];
    for jj in 1..=j {
        let prev = jj as i32 - 1;
        let np = 2 * prev as usize + 1;
        let n = 2 * jj as usize + 1;
        let t = CgTable::new(jj - 1, 1, jj).expect("j-1, 1, j always couples");
        let ji = jj as i32;
        let mut next = vec![0.0; n * n];
        for mp in -ji..=ji {
            for m in -ji..=ji {
                let mut v = 0.0;
                for up in -1..=1i32 {
                    let ap = mp - up;
                    if ap.abs() > prev {
                        continue;
                    }
                    let cp = t.get(ap, up);
                    for u in -1..=1i32 {
                        let a = m - u;
                        if a.abs() > prev {
                            continue;
                        }
                        v += cp
                            * t.get(a, u)
                            * d[(ap + prev) as usize * np + (a + prev) as usize]
                            * d1[(up + 1) as usize][(u + 1) as usize];
                    }
                }
                next[(mp + ji) as usize * n + (m + ji) as usize] = v;
            }
        }
        d = next;
    }
    d
}

/// `D^j_{m'm}(R) = exp(-i m' alpha) d^j_{m'm}(beta) exp(-i m gamma)`.
pub fn wigner_d_matrix(j: u32, rot: &Rotation) -> DMatrix {
    let small = wigner_small_d(j, rot.beta);
    let n = 2 * j as usize + 1;
    let ji = j as i32;
    let mut data = Vec::with_capacity(n * n);
    for mp in -ji..=ji {
        for m in -ji..=ji {
            let phase =
                Complex64::from_polar(1.0, -(mp as f64) * rot.alpha - (m as f64) * rot.gamma);
            data.push(phase * small[(mp + ji) as usize * n + (m + ji) as usize]);
        }
    }
    DMatrix { j, data }
}
