use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vstp_core::angular::{wigner_d_matrix, Rotation};
use vstp_core::sht::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn direction(theta: f64, phi: f64) -> [f64; 3] {
    [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ]
}

fn angles(v: [f64; 3]) -> (f64, f64) {
    (v[2].clamp(-1.0, 1.0).acos(), v[1].atan2(v[0]))
}

#[test]
fn grid_examples() {
    let g = SphereGrid::new(0);
    assert_eq!((g.n_theta(), g.n_phi()), (1, 1));
    assert!(g.cos_theta()[0].abs() < 1e-15 && (g.weights()[0] - 2.0).abs() < 1e-15);
    let g = SphereGrid::new(1);
    let r = 1.0 / 3f64.sqrt();
    assert!(
        (g.cos_theta()[0].abs() - r).abs() < 1e-15 && (g.cos_theta()[1].abs() - r).abs() < 1e-15
    );
    assert!(g.weights().iter().all(|w| (w - 1.0).abs() < 1e-15));
    let g = SphereGrid::new(4);
    assert!((g.weights().iter().sum::<f64>() - 2.0).abs() < 1e-14);
    assert_eq!(g.n_phi(), 9);
}

#[test]
fn sh_examples() {
    let y00 = 1.0 / (4.0 * PI).sqrt();
    assert!((sh_eval(0, 0, 1.2, -0.3).unwrap() - y00).norm() < 1e-15);
    assert!((sh_eval(1, 0, 0.0, 0.0).unwrap() - (3.0 / (4.0 * PI)).sqrt()).norm() < 1e-15);
    assert!(sh_eval(1, 2, 0.0, 0.0).is_err());
    for l in 0..=6u32 {
        for m in -(l as i32)..=l as i32 {
            let a = sh_eval(l, m, 0.7, 2.1).unwrap().conj();
            let b = sh_eval(l, -m, 0.7, 2.1).unwrap() * if m % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a - b).norm() < 1e-14);
        }
    }
}

#[test]
fn synthesis_examples() {
    let grid = make_grid(3);
    let mut x = IrrepCoeffs::new(0);
    x.insert(BlockKey::plain(0), vec![c((4.0 * PI).sqrt())])
        .unwrap();
    assert!(to_sphere(&x, &grid)
        .unwrap()
        .values
        .iter()
        .all(|v| (v - 1.0).norm() < 1e-14));
    assert!(to_sphere(&IrrepCoeffs::zeros(3), &grid)
        .unwrap()
        .values
        .iter()
        .all(|v| v.norm() == 0.0));
    let mut x = IrrepCoeffs::new(1);
    x.insert(BlockKey::plain(1), vec![c(0.0), c(1.0), c(0.0)])
        .unwrap();
    let f = to_sphere(&x, &grid).unwrap();
    for i in 0..grid.n_theta() {
        for k in 0..grid.n_phi() {
            assert!((f.at(i, k) - (3.0 / (4.0 * PI)).sqrt() * grid.cos_theta()[i]).norm() < 1e-14);
        }
    }
    assert!(to_sphere(&IrrepCoeffs::zeros(4), &grid).is_err());
}

#[test]
fn analysis_examples() {
    let grid = make_grid(2);
    let one = ScalarSignal::from_fn(grid.clone(), |_, _| c(1.0));
    let x = from_sphere(&one, 2).unwrap();
    assert!((x.block(0).unwrap()[0] - (4.0 * PI).sqrt()).norm() < 1e-13);
    assert!(x
        .block(1)
        .unwrap()
        .iter()
        .chain(x.block(2).unwrap())
        .all(|v| v.norm() < 1e-13));
    assert!(from_sphere(&one, 3).is_err());
}

#[test]
fn orthonormality_on_degree_eight_grid() {
    let grid = SphereGrid::new(8);
    let mut samples = Vec::new();
    for l in 0..=8u32 {
        for m in -(l as i32)..=l as i32 {
            let mut v = Vec::with_capacity(grid.n_points());
            for i in 0..grid.n_theta() {
                for k in 0..grid.n_phi() {
                    v.push(sh_eval(l, m, grid.theta(i), grid.phi(k)).unwrap());
                }
            }
            samples.push(v);
        }
    }
    let w: Vec<f64> = (0..grid.n_theta())
        .flat_map(|i| std::iter::repeat(grid.area_weight(i)).take(grid.n_phi()))
        .collect();
    for (a, fa) in samples.iter().enumerate() {
        for (b, fb) in samples.iter().enumerate() {
            let ip: Complex64 = fa
                .iter()
                .zip(fb)
                .zip(&w)
                .map(|((p, q), w)| p.conj() * q * w)
                .sum();
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((ip - want).norm() < 1e-12, "{a} {b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn scalar_round_trip(l in 0u32..=32, extra in 0u32..3, seed in any::<u64>()) {
        let x = IrrepCoeffs::random(l, &mut ChaCha8Rng::seed_from_u64(seed));
        let grid = make_grid(l + extra);
        let back = from_sphere(&to_sphere(&x, &grid).unwrap(), l).unwrap();
        prop_assert!(x.max_abs_diff(&back) < 1e-12);
    }

    #[test]
    fn synthesis_is_linear(l in 0u32..=6, seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (IrrepCoeffs::random(l, &mut rng), IrrepCoeffs::random(l, &mut rng));
        let grid = make_grid(l);
        let combo = x.map_blocks(|k, v| v.iter().zip(y.get(k).unwrap()).map(|(p, q)| p * a + q * b).collect());
        let (fx, fy, fc) = (to_sphere(&x, &grid).unwrap(), to_sphere(&y, &grid).unwrap(), to_sphere(&combo, &grid).unwrap());
        for p in 0..fc.values.len() {
            prop_assert!((fc.values[p] - fx.values[p] * a - fy.values[p] * b).norm() < 1e-12);
        }
    }
}

#[test]
fn gaunt_examples() {
    let y00 = 1.0 / (4.0 * PI).sqrt();
    assert!((gaunt_coefficient(0, 0, 0, 0, 0, 0) - y00).abs() < 1e-15);
    assert!((gaunt_coefficient(1, 0, 1, 0, 0, 0) - y00).abs() < 1e-15);
    assert_eq!(gaunt_coefficient(1, 1, 1, -1, 1, 0), 0.0);
}

#[test]
fn gaunt_matches_quadrature() {
    for l1 in 0..=4u32 {
        for l2 in 0..=4u32 {
            let grid = SphereGrid::new(l1 + l2);
            for l3 in 0..=(l1 + l2).min(8) {
                for m1 in -(l1 as i32)..=l1 as i32 {
                    for m2 in -(l2 as i32)..=l2 as i32 {
                        let m3 = m1 + m2;
                        if m3.unsigned_abs() > l3 {
                            continue;
                        }
                        let mut q = Complex64::new(0.0, 0.0);
                        for i in 0..grid.n_theta() {
                            for k in 0..grid.n_phi() {
                                let (t, p) = (grid.theta(i), grid.phi(k));
                                q += sh_eval(l1, m1, t, p).unwrap()
                                    * sh_eval(l2, m2, t, p).unwrap()
                                    * sh_eval(l3, m3, t, p).unwrap().conj()
                                    * grid.area_weight(i);
                            }
                        }
                        assert!(
                            (q - gaunt_coefficient(l1, m1, l2, m2, l3, m3)).norm() < 1e-11,
                            "{l1} {m1} {l2} {m2} {l3}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn product_of_degree_one_signals_follows_gaunt() {
    let grid = make_grid(2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut x = IrrepCoeffs::new(1);
    let mut y = IrrepCoeffs::new(1);
    x.insert(BlockKey::plain(1), random_vector(3, &mut rng))
        .unwrap();
    y.insert(BlockKey::plain(1), random_vector(3, &mut rng))
        .unwrap();
    let (fx, fy) = (to_sphere(&x, &grid).unwrap(), to_sphere(&y, &grid).unwrap());
    let prod: Vec<Complex64> = fx
        .values
        .iter()
        .zip(&fy.values)
        .map(|(a, b)| a * b)
        .collect();
    let z = from_sphere(&ScalarSignal::new(grid.clone(), prod).unwrap(), 2).unwrap();
    for l3 in 0..=2u32 {
        for m3 in -(l3 as i32)..=l3 as i32 {
            let mut want = Complex64::new(0.0, 0.0);
            for m1 in -1..=1i32 {
                let m2 = m3 - m1;
                if m2.abs() <= 1 {
                    want += x.block(1).unwrap()[(m1 + 1) as usize]
                        * y.block(1).unwrap()[(m2 + 1) as usize]
                        * gaunt_coefficient(1, m1, 1, m2, l3, m3);
                }
            }
            assert!((z.block(l3).unwrap()[(m3 + l3 as i32) as usize] - want).norm() < 1e-13);
        }
    }
}

#[test]
fn synthesis_is_rotation_equivariant() {
    // Synthesizing D(g) x equals evaluating the original field at g^{-1} r.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let l = 4;
    let grid = make_grid(l);
    for _ in 0..5 {
        let x = IrrepCoeffs::random(l, &mut rng);
        let rot = Rotation::random(&mut rng);
        let inv = rot.inverse();
        let f = to_sphere(&x.rotated(&rot), &grid).unwrap();
        for i in 0..grid.n_theta() {
            for k in 0..grid.n_phi() {
                let (t, p) = angles(inv.apply(direction(grid.theta(i), grid.phi(k))));
                let mut want = Complex64::new(0.0, 0.0);
                for (key, v) in x.blocks() {
                    for (idx, coeff) in v.iter().enumerate() {
                        want += coeff * sh_eval(key.j, idx as i32 - key.j as i32, t, p).unwrap();
                    }
                }
                assert!((f.at(i, k) - want).norm() < 1e-10);
            }
        }
        // and the rotation acts blockwise by the unitary D matrices
        let d = wigner_d_matrix(2, &rot);
        assert!(
            (d.apply(x.block(2).unwrap())[0] - x.rotated(&rot).block(2).unwrap()[0]).norm() < 1e-15
        );
    }
}

#[test]
fn flop_formulas_match_counters() {
    let grid = make_grid(6);
    let x = IrrepCoeffs::random(5, &mut ChaCha8Rng::seed_from_u64(5));
    let mut n = 0;
    let f = to_sphere_counted(&x, &grid, &mut n).unwrap();
    assert_eq!(n, synthesis_flops(&grid, 0..=5));
    let mut n = 0;
    from_sphere_counted(&f, 5, &mut n).unwrap();
    assert_eq!(n, analysis_flops(&grid, 0..=5));
}
