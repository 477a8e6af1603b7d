use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn sh_examples() {
    let v = sh_eval(0, 0, 1.3, 0.2).unwrap();
    assert!((v - y00()).norm() < 1e-15);
    let v = sh_eval(1, 0, 0.0, 0.0).unwrap();
    assert!((v.re - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
    assert!(sh_eval(1, 2, 0.0, 0.0).is_err());
}

#[test]
fn conjugation_identity() {
    for l in 0..=6u32 {
        for m in -(l as i32)..=l as i32 {
            let (t, p) = (0.9, 2.3);
            let lhs = sh_eval(l, -m, t, p).unwrap() * if m % 2 == 0 { 1.0 } else { -1.0 };
            let rhs = sh_eval(l, m, t, p).unwrap().conj();
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }
}

#[test]
fn constant_synthesis() {
    let g = make_grid(3);
    let mut x = IrrepCoeffs::new(0);
    x.insert(BlockKey::plain(0), vec![c((4.0 * PI).sqrt())])
        .unwrap();
    let f = to_sphere(&x, &g).unwrap();
    assert!(f.values.iter().all(|v| (v - 1.0).norm() < 1e-14));
    let zero = to_sphere(&IrrepCoeffs::zeros(3), &g).unwrap();
    assert!(zero.values.iter().all(|v| v.norm() == 0.0));
}

#[test]
fn dipole_synthesis() {
    let g = make_grid(2);
    let mut x = IrrepCoeffs::new(1);
    x.insert(BlockKey::plain(1), vec![c(0.0), c(1.0), c(0.0)])
        .unwrap();
    let f = to_sphere(&x, &g).unwrap();
    for i in 0..g.n_theta() {
        for k in 0..g.n_phi() {
            let want = (3.0 / (4.0 * PI)).sqrt() * g.cos_theta()[i];
            assert!((f.at(i, k) - want).norm() < 1e-14);
        }
    }
}

#[test]
fn grid_too_small_is_rejected() {
    let g = make_grid(2);
    assert!(to_sphere(&IrrepCoeffs::zeros(3), &g).is_err());
    let f = ScalarSignal::zeros(g);
    assert!(from_sphere(&f, 3).is_err());
}

#[test]
fn constant_analysis() {
    let g = make_grid(2);
    let f = ScalarSignal::from_fn(g, |_, _| c(1.0));
    let x = from_sphere(&f, 2).unwrap();
    assert!((x.block(0).unwrap()[0] - (4.0 * PI).sqrt()).norm() < 1e-13);
    for l in 1..=2 {
        assert!(x.block(l).unwrap().iter().all(|v| v.norm() < 1e-13));
    }
}

#[test]
fn random_round_trip_at_l8() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let g = make_grid(8);
    let x = IrrepCoeffs::random(8, &mut rng);
    let y = from_sphere(&to_sphere(&x, &g).unwrap(), 8).unwrap();
    assert!(x.max_abs_diff(&y) < 1e-12);
}

#[test]
fn product_of_dipoles_follows_gaunt() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let g = make_grid(2);
    let mut a = IrrepCoeffs::new(1);
    let mut b = IrrepCoeffs::new(1);
    let va = random_vector(3, &mut rng);
    let vb = random_vector(3, &mut rng);
    a.insert(BlockKey::plain(1), va.clone()).unwrap();
    b.insert(BlockKey::plain(1), vb.clone()).unwrap();
    let fa = to_sphere(&a, &g).unwrap();
    let fb = to_sphere(&b, &g).unwrap();
    let prod = ScalarSignal::new(
        g,
        fa.values
            .iter()
            .zip(&fb.values)
            .map(|(x, y)| x * y)
            .collect(),
    )
    .unwrap();
    let out = from_sphere(&prod, 2).unwrap();
    for l3 in 0..=2u32 {
        for m3 in -(l3 as i32)..=l3 as i32 {
            let mut want = Complex64::new(0.0, 0.0);
            for m1 in -1..=1i32 {
                let m2 = m3 - m1;
                if m2.abs() > 1 {
                    continue;
                }
                want += va[(m1 + 1) as usize]
                    * vb[(m2 + 1) as usize]
                    * gaunt_coefficient(1, m1, 1, m2, l3, m3);
            }
            let got = out.block(l3).unwrap()[(m3 + l3 as i32) as usize];
            assert!((got - want).norm() < 1e-13, "l3={l3} m3={m3}");
        }
    }
}

#[test]
fn gaunt_examples() {
    assert!((gaunt_coefficient(0, 0, 0, 0, 0, 0) - y00()).abs() < 1e-15);
    assert!((gaunt_coefficient(1, 0, 1, 0, 0, 0) - y00()).abs() < 1e-15);
    assert_eq!(gaunt_coefficient(1, 1, 1, -1, 1, 0), 0.0);
}

#[test]
fn flop_formulas_match_counters() {
    let g = make_grid(6);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = IrrepCoeffs::random(4, &mut rng);
    let mut n = 0;
    let f = to_sphere_counted(&x, &g, &mut n).unwrap();
    assert_eq!(n, synthesis_flops(&g, 0..=4));
    let mut n = 0;
    from_sphere_counted(&f, 5, &mut n).unwrap();
    assert_eq!(n, analysis_flops(&g, 0..=5));
}
