use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vstp_core::angular::{clebsch_gordan, wigner_d_matrix, Rotation};
use vstp_core::sht::{make_grid, sh_eval};
use vstp_core::tsh::*;

fn angles(v: [f64; 3]) -> (f64, f64) {
    (v[2].clamp(-1.0, 1.0).acos(), v[1].atan2(v[0]))
}

fn field_at(x: &TshCoeffs, theta: f64, phi: f64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * x.s() as usize + 1];
    for ((j, l), v) in x.blocks() {
        for (idx, c) in v.iter().enumerate() {
            let y = tsh_eval(j, idx as i32 - j as i32, l, x.s(), theta, phi).unwrap();
            for (o, y) in out.iter_mut().zip(y) {
                *o += c * y;
            }
        }
    }
    out
}

#[test]
fn admissible_keys_examples() {
    assert_eq!(
        TshCoeffs::admissible_keys(0, 2),
        vec![(0, 0), (1, 1), (2, 2)]
    );
    assert_eq!(
        TshCoeffs::admissible_keys(1, 1),
        vec![(0, 1), (1, 0), (1, 1), (2, 1)]
    );
    assert_eq!(TshCoeffs::zeros(1, 3).len(), 1 + 3 * 3);
}

#[test]
fn spin_zero_tsh_is_scalar_harmonic() {
    for l in 0..=5u32 {
        for m in -(l as i32)..=l as i32 {
            let y = tsh_eval(l, m, l, 0, 0.9, -1.3).unwrap();
            assert_eq!(y.len(), 1);
            assert!((y[0] - sh_eval(l, m, 0.9, -1.3).unwrap()).norm() < 1e-15);
        }
    }
    assert!(tsh_eval(3, 0, 1, 1, 0.1, 0.2).is_err());
    assert!(tsh_eval(1, 2, 1, 1, 0.1, 0.2).is_err());
}

#[test]
fn tsh_components_follow_coupling_definition() {
    // Independent evaluation with exact CG values.
    let (theta, phi) = (1.1, 0.4);
    for s in 0..=2u32 {
        for (j, l) in TshCoeffs::admissible_keys(s, 3) {
            for mj in -(j as i32)..=j as i32 {
                let y = tsh_eval(j, mj, l, s, theta, phi).unwrap();
                for (i, ms) in (-(s as i32)..=s as i32).enumerate() {
                    let ml = mj - ms;
                    let want = if ml.unsigned_abs() > l {
                        Complex64::new(0.0, 0.0)
                    } else {
                        let c = clebsch_gordan(l, ml, s, ms, j, mj);
                        sh_eval(l, ml, theta, phi).unwrap() * c.to_f64()
                    };
                    assert!((y[i] - want).norm() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn orthonormality() {
    for (s, l) in [(0, 4), (1, 4), (2, 5)] {
        let dev = tsh_orthonormality_check(s, l).unwrap();
        assert!(dev < 1e-12, "s={s} L={l} dev={dev}");
    }
    assert!(tsh_orthonormality_check(2, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn round_trip(s in 0u32..=2, l in 0u32..=16, extra in 0u32..2, seed in any::<u64>()) {
        let x = TshCoeffs::random(s, l, &mut ChaCha8Rng::seed_from_u64(seed));
        let grid = make_grid(l + extra);
        let back = tsh_decode(&tsh_encode(&x, &grid).unwrap(), l).unwrap();
        prop_assert!(x.max_abs_diff(&back) < 1e-12);
    }
}

#[test]
fn encode_matches_pointwise_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x = TshCoeffs::random(1, 3, &mut rng);
    let grid = make_grid(3);
    let f = tsh_encode(&x, &grid).unwrap();
    for i in 0..grid.n_theta() {
        for k in 0..grid.n_phi() {
            let p = i * grid.n_phi() + k;
            let want = field_at(&x, grid.theta(i), grid.phi(k));
            for (a, b) in f.at(p).iter().zip(&want) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }
}

#[test]
fn encoding_is_rotation_equivariant() {
    // Encoding D^j x gives D^s f(g^{-1} r).
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for s in 0..=1u32 {
        let l = 4;
        let grid = make_grid(l);
        for _ in 0..3 {
            let x = TshCoeffs::random(s, l, &mut rng);
            let rot = Rotation::random(&mut rng);
            let ds = wigner_d_matrix(s, &rot);
            let inv = rot.inverse();
            let f = tsh_encode(&x.rotated(&rot), &grid).unwrap();
            for i in 0..grid.n_theta() {
                for k in 0..grid.n_phi() {
                    let (t, p) = angles(inv.apply(grid.point(i, k)));
                    let want = ds.apply(&field_at(&x, t, p));
                    let got = f.at(i * grid.n_phi() + k);
                    for (a, b) in got.iter().zip(&want) {
                        assert!((a - b).norm() < 1e-10);
                    }
                }
            }
        }
    }
}

#[test]
fn flop_formulas_match_counters() {
    let grid = make_grid(5);
    let x = TshCoeffs::random(2, 5, &mut ChaCha8Rng::seed_from_u64(13));
    let keys = x.keys();
    let mut n = 0;
    let f = tsh_encode_counted(&x, &grid, &mut n).unwrap();
    assert_eq!(n, encode_flops(&grid, 2, &keys));
    let mut n = 0;
    tsh_decode_keys(&f, 5, &keys, &mut n).unwrap();
    assert_eq!(n, decode_flops(&grid, 2, &keys));
}

#[test]
fn encode_rejects_coarse_grid() {
    let x = TshCoeffs::zeros(1, 4);
    assert!(tsh_encode(&x, &make_grid(3)).is_err());
    let f = tsh_encode(&x, &make_grid(4)).unwrap();
    assert!(tsh_decode(&f, 5).is_err());
}
