use proptest::prelude::*;
use vstp_core::bench::*;
use vstp_core::Error;

fn record(method: Method, l: u32, flops: u64) -> BenchRecord {
    BenchRecord {
        method,
        setting: Setting::Mimo,
        l,
        flops,
        walltime_s: 0.25,
        repeats: 3,
    }
}

#[test]
fn cgtp_siso_closed_forms() {
    for l in 0..=20u64 {
        let n = 2 * l + 1;
        assert_eq!(
            projected_flops(Method::CgtpNaive, Setting::Siso, l as u32).unwrap(),
            n * n * n
        );
        // pairs (m1, m2) in [-l, l]^2 with |m1 + m2| <= l
        assert_eq!(
            projected_flops(Method::CgtpSparse, Setting::Siso, l as u32).unwrap(),
            n * n - l * (l + 1)
        );
    }
}

#[test]
fn projections_grow_with_l_and_sparse_never_exceeds_naive() {
    for setting in Setting::ALL {
        for method in Method::ALL {
            let mut prev = 0;
            for l in 1..=12 {
                let f = projected_flops(method, setting, l).unwrap();
                assert!(f > prev, "{method} {setting:?} L={l}");
                prev = f;
            }
        }
        for l in 0..=12 {
            assert!(
                projected_flops(Method::CgtpSparse, setting, l).unwrap()
                    <= projected_flops(Method::CgtpNaive, setting, l).unwrap()
            );
        }
    }
}

#[test]
fn measured_flops_do_not_depend_on_data() {
    for method in Method::ALL {
        let mut cfg = BenchConfig::new(1);
        cfg.repeats = 1;
        let a = run_bench(method, Setting::Mimo, &[1, 2, 3], &cfg).unwrap();
        cfg.seed = 99;
        let b = run_bench(method, Setting::Mimo, &[1, 2, 3], &cfg).unwrap();
        let fa: Vec<u64> = a.iter().map(|r| r.flops).collect();
        let fb: Vec<u64> = b.iter().map(|r| r.flops).collect();
        assert_eq!(fa, fb, "{method}");
    }
}

#[test]
fn measurement_is_deterministic_across_threads() {
    let run = || {
        let mut cfg = BenchConfig::new(7);
        cfg.repeats = 1;
        Method::ALL
            .iter()
            .map(|&m| {
                run_bench(m, Setting::Simo, &[2, 3], &cfg)
                    .unwrap()
                    .iter()
                    .map(|r| r.flops)
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    let here = run();
    let handles: Vec<_> = (0..3).map(|_| std::thread::spawn(run)).collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), here);
    }
}

#[test]
fn budget_is_checked_before_running() {
    let mut cfg = BenchConfig::new(0);
    cfg.budget = 1000;
    match run_bench(Method::CgtpNaive, Setting::Mimo, &[1, 64], &cfg) {
        Err(Error::Budget { projected, budget }) => {
            assert_eq!(budget, 1000);
            assert_eq!(
                projected,
                projected_flops(Method::CgtpNaive, Setting::Mimo, 64).unwrap()
            );
        }
        other => panic!("expected a budget error, got {other:?}"),
    }
    cfg.mode = FlopMode::Projected;
    let r = run_bench(Method::CgtpNaive, Setting::Mimo, &[1, 64], &cfg).unwrap();
    assert_eq!((r[1].walltime_s, r[1].repeats), (0.0, 0));
    assert!(run_bench(Method::CgtpNaive, Setting::Mimo, &[2, 2], &cfg).is_err());
}

#[test]
fn csv_round_trip() {
    let recs = vec![
        record(Method::CgtpNaive, 2, 100),
        record(Method::VstpGrid, 4, 12345678901),
    ];
    let mut buf = Vec::new();
    write_csv(&recs, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("method,setting,L,flops,walltime_s,repeats\n"));
    assert!(text.contains("vstp_grid,MIMO,4,12345678901,"));
    assert!(!text.contains('\r'));
    let path = std::env::temp_dir().join(format!("vstp-bench-{}.csv", std::process::id()));
    emit_csv(&recs, &path).unwrap();
    assert_eq!(read_csv(&path).unwrap(), recs);
    std::fs::remove_file(&path).unwrap();
    assert!(write_csv(&[], Vec::new()).is_err());
}

#[test]
fn svg_has_one_series_per_method() {
    let recs: Vec<_> = [8u32, 16, 24, 32]
        .iter()
        .flat_map(|&l| {
            [
                record(Method::CgtpSparse, l, u64::from(l).pow(4)),
                record(Method::GtpGrid, l, u64::from(l).pow(3)),
            ]
        })
        .collect();
    let svg = render_svg(&recs).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(svg.contains("cgtp_sparse") && svg.contains("gtp_grid"));
    assert!(render_svg(&[]).is_err());
}

#[test]
fn slope_fit_rejects_short_or_degenerate_input() {
    let recs: Vec<_> = [8, 16, 24]
        .iter()
        .map(|&l| record(Method::CgtpNaive, l, 10))
        .collect();
    assert!(fit_slope(&recs).is_err());
    let recs: Vec<_> = [8, 8, 8, 8]
        .iter()
        .map(|&l| record(Method::CgtpNaive, l, 10))
        .collect();
    assert!(fit_slope(&recs).is_err());
    let recs: Vec<_> = [0, 8, 16, 24]
        .iter()
        .map(|&l| record(Method::CgtpNaive, l, 10))
        .collect();
    assert!(fit_slope(&recs).is_err());
}

#[test]
fn names_parse_back() {
    for m in Method::ALL {
        assert_eq!(m.name().parse::<Method>().unwrap(), m);
    }
    for s in Setting::ALL {
        assert_eq!(s.name().parse::<Setting>().unwrap(), s);
        assert_eq!(s.name().to_lowercase().parse::<Setting>().unwrap(), s);
    }
    assert!("fft".parse::<Method>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn slope_fit_recovers_power_laws(k in 1u32..6, c in 1u64..1000, l0 in 1u32..5) {
        let recs: Vec<_> = (0..5).map(|i| {
            let l = l0 * (i + 1);
            record(Method::CgtpNaive, l, c * u64::from(l).pow(k))
        }).collect();
        let fit = fit_slope(&recs).unwrap();
        prop_assert!((fit.slope - f64::from(k)).abs() < 1e-9);
        prop_assert!((fit.intercept - (c as f64).ln()).abs() < 1e-8);
        prop_assert!(fit.r2 > 1.0 - 1e-12);
        prop_assert_eq!(fit.l_range, [l0, 5 * l0]);
    }
}
