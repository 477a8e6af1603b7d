use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use vstp_core::angular::{
    clebsch_gordan, wigner_9j, wigner_d_matrix, NineJKey, Rotation, SqrtRational,
};
use vstp_core::bench::{
    emit_csv, emit_svg, fit_slope, read_csv, run_bench, BenchConfig, BenchRecord, FlopMode, Method,
    Setting,
};
use vstp_core::io::{
    irreps_to_json, read_json, samples_from_json, samples_to_json, to_canonical_string,
    tsh_to_json, write_canonical, CoeffFile, FloatFormat,
};
use vstp_core::rules::{
    expressivity_count, find_valid_ells, generalized_gaunt_scaled, interactable,
    interactable_by_search, vstp_rules, NineJRoute, PathKey,
};
use vstp_core::sht::{
    from_sphere, gaunt_exact, make_grid, to_sphere, BlockKey, IrrepCoeffs, ScalarSignal, Tag,
};
use vstp_core::tenprod::{
    cgtp_full, cgtp_path, gtp, istp, simulate_cgtp_path, vstp, CgtpMode, TpoResult,
};
use vstp_core::tsh::{tsh_decode, tsh_encode, SpinSignal, TshCoeffs};
use vstp_core::{Error, Result};

use crate::verify::{report_json, run_suite, Level};
use crate::{
    BenchCmd, BenchRunArgs, Cli, CoeffCmd, Command, Direction, ModeArg, RulesCmd, TpArgs, TpCmd,
    TransformArgs, VerifyArgs, EXIT_OK, EXIT_VERIFY_FAILED,
};

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn float_format(decimals: Option<usize>) -> FloatFormat {
    decimals.map_or(FloatFormat::Full, FloatFormat::Decimals)
}

fn exact_line(v: &SqrtRational) -> String {
    format!("{v} = {:.17e}", v.to_f64())
}

fn seed(cli: &Cli) -> u64 {
    cli.seed.unwrap_or(0)
}

pub fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Coeff(c) => coeff(c, seed(cli)),
        Command::Transform(t) => transform(t),
        Command::Tp(t) => tp(t),
        Command::Rules(r) => rules(r),
        Command::Bench(b) => bench(b, cli.seed),
        Command::Verify(v) => Ok(verify(v, cli.tolerance, seed(cli))),
    }
}

fn labels<const N: usize>(v: &[u32], flag: &str) -> Result<[u32; N]> {
    v.try_into().map_err(|_| {
        usage(format!(
            "{flag} takes {N} comma-separated labels, got {}",
            v.len()
        ))
    })
}

fn coeff(cmd: &CoeffCmd, seed: u64) -> Result<i32> {
    match *cmd {
        CoeffCmd::Cg {
            j1,
            m1,
            j2,
            m2,
            j3,
            m3,
        } => {
            vstp_core::angular::CgKey::new(j1, m1, j2, m2, j3, m3)?;
            println!("{}", exact_line(&clebsch_gordan(j1, m1, j2, m2, j3, m3)));
        }
        CoeffCmd::NineJ { ref grid } => {
            let g: [u32; 9] = labels(grid, "--grid")?;
            println!("{}", exact_line(&wigner_9j(&NineJKey(g))));
        }
        CoeffCmd::Gaunt {
            l1,
            m1,
            l2,
            m2,
            l3,
            m3,
        } => {
            for (l, m) in [(l1, m1), (l2, m2), (l3, m3)] {
                if m.unsigned_abs() > l {
                    return Err(usage(format!("|m| = {} exceeds l = {l}", m.unsigned_abs())));
                }
            }
            let v = gaunt_exact(l1, m1, l2, m2, l3, m3);
            println!(
                "{} = {:.17e}",
                v,
                v.to_f64() / (4.0 * std::f64::consts::PI).sqrt()
            );
            println!("(exact part times 1/sqrt(4 pi))");
        }
        CoeffCmd::Ggaunt { ref path, ref s } => {
            let (path, s) = (labels::<6>(path, "--path")?, labels::<3>(s, "--s")?);
            let p = PathKey::new(
                [path[0], path[2], path[4]],
                [path[1], path[3], path[5]],
                [s[0], s[1], s[2]],
            );
            let v = generalized_gaunt_scaled(&p, NineJRoute::Auto);
            println!(
                "{} = {:.17e}",
                v,
                v.to_f64() / (4.0 * std::f64::consts::PI).sqrt()
            );
            println!("(exact part times 1/sqrt(4 pi))");
        }
        CoeffCmd::WignerD {
            j,
            alpha,
            beta,
            gamma,
        } => {
            let d = wigner_d_matrix(j, &Rotation::new(alpha, beta, gamma));
            let ji = j as i32;
            for mp in -ji..=ji {
                let row: Vec<String> = (-ji..=ji)
                    .map(|m| {
                        let c = d.get(mp, m);
                        format!("{:+.12e}{:+.12e}i", c.re, c.im)
                    })
                    .collect();
                println!("{}", row.join(" "));
            }
        }
        CoeffCmd::Random {
            l,
            s,
            ref out,
            decimals,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = if s == 0 {
                irreps_to_json(&IrrepCoeffs::random(l, &mut rng))
            } else {
                tsh_to_json(&TshCoeffs::random(s, l, &mut rng))
            };
            write_canonical(out, &v, float_format(decimals))?;
        }
    }
    Ok(EXIT_OK)
}

fn read_coeffs(path: &Path) -> Result<CoeffFile> {
    CoeffFile::parse(&read_json(path)?)
}

/// A scalar file as a spin-0 TSH expansion with `l = j`.
fn scalar_as_tsh(x: &IrrepCoeffs) -> Result<TshCoeffs> {
    let mut t = TshCoeffs::new(0, x.lmax());
    for (k, v) in x.blocks() {
        if k.tag != Tag::None {
            return Err(usage(format!("scalar input has a tagged block {k:?}")));
        }
        t.insert(k.j, k.j, v.to_vec())?;
    }
    Ok(t)
}

fn transform(t: &TransformArgs) -> Result<i32> {
    let fmt = float_format(t.decimals);
    match t.direction {
        Direction::Inverse => {
            let file = read_coeffs(&t.input)?;
            if file.spin() != t.s {
                return Err(usage(format!(
                    "--s {} does not match the file spin {}",
                    t.s,
                    file.spin()
                )));
            }
            let signal = match &file {
                CoeffFile::Scalar(x) => {
                    let grid = make_grid(t.lg.unwrap_or(x.lmax()));
                    let f = to_sphere(x, &grid)?;
                    SpinSignal::new(0, grid, vec![f.values])?
                }
                CoeffFile::Tsh(x) => tsh_encode(x, &make_grid(t.lg.unwrap_or(x.lmax())))?,
            };
            write_canonical(&t.out, &samples_to_json(&signal), fmt)?;
        }
        Direction::Forward => {
            let v = read_json(&t.input)?;
            let signal = samples_from_json(&v)?;
            if signal.s != t.s {
                return Err(usage(format!(
                    "--s {} does not match the sample spin {}",
                    t.s, signal.s
                )));
            }
            let l = t.l.unwrap_or(signal.grid.lg());
            let out = if t.s == 0 {
                let f = ScalarSignal::new(Arc::clone(&signal.grid), signal.component(0).to_vec())?;
                irreps_to_json(&from_sphere(&f, l)?)
            } else {
                tsh_to_json(&tsh_decode(&signal, l)?)
            };
            write_canonical(&t.out, &out, fmt)?;
        }
    }
    Ok(EXIT_OK)
}

fn expect_scalar(f: CoeffFile, what: &str) -> Result<IrrepCoeffs> {
    match f {
        CoeffFile::Scalar(x) => Ok(x),
        CoeffFile::Tsh(_) => Err(usage(format!("{what} must be a scalar coefficient file"))),
    }
}

fn expect_tsh(f: CoeffFile, what: &str) -> Result<TshCoeffs> {
    match f {
        CoeffFile::Tsh(x) => Ok(x),
        CoeffFile::Scalar(x) => {
            scalar_as_tsh(&x).map_err(|_| usage(format!("{what} must be a TSH coefficient file")))
        }
    }
}

fn report_flops<T>(r: &TpoResult<T>) {
    eprintln!("flops: {}", r.flops);
}

fn tp(cmd: &TpCmd) -> Result<i32> {
    let write =
        |args: &TpArgs, v: &Value| write_canonical(&args.out, v, float_format(args.decimals));
    let load = |args: &TpArgs| -> Result<(CoeffFile, CoeffFile)> {
        Ok((read_coeffs(&args.x)?, read_coeffs(&args.y)?))
    };
    let grid_for = |args: &TpArgs, lx: u32, ly: u32| make_grid(args.lg.unwrap_or(lx + ly));
    match cmd {
        TpCmd::Cgtp { args, mode } => {
            let (x, y) = load(args)?;
            let (x, y) = (expect_scalar(x, "--x")?, expect_scalar(y, "--y")?);
            let mode = match mode {
                ModeArg::Naive => CgtpMode::Naive,
                ModeArg::Sparse => CgtpMode::Sparse,
            };
            let r = cgtp_full(&x, &y, args.l3, mode)?;
            report_flops(&r);
            write(args, &irreps_to_json(&r.output))?;
        }
        TpCmd::Gtp { args } => {
            let (x, y) = load(args)?;
            let (x, y) = (expect_scalar(x, "--x")?, expect_scalar(y, "--y")?);
            let r = gtp(&x, &y, args.l3, &grid_for(args, x.lmax(), y.lmax()))?;
            report_flops(&r);
            write(args, &irreps_to_json(&r.output))?;
        }
        TpCmd::Vstp { args } => {
            let (x, y) = load(args)?;
            let (x, y) = (expect_tsh(x, "--x")?, expect_tsh(y, "--y")?);
            let r = vstp(&x, &y, args.l3, &grid_for(args, x.lmax(), y.lmax()))?;
            report_flops(&r);
            write(args, &tsh_to_json(&r.output))?;
        }
        TpCmd::Istp { args, s3 } => {
            let (x, y) = load(args)?;
            let (x, y) = (expect_tsh(x, "--x")?, expect_tsh(y, "--y")?);
            let r = istp(&x, &y, *s3, args.l3, &grid_for(args, x.lmax(), y.lmax()))?;
            report_flops(&r);
            write(args, &tsh_to_json(&r.output))?;
        }
        TpCmd::Simulate {
            j1,
            j2,
            j3,
            x,
            y,
            out,
            decimals,
        } => {
            let block = |path: &Path, j: u32, what: &str| -> Result<Vec<Complex64>> {
                let c = expect_scalar(read_coeffs(path)?, what)?;
                c.get(&BlockKey::plain(j))
                    .map(<[Complex64]>::to_vec)
                    .ok_or_else(|| usage(format!("{what} has no untagged block of degree {j}")))
            };
            let (xv, yv) = (block(x, *j1, "--x")?, block(y, *j2, "--y")?);
            let sim = simulate_cgtp_path(&xv, &yv, *j3)?;
            let direct = cgtp_path(&xv, &yv, *j3, CgtpMode::Sparse)?;
            let dev = sim
                .output
                .iter()
                .zip(&direct.output)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            let mut res = IrrepCoeffs::new(*j3);
            res.insert(
                BlockKey {
                    j: *j3,
                    tag: Tag::Path(*j1, *j2),
                },
                sim.output,
            )?;
            let ells = find_valid_ells(*j1, *j2, *j3).ok();
            eprintln!("orbital degrees: {ells:?}");
            eprintln!("flops: simulated {} direct {}", sim.flops, direct.flops);
            eprintln!("max |simulated - direct| = {dev:.3e}");
            let v = irreps_to_json(&res);
            match out {
                Some(p) => write_canonical(p, &v, float_format(*decimals))?,
                None => print!("{}", to_canonical_string(&v, float_format(*decimals))?),
            }
        }
    }
    Ok(EXIT_OK)
}

fn triple(v: &[u32]) -> Result<(u32, u32, u32)> {
    let [a, b, c] = labels(v, "--j")?;
    Ok((a, b, c))
}

fn rules(cmd: &RulesCmd) -> Result<i32> {
    match cmd {
        RulesCmd::Check { path } => {
            let path = labels::<6>(path, "--path")?;
            let p = PathKey::vstp(path[0], path[1], path[2], path[3], path[4], path[5]);
            let r = vstp_rules(&p)?;
            let names = [
                "rule 1 {j_i, l_i, 1} triangles",
                "rule 2 {j1, j2, j3} triangle",
                "rule 3 {l1, l2, l3} triangle",
                "rule 4 l1 + l2 + l3 even",
                "rule 5 no (j_a = l_a, j_b = j_c, l_b = l_c)",
            ];
            for (name, ok) in names.iter().zip(r.flags) {
                println!("{:<44} {}", name, if ok { "pass" } else { "fail" });
            }
            println!(
                "{:<44} {}",
                "columns differ (j != l)",
                if r.distinct_columns { "pass" } else { "fail" }
            );
            println!(
                "coefficient {:.17e} ({})",
                r.coefficient,
                if r.coefficient_nonzero {
                    "nonzero"
                } else {
                    "zero"
                }
            );
            println!(
                "{}",
                if r.passed {
                    "path is active"
                } else {
                    "path vanishes"
                }
            );
        }
        RulesCmd::FindElls { j } => {
            let (j1, j2, j3) = triple(j)?;
            let (l1, l2, l3) = find_valid_ells(j1, j2, j3)?;
            println!("{l1},{l2},{l3}");
        }
        RulesCmd::Interactable { j } => {
            let (j1, j2, j3) = triple(j)?;
            let (a, b) = (interactable(j1, j2, j3), interactable_by_search(j1, j2, j3));
            println!("interactable: {a} (search: {b})");
        }
        RulesCmd::Expressivity { s, l } => println!("{}", expressivity_count(*s, *l)),
    }
    Ok(EXIT_OK)
}

fn bench(cmd: &BenchCmd, seed: Option<u64>) -> Result<i32> {
    match cmd {
        BenchCmd::Run(args) => bench_run(args, seed),
        BenchCmd::Fit { csv } => {
            let recs = read_csv(csv)?;
            print_fits(&recs)?;
            Ok(EXIT_OK)
        }
    }
}

fn print_fits(recs: &[BenchRecord]) -> Result<()> {
    let mut groups: Vec<((Method, Setting), Vec<BenchRecord>)> = Vec::new();
    for r in recs {
        match groups.iter_mut().find(|(k, _)| *k == (r.method, r.setting)) {
            Some((_, v)) => v.push(r.clone()),
            None => groups.push(((r.method, r.setting), vec![r.clone()])),
        }
    }
    for ((m, s), g) in groups {
        match fit_slope(&g) {
            Ok(f) => println!(
                "{m} {s}: slope {:.3} r2 {:.5} over L {:?}",
                f.slope, f.r2, f.l_range
            ),
            Err(e) => println!("{m} {s}: no fit ({e})"),
        }
    }
    Ok(())
}

fn bench_run(args: &BenchRunArgs, seed: Option<u64>) -> Result<i32> {
    let seed = seed.ok_or_else(|| usage("bench run needs --seed"))?;
    let methods: Vec<Method> = args
        .methods
        .iter()
        .map(|m| m.parse())
        .collect::<Result<_>>()?;
    let setting: Setting = args.setting.parse()?;
    let mut cfg = BenchConfig::new(seed);
    cfg.repeats = args.repeats;
    if args.projected {
        cfg.mode = FlopMode::Projected;
    }
    let mut recs = Vec::new();
    for m in methods {
        recs.extend(run_bench(m, setting, &args.l, &cfg)?);
    }
    emit_csv(&recs, &args.csv)?;
    if let Some(svg) = &args.svg {
        emit_svg(&recs, svg)?;
    }
    print_fits(&recs)?;
    Ok(EXIT_OK)
}

fn verify(args: &VerifyArgs, tolerance: f64, seed: u64) -> i32 {
    let level = if args.level.full {
        Level::Full
    } else {
        Level::Quick
    };
    let start = Instant::now();
    let results = run_suite(level, tolerance, seed);
    let elapsed = start.elapsed().as_secs_f64();
    let passed = results.iter().all(|r| r.passed());
    if args.json {
        let v: Value = report_json(level, seed, tolerance, &results, elapsed);
        match to_canonical_string(&v, FloatFormat::Full) {
            Ok(s) => print!("{s}"),
            Err(e) => {
                eprintln!("error: {e}");
                println!("{}", json!({ "passed": passed }));
            }
        }
    } else {
        for r in &results {
            println!("{}", r.line());
        }
        let failed = results.iter().filter(|r| !r.passed()).count();
        println!("{} checks, {failed} failed, {elapsed:.1}s", results.len());
    }
    if passed {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}
