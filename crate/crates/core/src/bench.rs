//! FLOP-instrumented benchmarks of the tensor products, slope fits, CSV and SVG output.
//!
//! Every cell runs one tensor product on seeded random inputs. Flop counts are exact MAC
//! tallies and can also be projected in closed form without running anything.

use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rules::find_valid_ells;
use crate::sht::{make_grid, random_vector, BlockKey, IrrepCoeffs};
use crate::tenprod::{
    cgtp_full, cgtp_path_flops, istp_flops, istp_keys, simulate_cgtp_full, simulate_cgtp_path,
    CgtpMode, SimulationPlan,
};
use crate::tsh::TshCoeffs;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "VSTP_FLOP_BUDGET";
pub const DEFAULT_BUDGET: u64 = 4_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    CgtpNaive,
    CgtpSparse,
    GtpGrid,
    VstpGrid,
    /// Spin `(2, 2, 2)` signals.
    IstpGrid,
    /// CG paths reproduced from VSTPs.
    CgtpViaVstp,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::CgtpNaive,
        Method::CgtpSparse,
        Method::GtpGrid,
        Method::VstpGrid,
        Method::IstpGrid,
        Method::CgtpViaVstp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::CgtpNaive => "cgtp_naive",
            Method::CgtpSparse => "cgtp_sparse",
            Method::GtpGrid => "gtp_grid",
            Method::VstpGrid => "vstp_grid",
            Method::IstpGrid => "istp_grid",
            Method::CgtpViaVstp => "cgtp_via_vstp",
        }
    }

    fn spin(self) -> Option<u32> {
        match self {
            Method::GtpGrid => Some(0),
            Method::VstpGrid => Some(1),
            Method::IstpGrid => Some(2),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| invalid(format!("unknown method {s:?}")))
    }
}

/// Input/output shape of a benchmark cell at degree `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Setting {
    /// One path `L x L -> L`.
    Siso,
    /// Inputs of degree `L` only, every output up to `2L`.
    Simo,
    /// Every input degree up to `L`, every output up to `2L`.
    Mimo,
}

impl Setting {
    pub const ALL: [Setting; 3] = [Setting::Siso, Setting::Simo, Setting::Mimo];

    pub fn name(self) -> &'static str {
        match self {
            Setting::Siso => "SISO",
            Setting::Simo => "SIMO",
            Setting::Mimo => "MIMO",
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Setting::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid(format!("unknown setting {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub method: Method,
    pub setting: Setting,
    #[serde(rename = "L")]
    pub l: u32,
    pub flops: u64,
    /// Median over repeats; zero for projected cells.
    pub walltime_s: f64,
    /// Zero for projected cells.
    pub repeats: u32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub l_range: [u32; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlopMode {
    /// Run the tensor product and count.
    Measured,
    /// Closed-form count only.
    Projected,
}

#[derive(Clone, Copy, Debug)]
pub struct BenchConfig {
    pub repeats: u32,
    pub seed: u64,
    pub budget: u64,
    pub mode: FlopMode,
}

impl BenchConfig {
    pub fn new(seed: u64) -> Self {
        BenchConfig {
            repeats: 5,
            seed,
            budget: budget_from_env(),
            mode: FlopMode::Measured,
        }
    }
}

/// Flop budget from `VSTP_FLOP_BUDGET`, else [`DEFAULT_BUDGET`].
pub fn budget_from_env() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

fn input_degrees(setting: Setting, l: u32) -> Vec<u32> {
    match setting {
        Setting::Siso | Setting::Simo => vec![l],
        Setting::Mimo => (0..=l).collect(),
    }
}

fn tsh_input_keys(s: u32, setting: Setting, l: u32) -> Result<Vec<(u32, u32)>> {
    match setting {
        Setting::Siso | Setting::Simo => {
            if !crate::angular::triangle(l, l, s) {
                return Err(invalid(format!(
                    "spin {s} has no block (j, l) = ({l}, {l})"
                )));
            }
            Ok(vec![(l, l)])
        }
        Setting::Mimo => Ok(TshCoeffs::admissible_keys(s, l)),
    }
}

fn tsh_output_keys(s: u32, setting: Setting, l: u32) -> Vec<(u32, u32)> {
    match setting {
        Setting::Siso => vec![(l, l)],
        Setting::Simo | Setting::Mimo => TshCoeffs::admissible_keys(s, 2 * l),
    }
}

fn cgtp_paths(setting: Setting, l: u32) -> Vec<(u32, u32, u32)> {
    if setting == Setting::Siso {
        return vec![(l, l, l)];
    }
    let degrees = input_degrees(setting, l);
    let mut paths = Vec::new();
    for &j1 in &degrees {
        for &j2 in &degrees {
            paths.extend((j1.abs_diff(j2)..=j1 + j2).map(|j3| (j1, j2, j3)));
        }
    }
    paths
}

fn simulation_plan(setting: Setting, l: u32) -> Result<SimulationPlan> {
    match setting {
        Setting::Siso => {
            let mut plan = SimulationPlan::with_degrees(&[], &[], 0)?;
            if l == 0 {
                plan.scalar_path = true;
            } else {
                let (l1, l2, l3) = find_valid_ells(l, l, l)?;
                plan.calls.insert((l, l, l1, l2), vec![(l, l3)]);
            }
            Ok(plan)
        }
        _ => {
            let d = input_degrees(setting, l);
            SimulationPlan::with_degrees(&d, &d, 2 * l)
        }
    }
}

/// Closed-form flop count of one cell.
pub fn projected_flops(method: Method, setting: Setting, l: u32) -> Result<u64> {
    match method {
        Method::CgtpNaive | Method::CgtpSparse => {
            let mode = if method == Method::CgtpNaive {
                CgtpMode::Naive
            } else {
                CgtpMode::Sparse
            };
            Ok(cgtp_paths(setting, l)
                .into_iter()
                .map(|(a, b, c)| cgtp_path_flops(a, b, c, mode))
                .sum())
        }
        Method::CgtpViaVstp => Ok(simulation_plan(setting, l)?.flops()),
        _ => {
            let s = method.spin().expect("grid methods carry a spin");
            let inputs = tsh_input_keys(s, setting, l)?;
            let outputs = tsh_output_keys(s, setting, l);
            let grid = make_grid(2 * l);
            Ok(istp_flops(&grid, (s, &inputs), (s, &inputs), s, &outputs))
        }
    }
}

fn random_tsh(s: u32, keys: &[(u32, u32)], lmax: u32, rng: &mut ChaCha8Rng) -> Result<TshCoeffs> {
    let mut x = TshCoeffs::new(s, lmax);
    for &(j, l) in keys {
        x.insert(j, l, random_vector(2 * j as usize + 1, rng))?;
    }
    Ok(x)
}

fn random_irreps(degrees: &[u32], lmax: u32, rng: &mut ChaCha8Rng) -> Result<IrrepCoeffs> {
    let mut x = IrrepCoeffs::new(lmax);
    for &j in degrees {
        x.insert(BlockKey::plain(j), random_vector(2 * j as usize + 1, rng))?;
    }
    Ok(x)
}

/// Runs one cell once on fresh inputs and returns its flop count.
fn run_cell(method: Method, setting: Setting, l: u32, rng: &mut ChaCha8Rng) -> Result<u64> {
    match method {
        Method::CgtpNaive | Method::CgtpSparse => {
            let mode = if method == Method::CgtpNaive {
                CgtpMode::Naive
            } else {
                CgtpMode::Sparse
            };
            if setting == Setting::Siso {
                let x = random_vector(2 * l as usize + 1, rng);
                let y = random_vector(2 * l as usize + 1, rng);
                return Ok(crate::tenprod::cgtp_path(&x, &y, l, mode)?.flops);
            }
            let d = input_degrees(setting, l);
            let x = random_irreps(&d, l, rng)?;
            let y = random_irreps(&d, l, rng)?;
            Ok(cgtp_full(&x, &y, 2 * l, mode)?.flops)
        }
        Method::CgtpViaVstp => {
            if setting == Setting::Siso {
                let x = random_vector(2 * l as usize + 1, rng);
                let y = random_vector(2 * l as usize + 1, rng);
                return Ok(simulate_cgtp_path(&x, &y, l)?.flops);
            }
            let d = input_degrees(setting, l);
            let x = random_irreps(&d, l, rng)?;
            let y = random_irreps(&d, l, rng)?;
            Ok(simulate_cgtp_full(&x, &y, 2 * l)?.flops)
        }
        _ => {
            let s = method.spin().expect("grid methods carry a spin");
            let inputs = tsh_input_keys(s, setting, l)?;
            let outputs = tsh_output_keys(s, setting, l);
            let x = random_tsh(s, &inputs, l, rng)?;
            let y = random_tsh(s, &inputs, l, rng)?;
            let l3 = outputs.iter().map(|&(_, l)| l).max().unwrap_or(0);
            Ok(istp_keys(&x, &y, s, l3, &outputs, &make_grid(2 * l))?.flops)
        }
    }
}

/// One record per `L`. In measured mode every cell is checked against the budget before
/// anything runs.
pub fn run_bench(
    method: Method,
    setting: Setting,
    ls: &[u32],
    cfg: &BenchConfig,
) -> Result<Vec<BenchRecord>> {
    if ls.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("L list must be strictly ascending"));
    }
    let projected: Vec<u64> = ls
        .iter()
        .map(|&l| projected_flops(method, setting, l))
        .collect::<Result<_>>()?;
    if cfg.mode == FlopMode::Projected {
        return Ok(ls
            .iter()
            .zip(projected)
            .map(|(&l, flops)| BenchRecord {
                method,
                setting,
                l,
                flops,
                walltime_s: 0.0,
                repeats: 0,
            })
            .collect());
    }
    if cfg.repeats == 0 {
        return Err(invalid("repeats must be positive"));
    }
    if let Some(&p) = projected.iter().find(|&&p| p > cfg.budget) {
        return Err(Error::Budget {
            projected: p,
            budget: cfg.budget,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(ls.len());
    for &l in ls {
        let mut times = Vec::with_capacity(cfg.repeats as usize);
        let mut flops = None;
        for _ in 0..cfg.repeats {
            let start = Instant::now();
            let f = run_cell(method, setting, l, &mut rng)?;
            times.push(start.elapsed().as_secs_f64());
            debug_assert!(
                flops.is_none_or(|prev| prev == f),
                "flop count changed between repeats"
            );
            flops = Some(f);
        }
        times.sort_by(f64::total_cmp);
        let n = times.len();
        let median = if n % 2 == 1 {
            times[n / 2]
        } else {
            0.5 * (times[n / 2 - 1] + times[n / 2])
        };
        out.push(BenchRecord {
            method,
            setting,
            l,
            flops: flops.expect("at least one repeat"),
            walltime_s: median,
            repeats: cfg.repeats,
        });
    }
    Ok(out)
}

/// Least-squares line through `(ln L, ln flops)`.
pub fn fit_slope(records: &[BenchRecord]) -> Result<SlopeFit> {
    if records.len() < 4 {
        return Err(invalid(format!(
            "slope fit needs at least 4 records, got {}",
            records.len()
        )));
    }
    if records.iter().any(|r| r.l == 0 || r.flops == 0) {
        return Err(invalid("slope fit needs positive L and flops"));
    }
    let pts: Vec<(f64, f64)> = records
        .iter()
        .map(|r| ((r.l as f64).ln(), (r.flops as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx < 1e-12 {
        return Err(invalid("slope fit needs at least two distinct L"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ssr / syy).clamp(0.0, 1.0)
    };
    let lmin = records.iter().map(|r| r.l).min().expect("non-empty");
    let lmax = records.iter().map(|r| r.l).max().expect("non-empty");
    Ok(SlopeFit {
        slope,
        intercept,
        r2,
        l_range: [lmin, lmax],
    })
}

pub fn write_csv<W: Write>(records: &[BenchRecord], w: W) -> Result<()> {
    if records.is_empty() {
        return Err(invalid("no records to write"));
    }
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    for r in records {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[BenchRecord], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(invalid("no records to write"));
    }
    write_csv(records, File::create(path)?)
}

pub fn read_csv(path: &Path) -> Result<Vec<BenchRecord>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for r in rdr.deserialize() {
        out.push(r?);
    }
    Ok(out)
}

/// Log-log chart of flops against `L`, one polyline per (method, setting) with its fitted slope.
pub fn render_svg(records: &[BenchRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(invalid("no records to plot"));
    }
    let mut series: Vec<((Method, Setting), Vec<&BenchRecord>)> = Vec::new();
    for r in records {
        match series.iter_mut().find(|(k, _)| *k == (r.method, r.setting)) {
            Some((_, v)) => v.push(r),
            None => series.push(((r.method, r.setting), vec![r])),
        }
    }
    let lx = |r: &BenchRecord| (r.l.max(1) as f64).log10();
    let ly = |r: &BenchRecord| (r.flops.max(1) as f64).log10();
    let (x0, x1) = records
        .iter()
        .map(lx)
        .fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(v), b.max(v)));
    let (y0, y1) = records
        .iter()
        .map(ly)
        .fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(v), b.max(v)));
    let (w, h, pad) = (720.0, 480.0, 60.0);
    let sx = |v: f64| pad + (v - x0) / (x1 - x0).max(1e-9) * (w - 2.0 * pad);
    let sy = |v: f64| h - pad - (v - y0) / (y1 - y0).max(1e-9) * (h - 2.0 * pad);
    const COLORS: [&str; 6] = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
    ];

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    );
    svg += &format!("<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n");
    svg += &format!(
        "<path d=\"M{pad},{pad} V{} H{}\" fill=\"none\" stroke=\"black\"/>\n",
        h - pad,
        w - pad
    );
    svg += &format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">log10 L</text>\n",
        w / 2.0,
        h - 15.0
    );
    svg += &format!(
        "<text x=\"15\" y=\"{}\" transform=\"rotate(-90 15 {})\" text-anchor=\"middle\">log10 flops</text>\n",
        h / 2.0,
        h / 2.0
    );
    for (i, ((method, setting), pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|r| format!("{:.2},{:.2}", sx(lx(r)), sy(ly(r))))
            .collect();
        svg += &format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            coords.join(" ")
        );
        let label = match pts.iter().map(|r| (*r).clone()).collect::<Vec<_>>() {
            v if v.len() >= 4 => match fit_slope(&v) {
                Ok(f) => format!("{method} {setting} (slope {:.2})", f.slope),
                Err(_) => format!("{method} {setting}"),
            },
            _ => format!("{method} {setting}"),
        };
        let ty = pad + 16.0 * i as f64;
        svg += &format!(
            "<text x=\"{}\" y=\"{ty}\" fill=\"{color}\">{label}</text>\n",
            pad + 10.0
        );
    }
    svg += "</svg>\n";
    Ok(svg)
}

pub fn emit_svg(records: &[BenchRecord], path: &Path) -> Result<()> {
    let svg = render_svg(records)?;
    std::fs::write(path, svg)?;
    Ok(())
}
