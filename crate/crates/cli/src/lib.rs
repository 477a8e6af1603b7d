//! Command-line front end: coefficients, transforms, tensor products, selection rules,
//! benchmarks and the verification suite.

pub mod commands;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "vstp",
    version,
    about = "Tensor products of SO(3) irreps via spherical signals"
)]
pub struct Cli {
    /// Bound for float checks specified at 1e-10; tighter checks keep their own bounds.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tolerance: f64,
    /// Seed for every random input.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Angular-momentum coefficients.
    #[command(subcommand)]
    Coeff(CoeffCmd),
    /// Spherical harmonic transforms between coefficient files and grid samples.
    Transform(TransformArgs),
    /// Tensor products of coefficient files.
    #[command(subcommand)]
    Tp(TpCmd),
    /// Selection rules and interactability.
    #[command(subcommand)]
    Rules(RulesCmd),
    /// Flop-counting benchmarks.
    #[command(subcommand)]
    Bench(BenchCmd),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum CoeffCmd {
    /// Clebsch-Gordan coefficient C^{j3,m3}_{j1,m1,j2,m2}.
    Cg {
        #[arg(long)]
        j1: u32,
        #[arg(long, allow_hyphen_values = true)]
        m1: i32,
        #[arg(long)]
        j2: u32,
        #[arg(long, allow_hyphen_values = true)]
        m2: i32,
        #[arg(long)]
        j3: u32,
        #[arg(long, allow_hyphen_values = true)]
        m3: i32,
    },
    /// Wigner 9j symbol of a row-major grid.
    #[command(name = "9j")]
    NineJ {
        /// j1,l1,s1,j2,l2,s2,j3,l3,s3
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<u32>,
    },
    /// Gaunt coefficient, the integral of Y_l1^m1 Y_l2^m2 conj(Y_l3^m3).
    Gaunt {
        #[arg(long)]
        l1: u32,
        #[arg(long, allow_hyphen_values = true)]
        m1: i32,
        #[arg(long)]
        l2: u32,
        #[arg(long, allow_hyphen_values = true)]
        m2: i32,
        #[arg(long)]
        l3: u32,
        #[arg(long, allow_hyphen_values = true)]
        m3: i32,
    },
    /// Generalized Gaunt coefficient of a TSH path.
    Ggaunt {
        /// j1,l1,j2,l2,j3,l3
        #[arg(long, value_delimiter = ',', required = true)]
        path: Vec<u32>,
        /// s1,s2,s3
        #[arg(long, value_delimiter = ',', default_values_t = [1, 1, 1])]
        s: Vec<u32>,
    },
    /// Wigner D matrix for zyz Euler angles in radians.
    WignerD {
        #[arg(long)]
        j: u32,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        gamma: f64,
    },
    /// Random coefficient file.
    Random {
        /// Band limit.
        #[arg(long = "L")]
        l: u32,
        /// Spin; 0 writes a scalar file.
        #[arg(long, default_value_t = 0)]
        s: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        decimals: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// Grid samples to coefficients.
    Forward,
    /// Coefficients to grid samples.
    Inverse,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long, value_enum)]
    pub direction: Direction,
    /// Spin of the data; must match the file.
    #[arg(long, default_value_t = 0)]
    pub s: u32,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Band limit of the forward output; defaults to the grid degree.
    #[arg(long = "L")]
    pub l: Option<u32>,
    /// Grid degree of the inverse output; defaults to the band limit.
    #[arg(long)]
    pub lg: Option<u32>,
    /// Write floats in fixed notation with this many decimals.
    #[arg(long)]
    pub decimals: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Naive,
    Sparse,
}

#[derive(Debug, Args)]
pub struct TpArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    /// Output band limit.
    #[arg(long)]
    pub l3: u32,
    #[arg(long)]
    pub out: PathBuf,
    /// Grid degree for signal products; defaults to the sum of the input band limits.
    #[arg(long)]
    pub lg: Option<u32>,
    #[arg(long)]
    pub decimals: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum TpCmd {
    /// Clebsch-Gordan tensor product over every path.
    Cgtp {
        #[command(flatten)]
        args: TpArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Sparse)]
        mode: ModeArg,
    },
    /// Gaunt tensor product of scalar files.
    Gtp {
        #[command(flatten)]
        args: TpArgs,
    },
    /// Vector signal tensor product of spin-1 files.
    Vstp {
        #[command(flatten)]
        args: TpArgs,
    },
    /// Irrep signal tensor product of TSH files to output spin `s3`.
    Istp {
        #[command(flatten)]
        args: TpArgs,
        #[arg(long)]
        s3: u32,
    },
    /// One CG path computed by a single VSTP, compared with the direct contraction.
    Simulate {
        #[arg(long)]
        j1: u32,
        #[arg(long)]
        j2: u32,
        #[arg(long)]
        j3: u32,
        /// Scalar file holding a degree-j1 block.
        #[arg(long)]
        x: PathBuf,
        /// Scalar file holding a degree-j2 block.
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        decimals: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum RulesCmd {
    /// Per-rule verdicts and the coefficient of a VSTP path.
    Check {
        /// j1,l1,j2,l2,j3,l3
        #[arg(long, value_delimiter = ',', required = true)]
        path: Vec<u32>,
    },
    /// Orbital degrees realizing (j1, j2, j3) with one VSTP.
    FindElls {
        /// j1,j2,j3
        #[arg(long, value_delimiter = ',', required = true)]
        j: Vec<u32>,
    },
    /// Whether (j1, j2, j3) is interactable, by rule and by search.
    Interactable {
        #[arg(long, value_delimiter = ',', required = true)]
        j: Vec<u32>,
    },
    /// Number of (j, l) blocks of a spin-s signal with band limit L.
    Expressivity {
        #[arg(long)]
        s: u32,
        #[arg(long = "L")]
        l: u32,
    },
}

#[derive(Debug, Subcommand)]
pub enum BenchCmd {
    /// Run methods over an L grid and write CSV (and optionally SVG).
    Run(BenchRunArgs),
    /// Fit log-log slopes to a CSV written by `bench run`.
    Fit {
        #[arg(long)]
        csv: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct BenchRunArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub methods: Vec<String>,
    #[arg(long, default_value = "MIMO")]
    pub setting: String,
    #[arg(long = "L", value_delimiter = ',', default_values_t = [4, 8, 16, 32])]
    pub l: Vec<u32>,
    #[arg(long, default_value_t = 5)]
    pub repeats: u32,
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Closed-form counts only, no runs.
    #[arg(long)]
    pub projected: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct VerifyLevel {
    #[arg(long)]
    pub quick: bool,
    #[arg(long)]
    pub full: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub level: VerifyLevel,
    /// Print the report as JSON on stdout.
    #[arg(long)]
    pub json: bool,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    eprintln!("config: {cli:?}");
    match commands::dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
