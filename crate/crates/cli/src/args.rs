use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "blaschke", version, about = "Dynamics of the Blaschke family z^{d+1}((z-a)/(1-conj(a)z))^d")]
pub struct Cli {
    /// `key=value` lines used for flags not given on the command line.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Machine-readable JSON on standard output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for rendering, scans and ray tracing.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    /// Print a run report to standard error.
    #[arg(long, global = true)]
    pub report: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Region and Julia-set connectivity verdict.
    Classify(ParamArgs),
    /// Free critical points and critical angles.
    Critical(ParamArgs),
    /// All fixed points with multipliers.
    Fixed(ParamArgs),
    /// Rotation number and rotation interval of the circle map.
    Rotnum(RotnumArgs),
    /// Arnold tongue scan as CSV.
    Tongues(TonguesArgs),
    /// Basin raster as binary PPM.
    Julia(JuliaArgs),
    /// One Böttcher ray as CSV.
    Rays(RaysArgs),
    /// Bi-accessibility check of a repelling circle cycle.
    Biaccess(BiaccessArgs),
    /// Rotation cycles of the multiplication map as CSV.
    Rotset(RotsetArgs),
    /// Itinerary interval of a rotation cycle, exact.
    Interval(IntervalArgs),
    /// Classify a word over {0..d} with underlined symbols written `_k`.
    Words(WordsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub d: u32,
    /// Complex parameter as `RE,IM`.
    #[arg(long, value_name = "RE,IM", conflicts_with_all = ["r", "alpha"], allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Argument of a in turns, inside (-1/(4d), 1/(4d)], or `auto`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
}

#[derive(Debug, Args)]
pub struct RotnumArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 4000)]
    pub n_iter: usize,
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    #[arg(long, default_value_t = 64)]
    pub q_max: u32,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x0: f64,
}

#[derive(Debug, Args)]
pub struct TonguesArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub d: u32,
    #[arg(long, value_name = "LO,HI")]
    pub r_range: String,
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
    pub alpha_range: String,
    /// `NRxNA`: r cells by alpha cells.
    #[arg(long, default_value = "64x64")]
    pub res: String,
    #[arg(long, default_value_t = 12)]
    pub q_max: u32,
    #[arg(long, default_value_t = 4000)]
    pub n_iter: usize,
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct JuliaArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_name = "XMIN,XMAX,YMIN,YMAX", default_value = "-2,2,-2,2", allow_hyphen_values = true)]
    pub viewport: String,
    /// `WxH` in pixels.
    #[arg(long, default_value = "400x400")]
    pub res: String,
    #[arg(long, default_value_t = blaschke::render::DEFAULT_BUDGET)]
    pub budget: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BasinArg {
    Zero,
    Infinity,
}

#[derive(Debug, Args)]
pub struct RaysArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value = "infinity")]
    pub basin: BasinArg,
    /// Rational angle `num/den`.
    #[arg(long)]
    pub angle: String,
    #[arg(long, default_value_t = 60)]
    pub depth: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BiaccessArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub p: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub q: u32,
    #[arg(long, default_value_t = 80)]
    pub depth: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RotsetArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub n: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub q: u32,
    /// With `--delta`, realize a single cycle of rotation number p/q.
    #[arg(long, requires = "delta")]
    pub p: Option<u32>,
    /// Deployment vector as comma-separated rationals.
    #[arg(long, requires = "p")]
    pub delta: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IntervalArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub d: u32,
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub q: u32,
}

#[derive(Debug, Args)]
pub struct WordsArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub d: u32,
    /// Comma-separated symbols, e.g. `_0,2,1`.
    #[arg(long)]
    pub word: String,
    /// Also apply the shift to an admissible word.
    #[arg(long)]
    pub shift: bool,
}
