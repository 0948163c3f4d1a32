//! Batch front end: each subcommand validates its flags, runs one job and
//! writes its artifacts plus `manifest.json` into `--out`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod io;
mod jobs;

use io::Failure;

#[derive(Parser, Debug)]
#[command(name = "aperiodic", version, about = "Aperiodic order toolkit")]
struct Cli {
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Seed for stochastic jobs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Model-set point pattern (CSV + SVG).
    Gen(PatternArgs),
    /// Bragg spectrum of a model set (CSV + disc-plot SVG).
    Diffract(DiffractArgs),
    /// Iterate an inflation rule.
    Inflate(InflateArgs),
    /// r-patch atlas of a model set or of inflated supertiles.
    Atlas(AtlasArgs),
    /// LI comparison of two patterns.
    CompareLi(CompareArgs),
    /// Apply a local derivation rule to an inflated Penrose patch.
    Derive(DeriveArgs),
    /// Translation module of r-patch recurrences.
    Ltm(LtmArgs),
    /// Subword complexity of a substitution fixed point.
    Complexity(ComplexityArgs),
    /// Draw from a random ensemble.
    Sample(SampleArgs),
    /// Exact dart-rhombus tiling counts.
    Count(CountArgs),
    /// Entropy over a density grid.
    EntropyScan(ScanArgs),
}

#[derive(Args, Debug, Serialize, Clone)]
pub struct PatternArgs {
    /// fibonacci, ammann-beenker or penrose.
    #[arg(long, default_value = "fibonacci", conflicts_with = "descriptor")]
    pub scheme: String,
    /// JSON scheme descriptor file instead of a named scheme.
    #[arg(long)]
    pub descriptor: Option<PathBuf>,
    /// `lo:hi`, `x0:x1,y0:y1`, `ball:R` or `square:H`.
    #[arg(long)]
    pub region: Option<String>,
    /// Comma-separated lattice offset (integers, p/q, or decimals).
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct DiffractArgs {
    #[command(flatten)]
    pub pattern: PatternArgs,
    #[arg(long, default_value_t = 5.0)]
    pub kmax: f64,
    /// Intensity floor relative to the central peak.
    #[arg(long, default_value_t = 0.001)]
    pub floor: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct InflateArgs {
    /// fibonacci, penrose-robinson or ttt.
    #[arg(long)]
    pub rule: String,
    #[arg(long, default_value_t = 5)]
    pub iterations: usize,
    #[arg(long, value_enum, default_value_t = SeedTile::Wheel)]
    pub seed_tile: SeedTile,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq)]
pub enum SeedTile {
    Wheel,
    Acute,
    Obtuse,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq)]
pub enum ViewArg {
    Tiles,
    Rhombs,
    Vertices,
}

#[derive(Args, Debug, Serialize)]
pub struct AtlasArgs {
    /// Build from inflation instead of a model set.
    #[arg(long)]
    pub rule: Option<String>,
    #[arg(long, value_enum, default_value_t = ViewArg::Tiles)]
    pub view: ViewArg,
    /// Inflation depth (with --rule).
    #[arg(long, default_value_t = 6)]
    pub iterations: usize,
    #[command(flatten)]
    pub pattern: PatternArgs,
    #[arg(long)]
    pub radius: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub pattern: PatternArgs,
    /// Offset of the second pattern.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "periodic_b")]
    pub gamma_b: Option<String>,
    /// Compare against the periodic chain with gaps 1, τ (fibonacci only).
    #[arg(long)]
    pub periodic_b: bool,
    #[arg(long)]
    pub radius: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct DeriveArgs {
    /// identity, penrose-to-robinson or robinson-to-penrose.
    #[arg(long)]
    pub rule: String,
    #[arg(long, default_value_t = 4)]
    pub iterations: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct LtmArgs {
    #[command(flatten)]
    pub pattern: PatternArgs,
    #[arg(long)]
    pub radius: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct ComplexityArgs {
    #[arg(long, default_value = "fibonacci")]
    pub rule: String,
    #[arg(long, default_value_t = 12)]
    pub nmax: usize,
    /// Prefix length (default: max(64·nmax, 4096)).
    #[arg(long)]
    pub length: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq)]
pub enum Ensemble {
    Binary,
    DartRhombus,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq)]
pub enum Moves {
    Local,
    Winding,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq)]
pub enum Start {
    Rhombi,
    Darts,
}

#[derive(Args, Debug, Serialize)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub ensemble: Ensemble,
    /// Frequency of `a` (binary).
    #[arg(long, default_value_t = 0.618_033_988_749_895)]
    pub nu: f64,
    /// Chain length (binary).
    #[arg(long, default_value_t = 1_000_000)]
    pub n: usize,
    /// Block length for the entropy estimate (binary).
    #[arg(long, default_value_t = 8)]
    pub block: usize,
    #[arg(long, default_value_t = 8)]
    pub l1: usize,
    #[arg(long, default_value_t = 8)]
    pub l2: usize,
    #[arg(long, default_value_t = 100_000)]
    pub steps: u64,
    #[arg(long, value_enum, default_value_t = Moves::Winding)]
    pub moves: Moves,
    #[arg(long, value_enum, default_value_t = Start::Rhombi)]
    pub start: Start,
}

#[derive(Args, Debug, Serialize)]
pub struct CountArgs {
    #[arg(long)]
    pub l1: Option<usize>,
    #[arg(long)]
    pub l2: Option<usize>,
    /// Rhombi per orientation, `a,b,c`.
    #[arg(long)]
    pub rhombi: Option<String>,
    /// Count every torus within the enumeration budget instead.
    #[arg(long)]
    pub ladder: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub ensemble: Ensemble,
    /// `lo:hi:points` over ν_a (binary).
    #[arg(long, default_value = "0:1:51")]
    pub grid: String,
    /// Torus side (dart-rhombus).
    #[arg(long, default_value_t = 4)]
    pub l: usize,
    #[arg(long)]
    pub fit_radius: Option<f64>,
}

fn run(cli: Cli) -> Result<(), Failure> {
    let out = &cli.out;
    match &cli.command {
        Command::Gen(a) => jobs::gen(a, out),
        Command::Diffract(a) => jobs::diffract(a, out),
        Command::Inflate(a) => jobs::inflate(a, out),
        Command::Atlas(a) => jobs::atlas(a, out),
        Command::CompareLi(a) => jobs::compare_li(a, out),
        Command::Derive(a) => jobs::derive(a, out),
        Command::Ltm(a) => jobs::ltm(a, out),
        Command::Complexity(a) => jobs::complexity(a, out),
        Command::Sample(a) => jobs::sample(a, cli.seed, out),
        Command::Count(a) => jobs::count(a, out),
        Command::EntropyScan(a) => jobs::entropy_scan(a, out),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on malformed arguments
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code() as u8)
        }
    }
}
