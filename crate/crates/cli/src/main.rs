//! shaperet — build, query, and evaluate silhouette descriptor databases.

mod commands;
mod parallel;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shaperet_core::descriptor::DescriptorMode;
use shaperet_core::segmentation::InitStyle;

#[derive(Parser)]
#[command(
    name = "shaperet",
    version,
    about = "Silhouette shape retrieval pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled synthetic mask corpus.
    Gen(GenArgs),
    /// Describe every image in a directory and write a descriptor database.
    Build(BuildArgs),
    /// Rank a query image against a descriptor database.
    Query(QueryArgs),
    /// Compare retrieval quality of the configured mode against the raw
    /// histogram baseline over an image corpus.
    Eval(EvalArgs),
    /// Segment one image and write the silhouette mask.
    Segment(SegmentArgs),
}

fn parse_mode(s: &str) -> Result<DescriptorMode, String> {
    s.parse()
}

fn parse_grid(s: &str) -> Result<usize, String> {
    let grid: usize = s.parse().map_err(|_| format!("invalid grid size {s:?}"))?;
    if grid < 3 {
        return Err("grid must be at least 3".into());
    }
    Ok(grid)
}

fn parse_count(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("invalid count {s:?}"))?;
    if n == 0 {
        return Err("count must be at least 1".into());
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SegMethod {
    Otsu,
    ChanVese,
    None,
}

fn parse_seg(s: &str) -> Result<SegMethod, String> {
    match s {
        "otsu" => Ok(SegMethod::Otsu),
        "chanvese" => Ok(SegMethod::ChanVese),
        "none" => Ok(SegMethod::None),
        other => Err(format!("unknown segmentation method {other:?}")),
    }
}

fn parse_init(s: &str) -> Result<InitStyle, String> {
    match s {
        "checkerboard" => Ok(InitStyle::Checkerboard),
        "circle" => Ok(InitStyle::CenteredCircle),
        other => Err(format!("unknown level-set init {other:?}")),
    }
}

/// Descriptor settings shared by build and eval.
#[derive(Args, Debug, Clone)]
struct DescriptorOpts {
    /// Side length of the normalization grid.
    #[arg(long = "grid", value_parser = parse_grid, default_value_t = 45)]
    grid: usize,
    /// Descriptor mode: dhfp, kdfpe_eq7, or kdfpe_kde.
    #[arg(long, value_parser = parse_mode, default_value = "kdfpe_eq7")]
    mode: DescriptorMode,
    /// Multiplier of the plug-in bandwidth rule.
    #[arg(long = "bandwidth-constant", default_value_t = 1.059)]
    bandwidth_constant: f64,
}

/// Silhouette extraction settings.
#[derive(Args, Debug, Clone)]
struct SegOpts {
    /// Segmentation method: otsu, chanvese, or none (inputs already binary).
    #[arg(long, value_parser = parse_seg, default_value = "otsu")]
    seg: SegMethod,
    /// Threshold for --seg none, on the 0-255 scale.
    #[arg(long = "threshold", default_value_t = 128)]
    threshold: u8,
    /// Contour-length weight of the level-set evolution.
    #[arg(long = "cv-mu", default_value_t = 0.2)]
    cv_mu: f64,
    /// Level-set time step.
    #[arg(long = "cv-dt", default_value_t = 0.5)]
    cv_dt: f64,
    /// Heaviside/delta regularization width.
    #[arg(long = "cv-epsilon", default_value_t = 1.0)]
    cv_epsilon: f64,
    /// Iteration cap of the level-set evolution.
    #[arg(long = "cv-iters", default_value_t = 500)]
    cv_iters: usize,
    /// Convergence tolerance on the mean absolute level-set change.
    #[arg(long = "cv-tol", default_value_t = 1e-3)]
    cv_tol: f64,
    /// Level-set initialization: checkerboard or circle.
    #[arg(long = "cv-init", value_parser = parse_init, default_value = "checkerboard")]
    cv_init: InitStyle,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Directory to write masks and the labels file into.
    out_dir: std::path::PathBuf,
    #[arg(long, value_parser = parse_count, default_value_t = 20)]
    classes: usize,
    #[arg(long = "per-class", value_parser = parse_count, default_value_t = 10)]
    per_class: usize,
    /// Canvas side length of every generated mask.
    #[arg(long, default_value_t = 128)]
    canvas: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write ASCII (P2) masks instead of binary (P5).
    #[arg(long)]
    ascii: bool,
}

#[derive(Args, Debug)]
struct BuildArgs {
    /// Directory of netpbm images to ingest.
    input_dir: std::path::PathBuf,
    /// Output database path.
    #[arg(long = "out")]
    out: std::path::PathBuf,
    /// Labels file (id<TAB>label); defaults to <input_dir>/labels.tsv.
    #[arg(long)]
    labels: Option<std::path::PathBuf>,
    #[command(flatten)]
    descriptor: DescriptorOpts,
    #[command(flatten)]
    seg: SegOpts,
}

#[derive(Args, Debug)]
struct QueryArgs {
    /// Query image path.
    image: std::path::PathBuf,
    /// Descriptor database to rank against.
    #[arg(long = "db")]
    db: std::path::PathBuf,
    /// Number of results to print.
    #[arg(long = "top-k", default_value_t = 10)]
    top_k: usize,
    /// Grid override; must match the database when given.
    #[arg(long = "grid", value_parser = parse_grid)]
    grid: Option<usize>,
    /// Mode override; must match the database when given.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<DescriptorMode>,
    #[arg(long = "bandwidth-constant", default_value_t = 1.059)]
    bandwidth_constant: f64,
    #[command(flatten)]
    seg: SegOpts,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Directory of database images.
    db_dir: std::path::PathBuf,
    /// Directory of query images (may be the database directory itself).
    query_dir: std::path::PathBuf,
    /// Labels file covering database images and every query.
    #[arg(long)]
    labels: std::path::PathBuf,
    /// Directory to write the recall-precision CSV reports into.
    #[arg(long = "out")]
    out: std::path::PathBuf,
    /// Requested result count per query (the T of the effectiveness score).
    #[arg(long = "top-k", default_value_t = 10)]
    top_k: usize,
    #[command(flatten)]
    descriptor: DescriptorOpts,
    #[command(flatten)]
    seg: SegOpts,
}

#[derive(Args, Debug)]
struct SegmentArgs {
    /// Input image path.
    image: std::path::PathBuf,
    /// Output mask path.
    #[arg(long = "out")]
    out: std::path::PathBuf,
    /// Write an ASCII (P2) mask instead of binary (P5).
    #[arg(long)]
    ascii: bool,
    #[command(flatten)]
    seg: SegOpts,
}

/// A command failure carrying its exit code.
struct CmdError {
    code: u8,
    message: String,
}

impl CmdError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

type CmdResult = Result<(), CmdError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => commands::gen(args),
        Command::Build(args) => commands::build(args),
        Command::Query(args) => commands::query(args),
        Command::Eval(args) => commands::eval(args),
        Command::Segment(args) => commands::segment(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
