//! Command-line front end: parse an ideal document, sweep a window of
//! multidegrees, optionally run the verification passes, and emit a report.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 on usage
//! or input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use localcoh::{emit_report, parse_ideal, sweep, verify_all, IdealSpec, ReportFormat};

#[derive(Parser)]
#[command(name = "localcoh", version, about = "Multigraded local cohomology over the p-local integers", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a window of multidegrees and print the component table.
    Compute(ComputeArgs),
    /// Sweep the full position range and run every verification pass.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Ideal document (text or JSON form).
    #[arg(long)]
    input: PathBuf,

    /// Half-width W of the swept window [-W, W]^n.
    /// Defaults to $LOCALCOH_WINDOW or 3.
    #[arg(long)]
    window: Option<u32>,

    /// Output format: csv or json. Defaults to $LOCALCOH_FORMAT or csv.
    #[arg(long)]
    format: Option<String>,

    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,

    /// Worker threads for the sweep (defaults to the available cores).
    #[arg(long, conflicts_with = "serial")]
    jobs: Option<usize>,

    /// Run the sweep on a single thread.
    #[arg(long)]
    serial: bool,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Cohomological positions to sweep: a single `i` or an inclusive range
    /// `a..b`. Defaults to the full range 0..r.
    #[arg(long)]
    coh: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(args) => run_compute(args),
        Command::Verify(args) => run_verify(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn load_ideal(path: &Path) -> anyhow::Result<IdealSpec> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_ideal(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn window_arg(args: &CommonArgs) -> anyhow::Result<u32> {
    let w = match (args.window, std::env::var("LOCALCOH_WINDOW").ok()) {
        (Some(w), _) => w,
        (None, Some(text)) => text
            .parse()
            .map_err(|_| anyhow!("bad LOCALCOH_WINDOW value {text:?}"))?,
        (None, None) => 3,
    };
    if w < 1 {
        return Err(anyhow!("window must be at least 1"));
    }
    Ok(w)
}

fn format_arg(args: &CommonArgs) -> anyhow::Result<ReportFormat> {
    let text = match (&args.format, std::env::var("LOCALCOH_FORMAT").ok()) {
        (Some(f), _) => f.clone(),
        (None, Some(f)) => f,
        (None, None) => "csv".to_string(),
    };
    Ok(text.parse::<ReportFormat>()?)
}

/// `a..b` (inclusive) or a single `i`.
fn parse_coh_range(text: &str, max: usize) -> anyhow::Result<Vec<usize>> {
    let parse_end = |s: &str| -> anyhow::Result<usize> {
        s.trim()
            .parse::<usize>()
            .map_err(|_| anyhow!("bad cohomological position {s:?}"))
    };
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (parse_end(a)?, parse_end(b)?),
        None => {
            let i = parse_end(text)?;
            (i, i)
        }
    };
    if lo > hi {
        return Err(anyhow!("empty position range {text:?}"));
    }
    if hi > max {
        return Err(anyhow!(
            "position range {text:?} exceeds the generator count {max}"
        ));
    }
    Ok((lo..=hi).collect())
}

fn install_pool(args: &CommonArgs) -> anyhow::Result<rayon::ThreadPool> {
    let threads = if args.serial { Some(1) } else { args.jobs };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(anyhow!("--jobs must be positive"));
        }
        builder = builder.num_threads(t);
    }
    builder.build().context("cannot build worker pool")
}

fn write_out(args: &CommonArgs, text: &str) -> anyhow::Result<()> {
    match &args.output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run_compute(args: ComputeArgs) -> anyhow::Result<ExitCode> {
    let ideal = load_ideal(&args.common.input)?;
    let window = window_arg(&args.common)?;
    let format = format_arg(&args.common)?;
    let i_list = match &args.coh {
        Some(text) => parse_coh_range(text, ideal.num_generators())?,
        None => (0..=ideal.num_generators()).collect(),
    };
    let pool = install_pool(&args.common)?;
    let reports = pool.install(|| sweep(&ideal, window, &i_list))?;
    write_out(&args.common, &emit_report(&reports, None, format))?;
    Ok(ExitCode::SUCCESS)
}

fn run_verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let ideal = load_ideal(&args.common.input)?;
    let window = window_arg(&args.common)?;
    let format = format_arg(&args.common)?;
    let pool = install_pool(&args.common)?;
    let (reports, verdict) = pool.install(|| verify_all(&ideal, window))?;
    write_out(&args.common, &emit_report(&reports, Some(&verdict), format))?;
    if verdict.passed() {
        eprintln!("verify: all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        for line in verdict.failures() {
            eprintln!("verify: {line}");
        }
        Ok(ExitCode::from(1))
    }
}
