mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mateforge::ToleranceConfig;

#[derive(Parser, Debug)]
#[command(name = "mateforge", version, about = "Mate analysis, curation and evaluation for CAD assemblies")]
struct Cli {
    /// Tolerance configuration (JSON).
    #[arg(long, global = true, env = "MATEFORGE_CONFIG")]
    config: Option<PathBuf>,

    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for corpus commands.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the filter pipeline over a directory of assembly documents.
    Filter { dir: PathBuf },
    /// Filter and densify; optionally write the kept assemblies.
    Densify {
        dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Contacts, candidate axes, relative motion and feasibility of one assembly.
    Analyze { assembly: PathBuf },
    /// Predict mate type and axis for every mated pair.
    Predict {
        dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score predicted assemblies against ground truth, matched by assembly id.
    Evaluate {
        pred_dir: PathBuf,
        truth_dir: PathBuf,
        /// Per-mate annotator labels for the agreement statistics.
        #[arg(long)]
        annotations: Option<PathBuf>,
    },
    /// Corpus statistics only.
    Stats { dir: PathBuf },
    /// Write the synthetic fixture corpus.
    Fixtures {
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Majority-consensus labels from an annotation file.
    Consensus { file: PathBuf },
}

pub struct Context {
    pub tol: ToleranceConfig,
    pub jobs: Option<usize>,
    pub report: Option<PathBuf>,
}

fn load_config(cli: &Cli) -> Result<ToleranceConfig, String> {
    let mut tol = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            ToleranceConfig::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => ToleranceConfig::default(),
    };
    if let Some(seed) = cli.seed {
        tol.seed = seed;
    }
    Ok(tol)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match load_config(&cli) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.jobs == Some(0) {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    let ctx = Context { tol, jobs: cli.jobs, report: cli.report.clone() };
    let result = match cli.command {
        Command::Filter { dir } => commands::filter(&ctx, &dir, None, false),
        Command::Densify { dir, out } => commands::filter(&ctx, &dir, out.as_deref(), false),
        Command::Stats { dir } => commands::filter(&ctx, &dir, None, true),
        Command::Analyze { assembly } => commands::analyze(&ctx, &assembly),
        Command::Predict { dir, out } => commands::predict(&ctx, &dir, out.as_deref()),
        Command::Evaluate { pred_dir, truth_dir, annotations } => {
            commands::evaluate(&ctx, &pred_dir, &truth_dir, annotations.as_deref())
        }
        Command::Fixtures { out_dir, scale } => commands::fixtures(&ctx, &out_dir, scale),
        Command::Consensus { file } => commands::consensus(&ctx, &file),
    };
    match result {
        Ok(commands::Status::Clean) => ExitCode::SUCCESS,
        Ok(commands::Status::AssemblyErrors(n)) => {
            eprintln!("{n} assemblies failed; see the report");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
