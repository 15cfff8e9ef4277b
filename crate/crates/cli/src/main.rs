use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tcna_cli::commands::{self, Check, CommandError, Options, Output};
use tcna_cli::model::{Model, ModelFile};

#[derive(Parser)]
#[command(name = "tcna", version, about = "Exact no-arbitrage checks for markets with proportional transaction costs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Seed for the samplers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// LP calls and extreme rays allowed per guarded check.
    #[arg(long, global = true, default_value_t = 4096)]
    guard: usize,
    /// Samples for the axiom and HN0 samplers.
    #[arg(long, global = true, default_value_t = 64)]
    samples: usize,
    /// Checks to skip.
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    skip: Vec<Check>,
    /// Write the full JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the full JSON report on stdout instead of the summary.
    #[arg(long, global = true)]
    json: bool,
    /// Trace simplex tableaus on stderr.
    #[arg(long, global = true)]
    dump_lp: bool,
    /// Record wall-clock timings in the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every no-arbitrage check on a model.
    Check { model: PathBuf },
    /// Decide whether a named claim is attainable from zero endowment.
    Hedge { model: PathBuf, claim: String },
    /// Projected bid-ask report under a consistent price system.
    Report { model: PathBuf },
}

fn load(path: &Path) -> Result<Model, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file = ModelFile::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    file.validate().map_err(|e| format!("{}: {e}", path.display()))
}

fn exit_code(e: &CommandError) -> u8 {
    match e {
        CommandError::Internal(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    let filter = if c.dump_lp { "warn,tcna::lp=trace" } else { "warn" };
    env_logger::Builder::new().parse_filters(filter).target(env_logger::Target::Stderr).init();
    let opts = Options { seed: c.seed, guard: c.guard, samples: c.samples, skip: c.skip.clone(), timing: c.timing };
    let path = match &cli.command {
        Command::Check { model } | Command::Hedge { model, .. } | Command::Report { model } => model,
    };
    let model = match load(path) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Check { .. } => commands::check(&model, &opts),
        Command::Hedge { claim, .. } => commands::hedge(&model, claim),
        Command::Report { .. } => commands::report(&model, &opts),
    };
    let Output { report, summary } = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = serde_json::to_string_pretty(&report).expect("reports serialize");
    if let Some(out) = &c.out {
        if let Err(e) = fs::write(out, format!("{text}\n")) {
            eprintln!("error: {}: {e}", out.display());
            return ExitCode::from(1);
        }
    }
    if c.json {
        println!("{text}");
    } else {
        for line in summary {
            println!("{line}");
        }
    }
    ExitCode::SUCCESS
}
