use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use synthlab::{parse_config, run_experiment, write_artifacts, Command, Pool};

const EXIT_ASSERTION: u8 = 2;
const EXIT_USAGE: u8 = 1;

/// Run one synthlab experiment.
#[derive(Parser)]
#[command(name = "synthlab", version)]
struct Cli {
    /// spectrum, profile, fr, approx, stability, endpoint, uncertainty,
    /// kuznecov or volume; must match the config's `command`.
    command: String,
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's worker count.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory (default: the config's `[output] dir`, else `.`).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_ASSERTION),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let Some(command) = Command::parse(&cli.command) else {
        return Err(format!("unknown command `{}`", cli.command));
    };
    let text = std::fs::read_to_string(&cli.config).map_err(|e| format!("{}: {e}", cli.config.display()))?;
    let mut config = parse_config(&text).map_err(|e| format!("{}:\n{e}", cli.config.display()))?;
    if config.command != command {
        return Err(format!(
            "command `{command}` does not match `command = {}` in {}",
            config.command,
            cli.config.display()
        ));
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err("--threads must be at least 1".into());
        }
        config.threads = threads;
    }
    let out = cli
        .out
        .or_else(|| config.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let pool = Pool::new(config.threads).map_err(|e| e.to_string())?;
    let report = run_experiment(&config, &pool).map_err(|e| e.to_string())?;
    let (csv, jsonl) = write_artifacts(&report, &out).map_err(|e| e.to_string())?;
    for a in &report.assertions {
        println!(
            "{} {} = {:e} (bound {:e}, slack {:e})",
            if a.pass { "PASS" } else { "FAIL" },
            a.name,
            a.value,
            a.bound,
            a.slack
        );
    }
    println!("wrote {} and {}", csv.display(), jsonl.display());
    Ok(report.passed())
}
