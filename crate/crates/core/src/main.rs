use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::Parser;
use nctorus::experiments::{Command, ExperimentSpec};

/// Experiments on the noncommutative torus.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// Experiment to run; may instead be given as `command` in the config.
    #[arg(value_parser = PossibleValuesParser::new(Command::ALL.map(Command::name)))]
    command: Option<String>,

    /// TOML config; missing keys take the command defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory [default: out/<command>].
    #[arg(long)]
    out: Option<PathBuf>,

    /// Seed for all random data; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads for parameter sweeps.
    #[arg(long)]
    threads: Option<usize>,

    /// Exit nonzero when any check fails.
    #[arg(long)]
    check: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(passed) if cli.check && !passed => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> nctorus::Result<bool> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| nctorus::Error::param("threads", e.to_string()))?;
    }
    let command = cli.command.as_deref().map(str::parse::<Command>).transpose()?;
    let spec = match &cli.config {
        Some(path) => ExperimentSpec::from_file(path, command, cli.seed)?,
        None => {
            let command = command.ok_or_else(|| nctorus::Error::param("command", "give a command or a config with `command`"))?;
            ExperimentSpec::defaults(command, cli.seed.unwrap_or(0))
        }
    };
    let outcome = spec.run()?;
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out").join(spec.command.name()));
    outcome.write(&dir)?;
    for check in &outcome.checks {
        let mark = if check.passed { "PASS" } else { "FAIL" };
        println!("{mark} {}: {:e} (limit {:e}) {}", check.name, check.value, check.limit, check.detail);
    }
    let passed = outcome.passed();
    println!(
        "{} {}: {} checks, wrote {}",
        if passed { "PASS" } else { "FAIL" },
        spec.command,
        outcome.checks.len(),
        dir.display()
    );
    Ok(passed)
}
