mod args;
mod commands;
mod config;
mod error;
mod manifest;

use args::Cli;
use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};
use commands::{Outcome, SidePath};
use error::CliError;
use manifest::Manifest;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

fn flag_name(param: &str) -> String {
    format!("--{}", param.replace('_', "-"))
}

fn report(err: &CliError) {
    match err {
        CliError::Core(loewner_core::Error::InvalidParameter { name, reason }) => {
            eprintln!("error: invalid {}: {reason}", flag_name(name));
        }
        e => eprintln!("error: {e}"),
    }
}

fn side_path(out: Option<&Path>, path: &SidePath) -> Option<PathBuf> {
    match path {
        SidePath::Explicit(p) => Some(p.clone()),
        SidePath::Suffix(suffix) => out.map(|o| PathBuf::from(format!("{}{suffix}", o.display()))),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path.display(), e))
}

/// Writes the artifacts and returns their paths.
fn emit(out: Option<&Path>, outcome: &Outcome) -> Result<Vec<String>, CliError> {
    let mut paths = Vec::new();
    match out {
        Some(p) => {
            write_file(p, &outcome.body)?;
            paths.push(p.display().to_string());
        }
        None => std::io::stdout()
            .write_all(&outcome.body)
            .map_err(|e| CliError::io("stdout", e))?,
    }
    for side in &outcome.sides {
        if let Some(p) = side_path(out, &side.path) {
            write_file(&p, &side.bytes)?;
            paths.push(p.display().to_string());
        }
    }
    Ok(paths)
}

fn run() -> Result<(), CliError> {
    let argv = config::merge(&Cli::command(), std::env::args_os().collect())?;
    let matches = match Cli::command().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return Ok(());
        }
        Err(e) => {
            let _ = e.print();
            return Err(CliError::Parsed);
        }
    };
    let cli = Cli::from_arg_matches(&matches).map_err(|e| CliError::usage(e.to_string()))?;
    let (name, sub_matches) = matches.subcommand().expect("subcommand is required");

    let start = Instant::now();
    let outcome = commands::run(cli.seed, &cli.command)?;
    let compute = start.elapsed();
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let artifact_paths = emit(cli.out.as_deref(), &outcome)?;
    let total = start.elapsed();

    let mut cmd = Cli::command();
    cmd.build();
    let mut config = manifest::echo(&cmd, &matches);
    config.extend(manifest::echo(cmd.find_subcommand(name).expect("parsed"), sub_matches));
    let manifest = Manifest {
        command: name.to_owned(),
        config,
        argv: manifest::argv_strings(&argv),
        seed: cli.seed,
        durations_ms: BTreeMap::from([
            ("compute", compute.as_secs_f64() * 1e3),
            ("total", total.as_secs_f64() * 1e3),
        ]),
        artifact_paths,
        warnings: outcome.warnings.clone(),
        versions: manifest::versions(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("plain data serializes");
    match &cli.out {
        Some(p) => write_file(Path::new(&format!("{}.manifest.json", p.display())), format!("{text}\n").as_bytes())?,
        None => eprintln!("{text}"),
    }
    match outcome.failure {
        Some(msg) => Err(CliError::Numerical(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Parsed) {
                report(&e);
            }
            ExitCode::from(e.exit_code())
        }
    }
}
