//! TOML config files, merged into the command line as synthetic flags.
//!
//! Top-level keys apply to every subcommand; a `[name]` table applies only
//! to subcommand `name`. A key becomes `--key value` unless the user already
//! gave that flag, so the command line always wins. Values are attached as
//! `--key=value` so that negative numbers and lists pass through.

use crate::error::CliError;
use clap::Command;
use std::ffi::OsString;
use std::path::Path;
use toml::{Table, Value};

/// Index of the subcommand token in `argv` and the `--config` path, if any.
fn scan(cmd: &Command, argv: &[OsString]) -> (Option<usize>, Option<OsString>) {
    let mut sub = None;
    let mut config = None;
    let mut k = 1;
    while k < argv.len() {
        let tok = argv[k].to_string_lossy();
        if tok == "--" {
            break;
        }
        if let Some(v) = tok.strip_prefix("--config=") {
            config = Some(OsString::from(v));
        } else if tok == "--config" {
            config = argv.get(k + 1).cloned();
            k += 1;
        } else if sub.is_none() && cmd.find_subcommand(tok.as_ref()).is_some() {
            sub = Some(k);
        }
        k += 1;
    }
    (sub, config)
}

fn given_by_user(argv: &[OsString], flag: &str) -> bool {
    argv.iter().any(|a| {
        let a = a.to_string_lossy();
        a == flag || a.strip_prefix(flag).is_some_and(|rest| rest.starts_with('='))
    })
}

fn render(key: &str, value: &Value) -> Result<Option<String>, CliError> {
    let scalar = |v: &Value| -> Result<String, CliError> {
        match v {
            Value::String(s) => Ok(s.clone()),
            Value::Integer(n) => Ok(n.to_string()),
            Value::Float(x) => Ok(x.to_string()),
            _ => Err(CliError::usage(format!("config key `{key}` must be a string, number or list"))),
        }
    };
    match value {
        Value::Boolean(_) => Ok(None),
        Value::Array(items) => Ok(Some(items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?.join(","))),
        v => scalar(v).map(Some),
    }
}

fn expand(
    sub: &Command,
    keys: &Table,
    argv: &[OsString],
    out: &mut Vec<OsString>,
) -> Result<(), CliError> {
    for (key, value) in keys {
        let long = key.replace('_', "-");
        let known = sub
            .get_arguments()
            .any(|a| a.get_long() == Some(long.as_str()) && long != "config");
        if !known {
            return Err(CliError::usage(format!(
                "unknown config key `{key}` for `{}`",
                sub.get_name()
            )));
        }
        let flag = format!("--{long}");
        if given_by_user(argv, &flag) {
            continue;
        }
        match (value, render(key, value)?) {
            (Value::Boolean(true), _) => out.push(flag.into()),
            (Value::Boolean(false), _) => {}
            (_, Some(text)) => out.push(format!("{flag}={text}").into()),
            (_, None) => {}
        }
    }
    Ok(())
}

/// `argv` with the config file's values spliced in after the subcommand.
pub fn merge(cmd: &Command, argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let (Some(at), Some(path)) = scan(cmd, &argv) else {
        return Ok(argv);
    };
    let path = Path::new(&path);
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("--config {}: {e}", path.display())))?;
    let table: Table = text
        .parse()
        .map_err(|e| CliError::usage(format!("--config {}: {e}", path.display())))?;
    let name = argv[at].to_string_lossy().into_owned();
    let mut built = cmd.clone();
    built.build();
    let sub = built.find_subcommand(&name).expect("scan found it");

    let (mut top, mut own) = (Table::new(), Table::new());
    for (key, value) in table {
        match value {
            Value::Table(t) if key == name => own = t,
            Value::Table(_) if cmd.find_subcommand(&key).is_some() => {}
            Value::Table(_) => {
                return Err(CliError::usage(format!("unknown config table `[{key}]`")));
            }
            v => {
                top.insert(key, v);
            }
        }
    }
    let mut synthetic = Vec::new();
    expand(sub, &top, &argv, &mut synthetic)?;
    expand(sub, &own, &argv, &mut synthetic)?;

    let mut merged = argv[..=at].to_vec();
    merged.extend(synthetic);
    merged.extend_from_slice(&argv[at + 1..]);
    Ok(merged)
}
