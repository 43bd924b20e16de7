use clap::{ArgMatches, Command};
use serde::Serialize;
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::ffi::OsString;

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    /// Every resolved argument, defaults included.
    pub config: Map<String, Value>,
    /// The command line after config merging; re-running it reproduces the artifacts.
    pub argv: Vec<String>,
    pub seed: u64,
    pub durations_ms: BTreeMap<&'static str, f64>,
    pub artifact_paths: Vec<String>,
    pub warnings: Vec<String>,
    pub versions: BTreeMap<&'static str, &'static str>,
}

/// Raw string values of every argument of `cmd` present in `matches`.
pub fn echo(cmd: &Command, matches: &ArgMatches) -> Map<String, Value> {
    let mut config = Map::new();
    for id in matches.ids() {
        let id = id.as_str();
        if !cmd.get_arguments().any(|a| a.get_id() == id) {
            continue;
        }
        let Some(raw) = matches.get_raw(id) else {
            continue;
        };
        let values: Vec<Value> = raw.map(|v| Value::String(v.to_string_lossy().into_owned())).collect();
        let value = match <[Value; 1]>::try_from(values) {
            Ok([single]) => single,
            Err(many) => Value::Array(many),
        };
        config.insert(id.to_owned(), value);
    }
    config
}

pub fn argv_strings(argv: &[OsString]) -> Vec<String> {
    argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect()
}

pub fn versions() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([("loewner", env!("CARGO_PKG_VERSION"))])
}
