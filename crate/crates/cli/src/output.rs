use std::fs;
use std::path::Path;
use std::time::Duration;

use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use slicer::Error;

use crate::Cli;

/// Result of one subcommand.
pub struct Output {
    pub text: String,
    /// File name used under `--out`.
    pub file_name: &'static str,
    pub exit: u8,
    /// `(path, sha256)` of every input that was read.
    pub inputs: Vec<(String, String)>,
}

impl Output {
    pub fn new(text: String, file_name: &'static str) -> Self {
        Output { text, file_name, exit: 0, inputs: Vec::new() }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    subcommand: &'a str,
    args: Vec<String>,
    seed: u64,
    threads: Option<u32>,
    code_version: &'a str,
    wall_time_ms: f64,
    result_file: &'a str,
    input_sha256: serde_json::Map<String, serde_json::Value>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn subcommand_name(cli: &Cli) -> &'static str {
    use crate::Command::*;
    match cli.command {
        Construct(_) => "construct",
        Decompose(_) => "decompose",
        Verify(_) => "verify",
        Sample(_) => "sample",
        Qfunc(_) => "qfunc",
        Estimate(_) => "estimate",
        Search(_) => "search",
        Sweep(_) => "sweep",
    }
}

pub fn write_artifacts(dir: &Path, cli: &Cli, out: &Output, elapsed: Duration) -> Result<(), Error> {
    let io = |e: std::io::Error| Error::Config(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join(out.file_name), &out.text).map_err(io)?;
    let manifest = Manifest {
        subcommand: subcommand_name(cli),
        args: std::env::args().skip(1).collect(),
        seed: cli.global.seed,
        threads: cli.global.threads,
        code_version: env!("CARGO_PKG_VERSION"),
        wall_time_ms: elapsed.as_secs_f64() * 1e3,
        result_file: out.file_name,
        input_sha256: out.inputs.iter().map(|(k, v)| (k.clone(), json!(v))).collect(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(dir.join("manifest.json"), text + "\n").map_err(io)
}

pub fn report_error(e: &Error) {
    eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
}
