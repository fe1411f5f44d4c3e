use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::Path;

use dirset::GraphWitness;
use serde::Serialize;
use serde_json::{json, Value};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Clouds at least this large get their graph witness in a separate CSV.
pub const SIDECAR_THRESHOLD: usize = 10_000;

/// A failed command and its exit code: 2 for bad input, 3 for a failed
/// computation or write.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn invalid(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    pub fn internal(e: impl Display) -> Self {
        Failure { code: 3, message: e.to_string() }
    }

    pub fn io(e: std::io::Error) -> Self {
        Failure { code: 3, message: format!("write failed: {e}") }
    }
}

impl From<dirset::Error> for Failure {
    fn from(e: dirset::Error) -> Self {
        Failure {
            code: if e.is_validation() { 2 } else { 3 },
            message: e.to_string(),
        }
    }
}

pub fn write_text(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(Failure::io),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(Failure::io),
    }
}

/// Writes `{tool_version, command, config_echo, result}` as pretty JSON.
/// Keys are sorted and floats use the shortest round-trip form, so equal
/// results give equal bytes.
pub fn write_json(out: Option<&Path>, command: &str, config: Value, result: &impl Serialize) -> Result<(), Failure> {
    let doc = json!({
        "tool_version": TOOL_VERSION,
        "command": command,
        "config_echo": config,
        "result": result,
    });
    let mut text = serde_json::to_string_pretty(&doc).map_err(Failure::internal)?;
    text.push('\n');
    write_text(out, &text)
}

pub fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::invalid(format!("{}: invalid JSON: {e}", path.display())))
}

/// First line of every CSV this tool writes: enough to regenerate the file.
pub fn csv_banner(command: &str, config: &Value) -> String {
    format!("# dirset {TOOL_VERSION} {command} {config}\n")
}

/// Writes base points and values next to `out` and returns the sidecar's
/// file name.
pub fn write_witness_sidecar(out: &Path, witness: &GraphWitness) -> Result<String, Failure> {
    let name = format!(
        "{}.witness.csv",
        out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
    );
    let path = out.with_file_name(&name);
    let base_dim = witness.base_points.first().map_or(0, Vec::len);
    let mut text = csv_banner("classify-witness", &json!({ "pole": witness.pole }));
    let header: Vec<String> = (1..=base_dim).map(|i| format!("b{i}")).chain(["value".into()]).collect();
    text.push_str(&header.join(","));
    text.push('\n');
    for (b, v) in witness.base_points.iter().zip(&witness.values) {
        let row: Vec<String> = b.iter().chain(std::iter::once(v)).map(|x| format!("{x:?}")).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(&path, text).map_err(Failure::io)?;
    Ok(name)
}
