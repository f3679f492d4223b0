//! Output sinks and number formatting.

use std::io::Write;
use std::path::PathBuf;

/// Directory that relative `--output` paths resolve against.
pub const OUTPUT_DIR_ENV: &str = "MGCP_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_row(cells: impl IntoIterator<Item = String>) -> String {
    let mut s = cells.into_iter().collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}

pub fn resolve_path(path: &str) -> PathBuf {
    let p = PathBuf::from(path);
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
        _ => p,
    }
}

/// Writes `text` to the resolved path, or stdout when no path is given.
pub fn emit(text: &str, output: Option<&str>) -> Result<(), String> {
    match output {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| format!("stdout: {e}"))
        }
        Some(p) => {
            let path = resolve_path(p);
            if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| format!("{}: {e}", parent.display()))?;
            }
            std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))
        }
    }
}

pub fn json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}
