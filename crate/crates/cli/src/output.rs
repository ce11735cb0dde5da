use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Result;
use serde_json::{json, Value};

use crate::commands::Outcome;
use crate::config::RunConfig;
use crate::Format;

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

pub fn envelope(cfg: &RunConfig, out: &Outcome) -> Value {
    let mut v = json!({
        "schema": SCHEMA_VERSION,
        "command": cfg.command,
        "config": cfg,
        "status": if out.passed { "ok" } else { "failed" },
        "result": out.result,
    });
    if cfg.timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        v["generated_unix"] = json!(secs);
    }
    v
}

pub fn emit(cfg: &RunConfig, out: &Outcome) -> Result<()> {
    let stdout = std::io::stdout();
    let mut w = stdout.lock();
    match cfg.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &envelope(cfg, out))?;
            writeln!(w)?;
        }
        Format::Csv => w.write_all(out.csv.as_bytes())?,
    }
    Ok(())
}
