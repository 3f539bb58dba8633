//! Writers for CSV and JSON results with a trailing metadata block.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use lsign::export::sig17;
use serde::Serialize;
use serde_json::ser::Formatter;

use crate::config::{CliResult, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Compact JSON with floats written to 17 significant digits.
struct Sig17Formatter;

impl Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(sig17(v).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
}

pub fn sink(cfg: &RunConfig) -> CliResult<Box<dyn Write>> {
    Ok(match cfg.output() {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config_hash: String,
    config: std::collections::BTreeMap<&'a str, &'a str>,
}

fn metadata(cfg: &RunConfig) -> Metadata<'_> {
    Metadata {
        tool: "lsign",
        version: VERSION,
        command: &cfg.command,
        config_hash: cfg.hash(),
        config: cfg.hashed_entries().into_iter().collect(),
    }
}

/// Serializes `body` (an object) with a `metadata` field appended.
pub fn write_json<T: Serialize>(cfg: &RunConfig, body: &T) -> CliResult<()> {
    let mut value = serde_json::to_value(body).map_err(io::Error::other)?;
    let meta = serde_json::to_value(metadata(cfg)).map_err(io::Error::other)?;
    match value.as_object_mut() {
        Some(obj) => {
            obj.insert("metadata".into(), meta);
        }
        None => value = serde_json::json!({ "data": value, "metadata": meta }),
    }
    let mut w = sink(cfg)?;
    let mut ser = serde_json::Serializer::with_formatter(&mut w, Sig17Formatter);
    value.serialize(&mut ser).map_err(io::Error::other)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Runs `body` on the output and appends `# key: value` metadata lines.
pub fn write_csv(cfg: &RunConfig, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> CliResult<()> {
    let mut w = sink(cfg)?;
    body(&mut w)?;
    let m = metadata(cfg);
    writeln!(w, "# tool: {} {}", m.tool, m.version)?;
    writeln!(w, "# command: {}", m.command)?;
    writeln!(w, "# config_hash: {}", m.config_hash)?;
    for (k, v) in m.config {
        writeln!(w, "# {k}: {v}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_row(w: &mut dyn Write, cells: &[String]) -> io::Result<()> {
    writeln!(w, "{}", cells.join(","))
}
