//! File formats for draws, curves and summaries.
//!
//! CSV outputs start with a `#` comment line carrying the configuration
//! hash and seed; readers skip comment lines.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::posterior::{ComponentDraw, CurveRow, Draw, PosteriorDraws};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    fn comment(&self) -> String {
        format!("# config_hash={} seed={}\n", self.config_hash, self.seed)
    }

    fn parse(line: &str) -> Option<Self> {
        let rest = line.strip_prefix("# ")?;
        let mut hash = None;
        let mut seed = None;
        for part in rest.split_whitespace() {
            if let Some(h) = part.strip_prefix("config_hash=") {
                hash = Some(h.to_string());
            } else if let Some(s) = part.strip_prefix("seed=") {
                seed = s.parse().ok();
            }
        }
        Some(Self {
            config_hash: hash?,
            seed: seed?,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct DrawRow {
    chain: usize,
    index: usize,
    gamma: f64,
    sigma: f64,
    /// JSON list of components, baseline first.
    path: String,
}

pub fn write_draws<W: Write>(mut writer: W, draws: &PosteriorDraws, provenance: &Provenance) -> Result<()> {
    writer
        .write_all(provenance.comment().as_bytes())
        .map_err(|e| Error::io("<draws>", e))?;
    writer
        .write_all(format!("# y_plus={}\n", serde_json::to_string(&draws.y_plus)?).as_bytes())
        .map_err(|e| Error::io("<draws>", e))?;
    let mut w = csv::Writer::from_writer(writer);
    for d in &draws.draws {
        w.serialize(DrawRow {
            chain: d.chain,
            index: d.index,
            gamma: d.baseline().gamma,
            sigma: d.baseline().sigma,
            path: serde_json::to_string(&d.components)?,
        })?;
    }
    w.flush().map_err(|e| Error::io("<draws>", e))?;
    Ok(())
}

pub fn read_draws<R: Read>(reader: R) -> Result<(PosteriorDraws, Option<Provenance>)> {
    let mut buf = BufReader::new(reader);
    let mut provenance = None;
    let mut y_plus = None;
    let mut header = String::new();
    loop {
        let mut line = String::new();
        if buf.read_line(&mut line).map_err(|e| Error::io("<draws>", e))? == 0 {
            break;
        }
        if let Some(p) = Provenance::parse(line.trim_end()) {
            provenance = Some(p);
        } else if let Some(y) = line.trim_end().strip_prefix("# y_plus=") {
            y_plus = Some(serde_json::from_str::<f64>(y)?);
        } else {
            header = line;
            break;
        }
    }
    let y_plus = y_plus.ok_or_else(|| Error::Data {
        line: 0,
        message: "draws file lacks a y_plus line".into(),
    })?;
    let mut r = csv::Reader::from_reader(header.as_bytes().chain(buf));
    let mut draws = Vec::new();
    for row in r.deserialize() {
        let row: DrawRow = row?;
        let components: Vec<ComponentDraw> = serde_json::from_str(&row.path)?;
        if components.is_empty() {
            return Err(Error::Data {
                line: draws.len() + 2,
                message: "draw without components".into(),
            });
        }
        draws.push(Draw {
            chain: row.chain,
            index: row.index,
            components,
        });
    }
    Ok((PosteriorDraws { y_plus, draws }, provenance))
}

pub fn write_curves<W: Write>(mut writer: W, rows: &[CurveRow], provenance: &Provenance) -> Result<()> {
    writer
        .write_all(provenance.comment().as_bytes())
        .map_err(|e| Error::io("<curves>", e))?;
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["grid", "median", "lo", "hi"])?;
    for r in rows {
        w.serialize((r.x, r.median, r.lower, r.upper))?;
    }
    w.flush().map_err(|e| Error::io("<curves>", e))?;
    Ok(())
}

pub fn read_curves<R: Read>(reader: R) -> Result<Vec<CurveRow>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        let (x, median, lower, upper): (f64, f64, f64, f64) = rec?;
        rows.push(CurveRow { x, median, lower, upper });
    }
    Ok(rows)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<W: Write, T: Serialize>(mut writer: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, value)?;
    writer.write_all(b"\n").map_err(|e| Error::io("<json>", e))?;
    Ok(())
}
