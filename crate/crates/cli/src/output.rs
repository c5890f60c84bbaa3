use crate::Failure;
use duo::model::Direction;
use duo::pipeline::{parse_formats, ConfigMap, Format};
use std::fs;
use std::io::Write;
use std::path::PathBuf;

/// Where reports go: files under `out`, or stdout in the first format.
pub struct Sink {
    pub out: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl Sink {
    /// With `out` and no `format`, both formats are written.
    pub fn from_map(map: &ConfigMap) -> Result<Self, Failure> {
        let out = map.get("out").map(PathBuf::from);
        let formats = match map.get("format") {
            Some(f) => parse_formats(f)?,
            None if out.is_some() => vec![Format::Csv, Format::Json],
            None => vec![Format::Csv],
        };
        Ok(Sink { out, formats })
    }

    /// `tables` are (file name, CSV bytes); on stdout they are separated by
    /// a blank line. `json` becomes `report.json`.
    pub fn emit(&self, tables: &[(&str, Vec<u8>)], json: &str, wall_secs: &[f64]) -> Result<(), Failure> {
        let io = |e: std::io::Error| Failure::Runtime(e.to_string());
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(io)?;
                for f in &self.formats {
                    match f {
                        Format::Csv => {
                            for (name, bytes) in tables {
                                fs::write(dir.join(name), bytes).map_err(io)?;
                            }
                        }
                        Format::Json => fs::write(dir.join("report.json"), json).map_err(io)?,
                    }
                }
                write_timing(dir, wall_secs)
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                match self.formats[0] {
                    Format::Csv => {
                        for (i, (_, bytes)) in tables.iter().enumerate() {
                            if i > 0 {
                                stdout.write_all(b"\n").map_err(io)?;
                            }
                            stdout.write_all(bytes).map_err(io)?;
                        }
                    }
                    Format::Json => stdout.write_all(json.as_bytes()).map_err(io)?,
                }
                stdout.flush().map_err(io)
            }
        }
    }
}

fn write_timing(dir: &std::path::Path, wall_secs: &[f64]) -> Result<(), Failure> {
    let timing = serde_json::json!({ "wall_secs": wall_secs });
    let text = serde_json::to_string_pretty(&timing).map_err(|e| Failure::Runtime(e.to_string()))? + "\n";
    fs::write(dir.join("timing.json"), text).map_err(|e| Failure::Runtime(e.to_string()))
}

pub fn prefixed(name: &str, d: Direction) -> String {
    let p = if d == Direction::Minimize { '<' } else { '>' };
    format!("{p}{name}")
}

/// CSV bytes from a header and rows of already formatted fields.
pub fn csv_table(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Failure::Runtime(e.to_string());
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    w.into_inner().map_err(|e| Failure::Runtime(e.to_string()))
}

pub fn json_text<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.to_string()))? + "\n")
}
