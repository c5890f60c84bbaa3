//! CSV files with typed headers. A leading `<` marks a minimized goal, `>` a
//! maximized goal and `!` the class column; everything else is a feature.
//! An optional `:num` or `:cat` suffix fixes a feature's kind, otherwise it
//! is numeric when every cell parses as a number.

use crate::error::{Error, Result};
use crate::indicators::Front;
use crate::miners::{Column, ColumnKind, Dataset, Role, Value};
use crate::model::Direction;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

struct HeaderField {
    name: String,
    role: Role,
    kind: Option<ColumnKind>,
}

fn parse_header(field: &str) -> Result<HeaderField> {
    let (role, rest) = match field.chars().next() {
        Some('<') => (Role::Goal(Direction::Minimize), &field[1..]),
        Some('>') => (Role::Goal(Direction::Maximize), &field[1..]),
        Some('!') => (Role::Class, &field[1..]),
        _ => (Role::Feature, field),
    };
    let (name, kind) = match rest.rsplit_once(':') {
        Some((name, "num")) => (name, Some(ColumnKind::Numeric)),
        Some((name, "cat")) => (name, Some(ColumnKind::Categorical)),
        Some((_, other)) => return Err(Error::UnknownColumnType(other.to_string())),
        None => (rest, None),
    };
    let kind = match role {
        Role::Goal(_) if kind == Some(ColumnKind::Categorical) => {
            return Err(Error::UnknownColumnType(format!("{field} (goals are numeric)")))
        }
        Role::Goal(_) => Some(ColumnKind::Numeric),
        Role::Class => Some(ColumnKind::Categorical),
        Role::Feature => kind,
    };
    Ok(HeaderField {
        name: name.to_string(),
        role,
        kind,
    })
}

fn header_of(c: &Column) -> String {
    let prefix = match c.role {
        Role::Goal(Direction::Minimize) => "<",
        Role::Goal(Direction::Maximize) => ">",
        Role::Class => "!",
        Role::Feature => "",
    };
    let suffix = match (c.role, c.kind) {
        (Role::Feature, ColumnKind::Categorical) => ":cat",
        (Role::Feature, ColumnKind::Numeric) if c.name.contains(':') => ":num",
        _ => "",
    };
    format!("{prefix}{}{suffix}", c.name)
}

fn read_records<R: Read>(reader: R) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::RaggedRow {
                row: i + 1,
                expected: header.len(),
                found: rec.len(),
            });
        }
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

pub fn read_dataset<R: Read>(reader: R) -> Result<Dataset> {
    let (header, cells) = read_records(reader)?;
    let fields = header.iter().map(|h| parse_header(h)).collect::<Result<Vec<_>>>()?;
    let columns: Vec<Column> = fields
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let kind = f.kind.unwrap_or_else(|| {
                if cells.iter().all(|r| r[j].parse::<f64>().is_ok()) {
                    ColumnKind::Numeric
                } else {
                    ColumnKind::Categorical
                }
            });
            Column {
                name: f.name.clone(),
                kind,
                role: f.role,
            }
        })
        .collect();
    let mut rows = Vec::with_capacity(cells.len());
    for (i, r) in cells.into_iter().enumerate() {
        let row = r
            .into_iter()
            .zip(&columns)
            .map(|(cell, c)| match c.kind {
                ColumnKind::Numeric => cell.parse::<f64>().map(Value::Num).map_err(|_| {
                    Error::invalid(format!("row {}: `{cell}` in numeric column `{}`", i + 1, c.name))
                }),
                ColumnKind::Categorical => Ok(Value::Cat(cell)),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Dataset::new(columns, rows)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    read_dataset(File::open(path)?)
}

pub fn write_dataset<W: Write>(writer: W, data: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(data.columns().iter().map(header_of))?;
    for row in data.rows() {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_dataset(path: impl AsRef<Path>, data: &Dataset) -> Result<()> {
    write_dataset(File::create(path)?, data)
}

/// A front file has only goal columns.
pub fn read_front<R: Read>(reader: R) -> Result<(Vec<String>, Front)> {
    let (header, cells) = read_records(reader)?;
    let mut names = Vec::new();
    let mut directions = Vec::new();
    for h in &header {
        let f = parse_header(h)?;
        match f.role {
            Role::Goal(d) => {
                names.push(f.name);
                directions.push(d);
            }
            _ => return Err(Error::invalid(format!("front column `{h}` is not a goal (`<` or `>`)"))),
        }
    }
    let points = cells
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .map(|c| {
                    c.parse::<f64>()
                        .map_err(|_| Error::invalid(format!("row {}: `{c}` is not a number", i + 1)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((names, Front::new(points, directions)?))
}

pub fn load_front(path: impl AsRef<Path>) -> Result<Front> {
    Ok(read_front(File::open(path)?)?.1)
}

/// Goals are named `names`, or `g1, g2, ...` when absent.
pub fn write_front<W: Write>(writer: W, front: &Front, names: Option<&[String]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let header: Vec<String> = front
        .directions
        .iter()
        .enumerate()
        .map(|(g, d)| {
            let name = names.and_then(|n| n.get(g)).cloned().unwrap_or_else(|| format!("g{}", g + 1));
            let prefix = if *d == Direction::Minimize { '<' } else { '>' };
            format!("{prefix}{name}")
        })
        .collect();
    w.write_record(&header)?;
    for p in &front.points {
        w.write_record(p.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_front(path: impl AsRef<Path>, front: &Front) -> Result<()> {
    write_front(File::create(path)?, front, None)
}
