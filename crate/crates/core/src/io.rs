//! CSV and JSON files.
//!
//! Datasets are read one point per row with `?` or an empty cell marking a
//! missing coordinate. Lines starting with `#` are comments, which the
//! writers use for provenance headers. Numbers are written in the shortest
//! form that reads back to the same `f64`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::point::{CenterSet, Coord, CoresetEntry, Dataset, WeightedCoreset};

pub const MISSING: &str = "?";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeaderMode {
    /// Treat the first row as a header if any cell is not a number or `?`.
    #[default]
    Auto,
    Yes,
    No,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub header: HeaderMode,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            header: HeaderMode::Auto,
        }
    }
}

fn parse_cell(cell: &str) -> std::result::Result<Coord, String> {
    let t = cell.trim();
    if t.is_empty() || t == MISSING {
        return Ok(None);
    }
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        Ok(_) => Err(format!("non-finite value '{t}'")),
        Err(_) => Err(format!("not a number: '{t}'")),
    }
}

fn format_coord(c: Coord) -> String {
    match c {
        Some(v) => format!("{v}"),
        None => MISSING.to_string(),
    }
}

/// Rows of cells with their 1-based line numbers, header and comments removed.
fn read_records<R: Read>(reader: R, opts: &CsvOptions) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(opts.delimiter)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let cells: Vec<String> = rec.iter().map(str::to_string).collect();
        if cells.len() == 1 && cells[0].is_empty() {
            continue;
        }
        rows.push((line, cells));
    }
    let skip = match opts.header {
        HeaderMode::Yes => true,
        HeaderMode::No => false,
        HeaderMode::Auto => rows
            .first()
            .is_some_and(|(_, cells)| cells.iter().any(|c| parse_cell(c).is_err())),
    };
    if skip && !rows.is_empty() {
        rows.remove(0);
    }
    Ok(rows)
}

fn parse_rows(records: &[(usize, Vec<String>)], first_col: usize) -> Result<Vec<Vec<Coord>>> {
    let width = match records.first() {
        Some((_, cells)) => cells.len(),
        None => return input("file has no data rows"),
    };
    let mut rows = Vec::with_capacity(records.len());
    for (line, cells) in records {
        if cells.len() != width {
            return Err(Error::Parse {
                row: *line,
                column: cells.len().min(width) + 1,
                message: format!("expected {width} columns, found {}", cells.len()),
            });
        }
        let mut row = Vec::with_capacity(width.saturating_sub(first_col));
        for (col, cell) in cells.iter().enumerate().skip(first_col) {
            row.push(parse_cell(cell).map_err(|message| Error::Parse {
                row: *line,
                column: col + 1,
                message,
            })?);
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_dataset<R: Read>(reader: R, opts: &CsvOptions) -> Result<Dataset> {
    let records = read_records(reader, opts)?;
    let rows = parse_rows(&records, 0)?;
    for ((line, _), row) in records.iter().zip(&rows) {
        if row.iter().all(Option::is_none) {
            return Err(Error::Parse {
                row: *line,
                column: 1,
                message: "all coordinates are missing".into(),
            });
        }
    }
    Dataset::from_rows(rows)
}

pub fn read_dataset_file(path: &Path, opts: &CsvOptions) -> Result<Dataset> {
    read_dataset(std::fs::File::open(path)?, opts)
}

fn write_comments<W: Write>(w: &mut W, comments: &[String]) -> Result<()> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    Ok(())
}

fn coord_header(prefix: &str, d: usize) -> Vec<String> {
    (0..d).map(|i| format!("{prefix}{i}")).collect()
}

pub fn write_dataset<W: Write>(mut w: W, data: &Dataset, comments: &[String]) -> Result<()> {
    write_comments(&mut w, comments)?;
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(coord_header("x", data.d()))?;
    for p in data.points() {
        wtr.write_record(p.coords.iter().map(|c| format_coord(*c)))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes `id, weight, x0..` with the source coordinates of each entry.
pub fn write_coreset<W: Write>(
    mut w: W,
    data: &Dataset,
    coreset: &WeightedCoreset,
    comments: &[String],
) -> Result<()> {
    write_comments(&mut w, comments)?;
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["id".to_string(), "weight".to_string()];
    header.extend(coord_header("x", data.d()));
    wtr.write_record(&header)?;
    for e in coreset.entries() {
        let mut rec = vec![e.id.to_string(), format!("{}", e.weight)];
        rec.extend(data.point(e.id).coords.iter().map(|c| format_coord(*c)));
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a coreset written by [`write_coreset`]; only `id` and `weight` are used.
pub fn read_coreset<R: Read>(reader: R, data: &Dataset) -> Result<WeightedCoreset> {
    let opts = CsvOptions {
        header: HeaderMode::Yes,
        ..CsvOptions::default()
    };
    let records = read_records(reader, &opts)?;
    let mut entries = Vec::with_capacity(records.len());
    for (line, cells) in &records {
        if cells.len() < 2 {
            return Err(Error::Parse {
                row: *line,
                column: cells.len() + 1,
                message: "expected id and weight columns".into(),
            });
        }
        let id = cells[0].parse::<usize>().map_err(|_| Error::Parse {
            row: *line,
            column: 1,
            message: format!("not a point id: '{}'", cells[0]),
        })?;
        let weight = match parse_cell(&cells[1]) {
            Ok(Some(v)) => v,
            _ => {
                return Err(Error::Parse {
                    row: *line,
                    column: 2,
                    message: format!("not a weight: '{}'", cells[1]),
                })
            }
        };
        entries.push(CoresetEntry { id, weight });
    }
    WeightedCoreset::new(entries, data)
}

pub fn write_centers<W: Write>(mut w: W, centers: &CenterSet, comments: &[String]) -> Result<()> {
    write_comments(&mut w, comments)?;
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(coord_header("c", centers.d()))?;
    for c in centers.centers() {
        wtr.write_record(c.iter().map(|v| format!("{v}")))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_centers<R: Read>(reader: R, opts: &CsvOptions) -> Result<CenterSet> {
    let records = read_records(reader, opts)?;
    let rows = parse_rows(&records, 0)?;
    CenterSet::from_rows(rows)
}

pub fn write_scores<W: Write>(mut w: W, sigma: &[f64], comments: &[String]) -> Result<()> {
    write_comments(&mut w, comments)?;
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["id", "sigma"])?;
    for (id, s) in sigma.iter().enumerate() {
        wtr.write_record([id.to_string(), format!("{s}")])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes `id, cluster` rows.
pub fn write_assignment<W: Write>(
    mut w: W,
    ids: &[usize],
    clusters: &[usize],
    comments: &[String],
) -> Result<()> {
    if ids.len() != clusters.len() {
        return Err(Error::Dimension {
            expected: ids.len(),
            got: clusters.len(),
        });
    }
    write_comments(&mut w, comments)?;
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["id", "cluster"])?;
    for (id, c) in ids.iter().zip(clusters) {
        wtr.write_record([id.to_string(), c.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}
