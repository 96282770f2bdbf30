//! Readers and writers for the on-disk source formats.
//!
//! * Feature CSV: one row per point, numeric columns only, optional header.
//! * Condensed matrix: first token `n`, then `n(n-1)/2` whitespace-separated
//!   reals in [`condensed_index`](crate::metric::condensed_index) order.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metric::{DistanceSource, Norm};

/// Parsed feature table.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable {
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureTable {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
}

/// Parses feature CSV text. A first record with any non-numeric cell is
/// taken as the header; every later cell must parse as a finite real.
pub fn parse_feature_csv(text: &str, path: Option<&Path>) -> Result<FeatureTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut header = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<Option<f64>> = record
            .iter()
            .map(|cell| cell.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect();
        if parsed.iter().all(Option::is_some) {
            let row: Vec<f64> = parsed.into_iter().flatten().collect();
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(Error::parse(
                        path,
                        format!(
                            "record {} has {} columns, expected {}",
                            line + 1,
                            row.len(),
                            first.len()
                        ),
                    ));
                }
            }
            rows.push(row);
        } else if line == 0 {
            header = Some(record.iter().map(str::to_owned).collect());
        } else {
            let col = parsed.iter().position(Option::is_none).unwrap_or(0);
            return Err(Error::parse(
                path,
                format!(
                    "non-numeric cell {:?} at record {}, column {}",
                    record.get(col).unwrap_or(""),
                    line + 1,
                    col + 1
                ),
            ));
        }
    }
    if rows.is_empty() {
        return Err(Error::parse(path, "no data rows"));
    }
    Ok(FeatureTable { header, rows })
}

pub fn read_feature_csv(path: &Path) -> Result<FeatureTable> {
    let text = fs::read_to_string(path)?;
    parse_feature_csv(&text, Some(path))
}

pub fn write_feature_csv(path: &Path, rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.write_record(row.iter().map(|x| format!("{x}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Parses the condensed matrix text format.
pub fn parse_matrix(text: &str, path: Option<&Path>) -> Result<DistanceSource> {
    let mut tokens = text.split_whitespace();
    let n: usize = tokens
        .next()
        .ok_or_else(|| Error::parse(path, "empty matrix file"))?
        .parse()
        .map_err(|e| Error::parse(path, format!("bad point count: {e}")))?;
    let values = tokens
        .map(|t| {
            t.parse::<f64>()
                .map_err(|e| Error::parse(path, format!("bad value {t:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    DistanceSource::from_condensed(n, values)
}

pub fn read_matrix(path: &Path) -> Result<DistanceSource> {
    let text = fs::read_to_string(path)?;
    parse_matrix(&text, Some(path))
}

/// Writes the condensed matrix format, one row of the upper triangle per line.
pub fn write_matrix(path: &Path, src: &DistanceSource) -> Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    render_matrix(&mut out, src)?;
    out.flush()?;
    Ok(())
}

pub fn render_matrix(out: &mut impl Write, src: &DistanceSource) -> Result<()> {
    let n = src.n();
    writeln!(out, "{n}")?;
    for i in 0..n.saturating_sub(1) {
        let row: Vec<String> = (i + 1..n).map(|j| format!("{}", src.dist(i, j))).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

/// Loads a source from disk: `.csv` files are feature tables under `norm`,
/// anything else is read as a condensed matrix.
pub fn load_source(path: &Path, norm: Norm) -> Result<DistanceSource> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let src = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let table = read_feature_csv(path)?;
        DistanceSource::from_features(&table.rows, norm)?
    } else {
        read_matrix(path)?
    };
    Ok(src.with_name(name))
}
