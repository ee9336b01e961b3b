//! CSV ingestion and emission.
//!
//! Datasets travel as one header row plus one row per unit. Each variable V
//! occupies either two columns `V.lower,V.upper` or three columns
//! `V.lower,V.mode,V.upper`. Modes are kept only when every variable uses the
//! three-column form. Values are written with Rust's shortest round-trip
//! float formatting, so `read_csv(write_csv(d)) == d` bit for bit.

use std::path::Path;

use csv::{ReaderBuilder, Trim, WriterBuilder};

use crate::error::{Error, Result};
use crate::factor::FactorModel;
use crate::interval::{Dataset, Interval};
use crate::scores::FactorScores;

struct ColumnSpec {
    name: String,
    has_mode: bool,
    start: usize,
}

fn parse_header(headers: &csv::StringRecord) -> Result<Vec<ColumnSpec>> {
    let fields: Vec<&str> = headers.iter().collect();
    if fields.is_empty() {
        return Err(Error::domain("empty header row"));
    }
    let mut specs = Vec::new();
    let mut idx = 0;
    while idx < fields.len() {
        let name = fields[idx].strip_suffix(".lower").ok_or_else(|| {
            Error::domain(format!(
                "header field {:?} should be NAME.lower (variables are NAME.lower,NAME.upper \
                 or NAME.lower,NAME.mode,NAME.upper)",
                fields[idx]
            ))
        })?;
        if name.is_empty() {
            return Err(Error::domain("empty variable name in header"));
        }
        let has_mode = fields.get(idx + 1) == Some(&format!("{name}.mode").as_str());
        let upper_idx = if has_mode { idx + 2 } else { idx + 1 };
        if fields.get(upper_idx) != Some(&format!("{name}.upper").as_str()) {
            return Err(Error::domain(format!(
                "variable {name:?} is missing its {name}.upper column"
            )));
        }
        specs.push(ColumnSpec { name: name.to_string(), has_mode, start: idx });
        idx = upper_idx + 1;
    }
    Ok(specs)
}

fn parse_cell(field: &str, row: usize, col: String) -> Result<f64> {
    let value: f64 = field
        .parse()
        .map_err(|_| Error::Cell { row, col: col.clone(), msg: format!("cannot parse {field:?} as a number") })?;
    if !value.is_finite() {
        return Err(Error::Cell { row, col, msg: format!("non-finite value {field:?}") });
    }
    Ok(value)
}

/// Reads an interval dataset from CSV.
pub fn read_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let mut reader = ReaderBuilder::new().trim(Trim::All).from_path(path.as_ref())?;
    let specs = parse_header(reader.headers()?)?;
    let keep_modes = specs.iter().all(|s| s.has_mode);

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let mut cells = Vec::with_capacity(specs.len());
        for spec in &specs {
            let lower = parse_cell(&record[spec.start], row, format!("{}.lower", spec.name))?;
            let mode = if spec.has_mode {
                Some(parse_cell(&record[spec.start + 1], row, format!("{}.mode", spec.name))?)
            } else {
                None
            };
            let upper_off = if spec.has_mode { 2 } else { 1 };
            let upper =
                parse_cell(&record[spec.start + upper_off], row, format!("{}.upper", spec.name))?;
            if lower > upper {
                return Err(Error::Cell {
                    row,
                    col: format!("{}.upper", spec.name),
                    msg: format!("upper bound {upper} is below lower bound {lower}"),
                });
            }
            if let Some(m) = mode {
                if m < lower || m > upper {
                    return Err(Error::Cell {
                        row,
                        col: format!("{}.mode", spec.name),
                        msg: format!("mode {m} lies outside [{lower}, {upper}]"),
                    });
                }
            }
            let cell = match mode.filter(|_| keep_modes) {
                Some(m) => Interval::with_mode(lower, m, upper)?,
                None => Interval::new(lower, upper)?,
            };
            cells.push(cell);
        }
        rows.push(cells);
    }
    let names = specs.into_iter().map(|s| s.name).collect();
    Dataset::new(names, rows)
}

/// Writes a dataset back to CSV, using the three-column layout when the
/// dataset carries modes.
pub fn write_csv(path: impl AsRef<Path>, data: &Dataset) -> Result<()> {
    let mut writer = WriterBuilder::new().from_path(path.as_ref())?;
    let mut header = Vec::new();
    for name in data.names() {
        header.push(format!("{name}.lower"));
        if data.has_modes() {
            header.push(format!("{name}.mode"));
        }
        header.push(format!("{name}.upper"));
    }
    writer.write_record(&header)?;
    for i in 0..data.n() {
        let mut record = Vec::new();
        for cell in data.row(i) {
            record.push(cell.lower().to_string());
            if data.has_modes() {
                record.push(cell.mode().expect("dataset reports modes").to_string());
            }
            record.push(cell.upper().to_string());
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes the loading matrix: one row per variable, one column per factor,
/// plus the communality.
pub fn write_loadings_csv(path: impl AsRef<Path>, fit: &FactorModel, names: &[String]) -> Result<()> {
    let m = fit.loadings.ncols();
    if names.len() != fit.loadings.nrows() {
        return Err(Error::domain(format!(
            "{} variable names for {} loading rows",
            names.len(),
            fit.loadings.nrows()
        )));
    }
    let mut writer = WriterBuilder::new().from_path(path.as_ref())?;
    let mut header = vec!["variable".to_string()];
    header.extend((1..=m).map(|k| format!("F{k}")));
    header.push("communality".to_string());
    writer.write_record(&header)?;
    for (j, name) in names.iter().enumerate() {
        let mut record = vec![name.clone()];
        record.extend((0..m).map(|k| fit.loadings[(j, k)].to_string()));
        record.push(fit.communalities[j].to_string());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes interval factor scores: one row per unit with lower/mode/upper
/// columns for every factor.
pub fn write_scores_csv(path: impl AsRef<Path>, scores: &FactorScores) -> Result<()> {
    let mut writer = WriterBuilder::new().from_path(path.as_ref())?;
    let mut header = vec!["unit".to_string()];
    for k in 1..=scores.m() {
        header.push(format!("F{k}.lower"));
        header.push(format!("F{k}.mode"));
        header.push(format!("F{k}.upper"));
    }
    writer.write_record(&header)?;
    for (i, unit) in scores.grid.iter().enumerate() {
        let mut record = vec![(i + 1).to_string()];
        for params in unit {
            record.push((params.center - params.half_range).to_string());
            record.push(params.mode().to_string());
            record.push((params.center + params.half_range).to_string());
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
