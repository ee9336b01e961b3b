//! The JSON run report: every numeric result of a pipeline run in a stable
//! field order, with floats printed at 17 significant digits so replays are
//! byte-identical. Timings live on the struct for display but are excluded
//! from serialization, since they differ between otherwise identical runs.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::error::Result;
use crate::factor::FactorModel;
use crate::interval::Dataset;
use crate::scores::FactorScores;
use crate::stats::Summary;

/// The resolved flags of a run. Replaying these reproduces the run exactly.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub command: String,
    pub input: Option<String>,
    pub model: String,
    pub covdef: String,
    pub extract: Option<String>,
    pub factors: Option<String>,
    pub scores: String,
    pub seed: Option<u64>,
    pub case: Option<usize>,
    pub n: Option<usize>,
    pub out: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DatasetInfo {
    pub n: usize,
    pub p: usize,
    pub variables: Vec<String>,
    pub has_modes: bool,
}

impl From<&Dataset> for DatasetInfo {
    fn from(data: &Dataset) -> Self {
        Self {
            n: data.n(),
            p: data.p(),
            variables: data.names().to_vec(),
            has_modes: data.has_modes(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SummaryReport {
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub correlation: Vec<Vec<f64>>,
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

impl From<&Summary> for SummaryReport {
    fn from(s: &Summary) -> Self {
        Self {
            means: s.means.clone(),
            variances: s.variances.clone(),
            covariance: matrix_rows(&s.covariance),
            correlation: matrix_rows(&s.correlation),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub method: String,
    pub factors: usize,
    pub kaiser_count: usize,
    pub eigenvalues: Vec<f64>,
    pub loadings: Vec<Vec<f64>>,
    pub communalities: Vec<f64>,
    pub specific_variances: Vec<f64>,
    pub cumulative_explained: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl FitReport {
    pub fn new(fit: &FactorModel, kaiser_count: usize) -> Self {
        Self {
            method: fit.method.as_str().to_string(),
            factors: fit.loadings.ncols(),
            kaiser_count,
            eigenvalues: fit.eigenvalues.clone(),
            loadings: matrix_rows(&fit.loadings),
            communalities: fit.communalities.clone(),
            specific_variances: fit.specific_variances.clone(),
            cumulative_explained: fit.cumulative_explained.clone(),
            iterations: fit.iterations,
            converged: fit.converged,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScoreTriple {
    pub lower: f64,
    pub mode: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScoresReport {
    pub method: String,
    pub objective: f64,
    pub distance: f64,
    pub converged: bool,
    pub max_abs_corr: Option<f64>,
    /// One row per unit, one lower/mode/upper triple per factor.
    pub units: Vec<Vec<ScoreTriple>>,
}

impl From<&FactorScores> for ScoresReport {
    fn from(scores: &FactorScores) -> Self {
        let units = scores
            .grid
            .iter()
            .map(|unit| {
                unit.iter()
                    .map(|p| ScoreTriple {
                        lower: p.center - p.half_range,
                        mode: p.mode(),
                        upper: p.center + p.half_range,
                    })
                    .collect()
            })
            .collect();
        Self {
            method: scores.method.as_str().to_string(),
            objective: scores.objective,
            distance: scores.distance,
            converged: scores.converged,
            max_abs_corr: scores.max_abs_corr,
            units,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub dataset: DatasetInfo,
    pub summary: Option<SummaryReport>,
    pub fit: Option<FitReport>,
    pub scores: Option<ScoresReport>,
    #[serde(skip)]
    pub timings_ms: Vec<(String, f64)>,
}

/// Pretty JSON with every float at 17 significant digits. Non-finite floats
/// serialize as null.
struct SciFormatter<'a> {
    pretty: PrettyFormatter<'a>,
}

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        self.pretty.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        self.pretty.begin_object_key(writer, first)
    }

    fn end_object_key<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty.end_object_key(writer)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        self.pretty.end_object_value(writer)
    }
}

/// Serializes a report to its canonical JSON text.
pub fn to_json(report: &RunReport) -> Result<String> {
    let mut buf = Vec::new();
    let formatter = SciFormatter { pretty: PrettyFormatter::new() };
    let mut ser = Serializer::with_formatter(&mut buf, formatter);
    report
        .serialize(&mut ser)
        .map_err(|e| crate::error::Error::Io(std::io::Error::other(e)))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Writes report.json.
pub fn write_report(path: impl AsRef<Path>, report: &RunReport) -> Result<()> {
    std::fs::write(path.as_ref(), to_json(report)?)?;
    Ok(())
}
