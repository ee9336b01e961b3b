//! Interval observations, within-interval distribution models, quantile
//! functions, per-observation moments and dataset standardization.

use crate::error::{Error, Result};

/// The probability law assumed over values inside each observed interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    /// Flat density over the interval.
    Uniform,
    /// Triangular density with the peak pinned at the interval center; usable
    /// on data without stored modes.
    SymmetricTriangular,
    /// Triangular density with a free peak; every observation must carry a
    /// mode.
    Triangular,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Uniform => "uniform",
            Model::SymmetricTriangular => "symtri",
            Model::Triangular => "tri",
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Model::Uniform),
            "symtri" => Ok(Model::SymmetricTriangular),
            "tri" => Ok(Model::Triangular),
            other => Err(Error::domain(format!(
                "unknown model {other:?}; expected uniform, symtri or tri"
            ))),
        }
    }
}

/// One interval-valued observation: bounds plus an optional mode.
///
/// Center and half-range are derived from the bounds on demand so the two
/// views cannot drift apart. Degenerate intervals (lower == upper) are legal
/// everywhere and behave as point values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lower: f64,
    upper: f64,
    mode: Option<f64>,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() {
            return Err(Error::domain(format!(
                "interval bounds must be finite, got [{lower}, {upper}]"
            )));
        }
        if lower > upper {
            return Err(Error::domain(format!(
                "interval lower bound {lower} exceeds upper bound {upper}"
            )));
        }
        Ok(Interval { lower, upper, mode: None })
    }

    pub fn with_mode(lower: f64, mode: f64, upper: f64) -> Result<Self> {
        let mut iv = Interval::new(lower, upper)?;
        if !(mode >= lower && mode <= upper) {
            return Err(Error::domain(format!(
                "mode {mode} lies outside [{lower}, {upper}]"
            )));
        }
        iv.mode = Some(mode);
        Ok(iv)
    }

    /// Zero-width interval at a single point.
    pub fn point(value: f64) -> Self {
        assert!(value.is_finite(), "point value must be finite");
        Interval { lower: value, upper: value, mode: None }
    }

    /// Construction bypass for values already known to satisfy the invariants
    /// (optimizer output, standardization).
    pub(crate) fn raw(lower: f64, upper: f64, mode: Option<f64>) -> Self {
        debug_assert!(lower <= upper);
        debug_assert!(mode.map_or(true, |m| m >= lower && m <= upper));
        Interval { lower, upper, mode }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn mode(&self) -> Option<f64> {
        self.mode
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn half_range(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }

    /// The mode `model` works with: the stored mode under [`Model::Triangular`]
    /// (an error when absent), the center otherwise.
    pub(crate) fn model_mode(&self, model: Model) -> Result<f64> {
        match model {
            Model::Triangular => self.mode.ok_or_else(|| {
                Error::domain("triangular model requires a mode on every observation")
            }),
            _ => Ok(self.center()),
        }
    }

    /// Evaluates the quantile function Ψ⁻¹(t) of the within-interval law.
    ///
    /// Ψ⁻¹(0) is the lower bound, Ψ⁻¹(1) the upper bound, and the function is
    /// non-decreasing in t. A degenerate interval yields its center for all t.
    pub fn quantile(&self, model: Model, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t <= 1.0) {
            return Err(Error::domain(format!("quantile argument t={t} outside [0, 1]")));
        }
        if self.lower == self.upper {
            // Still validate model/mode compatibility.
            self.model_mode(model)?;
            return Ok(self.lower);
        }
        match model {
            Model::Uniform => Ok(self.lower + (self.upper - self.lower) * t),
            Model::SymmetricTriangular => {
                Ok(triangular_quantile(self.lower, self.center(), self.upper, t))
            }
            Model::Triangular => {
                let m = self.model_mode(model)?;
                Ok(triangular_quantile(self.lower, m, self.upper, t))
            }
        }
    }

    /// Mean and variance of the within-interval law.
    pub fn moments(&self, model: Model) -> Result<(f64, f64)> {
        let c = self.center();
        let r = self.half_range();
        match model {
            Model::Uniform => Ok((c, r * r / 3.0)),
            Model::SymmetricTriangular => Ok((c, r * r / 6.0)),
            Model::Triangular => {
                let m = self.model_mode(model)?;
                let d = c - m;
                Ok(((2.0 * c + m) / 3.0, d * d / 18.0 + r * r / 6.0))
            }
        }
    }
}

/// Quantile of the triangular law on [l, u] with mode m, for a non-degenerate
/// interval. The two square-root branches meet at t* = (m−l)/(u−l).
pub(crate) fn triangular_quantile(l: f64, m: f64, u: f64, t: f64) -> f64 {
    let w = u - l;
    let ts = (m - l) / w;
    if t <= ts {
        l + (w * (m - l) * t).sqrt()
    } else {
        u - (w * (u - m) * (1.0 - t)).sqrt()
    }
}

/// A rectangular n×p grid of interval observations with variable names.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    cells: Vec<Interval>, // row-major
    n: usize,
    p: usize,
}

impl Dataset {
    pub fn new(names: Vec<String>, rows: Vec<Vec<Interval>>) -> Result<Self> {
        let p = names.len();
        if p == 0 {
            return Err(Error::domain("dataset needs at least one variable"));
        }
        if rows.is_empty() {
            return Err(Error::domain("dataset needs at least one row"));
        }
        let n = rows.len();
        let mut cells = Vec::with_capacity(n * p);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::domain(format!(
                    "row {} has {} cells, expected {}",
                    i + 1,
                    row.len(),
                    p
                )));
            }
            cells.extend_from_slice(row);
        }
        Ok(Dataset { names, cells, n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cell(&self, i: usize, j: usize) -> &Interval {
        &self.cells[i * self.p + j]
    }

    /// One unit's observations across all variables.
    pub fn row(&self, i: usize) -> &[Interval] {
        &self.cells[i * self.p..(i + 1) * self.p]
    }

    /// One variable's observations across all units (copied; cells are small).
    pub fn column(&self, j: usize) -> Vec<Interval> {
        (0..self.n).map(|i| self.cells[i * self.p + j]).collect()
    }

    /// True when every cell carries a mode.
    pub fn has_modes(&self) -> bool {
        self.cells.iter().all(|c| c.mode.is_some())
    }

    /// Checks that the dataset satisfies `model`'s requirements, naming the
    /// first offending column.
    pub fn check_model(&self, model: Model) -> Result<()> {
        if model == Model::Triangular {
            for j in 0..self.p {
                if (0..self.n).any(|i| self.cell(i, j).mode.is_none()) {
                    return Err(Error::MissingMode { col: self.names[j].clone() });
                }
            }
        }
        Ok(())
    }

    /// Affinely rescales every variable to zero sample mean and unit sample
    /// variance under `model`; bounds and mode map through (x − Ȳ)/S alike, so
    /// the within-interval law transforms as a whole.
    ///
    /// Returns the standardized dataset together with the per-variable means
    /// and standard deviations used.
    pub fn standardize(&self, model: Model) -> Result<(Dataset, Vec<f64>, Vec<f64>)> {
        self.check_model(model)?;
        let mut means = Vec::with_capacity(self.p);
        let mut sds = Vec::with_capacity(self.p);
        for j in 0..self.p {
            let col = self.column(j);
            let mean = crate::stats::sample_mean(&col, model)?;
            let var = crate::stats::sample_variance(&col, model)?;
            if var <= 0.0 {
                return Err(Error::DegenerateVariable { col: self.names[j].clone() });
            }
            means.push(mean);
            sds.push(var.sqrt());
        }
        let mut cells = Vec::with_capacity(self.cells.len());
        for i in 0..self.n {
            for j in 0..self.p {
                let cell = self.cell(i, j);
                let z = |x: f64| (x - means[j]) / sds[j];
                cells.push(Interval::raw(z(cell.lower), z(cell.upper), cell.mode.map(z)));
            }
        }
        let data = Dataset { names: self.names.clone(), cells, n: self.n, p: self.p };
        Ok((data, means, sds))
    }
}
