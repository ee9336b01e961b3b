//! Factor analysis for interval-valued data.
//!
//! Observations are intervals `[lower, upper]` (optionally with a mode)
//! instead of points, interpreted through a within-interval distribution:
//! uniform, symmetric triangular, or triangular with an explicit mode. On top
//! of that representation the crate provides:
//!
//! - symbolic descriptive statistics: means, variances and three covariance
//!   definitions, plus the correlation matrices built from them ([`stats`]);
//! - squared Mallows (2-Wasserstein) distances between the quantile functions
//!   of interval-valued observations, in closed form where available and by
//!   Gauss–Legendre quadrature otherwise ([`mallows`]);
//! - principal-component and principal-axis factor extraction from a symbolic
//!   correlation matrix ([`factor`]);
//! - interval-valued factor scores fitted by bounded optimization, with a
//!   Bartlett-style weighted criterion and an Anderson–Rubin-style
//!   decorrelated variant ([`scores`]);
//! - a block-structured synthetic dataset generator for factor-count
//!   experiments ([`synth`]);
//! - CSV/JSON/SVG front-end used by the `intervalfa` binary ([`cli`]).
//!
//! ```
//! use intervalfa::interval::{Dataset, Interval, Model};
//! use intervalfa::stats::{summarize, CovDef};
//!
//! let data = Dataset::new(
//!     vec!["A".into(), "B".into()],
//!     vec![
//!         vec![Interval::new(0.0, 2.0)?, Interval::new(1.0, 5.0)?],
//!         vec![Interval::new(2.0, 6.0)?, Interval::new(4.0, 8.0)?],
//!     ],
//! )?;
//! let summary = summarize(&data, Model::Uniform, CovDef::Cov3)?;
//! assert!((summary.means[0] - 2.5).abs() < 1e-12);
//! # Ok::<(), intervalfa::error::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod factor;
pub mod interval;
pub mod io;
pub mod mallows;
pub mod optim;
pub mod plot;
pub mod quad;
pub mod report;
pub mod scores;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use factor::{Extraction, FactorModel};
pub use interval::{Dataset, Interval, Model};
pub use mallows::PiecewiseQuantile;
pub use stats::{CovDef, Summary};
