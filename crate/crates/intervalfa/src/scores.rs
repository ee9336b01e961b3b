//! Interval-valued factor scores. Each unit's scores are intervals (with a
//! mode position under the triangular model) fitted by bounded local
//! minimization of a weighted Mallows criterion:
//!
//! - [`estimate_bartlett`] minimizes, independently per unit, the sum over
//!   variables of D²(Ψ_Zj, Ψ_CLj)/S²_εj, where Ψ_CLj is the linear
//!   combination of the factor quantile functions weighted by the loadings;
//! - [`estimate_anderson_rubin`] additionally drives the pairwise score
//!   correlations to zero through a quadratic penalty, optimizing all units
//!   jointly by block-coordinate descent with random restarts.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::factor::FactorModel;
use crate::interval::{Dataset, Interval, Model};
use crate::mallows::{combine, lift, mallows_sq_with_rule, PiecewiseQuantile};
use crate::optim::{nelder_mead, NmConfig};
use crate::quad::GaussLegendre;
use crate::stats::{summarize, CovDef};

/// Quadrature nodes per segment used when no configuration is supplied.
pub const DEFAULT_NODES: usize = 32;
/// Specific variances below this floor are rejected; the extraction step
/// guarantees it.
const SPECIFIC_VARIANCE_FLOOR: f64 = 1e-6;
/// Off-diagonal score correlations at or below this magnitude count as
/// uncorrelated.
const CORR_BOUND: f64 = 0.01;
/// Cap on block-coordinate passes per Anderson–Rubin restart.
const MAX_PASSES: usize = 60;
/// Standard deviation of the Gaussian restart perturbation.
const PERTURB_SD: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScoreMethod {
    Bartlett,
    AndersonRubin,
}

impl ScoreMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScoreMethod::Bartlett => "bartlett",
            ScoreMethod::AndersonRubin => "anderson-rubin",
        }
    }
}

impl std::str::FromStr for ScoreMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bartlett" => Ok(ScoreMethod::Bartlett),
            "anderson-rubin" => Ok(ScoreMethod::AndersonRubin),
            other => Err(Error::domain(format!(
                "unknown score method {other:?}; expected bartlett or anderson-rubin"
            ))),
        }
    }
}

/// One factor score: an interval through its center and half-range, plus the
/// relative mode position used by the triangular model
/// (mode = center − half_range + 2·half_range·mode_pos).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreParams {
    pub center: f64,
    /// ≥ 0.
    pub half_range: f64,
    /// In [0, 1]; ignored outside the triangular model.
    pub mode_pos: f64,
}

impl ScoreParams {
    pub fn new(center: f64, half_range: f64, mode_pos: f64) -> Result<Self> {
        if !(center.is_finite() && half_range.is_finite() && mode_pos.is_finite()) {
            return Err(Error::domain("score parameters must be finite"));
        }
        if half_range < 0.0 {
            return Err(Error::domain(format!("negative half-range {half_range}")));
        }
        if !(0.0..=1.0).contains(&mode_pos) {
            return Err(Error::domain(format!("mode position {mode_pos} outside [0, 1]")));
        }
        Ok(Self { center, half_range, mode_pos })
    }

    pub fn mode(&self) -> f64 {
        let lower = self.center - self.half_range;
        let upper = self.center + self.half_range;
        (lower + 2.0 * self.half_range * self.mode_pos).clamp(lower, upper)
    }

    /// The interval observation these parameters describe; the mode is
    /// attached only under the triangular model.
    pub fn interval(&self, model: Model) -> Interval {
        let lower = self.center - self.half_range;
        let upper = self.center + self.half_range;
        match model {
            Model::Triangular => Interval::with_mode(lower, self.mode(), upper)
                .expect("score parameters reconstruct a valid interval"),
            _ => Interval::new(lower, upper).expect("score parameters reconstruct a valid interval"),
        }
    }
}

/// Optimizer configuration for score estimation.
#[derive(Clone, Copy, Debug)]
pub struct OptConfig {
    /// Local-minimizer iteration cap per unit block.
    pub max_iter: usize,
    /// Relative objective-change tolerance.
    pub tol: f64,
    /// Random restarts for Anderson–Rubin, beyond the unperturbed start.
    pub restarts: usize,
    /// Correlation-penalty multiplier; `None` means 10⁴·n.
    pub penalty: Option<f64>,
    /// Seed for the restart perturbations.
    pub seed: u64,
    /// Quadrature nodes per segment for the triangular models.
    pub nodes: usize,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self { max_iter: 500, tol: 1e-8, restarts: 20, penalty: None, seed: 0, nodes: DEFAULT_NODES }
    }
}

fn validate_cfg(cfg: &OptConfig) -> Result<()> {
    if cfg.max_iter == 0 {
        return Err(Error::domain("max_iter must be positive"));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::domain("tol must be positive"));
    }
    if cfg.nodes < 2 {
        return Err(Error::domain("quadrature needs at least 2 nodes"));
    }
    if let Some(p) = cfg.penalty {
        if !(p > 0.0) {
            return Err(Error::domain("penalty must be positive"));
        }
    }
    Ok(())
}

/// A full set of estimated factor scores.
#[derive(Clone, Debug)]
pub struct FactorScores {
    pub model: Model,
    pub method: ScoreMethod,
    /// n rows × m factors.
    pub grid: Vec<Vec<ScoreParams>>,
    /// Final minimized objective: the distance term, plus the correlation
    /// penalty for Anderson–Rubin.
    pub objective: f64,
    /// Sum over units of the weighted Mallows distances alone.
    pub distance: f64,
    /// Per-unit local-minimizer convergence flags.
    pub unit_converged: Vec<bool>,
    /// Bartlett: all units converged. Anderson–Rubin: the correlation bound
    /// was met.
    pub converged: bool,
    /// Largest |off-diagonal| of [`score_correlations`], where computed.
    pub max_abs_corr: Option<f64>,
}

impl FactorScores {
    pub fn n(&self) -> usize {
        self.grid.len()
    }

    pub fn m(&self) -> usize {
        self.grid.first().map_or(0, Vec::len)
    }

    /// The scores as an interval dataset with variables f1..fm.
    pub fn to_dataset(&self) -> Result<Dataset> {
        let m = self.m();
        let names = (1..=m).map(|k| format!("f{k}")).collect();
        let rows = self
            .grid
            .iter()
            .map(|row| row.iter().map(|p| p.interval(self.model)).collect())
            .collect();
        Dataset::new(names, rows)
    }
}

/// Correlation matrix of the estimated scores, treated as interval data under
/// the scores' own model.
pub fn score_correlations(scores: &FactorScores) -> Result<DMatrix<f64>> {
    if scores.n() < 2 {
        return Err(Error::domain("score correlations need at least two units"));
    }
    Ok(summarize(&scores.to_dataset()?, scores.model, CovDef::Cov3)?.correlation)
}

fn max_off_diagonal(corr: &DMatrix<f64>) -> f64 {
    let m = corr.nrows();
    let mut worst = 0.0f64;
    for k in 0..m {
        for l in (k + 1)..m {
            worst = worst.max(corr[(k, l)].abs());
        }
    }
    worst
}

fn vars_per_factor(model: Model) -> usize {
    match model {
        Model::Triangular => 3,
        _ => 2,
    }
}

/// Fixed starting point per factor: the unit interval for the uniform model,
/// the triangular law on [0, 2] with central mode otherwise.
fn start_params(model: Model) -> ScoreParams {
    match model {
        Model::Uniform => ScoreParams { center: 0.5, half_range: 0.5, mode_pos: 0.5 },
        _ => ScoreParams { center: 1.0, half_range: 1.0, mode_pos: 0.5 },
    }
}

fn pack(row: &[ScoreParams], model: Model) -> Vec<f64> {
    let vpf = vars_per_factor(model);
    let mut x = Vec::with_capacity(row.len() * vpf);
    for p in row {
        x.push(p.center);
        x.push(p.half_range);
        if vpf == 3 {
            x.push(p.mode_pos);
        }
    }
    x
}

fn unpack(x: &[f64], model: Model) -> Vec<ScoreParams> {
    let vpf = vars_per_factor(model);
    x.chunks(vpf)
        .map(|c| ScoreParams {
            center: c[0],
            half_range: c[1],
            mode_pos: if vpf == 3 { c[2] } else { 0.5 },
        })
        .collect()
}

fn factor_interval(x: &[f64], k: usize, model: Model) -> Interval {
    let vpf = vars_per_factor(model);
    let p = ScoreParams {
        center: x[k * vpf],
        half_range: x[k * vpf + 1],
        mode_pos: if vpf == 3 { x[k * vpf + 2] } else { 0.5 },
    };
    p.interval(model)
}

/// Everything fixed across units: loadings, weights and the quadrature rule.
struct Problem {
    model: Model,
    load_rows: Vec<Vec<f64>>,
    abs_rows: Vec<Vec<f64>>,
    weights: Vec<f64>,
    rule: GaussLegendre,
    m: usize,
}

/// Per-unit precomputation: plain centers/half-ranges for the uniform closed
/// form, lifted quantile functions otherwise.
enum UnitCache {
    Uniform(Vec<(f64, f64)>),
    Lifted(Vec<PiecewiseQuantile>),
}

impl Problem {
    fn new(
        model: Model,
        loadings: &DMatrix<f64>,
        specific_variances: &[f64],
        nodes: usize,
    ) -> Result<Self> {
        let (p, m) = (loadings.nrows(), loadings.ncols());
        if m == 0 {
            return Err(Error::domain("score estimation needs at least one factor"));
        }
        if specific_variances.len() != p {
            return Err(Error::domain(format!(
                "{} specific variances for {p} variables",
                specific_variances.len()
            )));
        }
        if loadings.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric("non-finite loading"));
        }
        let mut weights = Vec::with_capacity(p);
        for (j, &s) in specific_variances.iter().enumerate() {
            if !(s >= SPECIFIC_VARIANCE_FLOOR * (1.0 - 1e-9)) {
                return Err(Error::domain(format!(
                    "specific variance {s} of variable {j} is below the floor {SPECIFIC_VARIANCE_FLOOR}"
                )));
            }
            weights.push(1.0 / s);
        }
        let load_rows: Vec<Vec<f64>> =
            (0..p).map(|j| loadings.row(j).iter().copied().collect()).collect();
        let abs_rows: Vec<Vec<f64>> =
            load_rows.iter().map(|row| row.iter().map(|v| v.abs()).collect()).collect();
        Ok(Self { model, load_rows, abs_rows, weights, rule: GaussLegendre::new(nodes), m })
    }

    fn p(&self) -> usize {
        self.load_rows.len()
    }

    fn cache_row(&self, row: &[Interval]) -> Result<UnitCache> {
        Ok(match self.model {
            Model::Uniform => {
                UnitCache::Uniform(row.iter().map(|z| (z.center(), z.half_range())).collect())
            }
            _ => UnitCache::Lifted(
                row.iter().map(|z| lift(z, self.model)).collect::<Result<_>>()?,
            ),
        })
    }

    /// Weighted sum over variables of the squared Mallows distance between
    /// the observed quantile and the loading combination of the candidate
    /// factor quantiles (packed in `x`).
    fn distance(&self, cache: &UnitCache, x: &[f64]) -> f64 {
        match cache {
            UnitCache::Uniform(cells) => {
                let mut acc = 0.0;
                for j in 0..self.p() {
                    let mut c_cl = 0.0;
                    let mut r_cl = 0.0;
                    for k in 0..self.m {
                        c_cl += self.load_rows[j][k] * x[2 * k];
                        r_cl += self.abs_rows[j][k] * x[2 * k + 1];
                    }
                    let dc = cells[j].0 - c_cl;
                    let dr = cells[j].1 - r_cl;
                    acc += (dc * dc + dr * dr / 3.0) * self.weights[j];
                }
                acc
            }
            UnitCache::Lifted(zs) => {
                let parts: Vec<PiecewiseQuantile> = (0..self.m)
                    .map(|k| {
                        lift(&factor_interval(x, k, self.model), self.model)
                            .expect("factor intervals always carry a valid mode")
                    })
                    .collect();
                let mut acc = 0.0;
                for j in 0..self.p() {
                    let cl = combine(&self.load_rows[j], &parts)
                        .expect("loading rows match the factor count");
                    acc += mallows_sq_with_rule(&zs[j], &cl, &self.rule) * self.weights[j];
                }
                acc
            }
        }
    }

    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let vpf = vars_per_factor(self.model);
        let mut lower = Vec::with_capacity(self.m * vpf);
        let mut upper = Vec::with_capacity(self.m * vpf);
        for _ in 0..self.m {
            lower.push(f64::NEG_INFINITY);
            upper.push(f64::INFINITY);
            lower.push(0.0);
            upper.push(f64::INFINITY);
            if vpf == 3 {
                lower.push(0.0);
                upper.push(1.0);
            }
        }
        (lower, upper)
    }
}

/// The per-unit weighted-distance criterion at the given parameters.
pub fn unit_objective(
    unit_row: &[Interval],
    params: &[ScoreParams],
    loadings: &DMatrix<f64>,
    specific_variances: &[f64],
    model: Model,
) -> Result<f64> {
    if unit_row.len() != loadings.nrows() {
        return Err(Error::domain(format!(
            "unit has {} variables but loadings have {} rows",
            unit_row.len(),
            loadings.nrows()
        )));
    }
    if params.len() != loadings.ncols() {
        return Err(Error::domain(format!(
            "{} parameter blocks for {} factors",
            params.len(),
            loadings.ncols()
        )));
    }
    for p in params {
        ScoreParams::new(p.center, p.half_range, p.mode_pos)?;
    }
    let problem = Problem::new(model, loadings, specific_variances, DEFAULT_NODES)?;
    let cache = problem.cache_row(unit_row)?;
    Ok(problem.distance(&cache, &pack(params, model)))
}

fn nm_config(cfg: &OptConfig) -> NmConfig {
    NmConfig { max_iter: cfg.max_iter, ftol: cfg.tol, xtol: 1e-9 }
}

/// Bartlett-style scores: each unit's parameters minimize its weighted
/// distance criterion independently, starting from the fixed model-specific
/// point. Deterministic; the configured seed is not consumed.
pub fn estimate_bartlett(
    data_std: &Dataset,
    factor_model: &FactorModel,
    model: Model,
    cfg: &OptConfig,
) -> Result<FactorScores> {
    validate_cfg(cfg)?;
    data_std.check_model(model)?;
    if factor_model.loadings.nrows() != data_std.p() {
        return Err(Error::domain(format!(
            "loadings describe {} variables but the data has {}",
            factor_model.loadings.nrows(),
            data_std.p()
        )));
    }
    let problem =
        Problem::new(model, &factor_model.loadings, &factor_model.specific_variances, cfg.nodes)?;
    let (lower, upper) = problem.bounds();
    let start = pack(&vec![start_params(model); problem.m], model);
    let nm = nm_config(cfg);

    let mut grid = Vec::with_capacity(data_std.n());
    let mut unit_converged = Vec::with_capacity(data_std.n());
    let mut distance = 0.0;
    for i in 0..data_std.n() {
        let cache = problem.cache_row(data_std.row(i))?;
        let objective = |x: &[f64]| problem.distance(&cache, x);
        let first = nelder_mead(objective, &start, &lower, &upper, &nm);
        // One fresh simplex at the found point polishes boundary solutions
        // (half-ranges at 0) that the first simplex approaches obliquely.
        let second = nelder_mead(objective, &first.x, &lower, &upper, &nm);
        let best = if second.value <= first.value { second } else { first };
        distance += best.value;
        unit_converged.push(best.converged);
        grid.push(unpack(&best.x, model));
    }
    let converged = unit_converged.iter().all(|&c| c);
    Ok(FactorScores {
        model,
        method: ScoreMethod::Bartlett,
        grid,
        objective: distance,
        distance,
        unit_converged,
        converged,
        max_abs_corr: None,
    })
}

/// Running sums of per-unit score moments, enough to rebuild the pairwise
/// score correlations in O(m²) when one unit's block changes.
struct MomentSums {
    m: usize,
    /// Σ_i μ_ik.
    s: Vec<f64>,
    /// Σ_i μ_ik μ_il, row-major m×m.
    p: Vec<f64>,
    /// Σ_i σ_ik σ_il, row-major m×m.
    w: Vec<f64>,
}

fn row_moments(row: &[ScoreParams], model: Model) -> Vec<(f64, f64)> {
    row.iter()
        .map(|p| {
            let (mu, var) = p
                .interval(model)
                .moments(model)
                .expect("score intervals always carry a valid mode");
            (mu, var.sqrt())
        })
        .collect()
}

impl MomentSums {
    fn from_grid(grid: &[Vec<ScoreParams>], model: Model) -> Self {
        let m = grid.first().map_or(0, Vec::len);
        let mut sums = Self { m, s: vec![0.0; m], p: vec![0.0; m * m], w: vec![0.0; m * m] };
        for row in grid {
            sums.update(&row_moments(row, model), 1.0);
        }
        sums
    }

    fn update(&mut self, moments: &[(f64, f64)], sign: f64) {
        for k in 0..self.m {
            self.s[k] += sign * moments[k].0;
            for l in 0..self.m {
                self.p[k * self.m + l] += sign * moments[k].0 * moments[l].0;
                self.w[k * self.m + l] += sign * moments[k].1 * moments[l].1;
            }
        }
    }

    /// Σ_{k<l} Corr(f_k, f_l)² when the sums plus one extra unit's moments
    /// cover n units. Passing zero moments scores the sums as they stand.
    fn penalty(&self, extra: &[(f64, f64)], n: usize) -> f64 {
        let nf = n as f64;
        let m = self.m;
        let mut means = vec![0.0; m];
        let mut vars = vec![0.0; m];
        for k in 0..m {
            means[k] = (self.s[k] + extra[k].0) / nf;
            let p_kk = self.p[k * m + k] + extra[k].0 * extra[k].0;
            let w_kk = self.w[k * m + k] + extra[k].1 * extra[k].1;
            vars[k] = (w_kk / nf + p_kk / nf - means[k] * means[k]).max(1e-12);
        }
        let mut acc = 0.0;
        for k in 0..m {
            for l in (k + 1)..m {
                let p_kl = self.p[k * m + l] + extra[k].0 * extra[l].0;
                let w_kl = self.w[k * m + l] + extra[k].1 * extra[l].1;
                let cov = w_kl / nf + p_kl / nf - means[k] * means[l];
                let corr = cov / (vars[k] * vars[l]).sqrt();
                acc += corr * corr;
            }
        }
        acc
    }
}

struct RunOutput {
    grid: Vec<Vec<ScoreParams>>,
    distance: f64,
    objective: f64,
    unit_converged: Vec<bool>,
}

/// Block-coordinate descent over units on distance + penalty·Σ corr².
fn penalized_descent(
    problem: &Problem,
    caches: &[UnitCache],
    mut grid: Vec<Vec<ScoreParams>>,
    penalty: f64,
    cfg: &OptConfig,
) -> RunOutput {
    let n = grid.len();
    let model = problem.model;
    let (lower, upper) = problem.bounds();
    let nm = nm_config(cfg);
    let mut dists: Vec<f64> =
        (0..n).map(|i| problem.distance(&caches[i], &pack(&grid[i], model))).collect();
    let mut unit_converged = vec![true; n];
    let zero_extra = vec![(0.0, 0.0); problem.m];

    let mut prev_total = f64::INFINITY;
    let mut total = prev_total;
    for _pass in 0..MAX_PASSES {
        // Fresh sums each pass so incremental updates cannot drift.
        let mut sums = MomentSums::from_grid(&grid, model);
        for i in 0..n {
            sums.update(&row_moments(&grid[i], model), -1.0);
            let x0 = pack(&grid[i], model);
            let res = nelder_mead(
                |x| {
                    let extra: Vec<(f64, f64)> = (0..problem.m)
                        .map(|k| {
                            let (mu, var) = factor_interval(x, k, model)
                                .moments(model)
                                .expect("factor intervals always carry a valid mode");
                            (mu, var.sqrt())
                        })
                        .collect();
                    problem.distance(&caches[i], x) + penalty * sums.penalty(&extra, n)
                },
                &x0,
                &lower,
                &upper,
                &nm,
            );
            grid[i] = unpack(&res.x, model);
            dists[i] = problem.distance(&caches[i], &res.x);
            unit_converged[i] = res.converged;
            sums.update(&row_moments(&grid[i], model), 1.0);
        }
        total = dists.iter().sum::<f64>() + penalty * sums.penalty(&zero_extra, n);
        if prev_total - total < cfg.tol * (1.0 + total.abs()) {
            break;
        }
        prev_total = total;
    }
    RunOutput { grid, distance: dists.iter().sum(), objective: total, unit_converged }
}

/// Anderson–Rubin-style scores: the Bartlett solution refined so the pairwise
/// score correlations vanish, via a penalized joint optimization restarted
/// from randomly perturbed copies of the Bartlett solution. The best restart
/// by final objective wins; ties keep the earliest.
pub fn estimate_anderson_rubin(
    data_std: &Dataset,
    factor_model: &FactorModel,
    model: Model,
    cfg: &OptConfig,
) -> Result<FactorScores> {
    let bartlett = estimate_bartlett(data_std, factor_model, model, cfg)?;
    if bartlett.m() == 1 {
        // No pairs to decorrelate: the Bartlett solution is already optimal.
        return Ok(FactorScores {
            method: ScoreMethod::AndersonRubin,
            max_abs_corr: Some(0.0),
            ..bartlett
        });
    }
    if data_std.n() < 2 {
        return Err(Error::domain("anderson-rubin scores need at least two units"));
    }
    let problem =
        Problem::new(model, &factor_model.loadings, &factor_model.specific_variances, cfg.nodes)?;
    let caches: Vec<UnitCache> =
        (0..data_std.n()).map(|i| problem.cache_row(data_std.row(i))).collect::<Result<_>>()?;
    let penalty = cfg.penalty.unwrap_or(1e4 * data_std.n() as f64);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = Normal::new(0.0, PERTURB_SD).expect("valid normal parameters");
    let mut best: Option<RunOutput> = None;
    for restart in 0..=cfg.restarts {
        let mut start_grid = bartlett.grid.clone();
        if restart > 0 {
            for row in &mut start_grid {
                for p in row {
                    p.center += noise.sample(&mut rng);
                    p.half_range = (p.half_range + noise.sample(&mut rng)).max(0.0);
                }
            }
        }
        let run = penalized_descent(&problem, &caches, start_grid, penalty, cfg);
        if best.as_ref().is_none_or(|b| run.objective < b.objective) {
            best = Some(run);
        }
    }
    let run = best.expect("at least the unperturbed start ran");

    let mut scores = FactorScores {
        model,
        method: ScoreMethod::AndersonRubin,
        grid: run.grid,
        objective: run.objective,
        distance: run.distance,
        unit_converged: run.unit_converged,
        converged: false,
        max_abs_corr: None,
    };
    if let Ok(corr) = score_correlations(&scores) {
        let worst = max_off_diagonal(&corr);
        scores.max_abs_corr = Some(worst);
        scores.converged = worst <= CORR_BOUND;
    }
    Ok(scores)
}
