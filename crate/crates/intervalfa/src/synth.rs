//! Synthetic interval datasets with planted block-correlation structure, and
//! the six-case factor-count experiment built on them.
//!
//! Generation recipe per dataset: draw a block-patterned correlation matrix
//! for the centers and one for the half-ranges, Cholesky-mix i.i.d. uniform
//! entry matrices through them, and reassemble interval bounds as
//! [center − half_range, center + half_range].

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::factor::{eigendecompose, kaiser_count, Extraction};
use crate::interval::{Dataset, Interval, Model};
use crate::stats::{summarize, CovDef};

/// Block-correlation pattern: variable blocks with a target within-block
/// correlation range, plus one range for all cross-block entries.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSpec {
    blocks: Vec<(usize, (f64, f64))>,
    cross_range: (f64, f64),
}

impl BlockSpec {
    pub fn new(blocks: Vec<(usize, (f64, f64))>, cross_range: (f64, f64)) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::domain("block spec needs at least one block"));
        }
        let check_range = |(lo, hi): (f64, f64), what: &str| -> Result<()> {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi && lo > -1.0 && hi <= 1.0) {
                return Err(Error::domain(format!(
                    "{what} correlation range ({lo}, {hi}) must be ordered within (-1, 1]"
                )));
            }
            Ok(())
        };
        for &(size, range) in &blocks {
            if size == 0 {
                return Err(Error::domain("block sizes must be positive"));
            }
            check_range(range, "within-block")?;
        }
        check_range(cross_range, "cross-block")?;
        Ok(Self { blocks, cross_range })
    }

    /// Total number of variables.
    pub fn p(&self) -> usize {
        self.blocks.iter().map(|b| b.0).sum()
    }

    /// Block index of each variable.
    fn membership(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.p());
        for (idx, &(size, _)) in self.blocks.iter().enumerate() {
            out.extend(std::iter::repeat(idx).take(size));
        }
        out
    }
}

/// How the generator attaches modes to the produced intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModePolicy {
    /// Plain intervals without modes.
    None,
    /// Mode at the interval center.
    Center,
    /// Mode drawn uniformly inside each interval.
    RandomInInterval,
}

/// Configuration of one synthetic dataset.
///
/// The entry distributions are fixed by the generation protocol: center
/// mixing entries are U(a, b) with a ~ U(0, 5) and b ~ U(5, 15) drawn once
/// per dataset, and half-range mixing entries are U(0.1, 1).
#[derive(Clone, Debug)]
pub struct SynthConfig {
    pub n: usize,
    pub centers: BlockSpec,
    pub ranges: BlockSpec,
    pub mode_policy: ModePolicy,
    pub seed: u64,
}

const MAX_REPAIR_ATTEMPTS: usize = 100;
const MIN_EIGENVALUE: f64 = 1e-8;

/// Draws a correlation matrix whose entries fall in the spec's ranges, then
/// repairs it to positive definiteness by clipping negative eigenvalues and
/// re-normalizing the diagonal, repeating as needed.
pub fn generate_block_correlation(spec: &BlockSpec, rng: &mut ChaCha8Rng) -> Result<DMatrix<f64>> {
    let p = spec.p();
    let member = spec.membership();
    let mut r = DMatrix::identity(p, p);
    for j in 0..p {
        for k in (j + 1)..p {
            let (lo, hi) = if member[j] == member[k] {
                spec.blocks[member[j]].1
            } else {
                spec.cross_range
            };
            let v = if lo == hi { lo } else { rng.gen_range(lo..hi) };
            r[(j, k)] = v;
            r[(k, j)] = v;
        }
    }

    for _ in 0..MAX_REPAIR_ATTEMPTS {
        let (values, vectors) = eigendecompose(&r)?;
        if values.iter().all(|&v| v >= MIN_EIGENVALUE) {
            return Ok(r);
        }
        let clipped: Vec<f64> = values.iter().map(|&v| v.max(1e-6)).collect();
        let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(clipped));
        let m = &vectors * lam * vectors.transpose();
        let d: Vec<f64> = (0..p).map(|j| m[(j, j)].sqrt()).collect();
        r = DMatrix::identity(p, p);
        for j in 0..p {
            for k in (j + 1)..p {
                let v = m[(j, k)] / (d[j] * d[k]);
                r[(j, k)] = v;
                r[(k, j)] = v;
            }
        }
    }
    Err(Error::numeric(format!(
        "block correlation spec still indefinite after {MAX_REPAIR_ATTEMPTS} repair attempts"
    )))
}

/// Upper-triangular Cholesky factor U with R = UᵀU and positive diagonal.
pub fn cholesky_upper(r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = r
        .clone()
        .cholesky()
        .ok_or_else(|| Error::numeric("matrix is not positive definite"))?;
    Ok(chol.l().transpose())
}

/// Generates one synthetic interval dataset. Deterministic for a fixed seed.
pub fn generate_dataset(cfg: &SynthConfig) -> Result<Dataset> {
    if cfg.n < 2 {
        return Err(Error::domain("synthetic datasets need at least two units"));
    }
    if cfg.centers.p() != cfg.ranges.p() {
        return Err(Error::domain(format!(
            "center spec has {} variables but range spec has {}",
            cfg.centers.p(),
            cfg.ranges.p()
        )));
    }
    let p = cfg.centers.p();
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let r_c = generate_block_correlation(&cfg.centers, &mut rng)?;
    let r_r = generate_block_correlation(&cfg.ranges, &mut rng)?;
    let u_c = cholesky_upper(&r_c)?;
    let u_r = cholesky_upper(&r_r)?;

    let a = rng.gen_range(0.0..5.0);
    let b = rng.gen_range(5.0..15.0);
    // Entries drawn row-major so the stream layout is part of the contract.
    let mut c_entries = Vec::with_capacity(n * p);
    for _ in 0..n * p {
        c_entries.push(rng.gen_range(a..b));
    }
    let mut r_entries = Vec::with_capacity(n * p);
    for _ in 0..n * p {
        r_entries.push(rng.gen_range(0.1..1.0));
    }
    let centers = DMatrix::from_row_slice(n, p, &c_entries) * u_c;
    // Mixing can push half-ranges negative; the magnitude is kept.
    let half_ranges = (DMatrix::from_row_slice(n, p, &r_entries) * u_r).abs();

    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(p);
        for j in 0..p {
            let c = centers[(i, j)];
            let r = half_ranges[(i, j)];
            let (lower, upper) = (c - r, c + r);
            let cell = match cfg.mode_policy {
                ModePolicy::None => Interval::new(lower, upper)?,
                ModePolicy::Center => Interval::with_mode(lower, c, upper)?,
                ModePolicy::RandomInInterval => {
                    let m = if upper > lower { rng.gen_range(lower..upper) } else { c };
                    Interval::with_mode(lower, m, upper)?
                }
            };
            row.push(cell);
        }
        rows.push(row);
    }
    let names = (1..=p).map(|j| format!("V{j}")).collect();
    Dataset::new(names, rows)
}

/// The six benchmark block structures used by the factor-count experiment.
///
/// | case | blocks (size × within range) | cross range |
/// |------|------------------------------|-------------|
/// | 1 | 10 × (0.8, 0.95) | — |
/// | 2 | 10 × (0.5, 0.8) | — |
/// | 3 | 3 and 7, both (0.8, 0.95) | (0.1, 0.3) |
/// | 4 | 4 and 6, both (0.5, 0.8) | (0.05, 0.25) |
/// | 5 | 3 × (0.85, 0.95) and 7 × (0.5, 0.65) | (0.05, 0.25) |
/// | 6 | 3, 4, 3, all (0.8, 0.95) | (0.05, 0.2) |
pub fn case_spec(case: usize) -> Result<BlockSpec> {
    let high = (0.8, 0.95);
    let moderate = (0.5, 0.8);
    match case {
        1 => BlockSpec::new(vec![(10, high)], (0.0, 0.0)),
        2 => BlockSpec::new(vec![(10, moderate)], (0.0, 0.0)),
        3 => BlockSpec::new(vec![(3, high), (7, high)], (0.1, 0.3)),
        4 => BlockSpec::new(vec![(4, moderate), (6, moderate)], (0.05, 0.25)),
        5 => BlockSpec::new(vec![(3, (0.85, 0.95)), (7, (0.5, 0.65))], (0.05, 0.25)),
        6 => BlockSpec::new(vec![(3, high), (4, high), (3, high)], (0.05, 0.2)),
        other => Err(Error::domain(format!("unknown case {other}; valid cases are 1..=6"))),
    }
}

/// Factor-count histogram of one benchmark case across seeds.
#[derive(Clone, Debug)]
pub struct CaseExperiment {
    pub case: usize,
    pub method: Extraction,
    /// Kaiser count per seed, in seed order.
    pub counts: Vec<usize>,
    /// Most frequent count; ties resolve to the smaller count.
    pub modal_count: usize,
    /// Fraction of seeds agreeing with the modal count.
    pub agreement: f64,
}

/// Runs one benchmark case: per seed, generate a dataset, compute the
/// symbolic correlation matrix, and count eigenvalues above one. Modes are
/// drawn at random inside each interval when the model needs them. The
/// counting step precedes extraction, so the requested method is recorded in
/// the result but does not alter the histogram.
pub fn run_case_experiment(
    case: usize,
    n: usize,
    model: Model,
    method: Extraction,
    seeds: &[u64],
) -> Result<CaseExperiment> {
    if seeds.is_empty() {
        return Err(Error::domain("case experiments need at least one seed"));
    }
    let spec = case_spec(case)?;
    let mode_policy = match model {
        Model::Triangular => ModePolicy::RandomInInterval,
        _ => ModePolicy::None,
    };
    let mut counts = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let cfg = SynthConfig {
            n,
            centers: spec.clone(),
            ranges: spec.clone(),
            mode_policy,
            seed,
        };
        let data = generate_dataset(&cfg)?;
        let summary = summarize(&data, model, CovDef::Cov3)?;
        let (values, _) = eigendecompose(&summary.correlation)?;
        counts.push(kaiser_count(&values));
    }

    let max_count = *counts.iter().max().expect("seeds is non-empty");
    let mut histogram = vec![0usize; max_count + 1];
    for &c in &counts {
        histogram[c] += 1;
    }
    let modal_count = (0..=max_count)
        .max_by_key(|&c| (histogram[c], std::cmp::Reverse(c)))
        .expect("histogram is non-empty");
    let agreement = histogram[modal_count] as f64 / counts.len() as f64;
    Ok(CaseExperiment { case, method, counts, modal_count, agreement })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn block_spec_validation() {
        assert!(BlockSpec::new(vec![], (0.0, 0.1)).is_err());
        assert!(BlockSpec::new(vec![(0, (0.5, 0.8))], (0.0, 0.1)).is_err());
        assert!(BlockSpec::new(vec![(3, (0.8, 0.5))], (0.0, 0.1)).is_err());
        assert!(BlockSpec::new(vec![(3, (-1.0, 0.5))], (0.0, 0.1)).is_err());
        assert!(BlockSpec::new(vec![(3, (0.5, 1.1))], (0.0, 0.1)).is_err());
        let spec = BlockSpec::new(vec![(3, (0.8, 0.95)), (7, (0.5, 0.8))], (0.1, 0.3)).unwrap();
        assert_eq!(spec.p(), 10);
    }

    #[test]
    fn all_ones_block_is_repaired() {
        let spec = BlockSpec::new(vec![(3, (1.0, 1.0))], (0.0, 0.0)).unwrap();
        let r = generate_block_correlation(&spec, &mut rng(1)).unwrap();
        let (values, _) = eigendecompose(&r).unwrap();
        assert!(values.iter().all(|&v| v >= 1e-8), "min eigenvalue {}", values[2]);
        for j in 0..3 {
            assert_eq!(r[(j, j)], 1.0);
            for k in 0..3 {
                if j != k {
                    assert!((r[(j, k)] - 1.0).abs() < 1e-4);
                }
            }
        }
    }

    #[test]
    fn block_pattern_lands_in_the_requested_ranges() {
        let spec = case_spec(3).unwrap();
        let r = generate_block_correlation(&spec, &mut rng(2)).unwrap();
        assert_eq!(r.nrows(), 10);
        for j in 0..10 {
            assert_eq!(r[(j, j)], 1.0);
            for k in 0..10 {
                assert_eq!(r[(j, k)], r[(k, j)]);
                if j == k {
                    continue;
                }
                let same_block = (j < 3) == (k < 3);
                // PSD repair may nudge entries slightly out of range.
                if same_block {
                    assert!((0.75..=1.0).contains(&r[(j, k)]), "within entry {}", r[(j, k)]);
                } else {
                    assert!((0.02..=0.4).contains(&r[(j, k)]), "cross entry {}", r[(j, k)]);
                }
            }
        }
    }

    #[test]
    fn generated_matrices_stay_positive_definite() {
        for case in 1..=6 {
            let spec = case_spec(case).unwrap();
            for seed in 0..8 {
                let r = generate_block_correlation(&spec, &mut rng(seed)).unwrap();
                let (values, _) = eigendecompose(&r).unwrap();
                assert!(
                    values.iter().all(|&v| v >= 1e-8),
                    "case {case} seed {seed}: min eigenvalue {}",
                    values.last().unwrap()
                );
            }
        }
    }

    #[test]
    fn cholesky_examples() {
        let id = DMatrix::<f64>::identity(3, 3);
        assert!((cholesky_upper(&id).unwrap() - &id).abs().max() < 1e-14);

        let r = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let u = cholesky_upper(&r).unwrap();
        assert_relative_eq!(u[(0, 0)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(u[(0, 1)], 0.5, epsilon = 1e-12);
        assert_eq!(u[(1, 0)], 0.0);
        assert_relative_eq!(u[(1, 1)], 0.75f64.sqrt(), epsilon = 1e-12);
        assert!((u.transpose() * &u - &r).abs().max() < 1e-12);

        let spec = case_spec(4).unwrap();
        let r = generate_block_correlation(&spec, &mut rng(3)).unwrap();
        let u = cholesky_upper(&r).unwrap();
        assert!((u.transpose() * &u - &r).abs().max() < 1e-10);
        for j in 0..10 {
            assert!(u[(j, j)] > 0.0);
            for k in 0..j {
                assert_eq!(u[(j, k)], 0.0);
            }
        }

        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 1.2, 1.2, 1.0]);
        assert!(cholesky_upper(&bad).is_err());
    }

    #[test]
    fn single_variable_dataset_uses_raw_draws() {
        let spec = BlockSpec::new(vec![(1, (0.9, 0.95))], (0.0, 0.0)).unwrap();
        let cfg = SynthConfig {
            n: 200,
            centers: spec.clone(),
            ranges: spec,
            mode_policy: ModePolicy::None,
            seed: 4,
        };
        let data = generate_dataset(&cfg).unwrap();
        assert_eq!(data.p(), 1);
        for i in 0..200 {
            let cell = data.cell(i, 0);
            // Centers are U(a,b) with a ∈ (0,5), b ∈ (5,15); half-ranges are
            // |U(0.1,1)| since the mixing matrix is the scalar 1.
            assert!(cell.center() > 0.0 && cell.center() < 15.0);
            assert!(cell.half_range() >= 0.1 && cell.half_range() <= 1.0);
        }
    }

    #[test]
    fn dataset_generation_is_deterministic() {
        let cfg = SynthConfig {
            n: 30,
            centers: case_spec(3).unwrap(),
            ranges: case_spec(3).unwrap(),
            mode_policy: ModePolicy::RandomInInterval,
            seed: 5,
        };
        let a = generate_dataset(&cfg).unwrap();
        let b = generate_dataset(&cfg).unwrap();
        assert_eq!(a, b);
        let other = generate_dataset(&SynthConfig { seed: 6, ..cfg }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn mode_policies() {
        let base = SynthConfig {
            n: 10,
            centers: case_spec(1).unwrap(),
            ranges: case_spec(1).unwrap(),
            mode_policy: ModePolicy::None,
            seed: 7,
        };
        let plain = generate_dataset(&base).unwrap();
        assert!(!plain.has_modes());

        let centered = generate_dataset(&SynthConfig {
            mode_policy: ModePolicy::Center,
            ..base.clone()
        })
        .unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let cell = centered.cell(i, j);
                assert_relative_eq!(cell.mode().unwrap(), cell.center());
            }
        }

        let random = generate_dataset(&SynthConfig {
            mode_policy: ModePolicy::RandomInInterval,
            ..base
        })
        .unwrap();
        assert!(random.has_modes());
        for i in 0..10 {
            for j in 0..10 {
                let cell = random.cell(i, j);
                let m = cell.mode().unwrap();
                assert!(m >= cell.lower() && m <= cell.upper());
            }
        }
    }

    #[test]
    fn case_one_output_is_strongly_correlated() {
        let cfg = SynthConfig {
            n: 100,
            centers: case_spec(1).unwrap(),
            ranges: case_spec(1).unwrap(),
            mode_policy: ModePolicy::None,
            seed: 8,
        };
        let data = generate_dataset(&cfg).unwrap();
        let summary = summarize(&data, Model::Uniform, CovDef::Cov3).unwrap();
        let mut strong = 0;
        let mut pairs = 0;
        for j in 0..10 {
            for k in (j + 1)..10 {
                pairs += 1;
                if summary.correlation[(j, k)] >= 0.5 {
                    strong += 1;
                }
            }
        }
        assert!(
            strong as f64 / pairs as f64 > 0.8,
            "only {strong}/{pairs} correlations at or above 0.5"
        );
    }

    #[test]
    fn case_experiment_smoke() {
        let seeds: Vec<u64> = (0..5).collect();
        let one =
            run_case_experiment(1, 100, Model::Uniform, Extraction::Pcf, &seeds).unwrap();
        assert_eq!(one.modal_count, 1);
        assert_eq!(one.counts.len(), 5);
        assert!(one.agreement >= 0.8);

        let six =
            run_case_experiment(6, 100, Model::Uniform, Extraction::Pcf, &seeds).unwrap();
        assert_eq!(six.modal_count, 3);

        assert!(run_case_experiment(7, 100, Model::Uniform, Extraction::Pcf, &seeds).is_err());
        assert!(run_case_experiment(1, 100, Model::Uniform, Extraction::Pcf, &[]).is_err());
    }

    #[test]
    fn tied_histogram_prefers_the_smaller_count() {
        // Indirect check through the aggregation rule: equal frequencies of
        // 1 and 2 must report 1.
        let counts = [1usize, 2, 1, 2];
        let max_count = *counts.iter().max().unwrap();
        let mut histogram = vec![0usize; max_count + 1];
        for &c in &counts {
            histogram[c] += 1;
        }
        let modal = (0..=max_count)
            .max_by_key(|&c| (histogram[c], std::cmp::Reverse(c)))
            .unwrap();
        assert_eq!(modal, 1);
    }
}
