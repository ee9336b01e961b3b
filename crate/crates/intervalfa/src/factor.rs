//! Factor extraction from a symbolic correlation matrix: eigen-analysis,
//! Kaiser factor counting, principal-component factoring (PCF) and iterative
//! principal-axis factoring (PAF).

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Default tolerance on the communality change between PAF iterations.
pub const PAF_TOL: f64 = 1e-6;
/// Default PAF iteration cap.
pub const PAF_MAX_ITER: usize = 200;
/// Communalities are capped just below 1 so the specific variances stay
/// strictly positive for the downstream Bartlett weights.
const COMMUNALITY_CEIL: f64 = 1.0 - 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extraction {
    Pcf,
    Paf,
}

impl Extraction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Extraction::Pcf => "pcf",
            Extraction::Paf => "paf",
        }
    }
}

impl std::str::FromStr for Extraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pcf" => Ok(Extraction::Pcf),
            "paf" => Ok(Extraction::Paf),
            other => Err(Error::domain(format!(
                "unknown extraction method {other:?}; expected pcf or paf"
            ))),
        }
    }
}

/// A fitted factor solution on p standardized variables with m factors.
#[derive(Clone, Debug)]
pub struct FactorModel {
    pub method: Extraction,
    /// p×m loading matrix.
    pub loadings: DMatrix<f64>,
    /// All p eigenvalues, descending: of the correlation matrix for PCF, of
    /// the final reduced matrix for PAF.
    pub eigenvalues: Vec<f64>,
    /// Row sums of squared loadings, capped just below 1.
    pub communalities: Vec<f64>,
    /// 1 − communality per variable; strictly positive.
    pub specific_variances: Vec<f64>,
    /// Running share of total variance per retained factor, (Σ_{i≤k} λ_i)/p.
    pub cumulative_explained: Vec<f64>,
    /// PAF iterations performed; 0 for PCF.
    pub iterations: usize,
    pub converged: bool,
}

fn check_square_symmetric(r: &DMatrix<f64>) -> Result<usize> {
    if !r.is_square() {
        return Err(Error::domain(format!("matrix must be square, got {}×{}", r.nrows(), r.ncols())));
    }
    let p = r.nrows();
    for j in 0..p {
        for k in 0..p {
            let v = r[(j, k)];
            if !v.is_finite() {
                return Err(Error::numeric(format!("non-finite matrix entry at ({j}, {k})")));
            }
            if (v - r[(k, j)]).abs() > 1e-10 {
                return Err(Error::domain(format!(
                    "matrix is not symmetric: entries ({j}, {k}) and ({k}, {j}) differ by {}",
                    (v - r[(k, j)]).abs()
                )));
            }
        }
    }
    Ok(p)
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted
/// descending and a deterministic sign convention: each eigenvector's entry
/// of largest absolute value is made positive, ties broken by lowest index.
pub fn eigendecompose(r: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let p = check_square_symmetric(r)?;
    let eig = r.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

    let mut values = Vec::with_capacity(p);
    let mut vectors = DMatrix::zeros(p, p);
    for (k, &idx) in order.iter().enumerate() {
        values.push(eig.eigenvalues[idx]);
        let col = eig.eigenvectors.column(idx);
        let mut pivot = 0;
        for j in 1..p {
            if col[j].abs() > col[pivot].abs() {
                pivot = j;
            }
        }
        let flip = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..p {
            vectors[(j, k)] = flip * col[j];
        }
    }
    Ok((values, vectors))
}

/// Number of eigenvalues strictly greater than one. Expects a descending
/// spectrum, as produced by [`eigendecompose`].
pub fn kaiser_count(eigenvalues: &[f64]) -> usize {
    debug_assert!(eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    eigenvalues.iter().filter(|&&v| v > 1.0).count()
}

fn check_factor_range(m: usize, p: usize) -> Result<()> {
    if m < 1 || m > p {
        return Err(Error::domain(format!(
            "factor count m={m} outside the valid range 1..={p}"
        )));
    }
    Ok(())
}

fn loadings_from(values: &[f64], vectors: &DMatrix<f64>, m: usize) -> DMatrix<f64> {
    let p = vectors.nrows();
    let mut loadings = DMatrix::zeros(p, m);
    for k in 0..m {
        let scale = values[k].max(0.0).sqrt();
        for j in 0..p {
            loadings[(j, k)] = scale * vectors[(j, k)];
        }
    }
    loadings
}

fn assemble(
    method: Extraction,
    loadings: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    iterations: usize,
    converged: bool,
) -> FactorModel {
    let (p, m) = (loadings.nrows(), loadings.ncols());
    let communalities: Vec<f64> =
        (0..p).map(|j| loadings.row(j).norm_squared().min(COMMUNALITY_CEIL)).collect();
    let specific_variances: Vec<f64> = communalities.iter().map(|h| 1.0 - h).collect();
    let mut cumulative_explained = Vec::with_capacity(m);
    let mut acc = 0.0;
    for k in 0..m {
        acc += eigenvalues[k];
        cumulative_explained.push(acc / p as f64);
    }
    FactorModel {
        method,
        loadings,
        eigenvalues,
        communalities,
        specific_variances,
        cumulative_explained,
        iterations,
        converged,
    }
}

/// Principal-component factoring: loadings ℓ_jk = √λ_k · v_jk from the top m
/// eigenpairs of the correlation matrix.
pub fn extract_pcf(r: &DMatrix<f64>, m: usize) -> Result<FactorModel> {
    check_factor_range(m, r.nrows())?;
    let (values, vectors) = eigendecompose(r)?;
    if values[m - 1] <= 0.0 {
        return Err(Error::numeric(format!(
            "retained eigenvalue {} is not positive ({})",
            m,
            values[m - 1]
        )));
    }
    Ok(assemble(Extraction::Pcf, loadings_from(&values, &vectors, m), values, 0, true))
}

/// Principal-axis factoring: repeatedly replaces the diagonal of the
/// correlation matrix with the current communality estimates and re-extracts,
/// until the largest communality change drops below `tol` or `max_iter` is
/// reached. Initial communalities are the squared multiple correlations
/// 1 − 1/(R⁻¹)_jj.
pub fn extract_paf(r: &DMatrix<f64>, m: usize, tol: f64, max_iter: usize) -> Result<FactorModel> {
    let p = r.nrows();
    check_factor_range(m, p)?;
    check_square_symmetric(r)?;
    let inv = r.clone().try_inverse().ok_or_else(|| {
        Error::numeric("correlation matrix is singular; cannot initialize communalities")
    })?;
    let mut h: Vec<f64> =
        (0..p).map(|j| (1.0 - 1.0 / inv[(j, j)]).clamp(0.0, COMMUNALITY_CEIL)).collect();

    let mut reduced = r.clone();
    let mut iterations = 0;
    let mut converged = false;
    let mut loadings = DMatrix::zeros(p, m);
    let mut values = vec![0.0; p];
    while iterations < max_iter {
        iterations += 1;
        for j in 0..p {
            reduced[(j, j)] = h[j];
        }
        let (vals, vecs) = eigendecompose(&reduced)?;
        loadings = loadings_from(&vals, &vecs, m);
        values = vals;
        let mut delta = 0.0f64;
        for j in 0..p {
            let next = loadings.row(j).norm_squared().min(COMMUNALITY_CEIL);
            delta = delta.max((next - h[j]).abs());
            h[j] = next;
        }
        if delta < tol {
            converged = true;
            break;
        }
    }
    Ok(assemble(Extraction::Paf, loadings, values, iterations, converged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(p: usize, entries: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(p, p, entries)
    }

    /// Correlation matrix from random data: normalized Gram matrix plus a
    /// small ridge to keep it invertible.
    fn random_correlation(rng: &mut ChaCha8Rng, p: usize) -> DMatrix<f64> {
        let b: DMatrix<f64> = DMatrix::from_fn(p, p + 3, |_, _| rng.gen_range(-1.0..1.0));
        let mut g = &b * b.transpose();
        for j in 0..p {
            g[(j, j)] += 0.1;
        }
        let d: Vec<f64> = (0..p).map(|j| g[(j, j)].sqrt()).collect();
        DMatrix::from_fn(p, p, |j, k| g[(j, k)] / (d[j] * d[k]))
    }

    fn two_block_correlation() -> DMatrix<f64> {
        DMatrix::from_fn(8, 8, |j, k| {
            if j == k {
                1.0
            } else if j < 4 && k < 4 {
                0.8
            } else if j >= 4 && k >= 4 {
                0.7
            } else {
                0.1
            }
        })
    }

    #[test]
    fn eigendecompose_identity_and_two_by_two() {
        let (values, vectors) = eigendecompose(&DMatrix::identity(3, 3)).unwrap();
        for v in &values {
            assert_relative_eq!(*v, 1.0, epsilon = 1e-12);
        }
        let recon = &vectors * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(values))
            * vectors.transpose();
        assert!((recon - DMatrix::identity(3, 3)).abs().max() < 1e-12);

        let (values, vectors) = eigendecompose(&mat(2, &[1.0, 0.6, 0.6, 1.0])).unwrap();
        assert_relative_eq!(values[0], 1.6, epsilon = 1e-12);
        assert_relative_eq!(values[1], 0.4, epsilon = 1e-12);
        let s = 0.5f64.sqrt();
        assert_relative_eq!(vectors[(0, 0)], s, epsilon = 1e-12);
        assert_relative_eq!(vectors[(1, 0)], s, epsilon = 1e-12);
        // Second eigenvector is ±(s, −s); the convention makes whichever
        // entry has the larger magnitude positive.
        assert_relative_eq!(vectors[(0, 1)].abs(), s, epsilon = 1e-12);
        assert!(vectors[(0, 1)] * vectors[(1, 1)] < 0.0);
        let pivot = if vectors[(0, 1)].abs() >= vectors[(1, 1)].abs() { 0 } else { 1 };
        assert!(vectors[(pivot, 1)] > 0.0);
    }

    #[test]
    fn eigendecompose_reconstructs_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let r = random_correlation(&mut rng, 4);
            let (values, vectors) = eigendecompose(&r).unwrap();
            assert!(values.windows(2).all(|w| w[0] >= w[1]));
            let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(values.clone()));
            let recon = &vectors * lam * vectors.transpose();
            assert!((recon - &r).abs().max() < 1e-8);
            for k in 0..4 {
                let v = vectors.column(k);
                let rv = &r * v;
                assert!((rv - v * values[k]).abs().max() < 1e-8);
            }
            assert!((vectors.transpose() * &vectors - DMatrix::identity(4, 4)).abs().max() < 1e-10);
        }
    }

    #[test]
    fn eigendecompose_rejects_asymmetric_input() {
        assert!(eigendecompose(&mat(2, &[1.0, 0.5, 0.2, 1.0])).is_err());
        assert!(eigendecompose(&DMatrix::zeros(2, 3)).is_err());
        assert!(eigendecompose(&mat(2, &[1.0, f64::NAN, f64::NAN, 1.0])).is_err());
    }

    #[test]
    fn kaiser_counts() {
        assert_eq!(kaiser_count(&[5.56, 1.63, 0.4, 0.2]), 2);
        assert_eq!(kaiser_count(&[1.0, 1.0, 1.0]), 0);
        assert_eq!(kaiser_count(&[11.65, 1.06, 0.9]), 2);
        assert_eq!(kaiser_count(&[]), 0);
    }

    #[test]
    fn pcf_examples() {
        let model = extract_pcf(&DMatrix::identity(3, 3), 1).unwrap();
        assert_relative_eq!(model.loadings.column(0).norm_squared(), 1.0, epsilon = 1e-10);
        let mut sorted: Vec<f64> = model.loadings.column(0).iter().map(|v| v.abs()).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(sorted[1] < 1e-10 && (sorted[2] - 1.0).abs() < 1e-10);

        let model = extract_pcf(&mat(2, &[1.0, 0.6, 0.6, 1.0]), 1).unwrap();
        let expect = 0.8f64.sqrt();
        assert_relative_eq!(model.loadings[(0, 0)], expect, epsilon = 1e-10);
        assert_relative_eq!(model.loadings[(1, 0)], expect, epsilon = 1e-10);
        assert_relative_eq!(model.cumulative_explained[0], 0.8, epsilon = 1e-12);

        let model = extract_pcf(&mat(2, &[1.0, 1.0, 1.0, 1.0]), 1).unwrap();
        for j in 0..2 {
            assert!((model.communalities[j] - 1.0).abs() < 2e-6);
            assert!(model.specific_variances[j] >= 1e-6);
            assert_relative_eq!(
                model.communalities[j] + model.specific_variances[j],
                1.0,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn pcf_rejects_bad_factor_counts() {
        let r = mat(2, &[1.0, 0.6, 0.6, 1.0]);
        assert!(extract_pcf(&r, 0).is_err());
        assert!(extract_pcf(&r, 3).is_err());
        // Rank-1 matrix has a zero second eigenvalue.
        assert!(extract_pcf(&mat(2, &[1.0, 1.0, 1.0, 1.0]), 2).is_err());
    }

    #[test]
    fn pcf_column_norms_match_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let r = random_correlation(&mut rng, 6);
        let model = extract_pcf(&r, 3).unwrap();
        for k in 0..3 {
            assert!(
                (model.loadings.column(k).norm_squared() - model.eigenvalues[k]).abs() < 1e-10
            );
        }
        for j in 0..6 {
            assert_relative_eq!(
                model.communalities[j] + model.specific_variances[j],
                1.0,
                epsilon = 1e-10
            );
        }
        assert!(model.cumulative_explained.windows(2).all(|w| w[0] <= w[1]));

        // Full extraction reproduces the matrix.
        let full = extract_pcf(&r, 6).unwrap();
        assert!((&full.loadings * full.loadings.transpose() - &r).abs().max() < 1e-8);
    }

    #[test]
    fn paf_identity_converges_to_zero_loadings() {
        let model = extract_paf(&DMatrix::identity(3, 3), 1, PAF_TOL, PAF_MAX_ITER).unwrap();
        assert!(model.converged);
        assert_eq!(model.iterations, 1);
        assert!(model.loadings.abs().max() < 1e-12);
        for j in 0..3 {
            assert!(model.communalities[j] < 1e-12);
            assert_relative_eq!(model.specific_variances[j], 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn paf_near_rank_one_reaches_full_communalities() {
        let delta = 1e-8;
        let r = DMatrix::from_fn(4, 4, |j, k| if j == k { 1.0 } else { 1.0 - delta });
        let model = extract_paf(&r, 1, PAF_TOL, PAF_MAX_ITER).unwrap();
        assert!(model.converged);
        for j in 0..4 {
            assert!(model.communalities[j] > 0.999, "h_{j} = {}", model.communalities[j]);
        }
    }

    /// Correlation matrix with an exact two-factor decomposition LLᵀ + Ψ.
    fn two_factor_correlation(rng: &mut ChaCha8Rng, p: usize) -> DMatrix<f64> {
        let rows: Vec<(f64, f64)> = (0..p)
            .map(|_| (rng.gen_range(0.5..0.9), rng.gen_range(-0.4..0.4)))
            .collect();
        DMatrix::from_fn(p, p, |j, k| {
            if j == k {
                1.0
            } else {
                rows[j].0 * rows[k].0 + rows[j].1 * rows[k].1
            }
        })
    }

    #[test]
    fn paf_fixed_point_and_convergence() {
        // Weak second factors at p=5 converge linearly but slowly, so this
        // property test runs with a generous cap; the default cap suits the
        // strongly structured matrices factor counting is used on.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let r = two_factor_correlation(&mut rng, 5);
            let model = extract_paf(&r, 2, PAF_TOL, 20_000).unwrap();
            assert!(model.converged, "did not converge in {} iterations", model.iterations);
            for j in 0..5 {
                let recomputed = model.loadings.row(j).norm_squared().min(1.0 - 1e-6);
                assert!((recomputed - model.communalities[j]).abs() < PAF_TOL);
            }
        }
    }

    #[test]
    fn paf_reports_non_convergence_without_failing() {
        // A structureless Gram matrix misfits a two-factor model; the
        // iteration hits its cap and says so instead of erroring.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let r = random_correlation(&mut rng, 5);
        let model = extract_paf(&r, 2, PAF_TOL, PAF_MAX_ITER).unwrap();
        assert!(!model.converged);
        assert_eq!(model.iterations, PAF_MAX_ITER);
        assert!(model.loadings.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn paf_rejects_singular_matrix() {
        let r = mat(2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(extract_paf(&r, 1, PAF_TOL, PAF_MAX_ITER).is_err());
    }

    #[test]
    fn loadings_invariant_under_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let r = random_correlation(&mut rng, 5);
        let perm = [3usize, 0, 4, 1, 2];
        let permuted = DMatrix::from_fn(5, 5, |j, k| r[(perm[j], perm[k])]);
        for method in [Extraction::Pcf, Extraction::Paf] {
            let direct = match method {
                Extraction::Pcf => extract_pcf(&r, 2).unwrap(),
                Extraction::Paf => extract_paf(&r, 2, PAF_TOL, PAF_MAX_ITER).unwrap(),
            };
            let shuffled = match method {
                Extraction::Pcf => extract_pcf(&permuted, 2).unwrap(),
                Extraction::Paf => extract_paf(&permuted, 2, PAF_TOL, PAF_MAX_ITER).unwrap(),
            };
            for j in 0..5 {
                for k in 0..2 {
                    assert!(
                        (shuffled.loadings[(j, k)] - direct.loadings[(perm[j], k)]).abs() < 1e-10,
                        "{method:?} loading ({j}, {k}) not permutation-invariant"
                    );
                }
            }
        }
    }

    #[test]
    fn paf_eigenvalues_sit_below_pcf_eigenvalues() {
        let r = two_block_correlation();
        let pcf = extract_pcf(&r, 2).unwrap();
        let paf = extract_paf(&r, 2, PAF_TOL, PAF_MAX_ITER).unwrap();
        assert!(paf.converged);
        for k in 0..2 {
            assert!(
                paf.eigenvalues[k] < pcf.eigenvalues[k],
                "factor {k}: PAF {} vs PCF {}",
                paf.eigenvalues[k],
                pcf.eigenvalues[k]
            );
        }
        assert_eq!(kaiser_count(&pcf.eigenvalues), 2);
    }

    #[test]
    fn extraction_parsing_round_trips() {
        for method in [Extraction::Pcf, Extraction::Paf] {
            assert_eq!(method.as_str().parse::<Extraction>().unwrap(), method);
        }
        assert!("ml".parse::<Extraction>().is_err());
    }
}
