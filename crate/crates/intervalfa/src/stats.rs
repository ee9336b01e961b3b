//! Symbolic sample moments for interval-valued variables: mean, variance, the
//! three covariance definitions and the correlation matrix feeding factor
//! extraction.
//!
//! All statistics treat a column of n intervals as an equal-weight finite
//! mixture of the n within-interval laws and use population-style 1/n
//! weighting throughout.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::interval::{Dataset, Interval, Model};

/// The three symbolic covariance definitions.
///
/// | definition | idea | diagonal |
/// |------------|------|----------|
/// | `Cov1` | classical covariance of the per-observation means | variance of the means only |
/// | `Cov2` | signed products of per-observation dispersion terms | sample variance |
/// | `Cov3` | within-interval cross-products added to `Cov1` | sample variance |
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CovDef {
    Cov1,
    Cov2,
    #[default]
    Cov3,
}

impl CovDef {
    pub fn as_str(&self) -> &'static str {
        match self {
            CovDef::Cov1 => "cov1",
            CovDef::Cov2 => "cov2",
            CovDef::Cov3 => "cov3",
        }
    }
}

impl std::str::FromStr for CovDef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cov1" => Ok(CovDef::Cov1),
            "cov2" => Ok(CovDef::Cov2),
            "cov3" => Ok(CovDef::Cov3),
            other => Err(Error::domain(format!(
                "unknown covariance definition {other:?}; expected cov1, cov2 or cov3"
            ))),
        }
    }
}

/// Symbolic sample mean: the average of the per-observation means.
pub fn sample_mean(col: &[Interval], model: Model) -> Result<f64> {
    if col.is_empty() {
        return Err(Error::domain("sample_mean of an empty column"));
    }
    let mut acc = 0.0;
    for iv in col {
        acc += iv.moments(model)?.0;
    }
    Ok(acc / col.len() as f64)
}

/// Symbolic sample variance of the mixture: the average within-interval
/// variance plus the variance of the per-observation means.
pub fn sample_variance(col: &[Interval], model: Model) -> Result<f64> {
    if col.is_empty() {
        return Err(Error::domain("sample_variance of an empty column"));
    }
    let n = col.len() as f64;
    let mut within = 0.0;
    let mut first = 0.0;
    let mut second = 0.0;
    for iv in col {
        let (mu, var) = iv.moments(model)?;
        within += var;
        first += mu;
        second += mu * mu;
    }
    let mean = first / n;
    // Rounding can push an exactly-zero variance a hair negative.
    Ok((within / n + second / n - mean * mean).max(0.0))
}

/// Symbolic sample covariance between two columns under one of the three
/// definitions. Symmetric in its arguments for every definition.
pub fn covariance(a: &[Interval], b: &[Interval], model: Model, covdef: CovDef) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::domain(format!(
            "covariance needs equal column lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::domain("covariance of empty columns"));
    }
    match covdef {
        CovDef::Cov1 => cov1(a, b, model),
        CovDef::Cov2 => cov2(a, b, model),
        CovDef::Cov3 => cov3(a, b, model),
    }
}

fn cov1(a: &[Interval], b: &[Interval], model: Model) -> Result<f64> {
    let n = a.len() as f64;
    let mut prod = 0.0;
    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    for (x, y) in a.iter().zip(b) {
        let mu_a = x.moments(model)?.0;
        let mu_b = y.moments(model)?.0;
        prod += mu_a * mu_b;
        sum_a += mu_a;
        sum_b += mu_b;
    }
    Ok(prod / n - (sum_a / n) * (sum_b / n))
}

/// Per-observation dispersion term of the signed-product covariance,
/// expressed against the variable's sample mean `ybar`.
fn cov2_q(iv: &Interval, ybar: f64, model: Model) -> Result<f64> {
    let dc = iv.center() - ybar;
    let r = iv.half_range();
    Ok(match model {
        Model::Uniform => 3.0 * dc * dc + r * r,
        Model::SymmetricTriangular => 6.0 * dc * dc + r * r,
        Model::Triangular => {
            let dm = iv.model_mode(model)? - ybar;
            3.0 * dc * dc + 2.0 * dc * dm + dm * dm + r * r
        }
    })
}

fn cov2(a: &[Interval], b: &[Interval], model: Model) -> Result<f64> {
    let n = a.len() as f64;
    let ybar_a = sample_mean(a, model)?;
    let ybar_b = sample_mean(b, model)?;
    // The sign attaches -1 at the exact tie (observation mean equal to the
    // sample mean).
    let sign = |mu: f64, ybar: f64| if mu <= ybar { -1.0 } else { 1.0 };
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let q = (cov2_q(x, ybar_a, model)? * cov2_q(y, ybar_b, model)?).sqrt();
        acc += sign(x.moments(model)?.0, ybar_a) * sign(y.moments(model)?.0, ybar_b) * q;
    }
    let coef = match model {
        Model::Uniform => 3.0,
        Model::SymmetricTriangular | Model::Triangular => 6.0,
    };
    Ok(acc / (coef * n))
}

fn cov3(a: &[Interval], b: &[Interval], model: Model) -> Result<f64> {
    let n = a.len() as f64;
    let ybar_a = sample_mean(a, model)?;
    let ybar_b = sample_mean(b, model)?;
    let mut within = 0.0;
    let mut between = 0.0;
    match model {
        Model::Uniform => {
            for (x, y) in a.iter().zip(b) {
                within += x.half_range() * y.half_range();
                between += x.center() * y.center();
            }
            within /= 3.0;
        }
        Model::SymmetricTriangular => {
            for (x, y) in a.iter().zip(b) {
                within += x.half_range() * y.half_range();
                between += x.center() * y.center();
            }
            within /= 6.0;
        }
        Model::Triangular => {
            // W = (c−m)² + 3r² per observation; within-products are √(W·W')/18.
            let w_term = |iv: &Interval| -> Result<f64> {
                let d = iv.center() - iv.model_mode(Model::Triangular)?;
                let r = iv.half_range();
                Ok(d * d + 3.0 * r * r)
            };
            for (x, y) in a.iter().zip(b) {
                within += (w_term(x)? * w_term(y)?).sqrt();
                between += (2.0 * x.center() + x.model_mode(model)?)
                    * (2.0 * y.center() + y.model_mode(model)?);
            }
            within /= 18.0;
            between /= 9.0;
        }
    }
    Ok(within / n + between / n - ybar_a * ybar_b)
}

/// Per-dataset symbolic summary under one (model, covdef) pair.
#[derive(Clone, Debug)]
pub struct Summary {
    pub model: Model,
    pub covdef: CovDef,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    pub covariance: DMatrix<f64>,
    /// covariance(j, j′) / √(variance_j · variance_j′); the denominator uses
    /// the true sample variances for every covdef, since the `Cov1` diagonal
    /// is not the variance.
    pub correlation: DMatrix<f64>,
}

/// Means, variances, covariance and correlation matrices of a dataset.
pub fn summarize(data: &Dataset, model: Model, covdef: CovDef) -> Result<Summary> {
    data.check_model(model)?;
    let p = data.p();
    let columns: Vec<Vec<Interval>> = (0..p).map(|j| data.column(j)).collect();

    let mut means = Vec::with_capacity(p);
    let mut variances = Vec::with_capacity(p);
    for (j, col) in columns.iter().enumerate() {
        means.push(sample_mean(col, model)?);
        let var = sample_variance(col, model)?;
        if var <= 0.0 {
            return Err(Error::DegenerateVariable { col: data.names()[j].clone() });
        }
        variances.push(var);
    }

    let mut cov = DMatrix::zeros(p, p);
    for j in 0..p {
        for k in j..p {
            let c = covariance(&columns[j], &columns[k], model, covdef)?;
            cov[(j, k)] = c;
            cov[(k, j)] = c;
        }
    }

    let mut corr = DMatrix::zeros(p, p);
    for j in 0..p {
        for k in 0..p {
            corr[(j, k)] = cov[(j, k)] / (variances[j] * variances[k]).sqrt();
        }
    }

    Ok(Summary { model, covdef, means, variances, covariance: cov, correlation: corr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Dataset;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn iv(l: f64, u: f64) -> Interval {
        Interval::new(l, u).unwrap()
    }

    fn ivm(l: f64, m: f64, u: f64) -> Interval {
        Interval::with_mode(l, m, u).unwrap()
    }

    fn random_column(rng: &mut ChaCha8Rng, n: usize) -> Vec<Interval> {
        (0..n)
            .map(|_| {
                let c = rng.gen_range(-5.0..5.0);
                let r = rng.gen_range(0.0..3.0);
                let m = c + rng.gen_range(-1.0..1.0) * r;
                ivm(c - r, m, c + r)
            })
            .collect()
    }

    #[test]
    fn mean_examples() {
        assert_relative_eq!(sample_mean(&[iv(0.0, 2.0)], Model::Uniform).unwrap(), 1.0);
        assert_relative_eq!(
            sample_mean(&[ivm(0.0, 0.5, 2.0)], Model::Triangular).unwrap(),
            5.0 / 6.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            sample_mean(&[iv(0.0, 2.0), iv(2.0, 6.0)], Model::Uniform).unwrap(),
            2.5
        );
        assert!(sample_mean(&[], Model::Uniform).is_err());
    }

    #[test]
    fn variance_examples() {
        assert_relative_eq!(
            sample_variance(&[iv(0.0, 2.0)], Model::Uniform).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-15
        );
        for model in [Model::Uniform, Model::SymmetricTriangular, Model::Triangular] {
            let col = [
                Interval::with_mode(0.0, 0.0, 0.0).unwrap(),
                Interval::with_mode(2.0, 2.0, 2.0).unwrap(),
            ];
            assert_relative_eq!(sample_variance(&col, model).unwrap(), 1.0);
        }
        // Mixture of U(0,2) and U(2,6): (1/3 + 4/3)/2 + (1 + 16)/2 − 2.5².
        assert_relative_eq!(
            sample_variance(&[iv(0.0, 2.0), iv(2.0, 6.0)], Model::Uniform).unwrap(),
            37.0 / 12.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn monte_carlo_mixture_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let col = random_column(&mut rng, 8);
        let draws = 1_000_000usize;
        for model in [Model::Uniform, Model::SymmetricTriangular, Model::Triangular] {
            let mean = sample_mean(&col, model).unwrap();
            let var = sample_variance(&col, model).unwrap();
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            let mut s4 = 0.0;
            for _ in 0..draws {
                let i = rng.gen_range(0..col.len());
                let x = col[i].quantile(model, rng.gen_range(0.0..1.0)).unwrap();
                s1 += x;
                let d = x - mean;
                s2 += d * d;
                s4 += d * d * d * d;
            }
            let nd = draws as f64;
            let mc_mean = s1 / nd;
            let mc_var = s2 / nd;
            let se_mean = (var / nd).sqrt();
            let se_var = ((s4 / nd - mc_var * mc_var) / nd).sqrt();
            // 5 SE: a wrong moment constant is hundreds of SE away.
            assert!(
                (mc_mean - mean).abs() < 5.0 * se_mean,
                "{model:?} mean off: {mc_mean} vs {mean}"
            );
            assert!(
                (mc_var - var).abs() < 5.0 * se_var,
                "{model:?} variance off: {mc_var} vs {var}"
            );
        }
    }

    #[test]
    fn covariance_diagonal_matches_variance_for_cov3() {
        let col = vec![iv(0.0, 2.0), iv(2.0, 6.0)];
        let c = covariance(&col, &col, Model::Uniform, CovDef::Cov3).unwrap();
        assert_relative_eq!(c, 37.0 / 12.0, epsilon = 1e-14);
    }

    #[test]
    fn covariance_of_degenerate_columns_is_classical() {
        let a = vec![Interval::point(0.0), Interval::point(2.0)];
        let b = vec![Interval::point(1.0), Interval::point(5.0)];
        let am = vec![
            Interval::with_mode(0.0, 0.0, 0.0).unwrap(),
            Interval::with_mode(2.0, 2.0, 2.0).unwrap(),
        ];
        let bm = vec![
            Interval::with_mode(1.0, 1.0, 1.0).unwrap(),
            Interval::with_mode(5.0, 5.0, 5.0).unwrap(),
        ];
        for covdef in [CovDef::Cov1, CovDef::Cov2, CovDef::Cov3] {
            for model in [Model::Uniform, Model::SymmetricTriangular] {
                assert_relative_eq!(covariance(&a, &b, model, covdef).unwrap(), 2.0);
            }
            assert_relative_eq!(covariance(&am, &bm, Model::Triangular, covdef).unwrap(), 2.0);
        }
    }

    #[test]
    fn cov1_known_value() {
        let a = vec![iv(0.0, 2.0), iv(2.0, 6.0)];
        let b = vec![iv(1.0, 3.0), iv(0.0, 2.0)];
        let c = covariance(&a, &b, Model::Uniform, CovDef::Cov1).unwrap();
        assert_relative_eq!(c, (1.0 * 2.0 + 4.0 * 1.0) / 2.0 - 2.5 * 1.5, epsilon = 1e-14);
        assert_relative_eq!(c, -0.75);
    }

    #[test]
    fn covariance_is_symmetric_in_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_column(&mut rng, 12);
        let b = random_column(&mut rng, 12);
        for model in [Model::Uniform, Model::SymmetricTriangular, Model::Triangular] {
            for covdef in [CovDef::Cov1, CovDef::Cov2, CovDef::Cov3] {
                let ab = covariance(&a, &b, model, covdef).unwrap();
                let ba = covariance(&b, &a, model, covdef).unwrap();
                assert_relative_eq!(ab, ba, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn cov3_equals_mean_sigma_products_plus_cov1() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for model in [Model::Uniform, Model::SymmetricTriangular, Model::Triangular] {
            for _ in 0..50 {
                let n = rng.gen_range(2..20);
                let a = random_column(&mut rng, n);
                let b = random_column(&mut rng, n);
                let lhs = covariance(&a, &b, model, CovDef::Cov3).unwrap();
                let mut sig = 0.0;
                for (x, y) in a.iter().zip(&b) {
                    sig += x.moments(model).unwrap().1.sqrt() * y.moments(model).unwrap().1.sqrt();
                }
                let rhs = sig / n as f64 + covariance(&a, &b, model, CovDef::Cov1).unwrap();
                assert!((lhs - rhs).abs() < 1e-12, "{model:?}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn cov2_and_cov3_diagonals_equal_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for model in [Model::Uniform, Model::SymmetricTriangular, Model::Triangular] {
            for _ in 0..50 {
                let col = random_column(&mut rng, 15);
                let var = sample_variance(&col, model).unwrap();
                let c2 = covariance(&col, &col, model, CovDef::Cov2).unwrap();
                let c3 = covariance(&col, &col, model, CovDef::Cov3).unwrap();
                assert!((c2 - var).abs() < 1e-12, "{model:?} cov2 diag: {c2} vs {var}");
                assert!((c3 - var).abs() < 1e-12, "{model:?} cov3 diag: {c3} vs {var}");
            }
        }
    }

    #[test]
    fn cov1_diagonal_is_variance_of_centers_under_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let col = random_column(&mut rng, 25);
        let c1 = covariance(&col, &col, Model::Uniform, CovDef::Cov1).unwrap();
        let n = col.len() as f64;
        let mean_c = col.iter().map(|x| x.center()).sum::<f64>() / n;
        let var_c = col.iter().map(|x| (x.center() - mean_c).powi(2)).sum::<f64>() / n;
        assert_relative_eq!(c1, var_c, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_model_equals_triangular_with_central_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let n = rng.gen_range(2..15);
            let strip = |col: &[Interval]| -> Vec<Interval> {
                col.iter()
                    .map(|x| Interval::with_mode(x.lower(), x.center(), x.upper()).unwrap())
                    .collect()
            };
            let a = strip(&random_column(&mut rng, n));
            let b = strip(&random_column(&mut rng, n));
            assert!(
                (sample_mean(&a, Model::SymmetricTriangular).unwrap()
                    - sample_mean(&a, Model::Triangular).unwrap())
                .abs()
                    < 1e-12
            );
            assert!(
                (sample_variance(&a, Model::SymmetricTriangular).unwrap()
                    - sample_variance(&a, Model::Triangular).unwrap())
                .abs()
                    < 1e-12
            );
            for covdef in [CovDef::Cov1, CovDef::Cov2, CovDef::Cov3] {
                let s = covariance(&a, &b, Model::SymmetricTriangular, covdef).unwrap();
                let t = covariance(&a, &b, Model::Triangular, covdef).unwrap();
                assert!((s - t).abs() < 1e-12, "{covdef:?}: {s} vs {t}");
            }
        }
    }

    #[test]
    fn summarize_correlations() {
        // Two identical columns correlate perfectly; a degenerate pair moving
        // in opposition correlates at -1.
        let d = Dataset::new(
            vec!["A".into(), "B".into()],
            vec![
                vec![iv(0.0, 2.0), iv(0.0, 2.0)],
                vec![iv(2.0, 6.0), iv(2.0, 6.0)],
            ],
        )
        .unwrap();
        let s = summarize(&d, Model::Uniform, CovDef::Cov3).unwrap();
        assert_relative_eq!(s.correlation[(0, 1)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(s.correlation[(0, 0)], 1.0, epsilon = 1e-12);

        let d = Dataset::new(
            vec!["A".into(), "B".into()],
            vec![
                vec![Interval::point(0.0), Interval::point(2.0)],
                vec![Interval::point(2.0), Interval::point(0.0)],
            ],
        )
        .unwrap();
        let s = summarize(&d, Model::Uniform, CovDef::Cov3).unwrap();
        assert_relative_eq!(s.correlation[(0, 1)], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn summarize_matches_independent_recomputation() {
        // Spreadsheet-style oracle on a 3×2 dataset: per-observation moments
        // written out longhand, Cov3 assembled from the σσ′ + Cov1 identity.
        let d = Dataset::new(
            vec!["A".into(), "B".into()],
            vec![
                vec![iv(1.0, 3.0), iv(0.0, 4.0)],
                vec![iv(2.0, 8.0), iv(1.0, 2.0)],
                vec![iv(0.0, 1.0), iv(3.0, 7.0)],
            ],
        )
        .unwrap();
        let s = summarize(&d, Model::Uniform, CovDef::Cov3).unwrap();

        let ca = [2.0, 5.0, 0.5];
        let cb = [2.0, 1.5, 5.0];
        let ra = [1.0, 3.0, 0.5];
        let rb = [2.0, 0.5, 2.0];
        let mean_a: f64 = ca.iter().sum::<f64>() / 3.0;
        let mean_b: f64 = cb.iter().sum::<f64>() / 3.0;
        let mut sig = 0.0;
        let mut cprod = 0.0;
        for i in 0..3 {
            sig += (ra[i] / 3.0f64.sqrt()) * (rb[i] / 3.0f64.sqrt());
            cprod += ca[i] * cb[i];
        }
        let expected = sig / 3.0 + cprod / 3.0 - mean_a * mean_b;
        assert!((s.covariance[(0, 1)] - expected).abs() < 1e-12);
        assert_relative_eq!(s.means[0], mean_a);
        assert_relative_eq!(s.means[1], mean_b);
    }

    #[test]
    fn summarize_rejects_zero_variance_naming_column() {
        let d = Dataset::new(
            vec!["A".into(), "B".into()],
            vec![
                vec![iv(0.0, 2.0), Interval::point(1.0)],
                vec![iv(1.0, 3.0), Interval::point(1.0)],
            ],
        )
        .unwrap();
        match summarize(&d, Model::Uniform, CovDef::Cov3) {
            Err(Error::DegenerateVariable { col }) => assert_eq!(col, "B"),
            other => panic!("expected degenerate-variable error, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_data_reduces_to_classical_statistics() {
        let xs = [1.0, 4.0, 2.0, 8.0, 5.0];
        let ys = [2.0, 1.0, 7.0, 3.0, 9.0];
        let a: Vec<Interval> = xs.iter().map(|&x| Interval::with_mode(x, x, x).unwrap()).collect();
        let b: Vec<Interval> = ys.iter().map(|&y| Interval::with_mode(y, y, y).unwrap()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let vx = xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>() / n;
        let cxy = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / n;
        for model in [Model::Uniform, Model::SymmetricTriangular, Model::Triangular] {
            assert_relative_eq!(sample_mean(&a, model).unwrap(), mx, epsilon = 1e-12);
            assert_relative_eq!(sample_variance(&a, model).unwrap(), vx, epsilon = 1e-12);
            for covdef in [CovDef::Cov1, CovDef::Cov2, CovDef::Cov3] {
                assert_relative_eq!(
                    covariance(&a, &b, model, covdef).unwrap(),
                    cxy,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn covdef_parsing_round_trips() {
        for covdef in [CovDef::Cov1, CovDef::Cov2, CovDef::Cov3] {
            assert_eq!(covdef.as_str().parse::<CovDef>().unwrap(), covdef);
        }
        assert!("cov4".parse::<CovDef>().is_err());
        assert_eq!(CovDef::default(), CovDef::Cov3);
    }
}
