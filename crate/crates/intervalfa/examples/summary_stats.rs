//! Symbolic means, variances and the three covariance definitions on a small
//! interval dataset, under each within-interval model.

use intervalfa::stats::summarize;
use intervalfa::{CovDef, Dataset, Interval, Model};

fn print_matrix(label: &str, m: &nalgebra::DMatrix<f64>) {
    println!("  {label}:");
    for i in 0..m.nrows() {
        print!("   ");
        for j in 0..m.ncols() {
            print!(" {:7.4}", m[(i, j)]);
        }
        println!();
    }
}

fn main() -> intervalfa::Result<()> {
    let data = Dataset::new(
        vec!["A".into(), "B".into(), "C".into()],
        vec![
            vec![
                Interval::with_mode(0.0, 1.0, 2.0)?,
                Interval::with_mode(1.0, 2.5, 3.0)?,
                Interval::with_mode(5.0, 6.0, 7.0)?,
            ],
            vec![
                Interval::with_mode(2.0, 5.0, 6.0)?,
                Interval::with_mode(4.0, 6.0, 8.0)?,
                Interval::with_mode(0.0, 0.5, 2.0)?,
            ],
            vec![
                Interval::with_mode(1.0, 1.5, 2.0)?,
                Interval::with_mode(2.0, 2.0, 3.0)?,
                Interval::with_mode(3.0, 4.0, 5.0)?,
            ],
            vec![
                Interval::with_mode(4.0, 7.0, 9.0)?,
                Interval::with_mode(5.0, 7.0, 9.0)?,
                Interval::with_mode(1.0, 2.0, 4.0)?,
            ],
        ],
    )?;

    for model in [Model::Uniform, Model::SymmetricTriangular, Model::Triangular] {
        println!("== model: {} ==", model.as_str());
        let summary = summarize(&data, model, CovDef::Cov3)?;
        println!("  means:     {:?}", summary.means.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>());
        println!("  variances: {:?}", summary.variances.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>());
        print_matrix("correlation (cov3)", &summary.correlation);
        // The covariance definitions share one diagonal but differ off it.
        for covdef in [CovDef::Cov1, CovDef::Cov2, CovDef::Cov3] {
            let s = summarize(&data, model, covdef)?;
            println!(
                "  {}: cov(A,B) = {:.4}, corr(A,B) = {:.4}",
                covdef.as_str(),
                s.covariance[(0, 1)],
                s.correlation[(0, 1)]
            );
        }
        println!();
    }
    Ok(())
}
