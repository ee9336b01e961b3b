//! Quantile functions of a single interval observation under the three
//! within-interval models, plus a linear combination of observations as a
//! piecewise quantile function.

use intervalfa::mallows::{combine, lift};
use intervalfa::{Interval, Model};

fn main() -> intervalfa::Result<()> {
    let obs = Interval::with_mode(2.0, 3.0, 6.0)?;
    println!("observation [2, 6] with mode 3\n");

    println!("  t     uniform   symtri    tri");
    for i in 0..=10 {
        let t = i as f64 / 10.0;
        println!(
            "  {t:.1}  {:8.4}  {:8.4}  {:8.4}",
            obs.quantile(Model::Uniform, t)?,
            obs.quantile(Model::SymmetricTriangular, t)?,
            obs.quantile(Model::Triangular, t)?,
        );
    }

    for model in [Model::Uniform, Model::SymmetricTriangular, Model::Triangular] {
        let (mean, var) = obs.moments(model)?;
        println!("\n{:>8}: mean {mean:.4}, variance {var:.4}", model.as_str());
    }

    // 2·X − 0.5·Y as a quantile function; the negative coefficient reflects
    // Y's quantile function around t = 1/2.
    let x = lift(&obs, Model::Uniform)?;
    let y = lift(&Interval::new(-1.0, 1.0)?, Model::Uniform)?;
    let z = combine(&[2.0, -0.5], &[x, y])?;
    println!("\n2·[2,6] − 0.5·[−1,1] under the uniform model:");
    println!("  breakpoints: {:?}", z.breakpoints());
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        println!("  Psi({t:.2}) = {:.4}", z.eval(t));
    }
    Ok(())
}
