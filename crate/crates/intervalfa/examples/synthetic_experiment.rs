//! Reruns the six-case factor-count experiment: synthetic datasets with
//! planted block structure, symbolic correlations, Kaiser counts per seed.
//!
//! Usage: `cargo run --example synthetic_experiment [n_seeds]`

use intervalfa::factor::Extraction;
use intervalfa::synth::run_case_experiment;
use intervalfa::Model;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n_seeds: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(20);
    let seeds: Vec<u64> = (0..n_seeds).collect();

    println!("n = 100, p = 10, {} seeds, uniform model, Kaiser rule", seeds.len());
    println!("case  modal  agreement  counts");
    for case in 1..=6 {
        let exp = run_case_experiment(case, 100, Model::Uniform, Extraction::Pcf, &seeds)?;
        let mut hist: Vec<(usize, usize)> = Vec::new();
        for &c in &exp.counts {
            match hist.iter_mut().find(|(k, _)| *k == c) {
                Some((_, v)) => *v += 1,
                None => hist.push((c, 1)),
            }
        }
        hist.sort();
        let counts: Vec<String> =
            hist.iter().map(|(k, v)| format!("{k} factors x{v}")).collect();
        println!(
            "{case:>4}  {:>5}  {:>8.0}%  {}",
            exp.modal_count,
            exp.agreement * 100.0,
            counts.join(", ")
        );
    }
    Ok(())
}
