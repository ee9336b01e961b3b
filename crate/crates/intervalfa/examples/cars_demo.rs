//! End-to-end demo on a fabricated car-catalogue dataset where every variable
//! is a (min, mode, max) triplet aggregated over trim levels: triangular
//! model, PCF vs PAF side by side, Bartlett scores, factor-plane SVG.
//!
//! The catalogue spans cheap/expensive × small/large body shapes, so two
//! factors emerge: a performance/price axis and a body-size axis.

use intervalfa::factor::{
    eigendecompose, extract_paf, extract_pcf, kaiser_count, PAF_MAX_ITER, PAF_TOL,
};
use intervalfa::plot::factor_plane_svg;
use intervalfa::scores::{estimate_bartlett, OptConfig};
use intervalfa::stats::summarize;
use intervalfa::{CovDef, Dataset, Interval, Model};

const VARS: [&str; 8] =
    ["price", "power", "top_speed", "accel", "consumption", "length", "width", "weight"];

#[rustfmt::skip]
const CARS: [(&str, [(f64, f64, f64); 8]); 17] = [
    ("Twingo",   [(9.0, 10.5, 13.0),     (58.0, 65.0, 75.0),    (151.0, 158.0, 165.0), (12.5, 13.5, 14.8), (4.7, 5.2, 5.9),    (3.43, 3.46, 3.49), (1.63, 1.65, 1.66), (860.0, 900.0, 940.0)]),
    ("Panda",    [(8.5, 10.0, 12.5),     (60.0, 69.0, 85.0),    (155.0, 160.0, 170.0), (12.0, 13.0, 14.5), (4.9, 5.4, 6.1),    (3.53, 3.57, 3.61), (1.58, 1.64, 1.69), (890.0, 940.0, 990.0)]),
    ("Polo",     [(12.0, 14.0, 17.5),    (65.0, 80.0, 110.0),   (165.0, 175.0, 190.0), (10.5, 11.8, 13.5), (4.8, 5.6, 6.4),    (3.97, 4.05, 4.08), (1.68, 1.71, 1.75), (1030.0, 1105.0, 1180.0)]),
    ("Clio",     [(11.5, 13.5, 17.0),    (65.0, 85.0, 120.0),   (168.0, 178.0, 200.0), (10.0, 11.5, 13.0), (4.6, 5.5, 6.6),    (4.04, 4.06, 4.09), (1.71, 1.73, 1.80), (1040.0, 1130.0, 1200.0)]),
    ("Lodgy",    [(10.0, 12.5, 16.0),    (85.0, 100.0, 115.0),  (160.0, 170.0, 183.0), (11.0, 12.2, 13.8), (5.3, 6.0, 6.9),    (4.50, 4.50, 4.52), (1.75, 1.76, 1.78), (1160.0, 1250.0, 1330.0)]),
    ("Berlingo", [(12.0, 15.0, 19.0),    (75.0, 100.0, 130.0),  (155.0, 168.0, 185.0), (11.5, 12.8, 14.2), (5.5, 6.2, 7.1),    (4.40, 4.45, 4.75), (1.81, 1.84, 1.86), (1320.0, 1420.0, 1530.0)]),
    ("Duster",   [(12.0, 15.5, 20.0),    (90.0, 115.0, 150.0),  (168.0, 178.0, 195.0), (10.3, 11.7, 13.1), (5.4, 6.3, 7.4),    (4.34, 4.35, 4.37), (1.80, 1.82, 1.85), (1180.0, 1290.0, 1390.0)]),
    ("Golf",     [(19.0, 23.0, 32.0),    (90.0, 130.0, 245.0),  (180.0, 205.0, 250.0), (6.5, 9.0, 11.9),   (5.0, 6.2, 7.8),    (4.26, 4.28, 4.29), (1.79, 1.80, 1.82), (1200.0, 1320.0, 1500.0)]),
    ("Passat",   [(28.0, 33.0, 48.0),    (120.0, 170.0, 280.0), (205.0, 225.0, 250.0), (5.9, 8.5, 11.0),   (5.6, 6.8, 9.0),    (4.77, 4.78, 4.79), (1.83, 1.85, 1.87), (1370.0, 1480.0, 1650.0)]),
    ("A4",       [(30.0, 36.0, 55.0),    (120.0, 190.0, 450.0), (210.0, 235.0, 250.0), (4.8, 7.5, 10.3),   (5.8, 7.0, 9.5),    (4.70, 4.73, 4.76), (1.84, 1.85, 1.87), (1400.0, 1520.0, 1750.0)]),
    ("Espace",   [(32.0, 38.0, 50.0),    (130.0, 165.0, 225.0), (195.0, 210.0, 230.0), (8.5, 10.0, 11.8),  (6.1, 7.2, 8.8),    (4.85, 4.86, 4.88), (1.87, 1.89, 1.92), (1600.0, 1720.0, 1850.0)]),
    ("S500",     [(95.0, 110.0, 150.0),  (330.0, 430.0, 610.0), (250.0, 250.0, 250.0), (4.3, 4.9, 5.9),    (7.8, 9.2, 11.5),   (5.18, 5.22, 5.29), (1.90, 1.92, 1.95), (1950.0, 2090.0, 2280.0)]),
    ("MiniJCW",  [(26.0, 32.0, 40.0),    (178.0, 231.0, 306.0), (235.0, 246.0, 250.0), (5.2, 6.1, 6.9),    (6.0, 6.9, 7.8),    (3.85, 3.88, 3.90), (1.68, 1.73, 1.76), (1160.0, 1220.0, 1290.0)]),
    ("TT",       [(35.0, 42.0, 60.0),    (197.0, 230.0, 400.0), (230.0, 250.0, 260.0), (3.7, 5.8, 7.1),    (6.8, 7.5, 9.2),    (4.18, 4.19, 4.20), (1.83, 1.83, 1.84), (1230.0, 1320.0, 1450.0)]),
    ("Cayman",   [(55.0, 65.0, 90.0),    (300.0, 350.0, 420.0), (275.0, 285.0, 295.0), (4.1, 4.9, 5.7),    (7.8, 8.6, 9.7),    (4.38, 4.39, 4.40), (1.80, 1.80, 1.81), (1335.0, 1380.0, 1430.0)]),
    ("911",      [(90.0, 110.0, 180.0),  (385.0, 450.0, 650.0), (293.0, 308.0, 330.0), (2.7, 3.7, 4.5),    (8.9, 10.1, 12.6),  (4.52, 4.53, 4.54), (1.85, 1.87, 1.90), (1430.0, 1520.0, 1640.0)]),
    ("M3",       [(75.0, 90.0, 120.0),   (433.0, 480.0, 510.0), (250.0, 280.0, 305.0), (3.5, 4.0, 4.6),    (8.8, 10.0, 12.8),  (4.67, 4.70, 4.72), (1.87, 1.90, 1.92), (1650.0, 1730.0, 1840.0)]),
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let names = VARS.iter().map(|s| s.to_string()).collect();
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (car, values) in CARS {
        labels.push(car.to_string());
        rows.push(
            values
                .iter()
                .map(|&(l, m, u)| Interval::with_mode(l, m, u))
                .collect::<intervalfa::Result<Vec<_>>>()?,
        );
    }
    let data = Dataset::new(names, rows)?;

    let summary = summarize(&data, Model::Triangular, CovDef::Cov3)?;
    let (eigenvalues, _) = eigendecompose(&summary.correlation)?;
    println!(
        "eigenvalues: {:?}",
        eigenvalues.iter().map(|v| (v * 1e3).round() / 1e3).collect::<Vec<_>>()
    );
    let m = kaiser_count(&eigenvalues).max(2);
    println!("eigenvalues above one: {} → extracting {m} factors\n", kaiser_count(&eigenvalues));

    let pcf = extract_pcf(&summary.correlation, m)?;
    let paf = extract_paf(&summary.correlation, m, PAF_TOL, PAF_MAX_ITER)?;

    println!("                 pcf F1    pcf F2    paf F1    paf F2");
    for (j, var) in VARS.iter().enumerate() {
        println!(
            "  {var:>12} {:9.4} {:9.4} {:9.4} {:9.4}",
            pcf.loadings[(j, 0)],
            pcf.loadings[(j, 1)],
            paf.loadings[(j, 0)],
            paf.loadings[(j, 1)]
        );
    }

    // Align column signs before comparing: either extraction may flip a
    // factor's direction.
    let mut max_diff: f64 = 0.0;
    for k in 0..m {
        let dot: f64 = (0..VARS.len())
            .map(|j| pcf.loadings[(j, k)] * paf.loadings[(j, k)])
            .sum();
        let sign = if dot < 0.0 { -1.0 } else { 1.0 };
        for j in 0..VARS.len() {
            max_diff = max_diff.max((pcf.loadings[(j, k)] - sign * paf.loadings[(j, k)]).abs());
        }
    }
    println!("\nmax |pcf − paf| loading difference (sign-aligned): {max_diff:.4}");

    let (z, _, _) = data.standardize(Model::Triangular)?;
    let scores = estimate_bartlett(&z, &pcf, Model::Triangular, &OptConfig::default())?;
    let out = std::path::Path::new("target/example-output");
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("cars_factor_plane.svg"), factor_plane_svg(&scores, Some(&labels))?)?;
    println!("wrote {}", out.join("cars_factor_plane.svg").display());
    Ok(())
}
