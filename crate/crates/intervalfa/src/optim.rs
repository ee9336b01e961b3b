//! Bounded Nelder–Mead minimization used for fitting interval-valued factor
//! scores. Candidate points are projected onto the box, so the search never
//! evaluates the objective outside it.

/// Stopping rules for [`nelder_mead`].
#[derive(Clone, Copy, Debug)]
pub struct NmConfig {
    pub max_iter: usize,
    /// Relative spread of simplex function values at which to stop.
    pub ftol: f64,
    /// Relative simplex diameter at which to stop.
    pub xtol: f64,
}

impl Default for NmConfig {
    fn default() -> Self {
        Self { max_iter: 500, ftol: 1e-8, xtol: 1e-9 }
    }
}

#[derive(Clone, Debug)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn clamp_point(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((xi, &lo), &hi) in x.iter_mut().zip(lower).zip(upper) {
        *xi = xi.clamp(lo, hi);
    }
}

/// Minimizes `f` over the box `[lower, upper]` starting from `x0` with the
/// standard reflection/expansion/contraction/shrink moves (α=1, γ=2, ρ=0.5,
/// σ=0.5). Infinite bounds leave a coordinate unconstrained; non-finite
/// objective values are treated as +∞.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    cfg: &NmConfig,
) -> NmResult {
    let n = x0.len();
    assert!(n > 0, "nelder_mead needs at least one coordinate");
    assert_eq!(lower.len(), n);
    assert_eq!(upper.len(), n);

    let mut eval = |x: &[f64]| -> f64 {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // Initial simplex: x0 plus one step along each coordinate, sized from the
    // box when it is finite. A step clamped back onto x0 flips direction.
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut start = x0.to_vec();
    clamp_point(&mut start, lower, upper);
    simplex.push(start.clone());
    for i in 0..n {
        let span = upper[i] - lower[i];
        let step =
            if span.is_finite() { 0.1 * span } else { 0.25 * start[i].abs().max(1.0) };
        let mut v = start.clone();
        v[i] = (start[i] + step).clamp(lower[i], upper[i]);
        if v[i] == start[i] {
            v[i] = (start[i] - step).clamp(lower[i], upper[i]);
        }
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        iterations += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        let f_spread = values[worst] - values[best];
        let mut x_spread = 0.0f64;
        for v in &simplex {
            for i in 0..n {
                x_spread = x_spread.max((v[i] - simplex[best][i]).abs());
            }
        }
        let scale = 1.0 + simplex[best].iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        if f_spread <= cfg.ftol * (1.0 + values[best].abs()) && x_spread <= cfg.xtol * scale {
            converged = true;
            break;
        }

        // Centroid of all vertices but the worst.
        let mut centroid = vec![0.0; n];
        for (idx, v) in simplex.iter().enumerate() {
            if idx == worst {
                continue;
            }
            for i in 0..n {
                centroid[i] += v[i];
            }
        }
        for c in centroid.iter_mut() {
            *c /= n as f64;
        }

        let project = |point: Vec<f64>| -> Vec<f64> {
            let mut p = point;
            clamp_point(&mut p, lower, upper);
            p
        };
        let reflected = project(
            (0..n).map(|i| centroid[i] + (centroid[i] - simplex[worst][i])).collect(),
        );
        let f_reflected = eval(&reflected);

        if f_reflected < values[best] {
            let expanded = project(
                (0..n).map(|i| centroid[i] + 2.0 * (centroid[i] - simplex[worst][i])).collect(),
            );
            let f_expanded = eval(&expanded);
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
        } else if f_reflected < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
        } else {
            let (base, f_base) = if f_reflected < values[worst] {
                (reflected.clone(), f_reflected)
            } else {
                (simplex[worst].clone(), values[worst])
            };
            let contracted =
                project((0..n).map(|i| centroid[i] + 0.5 * (base[i] - centroid[i])).collect());
            let f_contracted = eval(&contracted);
            if f_contracted < f_base {
                simplex[worst] = contracted;
                values[worst] = f_contracted;
            } else {
                // Shrink everything toward the best vertex.
                let anchor = simplex[best].clone();
                for (idx, v) in simplex.iter_mut().enumerate() {
                    if idx == best {
                        continue;
                    }
                    for i in 0..n {
                        v[i] = anchor[i] + 0.5 * (v[i] - anchor[i]);
                    }
                    values[idx] = eval(v);
                }
            }
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    NmResult { x: simplex[best].clone(), value: values[best], iterations, converged }
}
