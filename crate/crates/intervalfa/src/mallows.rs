//! Squared Mallows (2-Wasserstein) distances between within-interval laws:
//! closed forms for uniform and triangular observations, plus a quadrature
//! route for arbitrary piecewise quantile functions such as linear
//! combinations of factor quantiles.
//!
//! The squared distance between two laws with quantile functions Ψa, Ψb is
//! ∫₀¹ (Ψa(t) − Ψb(t))² dt.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::interval::{triangular_quantile, Interval, Model};
use crate::quad::GaussLegendre;

/// Clamps an arcsine argument that rounding may have pushed infinitesimally
/// outside [-1, 1].
fn clamp_unit(x: f64) -> f64 {
    debug_assert!(
        (-1.0 - 1e-12..=1.0 + 1e-12).contains(&x),
        "arcsine argument {x} far outside [-1, 1]"
    );
    x.clamp(-1.0, 1.0)
}

/// Closed-form squared distance between two non-degenerate triangular laws
/// whose asymmetry indices (m−c)/(2r) satisfy first ≤ second.
///
/// Works from the endpoint spreads m−l and u−m rather than the rounded
/// center: the radicals contain r ± (m−c), which cancels catastrophically
/// (√ulp ≈ 1e-8) when a mode sits on an endpoint, while the spreads stay
/// exactly zero there.
fn triangular_pair_sq(x: (f64, f64, f64), y: (f64, f64, f64)) -> f64 {
    let (l1, m1, u1) = x;
    let (l2, m2, u2) = y;
    let (a1, b1) = (m1 - l1, u1 - m1);
    let (a2, b2) = (m2 - l2, u2 - m2);
    let (r1, r2) = (0.5 * (u1 - l1), 0.5 * (u2 - l2));
    let (e1, e2) = (0.5 * (a1 - b1), 0.5 * (a2 - b2));
    let s1 = clamp_unit((a1 - b1) / (a1 + b1));
    let s2 = clamp_unit((a2 - b2) / (a2 + b2));
    let dc = 0.5 * ((l1 - l2) + (u1 - u2));
    let dr = r1 - r2;
    let rr = r1 * r2;
    let mut v = dc * dc + dr * dr / 6.0 + e1 * e1 / 6.0 + e2 * e2 / 6.0;
    v -= 5.0 / 3.0 * rr;
    v += 2.0 / 3.0 * e1 * (dc + r2);
    v -= 2.0 / 3.0 * e2 * (dc + r1);
    v += (rr * a1 * a2).sqrt() / 6.0 * (5.0 - s1);
    v += (rr * b1 * b2).sqrt() / 6.0 * (5.0 + s2);
    v += (rr * b1 * a2).sqrt() / 2.0 * (s2.asin() - s1.asin());
    v
}

/// Closed-form squared distance between a non-degenerate triangular law and a
/// point mass at `cb`.
fn triangular_point_sq(l: f64, m: f64, u: f64, cb: f64) -> f64 {
    let (a, b) = (m - l, u - m);
    let r = 0.5 * (u - l);
    let e = 0.5 * (a - b);
    let d = 0.5 * ((l - cb) + (u - cb));
    d * d - 4.0 / 3.0 * e * e - r * r / 3.0
        + 2.0 / 3.0 * e * d
        + (a.powi(3) + b.powi(3)) / (4.0 * r)
}

/// Closed-form squared Mallows distance between two interval observations
/// under the given within-interval model.
///
/// Symmetric, non-negative, and zero exactly when the two laws coincide. Two
/// degenerate intervals reduce to the squared Euclidean distance of their
/// centers.
pub fn mallows_sq(a: &Interval, b: &Interval, model: Model) -> Result<f64> {
    let dc = a.center() - b.center();
    let dr = a.half_range() - b.half_range();
    match model {
        Model::Uniform => Ok(dc * dc + dr * dr / 3.0),
        Model::SymmetricTriangular => Ok(dc * dc + dr * dr / 6.0),
        Model::Triangular => {
            let ma = a.model_mode(model)?;
            let mb = b.model_mode(model)?;
            let ta = (a.lower(), ma, a.upper());
            let tb = (b.lower(), mb, b.upper());
            let v = match (a.half_range() > 0.0, b.half_range() > 0.0) {
                (false, false) => dc * dc,
                (true, false) => triangular_point_sq(ta.0, ta.1, ta.2, b.center()),
                (false, true) => triangular_point_sq(tb.0, tb.1, tb.2, a.center()),
                (true, true) => {
                    // The two branch formulas are mirror images; ordering by
                    // the asymmetry index (m−c)/(2r) selects the one whose
                    // arcsine difference is non-negative.
                    let sa = ((ma - a.lower()) - (a.upper() - ma)) / (a.upper() - a.lower());
                    let sb = ((mb - b.lower()) - (b.upper() - mb)) / (b.upper() - b.lower());
                    if sa <= sb {
                        triangular_pair_sq(ta, tb)
                    } else {
                        triangular_pair_sq(tb, ta)
                    }
                }
            };
            // Cancellation can leave a tiny negative residue for
            // near-identical observations.
            Ok(v.max(0.0))
        }
    }
}

/// One elementary quantile function entering a linear combination.
#[derive(Clone, Copy, Debug)]
enum Atom {
    Uniform { lower: f64, upper: f64 },
    Triangular { lower: f64, mode: f64, upper: f64 },
}

impl Atom {
    fn eval(&self, t: f64) -> f64 {
        match *self {
            Atom::Uniform { lower, upper } => {
                if lower == upper {
                    lower
                } else {
                    lower + (upper - lower) * t
                }
            }
            Atom::Triangular { lower, mode, upper } => {
                if lower == upper {
                    lower
                } else {
                    triangular_quantile(lower, mode, upper, t)
                }
            }
        }
    }

    /// Interior kink of the quantile function, if any.
    fn interior_breakpoint(&self) -> Option<f64> {
        match *self {
            Atom::Uniform { .. } => None,
            Atom::Triangular { lower, mode, upper } => {
                if upper > lower {
                    let ts = (mode - lower) / (upper - lower);
                    (ts > 0.0 && ts < 1.0).then_some(ts)
                } else {
                    None
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Term {
    coef: f64,
    atom: Atom,
}

/// A finite linear combination of interval quantile functions,
/// Ψ(t) = Σ λ_i ψ_i(t) for λ_i > 0 plus Σ λ_i ψ_i(1−t) for λ_i < 0,
/// which keeps the combination non-decreasing in t.
#[derive(Clone, Debug)]
pub struct PiecewiseQuantile {
    terms: Vec<Term>,
    /// Sorted kink locations, always starting at 0 and ending at 1.
    breakpoints: Vec<f64>,
}

impl PiecewiseQuantile {
    fn from_terms(terms: Vec<Term>) -> Self {
        let terms: Vec<Term> = terms.into_iter().filter(|t| t.coef != 0.0).collect();
        let mut breakpoints = vec![0.0, 1.0];
        for term in &terms {
            if let Some(b) = term.atom.interior_breakpoint() {
                breakpoints.push(if term.coef < 0.0 { 1.0 - b } else { b });
            }
        }
        breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breakpoints.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        Self { terms, breakpoints }
    }

    /// Evaluates the combined quantile function at t ∈ [0, 1]; negative
    /// coefficients read their part at 1−t.
    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for term in &self.terms {
            let arg = if term.coef < 0.0 { 1.0 - t } else { t };
            acc += term.coef * term.atom.eval(arg);
        }
        acc
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    #[cfg(test)]
    fn is_non_decreasing(&self, grid: usize) -> bool {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=grid {
            let v = self.eval(i as f64 / grid as f64);
            if v < prev - 1e-12 {
                return false;
            }
            prev = v;
        }
        true
    }
}

/// Wraps a single observation's quantile function; agrees with
/// [`Interval::quantile`] pointwise.
pub fn lift(obs: &Interval, model: Model) -> Result<PiecewiseQuantile> {
    let atom = match model {
        Model::Uniform => Atom::Uniform { lower: obs.lower(), upper: obs.upper() },
        Model::SymmetricTriangular | Model::Triangular => Atom::Triangular {
            lower: obs.lower(),
            mode: obs.model_mode(model)?,
            upper: obs.upper(),
        },
    };
    Ok(PiecewiseQuantile::from_terms(vec![Term { coef: 1.0, atom }]))
}

/// Linear combination of quantile functions with the reflection rule for
/// negative coefficients. Zero coefficients drop out.
pub fn combine(coeffs: &[f64], parts: &[PiecewiseQuantile]) -> Result<PiecewiseQuantile> {
    if coeffs.len() != parts.len() {
        return Err(Error::domain(format!(
            "combine needs matching lengths, got {} coefficients and {} parts",
            coeffs.len(),
            parts.len()
        )));
    }
    let mut terms = Vec::new();
    for (&lambda, part) in coeffs.iter().zip(parts) {
        if !lambda.is_finite() {
            return Err(Error::domain(format!("non-finite combination coefficient {lambda}")));
        }
        if lambda == 0.0 {
            continue;
        }
        for term in &part.terms {
            // A doubly-reflected part (negative outer and inner coefficient)
            // reads at 1−(1−t)=t again, which is exactly the sign of the
            // product coefficient.
            terms.push(Term { coef: lambda * term.coef, atom: term.atom });
        }
    }
    Ok(PiecewiseQuantile::from_terms(terms))
}

/// Merges two breakpoint lists into one sorted list covering [0, 1].
fn merge_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(|x, y| x.partial_cmp(y).unwrap());
    all.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
    all
}

/// Integrates f over t ∈ [0, 1] split at the given breakpoints, under the
/// substitution t = sin²(πs/2). The substitution turns the √t and √(1−t)
/// behaviour of triangular quantiles into smooth functions of s, so each
/// segment converges spectrally.
pub(crate) fn integrate_split<F: FnMut(f64) -> f64>(
    breakpoints: &[f64],
    rule: &GaussLegendre,
    mut f: F,
) -> f64 {
    let to_s = |t: f64| 2.0 / PI * clamp_unit(t.sqrt()).asin();
    let mut acc = 0.0;
    for w in breakpoints.windows(2) {
        let (s0, s1) = (to_s(w[0]), to_s(w[1]));
        if s1 - s0 < 1e-15 {
            continue;
        }
        acc += rule.integrate(s0, s1, |s| {
            let half = (PI * s / 2.0).sin();
            f(half * half) * (PI / 2.0) * (PI * s).sin()
        });
    }
    acc
}

pub(crate) fn mallows_sq_with_rule(
    a: &PiecewiseQuantile,
    b: &PiecewiseQuantile,
    rule: &GaussLegendre,
) -> f64 {
    let grid = merge_breakpoints(&a.breakpoints, &b.breakpoints);
    integrate_split(&grid, rule, |t| {
        let d = a.eval(t) - b.eval(t);
        d * d
    })
}

/// Squared Mallows distance between two piecewise quantile functions by
/// composite Gauss–Legendre quadrature on the union of their breakpoints.
pub fn mallows_sq_numeric(
    a: &PiecewiseQuantile,
    b: &PiecewiseQuantile,
    nodes_per_segment: usize,
) -> f64 {
    mallows_sq_with_rule(a, b, &GaussLegendre::new(nodes_per_segment))
}
