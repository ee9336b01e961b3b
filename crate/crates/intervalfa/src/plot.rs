//! SVG factor-plane plots: every unit drawn as an axis-aligned rectangle
//! spanning its score interval on the first factor × its score interval on
//! the second. Degenerate extents collapse to one-pixel segments.

use crate::error::{Error, Result};
use crate::scores::FactorScores;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 52.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 16.0;
const MARGIN_BOTTOM: f64 = 42.0;
const TICKS: usize = 5;

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn from_extents(extents: impl Iterator<Item = (f64, f64)>) -> Self {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in extents {
            lo = lo.min(a);
            hi = hi.max(b);
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Self { lo: -1.0, hi: 1.0 };
        }
        let span = hi - lo;
        let pad = if span > 0.0 { 0.05 * span } else { 0.5 };
        Self { lo: lo - pad, hi: hi + pad }
    }

    fn fraction(&self, v: f64) -> f64 {
        (v - self.lo) / (self.hi - self.lo)
    }
}

/// Renders the first two factors of a score grid as an SVG scatter of
/// rectangles with 40% fill opacity. Optional per-unit labels are drawn at
/// the rectangle centers. Requires at least two factors.
pub fn factor_plane_svg(scores: &FactorScores, labels: Option<&[String]>) -> Result<String> {
    if scores.m() < 2 {
        return Err(Error::domain(format!(
            "the factor-plane plot needs at least two factors, got {}",
            scores.m()
        )));
    }
    if let Some(labels) = labels {
        if labels.len() != scores.n() {
            return Err(Error::domain(format!(
                "{} labels for {} units",
                labels.len(),
                scores.n()
            )));
        }
    }
    let xs = Axis::from_extents(scores.grid.iter().map(|u| {
        (u[0].center - u[0].half_range, u[0].center + u[0].half_range)
    }));
    let ys = Axis::from_extents(scores.grid.iter().map(|u| {
        (u[1].center - u[1].half_range, u[1].center + u[1].half_range)
    }));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |v: f64| MARGIN_LEFT + xs.fraction(v) * plot_w;
    let sy = |v: f64| MARGIN_TOP + (1.0 - ys.fraction(v)) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n"
    ));

    for i in 0..TICKS {
        let f = i as f64 / (TICKS - 1) as f64;
        let xv = xs.lo + f * (xs.hi - xs.lo);
        let yv = ys.lo + f * (ys.hi - ys.lo);
        let x = sx(xv);
        let y = sy(yv);
        svg.push_str(&format!(
            "  <line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#333\" \
             stroke-width=\"1\"/>\n",
            MARGIN_TOP + plot_h,
            MARGIN_TOP + plot_h + 4.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"middle\" \
             font-family=\"sans-serif\">{xv:.2}</text>\n",
            MARGIN_TOP + plot_h + 15.0
        ));
        svg.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{MARGIN_LEFT}\" y2=\"{y:.2}\" \
             stroke=\"#333\" stroke-width=\"1\"/>\n",
            MARGIN_LEFT - 4.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"end\" \
             font-family=\"sans-serif\">{yv:.2}</text>\n",
            MARGIN_LEFT - 7.0,
            y + 3.5
        ));
    }
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" \
         font-family=\"sans-serif\">Factor 1</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 8.0
    ));
    svg.push_str(&format!(
        "  <text x=\"14\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" \
         font-family=\"sans-serif\" transform=\"rotate(-90 14 {:.2})\">Factor 2</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    ));

    for (i, unit) in scores.grid.iter().enumerate() {
        let x0 = sx(unit[0].center - unit[0].half_range);
        let x1 = sx(unit[0].center + unit[0].half_range);
        let y0 = sy(unit[1].center + unit[1].half_range);
        let y1 = sy(unit[1].center - unit[1].half_range);
        // Degenerate intervals still get one visible pixel.
        let w = (x1 - x0).max(1.0);
        let h = (y1 - y0).max(1.0);
        svg.push_str(&format!(
            "  <rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" \
             fill=\"#1f77b4\" fill-opacity=\"0.4\" stroke=\"#1f77b4\" stroke-width=\"0.75\"/>\n"
        ));
        if let Some(labels) = labels {
            svg.push_str(&format!(
                "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"9\" text-anchor=\"middle\" \
                 font-family=\"sans-serif\">{}</text>\n",
                (x0 + x1) / 2.0,
                (y0 + y1) / 2.0 + 3.0,
                escape(&labels[i])
            ));
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scores::{FactorScores, ScoreMethod, ScoreParams};
    use crate::Model;

    fn scores_fixture(units: Vec<Vec<(f64, f64)>>) -> FactorScores {
        let grid = units
            .into_iter()
            .map(|u| {
                u.into_iter().map(|(c, r)| ScoreParams::new(c, r, 0.5).unwrap()).collect()
            })
            .collect();
        FactorScores {
            model: Model::Uniform,
            method: ScoreMethod::Bartlett,
            grid,
            objective: 0.0,
            distance: 0.0,
            unit_converged: vec![true; 2],
            converged: true,
            max_abs_corr: None,
        }
    }

    #[test]
    fn draws_one_rectangle_per_unit() {
        let s = scores_fixture(vec![
            vec![(0.0, 1.0), (1.0, 0.5)],
            vec![(2.0, 0.2), (-1.0, 0.3)],
        ]);
        let svg = factor_plane_svg(&s, None).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("fill-opacity=\"0.4\"").count(), 2);
        assert_eq!(svg.matches("<text").count(), 2 * TICKS + 2);
    }

    #[test]
    fn degenerate_extents_render_one_pixel_wide() {
        let s = scores_fixture(vec![
            vec![(0.0, 0.0), (1.0, 0.5)],
            vec![(2.0, 0.2), (-1.0, 0.0)],
        ]);
        let svg = factor_plane_svg(&s, None).unwrap();
        assert!(svg.contains("width=\"1.00\""), "{svg}");
        assert!(svg.contains("height=\"1.00\""), "{svg}");
    }

    #[test]
    fn labels_are_drawn_and_escaped() {
        let s = scores_fixture(vec![
            vec![(0.0, 1.0), (1.0, 0.5)],
            vec![(2.0, 0.2), (-1.0, 0.3)],
        ]);
        let labels = vec!["a&b".to_string(), "c<d".to_string()];
        let svg = factor_plane_svg(&s, Some(&labels)).unwrap();
        assert!(svg.contains("a&amp;b"));
        assert!(svg.contains("c&lt;d"));
        assert!(factor_plane_svg(&s, Some(&labels[..1].to_vec())).is_err());
    }

    #[test]
    fn needs_two_factors() {
        let s = scores_fixture(vec![vec![(0.0, 1.0)], vec![(2.0, 0.2)]]);
        assert!(factor_plane_svg(&s, None).is_err());
    }

    #[test]
    fn output_is_deterministic() {
        let s = scores_fixture(vec![
            vec![(0.123456, 1.0), (1.0, 0.5)],
            vec![(2.0, 0.2), (-1.0, 0.3)],
        ]);
        assert_eq!(factor_plane_svg(&s, None).unwrap(), factor_plane_svg(&s, None).unwrap());
    }

    #[test]
    fn identical_point_units_still_produce_a_finite_frame() {
        let s = scores_fixture(vec![
            vec![(1.0, 0.0), (2.0, 0.0)],
            vec![(1.0, 0.0), (2.0, 0.0)],
        ]);
        let svg = factor_plane_svg(&s, None).unwrap();
        assert!(!svg.contains("NaN"));
        assert!(!svg.contains("inf"));
    }
}
