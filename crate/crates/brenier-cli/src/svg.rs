//! Standalone SVG log–log scatter plots with a fitted-slope annotation.
//! No rendering dependency; the output is diffable text on a fixed
//! 800×600 canvas.

use brenier::verify::HolderFit;
use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 70.0;

/// Renders positive `(x, y)` samples on log–log axes together with the
/// fitted power law; the slope is printed to three decimals.
pub fn plot_loglog(
    samples: &[(f64, f64)],
    fit: &HolderFit,
    x_label: &str,
    y_label: &str,
    title: &str,
) -> Result<String, String> {
    if samples.len() < 4 {
        return Err("log-log plot needs at least 4 samples".into());
    }
    if samples.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err("log-log plot needs positive samples".into());
    }
    let lx: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ly: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let (x0, x1) = bounds(&lx);
    let (y0, y1) = bounds(&ly);
    let sx = |v: f64| MARGIN + (v - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |v: f64| HEIGHT - MARGIN - (v - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    // axes
    let _ = writeln!(
        svg,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>",
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        HEIGHT - 20.0,
        xml_escape(x_label)
    );
    let _ = writeln!(
        svg,
        "<text x=\"22\" y=\"{}\" font-size=\"16\" text-anchor=\"middle\" transform=\"rotate(-90 22 {})\">{}</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        xml_escape(y_label)
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"40\" font-size=\"18\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        xml_escape(title)
    );
    // tick labels at the log-range corners
    for (v, px) in [(x0, sx(x0)), (x1, sx(x1))] {
        let _ = writeln!(
            svg,
            "<text x=\"{px}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{:.3e}</text>",
            HEIGHT - MARGIN + 20.0,
            v.exp()
        );
    }
    for (v, py) in [(y0, sy(y0)), (y1, sy(y1))] {
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{py}\" font-size=\"12\" text-anchor=\"end\">{:.3e}</text>",
            MARGIN - 8.0,
            v.exp()
        );
    }
    // fitted line across the x-range
    let fy0 = fit.intercept + fit.slope * x0;
    let fy1 = fit.intercept + fit.slope * x1;
    let _ = writeln!(
        svg,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#d62728\" stroke-width=\"1.5\"/>",
        sx(x0),
        sy(fy0),
        sx(x1),
        sy(fy1)
    );
    // samples
    for (x, y) in lx.iter().zip(&ly) {
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"#1f77b4\"/>",
            sx(*x),
            sy(*y)
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"70\" font-size=\"16\" text-anchor=\"end\">slope {:.3}</text>",
        WIDTH - MARGIN,
        fit.slope
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
