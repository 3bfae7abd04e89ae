//! Standalone SVG figures: log-log growth plots and phase-diagram maps.

use std::fmt::Write;

use crate::experiments::{FitPoint, LineFit};
use crate::extended::ExtendedReal;
use crate::theory::{classical_exponents, classify, ParamPoint, Region};

const W: f64 = 640.0;
const H: f64 = 440.0;
const MARGIN: f64 = 60.0;
const SHADE_LEVELS: f64 = 12.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Log-log scatter of `points` with the fitted line `log y = slope·log n + intercept`.
pub fn loglog_svg(points: &[FitPoint], fit: &LineFit, title: &str) -> String {
    let xs: Vec<f64> = points.iter().map(|pt| (pt.n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|pt| pt.value.ln()).collect();
    let (x0, x1) = span(&xs);
    let fitted: Vec<f64> = [x0, x1].iter().map(|x| fit.slope * x + fit.intercept).collect();
    let (y0, y1) = span(&ys.iter().chain(&fitted).copied().collect::<Vec<_>>());
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut svg = header();
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    axes(&mut svg);
    for pt in points {
        let x = sx((pt.n as f64).ln());
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle" font-size="11">{}</text>"#,
            H - MARGIN + 18.0,
            pt.n
        );
    }
    let _ = writeln!(
        svg,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c0392b" stroke-width="2"/>"##,
        sx(x0),
        sy(fitted[0]),
        sx(x1),
        sy(fitted[1])
    );
    for (x, y) in xs.iter().zip(&ys) {
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="4" fill="#2c3e50"/>"##,
            sx(*x),
            sy(*y)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="12">slope = {:.6}, R² = {:.6}</text>"#,
        MARGIN + 10.0,
        MARGIN + 10.0,
        fit.slope,
        fit.r_squared
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">n (log scale)</text>"#,
        W / 2.0,
        H - 12.0
    );
    svg.push_str("</svg>\n");
    svg
}

fn span(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn axes(svg: &mut String) {
    let _ = writeln!(
        svg,
        r#"<path d="M{m} {t} L{m} {b} L{r} {b}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN
    );
}

fn region_color(region: Region) -> (u8, u8, u8) {
    match region {
        Region::ThmALow => (52, 152, 219),
        Region::ThmAHigh => (39, 174, 96),
        Region::ThmB => (230, 126, 34),
        Region::PropA => (155, 89, 182),
        Region::PropB => (192, 57, 43),
    }
}

/// Region map of the `(p, r)` plane for degree `m`, shaded by the upper
/// exponent, with the classical critical curves overlaid. `p` runs over
/// `[1, p_max]` on a grid of `cells × cells`.
pub fn phase_diagram_svg(m: u32, r_max: f64, p_max: f64, cells: usize) -> String {
    let cells = cells.clamp(4, 400);
    let (r0, r1) = (1.0, r_max.max(1.5));
    let (p0, p1) = (1.0, p_max.max(2.0 * m as f64 + 1.0));
    let sx = |p: f64| MARGIN + (p - p0) / (p1 - p0) * (W - 2.0 * MARGIN);
    let sy = |r: f64| H - MARGIN - (r - r0) / (r1 - r0) * (H - 2.0 * MARGIN);
    let cw = (W - 2.0 * MARGIN) / cells as f64;
    let ch = (H - 2.0 * MARGIN) / cells as f64;

    let mut svg = header();
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="28" text-anchor="middle" font-size="16">m = {m}: regions and exponent of n</text>"#,
        W / 2.0
    );
    let max_expo = (m as f64).max(1.0);
    let color_at = |i: usize, j: usize| -> Option<(u8, u8, u8)> {
        let p = p0 + (i as f64 + 0.5) / cells as f64 * (p1 - p0);
        let r = r0 + (j as f64 + 0.5) / cells as f64 * (r1 - r0);
        let pt = ParamPoint::new(m, r, ExtendedReal::Finite(p)).ok()?;
        let v = classify(&pt);
        let (cr, cg, cb) = region_color(v.region);
        let level = ((v.exponent_upper / max_expo).clamp(0.0, 1.0) * SHADE_LEVELS).round() / SHADE_LEVELS;
        let shade = 1.0 - 0.75 * level;
        let mix = |c: u8| (c as f64 + (255.0 - c as f64) * (1.0 - shade) * 0.8) as u8;
        Some((mix(cr), mix(cg), mix(cb)))
    };
    for j in 0..cells {
        let row: Vec<Option<(u8, u8, u8)>> = (0..cells).map(|i| color_at(i, j)).collect();
        let mut start = 0;
        while start < cells {
            let mut end = start + 1;
            while end < cells && row[end] == row[start] {
                end += 1;
            }
            if let Some((cr, cg, cb)) = row[start] {
                let _ = writeln!(
                    svg,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({cr},{cg},{cb})"/>"#,
                    MARGIN + start as f64 * cw,
                    H - MARGIN - (j + 1) as f64 * ch,
                    (end - start) as f64 * cw + 0.3,
                    ch + 0.3,
                );
            }
            start = end;
        }
    }

    // Critical curves where the optimal power of n vanishes.
    let mut path = String::new();
    let steps = 200;
    for k in 0..=steps {
        let p = (m as f64 + 1e-6) + (p1 - m as f64) * k as f64 / steps as f64;
        let c = classical_exponents(m, ExtendedReal::Finite(p));
        if let Some(r) = c.hl_dsp.or(c.hl_pp) {
            if r <= r1 {
                let cmd = if path.is_empty() { 'M' } else { 'L' };
                let _ = write!(path, "{cmd}{:.2} {:.2} ", sx(p), sy(r));
            }
        }
    }
    let _ = writeln!(svg, r#"<path d="{path}" fill="none" stroke="black" stroke-width="2"/>"#);
    axes(&mut svg);

    for (k, region) in [Region::ThmALow, Region::ThmAHigh, Region::ThmB, Region::PropA, Region::PropB]
        .into_iter()
        .enumerate()
    {
        let (cr, cg, cb) = region_color(region);
        let y = MARGIN + 4.0 + 16.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="{:.1}" y="{y:.1}" width="10" height="10" fill="rgb({cr},{cg},{cb})"/><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
            W - MARGIN + 4.0,
            W - MARGIN + 18.0,
            y + 9.0,
            region.label()
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">p (1 to {p1})</text>"#,
        W / 2.0,
        H - 20.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" font-size="12" transform="rotate(-90 16 {:.1})" text-anchor="middle">r (1 to {r1})</text>"#,
        H / 2.0,
        H / 2.0
    );
    svg.push_str("</svg>\n");
    svg
}
