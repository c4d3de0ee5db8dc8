//! Self-contained SVG for the decay experiment: `log2 e(q)` against
//! `k = -log2 q`, with the fitted line and reference slopes.

use std::fmt::Write;

use cusplab::equidist::ExperimentReport;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 56.0;

pub fn decay_plot(r: &ExperimentReport) -> String {
    let pts: Vec<(f64, f64)> = r
        .ks
        .iter()
        .zip(&r.errors)
        .filter(|(_, e)| **e > 0.0)
        .map(|(k, e)| (*k as f64, e.log2()))
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    if pts.is_empty() {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">e(q) = 0 on the whole grid</text>"#, W / 2.0, H / 2.0);
        svg.push_str("</svg>\n");
        return svg;
    }
    let (kx0, kx1) = (r.ks[0] as f64 - 0.5, *r.ks.last().unwrap() as f64 + 0.5);
    let lo = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min).floor() - 1.0;
    let hi = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max).ceil() + 1.0;
    let sx = |k: f64| PAD + (k - kx0) / (kx1 - kx0) * (W - 2.0 * PAD);
    let sy = |v: f64| H - PAD - (v - lo) / (hi - lo) * (H - 2.0 * PAD);
    let _ = writeln!(
        svg,
        r#"<path d="M{a} {b} L{a} {c} L{d} {c}" fill="none" stroke="black"/>"#,
        a = PAD,
        b = PAD,
        c = H - PAD,
        d = W - PAD
    );
    for k in &r.ks {
        let x = sx(*k as f64);
        let _ = writeln!(svg, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{k}</text>"#, H - PAD + 16.0);
    }
    let mut v = lo.ceil();
    while v <= hi {
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">2^{v}</text>"#, PAD - 6.0, sy(v) + 4.0);
        v += ((hi - lo) / 8.0).ceil().max(1.0);
    }
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">k = -log2 q</text>"#, W / 2.0, H - 12.0);
    let _ = writeln!(svg, r#"<text x="14" y="{:.1}" transform="rotate(-90 14 {:.1})" text-anchor="middle">e(q) = |m_q(f) - m(f)|</text>"#, H / 2.0, H / 2.0);
    // reference slopes anchored at the first fitted point (log2 e = -alpha k + c)
    let anchor = r.fitted_indices.first().map(|&i| (r.ks[i] as f64, r.errors[i].log2())).unwrap_or(pts[0]);
    let line = |svg: &mut String, alpha: f64, c0: (f64, f64), colour: &str, dash: &str, label: &str| {
        let (k0, v0) = c0;
        let (ka, kb) = (kx0 + 0.5, kx1 - 0.5);
        let va = v0 - alpha * (ka - k0);
        let vb = v0 - alpha * (kb - k0);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{colour}" stroke-dasharray="{dash}"/>"#,
            sx(ka),
            sy(va),
            sx(kb),
            sy(vb)
        );
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" fill="{colour}">{label}</text>"#, sx(kb) - 80.0, sy(vb) - 6.0);
    };
    line(&mut svg, 0.5, anchor, "#888888", "6 4", "slope 1/2");
    line(&mut svg, 0.75, anchor, "#2266aa", "6 4", "slope 3/4");
    if let (Some(b), Some(a)) = (r.fitted_slope, r.intercept) {
        // fit is ln e = a + b ln q, i.e. log2 e = a / ln 2 - b k
        let k0 = r.ks[0] as f64;
        let v0 = a / std::f64::consts::LN_2 - b * k0;
        line(&mut svg, b, (k0, v0), "#cc3311", "", &format!("fit {b:.3}"));
    }
    for (k, v) in &pts {
        let _ = writeln!(svg, r#"<circle cx="{:.1}" cy="{:.1}" r="3.5" fill="black"/>"#, sx(*k), sy(*v));
    }
    svg.push_str("</svg>\n");
    svg
}
