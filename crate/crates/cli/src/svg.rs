//! Self-contained two-panel SVG: log value against `n` for each scale, and the
//! dimension ratio against `ln(1/eps)`.

use std::fmt::Write;

use crate::experiment::{Cell, Summary};

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN: f64 = 48.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

struct Panel {
    x0: f64,
    title: String,
    x_label: &'static str,
    y_label: &'static str,
    series: Vec<Vec<(f64, f64)>>,
}

fn bounds(series: &[Vec<(f64, f64)>]) -> Option<(f64, f64, f64, f64)> {
    let pts: Vec<&(f64, f64)> = series.iter().flatten().filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
    if pts.is_empty() {
        return None;
    }
    let fold = |f: fn(&(f64, f64)) -> f64| {
        pts.iter()
            .map(|p| f(p))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (mut xa, mut xb) = fold(|p| p.0);
    let (mut ya, mut yb) = fold(|p| p.1);
    if xb - xa < 1e-12 {
        xa -= 0.5;
        xb += 0.5;
    }
    if yb - ya < 1e-12 {
        ya -= 0.5;
        yb += 0.5;
    }
    Some((xa, xb, ya, yb))
}

fn draw(out: &mut String, panel: &Panel) {
    let (x0, y0) = (panel.x0, 0.0);
    let inner_w = PANEL_W - 2.0 * MARGIN;
    let inner_h = PANEL_H - 2.0 * MARGIN;
    let _ = writeln!(
        out,
        r##"<g><rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#444"/>"##,
        x0 + MARGIN,
        y0 + MARGIN,
        inner_w,
        inner_h
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{}</text>"#,
        x0 + PANEL_W / 2.0,
        y0 + MARGIN - 14.0,
        panel.title
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
        x0 + PANEL_W / 2.0,
        y0 + PANEL_H - 10.0,
        panel.x_label
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
        x0 + 14.0,
        y0 + PANEL_H / 2.0,
        x0 + 14.0,
        y0 + PANEL_H / 2.0,
        panel.y_label
    );
    let Some((xa, xb, ya, yb)) = bounds(&panel.series) else {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">no data</text></g>"#,
            x0 + PANEL_W / 2.0,
            y0 + PANEL_H / 2.0
        );
        return;
    };
    let sx = |x: f64| x0 + MARGIN + (x - xa) / (xb - xa) * inner_w;
    let sy = |y: f64| y0 + MARGIN + inner_h - (y - ya) / (yb - ya) * inner_h;
    for (label, x, y, anchor) in [
        (xa, sx(xa), y0 + PANEL_H - MARGIN + 14.0, "start"),
        (xb, sx(xb), y0 + PANEL_H - MARGIN + 14.0, "end"),
    ] {
        let _ = writeln!(
            out,
            r#"<text x="{x:.1}" y="{y:.1}" font-size="10" text-anchor="{anchor}">{label:.2}</text>"#
        );
    }
    for (label, y) in [(ya, sy(ya)), (yb, sy(yb))] {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{label:.2}</text>"#,
            x0 + MARGIN - 4.0,
            y + 3.0
        );
    }
    for (i, s) in panel.series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        for p in &pts {
            let (x, y) = p.split_once(',').expect("formatted pair");
            let _ = writeln!(out, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{colour}"/>"#);
        }
    }
    out.push_str("</g>\n");
}

pub fn render(cells: &[Cell], summary: &Summary) -> String {
    let eps: Vec<f64> = summary.config.eps.clone();
    let left = if summary.growth.is_empty() {
        // box counts: a single curve across scales
        Panel {
            x0: 0.0,
            title: format!("{} against scale", summary.quantity),
            x_label: "ln(1/eps)",
            y_label: "ln value",
            series: vec![cells.iter().map(|c| ((1.0 / c.eps).ln(), c.value.ln())).collect()],
        }
    } else {
        let count = summary.config.quantity.is_count();
        Panel {
            x0: 0.0,
            title: format!("{} growth in n", summary.quantity),
            x_label: "n",
            y_label: if count { "ln value" } else { "n * value" },
            series: eps
                .iter()
                .map(|&e| {
                    cells
                        .iter()
                        .filter(|c| c.eps == e)
                        .map(|c| {
                            let y = if count { c.value.ln() } else { c.n as f64 * c.value };
                            (c.n as f64, y)
                        })
                        .collect()
                })
                .collect(),
        }
    };
    let right = Panel {
        x0: PANEL_W,
        title: "dimension ratio".into(),
        x_label: "ln(1/eps)",
        y_label: "rate / ln(1/eps)",
        series: summary
            .dimension
            .as_ref()
            .map(|d| vec![d.ladder.iter().zip(&d.ratios).map(|(e, r)| ((1.0 / e).ln(), *r)).collect()])
            .unwrap_or_default(),
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}" font-family="sans-serif">"#,
        2.0 * PANEL_W,
        PANEL_H,
        2.0 * PANEL_W,
        PANEL_H
    );
    out.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    out.push('\n');
    draw(&mut out, &left);
    draw(&mut out, &right);
    out.push_str("</svg>\n");
    out
}
