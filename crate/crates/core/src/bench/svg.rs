//! Static SVG charts: grouped bars or one polyline per structure.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{summarize, BenchRow, Summary};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    Bar,
    Line,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 7] = [
    "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860", "#da8bc3",
];

fn x_value(s: &Summary) -> f64 {
    if s.test == "zipf-param" {
        s.alpha
    } else {
        s.n as f64
    }
}

fn y_value(s: &Summary) -> f64 {
    if s.test == "size" {
        s.nodes as f64
    } else {
        s.avg_comparisons
    }
}

fn fmt_x(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        format!("{x:.2}")
    }
}

pub fn render_svg(rows: &[BenchRow], chart: Chart) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Domain("no rows to plot".into()));
    }
    let summaries = summarize(rows);
    let mut series: Vec<&str> = Vec::new();
    let mut xs: Vec<f64> = Vec::new();
    for s in &summaries {
        if !series.contains(&s.structure.as_str()) {
            series.push(&s.structure);
        }
        if !xs.contains(&x_value(s)) {
            xs.push(x_value(s));
        }
    }
    xs.sort_by(f64::total_cmp);
    let y_max = summaries.iter().map(y_value).fold(0.0, f64::max).max(1.0) * 1.1;
    let y_label = if summaries[0].test == "size" {
        "nodes"
    } else {
        "average comparisons"
    };
    let x_label = if summaries[0].test == "zipf-param" {
        "alpha"
    } else {
        "n"
    };

    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let y_px = |y: f64| HEIGHT - MARGIN - y / y_max * plot_h;
    let slot = plot_w / xs.len() as f64;
    let slot_center = |i: usize| MARGIN + slot * (i as f64 + 0.5);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        summaries[0].test
    );
    // axes
    let _ = writeln!(
        out,
        r#"<line x1="{MARGIN}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{b}" stroke="black"/>"#,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    for tick in 0..=4 {
        let y = y_max * tick as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{:.1}</text>"#,
            MARGIN - 6.0,
            y_px(y) + 4.0,
            y
        );
    }
    for (i, &x) in xs.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            slot_center(i),
            HEIGHT - MARGIN + 18.0,
            fmt_x(x)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{y_label}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    let bar_w = slot * 0.8 / series.len() as f64;
    for (si, name) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<g class="series" data-structure="{name}" fill="{color}" stroke="{color}">"#
        );
        let mut points = Vec::new();
        for (xi, &x) in xs.iter().enumerate() {
            let Some(s) = summaries
                .iter()
                .find(|s| s.structure == *name && x_value(s) == x)
            else {
                continue;
            };
            let y = y_value(s);
            match chart {
                Chart::Bar => {
                    let left = slot_center(xi) - slot * 0.4 + bar_w * si as f64;
                    let _ = writeln!(
                        out,
                        r#"<rect class="point" x="{left:.1}" y="{:.1}" width="{bar_w:.1}" height="{:.1}"><title>{name} {}: {y:.4}</title></rect>"#,
                        y_px(y),
                        HEIGHT - MARGIN - y_px(y),
                        fmt_x(x)
                    );
                }
                Chart::Line => {
                    let (cx, cy) = (slot_center(xi), y_px(y));
                    points.push(format!("{cx:.1},{cy:.1}"));
                    let _ = writeln!(
                        out,
                        r#"<circle class="point" cx="{cx:.1}" cy="{cy:.1}" r="3"><title>{name} {}: {y:.4}</title></circle>"#,
                        fmt_x(x)
                    );
                }
            }
        }
        if chart == Chart::Line && points.len() > 1 {
            let _ = writeln!(
                out,
                r#"<polyline fill="none" points="{}"/>"#,
                points.join(" ")
            );
        }
        let ly = MARGIN + 16.0 * si as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="10" height="10"/><text x="{}" y="{}" stroke="none" fill="black">{name}</text>"#,
            WIDTH - MARGIN - 110.0,
            ly - 9.0,
            WIDTH - MARGIN - 95.0,
            ly
        );
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_svg(rows: &[BenchRow], path: &Path, chart: Chart) -> Result<()> {
    let svg = render_svg(rows, chart)?;
    fs::write(path, svg).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
