use std::collections::BTreeMap;
use std::fmt::Write as _;

use nabfs_core::simbench::{GridResult, MetricSummary};

use crate::args::MetricArg;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

impl MetricArg {
    fn name(self) -> &'static str {
        match self {
            MetricArg::Power => "power",
            MetricArg::Type1 => "type I error",
            MetricArg::Jaccard => "Jaccard",
        }
    }

    fn pick(self, s: &MetricSummary) -> f64 {
        match self {
            MetricArg::Power => s.power,
            MetricArg::Type1 => s.type1,
            MetricArg::Jaccard => s.jaccard,
        }
    }
}

/// Static SVG: `metric` against rho, one polyline per `(n, l)`. Both axes span [0, 1].
pub fn line_chart(grid: &GridResult, metric: MetricArg) -> String {
    let mut series: BTreeMap<(usize, usize), Vec<(f64, f64)>> = BTreeMap::new();
    for row in &grid.rows {
        let points = series.entry((row.n, row.l)).or_default();
        if let Some(s) = &row.summary {
            points.push((row.rho, metric.pick(s)));
        }
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x = |v: f64| LEFT + v.clamp(0.0, 1.0) * plot_w;
    let y = |v: f64| TOP + (1.0 - v.clamp(0.0, 1.0)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for i in 0..=5 {
        let t = i as f64 / 5.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#dddddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{t:.1}</text>"##,
            LEFT,
            y(t),
            LEFT + plot_w,
            y(t),
            LEFT - 6.0,
            y(t) + 4.0
        );
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{t:.1}</text>"#, x(t), TOP + plot_h + 18.0);
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">rho</text>"#, LEFT + plot_w / 2.0, HEIGHT - 10.0);
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        metric.name()
    );

    for (i, ((n, l), mut points)) in series.into_iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = points.iter().map(|&(r, v)| format!("{:.1},{:.1}", x(r), y(v))).collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#, path.join(" "));
        for &(r, v) in &points {
            let _ = writeln!(svg, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{colour}"/>"#, x(r), y(v));
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{colour}" stroke-width="2"/><text x="{:.1}" y="{:.1}">n={n}, l={l}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
