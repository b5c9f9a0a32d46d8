//! Self-contained SVG line plots with a log-scale y-axis: one mean polyline
//! and one min/max band per solver, a legend, and optional reference-rate
//! curves.

use crate::error::{Error, Result};
use crate::experiment::AggregatedSeries;
use std::fmt::Write;

/// Smallest value drawn; lower values (including zero) are raised to it.
pub const Y_FLOOR: f64 = 1e-16;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/// Reference curve `start·r^t`, or `start·r^{2t}` when `squared`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateOverlay {
    pub rate: f64,
    pub squared: bool,
    /// Value at `t = 0`; defaults to the largest initial mean.
    pub start: Option<f64>,
    pub label: Option<String>,
}

impl RateOverlay {
    pub fn new(rate: f64) -> Self {
        Self {
            rate,
            squared: false,
            start: None,
            label: None,
        }
    }

    pub fn squared(mut self) -> Self {
        self.squared = true;
        self
    }

    pub fn from_value(mut self, v: f64) -> Self {
        self.start = Some(v);
        self
    }

    fn name(&self) -> String {
        self.label.clone().unwrap_or_else(|| {
            if self.squared {
                format!("r^2t, r = {}", self.rate)
            } else {
                format!("r^t, r = {}", self.rate)
            }
        })
    }
}

/// Points `(t, start·r^t)` (or `r^{2t}`) for `t = 0..=t_max`.
pub fn overlay_points(overlay: &RateOverlay, start: f64, t_max: usize) -> Vec<(f64, f64)> {
    let exp = if overlay.squared { 2.0 } else { 1.0 };
    (0..=t_max)
        .map(|t| (t as f64, start * overlay.rate.powf(exp * t as f64)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct PlotOptions {
    pub title: Option<String>,
    pub y_label: String,
    pub width: f64,
    pub height: f64,
    pub overlays: Vec<RateOverlay>,
    /// Longer series are thinned to about this many points (the last point is always kept).
    pub max_points: usize,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            title: None,
            y_label: "suboptimality".into(),
            width: 760.0,
            height: 480.0,
            overlays: Vec::new(),
            max_points: 4000,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn sample_indices(len: usize, max_points: usize) -> Vec<usize> {
    let stride = len.div_ceil(max_points.max(2)).max(1);
    let mut idx: Vec<usize> = (0..len).step_by(stride).collect();
    if idx.last() != Some(&(len - 1)) {
        idx.push(len - 1);
    }
    idx
}

struct Frame {
    left: f64,
    top: f64,
    w: f64,
    h: f64,
    t_max: f64,
    lo: f64,
    hi: f64,
}

impl Frame {
    fn x(&self, t: f64) -> f64 {
        self.left + self.w * t / self.t_max
    }

    /// Values are clamped to the floor and to the top of the axis.
    fn y(&self, v: f64) -> f64 {
        let l = v.max(Y_FLOOR).log10().clamp(self.lo, self.hi);
        self.top + self.h * (self.hi - l) / (self.hi - self.lo)
    }

    fn points(&self, pts: impl Iterator<Item = (f64, f64)>) -> String {
        let mut s = String::new();
        for (t, v) in pts {
            if !s.is_empty() {
                s.push(' ');
            }
            let _ = write!(s, "{:.2},{:.2}", self.x(t), self.y(v));
        }
        s
    }
}

/// Renders the series as one SVG document.
pub fn render_plot(series: &[AggregatedSeries], options: &PlotOptions) -> Result<String> {
    if series.is_empty() || series.iter().all(|s| s.is_empty()) {
        return Err(Error::Config("nothing to plot".into()));
    }
    let t_max = series
        .iter()
        .map(|s| s.len().saturating_sub(1))
        .max()
        .unwrap_or(0)
        .max(1);
    let values = || {
        series
            .iter()
            .flat_map(|s| s.min.iter().chain(&s.max).chain(&s.mean))
            .copied()
    };
    let clamped = values().any(|v| v < Y_FLOOR);
    let finite = || values().filter(|v| v.is_finite());
    let top_v = finite().fold(Y_FLOOR, f64::max);
    let bottom_v = finite()
        .map(|v| v.max(Y_FLOOR))
        .fold(f64::INFINITY, f64::min)
        .min(top_v);
    let mut lo = bottom_v.log10().floor();
    let mut hi = top_v.log10().ceil();
    if hi <= lo {
        lo -= 1.0;
        hi += 1.0;
    }
    let frame = Frame {
        left: 80.0,
        top: 40.0,
        w: options.width - 80.0 - 200.0,
        h: options.height - 40.0 - 60.0,
        t_max: t_max as f64,
        lo,
        hi,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = options.width,
        h = options.height
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#,
        options.width, options.height
    );
    if let Some(title) = &options.title {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            frame.left + frame.w / 2.0,
            escape(title)
        );
    }

    // Axes, decade grid and labels.
    let _ = writeln!(
        svg,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        frame.left, frame.top, frame.w, frame.h
    );
    let decades = (hi - lo) as i32;
    let step = (decades / 8 + 1) as usize;
    for k in (0..=decades).step_by(step) {
        let e = lo as i32 + k;
        let y = frame.y(10f64.powi(e));
        let _ = writeln!(
            svg,
            r##"<line x1="{l:.2}" y1="{y:.2}" x2="{r:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{tx:.2}" y="{ty:.2}" text-anchor="end">1e{e}</text>"##,
            l = frame.left,
            r = frame.left + frame.w,
            tx = frame.left - 6.0,
            ty = y + 4.0
        );
    }
    for k in 0..=5 {
        let t = (t_max as f64 * k as f64 / 5.0).round();
        let x = frame.x(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{b:.2}" x2="{x:.2}" y2="{b2:.2}" stroke="black"/><text x="{x:.2}" y="{ty:.2}" text-anchor="middle">{t}</text>"#,
            b = frame.top + frame.h,
            b2 = frame.top + frame.h + 5.0,
            ty = frame.top + frame.h + 20.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">iteration</text>"#,
        frame.left + frame.w / 2.0,
        options.height - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        frame.top + frame.h / 2.0,
        escape(&options.y_label)
    );

    let legend_x = frame.left + frame.w + 20.0;
    let mut legend_y = frame.top + 10.0;
    for (i, s) in series.iter().enumerate().filter(|(_, s)| !s.is_empty()) {
        let color = PALETTE[i % PALETTE.len()];
        let idx = sample_indices(s.len(), options.max_points);
        let upper = idx.iter().map(|&t| (t as f64, s.max[t]));
        let lower = idx.iter().rev().map(|&t| (t as f64, s.min[t]));
        let _ = writeln!(
            svg,
            r#"<polygon class="band" points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
            frame.points(upper.chain(lower))
        );
        let _ = writeln!(
            svg,
            r#"<polyline class="mean" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            frame.points(idx.iter().map(|&t| (t as f64, s.mean[t])))
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{legend_x:.2}" y1="{legend_y:.2}" x2="{:.2}" y2="{legend_y:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            legend_x + 24.0,
            legend_x + 30.0,
            legend_y + 4.0,
            escape(&s.solver_id)
        );
        legend_y += 18.0;
    }

    let default_start = series
        .iter()
        .filter_map(|s| s.mean.first().copied())
        .fold(Y_FLOOR, f64::max);
    for o in &options.overlays {
        let start = o.start.unwrap_or(default_start);
        let pts = overlay_points(o, start, t_max);
        let idx = sample_indices(pts.len(), options.max_points);
        let _ = writeln!(
            svg,
            r#"<polyline class="overlay" points="{}" fill="none" stroke="red" stroke-width="1.5" stroke-dasharray="6 4"/>"#,
            frame.points(idx.iter().map(|&i| pts[i]))
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{legend_x:.2}" y1="{legend_y:.2}" x2="{:.2}" y2="{legend_y:.2}" stroke="red" stroke-dasharray="6 4"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            legend_x + 24.0,
            legend_x + 30.0,
            legend_y + 4.0,
            escape(&o.name())
        );
        legend_y += 18.0;
    }

    if clamped {
        let _ = writeln!(
            svg,
            r#"<text class="warning" x="{:.2}" y="{:.2}" fill="firebrick">values below 1e-16 are drawn at 1e-16</text>"#,
            frame.left + 6.0,
            frame.top + frame.h - 8.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{aggregate, Metric};

    fn one(values: Vec<f64>) -> Vec<AggregatedSeries> {
        vec![aggregate("nagfree", Metric::Suboptimality, &[values])]
    }

    fn parse(svg: &str) -> roxmltree::Document<'_> {
        roxmltree::Document::parse(svg).expect("well-formed SVG")
    }

    fn count(doc: &roxmltree::Document, tag: &str, class: &str) -> usize {
        doc.descendants()
            .filter(|n| n.has_tag_name(tag) && n.attribute("class") == Some(class))
            .count()
    }

    #[test]
    fn one_solver_gives_one_mean_and_one_band() {
        let svg = render_plot(&one((0..10).map(|t| 0.5f64.powi(t)).collect()), &PlotOptions::default()).unwrap();
        let doc = parse(&svg);
        assert_eq!(count(&doc, "polyline", "mean"), 1);
        assert_eq!(count(&doc, "polygon", "band"), 1);
        assert_eq!(count(&doc, "text", "warning"), 0);
        assert!(!svg.contains("href"));
    }

    #[test]
    fn overlay_points_follow_the_rate() {
        let pts = overlay_points(&RateOverlay::new(0.5), 1.0, 4);
        assert_eq!(
            pts,
            vec![(0.0, 1.0), (1.0, 0.5), (2.0, 0.25), (3.0, 0.125), (4.0, 0.0625)]
        );
        let sq = overlay_points(&RateOverlay::new(0.5).squared(), 1.0, 2);
        assert_eq!(sq[2], (2.0, 0.0625));
    }

    #[test]
    fn zeros_are_clamped_with_a_warning() {
        let data = vec![1.0, 1e-3, 0.0, 0.0];
        let series = one(data.clone());
        let opts = PlotOptions {
            overlays: vec![RateOverlay::new(0.1)],
            ..Default::default()
        };
        let svg = render_plot(&series, &opts).unwrap();
        let doc = parse(&svg);
        assert_eq!(count(&doc, "text", "warning"), 1);
        assert_eq!(count(&doc, "polyline", "overlay"), 1);
        assert_eq!(series[0].mean, data);
        assert!(svg.contains(">1e-16<"));
    }

    #[test]
    fn labels_are_escaped() {
        let mut s = one(vec![1.0, 0.5]);
        s[0].solver_id = "a<b&c".into();
        let svg = render_plot(&s, &PlotOptions::default()).unwrap();
        parse(&svg);
        assert!(svg.contains("a&lt;b&amp;c"));
    }

    #[test]
    fn long_series_are_thinned() {
        let svg = render_plot(&one(vec![1.0; 100_000]), &PlotOptions::default()).unwrap();
        let doc = parse(&svg);
        let mean = doc
            .descendants()
            .find(|n| n.attribute("class") == Some("mean"))
            .unwrap();
        let n = mean.attribute("points").unwrap().split(' ').count();
        assert!(n <= 4001, "{n} points");
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(render_plot(&[], &PlotOptions::default()).is_err());
    }
}
