//! Minimal deterministic SVG line plots.
//!
//! Hand-rolled on purpose: the output must be byte-identical across runs
//! and machines, so no timestamps, no random ids, no plotting crate.  One
//! fixed 800×500 canvas, data polylines, {1,2,5}·10^k tick steps, and an
//! optional log-log mode that plots log10 coordinates but labels ticks
//! with the original values.

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

/// Line colors, assigned to series in order by [`Plot::auto_color`].
pub const PALETTE: [&str; 7] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

/// Muted color for reference curves (e.g. the driving path behind a
/// solution overlay).
pub const REFERENCE_GRAY: &str = "#888888";

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    pub dashed: bool,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub log_log: bool,
    /// Extra one-line note drawn inside the plot area (e.g. a fitted slope).
    pub annotation: Option<String>,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Plot {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            series: Vec::new(),
            log_log: false,
            annotation: None,
        }
    }

    /// Push a series with the next palette color.
    pub fn auto_color(&mut self, label: &str, points: Vec<(f64, f64)>) {
        let color = PALETTE[self.series.iter().filter(|s| !s.dashed).count() % PALETTE.len()];
        self.series.push(Series { label: label.to_string(), points, color, dashed: false });
    }

    pub fn reference(&mut self, label: &str, points: Vec<(f64, f64)>) {
        self.series.push(Series {
            label: label.to_string(),
            points,
            color: REFERENCE_GRAY,
            dashed: true,
        });
    }

    pub fn render(&self) -> String {
        let plot_w = WIDTH - MARGIN_L - MARGIN_R;
        let plot_h = HEIGHT - MARGIN_T - MARGIN_B;

        // Working coordinates: log10 of the data in log-log mode (dropping
        // nonpositive points, which have no place on that scale).
        let mapped: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|s| {
                s.points
                    .iter()
                    .filter(|(x, y)| x.is_finite() && y.is_finite())
                    .filter(|(x, y)| !self.log_log || (*x > 0.0 && *y > 0.0))
                    .map(|&(x, y)| if self.log_log { (x.log10(), y.log10()) } else { (x, y) })
                    .collect()
            })
            .collect();

        let (x_lo, x_hi) = padded_range(mapped.iter().flatten().map(|p| p.0));
        let (y_lo, y_hi) = padded_range(mapped.iter().flatten().map(|p| p.1));
        let to_px = |x: f64, y: f64| {
            (
                MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w,
                MARGIN_T + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h,
            )
        };

        let mut out = String::with_capacity(16 * 1024);
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        out.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
        ));

        // Gridlines and tick labels.
        for t in nice_ticks(x_lo, x_hi, 7) {
            let (px, _) = to_px(t, y_lo);
            out.push_str(&format!(
                "<line x1=\"{px:.2}\" y1=\"{MARGIN_T}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
                MARGIN_T + plot_h
            ));
            let label = if self.log_log { fmt_sig(exp10(t)) } else { fmt_sig(t) };
            out.push_str(&format!(
                "<text x=\"{px:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                MARGIN_T + plot_h + 18.0,
                escape(&label)
            ));
        }
        for t in nice_ticks(y_lo, y_hi, 6) {
            let (_, py) = to_px(x_lo, t);
            out.push_str(&format!(
                "<line x1=\"{MARGIN_L}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
                MARGIN_L + plot_w
            ));
            let label = if self.log_log { fmt_sig(exp10(t)) } else { fmt_sig(t) };
            out.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
                MARGIN_L - 8.0,
                py + 4.0,
                escape(&label)
            ));
        }

        out.push_str(&format!(
            "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n"
        ));

        for (s, pts) in self.series.iter().zip(&mapped) {
            if pts.is_empty() {
                continue;
            }
            let dash = if s.dashed { " stroke-dasharray=\"6,4\"" } else { "" };
            let mut d = String::new();
            for &(x, y) in decimate(pts, 1600).iter() {
                let (px, py) = to_px(x, y);
                d.push_str(&format!("{px:.2},{py:.2} "));
            }
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{dash} points=\"{}\"/>\n",
                s.color,
                d.trim_end()
            ));
        }

        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
            WIDTH / 2.0,
            escape(&self.title)
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_L + plot_w / 2.0,
            HEIGHT - 10.0,
            escape(&self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"18\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">{}</text>\n",
            MARGIN_T + plot_h / 2.0,
            MARGIN_T + plot_h / 2.0,
            escape(&self.y_label)
        ));

        if let Some(note) = &self.annotation {
            out.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\">{}</text>\n",
                MARGIN_L + 10.0,
                MARGIN_T + 20.0,
                escape(note)
            ));
        }

        // Legend, top-right corner of the plot area.
        let legend: Vec<&Series> = self.series.iter().filter(|s| !s.label.is_empty()).collect();
        for (i, s) in legend.iter().enumerate() {
            let y = MARGIN_T + 16.0 + 18.0 * i as f64;
            let x = MARGIN_L + plot_w - 150.0;
            let dash = if s.dashed { " stroke-dasharray=\"6,4\"" } else { "" };
            out.push_str(&format!(
                "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-width=\"1.5\"{dash}/>\n",
                y - 4.0,
                x + 24.0,
                y - 4.0,
                s.color
            ));
            out.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{y:.2}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
                x + 30.0,
                escape(&s.label)
            ));
        }

        out.push_str("</svg>\n");
        out
    }
}

/// Data range with 4% padding; safe defaults when empty or degenerate.
fn padded_range<I: Iterator<Item = f64>>(vals: I) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = lo.abs().max(1.0) * 0.05;
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.04;
    (lo - pad, hi + pad)
}

/// Tick positions at multiples of a {1,2,5}·10^k step close to
/// `(hi-lo)/target`.
fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let raw = (hi - lo) / target.max(2) as f64;
    let mag = exp10(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag);
    let mut ticks = Vec::new();
    let mut k = (lo / step).ceil();
    // snap -0.0 and accumulated error at exact multiples
    while k * step <= hi + step * 1e-9 {
        let t = k * step;
        ticks.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        k += 1.0;
    }
    ticks
}

fn exp10(v: f64) -> f64 {
    10.0f64.powf(v)
}

/// 3 significant figures, scientific notation outside [1e-3, 1e4).
fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if !(1e-3..1e4).contains(&a) {
        return format!("{v:.2e}");
    }
    let decimals = (2 - a.log10().floor() as i32).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Uniform stride decimation to at most `max_points`, always keeping the
/// final point so curves end where the data does.
fn decimate(pts: &[(f64, f64)], max_points: usize) -> Vec<(f64, f64)> {
    if pts.len() <= max_points {
        return pts.to_vec();
    }
    let stride = pts.len().div_ceil(max_points);
    let mut out: Vec<(f64, f64)> = pts.iter().copied().step_by(stride).collect();
    if *out.last().unwrap() != *pts.last().unwrap() {
        out.push(*pts.last().unwrap());
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
