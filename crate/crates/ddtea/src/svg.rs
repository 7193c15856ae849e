//! Static line plots as self-contained SVG text: 800x600 canvas, linear
//! axes with five tick intervals, one polyline per series.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const TICKS: usize = 5;
const COLORS: [&str; 4] = ["#1f77b4", "#d62778", "#2ca02c", "#ff7f0e"];

#[derive(Debug, Clone, Default)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    /// Shaded `(x, low, high)` band drawn under the line.
    pub band: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn covering(values: impl Iterator<Item = f64>) -> Self {
        let (mut lo, mut hi) = values
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(v), b.max(v))
            });
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
            let pad = 0.5 * lo.abs().max(1.0);
            (lo, hi) = (lo - pad, hi + pad);
        }
        Self { lo, hi }
    }

    fn map(&self, v: f64, from: f64, to: f64) -> f64 {
        from + (v - self.lo) / (self.hi - self.lo) * (to - from)
    }

    fn tick(&self, k: usize) -> f64 {
        self.lo + (self.hi - self.lo) * k as f64 / TICKS as f64
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        format!("{:.4}", v)
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    }
}

impl Plot {
    pub fn render(&self) -> String {
        let xs = self.series.iter().flat_map(|s| {
            s.points
                .iter()
                .map(|p| p.0)
                .chain(s.band.iter().map(|b| b.0))
        });
        let ys = self.series.iter().flat_map(|s| {
            s.points
                .iter()
                .map(|p| p.1)
                .chain(s.band.iter().flat_map(|b| [b.1, b.2]))
        });
        let x = Axis::covering(xs);
        let y = Axis::covering(ys);
        let px = |v: f64| x.map(v, LEFT, WIDTH - RIGHT);
        let py = |v: f64| y.map(v, HEIGHT - BOTTOM, TOP);

        let mut out = String::new();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="13">"#
        )
        .unwrap();
        writeln!(
            out,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        )
        .unwrap();

        // frame, ticks and grid
        let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
        writeln!(
            out,
            r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y0 - y1
        )
        .unwrap();
        for k in 0..=TICKS {
            let (tx, ty) = (x.tick(k), y.tick(k));
            let (sx, sy) = (px(tx), py(ty));
            writeln!(
                out,
                r##"<line x1="{sx:.2}" y1="{y0}" x2="{sx:.2}" y2="{y1}" stroke="#dddddd"/>"##
            )
            .unwrap();
            writeln!(
                out,
                r##"<line x1="{x0}" y1="{sy:.2}" x2="{x1}" y2="{sy:.2}" stroke="#dddddd"/>"##
            )
            .unwrap();
            writeln!(
                out,
                r#"<text x="{sx:.2}" y="{}" text-anchor="middle">{}</text>"#,
                y0 + 20.0,
                label(tx)
            )
            .unwrap();
            writeln!(
                out,
                r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                x0 - 8.0,
                sy + 4.0,
                label(ty)
            )
            .unwrap();
        }
        writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 20.0,
            escape(&self.x_label)
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="24" y="{0}" text-anchor="middle" transform="rotate(-90 24 {0})">{1}</text>"#,
            (y0 + y1) / 2.0,
            escape(&self.y_label)
        )
        .unwrap();

        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let band: Vec<_> = s
                .band
                .iter()
                .filter(|b| b.0.is_finite() && b.1.is_finite() && b.2.is_finite())
                .collect();
            if !band.is_empty() {
                let upper = band
                    .iter()
                    .map(|b| format!("{:.2},{:.2}", px(b.0), py(b.2)));
                let lower = band
                    .iter()
                    .rev()
                    .map(|b| format!("{:.2},{:.2}", px(b.0), py(b.1)));
                let pts: Vec<String> = upper.chain(lower).collect();
                writeln!(
                    out,
                    r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
                    pts.join(" ")
                )
                .unwrap();
            }
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|p| format!("{:.2},{:.2}", px(p.0), py(p.1)))
                .collect();
            writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                pts.join(" ")
            )
            .unwrap();
            let ly = TOP + 18.0 + 18.0 * i as f64;
            writeln!(
                out,
                r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
                x1 - 150.0,
                x1 - 125.0
            )
            .unwrap();
            writeln!(
                out,
                r#"<text x="{}" y="{}">{}</text>"#,
                x1 - 118.0,
                ly + 4.0,
                escape(&s.name)
            )
            .unwrap();
        }
        out.push_str("</svg>\n");
        out
    }
}
