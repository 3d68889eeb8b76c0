//! Plot-ready series (direct and reciprocal views) and a two-panel SVG.

use std::fmt::Write as _;

use crate::fitting::HyperbolicFit;
use crate::model::TimeSeries;
use crate::report::RegionReport;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub segment: usize,
    pub year: i32,
    pub gdp: f64,
    pub reciprocal: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub region: String,
    pub observed: TimeSeries,
    /// Fitted curves sampled every year, stopping before the singularity guard.
    pub curve: Vec<CurvePoint>,
}

fn sample(
    fit: &HyperbolicFit,
    segment: usize,
    from: i32,
    to: Option<i32>,
    out: &mut Vec<CurvePoint>,
) {
    let mut year = from;
    while to.is_none_or(|end| year <= end) {
        let Ok(gdp) = fit.params.eval(f64::from(year)) else {
            break;
        };
        out.push(CurvePoint {
            segment,
            year,
            gdp,
            reciprocal: fit.params.reciprocal_at(f64::from(year)),
        });
        year += 1;
    }
}

impl PlotData {
    /// Samples each fitted segment. The first starts at the first observation;
    /// the last runs until the singularity guard; inner boundaries follow the
    /// segment windows.
    pub fn new(observed: &TimeSeries, report: &RegionReport) -> Self {
        let mut curve = Vec::new();
        let n = report.segments.len();
        for (i, seg) in report.segments.iter().enumerate() {
            let from = if i == 0 {
                observed.first_year().min(seg.fit.window.start)
            } else {
                seg.fit.window.start
            };
            let to = (i + 1 < n).then_some(seg.fit.window.end);
            sample(&seg.fit, i + 1, from, to, &mut curve);
        }
        Self {
            region: report.region.clone(),
            observed: observed.clone(),
            curve,
        }
    }

    pub fn gdp_csv(&self) -> String {
        let mut s = String::from("year,gdp\n");
        for p in self.observed.points() {
            let _ = writeln!(s, "{},{}", p.year, p.value);
        }
        s
    }

    pub fn reciprocal_csv(&self) -> String {
        let mut s = String::from("year,reciprocal\n");
        for p in self.observed.points() {
            let _ = writeln!(s, "{},{}", p.year, p.value.recip());
        }
        s
    }

    pub fn curve_csv(&self) -> String {
        let mut s = String::from("segment,year,gdp,reciprocal\n");
        for c in &self.curve {
            let _ = writeln!(s, "{},{},{},{}", c.segment, c.year, c.gdp, c.reciprocal);
        }
        s
    }

    /// Semilog GDP panel above a reciprocal panel.
    pub fn svg(&self) -> String {
        let obs = self.observed.points();
        let x_min = f64::from(
            obs[0]
                .year
                .min(self.curve.first().map_or(i32::MAX, |c| c.year)),
        );
        let x_max = f64::from(
            obs[obs.len() - 1]
                .year
                .max(self.curve.last().map_or(i32::MIN, |c| c.year)),
        );
        let (lo, hi) = obs.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
            (lo.min(p.value), hi.max(p.value))
        });
        let log_lo = (lo / 2.0).log10().floor();
        let log_hi = (hi * 2.0).log10().ceil();
        let recip_hi = obs.iter().map(|p| p.value.recip()).fold(0.0, f64::max) * 1.05;

        let direct = Panel {
            top: 40.0,
            x_min,
            x_max,
            y_min: log_lo,
            y_max: log_hi,
        };
        let reciprocal = Panel {
            top: 440.0,
            x_min,
            x_max,
            y_min: 0.0,
            y_max: recip_hi,
        };

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="840" viewBox="0 0 {W} 840" font-family="sans-serif" font-size="12">"#,
            W = WIDTH
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="840" fill="white"/>"#);
        direct.frame(
            &mut s,
            &format!("{}: GDP (billions 1990 GK$, log scale)", self.region),
        );
        for e in (log_lo as i32)..=(log_hi as i32) {
            let y = direct.y(f64::from(e));
            direct.y_tick(&mut s, y, &format!("1e{e}"));
        }
        reciprocal.frame(&mut s, &format!("{}: 1/GDP", self.region));
        for i in 0..=4 {
            let v = recip_hi * f64::from(i) / 4.0;
            reciprocal.y_tick(&mut s, reciprocal.y(v), &format!("{v:.3e}"));
        }
        for panel in [&direct, &reciprocal] {
            panel.x_ticks(&mut s);
        }

        let segments = self.curve.iter().map(|c| c.segment).max().unwrap_or(0);
        for seg in 1..=segments {
            let pts: Vec<&CurvePoint> = self.curve.iter().filter(|c| c.segment == seg).collect();
            let direct_path: Vec<String> = pts
                .iter()
                .filter(|c| c.gdp.log10() <= log_hi)
                .map(|c| {
                    format!(
                        "{:.2},{:.2}",
                        direct.x(f64::from(c.year)),
                        direct.y(c.gdp.log10())
                    )
                })
                .collect();
            let recip_path: Vec<String> = pts
                .iter()
                .filter(|c| c.reciprocal <= recip_hi)
                .map(|c| {
                    format!(
                        "{:.2},{:.2}",
                        reciprocal.x(f64::from(c.year)),
                        reciprocal.y(c.reciprocal)
                    )
                })
                .collect();
            for path in [direct_path, recip_path] {
                if path.len() > 1 {
                    let _ = writeln!(
                        s,
                        r#"<polyline fill="none" stroke="firebrick" stroke-width="1.5" points="{}"/>"#,
                        path.join(" ")
                    );
                }
            }
        }
        for p in obs {
            let x = f64::from(p.year);
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="navy"/>"#,
                direct.x(x),
                direct.y(p.value.log10())
            );
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="navy"/>"#,
                reciprocal.x(x),
                reciprocal.y(p.value.recip())
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

const WIDTH: f64 = 800.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const HEIGHT: f64 = 340.0;

struct Panel {
    top: f64,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Panel {
    fn x(&self, v: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(1.0);
        LEFT + (v - self.x_min) / span * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        let span = self.y_max - self.y_min;
        let span = if span > 0.0 { span } else { 1.0 };
        self.top + HEIGHT - (v - self.y_min) / span * HEIGHT
    }

    fn frame(&self, s: &mut String, title: &str) {
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT}" y="{}" width="{}" height="{HEIGHT}" fill="none" stroke="black"/>"#,
            self.top,
            WIDTH - LEFT - RIGHT
        );
        let _ = writeln!(
            s,
            r#"<text x="{LEFT}" y="{}">{}</text>"#,
            self.top - 10.0,
            escape(title)
        );
    }

    fn y_tick(&self, s: &mut String, y: f64, label: &str) {
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{label}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0
        );
    }

    fn x_ticks(&self, s: &mut String) {
        let step = if self.x_max - self.x_min > 1000.0 {
            250
        } else {
            50
        };
        let first = (self.x_min as i32 + step - 1).div_euclid(step) * step;
        let bottom = self.top + HEIGHT;
        let mut year = first;
        while f64::from(year) <= self.x_max {
            let x = self.x(f64::from(year));
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{year}</text>"#,
                bottom + 5.0,
                bottom + 18.0
            );
            year += step;
        }
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
