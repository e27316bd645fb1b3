//! Minimal SVG line charts from trajectory tables.

use std::fmt::Write as _;

use crate::csv_io::TrajectoryTable;
use crate::error::CliError;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 56.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const DASHES: [&str; 3] = ["", "6 3", "2 2"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    /// p↑ against t
    Population,
    /// (r1, r3) projection of the Bloch vector
    Bloch,
}

impl PlotKind {
    pub fn detect(table: &TrajectoryTable) -> Option<Self> {
        if table.column("p_up").is_some() {
            Some(PlotKind::Population)
        } else if table.column("r1").is_some() && table.column("r3").is_some() {
            Some(PlotKind::Bloch)
        } else {
            None
        }
    }
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
    w: f64,
    h: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * self.w
    }

    fn py(&self, y: f64) -> f64 {
        MARGIN + (self.y.1 - y) / (self.y.1 - self.y.0) * self.h
    }
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn label(x: f64) -> String {
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render(table: &TrajectoryTable, kind: PlotKind) -> Result<String, CliError> {
    if table.rows.is_empty() {
        return Err(CliError::Schema("no data rows to plot".into()));
    }
    let (xcol, ycol, xname, yname) = match kind {
        PlotKind::Population => (None, "p_up", "T", "p_up"),
        PlotKind::Bloch => (Some("r1"), "r3", "r1", "r3"),
    };
    let yi = table
        .column(ycol)
        .ok_or_else(|| CliError::Schema(format!("column '{ycol}' is missing")))?;
    let xi = match xcol {
        Some(c) => Some(
            table
                .column(c)
                .ok_or_else(|| CliError::Schema(format!("column '{c}' is missing")))?,
        ),
        None => None,
    };
    let series: Vec<(String, Vec<(f64, f64)>)> = table
        .series()
        .into_iter()
        .map(|((state, method), rows)| {
            let pts = rows
                .iter()
                .map(|r| (xi.map_or(r.t, |i| r.values[i]), r.values[yi]))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect();
            (format!("{state} {method}"), pts)
        })
        .collect();

    let frame = match kind {
        PlotKind::Population => {
            let tmax = table.rows.iter().map(|r| r.t).fold(0.0, f64::max);
            Frame {
                x: (0.0, if tmax > 0.0 { tmax } else { 1.0 }),
                y: (0.0, 1.0),
                w: WIDTH - 2.0 * MARGIN - 140.0,
                h: HEIGHT - 2.0 * MARGIN,
            }
        }
        PlotKind::Bloch => {
            let side = HEIGHT - 2.0 * MARGIN;
            Frame {
                x: (-1.0, 1.0),
                y: (-1.0, 1.0),
                w: side,
                h: side,
            }
        }
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let (x0, x1, y0, y1) = (
        frame.px(frame.x.0),
        frame.px(frame.x.1),
        frame.py(frame.y.0),
        frame.py(frame.y.1),
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for t in ticks(frame.x.0, frame.x.1) {
        let x = frame.px(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            y0 + 4.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 16.0,
            label(t)
        );
    }
    for t in ticks(frame.y.0, frame.y.1) {
        let y = frame.py(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/>"#,
            x0 - 4.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 7.0,
            y + 4.0,
            label(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{xname}</text>"#,
        (x0 + x1) / 2.0,
        y0 + 36.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{yname}</text>"#,
        x0 - 38.0,
        (y0 + y1) / 2.0,
        x0 - 38.0,
        (y0 + y1) / 2.0
    );
    if kind == PlotKind::Bloch {
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="#999999"/>"##,
            frame.px(0.0),
            frame.py(0.0),
            frame.w / 2.0
        );
    }

    let mut methods: Vec<&str> = Vec::new();
    let mut states: Vec<&str> = Vec::new();
    for r in &table.rows {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
        if !states.contains(&r.state.as_str()) {
            states.push(&r.state);
        }
    }
    let legend_x = match kind {
        PlotKind::Population => x1 + 12.0,
        PlotKind::Bloch => x1 + 24.0,
    };
    for (k, ((name, pts), ((state, method), _))) in series.iter().zip(table.series()).enumerate() {
        let color = COLORS[states.iter().position(|s| *s == state).unwrap_or(0) % COLORS.len()];
        let dash = DASHES[methods.iter().position(|m| *m == method).unwrap_or(0) % DASHES.len()];
        let dash_attr = if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        };
        let mut points = String::new();
        for (x, y) in pts {
            let _ = write!(points, "{:.2},{:.2} ", frame.px(*x), frame.py(*y));
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash_attr} points="{}"/>"#,
            points.trim_end()
        );
        let ly = y1 + 14.0 * k as f64 + 6.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{legend_x:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="1.5"{dash_attr}/>"#,
            legend_x + 20.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            legend_x + 24.0,
            ly + 4.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csv_io::Row;

    fn table(cols: &[&str]) -> TrajectoryTable {
        let mut t = TrajectoryTable::new(cols.iter().map(|s| s.to_string()).collect());
        for k in 0..5 {
            t.rows.push(Row {
                t: k as f64,
                values: vec![0.1 * k as f64; cols.len()],
                state: "a<b".into(),
                method: if k % 2 == 0 {
                    "exact".into()
                } else {
                    "limit".into()
                },
            });
        }
        t
    }

    #[test]
    fn ticks_are_round() {
        assert_eq!(
            ticks(0.0, 1.0),
            vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]
        );
        assert_eq!(ticks(0.0, 10.0).len(), 6);
    }

    #[test]
    fn detects_kind() {
        assert_eq!(
            PlotKind::detect(&table(&["p_up", "r1", "r3"])),
            Some(PlotKind::Population)
        );
        assert_eq!(
            PlotKind::detect(&table(&["r1", "r2", "r3"])),
            Some(PlotKind::Bloch)
        );
        assert_eq!(PlotKind::detect(&table(&["purity"])), None);
    }

    #[test]
    fn renders_series_and_escapes_labels() {
        let svg = render(&table(&["p_up"]), PlotKind::Population).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a&lt;b exact"));
        assert_eq!(
            svg,
            render(&table(&["p_up"]), PlotKind::Population).unwrap()
        );
        let bloch = render(&table(&["r1", "r3"]), PlotKind::Bloch).unwrap();
        assert!(bloch.contains("<circle"));
    }

    #[test]
    fn empty_table_is_rejected() {
        let t = TrajectoryTable::new(vec!["p_up".into()]);
        assert_eq!(render(&t, PlotKind::Population).unwrap_err().exit_code(), 2);
    }
}
