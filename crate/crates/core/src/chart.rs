//! Minimal SVG line charts of per-second snapshots.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::metrics::SecondSnapshot;

pub const WIDTH: u32 = 800;
pub const HEIGHT: u32 = 400;

const LEFT: f64 = 70.0;
const RIGHT: f64 = 70.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Left,
    Right,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: &'static str,
    pub color: &'static str,
    pub axis: Axis,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub title: &'static str,
    pub x_label: &'static str,
    pub y_label: &'static str,
    /// Label for the right axis; `None` when every series uses the left one.
    pub y2_label: Option<&'static str>,
    pub series: Vec<Series>,
}

fn max_of(series: &[Series], axis: Axis) -> f64 {
    let m = series
        .iter()
        .filter(|s| s.axis == axis)
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .fold(0.0, f64::max);
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Chart {
    pub fn render(&self) -> String {
        let (w, h) = (WIDTH as f64, HEIGHT as f64);
        let pw = w - LEFT - RIGHT;
        let ph = h - TOP - BOTTOM;
        let x_max = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0))
            .fold(0.0, f64::max)
            .max(1.0);
        let y_max = [max_of(&self.series, Axis::Left), max_of(&self.series, Axis::Right)];
        let sx = |x: f64| LEFT + x / x_max * pw;
        let sy = |y: f64, axis: Axis| TOP + ph - y / y_max[axis as usize] * ph;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            w / 2.0,
            escape(self.title)
        );

        // axes
        let _ = writeln!(
            out,
            r#"<g stroke="black" fill="none"><path d="M{LEFT:.1},{TOP:.1} V{:.1} H{:.1}"/>{}</g>"#,
            TOP + ph,
            LEFT + pw,
            if self.y2_label.is_some() {
                format!(r#"<path d="M{:.1},{TOP:.1} V{:.1}"/>"#, LEFT + pw, TOP + ph)
            } else {
                String::new()
            }
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.0}</text>"#,
                sx(f * x_max),
                TOP + ph + 18.0,
                f * x_max
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.0}</text>"#,
                LEFT - 6.0,
                sy(f * y_max[0], Axis::Left) + 4.0,
                f * y_max[0]
            );
            if self.y2_label.is_some() {
                let _ = writeln!(
                    out,
                    r#"<text x="{:.1}" y="{:.1}" text-anchor="start">{:.0}</text>"#,
                    LEFT + pw + 6.0,
                    sy(f * y_max[1], Axis::Right) + 4.0,
                    f * y_max[1]
                );
            }
        }
        let _ = writeln!(
            out,
            r#"<text class="x-label" x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            h - 12.0,
            escape(self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text class="y-label" transform="translate(16,{:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
            TOP + ph / 2.0,
            escape(self.y_label)
        );
        if let Some(l) = self.y2_label {
            let _ = writeln!(
                out,
                r#"<text class="y-label" transform="translate({:.1},{:.1}) rotate(90)" text-anchor="middle">{}</text>"#,
                w - 14.0,
                TOP + ph / 2.0,
                escape(l)
            );
        }

        for (i, s) in self.series.iter().enumerate() {
            let pts: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y, s.axis)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline data-series="{}" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                escape(s.label),
                s.color,
                pts.join(" ")
            );
            let ly = TOP + 14.0 + 16.0 * i as f64;
            let _ = writeln!(
                out,
                r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{}" stroke-width="3"/><text x="{:.1}" y="{:.1}">{}</text>"#,
                LEFT + 10.0,
                ly - 4.0,
                LEFT + 30.0,
                ly - 4.0,
                s.color,
                LEFT + 36.0,
                ly,
                escape(s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn series(label: &'static str, color: &'static str, axis: Axis, snaps: &[SecondSnapshot], f: impl Fn(&SecondSnapshot) -> f64) -> Series {
    Series {
        label,
        color,
        axis,
        points: snaps.iter().map(|s| (s.second as f64, f(s))).collect(),
    }
}

/// Sent, received and processed packets per second.
pub fn packets_chart(snaps: &[SecondSnapshot]) -> Chart {
    Chart {
        title: "Packets per second",
        x_label: "virtual time (s)",
        y_label: "packets",
        y2_label: None,
        series: vec![
            series("sent", "#1f77b4", Axis::Left, snaps, |s| s.sent as f64),
            series("received", "#ff7f0e", Axis::Left, snaps, |s| s.received() as f64),
            series("processed", "#2ca02c", Axis::Left, snaps, |s| s.processed as f64),
        ],
    }
}

/// Completed critical cycles (left axis) and lateness in percent of a period (right axis).
pub fn critical_chart(snaps: &[SecondSnapshot]) -> Chart {
    Chart {
        title: "Critical task",
        x_label: "virtual time (s)",
        y_label: "completed cycles",
        y2_label: Some("lateness (% of period)"),
        series: vec![
            series("cycles", "#1f77b4", Axis::Left, snaps, |s| s.cycles_completed as f64),
            series("lateness %", "#d62728", Axis::Right, snaps, |s| s.lateness_pct()),
        ],
    }
}

/// Writes `packets.svg` and `critical.svg` into `dir`, creating it if needed.
pub fn write_charts(snaps: &[SecondSnapshot], dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("packets.svg"), packets_chart(snaps).render())?;
    std::fs::write(dir.join("critical.svg"), critical_chart(snaps).render())?;
    Ok(())
}
