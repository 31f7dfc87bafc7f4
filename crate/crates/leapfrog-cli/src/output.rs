//! CSV tables, SVG line plots and JSON-lines failure reports.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::json;

/// Shortest decimal that round-trips (at most 17 significant digits).
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else {
        x.to_string()
    }
}

/// Write a CSV table; every cell is already formatted.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> io::Result<PathBuf> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(path.to_path_buf())
}

/// One polyline or dot set in data coordinates.
#[derive(Debug, Clone)]
pub struct Curve {
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    pub closed: bool,
    /// Draw markers instead of a line.
    pub dots: bool,
}

impl Curve {
    pub fn line(points: Vec<(f64, f64)>, color: &'static str) -> Self {
        Self {
            points,
            color,
            closed: false,
            dots: false,
        }
    }

    pub fn closed(points: Vec<(f64, f64)>, color: &'static str) -> Self {
        Self {
            closed: true,
            ..Self::line(points, color)
        }
    }

    pub fn dots(points: Vec<(f64, f64)>, color: &'static str) -> Self {
        Self {
            dots: true,
            ..Self::line(points, color)
        }
    }
}

/// Plot bounds enlarged by 5% on every side; degenerate extents get a unit
/// width so the viewBox stays valid.
pub fn view_box(curves: &[Curve]) -> (f64, f64, f64, f64) {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in curves.iter().flat_map(|c| &c.points) {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return (0.0, 0.0, 1.0, 1.0);
    }
    let pad = |a: f64, b: f64| {
        let w = if b > a { b - a } else { 1.0 };
        (a - 0.05 * w, b + 0.05 * w)
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    (x0, y0, x1 - x0, y1 - y0)
}

/// How data units map to the page.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aspect {
    /// One data unit is the same length on both axes (geometry).
    Equal,
    /// Fill a fixed 800×500 page (graphs of functions).
    Free,
}

/// Render `curves` as a standalone SVG. The data `y` axis points up.
pub fn render_svg(title: &str, x_label: &str, y_label: &str, curves: &[Curve], aspect: Aspect) -> String {
    let (mut x0, mut y0, mut w, mut h) = view_box(curves);
    let width = 800.0_f64;
    let height = match aspect {
        Aspect::Free => 500.0,
        Aspect::Equal => {
            // widen the short side so the page stays within 4:1 .. 2:3
            let r = (h / w).clamp(0.25, 1.5);
            if h / w < r {
                y0 -= 0.5 * (r * w - h);
                h = r * w;
            } else if h / w > r {
                x0 -= 0.5 * (h / r - w);
                w = h / r;
            }
            width * r
        }
    };
    let preserve = match aspect {
        Aspect::Free => "none",
        Aspect::Equal => "xMidYMid meet",
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {} {}" preserveAspectRatio="{preserve}">"#,
        width as u32,
        height.round() as u32,
        num(x0),
        num(flip(y0 + h)),
        num(w),
        num(h)
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(s, "<desc>x: {}; y: {}</desc>", escape(x_label), escape(y_label));
    for c in curves {
        if c.dots {
            // 4 px radius in page units
            let (rx, ry) = (4.0 * w / width, 4.0 * h / height);
            for &(x, y) in &c.points {
                let _ = writeln!(
                    s,
                    r#"<ellipse cx="{}" cy="{}" rx="{}" ry="{}" fill="{}"/>"#,
                    num(x),
                    num(flip(y)),
                    num(rx),
                    num(ry),
                    c.color
                );
            }
            continue;
        }
        let mut d = String::new();
        for (i, &(x, y)) in c.points.iter().enumerate() {
            let _ = write!(d, "{}{} {} ", if i == 0 { 'M' } else { 'L' }, num(x), num(flip(y)));
        }
        if c.closed {
            d.push('Z');
        }
        let _ = writeln!(
            s,
            r#"<path d="{}" fill="none" stroke="{}" stroke-width="1.5" vector-effect="non-scaling-stroke"/>"#,
            d.trim_end(),
            c.color,
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_svg(
    path: &Path,
    title: &str,
    labels: (&str, &str),
    curves: &[Curve],
    aspect: Aspect,
) -> io::Result<PathBuf> {
    fs::write(path, render_svg(title, labels.0, labels.1, curves, aspect))?;
    Ok(path.to_path_buf())
}

/// SVG `y` grows downward.
fn flip(y: f64) -> f64 {
    if y == 0.0 {
        0.0
    } else {
        -y
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A failed check or a numerical error.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub scenario: String,
    pub check: String,
    pub kind: FailureKind,
    pub message: String,
    pub value: Option<f64>,
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Check,
    Numerical,
}

impl Failure {
    pub fn json_line(&self) -> String {
        let kind = match self.kind {
            FailureKind::Check => "check",
            FailureKind::Numerical => "numerical",
        };
        json!({
            "scenario": self.scenario,
            "check": self.check,
            "kind": kind,
            "message": self.message,
            "value": self.value,
            "threshold": self.threshold,
        })
        .to_string()
    }
}

pub fn write_failures(path: &Path, failures: &[Failure]) -> io::Result<PathBuf> {
    let mut text = String::new();
    for f in failures {
        text.push_str(&f.json_line());
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(path.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0, 14.833441645318] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.1), "0.1");
        assert_eq!(num(1.0), "1.0");
        assert!(num(1.0 / 3.0).trim_start_matches("0.").len() <= 17);
    }

    #[test]
    fn view_box_has_five_percent_margin() {
        let c = [Curve::line(vec![(0.0, 1.0), (10.0, 3.0)], "black")];
        let (x, y, w, h) = view_box(&c);
        assert!((x + 0.5).abs() < 1e-12 && (w - 11.0).abs() < 1e-12);
        assert!((y - 0.9).abs() < 1e-12 && (h - 2.2).abs() < 1e-12);
    }

    #[test]
    fn svg_contains_paths() {
        let s = render_svg(
            "t",
            "x",
            "y",
            &[Curve::closed(vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)], "red")],
            Aspect::Free,
        );
        assert!(s.starts_with("<svg"));
        assert!(s.contains(r#"d="M0.0 0.0 L1.0 0.0 L0.0 -1.0 Z""#));
        assert!(s.contains(r#"viewBox="-0.05 -1.05 1.1 1.1""#));
    }

    #[test]
    fn equal_aspect_widens_the_short_side() {
        let c = [Curve::line(vec![(0.0, 0.0), (10.0, 0.1)], "black")];
        let s = render_svg("t", "x", "y", &c, Aspect::Equal);
        // 11 wide, so at most 4:1 forces a height of 2.75
        assert!(s.contains(r#"width="800" height="200""#), "{s}");
        assert!(s.contains(" 11.0 2.75\""), "{s}");
    }

    #[test]
    fn failure_json_is_one_line() {
        let f = Failure {
            scenario: "filaments".into(),
            check: "hamiltonian drift".into(),
            kind: FailureKind::Check,
            message: "too large".into(),
            value: Some(1e-7),
            threshold: Some(1e-8),
        };
        let line = f.json_line();
        assert!(!line.contains('\n'));
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["kind"], "check");
        assert_eq!(v["threshold"], 1e-8);
    }
}
