//! Artifact writers: JSON reports, CSV point sets and SVG figures.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};

use spiralemb::geometry::PlanarPoint;

/// Pretty JSON whose floats are written as `d.dddddddddddddddde±x`, 17
/// significant digits, which round-trips every finite `f64`.
struct SciFormatter<'a>(PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(w $(, $arg)*)
            }
        )*
    };
}

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format!("{value:.16e}").as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        end_object_key(),
        begin_object_value(),
        end_object_value(),
    );
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

/// Single-line variant used on stdout summaries.
pub fn to_json_line<T: Serialize>(value: &T) -> serde_json::Result<String> {
    struct Line(CompactFormatter);
    impl Formatter for Line {
        fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
            w.write_all(format!("{value:.16e}").as_bytes())
        }
    }
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Line(CompactFormatter));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// `x,y,u,v` rows in 12-significant-digit scientific notation.
pub fn to_csv(rows: &[(PlanarPoint, PlanarPoint)]) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str("x,y,u,v\n");
    for (p, q) in rows {
        let _ = writeln!(s, "{:.11e},{:.11e},{:.11e},{:.11e}", p.x, p.y, q.x, q.y);
    }
    s
}

/// Write to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circle {
    pub radius: f64,
    pub class: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<PlanarPoint>,
    pub class: &'static str,
    pub closed: bool,
}

/// A standalone SVG 1.1 figure in image coordinates (y up).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Figure {
    pub title: String,
    pub polylines: Vec<Polyline>,
    pub circles: Vec<Circle>,
}

const PALETTE: [(&str, &str); 6] = [
    ("strand", "#1f5fa8"),
    ("strand2", "#c0392b"),
    ("tuck", "#27ae60"),
    ("outer", "#555555"),
    ("inner", "#d35400"),
    ("region", "#7f8c8d"),
];

fn color(class: &str) -> &'static str {
    PALETTE.iter().find(|(c, _)| *c == class).map_or("#000000", |(_, v)| v)
}

impl Figure {
    /// Half-width of the square viewBox: the largest circle, or the
    /// geometry's extent when there is none.
    pub fn extent(&self) -> f64 {
        let circles = self.circles.iter().map(|c| c.radius).fold(0.0, f64::max);
        if circles > 0.0 {
            return circles;
        }
        self.polylines
            .iter()
            .flat_map(|l| l.points.iter())
            .map(|p| p.x.abs().max(p.y.abs()))
            .fold(0.0, f64::max)
    }

    pub fn render(&self) -> String {
        let half = self.extent() * 1.05;
        let stroke = half / 400.0;
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{:.6} {:.6} {:.6} {:.6}" width="800" height="800">"#,
            -half,
            -half,
            2.0 * half,
            2.0 * half
        );
        let _ = writeln!(s, "<title>{}</title>", self.title);
        let _ = writeln!(s, r#"<g transform="scale(1,-1)" fill="none" stroke-width="{stroke:.6}">"#);
        for l in &self.polylines {
            let tag = if l.closed { "polygon" } else { "polyline" };
            let _ = write!(s, r#"<{tag} class="{}" stroke="{}" points=""#, l.class, color(l.class));
            for (i, p) in l.points.iter().enumerate() {
                if i > 0 {
                    s.push(' ');
                }
                let _ = write!(s, "{:.6},{:.6}", p.x, p.y);
            }
            s.push_str("\"/>\n");
        }
        for c in &self.circles {
            let _ = writeln!(
                s,
                r#"<circle class="{}" stroke="{}" stroke-dasharray="{:.6}" cx="0" cy="0" r="{:.9}"/>"#,
                c.class,
                color(c.class),
                4.0 * stroke,
                c.radius
            );
        }
        s.push_str("</g>\n</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn floats_have_seventeen_digits_and_round_trip() {
        let mut m = BTreeMap::new();
        m.insert("a", 0.1f64);
        m.insert("b", -0.25e-300);
        m.insert("c", 1.0 / 3.0);
        let bytes = to_json(&m).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.contains("1.0000000000000001e-1"), "{text}");
        let back: BTreeMap<String, f64> = serde_json::from_slice(&bytes).unwrap();
        for (k, v) in &m {
            assert_eq!(back[*k].to_bits(), v.to_bits());
        }
        let b = text.lines().find(|l| l.contains("\"b\"")).unwrap();
        let mantissa = b.split(": ").nth(1).unwrap().split('e').next().unwrap();
        assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{b}");
    }

    #[test]
    fn non_finite_becomes_null() {
        let bytes = to_json(&vec![f64::NAN]).unwrap();
        assert!(String::from_utf8(bytes).unwrap().contains("null"));
    }

    #[test]
    fn csv_layout() {
        let rows = [(PlanarPoint::new(0.5, 1.0), PlanarPoint::new(-2.0, 1e-7))];
        assert_eq!(
            to_csv(&rows),
            "x,y,u,v\n5.00000000000e-1,1.00000000000e0,-2.00000000000e0,1.00000000000e-7\n"
        );
    }

    #[test]
    fn svg_fits_largest_circle() {
        let f = Figure {
            title: "t".into(),
            polylines: vec![Polyline {
                points: vec![PlanarPoint::new(0.1, 0.2), PlanarPoint::new(0.3, 0.1)],
                class: "strand",
                closed: false,
            }],
            circles: vec![Circle { radius: 2.0, class: "outer" }],
        };
        let svg = f.render();
        assert!(svg.contains(r#"viewBox="-2.100000 -2.100000 4.200000 4.200000""#));
        assert!(svg.contains("<polyline"));
        assert!(svg.contains(r#"r="2.000000000""#));
    }
}
