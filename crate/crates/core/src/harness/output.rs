//! Energy CSV (lossless numeric rendering) and SVG wireframes.

use std::fmt::Write as _;

use thiserror::Error;

use crate::energy::EnergyRecord;
use crate::geom::Vec2;
use crate::interaction::ToolState;
use crate::meshgen::bounds;

pub const ENERGY_HEADER: &str = "step,time,inertial,potential_spring,potential_area,total";

#[derive(Debug, Error, PartialEq)]
pub enum CsvError {
    #[error("line 1: expected header {ENERGY_HEADER:?}")]
    Header,
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
}

/// Shortest round-tripping decimal: positional or exponent form, whichever
/// is shorter.
fn number(x: f64) -> String {
    let plain = x.to_string();
    let sci = format!("{x:e}");
    if sci.len() < plain.len() {
        sci
    } else {
        plain
    }
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("writing to memory cannot fail");
    String::from_utf8(bytes).expect("csv output is ASCII")
}

pub fn energy_csv(records: &[EnergyRecord]) -> String {
    let mut w = writer();
    w.write_record(ENERGY_HEADER.split(',')).expect("in-memory write");
    for r in records {
        let row = [
            r.step.to_string(),
            number(r.time),
            number(r.inertial),
            number(r.potential_spring),
            number(r.potential_area),
            number(r.total),
        ];
        w.write_record(&row).expect("in-memory write");
    }
    finish(w)
}

pub fn parse_energy_csv(text: &str) -> Result<Vec<EnergyRecord>, CsvError> {
    if text.split('\n').next() != Some(ENERGY_HEADER) {
        return Err(CsvError::Header);
    }
    let mut reader = csv::ReaderBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_reader(text.as_bytes());
    reader
        .records()
        .enumerate()
        .map(|(i, row)| {
            let line = i + 2;
            let err = |message: String| CsvError::Row { line, message };
            let row = row.map_err(|e| err(e.to_string()))?;
            let step = row[0].parse().map_err(|e| err(format!("step: {e}")))?;
            let mut v = [0.0; 5];
            for (slot, f) in v.iter_mut().zip(row.iter().skip(1)) {
                *slot = f.parse().map_err(|e| err(format!("{f:?}: {e}")))?;
            }
            Ok(EnergyRecord {
                step,
                time: v[0],
                inertial: v[1],
                potential_spring: v[2],
                potential_area: v[3],
                total: v[4],
            })
        })
        .collect()
}

/// `step,total_angle_<a>...` with one column per series. Series are aligned
/// by row and must have equal lengths.
pub fn comparison_csv(labels: &[String], series: &[Vec<EnergyRecord>]) -> String {
    assert_eq!(labels.len(), series.len(), "one label per series");
    let rows = series.first().map_or(0, Vec::len);
    assert!(series.iter().all(|s| s.len() == rows), "series lengths differ");
    let mut w = writer();
    let header = std::iter::once("step".to_string()).chain(labels.iter().map(|l| format!("total_angle_{l}")));
    w.write_record(header).expect("in-memory write");
    for row in 0..rows {
        let fields = std::iter::once(series[0][row].step.to_string())
            .chain(series.iter().map(|s| number(s[row].total)));
        w.write_record(fields).expect("in-memory write");
    }
    finish(w)
}

/// Wireframe of `positions` joined by `edges`, with the tool disk and a
/// square goal marker. World y points up; the view box is the particle
/// bounding box padded by 10%.
pub fn render_svg(
    positions: &[Vec2],
    edges: &[[usize; 2]],
    tool: Option<&ToolState>,
    goal: Option<Vec2>,
) -> Result<String, String> {
    if positions.is_empty() || edges.is_empty() {
        return Err("empty mesh".into());
    }
    if let Some(e) = edges
        .iter()
        .find(|e| e[0] >= positions.len() || e[1] >= positions.len())
    {
        return Err(format!("edge {:?} out of range", e));
    }
    let (lo, hi) = bounds(positions);
    let size = (hi - lo).x.max((hi - lo).y).max(1e-9);
    let pad = Vec2::new(
        (hi.x - lo.x).max(size * 0.1) * 0.1,
        (hi.y - lo.y).max(size * 0.1) * 0.1,
    );
    let (x0, y0) = (lo.x - pad.x, -(hi.y + pad.y));
    let (w, h) = (hi.x - lo.x + 2.0 * pad.x, hi.y - lo.y + 2.0 * pad.y);
    let stroke = size * 0.003;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0} {y0} {w} {h}">"#
    );
    let _ = writeln!(svg, r#"<g stroke="black" stroke-width="{stroke}">"#);
    for &[i, j] in edges {
        let (a, b) = (positions[i], positions[j]);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            a.x, -a.y, b.x, -b.y
        );
    }
    svg.push_str("</g>\n");
    if let Some(t) = tool {
        let _ = writeln!(
            svg,
            r#"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="steelblue" stroke-width="{stroke}"/>"#,
            t.center.x, -t.center.y, t.radius
        );
    }
    if let Some(g) = goal {
        let s = size * 0.02;
        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="{s}" height="{s}" fill="crimson"/>"#,
            g.x - s / 2.0,
            -g.y - s / 2.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(step: u64, total: f64) -> EnergyRecord {
        EnergyRecord {
            step,
            total,
            ..EnergyRecord::ZERO
        }
    }

    #[test]
    fn csv_examples() {
        assert_eq!(energy_csv(&[]), format!("{ENERGY_HEADER}\n"));
        assert_eq!(
            energy_csv(&[EnergyRecord::ZERO]),
            format!("{ENERGY_HEADER}\n0,0,0,0,0,0\n")
        );
        let r = EnergyRecord {
            inertial: 5e-7,
            potential_spring: 0.075,
            total: 8e-6,
            ..EnergyRecord::ZERO
        };
        assert_eq!(energy_csv(&[r]).lines().nth(1), Some("0,0,5e-7,0.075,0,8e-6"));
    }

    #[test]
    fn number_rendering_round_trips() {
        for x in [
            0.1 + 0.2,
            1e-300,
            123456789.0,
            1.5e20,
            -3.25e-9,
            f64::MIN_POSITIVE,
            0.03,
        ] {
            let s = number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(number(1e-300), "1e-300");
        assert_eq!(number(0.03), "0.03");
    }

    #[test]
    fn csv_round_trip() {
        let records: Vec<EnergyRecord> = (0..20)
            .map(|i| EnergyRecord {
                step: i,
                time: i as f64 * 0.01,
                inertial: (i as f64).sqrt() * 1e-11,
                potential_spring: 1.0 / (i as f64 + 3.0),
                potential_area: 0.0,
                total: std::f64::consts::PI * i as f64,
            })
            .collect();
        let text = energy_csv(&records);
        let parsed = parse_energy_csv(&text).unwrap();
        assert_eq!(parsed, records);
        assert_eq!(energy_csv(&parsed), text);
    }

    #[test]
    fn csv_parse_errors() {
        assert_eq!(parse_energy_csv("step,time\n"), Err(CsvError::Header));
        let bad = format!("{ENERGY_HEADER}\n0,0,0\n");
        assert!(matches!(
            parse_energy_csv(&bad),
            Err(CsvError::Row { line: 2, .. })
        ));
        let bad = format!("{ENERGY_HEADER}\n0,0,0,0,0,x\n");
        assert!(parse_energy_csv(&bad).is_err());
    }

    #[test]
    fn comparison_layout() {
        let a = vec![rec(0, 0.0), rec(1, 1e-3)];
        let b = vec![rec(0, 0.0), rec(1, 2.5)];
        let text = comparison_csv(&["20".into(), "45".into()], &[a, b]);
        assert_eq!(text, "step,total_angle_20,total_angle_45\n0,0,0\n1,1e-3,2.5\n");
    }

    fn triangle() -> (Vec<Vec2>, Vec<[usize; 2]>) {
        (
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)],
            vec![[0, 1], [0, 2], [1, 2]],
        )
    }

    #[test]
    fn svg_elements() {
        let (x, e) = triangle();
        let svg = render_svg(&x, &e, None, None).unwrap();
        assert_eq!(svg.matches("<line").count(), 3);
        assert_eq!(svg.matches("<circle").count(), 0);
        assert!(svg.contains(r#"viewBox="-0.1 -1.1 1.2 1.2""#), "{svg}");

        let tool = ToolState {
            center: Vec2::new(0.5, 2.0),
            radius: 0.25,
            velocity: Vec2::ZERO,
        };
        let svg = render_svg(&x, &e, Some(&tool), Some(Vec2::new(0.2, 0.2))).unwrap();
        assert_eq!(svg.matches("<line").count(), 3);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains(r#"r="0.25""#));
        assert_eq!(svg.matches("<rect").count(), 1);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn svg_rejects_empty_mesh() {
        assert!(render_svg(&[], &[], None, None).is_err());
        let (x, _) = triangle();
        assert!(render_svg(&x, &[[0, 7]], None, None).is_err());
    }
}
