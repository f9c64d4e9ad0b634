//! Vertex placement for tessellation: boundary resampling plus an interior grid.

use super::Polygon;
use crate::geom::{point_in_polygon, point_segment_distance, Vec2};

/// Boundary points at arc-length intervals no longer than `spacing`,
/// followed by interior grid points (pitch `spacing`, anchored at the
/// polygon's bounding-box minimum) that lie strictly inside the polygon and
/// more than `spacing / 2` away from its boundary. Grid points are emitted
/// row by row, bottom to top, left to right.
///
/// # Panics
/// If `spacing` is not strictly positive and finite.
pub fn sample_points(polygon: &Polygon, spacing: f64) -> Vec<Vec2> {
    assert!(
        spacing > 0.0 && spacing.is_finite(),
        "spacing must be positive, got {spacing}"
    );
    let verts = polygon.vertices();
    let n = verts.len();
    let mut out = Vec::new();
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        let len = (b - a).length();
        let segments = ((len / spacing).ceil() as usize).max(1);
        out.push(a);
        for s in 1..segments {
            let t = s as f64 / segments as f64;
            out.push(a + (b - a) * t);
        }
    }

    let (min, max) = polygon.bounds();
    let clearance = 0.5 * spacing;
    let cols = ((max.x - min.x) / spacing).floor() as usize;
    let rows = ((max.y - min.y) / spacing).floor() as usize;
    for row in 0..=rows {
        let y = min.y + row as f64 * spacing;
        for col in 0..=cols {
            let p = Vec2::new(min.x + col as f64 * spacing, y);
            if !point_in_polygon(p, verts) {
                continue;
            }
            let near = (0..n).any(|i| point_segment_distance(p, verts[i], verts[(i + 1) % n]) <= clearance);
            if !near {
                out.push(p);
            }
        }
    }
    out
}
