//! Bowyer–Watson triangulation.
//!
//! Points are inserted in input order. A point whose incircle determinant
//! sits within a relative `1e-12` of zero is treated as inside the
//! circumcircle, which makes cocircular configurations resolve
//! deterministically without symbolic perturbation.

use std::collections::HashMap;

use super::{Mesh, MeshError};
use crate::geom::Vec2;

const INCIRCLE_TOLERANCE: f64 = 1e-12;
const SUPER_TRIANGLE_SCALE: f64 = 10.0;

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

/// `true` when `d` lies inside or (within tolerance) on the circumcircle of
/// the counterclockwise triangle `(a, b, c)`.
fn in_circumcircle(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let (ad, bd, cd) = (a - d, b - d, c - d);
    let (alift, blift, clift) = (ad.length_squared(), bd.length_squared(), cd.length_squared());
    let bc = bd.x * cd.y - cd.x * bd.y;
    let ca = cd.x * ad.y - ad.x * cd.y;
    let ab = ad.x * bd.y - bd.x * ad.y;
    let det = alift * bc + blift * ca + clift * ab;
    let permanent = alift * (bd.x * cd.y).abs()
        + alift * (cd.x * bd.y).abs()
        + blift * (cd.x * ad.y).abs()
        + blift * (ad.x * cd.y).abs()
        + clift * (ad.x * bd.y).abs()
        + clift * (bd.x * ad.y).abs();
    det >= -INCIRCLE_TOLERANCE * permanent
}

fn validate_points(points: &[Vec2]) -> Result<(), MeshError> {
    if points.len() < 3 {
        return Err(MeshError::TooFewPoints(points.len()));
    }
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(MeshError::NonFinitePoint(i));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .x
            .total_cmp(&points[b].x)
            .then(points[a].y.total_cmp(&points[b].y))
    });
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            let (i, j) = (w[0].min(w[1]), w[0].max(w[1]));
            return Err(MeshError::DuplicatePoint(i, j));
        }
    }
    let p0 = points[0];
    let far = points
        .iter()
        .copied()
        .max_by(|a, b| (*a - p0).length_squared().total_cmp(&(*b - p0).length_squared()))
        .expect("non-empty");
    let axis = far - p0;
    let scale = axis.length_squared();
    let collinear = points.iter().all(|&p| axis.cross(p - p0).abs() <= 1e-12 * scale);
    if collinear {
        return Err(MeshError::Collinear);
    }
    Ok(())
}

/// Delaunay triangulation of `points`. Triangles are counterclockwise and
/// reference `points` by index; the mesh keeps every input point.
pub fn delaunay(points: &[Vec2]) -> Result<Mesh, MeshError> {
    validate_points(points)?;
    let n = points.len();

    let (mut min, mut max) = (points[0], points[0]);
    for p in points {
        min = Vec2::new(min.x.min(p.x), min.y.min(p.y));
        max = Vec2::new(max.x.max(p.x), max.y.max(p.y));
    }
    let center = (min + max) * 0.5;
    let radius = points.iter().map(|&p| (p - center).length()).fold(0.0, f64::max);
    // circumradius of the super-triangle: inradius is SUPER_TRIANGLE_SCALE * radius
    let reach = 2.0 * SUPER_TRIANGLE_SCALE * radius;
    let mut verts = points.to_vec();
    for angle in [90.0f64, 210.0, 330.0] {
        let (s, c) = angle.to_radians().sin_cos();
        verts.push(center + Vec2::new(c, s) * reach);
    }

    let mut triangles: Vec<[usize; 3]> = vec![[n, n + 1, n + 2]];
    let mut edge_count: HashMap<(usize, usize), u32> = HashMap::new();
    for (pi, &p) in points.iter().enumerate() {
        let (bad, good): (Vec<[usize; 3]>, Vec<[usize; 3]>) = triangles
            .iter()
            .partition(|t| in_circumcircle(verts[t[0]], verts[t[1]], verts[t[2]], p));
        edge_count.clear();
        for t in &bad {
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                *edge_count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        triangles = good;
        for t in &bad {
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                if edge_count[&(a.min(b), a.max(b))] == 1 {
                    triangles.push([a, b, pi]);
                }
            }
        }
    }

    let triangles: Vec<[usize; 3]> = triangles
        .into_iter()
        .filter(|t| t.iter().all(|&v| v < n))
        .map(|t| {
            if orient(points[t[0]], points[t[1]], points[t[2]]) < 0.0 {
                [t[0], t[2], t[1]]
            } else {
                t
            }
        })
        .collect();
    Mesh::new(points.to_vec(), triangles)
}
