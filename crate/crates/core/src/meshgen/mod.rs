//! Tissue shape to triangle mesh: mask decoding, contour tracing, point
//! sampling, Delaunay tessellation, culling, and constraint construction.

mod contour;
mod delaunay;
mod pgm;
mod sample;

pub use contour::trace_boundary;
pub use delaunay::delaunay;
pub use pgm::{encode_mask, load_mask};
pub use sample::sample_points;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{AreaConstraint, ConstraintSet, DistanceConstraint};
use crate::geom::{point_in_polygon, polygon_signed_area, signed_area, Vec2};

/// Triangles (and edges) with unsigned area (length) below this are
/// rejected when building constraints.
pub const DEGENERACY_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum MeshError {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("mask bit count {got} does not match {width}x{height}")]
    MaskSize { width: usize, height: usize, got: usize },
    #[error("empty mask")]
    EmptyMask,
    #[error("multiple components ({0} found)")]
    MultipleComponents(usize),
    #[error("tissue component touches the image border")]
    TouchesBorder,
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("point {0} has a non-finite coordinate")]
    NonFinitePoint(usize),
    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("all points are collinear")]
    Collinear,
    #[error("triangle {triangle} references vertex {vertex} out of range")]
    IndexOutOfRange { triangle: usize, vertex: usize },
    #[error("triangle {0} repeats a vertex index")]
    RepeatedIndex(usize),
    #[error("edge list does not match the triangle edges")]
    EdgeMismatch,
    #[error("shape too thin for spacing")]
    ShapeTooThin,
    #[error("degenerate rest state: edge ({0}, {1}) has zero length")]
    ZeroLengthEdge(usize, usize),
    #[error("degenerate rest state: triangle {0} has zero area")]
    ZeroAreaTriangle(usize),
}

/// Row-major occupancy grid; `true` marks tissue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, MeshError> {
        if width == 0 || height == 0 || bits.len() != width * height {
            return Err(MeshError::MaskSize {
                width,
                height,
                got: bits.len(),
            });
        }
        Ok(Self { width, height, bits })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Pixel at column `col`, image row `row` (row 0 at the top).
    pub fn get(&self, col: usize, row: usize) -> bool {
        self.bits[row * self.width + col]
    }
}

/// Simple counterclockwise polygon with positive area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonDocument", into = "PolygonDocument")]
pub struct Polygon {
    vertices: Vec<Vec2>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolygonDocument {
    vertices: Vec<Vec2>,
}

impl TryFrom<PolygonDocument> for Polygon {
    type Error = MeshError;
    fn try_from(doc: PolygonDocument) -> Result<Self, MeshError> {
        Polygon::new(doc.vertices)
    }
}

impl From<Polygon> for PolygonDocument {
    fn from(p: Polygon) -> Self {
        PolygonDocument { vertices: p.vertices }
    }
}

fn segments_touch(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let o = |p: Vec2, q: Vec2, r: Vec2| (q - p).cross(r - p);
    let on = |p: Vec2, q: Vec2, r: Vec2| {
        r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    let (d1, d2, d3, d4) = (o(c, d, a), o(c, d, b), o(a, b, c), o(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on(c, d, a))
        || (d2 == 0.0 && on(c, d, b))
        || (d3 == 0.0 && on(a, b, c))
        || (d4 == 0.0 && on(a, b, d))
}

impl Polygon {
    pub fn new(vertices: Vec<Vec2>) -> Result<Self, MeshError> {
        let n = vertices.len();
        if n < 3 {
            return Err(MeshError::InvalidPolygon(format!(
                "{n} vertices, need at least 3"
            )));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(MeshError::InvalidPolygon(format!("vertex {i} is not finite")));
        }
        if polygon_signed_area(&vertices) <= 0.0 {
            return Err(MeshError::InvalidPolygon(
                "signed area must be positive (counterclockwise order)".into(),
            ));
        }
        for i in 0..n {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            if a == b {
                return Err(MeshError::InvalidPolygon(format!(
                    "vertices {i} and {} coincide",
                    (i + 1) % n
                )));
            }
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (c, d) = (vertices[j], vertices[(j + 1) % n]);
                let hit = if adjacent {
                    // neighbours share a vertex; reject only folding back onto each other
                    let (shared, p, q) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                    (p - shared).cross(q - shared) == 0.0 && (p - shared).dot(q - shared) > 0.0
                } else {
                    segments_touch(a, b, c, d)
                };
                if hit {
                    return Err(MeshError::InvalidPolygon(format!("edges {i} and {j} intersect")));
                }
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    /// Axis-aligned bounds `(min, max)`.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        bounds(&self.vertices)
    }

    /// Parses `{"vertices": [[x, y], ...]}`.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Applies `p * scale + offset` to every vertex.
    pub fn transformed(&self, scale: f64, offset: Vec2) -> Result<Polygon, MeshError> {
        Polygon::new(self.vertices.iter().map(|&v| v * scale + offset).collect())
    }
}

pub(crate) fn bounds(points: &[Vec2]) -> (Vec2, Vec2) {
    let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        min = Vec2::new(min.x.min(p.x), min.y.min(p.y));
        max = Vec2::new(max.x.max(p.x), max.y.max(p.y));
    }
    (min, max)
}

/// Triangle mesh. `edges` is always the deduplicated union of triangle
/// edges, lower index first, sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeshDocument", into = "MeshDocument")]
pub struct Mesh {
    vertices: Vec<Vec2>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
}

/// On-disk mesh layout: exactly the keys `vertices`, `triangles`, `edges`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshDocument {
    vertices: Vec<Vec2>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<MeshDocument> for Mesh {
    type Error = MeshError;
    fn try_from(doc: MeshDocument) -> Result<Self, MeshError> {
        let mesh = Mesh::new(doc.vertices, doc.triangles)?;
        if mesh.edges != doc.edges {
            return Err(MeshError::EdgeMismatch);
        }
        Ok(mesh)
    }
}

impl From<Mesh> for MeshDocument {
    fn from(m: Mesh) -> Self {
        MeshDocument {
            vertices: m.vertices,
            triangles: m.triangles,
            edges: m.edges,
        }
    }
}

impl Mesh {
    /// Checks index validity and derives the edge list. Geometric
    /// degeneracy is checked later, by [`build_constraints`].
    pub fn new(vertices: Vec<Vec2>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let mut edges = BTreeSet::new();
        for (ti, t) in triangles.iter().enumerate() {
            if let Some(&vertex) = t.iter().find(|&&v| v >= vertices.len()) {
                return Err(MeshError::IndexOutOfRange { triangle: ti, vertex });
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(MeshError::RepeatedIndex(ti));
            }
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                edges.insert([a.min(b), a.max(b)]);
            }
        }
        Ok(Self {
            vertices,
            triangles,
            edges: edges.into_iter().collect(),
        })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("mesh serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Keeps the triangles whose centroid lies inside `polygon` (even-odd test),
/// then drops unreferenced vertices while preserving relative order.
pub fn cull_outside(mesh: &Mesh, polygon: &Polygon) -> Result<Mesh, MeshError> {
    let v = mesh.vertices();
    let kept: Vec<[usize; 3]> = mesh
        .triangles()
        .iter()
        .copied()
        .filter(|t| {
            let centroid = (v[t[0]] + v[t[1]] + v[t[2]]) / 3.0;
            point_in_polygon(centroid, polygon.vertices())
        })
        .collect();
    if kept.is_empty() {
        return Err(MeshError::ShapeTooThin);
    }
    let mut used = vec![false; v.len()];
    for t in &kept {
        for &i in t {
            used[i] = true;
        }
    }
    let mut remap = vec![usize::MAX; v.len()];
    let mut vertices = Vec::new();
    for (i, &p) in v.iter().enumerate() {
        if used[i] {
            remap[i] = vertices.len();
            vertices.push(p);
        }
    }
    let triangles = kept
        .into_iter()
        .map(|t| [remap[t[0]], remap[t[1]], remap[t[2]]])
        .collect();
    Mesh::new(vertices, triangles)
}

/// Full polygon pipeline: sample, triangulate, cull.
pub fn mesh_polygon(polygon: &Polygon, spacing: f64) -> Result<Mesh, MeshError> {
    let points = sample_points(polygon, spacing);
    cull_outside(&delaunay(&points)?, polygon)
}

/// One distance constraint per edge and one area constraint per triangle,
/// with rest values measured from the current vertex positions.
pub fn build_constraints(mesh: &Mesh, k_spring: f64, k_area: f64) -> Result<ConstraintSet, MeshError> {
    let v = mesh.vertices();
    let mut distances = Vec::with_capacity(mesh.edges().len());
    for &[i, j] in mesh.edges() {
        let rest = (v[i] - v[j]).length();
        if rest < DEGENERACY_FLOOR {
            return Err(MeshError::ZeroLengthEdge(i, j));
        }
        distances.push(DistanceConstraint {
            i,
            j,
            rest_length: rest,
            stiffness: k_spring,
        });
    }
    let mut areas = Vec::with_capacity(mesh.triangles().len());
    for (ti, &[i, j, k]) in mesh.triangles().iter().enumerate() {
        let rest = signed_area(v[i], v[j], v[k]).abs();
        if rest < DEGENERACY_FLOOR {
            return Err(MeshError::ZeroAreaTriangle(ti));
        }
        areas.push(AreaConstraint {
            i,
            j,
            k,
            rest_area: rest,
            stiffness: k_area,
        });
    }
    Ok(ConstraintSet { distances, areas })
}
