//! Outer-contour extraction from a single-component occupancy mask.
//!
//! The walk follows the cracks between pixels on the corner lattice, using
//! the Moore neighborhood of each lattice vertex to decide the turn. The
//! resulting polygon encloses the union of tissue pixel squares, so its
//! area equals the pixel count when the component has no holes.
//!
//! World frame: pixel `(col, row)` occupies the unit square with lower-left
//! corner `(col, height - 1 - row)`, so image rows grow downward while
//! world `y` grows upward.

use std::collections::VecDeque;

use super::{BinaryMask, MeshError, Polygon};
use crate::geom::Vec2;

/// Heading on the corner lattice: 0 = +x, 1 = +y, 2 = -x, 3 = -y.
const STEPS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

fn count_components(mask: &BinaryMask) -> usize {
    let (w, h) = (mask.width(), mask.height());
    let mut seen = vec![false; w * h];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if !mask.bits()[start] || seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            let (col, row) = (idx % w, idx / w);
            let mut visit = |c: usize, r: usize| {
                let n = r * w + c;
                if mask.bits()[n] && !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            };
            if col > 0 {
                visit(col - 1, row);
            }
            if col + 1 < w {
                visit(col + 1, row);
            }
            if row > 0 {
                visit(col, row - 1);
            }
            if row + 1 < h {
                visit(col, row + 1);
            }
        }
    }
    components
}

/// Traces the outer boundary of the only tissue component, counterclockwise,
/// in pixel units. Collinear lattice vertices are merged.
pub fn trace_boundary(mask: &BinaryMask) -> Result<Polygon, MeshError> {
    let (w, h) = (mask.width(), mask.height());
    if !mask.bits().iter().any(|&b| b) {
        return Err(MeshError::EmptyMask);
    }
    let components = count_components(mask);
    if components > 1 {
        return Err(MeshError::MultipleComponents(components));
    }
    for row in 0..h {
        for col in 0..w {
            if mask.get(col, row) && (row == 0 || col == 0 || row + 1 == h || col + 1 == w) {
                return Err(MeshError::TouchesBorder);
            }
        }
    }

    // world-frame cell lookup, empty outside the image
    let cell = |cx: i64, cy: i64| -> bool {
        if cx < 0 || cy < 0 || cx >= w as i64 || cy >= h as i64 {
            return false;
        }
        mask.get(cx as usize, h - 1 - cy as usize)
    };

    // bottom-most row, leftmost cell: its lower edge belongs to the outer boundary
    let (start_x, start_y) = (0..h as i64)
        .find_map(|cy| (0..w as i64).find(|&cx| cell(cx, cy)).map(|cx| (cx, cy)))
        .ok_or(MeshError::EmptyMask)?;

    let mut vertices = vec![Vec2::new(start_x as f64, start_y as f64)];
    let (mut px, mut py, mut dir) = (start_x, start_y, 0usize);
    loop {
        px += STEPS[dir].0;
        py += STEPS[dir].1;
        let (ahead_left, ahead_right) = match dir {
            0 => (cell(px, py), cell(px, py - 1)),
            1 => (cell(px - 1, py), cell(px, py)),
            2 => (cell(px - 1, py - 1), cell(px - 1, py)),
            _ => (cell(px, py - 1), cell(px - 1, py - 1)),
        };
        let next = if !ahead_left {
            (dir + 1) % 4
        } else if ahead_right {
            (dir + 3) % 4
        } else {
            dir
        };
        if px == start_x && py == start_y && next == 0 {
            break;
        }
        if next != dir {
            vertices.push(Vec2::new(px as f64, py as f64));
        }
        dir = next;
    }
    Polygon::new(vertices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::polygon_signed_area;

    fn mask_from(rows: &[&str]) -> BinaryMask {
        let h = rows.len();
        let w = rows[0].len();
        let bits = rows.iter().flat_map(|r| r.chars().map(|c| c == '#')).collect();
        BinaryMask::new(w, h, bits).unwrap()
    }

    #[test]
    fn central_block_gives_square() {
        let m = mask_from(&["....", ".##.", ".##.", "...."]);
        let poly = trace_boundary(&m).unwrap();
        assert_eq!(
            poly.vertices(),
            &[
                Vec2::new(1.0, 1.0),
                Vec2::new(3.0, 1.0),
                Vec2::new(3.0, 3.0),
                Vec2::new(1.0, 3.0)
            ]
        );
    }

    #[test]
    fn empty_mask_is_error() {
        let m = mask_from(&["...", "...", "..."]);
        let err = trace_boundary(&m).unwrap_err();
        assert_eq!(err.to_string(), "empty mask");
    }

    #[test]
    fn separated_pixels_are_multiple_components() {
        let m = mask_from(&[".....", ".#.#.", "....."]);
        let err = trace_boundary(&m).unwrap_err();
        assert!(err.to_string().contains("multiple components"));
        // diagonal contact is not 4-connected
        let m = mask_from(&["....", ".#..", "..#.", "...."]);
        assert!(matches!(
            trace_boundary(&m),
            Err(MeshError::MultipleComponents(2))
        ));
    }

    #[test]
    fn border_contact_is_error() {
        let m = mask_from(&["##..", "....", "...."]);
        assert!(matches!(trace_boundary(&m), Err(MeshError::TouchesBorder)));
    }

    #[test]
    fn l_shape_area_matches_pixel_count() {
        let m = mask_from(&[
            "......", //
            ".#....", ".#....", ".####.", "......",
        ]);
        let poly = trace_boundary(&m).unwrap();
        assert_eq!(poly.vertices().len(), 6);
        assert_eq!(polygon_signed_area(poly.vertices()), 6.0);
    }

    #[test]
    fn holes_are_ignored() {
        let m = mask_from(&[".....", ".###.", ".#.#.", ".###.", "....."]);
        let poly = trace_boundary(&m).unwrap();
        assert_eq!(poly.vertices().len(), 4);
        assert_eq!(polygon_signed_area(poly.vertices()), 9.0);
    }

    #[test]
    fn single_pixel() {
        let m = mask_from(&["...", ".#.", "..."]);
        let poly = trace_boundary(&m).unwrap();
        assert_eq!(polygon_signed_area(poly.vertices()), 1.0);
    }
}
