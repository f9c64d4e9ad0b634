use super::{AreaConstraint, DistanceConstraint, SimError, MIN_SEPARATION};
use crate::geom::{signed_area, Vec2};

/// `|x_i - x_j| - d0`.
pub fn eval_distance(c: &DistanceConstraint, x: &[Vec2]) -> Result<f64, SimError> {
    let len = (x[c.i] - x[c.j]).length();
    if len < MIN_SEPARATION {
        return Err(SimError::Degenerate(c.i, c.j));
    }
    Ok(len - c.rest_length)
}

/// `½ |cross(x_j - x_i, x_k - x_i)| - A0`; collapsed triangles give `-A0`.
pub fn eval_area(c: &AreaConstraint, x: &[Vec2]) -> f64 {
    signed_area(x[c.i], x[c.j], x[c.k]).abs() - c.rest_area
}

/// Mass-weighted correction for one distance constraint, scaled by its
/// stiffness. Returns `(Δx_i, Δx_j)`.
pub fn project_distance(
    c: &DistanceConstraint,
    x: &[Vec2],
    inverse_masses: &[f64],
) -> Result<(Vec2, Vec2), SimError> {
    let delta = x[c.i] - x[c.j];
    let len = delta.length();
    if len < MIN_SEPARATION {
        return Err(SimError::Degenerate(c.i, c.j));
    }
    let (wi, wj) = (inverse_masses[c.i], inverse_masses[c.j]);
    let wsum = wi + wj;
    if wsum == 0.0 {
        return Ok((Vec2::ZERO, Vec2::ZERO));
    }
    let residual = len - c.rest_length;
    let n = delta / len;
    let di = n * (-c.stiffness * (wi / wsum) * residual);
    let dj = n * (c.stiffness * (wj / wsum) * residual);
    Ok((di, dj))
}

/// Gradient of the unsigned area with respect to each vertex. For a
/// collapsed triangle the counterclockwise orientation is assumed.
pub(crate) fn area_gradient(xi: Vec2, xj: Vec2, xk: Vec2) -> [Vec2; 3] {
    let sign = if signed_area(xi, xj, xk) < 0.0 { -1.0 } else { 1.0 };
    let half = 0.5 * sign;
    [
        (xj - xk).perp_cw() * half,
        (xk - xi).perp_cw() * half,
        (xi - xj).perp_cw() * half,
    ]
}

/// Mass-weighted gradient projection for one area constraint, scaled by its
/// stiffness. Returns corrections for `(i, j, k)`; zero when nothing can
/// move or the gradient vanishes.
pub fn project_area(c: &AreaConstraint, x: &[Vec2], inverse_masses: &[f64]) -> [Vec2; 3] {
    let idx = [c.i, c.j, c.k];
    let residual = eval_area(c, x);
    if residual == 0.0 {
        return [Vec2::ZERO; 3];
    }
    let grad = area_gradient(x[c.i], x[c.j], x[c.k]);
    let w = idx.map(|p| inverse_masses[p]);
    let denom: f64 = (0..3).map(|p| w[p] * grad[p].length_squared()).sum();
    if denom < 1e-12 {
        return [Vec2::ZERO; 3];
    }
    let s = residual / denom;
    [0, 1, 2].map(|p| grad[p] * (-c.stiffness * s * w[p]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dc(d0: f64, k: f64) -> DistanceConstraint {
        DistanceConstraint {
            i: 0,
            j: 1,
            rest_length: d0,
            stiffness: k,
        }
    }

    fn ac(a0: f64, k: f64) -> AreaConstraint {
        AreaConstraint {
            i: 0,
            j: 1,
            k: 2,
            rest_area: a0,
            stiffness: k,
        }
    }

    fn v(x: f64, y: f64) -> Vec2 {
        Vec2::new(x, y)
    }

    #[test]
    fn distance_residuals() {
        assert_eq!(
            eval_distance(&dc(1.0, 1.0), &[v(0.0, 0.0), v(2.0, 0.0)]).unwrap(),
            1.0
        );
        assert_eq!(
            eval_distance(&dc(1.0, 1.0), &[v(0.0, 0.0), v(0.0, 1.0)]).unwrap(),
            0.0
        );
        assert_eq!(
            eval_distance(&dc(1.0, 1.0), &[v(0.0, 0.0), v(0.5, 0.0)]).unwrap(),
            -0.5
        );
        assert_eq!(
            eval_distance(&dc(1.0, 1.0), &[v(0.0, 0.0), v(0.0, 0.0)]),
            Err(SimError::Degenerate(0, 1))
        );
    }

    #[test]
    fn area_residuals() {
        assert_eq!(
            eval_area(&ac(0.5, 1.0), &[v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0)]),
            0.0
        );
        assert_eq!(
            eval_area(&ac(0.5, 1.0), &[v(0.0, 0.0), v(2.0, 0.0), v(0.0, 2.0)]),
            1.5
        );
        assert_eq!(
            eval_area(&ac(0.5, 1.0), &[v(0.0, 0.0), v(1.0, 0.0), v(2.0, 0.0)]),
            -0.5
        );
        // orientation does not matter
        assert_eq!(
            eval_area(&ac(0.5, 1.0), &[v(0.0, 0.0), v(0.0, 2.0), v(2.0, 0.0)]),
            1.5
        );
    }

    #[test]
    fn distance_projection_cases() {
        let x = [v(0.0, 0.0), v(2.0, 0.0)];
        assert_eq!(
            project_distance(&dc(1.0, 1.0), &x, &[1.0, 1.0]).unwrap(),
            (v(0.5, 0.0), v(-0.5, 0.0))
        );
        assert_eq!(
            project_distance(&dc(1.0, 1.0), &x, &[0.0, 1.0]).unwrap(),
            (v(0.0, 0.0), v(-1.0, 0.0))
        );
        let (di, dj) = project_distance(&dc(1.0, 0.15), &x, &[1.0, 1.0]).unwrap();
        assert!((di - v(0.075, 0.0)).length() < 1e-16);
        assert!((dj - v(-0.075, 0.0)).length() < 1e-16);
        assert_eq!(
            project_distance(&dc(1.0, 1.0), &x, &[0.0, 0.0]).unwrap(),
            (Vec2::ZERO, Vec2::ZERO)
        );
        assert!(project_distance(&dc(1.0, 1.0), &[v(1.0, 1.0), v(1.0, 1.0)], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn area_projection_at_rest_is_zero() {
        let x = [v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0)];
        assert_eq!(project_area(&ac(0.5, 0.3), &x, &[1.0; 3]), [Vec2::ZERO; 3]);
    }

    #[test]
    fn area_projection_all_pinned_is_zero() {
        let x = [v(0.0, 0.0), v(2.0, 0.0), v(0.0, 2.0)];
        assert_eq!(project_area(&ac(0.5, 1.0), &x, &[0.0; 3]), [Vec2::ZERO; 3]);
    }

    /// Projection rebuilt from a central-difference gradient of the
    /// unsigned area, independent of the analytic gradient.
    fn fd_area_projection(c: &AreaConstraint, x: &[Vec2], w: &[f64]) -> [Vec2; 3] {
        let h = 1e-6;
        let area = |x: &[Vec2]| signed_area(x[0], x[1], x[2]).abs();
        let mut grad = [Vec2::ZERO; 3];
        for p in 0..3 {
            for axis in 0..2 {
                let mut plus = x.to_vec();
                let mut minus = x.to_vec();
                if axis == 0 {
                    plus[p].x += h;
                    minus[p].x -= h;
                } else {
                    plus[p].y += h;
                    minus[p].y -= h;
                }
                let d = (area(&plus) - area(&minus)) / (2.0 * h);
                if axis == 0 {
                    grad[p].x = d;
                } else {
                    grad[p].y = d;
                }
            }
        }
        let residual = area(x) - c.rest_area;
        let denom: f64 = (0..3).map(|p| w[p] * grad[p].length_squared()).sum();
        [0, 1, 2].map(|p| grad[p] * (-c.stiffness * residual / denom * w[p]))
    }

    #[test]
    fn area_projection_matches_finite_difference_oracle() {
        let x = [v(0.0, 0.0), v(2.0, 0.0), v(0.0, 2.0)];
        let c = ac(0.5, 1.0);
        let w = [1.0; 3];
        let got = project_area(&c, &x, &w);
        let want = fd_area_projection(&c, &x, &w);
        for p in 0..3 {
            assert!(
                (got[p] - want[p]).length() < 1e-8,
                "{p}: {:?} vs {:?}",
                got[p],
                want[p]
            );
        }
        let moved: Vec<Vec2> = (0..3).map(|p| x[p] + got[p]).collect();
        assert!(eval_area(&c, &moved).abs() < eval_area(&c, &x).abs());
        let total = got[0] + got[1] + got[2];
        assert!(total.length() < 1e-12);
    }

    #[test]
    fn inverted_triangle_is_pushed_back_toward_rest_area() {
        // clockwise, too large: gradient sign flips with the orientation
        let x = [v(0.0, 0.0), v(0.0, 2.0), v(2.0, 0.0)];
        let c = ac(0.5, 1.0);
        let w = [1.0; 3];
        let got = project_area(&c, &x, &w);
        let want = fd_area_projection(&c, &x, &w);
        for p in 0..3 {
            assert!((got[p] - want[p]).length() < 1e-8);
        }
    }
}
