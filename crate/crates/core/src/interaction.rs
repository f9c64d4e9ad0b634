//! Circular manipulator: scripted motion, proximity detection and the
//! position-update field it imposes on nearby particles.
//!
//! A particle `q` collides when its distance `d` to the tool circle
//! (zero inside the disk) is below the threshold `alpha`. The push depth is
//! `d_star = alpha - d`, clamped to `[0, alpha]`, so the push grows as the
//! tool closes in and vanishes at the activation distance. Every particle
//! `i` within `r` of `q` is displaced by
//!
//! ```text
//! (r - |x_q - x_i|) / r * d_star * v / |v|
//! ```
//!
//! and the fields of simultaneous collisions are summed.

use serde::{Deserialize, Serialize};

use crate::geom::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToolState {
    pub center: Vec2,
    pub radius: f64,
    pub velocity: Vec2,
}

/// Straight-line path from `start` to `goal` at constant `speed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trajectory {
    pub start: Vec2,
    pub goal: Vec2,
    pub speed: f64,
}

impl Trajectory {
    pub fn length(&self) -> f64 {
        (self.goal - self.start).length()
    }

    /// Time at which the tool reaches the goal.
    pub fn arrival_time(&self) -> f64 {
        self.length() / self.speed
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionEvent {
    pub particle: usize,
    pub d_star: f64,
    /// Unit vector along the tool velocity.
    pub direction: Vec2,
}

/// Tool pose at time `t`; the tool stops (zero velocity) once it arrives.
pub fn tool_at(traj: &Trajectory, radius: f64, t: f64) -> ToolState {
    let length = traj.length();
    let u = (traj.goal - traj.start) / length;
    let travelled = t * traj.speed;
    if travelled >= length {
        ToolState {
            center: traj.goal,
            radius,
            velocity: Vec2::ZERO,
        }
    } else {
        ToolState {
            center: traj.start + u * travelled,
            radius,
            velocity: u * traj.speed,
        }
    }
}

/// Distance from `p` to the tool circle, zero inside the disk.
pub fn gap_to_tool(p: Vec2, tool: &ToolState) -> f64 {
    ((p - tool.center).length() - tool.radius).max(0.0)
}

/// Collision events in particle order. A motionless tool yields none.
pub fn detect_collisions(x: &[Vec2], tool: &ToolState, alpha: f64) -> Vec<CollisionEvent> {
    let speed = tool.velocity.length();
    if speed == 0.0 || speed.is_nan() {
        return Vec::new();
    }
    let direction = tool.velocity / speed;
    x.iter()
        .enumerate()
        .filter_map(|(particle, &p)| {
            let d = gap_to_tool(p, tool);
            (d < alpha).then(|| CollisionEvent {
                particle,
                d_star: (alpha - d).clamp(0.0, alpha),
                direction,
            })
        })
        .collect()
}

/// Per-particle displacement caused by one collision, with linear falloff
/// over radius `r` around the collision particle. Pinned particles get zero.
pub fn displacement_field(event: &CollisionEvent, x: &[Vec2], r: f64, inverse_masses: &[f64]) -> Vec<Vec2> {
    let xq = x[event.particle];
    x.iter()
        .zip(inverse_masses)
        .map(|(&xi, &w)| {
            let dist = (xq - xi).length();
            if w == 0.0 || dist > r {
                Vec2::ZERO
            } else {
                event.direction * ((r - dist) / r * event.d_star)
            }
        })
        .collect()
}

/// Adds the summed displacement fields of `events` (all evaluated on the
/// unmodified `predicted` positions) to `predicted`.
pub fn apply_tool(
    predicted: &[Vec2],
    events: &[CollisionEvent],
    r: f64,
    inverse_masses: &[f64],
) -> Vec<Vec2> {
    let mut total = vec![Vec2::ZERO; predicted.len()];
    for event in events {
        for (acc, d) in total
            .iter_mut()
            .zip(displacement_field(event, predicted, r, inverse_masses))
        {
            *acc += d;
        }
    }
    predicted.iter().zip(total).map(|(&p, d)| p + d).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: f64, y: f64) -> Vec2 {
        Vec2::new(x, y)
    }

    fn moving_tool(center: Vec2) -> ToolState {
        ToolState {
            center,
            radius: 0.25,
            velocity: v(0.0, -1.0),
        }
    }

    #[test]
    fn trajectory_sampling() {
        let traj = Trajectory {
            start: v(0.0, 0.0),
            goal: v(0.0, -1.0),
            speed: 0.5,
        };
        assert_eq!(tool_at(&traj, 0.25, 0.0).center, traj.start);
        let mid = tool_at(&traj, 0.25, 1.0);
        assert_eq!(mid.center, v(0.0, -0.5));
        assert_eq!(mid.velocity, v(0.0, -0.5));
        let end = tool_at(&traj, 0.25, 100.0);
        assert_eq!(end.center, traj.goal);
        assert_eq!(end.velocity, Vec2::ZERO);
    }

    #[test]
    fn far_particle_has_no_event() {
        let tool = moving_tool(Vec2::ZERO);
        assert!(detect_collisions(&[v(0.25 + 0.05, 0.0)], &tool, 0.025).is_empty());
    }

    #[test]
    fn boundary_particle_has_maximal_push() {
        let tool = moving_tool(Vec2::ZERO);
        let events = detect_collisions(&[v(0.0, -0.25)], &tool, 0.025);
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].d_star, 0.025);
        assert_eq!(events[0].direction, v(0.0, -1.0));
        // inside the disk counts as contact too
        let inside = detect_collisions(&[v(0.0, -0.1)], &tool, 0.025);
        assert_eq!(inside[0].d_star, 0.025);
    }

    #[test]
    fn stationary_tool_has_no_events() {
        let tool = ToolState {
            velocity: Vec2::ZERO,
            ..moving_tool(Vec2::ZERO)
        };
        assert!(detect_collisions(&[v(0.0, 0.0), v(0.0, -0.25)], &tool, 0.025).is_empty());
    }

    #[test]
    fn field_examples() {
        let e = CollisionEvent {
            particle: 0,
            d_star: 0.02,
            direction: v(0.0, -1.0),
        };
        let x = [v(0.0, 0.0), v(0.25, 0.0)];
        let f = displacement_field(&e, &x, 0.25, &[1.0, 1.0]);
        assert_eq!(f, vec![v(0.0, -0.02), v(0.0, 0.0)]);

        let e = CollisionEvent {
            direction: v(1.0, 0.0),
            ..e
        };
        let f = displacement_field(&e, &[v(0.0, 0.0), v(0.0, 0.125)], 0.25, &[1.0, 1.0]);
        assert_eq!(f[1], v(0.01, 0.0));
        // pinned particles are not moved
        let f = displacement_field(&e, &[v(0.0, 0.0), v(0.0, 0.125)], 0.25, &[1.0, 0.0]);
        assert_eq!(f[1], Vec2::ZERO);
    }

    #[test]
    fn apply_tool_cases() {
        let x = vec![v(0.0, 0.0), v(0.1, 0.0), v(0.3, 0.0)];
        let w = [1.0; 3];
        assert_eq!(apply_tool(&x, &[], 0.25, &w), x);

        let e1 = CollisionEvent {
            particle: 0,
            d_star: 0.02,
            direction: v(0.0, 1.0),
        };
        let one = apply_tool(&x, &[e1], 0.25, &w);
        let f1 = displacement_field(&e1, &x, 0.25, &w);
        for i in 0..3 {
            assert_eq!(one[i], x[i] + f1[i]);
        }

        let e2 = CollisionEvent {
            particle: 2,
            d_star: 0.01,
            direction: v(0.0, 1.0),
        };
        let two = apply_tool(&x, &[e1, e2], 0.25, &w);
        // two-pass oracle: apply each field separately on the original positions
        let f2 = displacement_field(&e2, &x, 0.25, &w);
        for i in 0..3 {
            let want = x[i] + f1[i] + f2[i];
            assert!((two[i] - want).length() < 1e-15);
        }
        assert!(two[1].y > one[1].y, "overlapping supports add up");
    }

    proptest! {
        #[test]
        fn falloff_is_linear_and_parallel(dist in 0.0f64..0.5, d_star in 0.0f64..0.025, angle in 0.0f64..std::f64::consts::TAU) {
            let direction = v(angle.cos(), angle.sin());
            let e = CollisionEvent { particle: 0, d_star, direction };
            let x = [Vec2::ZERO, v(dist, 0.0)];
            let f = displacement_field(&e, &x, 0.25, &[1.0, 1.0])[1];
            if dist > 0.25 {
                prop_assert_eq!(f, Vec2::ZERO);
            } else {
                let expected = d_star * (0.25 - dist) / 0.25;
                prop_assert!((f.length() - expected).abs() <= 1e-15);
                prop_assert!(f.dot(direction) >= 0.0);
                prop_assert!(f.cross(direction).abs() <= 1e-15);
            }
        }

        #[test]
        fn closer_particles_push_harder(g1 in 0.0f64..0.025, g2 in 0.0f64..0.025) {
            let tool = moving_tool(Vec2::ZERO);
            let x = [v(0.25 + g1, 0.0), v(0.25 + g2, 0.0)];
            let events = detect_collisions(&x, &tool, 0.025);
            if events.len() == 2 && g1 < g2 {
                prop_assert!(events[0].d_star >= events[1].d_star);
            }
            for e in &events {
                prop_assert!(e.d_star >= 0.0 && e.d_star <= 0.025);
            }
        }
    }

    #[test]
    fn threshold_gating() {
        let tool = moving_tool(Vec2::ZERO);
        let x = [v(0.0, 0.276), v(0.0, -0.3)];
        assert!(detect_collisions(&x, &tool, 0.025).is_empty());
    }
}
