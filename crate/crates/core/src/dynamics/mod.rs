//! Position-based dynamics: prediction, Gauss–Seidel constraint projection,
//! velocity update and boundary pinning.
//!
//! A step runs
//!
//! ```text
//! x*      = x + dt v + dt² g          (pinned particles stay put)
//! x*     += tool displacement          (see `interaction`)
//! x^{t+1} = solve(x*)                  (fixed number of sweeps)
//! v^{t+1} = (x^{t+1} - x) / dt
//! ```
//!
//! followed by pinning of every particle on or beyond the boundary lines.

mod constraints;
mod world;

pub(crate) use constraints::area_gradient;
pub use constraints::{eval_area, eval_distance, project_area, project_distance};
pub use world::{StepReport, World};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Vec2;

/// Separations below this make the distance constraint gradient undefined.
pub const MIN_SEPARATION: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("particle {0} has a non-finite position")]
    NonFinite(usize),
    #[error("degenerate configuration: particles {0} and {1} coincide")]
    Degenerate(usize, usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("constraint references particle {index} but only {count} exist")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },
}

/// Positions, velocities and inverse masses of the simulated particles.
/// An inverse mass of zero pins the particle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleSystem {
    pub positions: Vec<Vec2>,
    pub velocities: Vec<Vec2>,
    pub inverse_masses: Vec<f64>,
}

impl ParticleSystem {
    /// Particles at rest with a common mass.
    pub fn at_rest(positions: Vec<Vec2>, mass: f64) -> Self {
        let n = positions.len();
        Self {
            positions,
            velocities: vec![Vec2::ZERO; n],
            inverse_masses: vec![1.0 / mass; n],
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn is_pinned(&self, i: usize) -> bool {
        self.inverse_masses[i] == 0.0
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let n = self.positions.len();
        if n == 0 {
            return Err(SimError::InvalidParam {
                name: "positions",
                reason: "particle system is empty".into(),
            });
        }
        for got in [self.velocities.len(), self.inverse_masses.len()] {
            if got != n {
                return Err(SimError::LengthMismatch { expected: n, got });
            }
        }
        if let Some(i) = self
            .inverse_masses
            .iter()
            .position(|w| !(*w >= 0.0 && w.is_finite()))
        {
            return Err(SimError::InvalidParam {
                name: "inverse_masses",
                reason: format!("particle {i} has inverse mass {}", self.inverse_masses[i]),
            });
        }
        if let Some(i) = (0..n).find(|&i| !self.positions[i].is_finite() || !self.velocities[i].is_finite()) {
            return Err(SimError::NonFinite(i));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceConstraint {
    pub i: usize,
    pub j: usize,
    pub rest_length: f64,
    pub stiffness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaConstraint {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub rest_area: f64,
    pub stiffness: f64,
}

/// Distance constraints are always swept before area constraints.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub distances: Vec<DistanceConstraint>,
    pub areas: Vec<AreaConstraint>,
}

impl ConstraintSet {
    pub fn len(&self) -> usize {
        self.distances.len() + self.areas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multiplies every stiffness by `factor`.
    pub fn scaled(&self, factor: f64) -> ConstraintSet {
        ConstraintSet {
            distances: self
                .distances
                .iter()
                .map(|c| DistanceConstraint {
                    stiffness: c.stiffness * factor,
                    ..*c
                })
                .collect(),
            areas: self
                .areas
                .iter()
                .map(|c| AreaConstraint {
                    stiffness: c.stiffness * factor,
                    ..*c
                })
                .collect(),
        }
    }

    pub fn check_indices(&self, count: usize) -> Result<(), SimError> {
        let indices = self
            .distances
            .iter()
            .flat_map(|c| [c.i, c.j])
            .chain(self.areas.iter().flat_map(|c| [c.i, c.j, c.k]));
        for index in indices {
            if index >= count {
                return Err(SimError::IndexOutOfRange { index, count });
            }
        }
        Ok(())
    }
}

/// Global simulation parameters. `Default` gives the reference values:
/// m = 1e-4 kg, k_spring = 0.15, k_area = 1, g = -9.8 m/s², dt = 0.01 s,
/// 30 solver iterations, tool radius 0.25 m, collision threshold 0.025 m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    pub particle_mass: f64,
    pub k_spring: f64,
    pub k_area: f64,
    pub gravity: Vec2,
    pub dt: f64,
    pub solver_iterations: usize,
    pub tool_radius: f64,
    pub collision_threshold: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            particle_mass: 0.0001,
            k_spring: 0.15,
            k_area: 1.0,
            gravity: Vec2::new(0.0, -9.8),
            dt: 0.01,
            solver_iterations: 30,
            tool_radius: 0.25,
            collision_threshold: 0.025,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = |name: &'static str, value: f64| {
            if value > 0.0 && value.is_finite() {
                Ok(())
            } else {
                Err(SimError::InvalidParam {
                    name,
                    reason: format!("must be positive and finite, got {value}"),
                })
            }
        };
        let unit = |name: &'static str, value: f64| {
            if (0.0..=1.0).contains(&value) {
                Ok(())
            } else {
                Err(SimError::InvalidParam {
                    name,
                    reason: format!("must lie in [0, 1], got {value}"),
                })
            }
        };
        positive("dt", self.dt)?;
        positive("tool_radius", self.tool_radius)?;
        positive("collision_threshold", self.collision_threshold)?;
        positive("particle_mass", self.particle_mass)?;
        unit("k_spring", self.k_spring)?;
        unit("k_area", self.k_area)?;
        if self.solver_iterations == 0 {
            return Err(SimError::InvalidParam {
                name: "solver_iterations",
                reason: "must be at least 1".into(),
            });
        }
        if !self.gravity.is_finite() {
            return Err(SimError::InvalidParam {
                name: "gravity",
                reason: "must be finite".into(),
            });
        }
        Ok(())
    }
}

/// Horizontal lines; particles on or beyond either line are pinned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConditions {
    pub y_top: f64,
    pub y_bottom: f64,
}

impl BoundaryConditions {
    /// Lines at infinity: nothing is ever pinned.
    pub const NONE: BoundaryConditions = BoundaryConditions {
        y_top: f64::INFINITY,
        y_bottom: f64::NEG_INFINITY,
    };

    pub fn validate(&self) -> Result<(), SimError> {
        if self.y_top > self.y_bottom {
            Ok(())
        } else {
            Err(SimError::InvalidParam {
                name: "y_top",
                reason: format!("must exceed y_bottom ({} <= {})", self.y_top, self.y_bottom),
            })
        }
    }

    pub fn crosses(&self, p: Vec2) -> bool {
        p.y >= self.y_top || p.y <= self.y_bottom
    }
}

/// Prediction step. Pinned particles keep their position.
pub fn predict(ps: &ParticleSystem, dt: f64, external_accel: Vec2) -> Result<Vec<Vec2>, SimError> {
    let dt2 = dt * dt;
    ps.positions
        .iter()
        .zip(&ps.velocities)
        .zip(&ps.inverse_masses)
        .enumerate()
        .map(|(i, ((&x, &v), &w))| {
            let p = if w == 0.0 {
                x
            } else {
                x + v * dt + external_accel * dt2
            };
            if p.is_finite() {
                Ok(p)
            } else {
                Err(SimError::NonFinite(i))
            }
        })
        .collect()
}

/// Runs `iterations` Gauss–Seidel sweeps over `constraints`, starting
/// from `predicted`. Each correction is applied before the next constraint
/// is evaluated.
pub fn solve(
    predicted: &[Vec2],
    constraints: &ConstraintSet,
    inverse_masses: &[f64],
    iterations: usize,
) -> Result<Vec<Vec2>, SimError> {
    if inverse_masses.len() != predicted.len() {
        return Err(SimError::LengthMismatch {
            expected: predicted.len(),
            got: inverse_masses.len(),
        });
    }
    constraints.check_indices(predicted.len())?;
    let mut x = predicted.to_vec();
    for _ in 0..iterations {
        for c in &constraints.distances {
            let (di, dj) = project_distance(c, &x, inverse_masses)?;
            x[c.i] += di;
            x[c.j] += dj;
        }
        for c in &constraints.areas {
            let [di, dj, dk] = project_area(c, &x, inverse_masses);
            x[c.i] += di;
            x[c.j] += dj;
            x[c.k] += dk;
        }
    }
    Ok(x)
}

/// Velocity update from the position change; pinned particles keep zero
/// velocity.
pub fn integrate(ps: &mut ParticleSystem, new_positions: Vec<Vec2>, dt: f64) -> Result<(), SimError> {
    if new_positions.len() != ps.len() {
        return Err(SimError::LengthMismatch {
            expected: ps.len(),
            got: new_positions.len(),
        });
    }
    for (i, x_new) in new_positions.into_iter().enumerate() {
        ps.velocities[i] = if ps.inverse_masses[i] == 0.0 {
            Vec2::ZERO
        } else {
            (x_new - ps.positions[i]) / dt
        };
        ps.positions[i] = x_new;
    }
    Ok(())
}

/// Pins (zero velocity, zero inverse mass) every particle on or beyond a
/// boundary line. Pinning is permanent.
pub fn apply_boundary(ps: &mut ParticleSystem, bc: &BoundaryConditions) {
    for i in 0..ps.len() {
        if bc.crosses(ps.positions[i]) {
            ps.velocities[i] = Vec2::ZERO;
            ps.inverse_masses[i] = 0.0;
        }
    }
}
