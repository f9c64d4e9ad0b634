//! Implicit-Euler energy of a step:
//!
//! ```text
//! E = ½ ‖x^{t+1} - x*‖²_M + dt² (E_spring + E_area)
//! E_family = ½ Σ k C²      (diagonal stiffness per constraint)
//! ```
//!
//! evaluated at the solver output `x^{t+1}`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{ConstraintSet, SimError, MIN_SEPARATION};
use crate::geom::{signed_area, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub step: u64,
    pub time: f64,
    pub inertial: f64,
    pub potential_spring: f64,
    pub potential_area: f64,
    pub total: f64,
}

impl EnergyRecord {
    pub const ZERO: EnergyRecord = EnergyRecord {
        step: 0,
        time: 0.0,
        inertial: 0.0,
        potential_spring: 0.0,
        potential_area: 0.0,
        total: 0.0,
    };
}

fn check_len(expected: usize, got: usize) -> Result<(), SimError> {
    if expected == got {
        Ok(())
    } else {
        Err(SimError::LengthMismatch { expected, got })
    }
}

/// `½ Σ m_i |x_next,i - x_pred,i|²`.
pub fn inertial_energy(x_next: &[Vec2], x_pred: &[Vec2], masses: &[f64]) -> Result<f64, SimError> {
    check_len(x_next.len(), x_pred.len())?;
    check_len(x_next.len(), masses.len())?;
    Ok(0.5
        * x_next
            .iter()
            .zip(x_pred)
            .zip(masses)
            .map(|((a, b), m)| m * (*a - *b).length_squared())
            .sum::<f64>())
}

/// `(½ Σ k C² over springs, ½ Σ k C² over triangles)`.
pub fn potential_energy(x: &[Vec2], constraints: &ConstraintSet) -> Result<(f64, f64), SimError> {
    constraints.check_indices(x.len())?;
    let spring = 0.5
        * constraints
            .distances
            .iter()
            .map(|c| {
                let r = (x[c.i] - x[c.j]).length() - c.rest_length;
                c.stiffness * r * r
            })
            .sum::<f64>();
    let area = 0.5
        * constraints
            .areas
            .iter()
            .map(|c| {
                let r = signed_area(x[c.i], x[c.j], x[c.k]).abs() - c.rest_area;
                c.stiffness * r * r
            })
            .sum::<f64>();
    Ok((spring, area))
}

#[allow(clippy::too_many_arguments)]
pub fn implicit_euler_energy(
    x_next: &[Vec2],
    x_pred: &[Vec2],
    masses: &[f64],
    constraints: &ConstraintSet,
    dt: f64,
    step: u64,
    time: f64,
) -> Result<EnergyRecord, SimError> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(SimError::InvalidParam {
            name: "dt",
            reason: format!("must be positive, got {dt}"),
        });
    }
    let inertial = inertial_energy(x_next, x_pred, masses)?;
    let (potential_spring, potential_area) = potential_energy(x_next, constraints)?;
    Ok(EnergyRecord {
        step,
        time,
        inertial,
        potential_spring,
        potential_area,
        total: inertial + dt * dt * (potential_spring + potential_area),
    })
}

/// Analytic gradient of `E_spring + E_area`: `Σ k C ∇C` per particle.
pub fn grad_potential(x: &[Vec2], constraints: &ConstraintSet) -> Result<Vec<Vec2>, SimError> {
    constraints.check_indices(x.len())?;
    let mut grad = vec![Vec2::ZERO; x.len()];
    for c in &constraints.distances {
        let delta = x[c.i] - x[c.j];
        let len = delta.length();
        if len < MIN_SEPARATION {
            return Err(SimError::Degenerate(c.i, c.j));
        }
        let n = delta / len;
        let f = c.stiffness * (len - c.rest_length);
        grad[c.i] += n * f;
        grad[c.j] -= n * f;
    }
    for c in &constraints.areas {
        let (xi, xj, xk) = (x[c.i], x[c.j], x[c.k]);
        let signed = signed_area(xi, xj, xk);
        if signed == 0.0 {
            return Err(SimError::Degenerate(c.i, c.j));
        }
        let g = crate::dynamics::area_gradient(xi, xj, xk);
        let f = c.stiffness * (signed.abs() - c.rest_area);
        grad[c.i] += g[0] * f;
        grad[c.j] += g[1] * f;
        grad[c.k] += g[2] * f;
    }
    Ok(grad)
}
