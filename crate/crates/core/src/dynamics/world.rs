use super::{
    apply_boundary, integrate, predict, solve, BoundaryConditions, ConstraintSet, ParticleSystem, SimError,
    SimParams,
};
use crate::geom::Vec2;
use crate::interaction::{apply_tool, detect_collisions, CollisionEvent, ToolState};

/// Everything a single step needs.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub particles: ParticleSystem,
    pub constraints: ConstraintSet,
    pub params: SimParams,
    pub boundary: BoundaryConditions,
}

/// What happened inside one step, for energy bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    /// Positions handed to the solver: prediction plus tool displacement.
    pub predicted: Vec<Vec2>,
    /// Solver output, now stored as the particle positions.
    pub solved: Vec<Vec2>,
    pub collisions: Vec<CollisionEvent>,
}

impl World {
    pub fn new(
        particles: ParticleSystem,
        constraints: ConstraintSet,
        params: SimParams,
        boundary: BoundaryConditions,
    ) -> Result<Self, SimError> {
        particles.validate()?;
        params.validate()?;
        boundary.validate()?;
        constraints.check_indices(particles.len())?;
        Ok(Self {
            particles,
            constraints,
            params,
            boundary,
        })
    }

    /// Advances one timestep: predict, tool displacement (collisions are
    /// detected on the prediction), Gauss–Seidel solve, velocity update,
    /// boundary pinning.
    pub fn step(&mut self, tool: Option<&ToolState>) -> Result<StepReport, SimError> {
        let p = &self.params;
        let mut predicted = predict(&self.particles, p.dt, p.gravity)?;
        let collisions = match tool {
            Some(tool) => detect_collisions(&predicted, tool, p.collision_threshold),
            None => Vec::new(),
        };
        if !collisions.is_empty() {
            predicted = apply_tool(
                &predicted,
                &collisions,
                p.tool_radius,
                &self.particles.inverse_masses,
            );
        }
        let solved = solve(
            &predicted,
            &self.constraints,
            &self.particles.inverse_masses,
            p.solver_iterations,
        )?;
        if let Some(i) = solved.iter().position(|x| !x.is_finite()) {
            return Err(SimError::NonFinite(i));
        }
        integrate(&mut self.particles, solved.clone(), p.dt)?;
        apply_boundary(&mut self.particles, &self.boundary);
        Ok(StepReport {
            predicted,
            solved,
            collisions,
        })
    }
}
