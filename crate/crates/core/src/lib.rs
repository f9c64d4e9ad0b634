//! Deterministic 2D soft-tissue simulation.
//!
//! The pipeline turns a tissue shape (thresholded PGM mask or polygon) into
//! a Delaunay triangle mesh, simulates it with position-based dynamics under
//! distance and area constraints, lets a circular tool push particles along
//! its direction of travel, and tracks the implicit-Euler energy of every
//! step.
//!
//! - [`meshgen`]: mask decoding, contour tracing, sampling, triangulation.
//! - [`dynamics`]: particle state, constraint projection, the step loop.
//! - [`interaction`]: tool trajectory, collision detection, displacement field.
//! - [`energy`]: inertial and potential energy per step.
//! - [`harness`]: scenarios, run loop, CSV / SVG / JSON output.

pub mod dynamics;
pub mod energy;
pub mod geom;
pub mod harness;
pub mod interaction;
pub mod meshgen;

pub use dynamics::{
    AreaConstraint, BoundaryConditions, ConstraintSet, DistanceConstraint, ParticleSystem, SimError,
    SimParams, StepReport, World,
};
pub use energy::EnergyRecord;
pub use geom::Vec2;
pub use interaction::{CollisionEvent, ToolState, Trajectory};
pub use meshgen::{BinaryMask, Mesh, MeshError, Polygon};
