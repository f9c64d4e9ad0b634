//! Scenario runs: mesh construction, the step loop with per-step energy,
//! frame sampling, and persistence of the results.

mod output;
mod scenario;

use std::path::Path;

use thiserror::Error;

pub use output::{comparison_csv, energy_csv, parse_energy_csv, render_svg, CsvError};
pub use scenario::{MeshSource, OutputSettings, Scenario, ScenarioError, ToolSpec};

use crate::dynamics::{apply_boundary, ParticleSystem, SimError, SimParams, World};
use crate::energy::{implicit_euler_energy, EnergyRecord};
use crate::geom::Vec2;
use crate::interaction::{tool_at, ToolState, Trajectory};
use crate::meshgen::{build_constraints, load_mask, mesh_polygon, trace_boundary, Mesh, MeshError, Polygon};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Document { path: String, message: String },
    #[error("mesh: {0}")]
    Mesh(#[from] MeshError),
    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: SimError,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("render: {0}")]
    Render(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn parse_scenario(text: &str, base_dir: &Path) -> Result<Scenario, ScenarioError> {
    Scenario::parse(text, base_dir)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    Scenario::load(path)
}

/// Converts an insertion angle (degrees from the upward vertical, positive
/// toward +x) into a straight path ending at `goal`.
pub fn insertion_to_trajectory(angle_deg: f64, goal: Vec2, approach_distance: f64, speed: f64) -> Trajectory {
    let theta = angle_deg.to_radians();
    Trajectory {
        start: goal + Vec2::new(theta.sin(), theta.cos()) * approach_distance,
        goal,
        speed,
    }
}

/// Particle snapshot after `step` completed steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub step: usize,
    pub positions: Vec<Vec2>,
    pub tool: Option<ToolState>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub mesh: Mesh,
    pub params: SimParams,
    pub trajectory: Option<Trajectory>,
    pub energy_series: Vec<EnergyRecord>,
    /// Collision events per step.
    pub collisions: Vec<usize>,
    pub frames: Vec<Frame>,
    pub final_state: ParticleSystem,
}

fn read(path: &Path) -> Result<Vec<u8>, RunError> {
    std::fs::read(path).map_err(io_err(path))
}

fn document_err(path: &Path, e: impl std::fmt::Display) -> RunError {
    RunError::Document {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Builds the rest mesh described by a scenario.
pub fn build_mesh(source: &MeshSource) -> Result<Mesh, RunError> {
    match source {
        MeshSource::Mask {
            path,
            threshold,
            spacing,
            scale,
            origin,
        } => {
            let mask = load_mask(&read(path)?, *threshold).map_err(|e| document_err(path, e))?;
            let polygon = trace_boundary(&mask)?.transformed(*scale, *origin)?;
            Ok(mesh_polygon(&polygon, *spacing)?)
        }
        MeshSource::Polygon { vertices, spacing } => {
            Ok(mesh_polygon(&Polygon::new(vertices.clone())?, *spacing)?)
        }
        MeshSource::PolygonFile { path, spacing } => {
            let text = String::from_utf8(read(path)?).map_err(|e| document_err(path, e))?;
            let polygon = Polygon::from_json(&text).map_err(|e| document_err(path, e))?;
            Ok(mesh_polygon(&polygon, *spacing)?)
        }
        MeshSource::MeshFile { path } => {
            let text = String::from_utf8(read(path)?).map_err(|e| document_err(path, e))?;
            Mesh::from_json(&text).map_err(|e| document_err(path, e))
        }
    }
}

/// Runs a scenario to completion. Deterministic: identical scenarios give
/// identical outputs.
pub fn run(scenario: &Scenario) -> Result<RunOutput, RunError> {
    let mesh = build_mesh(&scenario.mesh)?;
    run_mesh(scenario, mesh)
}

/// Like [`run`] with an already built mesh.
pub fn run_mesh(scenario: &Scenario, mesh: Mesh) -> Result<RunOutput, RunError> {
    let params = scenario.params;
    let constraints = build_constraints(&mesh, params.k_spring, params.k_area)?;
    let mut particles = ParticleSystem::at_rest(mesh.vertices().to_vec(), params.particle_mass);
    apply_boundary(&mut particles, &scenario.boundary);
    let mut world = World::new(particles, constraints, params, scenario.boundary)?;

    let trajectory = scenario.tool.map(|t| t.trajectory());
    let tool_at_time = |t: f64| trajectory.as_ref().map(|tr| tool_at(tr, params.tool_radius, t));
    let masses = vec![params.particle_mass; world.particles.len()];
    let stride = scenario.output.frame_stride;

    let mut energy_series = Vec::with_capacity(scenario.total_steps);
    let mut collisions = Vec::with_capacity(scenario.total_steps);
    let mut frames = vec![Frame {
        step: 0,
        positions: world.particles.positions.clone(),
        tool: tool_at_time(0.0),
    }];
    for s in 0..scenario.total_steps {
        let time = s as f64 * params.dt;
        let tool = tool_at_time(time);
        let report = world
            .step(tool.as_ref())
            .map_err(|source| RunError::Step { step: s, source })?;
        let record = implicit_euler_energy(
            &report.solved,
            &report.predicted,
            &masses,
            &world.constraints,
            params.dt,
            s as u64,
            time,
        )
        .map_err(|source| RunError::Step { step: s, source })?;
        energy_series.push(record);
        collisions.push(report.collisions.len());
        if (s + 1) % stride == 0 {
            frames.push(Frame {
                step: s + 1,
                positions: world.particles.positions.clone(),
                tool: tool_at_time((s + 1) as f64 * params.dt),
            });
        }
    }
    Ok(RunOutput {
        mesh,
        params,
        trajectory,
        energy_series,
        collisions,
        frames,
        final_state: world.particles,
    })
}

/// Runs the scenario once per insertion angle, concurrently. Requires an
/// angle-based tool.
pub fn run_angles(scenario: &Scenario, angles: &[f64]) -> Result<Vec<RunOutput>, RunError> {
    let tool = scenario.tool.ok_or_else(|| ScenarioError {
        path: "tool".into(),
        message: "angle runs need a tool".into(),
    })?;
    let scenarios = angles
        .iter()
        .map(|&a| {
            let spec = tool.with_angle(a).ok_or_else(|| ScenarioError {
                path: "tool".into(),
                message: "angle runs need angle, goal and approach_distance instead of start".into(),
            })?;
            Ok(Scenario {
                tool: Some(spec),
                ..scenario.clone()
            })
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    let mesh = build_mesh(&scenario.mesh)?;
    std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|s| {
                let mesh = mesh.clone();
                scope.spawn(move || run_mesh(s, mesh))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("run thread panicked"))
            .collect()
    })
}

/// Writes `energy.csv`, `mesh.json`, `final_state.json` and `frames/*.svg`
/// into `dir`, creating it if needed.
pub fn write_run(output: &RunOutput, dir: &Path) -> Result<(), RunError> {
    let frames_dir = dir.join("frames");
    std::fs::create_dir_all(&frames_dir).map_err(io_err(&frames_dir))?;
    let write = |name: &str, contents: &str| {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(io_err(&path))
    };
    write("energy.csv", &energy_csv(&output.energy_series))?;
    write("mesh.json", &output.mesh.to_json())?;
    let state = serde_json::to_string_pretty(&output.final_state).expect("particle state serializes");
    write("final_state.json", &state)?;
    let goal = output.trajectory.map(|t| t.goal);
    for frame in &output.frames {
        let svg = render_svg(&frame.positions, output.mesh.edges(), frame.tool.as_ref(), goal)
            .map_err(|e| RunError::Render(e.to_string()))?;
        let path = frames_dir.join(format!("frame_{:06}.svg", frame.step));
        std::fs::write(&path, svg).map_err(io_err(&path))?;
    }
    Ok(())
}
