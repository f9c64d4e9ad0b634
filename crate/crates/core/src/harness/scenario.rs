//! Scenario documents (TOML).
//!
//! ```toml
//! total_steps = 300
//!
//! [mesh]
//! polygon = [[0.0, 0.0], [2.0, 0.0], [2.0, 0.6], [0.0, 0.6]]
//! spacing = 0.1
//!
//! [params]            # every key optional, defaults are the reference values
//! gravity = [0.0, -9.8]
//!
//! [boundary]
//! y_top = 0.6
//! y_bottom = 0.0
//!
//! [tool]              # either start/goal/speed or angle/goal/approach_distance/speed
//! angle = 30.0
//! goal = [1.0, 0.25]
//! approach_distance = 0.8
//! speed = 1.0
//!
//! [output]
//! frame_stride = 50
//! ```
//!
//! Unknown keys are rejected. Relative paths resolve against the directory
//! holding the scenario file.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use super::insertion_to_trajectory;
use crate::dynamics::{BoundaryConditions, SimParams};
use crate::geom::Vec2;
use crate::interaction::Trajectory;

/// A scenario problem, qualified by the document path it refers to.
#[derive(Debug, Error, PartialEq)]
#[error("{path}: {message}")]
pub struct ScenarioError {
    pub path: String,
    pub message: String,
}

impl ScenarioError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSource {
    Mask {
        path: PathBuf,
        threshold: u8,
        spacing: f64,
        /// World units per pixel.
        scale: f64,
        /// World position of the image's lower-left corner.
        origin: Vec2,
    },
    Polygon {
        vertices: Vec<Vec2>,
        spacing: f64,
    },
    PolygonFile {
        path: PathBuf,
        spacing: f64,
    },
    MeshFile {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ToolSpec {
    Path(Trajectory),
    Insertion {
        angle_deg: f64,
        goal: Vec2,
        approach_distance: f64,
        speed: f64,
    },
}

impl ToolSpec {
    pub fn trajectory(&self) -> Trajectory {
        match *self {
            ToolSpec::Path(t) => t,
            ToolSpec::Insertion {
                angle_deg,
                goal,
                approach_distance,
                speed,
            } => insertion_to_trajectory(angle_deg, goal, approach_distance, speed),
        }
    }

    pub fn speed(&self) -> f64 {
        match *self {
            ToolSpec::Path(t) => t.speed,
            ToolSpec::Insertion { speed, .. } => speed,
        }
    }

    /// Same insertion with a different angle; `None` for explicit paths.
    pub fn with_angle(&self, angle: f64) -> Option<ToolSpec> {
        match *self {
            ToolSpec::Path(_) => None,
            ToolSpec::Insertion {
                goal,
                approach_distance,
                speed,
                ..
            } => Some(ToolSpec::Insertion {
                angle_deg: angle,
                goal,
                approach_distance,
                speed,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub dir: Option<PathBuf>,
    pub frame_stride: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub mesh: MeshSource,
    pub params: SimParams,
    pub boundary: BoundaryConditions,
    pub tool: Option<ToolSpec>,
    pub total_steps: usize,
    pub output: OutputSettings,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    total_steps: usize,
    mesh: RawMesh,
    #[serde(default)]
    params: SimParams,
    #[serde(default)]
    boundary: Option<BoundaryConditions>,
    #[serde(default)]
    tool: Option<RawTool>,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMesh {
    mask: Option<PathBuf>,
    threshold: Option<u8>,
    scale: Option<f64>,
    origin: Option<Vec2>,
    polygon: Option<Vec<Vec2>>,
    polygon_file: Option<PathBuf>,
    mesh_file: Option<PathBuf>,
    spacing: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTool {
    start: Option<Vec2>,
    goal: Vec2,
    speed: f64,
    angle: Option<f64>,
    approach_distance: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    #[serde(default = "default_stride")]
    frame_stride: usize,
}

impl Default for RawOutput {
    fn default() -> Self {
        Self {
            dir: None,
            frame_stride: default_stride(),
        }
    }
}

fn default_stride() -> usize {
    50
}

fn resolve(base: &Path, p: PathBuf, key: &str) -> Result<PathBuf, ScenarioError> {
    let full = if p.is_absolute() { p } else { base.join(p) };
    if full.is_file() {
        Ok(full)
    } else {
        Err(ScenarioError::new(
            key,
            format!("file not found: {}", full.display()),
        ))
    }
}

fn positive(key: &str, value: f64) -> Result<f64, ScenarioError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ScenarioError::new(key, format!("must be positive, got {value}")))
    }
}

impl Scenario {
    /// Parses and validates a scenario document. `base_dir` anchors relative
    /// file references.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Scenario, ScenarioError> {
        let de = toml::Deserializer::new(text);
        let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            ScenarioError::new(
                if path == "." { "<document>".into() } else { path },
                inner.message().trim(),
            )
        })?;
        Scenario::from_raw(raw, base_dir)
    }

    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ScenarioError::new(path.display().to_string(), format!("cannot read scenario: {e}"))
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Scenario::parse(&text, base)
    }

    fn from_raw(raw: RawScenario, base: &Path) -> Result<Scenario, ScenarioError> {
        if raw.total_steps < 1 {
            return Err(ScenarioError::new("total_steps", "must be at least 1"));
        }
        raw.params
            .validate()
            .map_err(|e| ScenarioError::new(param_path(&e), e.to_string()))?;
        let boundary = raw.boundary.unwrap_or(BoundaryConditions::NONE);
        boundary
            .validate()
            .map_err(|e| ScenarioError::new("boundary.y_top", e.to_string()))?;

        let m = raw.mesh;
        let sources = [
            m.mask.is_some(),
            m.polygon.is_some(),
            m.polygon_file.is_some(),
            m.mesh_file.is_some(),
        ];
        if sources.iter().filter(|&&s| s).count() != 1 {
            return Err(ScenarioError::new(
                "mesh",
                "exactly one of mask, polygon, polygon_file, mesh_file is required",
            ));
        }
        let spacing = || {
            m.spacing
                .ok_or_else(|| ScenarioError::new("mesh.spacing", "required for mask and polygon sources"))
                .and_then(|s| positive("mesh.spacing", s))
        };
        let mask_only = m.threshold.is_some() || m.scale.is_some() || m.origin.is_some();
        if mask_only && m.mask.is_none() {
            return Err(ScenarioError::new(
                "mesh",
                "threshold, scale and origin only apply to mask sources",
            ));
        }
        let mesh = if let Some(path) = m.mask.clone() {
            MeshSource::Mask {
                path: resolve(base, path, "mesh.mask")?,
                threshold: m.threshold.unwrap_or(128),
                spacing: spacing()?,
                scale: positive("mesh.scale", m.scale.unwrap_or(1.0))?,
                origin: m.origin.unwrap_or(Vec2::ZERO),
            }
        } else if let Some(vertices) = m.polygon.clone() {
            MeshSource::Polygon {
                vertices,
                spacing: spacing()?,
            }
        } else if let Some(path) = m.polygon_file.clone() {
            MeshSource::PolygonFile {
                path: resolve(base, path, "mesh.polygon_file")?,
                spacing: spacing()?,
            }
        } else {
            if m.spacing.is_some() {
                return Err(ScenarioError::new("mesh.spacing", "not used with mesh_file"));
            }
            let path = m.mesh_file.clone().expect("one source is set");
            MeshSource::MeshFile {
                path: resolve(base, path, "mesh.mesh_file")?,
            }
        };

        let tool = match raw.tool {
            None => None,
            Some(t) => {
                let speed = positive("tool.speed", t.speed)?;
                let spec = match (t.start, t.angle, t.approach_distance) {
                    (Some(start), None, None) => {
                        if start == t.goal {
                            return Err(ScenarioError::new("tool.start", "must differ from tool.goal"));
                        }
                        ToolSpec::Path(Trajectory {
                            start,
                            goal: t.goal,
                            speed,
                        })
                    }
                    (None, Some(angle), Some(distance)) => {
                        if !angle.is_finite() {
                            return Err(ScenarioError::new("tool.angle", "must be finite"));
                        }
                        ToolSpec::Insertion {
                            angle_deg: angle,
                            goal: t.goal,
                            approach_distance: positive("tool.approach_distance", distance)?,
                            speed,
                        }
                    }
                    _ => {
                        return Err(ScenarioError::new(
                            "tool",
                            "give either start, or both angle and approach_distance",
                        ))
                    }
                };
                let travel = raw.params.dt * speed;
                if travel >= raw.params.collision_threshold {
                    return Err(ScenarioError::new(
                        "tool.speed",
                        format!(
                            "params.dt * tool.speed = {travel} must be below params.collision_threshold = {}",
                            raw.params.collision_threshold
                        ),
                    ));
                }
                Some(spec)
            }
        };

        if raw.output.frame_stride < 1 {
            return Err(ScenarioError::new("output.frame_stride", "must be at least 1"));
        }
        Ok(Scenario {
            mesh,
            params: raw.params,
            boundary,
            tool,
            total_steps: raw.total_steps,
            output: OutputSettings {
                dir: raw
                    .output
                    .dir
                    .map(|d| if d.is_absolute() { d } else { base.join(d) }),
                frame_stride: raw.output.frame_stride,
            },
        })
    }
}

fn param_path(e: &crate::dynamics::SimError) -> String {
    match e {
        crate::dynamics::SimError::InvalidParam { name, .. } => format!("params.{name}"),
        _ => "params".into(),
    }
}
