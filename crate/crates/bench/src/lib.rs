//! Fixtures shared by the benchmarks under `benches/`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tissuesim::meshgen::{build_constraints, mesh_polygon};
use tissuesim::{BoundaryConditions, ParticleSystem, Polygon, SimParams, ToolState, Vec2, World};

/// `n` seeded points uniform in the unit square.
pub fn random_points(n: usize, seed: u64) -> Vec<Vec2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| Vec2::new(rng.gen(), rng.gen())).collect()
}

/// 2 x 0.6 strip pinned along its top and bottom edges, reference parameters.
pub fn strip_world(spacing: f64) -> World {
    let polygon = Polygon::new(vec![
        Vec2::new(0.0, 0.0),
        Vec2::new(2.0, 0.0),
        Vec2::new(2.0, 0.6),
        Vec2::new(0.0, 0.6),
    ])
    .expect("strip is a valid polygon");
    let mesh = mesh_polygon(&polygon, spacing).expect("strip meshes");
    let params = SimParams::default();
    let constraints = build_constraints(&mesh, params.k_spring, params.k_area).expect("rest mesh is valid");
    let mut particles = ParticleSystem::at_rest(mesh.vertices().to_vec(), params.particle_mass);
    let boundary = BoundaryConditions {
        y_top: 0.6,
        y_bottom: 0.0,
    };
    tissuesim::dynamics::apply_boundary(&mut particles, &boundary);
    World::new(particles, constraints, params, boundary).expect("valid world")
}

/// Tool pressing down into the middle of the strip.
pub fn pressing_tool() -> ToolState {
    ToolState {
        center: Vec2::new(1.0, 0.8),
        radius: SimParams::default().tool_radius,
        velocity: Vec2::new(0.0, -1.0),
    }
}
