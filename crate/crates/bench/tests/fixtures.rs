use tissuesim_bench::{pressing_tool, random_points, strip_world};

#[test]
fn fixtures_are_deterministic() {
    assert_eq!(random_points(50, 3), random_points(50, 3));
    assert_ne!(random_points(50, 3), random_points(50, 4));
    assert_eq!(strip_world(0.1), strip_world(0.1));
}

#[test]
fn strip_is_pinned_and_steps() {
    let mut world = strip_world(0.06);
    let n = world.particles.len();
    assert!((200..=500).contains(&n), "{n}");
    let pinned = (0..n).filter(|&i| world.particles.is_pinned(i)).count();
    assert!(pinned > 0 && pinned < n);
    let report = world.step(Some(&pressing_tool())).unwrap();
    assert!(!report.collisions.is_empty());
}
