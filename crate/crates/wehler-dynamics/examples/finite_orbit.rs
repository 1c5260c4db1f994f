//! Orbit closure search under the full involution group.
//!
//! On a surface from the special family, the origin's orbit closes
//! after eight points; on a dense surface the same search escapes to
//! infinity and exhausts its budget. Run with
//! `cargo run --example finite_orbit`.

use wehler_dynamics::orbits::{orbit_closure, OrbitResult};
use wehler_dynamics::{ProjPoint1, SurfacePointQ, WehlerSurface};

fn load(name: &str) -> WehlerSurface {
    let path = format!("{}/../../data/{}", env!("CARGO_MANIFEST_DIR"), name);
    WehlerSurface::from_json_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn main() {
    let family = load("orbit8_sample.json");
    let origin = SurfacePointQ::new(
        ProjPoint1::zero(),
        ProjPoint1::zero(),
        ProjPoint1::zero(),
    );
    match orbit_closure(&family, &origin, 100).unwrap() {
        OrbitResult::Finite(points) => {
            println!("{}: finite orbit of {} points", family.name(), points.len());
            for p in &points {
                println!("  {p}");
            }
        }
        OrbitResult::BudgetExceeded { .. } => unreachable!("the family orbit closes"),
    }

    // The same search on a dense surface only ever grows.
    let dense = load("generic_sample.json");
    let start = SurfacePointQ::new(
        ProjPoint1::zero(),
        ProjPoint1::from_pair(1, 1).unwrap(),
        ProjPoint1::from_pair(2, 1).unwrap(),
    );
    match orbit_closure(&dense, &start, 500).unwrap() {
        OrbitResult::Finite(points) => {
            println!("{}: unexpectedly finite ({} points)", dense.name(), points.len())
        }
        OrbitResult::BudgetExceeded { visited, frontier } => println!(
            "{}: budget exceeded after {visited} distinct points ({} unexpanded)",
            dense.name(),
            frontier.len()
        ),
    }
}
