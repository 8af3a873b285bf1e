//! Global-view boundary classification for a few shapes: outer/inner
//! boundaries, agent cycles, turning numbers, and the perimeter bound.
//!
//!     cargo run --example boundary_report

use amoebot::config::{generate, Shape};
use amoebot::oracle::{classify_boundaries, BoundaryKind};

fn main() {
    for (name, shape) in [
        ("line(3)", Shape::Line { n: 3 }),
        (
            "parallelogram(10,10)",
            Shape::Parallelogram { w: 10, h: 10 },
        ),
        (
            "annulus(2,1)",
            Shape::Annulus {
                outer_radius: 2,
                hole_radius: 1,
            },
        ),
        (
            "annulus(4,2)",
            Shape::Annulus {
                outer_radius: 4,
                hole_radius: 2,
            },
        ),
        ("random_connected(40)", Shape::RandomConnected { n: 40 }),
    ] {
        let cfg = generate(shape, 11).unwrap();
        let report = classify_boundaries(&cfg);
        println!(
            "{name}: n={} L={} C={} D={}",
            report.n, report.outer_agents, report.outer_particles, report.diameter
        );
        for b in &report.boundaries {
            println!(
                "  {} boundary: {} agents on {} particles, turning number {}",
                match b.kind {
                    BoundaryKind::Outer => "outer",
                    BoundaryKind::Inner => "inner",
                },
                b.agents.len(),
                b.particle_count,
                b.turning_number()
            );
        }
        println!(
            "  perimeter bound L >= sqrt(n): {}",
            if report.perimeter_bound_ok() {
                "holds"
            } else {
                "VIOLATED"
            }
        );
    }
}
