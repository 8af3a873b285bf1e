//! Minimal end-to-end election: generate a particle system, run the
//! simulator, and print the outcome.
//!
//!     cargo run --example basic_run

use amoebot::config::{generate, Shape};
use amoebot::scheduler::{run, RunOptions};

fn main() {
    let mut cfg = generate(Shape::Parallelogram { w: 8, h: 8 }, 0).unwrap();
    cfg.seed = 42;

    let outcome = run(&cfg, RunOptions::default()).unwrap();

    println!(
        "system: n={} particles, outer boundary L={} agents (C={} particles), diameter D={}",
        outcome.n, outcome.outer_agents, outcome.outer_particles, outcome.diameter
    );
    match outcome.leader {
        Some(node) => println!(
            "leader elected at {} after {} rounds ({} activations)",
            node, outcome.rounds, outcome.activations
        ),
        None => println!("no leader within {} rounds", outcome.rounds),
    }
    for (phase, round) in &outcome.phase_rounds {
        println!("  {phase}: round {round}");
    }
}
