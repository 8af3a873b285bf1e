//! Streams the event trace of one small election to stdout. Each line is
//! `round activation x y EVENT payload`; the run always ends with a single
//! LEADER event.
//!
//!     cargo run --example trace_events

use amoebot::config::{generate, Shape};
use amoebot::scheduler::{RunOptions, Simulation};

fn main() {
    let mut cfg = generate(Shape::Line { n: 3 }, 0).unwrap();
    cfg.seed = 2;

    let mut sim = Simulation::new(
        cfg,
        RunOptions {
            trace: Some(Box::new(std::io::stdout())),
            ..Default::default()
        },
    )
    .unwrap();
    let outcome = sim.run_to_completion();
    eprintln!(
        "-- {} rounds, leader {:?}",
        outcome.rounds,
        outcome.leader.map(|n| n.to_string())
    );
}
