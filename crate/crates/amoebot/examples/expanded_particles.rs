//! Expanded particles: a particle occupying two adjacent nodes simulates
//! two contracted particles, activated back-to-back. Everything else runs
//! unchanged on the virtual system.
//!
//!     cargo run --example expanded_particles

use amoebot::config::parse;
use amoebot::oracle::classify_boundaries;
use amoebot::scheduler::{run, RunOptions};

fn main() {
    // A line of four nodes whose middle two form one expanded particle.
    let text = "amoebot-config v1\n0 0\n1 0 2 0\n3 0\n";
    let mut cfg = parse(text).unwrap();
    cfg.expanded_enabled = true;
    cfg.seed = 9;

    let report = classify_boundaries(&cfg);
    println!(
        "3 physical particles over {} nodes: L={} boundary agents",
        cfg.len(),
        report.outer_agents
    );

    let outcome = run(&cfg, RunOptions::default()).unwrap();
    println!(
        "virtual system of n={}: success={} leader={:?} after {} rounds",
        outcome.n,
        outcome.success,
        outcome.leader.map(|v| v.to_string()),
        outcome.rounds
    );

    // Without the flag the same input is rejected.
    let mut gated = parse(text).unwrap();
    gated.seed = 9;
    match run(&gated, RunOptions::default()) {
        Err(e) => println!("without --expanded: {e}"),
        Ok(_) => unreachable!("expanded input must be gated"),
    }
}
