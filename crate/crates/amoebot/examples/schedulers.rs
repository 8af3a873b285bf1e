//! The two activation policies side by side. A round under the permutation
//! policy activates every particle exactly once; under the uniform policy
//! particles are drawn i.i.d. and a round closes at the coupon-collector
//! instant. Both elect in rounds linear in the boundary length; whether
//! they pick the same leader for one seed is recorded here, not promised.
//!
//!     cargo run --example schedulers

use amoebot::config::{generate, Shape};
use amoebot::scheduler::{run, RunOptions, SchedulerPolicy};

fn main() {
    let mut agree = 0;
    let total = 20;
    println!(
        "{:>5} {:>20} {:>12} {:>20} {:>12}",
        "seed", "permutation leader", "rounds", "uniform leader", "rounds"
    );
    for seed in 0..total {
        let mut cfg = generate(Shape::Parallelogram { w: 5, h: 5 }, 3).unwrap();
        cfg.seed = seed;
        let perm = run(&cfg, RunOptions::default()).unwrap();
        let unif = run(
            &cfg,
            RunOptions {
                policy: SchedulerPolicy::Uniform,
                ..Default::default()
            },
        )
        .unwrap();
        println!(
            "{:>5} {:>20} {:>12} {:>20} {:>12}",
            seed,
            perm.leader.unwrap().to_string(),
            perm.rounds,
            unif.leader.unwrap().to_string(),
            unif.rounds
        );
        if perm.leader == unif.leader {
            agree += 1;
        }
    }
    println!("\nsame leader under both policies: {agree}/{total} seeds");
}
