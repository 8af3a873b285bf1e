//! The degenerate regime the base algorithm cannot escape: radix 1 makes
//! every identifier equal and all-heads coins make every agent a candidate,
//! so identifier comparison never eliminates anyone. The almost-sure
//! variant runs a coin-exchange election in parallel and always finishes.
//!
//!     cargo run --example almost_sure_ties

use amoebot::config::{generate, Shape};
use amoebot::scheduler::{run, CoinPolicy, RunOptions};

fn main() {
    let mut cfg = generate(Shape::Parallelogram { w: 4, h: 4 }, 1).unwrap();
    cfg.seed = 12;
    cfg.radix = 1; // every identifier digit is 0

    let opts = || RunOptions {
        coin: CoinPolicy::AllHeads,
        max_rounds: Some(3000),
        ..Default::default()
    };

    let base = run(&cfg, opts()).unwrap();
    println!(
        "base algorithm: success={} after {} rounds (ties never resolve)",
        base.success, base.rounds
    );

    cfg.flags.almost_sure = true;
    let variant = run(&cfg, opts()).unwrap();
    println!(
        "almost-sure variant: success={} leader={:?} after {} rounds (L={})",
        variant.success,
        variant.leader.map(|n| n.to_string()),
        variant.rounds,
        variant.outer_agents
    );
}
