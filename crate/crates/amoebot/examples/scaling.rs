//! Linear-runtime evidence: election rounds divided by the outer boundary
//! length stay flat as the system grows.
//!
//!     cargo run --release --example scaling

use amoebot::config::{generate, Shape};
use amoebot::scheduler::{run, RunOptions};

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs[xs.len() / 2]
}

fn main() {
    println!("parallelograms, 30 trials each:");
    println!("{:>6} {:>6} {:>10} {:>10}", "w", "L", "median", "max");
    for w in [4u32, 6, 8, 10, 12, 16] {
        let mut ratios = Vec::new();
        for trial in 0..30u64 {
            let mut cfg = generate(Shape::Parallelogram { w, h: w }, trial).unwrap();
            cfg.seed = 900 + trial;
            let out = run(&cfg, RunOptions::default()).unwrap();
            assert!(out.success);
            ratios.push(out.rounds as f64 / out.outer_agents as f64);
        }
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        println!(
            "{:>6} {:>6} {:>10.2} {:>10.2}",
            w,
            4 * w - 4,
            median(ratios),
            max
        );
    }

    println!("\nlines (L = 2n - 2), 30 trials each:");
    println!("{:>6} {:>6} {:>10} {:>10}", "n", "L", "median", "max");
    for n in [8u32, 16, 32, 64] {
        let mut ratios = Vec::new();
        for trial in 0..30u64 {
            let mut cfg = generate(Shape::Line { n }, trial).unwrap();
            cfg.seed = 700 + trial;
            let out = run(&cfg, RunOptions::default()).unwrap();
            if out.success {
                ratios.push(out.rounds as f64 / out.outer_agents as f64);
            }
        }
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        println!(
            "{:>6} {:>6} {:>10.2} {:>10.2}",
            n,
            2 * n - 2,
            median(ratios),
            max
        );
    }
}
