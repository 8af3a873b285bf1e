//! Command-line front door: generate configurations, run single
//! simulations, sweep benchmarks, and run oracle checks.
//!
//! Exit codes: 0 on success, 2 on input errors, 3 when a run exhausts its
//! round budget without a leader.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::RngCore;

use crate::config::{self, Shape, SystemConfiguration};
use crate::oracle::{self, BoundaryKind};
use crate::scheduler::{run, CoinPolicy, RunOptions, RunOutcome, SchedulerPolicy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NO_LEADER: i32 = 3;

#[derive(Parser)]
#[command(
    name = "amoebot",
    about = "Randomized leader election for particle systems on the triangular grid",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated configuration to a file.
    Generate(GenerateArgs),
    /// Simulate one leader election run.
    Run(RunArgs),
    /// Sweep a shape family over sizes and trials, emitting metrics CSV.
    Bench(BenchArgs),
    /// Print the oracle's boundary report for a configuration.
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeName {
    Line,
    Parallelogram,
    Annulus,
    Random,
}

#[derive(Args)]
struct ShapeArgs {
    #[arg(long, value_enum)]
    shape: ShapeName,
    /// Particle count (line, random).
    #[arg(long)]
    n: Option<u32>,
    /// Width (parallelogram).
    #[arg(long)]
    w: Option<u32>,
    /// Height (parallelogram).
    #[arg(long)]
    h: Option<u32>,
    /// Outer radius (annulus).
    #[arg(long)]
    outer: Option<u32>,
    /// Hole radius (annulus).
    #[arg(long)]
    hole: Option<u32>,
}

impl ShapeArgs {
    fn to_shape(&self) -> Result<Shape, String> {
        match self.shape {
            ShapeName::Line => Ok(Shape::Line {
                n: self.n.ok_or("line needs --n")?,
            }),
            ShapeName::Parallelogram => Ok(Shape::Parallelogram {
                w: self.w.ok_or("parallelogram needs --w")?,
                h: self.h.ok_or("parallelogram needs --h")?,
            }),
            ShapeName::Annulus => Ok(Shape::Annulus {
                outer_radius: self.outer.ok_or("annulus needs --outer")?,
                hole_radius: self.hole.ok_or("annulus needs --hole")?,
            }),
            ShapeName::Random => Ok(Shape::RandomConnected {
                n: self.n.ok_or("random needs --n")?,
            }),
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchedulerName {
    Permutation,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoinMode {
    Fair,
    AllHeads,
    AllTails,
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file.
    #[arg(short, long)]
    input: PathBuf,
    /// Run seed; drawn from entropy (and printed) when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Identifier digit radix.
    #[arg(long, default_value_t = config::DEFAULT_RADIX)]
    radix: u32,
    #[arg(long, value_enum, default_value_t = SchedulerName::Permutation)]
    scheduler: SchedulerName,
    /// Round budget; defaults to 200 times the outer boundary length.
    #[arg(long)]
    max_rounds: Option<u64>,
    /// Run the almost-sure variant alongside the base algorithm.
    #[arg(long)]
    almost_sure: bool,
    /// Broadcast a termination message once a leader is declared.
    #[arg(long)]
    broadcast_termination: bool,
    /// Allow expanded particles in the input.
    #[arg(long)]
    expanded: bool,
    /// Write a line-delimited event trace.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Append a metrics CSV row (header written if the file is new).
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Enable degenerate test hooks (--coin, radix below 2).
    #[arg(long)]
    unsafe_hooks: bool,
    /// Segment-coin override; requires --unsafe-hooks.
    #[arg(long, value_enum, default_value_t = CoinMode::Fair)]
    coin: CoinMode,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    shape: ShapeName,
    /// Comma-separated size list (line/random: n; parallelogram: w = h;
    /// annulus: outer radius, hole radius half of it).
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<u32>,
    #[arg(long, default_value_t = 10)]
    trials: u32,
    /// Base seed; trial seeds derive from it.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Metrics CSV output path (stdout when absent).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Also print one CSV row per boundary.
    #[arg(long)]
    csv: bool,
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful exits.
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Run(args) => cmd_run(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Check(args) => cmd_check(args),
    }
}

fn input_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_INPUT
}

fn cmd_generate(args: GenerateArgs) -> i32 {
    let shape = match args.shape.to_shape() {
        Ok(s) => s,
        Err(e) => return input_error(&e),
    };
    let cfg = match config::generate(shape, args.seed) {
        Ok(cfg) => cfg,
        Err(e) => return input_error(&e.to_string()),
    };
    if let Err(e) = fs::write(&args.out, config::serialize(&cfg)) {
        return input_error(&format!("writing {}: {e}", args.out.display()));
    }
    println!("wrote {} particles to {}", cfg.len(), args.out.display());
    EXIT_OK
}

fn load_config(path: &PathBuf) -> Result<SystemConfiguration, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    config::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_run(args: RunArgs) -> i32 {
    let mut cfg = match load_config(&args.input) {
        Ok(cfg) => cfg,
        Err(e) => return input_error(&e),
    };
    if args.radix < 2 && !args.unsafe_hooks {
        return input_error("radix below 2 requires --unsafe-hooks");
    }
    if !matches!(args.coin, CoinMode::Fair) && !args.unsafe_hooks {
        return input_error("--coin requires --unsafe-hooks");
    }
    let seed = args.seed.unwrap_or_else(|| rand::thread_rng().next_u64());
    cfg.seed = seed;
    cfg.radix = args.radix;
    cfg.flags.almost_sure = args.almost_sure;
    cfg.flags.termination_broadcast = args.broadcast_termination;
    cfg.expanded_enabled = args.expanded;

    // Echo the resolved invocation so every run is reproducible from its
    // own output.
    let mut echo = format!(
        "# amoebot run -i {} --seed {} --radix {} --scheduler {}",
        args.input.display(),
        seed,
        args.radix,
        match args.scheduler {
            SchedulerName::Permutation => "permutation",
            SchedulerName::Uniform => "uniform",
        }
    );
    if let Some(m) = args.max_rounds {
        echo += &format!(" --max-rounds {m}");
    }
    for (on, flag) in [
        (args.almost_sure, " --almost-sure"),
        (args.broadcast_termination, " --broadcast-termination"),
        (args.expanded, " --expanded"),
        (args.unsafe_hooks, " --unsafe-hooks"),
    ] {
        if on {
            echo += flag;
        }
    }
    if !matches!(args.coin, CoinMode::Fair) {
        echo += match args.coin {
            CoinMode::AllHeads => " --coin all-heads",
            CoinMode::AllTails => " --coin all-tails",
            CoinMode::Fair => "",
        };
    }
    println!("{echo}");

    let trace: Option<Box<dyn Write>> = match &args.trace {
        None => None,
        Some(path) => match fs::File::create(path) {
            Ok(f) => Some(Box::new(std::io::BufWriter::new(f))),
            Err(e) => return input_error(&format!("creating {}: {e}", path.display())),
        },
    };
    let opts = RunOptions {
        policy: match args.scheduler {
            SchedulerName::Permutation => SchedulerPolicy::Permutation,
            SchedulerName::Uniform => SchedulerPolicy::Uniform,
        },
        max_rounds: args.max_rounds,
        coin: match args.coin {
            CoinMode::Fair => CoinPolicy::Fair,
            CoinMode::AllHeads => CoinPolicy::AllHeads,
            CoinMode::AllTails => CoinPolicy::AllTails,
        },
        validate: true,
        trace,
    };
    let outcome = match run(&cfg, opts) {
        Ok(o) => o,
        Err(e) => return input_error(&e.to_string()),
    };
    if let Some(path) = &args.metrics {
        if let Err(e) = append_metrics(path, std::slice::from_ref(&outcome)) {
            return input_error(&e);
        }
    }
    report_outcome(&outcome)
}

fn report_outcome(outcome: &RunOutcome) -> i32 {
    match outcome.leader {
        Some(node) => {
            println!(
                "leader {} after {} rounds ({} activations, n={}, L={})",
                node, outcome.rounds, outcome.activations, outcome.n, outcome.outer_agents
            );
            if let Some(done) = outcome.phase_rounds.get("all_terminated") {
                println!("all particles terminated by round {done}");
            }
            EXIT_OK
        }
        None => {
            println!(
                "no leader within {} rounds (n={}, L={})",
                outcome.rounds, outcome.n, outcome.outer_agents
            );
            EXIT_NO_LEADER
        }
    }
}

fn append_metrics(path: &PathBuf, rows: &[RunOutcome]) -> Result<(), String> {
    let new = !path.exists();
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| format!("opening {}: {e}", path.display()))?;
    let mut text = String::new();
    if new {
        text.push_str(RunOutcome::METRICS_HEADER);
        text.push('\n');
    }
    for row in rows {
        text.push_str(&row.metrics_row());
        text.push('\n');
    }
    file.write_all(text.as_bytes())
        .map_err(|e| format!("writing {}: {e}", path.display()))
}

fn bench_shape(shape: ShapeName, size: u32) -> Result<Shape, String> {
    match shape {
        ShapeName::Line => Ok(Shape::Line { n: size }),
        ShapeName::Parallelogram => Ok(Shape::Parallelogram { w: size, h: size }),
        ShapeName::Annulus => {
            if size < 2 {
                return Err("annulus bench sizes must be at least 2".into());
            }
            Ok(Shape::Annulus {
                outer_radius: size,
                hole_radius: size / 2,
            })
        }
        ShapeName::Random => Ok(Shape::RandomConnected { n: size }),
    }
}

fn cmd_bench(args: BenchArgs) -> i32 {
    let mut rows: Vec<RunOutcome> = Vec::new();
    let mut summary: Vec<(u32, f64)> = Vec::new();
    for &size in &args.sizes {
        let shape = match bench_shape(args.shape, size) {
            Ok(s) => s,
            Err(e) => return input_error(&e),
        };
        let mut ratios = Vec::new();
        for trial in 0..args.trials {
            let seed = args
                .seed
                .wrapping_mul(0x100000001b3)
                .wrapping_add(((size as u64) << 32) | trial as u64);
            let mut cfg = match config::generate(shape, seed) {
                Ok(c) => c,
                Err(e) => return input_error(&e.to_string()),
            };
            cfg.seed = seed;
            let outcome = match run(&cfg, RunOptions::default()) {
                Ok(o) => o,
                Err(e) => return input_error(&e.to_string()),
            };
            if outcome.outer_agents > 0 {
                ratios.push(outcome.rounds as f64 / outcome.outer_agents as f64);
            }
            rows.push(outcome);
        }
        if !ratios.is_empty() {
            ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
            summary.push((size, ratios[ratios.len() / 2]));
        }
    }
    match &args.out {
        Some(path) => {
            if let Err(e) = append_metrics(path, &rows) {
                return input_error(&e);
            }
        }
        None => {
            println!("{}", RunOutcome::METRICS_HEADER);
            for row in &rows {
                println!("{}", row.metrics_row());
            }
        }
    }
    for (size, median) in summary {
        println!("# size {size}: median rounds/L = {median:.2}");
    }
    EXIT_OK
}

fn cmd_check(args: CheckArgs) -> i32 {
    let cfg = match load_config(&args.input) {
        Ok(cfg) => cfg,
        Err(e) => return input_error(&e),
    };
    let report = oracle::classify_boundaries(&cfg);
    println!(
        "n={} L={} C={} D={}",
        report.n, report.outer_agents, report.outer_particles, report.diameter
    );
    for (i, b) in report.boundaries.iter().enumerate() {
        println!(
            "boundary {}: {} agents={} particles={} turning={}",
            i,
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
        "perimeter bound (L >= sqrt(n)): {}",
        if report.perimeter_bound_ok() {
            "OK"
        } else {
            "VIOLATED"
        }
    );
    if args.csv {
        println!("boundary,kind,agents,particles");
        for (i, b) in report.boundaries.iter().enumerate() {
            println!(
                "{},{},{},{}",
                i,
                match b.kind {
                    BoundaryKind::Outer => "outer",
                    BoundaryKind::Inner => "inner",
                },
                b.agents.len(),
                b.particle_count
            );
        }
    }
    if report.perimeter_bound_ok() {
        EXIT_OK
    } else {
        EXIT_INPUT
    }
}
