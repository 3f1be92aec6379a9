//! `ost`: seeded, file-emitting drivers for the one-sided transposition shuffle.
//!
//! Exit status: 0 when every check passed, 1 when a mathematical check
//! failed, 2 for capacity or configuration errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ost_shuffle::monte_carlo::trace_chain;
use ost_shuffle::{
    pushforward_projection, selftest, sst_tail_grid, trial_rng, ExactEngine, GroupParams, Metric, MixingSummary,
    SstTailRow,
};

/// Master seed used when `--seed` is not given.
const DEFAULT_SEED: u64 = 0x05EE_D5EE;
/// Largest group the exact subcommands will enumerate unless `--cap` says otherwise.
const DEFAULT_CLI_CAP: usize = 1 << 20;
const DEFAULT_C_GRID: [f64; 5] = [0.5, 1.0, 2.0, 3.0, 5.0];
const PROJECTION_TOLERANCE: f64 = 1e-10;
/// Rows with `p_hat > e^{-c} + Z * stderr` are flagged.
const TAIL_Z: f64 = 4.0;

#[derive(Parser)]
#[command(name = "ost", version, about = "One-sided transposition shuffle on the generalized symmetric group")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact TV and separation distance to uniform for t = 0..=t_max.
    Curve(CurveArgs),
    /// Compare fiber sums of the G(m,n) walk with the colorless walk on S_n.
    ProjectionCheck(CurveArgs),
    /// Monte Carlo tail of the strong stationary time against e^{-c}.
    Sst(SstArgs),
    /// Exhaustive group and normalization checks on small groups.
    Selftest(SelftestArgs),
    /// Record the moves of one seeded chain, one "i-j^k" per line.
    Trace(TraceArgs),
}

#[derive(Args, Clone)]
struct GroupArgs {
    /// Number of orientations per card.
    #[arg(long, default_value_t = 2)]
    m: u32,
    /// Number of cards.
    #[arg(long)]
    n: u32,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Directory receiving the output file (created if missing).
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Master seed; recorded in the output file name.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    group: GroupArgs,
    /// Last time step (default: 60 for `curve`, 10 for `projection-check`).
    #[arg(long)]
    t_max: Option<usize>,
    /// Largest group order the exact engine may enumerate.
    #[arg(long, default_value_t = DEFAULT_CLI_CAP)]
    cap: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SstArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Offset in t = ⌈n ln n + c n⌉; repeat for a grid (default 0.5 1 2 3 5).
    #[arg(long)]
    c: Vec<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SelftestArgs {
    /// Only check G(2,2).
    #[arg(long)]
    quick: bool,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long, default_value_t = 20)]
    t_max: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

enum Failure {
    Check(String),
    Config(String),
}

impl From<ost_shuffle::Error> for Failure {
    fn from(e: ost_shuffle::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Curve(args) => curve(args),
        Command::ProjectionCheck(args) => projection_check(args),
        Command::Sst(args) => sst(args),
        Command::Selftest(args) => run_selftest(args),
        Command::Trace(args) => trace(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("FAILED: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn params(group: &GroupArgs) -> Result<GroupParams, Failure> {
    Ok(GroupParams::new(group.m, group.n)?)
}

fn write_output(cmd: &str, p: GroupParams, out: &OutputArgs, ext: &str, body: &str) -> Result<PathBuf, Failure> {
    fs::create_dir_all(&out.out)?;
    let path = output_path(&out.out, cmd, p, out.seed, ext);
    fs::write(&path, body)?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn output_path(dir: &Path, cmd: &str, p: GroupParams, seed: u64, ext: &str) -> PathBuf {
    dir.join(format!("{cmd}_m{}_n{}_seed{seed}.{ext}", p.m(), p.n()))
}

fn curve(args: CurveArgs) -> Outcome {
    let p = params(&args.group)?;
    let t_max = args.t_max.unwrap_or(60);
    let engine = ExactEngine::with_cap(p, args.cap)?;
    let curve = engine.distance_curve(t_max);
    let summary = MixingSummary::from_curve(p, &curve);

    let body = match args.output.format {
        Format::Csv => curve.to_csv(),
        Format::Json => summary.to_json(),
    };
    write_output("curve", p, &args.output, args.output.format.ext(), &body)?;

    let show = |t: Option<usize>| t.map_or_else(|| format!("not reached by t={t_max}"), |t| t.to_string());
    let n = p.n() as f64;
    println!("{p}: order {}", p.order().unwrap_or(0));
    println!("t_mix(1/4) tv  = {}", show(curve.mixing_time(0.25, Metric::Tv)));
    println!("t_mix(1/4) sep = {}", show(curve.mixing_time(0.25, Metric::Sep)));
    println!("n ln n         = {:.3}", n * n.ln());
    Ok(())
}

fn projection_check(args: CurveArgs) -> Outcome {
    let p = params(&args.group)?;
    let t_max = args.t_max.unwrap_or(10);
    let upstairs = ExactEngine::with_cap(p, args.cap)?;
    let downstairs = ExactEngine::with_cap(GroupParams::new(1, p.n())?, args.cap)?;

    let mut per_step = Vec::with_capacity(t_max);
    let (mut up, mut down) = (upstairs.delta(), downstairs.delta());
    for _ in 1..=t_max {
        up = upstairs.step(&up)?;
        down = downstairs.step(&down)?;
        let pushed = pushforward_projection(&up);
        let worst = pushed
            .masses()
            .iter()
            .zip(down.masses())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        per_step.push(worst);
    }
    let max = per_step.iter().copied().fold(0.0, f64::max);
    let pass = max < PROJECTION_TOLERANCE;

    let body = match args.output.format {
        Format::Csv => {
            let mut s = String::from("t,max_discrepancy\n");
            for (t, d) in per_step.iter().enumerate() {
                s.push_str(&format!("{},{:.16e}\n", t + 1, d));
            }
            s
        }
        Format::Json => {
            let v = serde_json::json!({
                "m": p.m(), "n": p.n(), "t_max": t_max,
                "max_discrepancy": max, "tolerance": PROJECTION_TOLERANCE, "pass": pass,
            });
            serde_json::to_string_pretty(&v).expect("plain json") + "\n"
        }
    };
    write_output("projection-check", p, &args.output, args.output.format.ext(), &body)?;

    println!("max fiber-sum discrepancy over t=1..={t_max}: {max:.3e}");
    if pass {
        Ok(())
    } else {
        Err(Failure::Check(format!("discrepancy {max:e} is not below {PROJECTION_TOLERANCE:e}")))
    }
}

fn sst(args: SstArgs) -> Outcome {
    let p = params(&args.group)?;
    if args.trials == 0 {
        return Err(Failure::Config("--trials must be positive".into()));
    }
    let cs = if args.c.is_empty() { DEFAULT_C_GRID.to_vec() } else { args.c.clone() };
    let rows = sst_tail_grid(p, &cs, args.trials, args.output.seed)?;

    let body = match args.output.format {
        Format::Csv => {
            let mut s = format!("{}\n", SstTailRow::CSV_HEADER);
            for row in &rows {
                s.push_str(&row.to_csv_line());
                s.push('\n');
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&rows).expect("plain json") + "\n",
    };
    write_output("sst", p, &args.output, args.output.format.ext(), &body)?;

    let mut flagged = Vec::new();
    for row in &rows {
        let e = &row.estimate;
        let mark = if row.violates(TAIL_Z) { "  <-- exceeds bound" } else { "" };
        println!(
            "c={:<4} t={:<8} p_hat={:.5} ± {:.5}  e^-c={:.5}{mark}",
            row.c, e.t, e.p_hat, e.stderr, row.bound
        );
        if !mark.is_empty() {
            flagged.push(row.c);
        }
    }
    if flagged.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("tail above e^-c + {TAIL_Z}·stderr for c in {flagged:?}")))
    }
}

fn run_selftest(args: SelftestArgs) -> Outcome {
    let groups = if args.quick { selftest::quick_groups() } else { selftest::default_groups() };
    match selftest::run(&groups) {
        Ok(lines) => {
            for line in lines {
                println!("ok  {line}");
            }
            Ok(())
        }
        Err(f) => Err(Failure::Check(f.to_string())),
    }
}

fn trace(args: TraceArgs) -> Outcome {
    let p = params(&args.group)?;
    let mut rng = trial_rng(args.output.seed, 0);
    let (state, moves) = trace_chain(p, args.t_max, &mut rng);
    let mut body = String::new();
    for g in &moves {
        body.push_str(&g.to_string());
        body.push('\n');
    }
    write_output("trace", p, &args.output, "txt", &body)?;
    println!("X_{} = {}", state.t(), state.element());
    match state.sst() {
        Some(t) => println!("every position drawn first by t = {t}"),
        None => println!("positions never drawn first: {:?}", state.uncollected()),
    }
    Ok(())
}
