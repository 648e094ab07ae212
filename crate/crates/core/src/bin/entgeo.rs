use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use entgeo::report::{emit_report, run_command, Command, ExperimentConfig, Origin, RawConfig, RunManifest};

#[derive(Parser)]
#[command(name = "entgeo", version, about = "Geometry of k-entangled states: norms, cones and volumetry")]
struct Cli {
    /// Base RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: ENTGEO_WORKERS, then the number of CPUs).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// json (full manifest) or csv.
    #[arg(long, global = true)]
    format: Option<String>,
    /// key = value configuration file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// k-norms of random or given vectors.
    Knorm(RunArgs),
    /// See-saw S(k) norms of random or given operators.
    Sknorm(RunArgs),
    /// k-block positivity of a map's Choi matrix.
    Blockpos(RunArgs),
    /// Base-dual membership test with both routes.
    Dual(RunArgs),
    /// Partial-transpose test on random or given states.
    Ppt(RunArgs),
    /// Probability that a random state is k-entangled.
    Prob(RunArgs),
    /// Mean width of the k-entangled states.
    Width(RunArgs),
    /// Asymptotic bound envelopes.
    Bounds(RunArgs),
    /// Volume-radius products of polar pairs.
    Santalo(RunArgs),
    /// Invariant suite: norms, chain, duality, width or prob.
    Verify(VerifyArgs),
}

#[derive(Args, Default)]
struct RunArgs {
    /// Dimensions: "3", "2..5" or "2,3,5".
    #[arg(long)]
    d: Option<String>,
    /// Schmidt ranks, same syntax, or "all".
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    restarts: Option<String>,
    #[arg(long)]
    max_iters: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    /// Array file with a vector, operator, state or Choi matrix.
    #[arg(long)]
    input: Option<PathBuf>,
    /// transpose, identity or depolarizing.
    #[arg(long)]
    map: Option<String>,
    /// Ambient dimensions for santalo.
    #[arg(long)]
    m: Option<String>,
    /// Spread of the random y in dual.
    #[arg(long)]
    t_max: Option<String>,
    #[arg(long)]
    ppt_tol: Option<String>,
    /// Lower constant reported by santalo.
    #[arg(long)]
    santalo_c: Option<String>,
    /// key = value file with c0_upper, c0_lower, c_upper, c_lower.
    #[arg(long)]
    constants: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// norms, chain, duality, width or prob.
    suite: Option<String>,
    #[command(flatten)]
    run: RunArgs,
}

fn flag_layer(cli: &Cli, args: &RunArgs, suite: Option<&String>) -> RawConfig {
    let mut raw = RawConfig::new();
    let mut put = |key: &str, v: Option<String>| {
        if let Some(v) = v {
            raw.set(key, v, Origin::Flag);
        }
    };
    put("seed", cli.seed.map(|s| s.to_string()));
    put("workers", cli.workers.map(|s| s.to_string()));
    put("out", cli.out.as_ref().map(|p| p.display().to_string()));
    put("format", cli.format.clone());
    put("suite", suite.cloned());
    put("d", args.d.clone());
    put("k", args.k.clone());
    put("samples", args.samples.clone());
    put("restarts", args.restarts.clone());
    put("max_iters", args.max_iters.clone());
    put("tol", args.tol.clone());
    put("input", args.input.as_ref().map(|p| p.display().to_string()));
    put("map", args.map.clone());
    put("m", args.m.clone());
    put("t_max", args.t_max.clone());
    put("ppt_tol", args.ppt_tol.clone());
    put("santalo_c", args.santalo_c.clone());
    raw
}

fn resolve(cli: &Cli) -> entgeo::Result<ExperimentConfig> {
    let (command, args, suite) = match &cli.command {
        Sub::Knorm(a) => (Command::Knorm, a, None),
        Sub::Sknorm(a) => (Command::Sknorm, a, None),
        Sub::Blockpos(a) => (Command::Blockpos, a, None),
        Sub::Dual(a) => (Command::Dual, a, None),
        Sub::Ppt(a) => (Command::Ppt, a, None),
        Sub::Prob(a) => (Command::Prob, a, None),
        Sub::Width(a) => (Command::Width, a, None),
        Sub::Bounds(a) => (Command::Bounds, a, None),
        Sub::Santalo(a) => (Command::Santalo, a, None),
        Sub::Verify(v) => (Command::Verify, &v.run, v.suite.as_ref()),
    };
    let mut file = match &cli.config {
        Some(p) => RawConfig::read(p)?,
        None => RawConfig::new(),
    };
    if let Some(p) = &args.constants {
        file.overlay(&RawConfig::read_constants(p)?);
    }
    let env = std::env::var("ENTGEO_WORKERS").ok();
    ExperimentConfig::resolve(command, Some(&file), &flag_layer(cli, args, suite), env.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("entgeo: {e}");
            return ExitCode::from(2);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("entgeo: cannot start {} workers: {e}", cfg.workers);
            return ExitCode::from(2);
        }
    };
    let started_at = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let clock = Instant::now();
    let (results, summary) = match pool.install(|| run_command(&cfg)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("entgeo: {e}");
            return ExitCode::from(2);
        }
    };
    let manifest = RunManifest {
        tool: "entgeo",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.clone(),
        started_at,
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
        results,
        summary,
    };
    if let Err(e) = emit_report(&manifest, cfg.format, cfg.out.as_deref()) {
        eprintln!("entgeo: {e}");
        return ExitCode::from(2);
    }
    if let Some(s) = manifest.summary.as_ref().filter(|s| !s.passed) {
        for f in &s.failures {
            eprintln!("FAIL {} d={} k={} seed={}/{}: {}", f.check, f.d, f.k, f.seed.seed, f.seed.stream, f.detail);
        }
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
