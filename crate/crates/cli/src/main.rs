//! `ivsim`: run iterative-voting dynamics on a profile file, sweep the
//! n x p x r experiment grid, or replay the bundled verification fixtures.
//!
//! Exit codes: 0 success (simulate: equilibrium), 1 usage or I/O error,
//! 2 simulate ended in a cycle or at the round cap, 3 fixture failure.
//! Summary output is line-oriented `key=value` pairs.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use ivsim_core::io::{parse_schedule, ProfileDocument, TraceHeader};
use ivsim_core::nonatomic::{
    self, NonatomicConfig, NonatomicScheduler, NonatomicStep, NonatomicUncertainty,
};
use ivsim_core::{
    dynamics, fixtures, run_experiment, write_aggregate_csv, write_raw_csv, DistanceMetric,
    DynamicsConfig, DynamicsKind, Error, ExperimentGrid, MassProfile, Radius, RunResult,
    SchedulerPolicy, Terminal, TypeSet, UncertaintyMode, UncertaintySpec, DEFAULT_ROUND_CAP,
};

#[derive(Parser)]
#[command(name = "ivsim", version, about = "Iterative multi-issue plurality voting simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one improvement-dynamics process on a profile file.
    Simulate(SimulateArgs),
    /// Sweep an n x p x r grid of random profiles and write CSV statistics.
    Experiment(ExperimentArgs),
    /// Replay the bundled verification fixtures.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Election description (JSON: sizes, agents[].ranking, optional votes).
    #[arg(long)]
    profile: PathBuf,
    /// Response function: br | ldi.
    #[arg(long, default_value = "ldi")]
    dynamics: String,
    /// Distance metric: linf | multiplicative.
    #[arg(long, default_value = "linf")]
    metric: String,
    /// Per-issue radii, comma separated; one value broadcasts to all issues.
    /// Rationals like 1/13 are accepted (used by --nonatomic).
    #[arg(long, default_value = "0")]
    radii: String,
    /// Alternating uncertainty `rc:ro` for every agent (current issue rc,
    /// other issues ro; rc < ro). Overrides --radii.
    #[arg(long)]
    alternating: Option<String>,
    /// Scheduler: random | roundrobin | batch | scripted:FILE.
    #[arg(long, default_value = "random")]
    schedule: String,
    /// RNG seed; required by the random schedulers.
    #[arg(long)]
    seed: Option<u64>,
    /// Round cap.
    #[arg(long, default_value_t = DEFAULT_ROUND_CAP)]
    cap: usize,
    /// Write a line-delimited trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Use the nonatomic population model (each agent becomes an
    /// epsilon-mass type; radii are in population-mass units).
    #[arg(long)]
    nonatomic: bool,
    /// Mass resolution `1/K`; must equal one over the agent count.
    #[arg(long)]
    epsilon: Option<String>,
    /// Default output directory for relative --trace paths.
    #[arg(long, env = "IVSIM_OUT_DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Optional JSON config with the same field names; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Agent counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Binary issue counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<usize>>,
    /// Shared uncertainty radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<i64>>,
    /// Profiles per (n, p, r) cell.
    #[arg(long)]
    m: Option<usize>,
    /// Master seed; every profile derives its own stream from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Round cap per run.
    #[arg(long)]
    cap: Option<usize>,
    /// Response function: br | ldi.
    #[arg(long)]
    dynamics: Option<String>,
    /// Distance metric: linf | multiplicative.
    #[arg(long)]
    metric: Option<String>,
    /// Output directory for runs.csv and cells.csv.
    #[arg(long, env = "IVSIM_OUT_DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Replay a single fixture by name.
    #[arg(long)]
    only: Option<String>,
}

#[derive(serde::Deserialize, Default)]
struct ExperimentConfigFile {
    n: Option<Vec<usize>>,
    p: Option<Vec<usize>>,
    r: Option<Vec<i64>>,
    m: Option<usize>,
    seed: Option<u64>,
    cap: Option<usize>,
    dynamics: Option<String>,
    metric: Option<String>,
    out: Option<PathBuf>,
}

fn parse_dynamics(s: &str) -> Result<DynamicsKind, Error> {
    match s {
        "br" => Ok(DynamicsKind::BestResponse),
        "ldi" => Ok(DynamicsKind::LocalDominance),
        other => Err(Error::Parse(format!("unknown dynamics `{other}` (use br|ldi)"))),
    }
}

fn parse_radii(s: &str, num_issues: usize) -> Result<Vec<Radius>, Error> {
    let parts: Vec<Radius> = s
        .split(',')
        .map(Radius::from_str)
        .collect::<Result<_, _>>()?;
    match parts.len() {
        1 => Ok(vec![parts[0]; num_issues]),
        k if k == num_issues => Ok(parts),
        k => Err(Error::Parse(format!(
            "{k} radii given for {num_issues} issues"
        ))),
    }
}

fn print_result(result: &RunResult) {
    match result.terminal {
        Terminal::Equilibrium => println!("terminal=equilibrium"),
        Terminal::CycleDetected { entry_round, period } => {
            println!("terminal=cycle");
            println!("period={period}");
            println!("entry_round={entry_round}");
        }
        Terminal::CapReached => println!("terminal=cap"),
    }
    println!("rounds={}", result.rounds);
    println!("initial_outcome={}", result.initial_outcome);
    println!("final_outcome={}", result.final_outcome);
}

fn exit_for(result: &RunResult) -> ExitCode {
    if result.terminal.is_equilibrium() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn resolve_path(out: &Option<PathBuf>, path: &PathBuf) -> PathBuf {
    match out {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.clone(),
    }
}

fn simulate(args: &SimulateArgs) -> Result<ExitCode, Error> {
    let text = fs::read_to_string(&args.profile)?;
    let doc = ProfileDocument::from_json(&text)?;
    let (prefs, votes) = doc.build()?;
    let n = prefs.num_agents();
    let p = prefs.domain().num_issues();
    let kind = parse_dynamics(&args.dynamics)?;
    let metric = DistanceMetric::from_str(&args.metric)?;
    let radii = parse_radii(&args.radii, p)?;
    let spec = UncertaintySpec::new(metric, radii.clone())?;

    let need_seed = || {
        args.seed.ok_or_else(|| {
            Error::InvalidConfig("--seed is required for randomized schedulers".into())
        })
    };

    let result = if args.nonatomic {
        if let Some(eps) = &args.epsilon {
            let want = format!("1/{n}");
            if eps != &want {
                return Err(Error::InvalidConfig(format!(
                    "--epsilon must be {want} for {n} agents, got {eps}"
                )));
            }
        }
        let sets: Vec<TypeSet> = (0..n)
            .map(|j| TypeSet {
                ranking: prefs.ranking(j).clone(),
                spec: spec.clone(),
                vote: votes.vote(j).clone(),
            })
            .collect();
        let profile = MassProfile::new(prefs.domain().clone(), sets)?;
        let scheduler = match args.schedule.as_str() {
            "random" => NonatomicScheduler::SingleRandom { seed: need_seed()? },
            "batch" => NonatomicScheduler::BatchRandom { seed: need_seed()? },
            s if s.starts_with("scripted:") => {
                let steps: Vec<NonatomicStep> =
                    serde_json::from_str(&fs::read_to_string(&s["scripted:".len()..])?)?;
                NonatomicScheduler::Scripted(steps)
            }
            other => {
                return Err(Error::Parse(format!(
                    "unknown nonatomic schedule `{other}` (use random|batch|scripted:FILE)"
                )))
            }
        };
        let mut config = NonatomicConfig::new(scheduler).with_cap(args.cap);
        if let Some(pair) = &args.alternating {
            let (rc, ro) = pair.split_once(':').ok_or_else(|| {
                Error::Parse(format!("--alternating wants rc:ro, got `{pair}`"))
            })?;
            config = config.with_uncertainty(NonatomicUncertainty::alternating(
                metric,
                vec![(Radius::from_str(rc)?, Radius::from_str(ro)?); n],
            )?);
        }
        nonatomic::run(&profile, &config)?
    } else {
        let mode = match &args.alternating {
            Some(pair) => {
                let (rc, ro) = pair.split_once(':').ok_or_else(|| {
                    Error::Parse(format!("--alternating wants rc:ro, got `{pair}`"))
                })?;
                UncertaintyMode::alternating(
                    metric,
                    vec![(Radius::from_str(rc)?, Radius::from_str(ro)?); n],
                )?
            }
            None => UncertaintyMode::Fixed(vec![spec.clone(); n]),
        };
        let scheduler = match args.schedule.as_str() {
            "random" => SchedulerPolicy::UniformRandom { seed: need_seed()? },
            "roundrobin" => SchedulerPolicy::RoundRobin,
            s if s.starts_with("scripted:") => {
                SchedulerPolicy::Scripted(parse_schedule(&fs::read_to_string(
                    &s["scripted:".len()..],
                )?)?)
            }
            other => {
                return Err(Error::Parse(format!(
                    "unknown schedule `{other}` (use random|roundrobin|scripted:FILE)"
                )))
            }
        };
        let config = DynamicsConfig::new(kind, mode, scheduler).with_cap(args.cap);
        dynamics::run(&prefs, votes, &config)?
    };

    if let Some(trace_path) = &args.trace {
        let path = resolve_path(&args.out, trace_path);
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)?;
            }
        }
        let mut header = TraceHeader::new(
            args.dynamics.clone(),
            args.metric.clone(),
            radii,
            args.cap,
            n,
            prefs.domain().sizes().to_vec(),
        );
        header.seed = args.seed;
        if args.nonatomic {
            header.epsilon = Some(format!("1/{n}"));
        }
        if let Some(pair) = &args.alternating {
            let (rc, ro) = pair.split_once(':').expect("validated above");
            header.alternating = Some((Radius::from_str(rc)?, Radius::from_str(ro)?));
        }
        let file = fs::File::create(&path)?;
        ivsim_core::io::write_trace(file, &header, &result)?;
        println!("trace={}", path.display());
    }
    print_result(&result);
    Ok(exit_for(&result))
}

fn experiment(args: &ExperimentArgs) -> Result<ExitCode, Error> {
    let file_config: ExperimentConfigFile = match &args.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
        None => ExperimentConfigFile::default(),
    };
    let seed = args
        .seed
        .or(file_config.seed)
        .ok_or_else(|| Error::InvalidConfig("--seed is required".into()))?;
    let grid = ExperimentGrid {
        agent_counts: args.n.clone().or(file_config.n).unwrap_or_else(|| vec![7, 11]),
        issue_counts: args.p.clone().or(file_config.p).unwrap_or_else(|| vec![5]),
        radii: args.r.clone().or(file_config.r).unwrap_or_else(|| vec![0, 1, 2, 3]),
        profiles_per_cell: args.m.or(file_config.m).unwrap_or(1_000),
        cap: args.cap.or(file_config.cap).unwrap_or(DEFAULT_ROUND_CAP),
        master_seed: seed,
        kind: parse_dynamics(
            args.dynamics
                .as_deref()
                .or(file_config.dynamics.as_deref())
                .unwrap_or("ldi"),
        )?,
        metric: DistanceMetric::from_str(
            args.metric
                .as_deref()
                .or(file_config.metric.as_deref())
                .unwrap_or("linf"),
        )?,
    };
    if grid.agent_counts.is_empty()
        || grid.issue_counts.is_empty()
        || grid.radii.is_empty()
        || grid.profiles_per_cell == 0
    {
        return Err(Error::InvalidConfig("empty grid axis".into()));
    }
    let out_dir = args
        .out
        .clone()
        .or(file_config.out)
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir)?;

    let output = run_experiment(&grid);
    let raw_path = out_dir.join("runs.csv");
    let agg_path = out_dir.join("cells.csv");
    write_raw_csv(fs::File::create(&raw_path)?, &output.rows)?;
    write_aggregate_csv(fs::File::create(&agg_path)?, &output.cells)?;

    for c in &output.cells {
        println!(
            "cell n={} p={} r={} truthful_eq={} converged={} cycled_or_capped={} mean_steps={:.3} mean_welfare_pct_change={}",
            c.n,
            c.p,
            c.r,
            c.truthful_equilibrium,
            c.converged,
            c.cycled_or_capped,
            c.mean_steps,
            c.mean_welfare_pct_change
                .map(|v| format!("{v:.3}"))
                .unwrap_or_else(|| "na".into()),
        );
    }
    println!("raw_csv={}", raw_path.display());
    println!("aggregate_csv={}", agg_path.display());
    Ok(ExitCode::SUCCESS)
}

fn verify(args: &VerifyArgs) -> Result<ExitCode, Error> {
    let reports = match &args.only {
        Some(name) => vec![fixtures::run_fixture(name)?],
        None => fixtures::run_all_fixtures(),
    };
    let mut all_passed = true;
    for report in &reports {
        let failed: Vec<_> = report.failed_checks().collect();
        println!(
            "fixture={} checks={} failed={} status={}",
            report.name,
            report.checks.len(),
            failed.len(),
            if failed.is_empty() { "pass" } else { "fail" }
        );
        for check in failed {
            println!(
                "fixture={} check={:?} status=fail detail={:?}",
                report.name, check.label, check.detail
            );
            all_passed = false;
        }
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Experiment(args) => experiment(args),
        Command::Verify(args) => verify(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
