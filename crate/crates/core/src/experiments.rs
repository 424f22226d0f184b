//! Monte-Carlo harness: impartial-culture and order-legal preference
//! samplers, Borda welfare, and the seeded n x p x r grid runner with
//! deterministic CSV output.
//!
//! Reproducibility contract: a grid plus master seed determines every byte of
//! both CSVs, independent of worker count, because each profile's RNG is
//! derived from the master seed and the profile's coordinates alone.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;
use std::io::Write;

use crate::domain::{product_scan, Alternative, IssueDomain, IssueOrder, PreferenceProfile, Ranking};
use crate::dynamics::{
    self, DynamicsConfig, DynamicsKind, SchedulerPolicy, Terminal, UncertaintyMode,
    DEFAULT_ROUND_CAP,
};
use crate::error::Result;
use crate::uncertainty::DistanceMetric;

pub const RAW_CSV_SCHEMA: &str = "ivsim-raw-v1";
pub const AGGREGATE_CSV_SCHEMA: &str = "ivsim-agg-v1";

/// Uniform random ranking over the joint alternatives.
fn random_ranking(domain: &IssueDomain, rng: &mut impl Rng) -> Ranking {
    let mut order: Vec<usize> = (0..domain.num_alternatives()).collect();
    order.shuffle(rng);
    Ranking::from_order(order).expect("shuffled identity is a permutation")
}

/// `n` rankings drawn uniformly and independently.
pub fn sample_impartial_culture(
    n: usize,
    domain: &IssueDomain,
    rng: &mut impl Rng,
) -> PreferenceProfile {
    let rankings = (0..n).map(|_| random_ranking(domain, rng)).collect();
    PreferenceProfile::new(domain.clone(), rankings).expect("valid by construction")
}

/// Conditionally-lexicographic ranking: `local_order(position, earlier)` must
/// return a permutation of the issue's candidates given the candidates fixed
/// for issues earlier in `order`. Alternatives are ranked lexicographically
/// along `order` using those local orders; the result is always legal for
/// `order`.
pub fn conditional_lex_ranking(
    domain: &IssueDomain,
    order: &IssueOrder,
    mut local_order: impl FnMut(usize, &[usize]) -> Vec<usize>,
) -> Ranking {
    let issues = order.issues();
    let p = issues.len();
    // query local orders in a fixed traversal so sampling is reproducible
    let mut tables: Vec<HashMap<Vec<usize>, Vec<usize>>> = Vec::with_capacity(p);
    for pos in 0..p {
        let earlier_sizes: Vec<usize> =
            issues[..pos].iter().map(|&i| domain.size(i)).collect();
        let mut table = HashMap::new();
        product_scan(&earlier_sizes, |ctx| {
            let perm = local_order(pos, ctx);
            debug_assert_eq!(perm.len(), domain.size(issues[pos]));
            table.insert(ctx.to_vec(), perm);
            false
        });
        tables.push(table);
    }
    let mut alts: Vec<Alternative> = domain.alternatives().collect();
    let key = |a: &Alternative| -> Vec<usize> {
        (0..p)
            .map(|pos| {
                let ctx: Vec<usize> = issues[..pos].iter().map(|&i| a.get(i)).collect();
                let perm = &tables[pos][&ctx];
                perm.iter()
                    .position(|&c| c == a.get(issues[pos]))
                    .expect("local order is a permutation")
            })
            .collect()
    };
    alts.sort_by_key(key);
    Ranking::from_alternatives(domain, &alts).expect("permutation of all alternatives")
}

/// `n` rankings legal for the common `order`, each built from independently
/// uniform local orders per issue and earlier-issue context.
pub fn sample_o_legal(
    n: usize,
    domain: &IssueDomain,
    order: &IssueOrder,
    rng: &mut impl Rng,
) -> PreferenceProfile {
    let rankings = (0..n)
        .map(|_| {
            conditional_lex_ranking(domain, order, |pos, _ctx| {
                let mut perm: Vec<usize> = (0..domain.size(order.issues()[pos])).collect();
                perm.shuffle(rng);
                perm
            })
        })
        .collect();
    PreferenceProfile::new(domain.clone(), rankings).expect("valid by construction")
}

/// Sum over agents of `D - position` where position is 1-based, so a
/// top-ranked outcome is worth `D - 1` and a bottom-ranked one 0.
pub fn borda_welfare(prefs: &PreferenceProfile, outcome: &Alternative) -> i64 {
    let d = prefs.domain().num_alternatives() as i64;
    let idx = prefs.domain().alternative_index(outcome);
    prefs
        .rankings()
        .iter()
        .map(|r| d - 1 - r.rank_of_index(idx) as i64)
        .sum()
}

/// The n x p x r sweep: binary issues, shared constant radii, dynamics from
/// the truthful profile under the uniform-random scheduler.
#[derive(Clone, Debug)]
pub struct ExperimentGrid {
    pub agent_counts: Vec<usize>,
    pub issue_counts: Vec<usize>,
    pub radii: Vec<i64>,
    pub profiles_per_cell: usize,
    pub cap: usize,
    pub master_seed: u64,
    pub kind: DynamicsKind,
    pub metric: DistanceMetric,
}

impl ExperimentGrid {
    /// Desk-scale slice of the full study: `n in {7,11}`, five binary
    /// issues, `r in 0..=3`, 1,000 profiles per cell.
    pub fn desk(master_seed: u64) -> Self {
        Self {
            agent_counts: vec![7, 11],
            issue_counts: vec![5],
            radii: vec![0, 1, 2, 3],
            profiles_per_cell: 1_000,
            cap: DEFAULT_ROUND_CAP,
            master_seed,
            kind: DynamicsKind::LocalDominance,
            metric: DistanceMetric::LInf,
        }
    }

    /// The full study grid: 10,000 profiles per cell over
    /// `n in {7,11,15,19}` and `p in {2,3,4,5}`.
    pub fn full(master_seed: u64) -> Self {
        Self {
            agent_counts: vec![7, 11, 15, 19],
            issue_counts: vec![2, 3, 4, 5],
            radii: vec![0, 1, 2, 3],
            profiles_per_cell: 10_000,
            cap: DEFAULT_ROUND_CAP,
            master_seed,
            kind: DynamicsKind::LocalDominance,
            metric: DistanceMetric::LInf,
        }
    }
}

/// One profile's run summary; one raw CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileRow {
    pub n: usize,
    pub p: usize,
    pub r: i64,
    pub profile_index: usize,
    pub seed: u64,
    pub truthful_is_equilibrium: bool,
    pub terminal: Terminal,
    pub steps: usize,
    pub welfare_truthful: i64,
    /// Absent for cycled/capped runs.
    pub welfare_final: Option<i64>,
    /// Absent for cycled/capped runs and for a zero truthful baseline.
    pub welfare_pct_change: Option<f64>,
}

/// Aggregates for one (n, p, r) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub n: usize,
    pub p: usize,
    pub r: i64,
    pub profiles: usize,
    /// Runs where the truthful profile already had no steps.
    pub truthful_equilibrium: usize,
    /// Runs reaching equilibrium after at least one step.
    pub converged: usize,
    /// Runs that cycled or hit the cap.
    pub cycled_or_capped: usize,
    /// Steps over all equilibrium runs (truthful equilibria count as 0).
    pub mean_steps: f64,
    pub steps_min: usize,
    pub steps_median: f64,
    pub steps_p90: usize,
    pub steps_max: usize,
    pub mean_welfare_truthful: f64,
    /// Over equilibrium runs.
    pub mean_welfare_final: Option<f64>,
    /// Over converged runs with a defined percent change.
    pub mean_welfare_pct_change: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub rows: Vec<ProfileRow>,
    pub cells: Vec<CellResult>,
}

/// Separates the scheduler's RNG stream from the sampler's.
const SCHEDULER_SALT: u64 = 0x5C4E_D01E_0000_0001;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-profile seed from the master seed and the profile coordinates only.
pub fn profile_seed(master: u64, n: usize, p: usize, r: i64, index: usize) -> u64 {
    let mut h = splitmix64(master);
    for v in [n as u64, p as u64, r as u64, index as u64] {
        h = splitmix64(h ^ v);
    }
    h
}

fn run_one(grid: &ExperimentGrid, n: usize, p: usize, r: i64, index: usize) -> ProfileRow {
    let seed = profile_seed(grid.master_seed, n, p, r, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = IssueDomain::binary(p).expect("binary domain");
    let prefs = sample_impartial_culture(n, &domain, &mut rng);
    let mode = UncertaintyMode::fixed_uniform(grid.metric, r, p, n).expect("valid radii");
    let config = DynamicsConfig {
        kind: grid.kind,
        mode,
        scheduler: SchedulerPolicy::UniformRandom {
            seed: splitmix64(seed ^ SCHEDULER_SALT),
        },
        cap: grid.cap,
        record_trace: false,
    };
    let result = dynamics::run(&prefs, prefs.truthful_votes(), &config).expect("valid config");
    let equilibrium = result.terminal.is_equilibrium();
    let welfare_truthful = borda_welfare(&prefs, &result.initial_outcome);
    let welfare_final = equilibrium.then(|| borda_welfare(&prefs, &result.final_outcome));
    let welfare_pct_change = welfare_final.and_then(|wf| {
        (welfare_truthful != 0)
            .then(|| 100.0 * (wf - welfare_truthful) as f64 / welfare_truthful as f64)
    });
    ProfileRow {
        n,
        p,
        r,
        profile_index: index,
        seed,
        truthful_is_equilibrium: equilibrium && result.rounds == 0,
        terminal: result.terminal,
        steps: result.rounds,
        welfare_truthful,
        welfare_final,
        welfare_pct_change,
    }
}

/// Run every cell of the grid. Profiles execute in parallel; rows and cell
/// aggregates come back in (n, p, r, index) order regardless of scheduling.
pub fn run_experiment(grid: &ExperimentGrid) -> ExperimentOutput {
    let mut jobs = Vec::new();
    for &n in &grid.agent_counts {
        for &p in &grid.issue_counts {
            for &r in &grid.radii {
                for index in 0..grid.profiles_per_cell {
                    jobs.push((n, p, r, index));
                }
            }
        }
    }
    let rows: Vec<ProfileRow> = jobs
        .par_iter()
        .map(|&(n, p, r, index)| run_one(grid, n, p, r, index))
        .collect();
    let mut cells = Vec::new();
    for &n in &grid.agent_counts {
        for &p in &grid.issue_counts {
            for &r in &grid.radii {
                let cell_rows: Vec<&ProfileRow> = rows
                    .iter()
                    .filter(|row| row.n == n && row.p == p && row.r == r)
                    .collect();
                cells.push(aggregate_cell(n, p, r, &cell_rows));
            }
        }
    }
    ExperimentOutput { rows, cells }
}

fn aggregate_cell(n: usize, p: usize, r: i64, rows: &[&ProfileRow]) -> CellResult {
    let m = rows.len();
    let truthful_equilibrium = rows.iter().filter(|x| x.truthful_is_equilibrium).count();
    let equilibrium: Vec<&&ProfileRow> = rows
        .iter()
        .filter(|x| x.terminal.is_equilibrium())
        .collect();
    let converged = equilibrium.len() - truthful_equilibrium;
    let cycled_or_capped = m - equilibrium.len();

    let mut steps: Vec<usize> = equilibrium.iter().map(|x| x.steps).collect();
    steps.sort_unstable();
    let (mean_steps, steps_min, steps_median, steps_p90, steps_max) = if steps.is_empty() {
        (0.0, 0, 0.0, 0, 0)
    } else {
        let sum: usize = steps.iter().sum();
        let median = if steps.len() % 2 == 1 {
            steps[steps.len() / 2] as f64
        } else {
            (steps[steps.len() / 2 - 1] + steps[steps.len() / 2]) as f64 / 2.0
        };
        let p90 = steps[((steps.len() - 1) * 9) / 10];
        (
            sum as f64 / steps.len() as f64,
            steps[0],
            median,
            p90,
            steps[steps.len() - 1],
        )
    };

    let mean_welfare_truthful = if m == 0 {
        0.0
    } else {
        rows.iter().map(|x| x.welfare_truthful as f64).sum::<f64>() / m as f64
    };
    let finals: Vec<f64> = equilibrium
        .iter()
        .filter_map(|x| x.welfare_final.map(|w| w as f64))
        .collect();
    let mean_welfare_final = (!finals.is_empty())
        .then(|| finals.iter().sum::<f64>() / finals.len() as f64);
    let pcts: Vec<f64> = rows
        .iter()
        .filter(|x| !x.truthful_is_equilibrium)
        .filter_map(|x| x.welfare_pct_change)
        .collect();
    let mean_welfare_pct_change =
        (!pcts.is_empty()).then(|| pcts.iter().sum::<f64>() / pcts.len() as f64);

    CellResult {
        n,
        p,
        r,
        profiles: m,
        truthful_equilibrium,
        converged,
        cycled_or_capped,
        mean_steps,
        steps_min,
        steps_median,
        steps_p90,
        steps_max,
        mean_welfare_truthful,
        mean_welfare_final,
        mean_welfare_pct_change,
    }
}

fn terminal_label(t: Terminal) -> &'static str {
    match t {
        Terminal::Equilibrium => "equilibrium",
        Terminal::CycleDetected { .. } => "cycle",
        Terminal::CapReached => "cap",
    }
}

fn opt_i64(v: Option<i64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// Raw per-profile CSV, one row per run, preceded by a schema comment line.
pub fn write_raw_csv<W: Write>(mut out: W, rows: &[ProfileRow]) -> Result<()> {
    writeln!(out, "# {RAW_CSV_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "p",
        "r",
        "profile_index",
        "seed",
        "truthful_is_equilibrium",
        "terminal",
        "steps",
        "welfare_truthful",
        "welfare_final",
        "welfare_pct_change",
    ])?;
    for row in rows {
        w.write_record([
            row.n.to_string(),
            row.p.to_string(),
            row.r.to_string(),
            row.profile_index.to_string(),
            row.seed.to_string(),
            row.truthful_is_equilibrium.to_string(),
            terminal_label(row.terminal).to_string(),
            row.steps.to_string(),
            row.welfare_truthful.to_string(),
            opt_i64(row.welfare_final),
            opt_f64(row.welfare_pct_change),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Aggregate per-cell CSV mirroring [`CellResult`].
pub fn write_aggregate_csv<W: Write>(mut out: W, cells: &[CellResult]) -> Result<()> {
    writeln!(out, "# {AGGREGATE_CSV_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "p",
        "r",
        "profiles",
        "truthful_equilibrium",
        "converged",
        "cycled_or_capped",
        "mean_steps",
        "steps_min",
        "steps_median",
        "steps_p90",
        "steps_max",
        "mean_welfare_truthful",
        "mean_welfare_final",
        "mean_welfare_pct_change",
    ])?;
    for c in cells {
        w.write_record([
            c.n.to_string(),
            c.p.to_string(),
            c.r.to_string(),
            c.profiles.to_string(),
            c.truthful_equilibrium.to_string(),
            c.converged.to_string(),
            c.cycled_or_capped.to_string(),
            format!("{:.6}", c.mean_steps),
            c.steps_min.to_string(),
            format!("{:.6}", c.steps_median),
            c.steps_p90.to_string(),
            c.steps_max.to_string(),
            format!("{:.6}", c.mean_welfare_truthful),
            opt_f64(c.mean_welfare_final),
            opt_f64(c.mean_welfare_pct_change),
        ])?;
    }
    w.flush()?;
    Ok(())
}
