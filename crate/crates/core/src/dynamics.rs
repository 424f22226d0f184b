//! The iterative process: one agent revises one issue per round until no
//! improvement step exists (equilibrium), the deterministic system state
//! recurs (cycle), or the round cap is hit.
//!
//! Cycle detection hashes the full deterministic state — vote profile plus
//! scheduler position — so a reported cycle is a true recurrence of the whole
//! system, never a coincidental profile revisit. Randomized schedulers skip
//! detection and rely on the cap.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{plurality_outcome, Alternative, PreferenceProfile, ScoreTuple, VoteProfile};
use crate::dominance::StepContext;
use crate::error::{Error, Result};
use crate::uncertainty::{DistanceMetric, Radius, UncertaintySpec};

/// Stopping condition used when a run is not otherwise bounded.
pub const DEFAULT_ROUND_CAP: usize = 50_000;

/// Which response function drives improvement steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DynamicsKind {
    /// Exact knowledge of the scores; steps to the most preferred reachable
    /// outcome. Equivalent to local dominance at zero radius plus the
    /// keep-current default, and implemented through that single path.
    #[serde(rename = "br")]
    BestResponse,
    /// Local dominance improvement over the agent's uncertainty set.
    #[serde(rename = "ldi")]
    LocalDominance,
}

impl fmt::Display for DynamicsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsKind::BestResponse => write!(f, "br"),
            DynamicsKind::LocalDominance => write!(f, "ldi"),
        }
    }
}

/// One scheduled improvement step: `agent` switches `issue` to `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedStep {
    pub agent: usize,
    pub issue: usize,
    pub to: usize,
}

/// How the next improvement step is chosen each round.
#[derive(Clone, Debug)]
pub enum SchedulerPolicy {
    /// Replay a fixed list of steps, cyclically; each must be a valid step
    /// when its round comes up.
    Scripted(Vec<ScriptedStep>),
    /// Cyclic scan over (agent, issue) pairs, taking the first available
    /// step (smallest target candidate).
    RoundRobin,
    /// Uniform draw over all available (agent, issue, target) steps.
    UniformRandom { seed: u64 },
}

impl SchedulerPolicy {
    fn is_deterministic(&self) -> bool {
        !matches!(self, SchedulerPolicy::UniformRandom { .. })
    }
}

/// Per-agent uncertainty, either fixed radii or the alternating form where
/// the issue being changed gets the tighter radius.
#[derive(Clone, Debug)]
pub enum UncertaintyMode {
    Fixed(Vec<UncertaintySpec>),
    Alternating {
        metric: DistanceMetric,
        /// `(current-issue radius, other-issue radius)` per agent, with the
        /// first strictly smaller.
        pairs: Vec<(Radius, Radius)>,
    },
}

impl UncertaintyMode {
    pub fn fixed_uniform(
        metric: DistanceMetric,
        radius: i64,
        num_issues: usize,
        num_agents: usize,
    ) -> Result<Self> {
        Ok(UncertaintyMode::Fixed(vec![
            UncertaintySpec::uniform(metric, radius, num_issues)?;
            num_agents
        ]))
    }

    pub fn alternating(
        metric: DistanceMetric,
        pairs: Vec<(Radius, Radius)>,
    ) -> Result<Self> {
        for (rc, ro) in &pairs {
            if rc >= ro {
                return Err(Error::InvalidSpec(format!(
                    "alternating uncertainty needs the current-issue radius below the others ({rc} >= {ro})"
                )));
            }
        }
        Ok(UncertaintyMode::Alternating { metric, pairs })
    }

    fn validate(&self, num_agents: usize, num_issues: usize) -> Result<()> {
        match self {
            UncertaintyMode::Fixed(specs) => {
                if specs.len() != num_agents {
                    return Err(Error::InvalidConfig(format!(
                        "{} uncertainty specs for {num_agents} agents",
                        specs.len()
                    )));
                }
                if let Some(s) = specs.iter().find(|s| s.num_issues() != num_issues) {
                    return Err(Error::InvalidConfig(format!(
                        "spec has {} radii for {num_issues} issues",
                        s.num_issues()
                    )));
                }
            }
            UncertaintyMode::Alternating { pairs, .. } => {
                if pairs.len() != num_agents {
                    return Err(Error::InvalidConfig(format!(
                        "{} alternating pairs for {num_agents} agents",
                        pairs.len()
                    )));
                }
            }
        }
        Ok(())
    }

    /// The radii agent `j` applies when evaluating a change on `issue`.
    fn spec_for(&self, agent: usize, issue: usize, num_issues: usize) -> UncertaintySpec {
        match self {
            UncertaintyMode::Fixed(specs) => specs[agent].clone(),
            UncertaintyMode::Alternating { metric, pairs } => {
                let (rc, ro) = pairs[agent];
                let mut radii = vec![ro; num_issues];
                radii[issue] = rc;
                UncertaintySpec {
                    metric: *metric,
                    radii,
                }
            }
        }
    }
}

/// Full run configuration.
#[derive(Clone, Debug)]
pub struct DynamicsConfig {
    pub kind: DynamicsKind,
    pub mode: UncertaintyMode,
    pub scheduler: SchedulerPolicy,
    pub cap: usize,
    /// Keep per-round step records; grid experiments turn this off.
    pub record_trace: bool,
}

impl DynamicsConfig {
    pub fn new(kind: DynamicsKind, mode: UncertaintyMode, scheduler: SchedulerPolicy) -> Self {
        Self {
            kind,
            mode,
            scheduler,
            cap: DEFAULT_ROUND_CAP,
            record_trace: true,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }
}

/// One executed improvement step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub round: usize,
    pub agent: usize,
    pub issue: usize,
    pub from: usize,
    pub to: usize,
    pub outcome_after: Alternative,
    /// Population mass moved, as `(sets, total sets)`; absent in the atomic
    /// model.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mass: Option<(i64, i64)>,
}

/// Terminal classification of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Terminal {
    Equilibrium,
    CycleDetected { entry_round: usize, period: usize },
    CapReached,
}

impl Terminal {
    pub fn is_equilibrium(&self) -> bool {
        matches!(self, Terminal::Equilibrium)
    }
}

/// Everything a finished run reports.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub terminal: Terminal,
    /// Rounds in which a step executed; equals the trace length when traces
    /// are recorded.
    pub rounds: usize,
    pub trace: Vec<StepRecord>,
    pub initial_votes: VoteProfile,
    pub final_votes: VoteProfile,
    pub initial_outcome: Alternative,
    pub final_outcome: Alternative,
}

/// All valid improvement steps from the current profile, as
/// `(agent, issue, target vote)` triples in lexicographic (agent, issue,
/// candidate) order. Best-response dynamics yields at most one target per
/// (agent, issue); local dominance may yield several.
pub fn enumerate_steps(
    prefs: &PreferenceProfile,
    votes: &VoteProfile,
    kind: DynamicsKind,
    mode: &UncertaintyMode,
) -> Vec<(usize, usize, Alternative)> {
    let domain = prefs.domain();
    let p = domain.num_issues();
    let zero_spec = UncertaintySpec::exact(p);
    let full = ScoreTuple::from_votes(votes, domain);
    let mut steps = Vec::new();
    for agent in 0..prefs.num_agents() {
        let mut adjusted = full.clone();
        adjusted.remove_vote(votes.vote(agent));
        // with fixed radii the agent's uncertainty set is shared by all
        // issues; only the alternating mode rebuilds it per issue
        let fixed_spec = match kind {
            DynamicsKind::BestResponse => Some(&zero_spec),
            DynamicsKind::LocalDominance => match mode {
                UncertaintyMode::Fixed(specs) => Some(&specs[agent]),
                UncertaintyMode::Alternating { .. } => None,
            },
        };
        let fixed_set = fixed_spec.map(|spec| crate::uncertainty::build_uncertainty_set(&adjusted, spec));
        for issue in 0..p {
            let targets = match &fixed_set {
                Some(set) => StepContext::from_cached(
                    domain,
                    prefs.ranking(agent),
                    &adjusted,
                    set,
                    votes.vote(agent).clone(),
                    issue,
                    false,
                )
                .improvement_targets(),
                None => StepContext::from_adjusted(
                    domain,
                    prefs.ranking(agent),
                    adjusted.clone(),
                    votes.vote(agent).clone(),
                    issue,
                    &mode.spec_for(agent, issue, p),
                )
                .improvement_targets(),
            };
            match kind {
                DynamicsKind::BestResponse => {
                    // all zero-radius targets reach the same outcome; the
                    // smallest candidate is the canonical best response
                    if let Some(t) = targets.first() {
                        steps.push((agent, issue, t.clone()));
                    }
                }
                DynamicsKind::LocalDominance => {
                    for t in targets {
                        steps.push((agent, issue, t));
                    }
                }
            }
        }
    }
    steps
}

#[derive(PartialEq, Eq, Hash)]
struct StateKey {
    votes: Vec<u16>,
    scheduler_pos: u32,
}

fn state_key(votes: &VoteProfile, scheduler_pos: u32) -> StateKey {
    let mut flat = Vec::with_capacity(votes.num_agents() * votes.vote(0).num_issues());
    for v in votes.votes() {
        flat.extend(v.candidates().iter().map(|&c| c as u16));
    }
    StateKey {
        votes: flat,
        scheduler_pos,
    }
}

/// Run improvement dynamics from `initial` until equilibrium, a cycle of the
/// deterministic system state, or the round cap.
pub fn run(
    prefs: &PreferenceProfile,
    initial: VoteProfile,
    config: &DynamicsConfig,
) -> Result<RunResult> {
    let domain = prefs.domain();
    let n = prefs.num_agents();
    let p = domain.num_issues();
    if initial.num_agents() != n {
        return Err(Error::InvalidConfig(format!(
            "{} initial votes for {n} agents",
            initial.num_agents()
        )));
    }
    for v in initial.votes() {
        domain.validate_alternative(v)?;
    }
    config.mode.validate(n, p)?;
    if config.cap == 0 {
        return Err(Error::InvalidConfig("round cap must be at least 1".into()));
    }
    if let SchedulerPolicy::Scripted(script) = &config.scheduler {
        if script.is_empty() {
            return Err(Error::InvalidConfig("scripted scheduler needs steps".into()));
        }
    }

    let initial_outcome = plurality_outcome(&ScoreTuple::from_votes(&initial, domain));
    let mut votes = initial.clone();
    let mut trace = Vec::new();
    let mut visited: HashMap<StateKey, usize> = HashMap::new();
    let mut rr_pointer: usize = 0;
    let mut script_pos: usize = 0;
    let mut rng = match &config.scheduler {
        SchedulerPolicy::UniformRandom { seed } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };

    let mut terminal = Terminal::CapReached;
    let mut rounds = config.cap;
    for round in 0..config.cap {
        let steps = enumerate_steps(prefs, &votes, config.kind, &config.mode);
        if steps.is_empty() {
            terminal = Terminal::Equilibrium;
            rounds = round;
            break;
        }
        if config.scheduler.is_deterministic() {
            let pos = match &config.scheduler {
                SchedulerPolicy::Scripted(script) => (script_pos % script.len()) as u32,
                SchedulerPolicy::RoundRobin => rr_pointer as u32,
                SchedulerPolicy::UniformRandom { .. } => unreachable!(),
            };
            if let Some(&entry) = visited.get(&state_key(&votes, pos)) {
                terminal = Terminal::CycleDetected {
                    entry_round: entry,
                    period: round - entry,
                };
                rounds = round;
                break;
            }
            visited.insert(state_key(&votes, pos), round);
        }

        let (agent, issue, target) = match &config.scheduler {
            SchedulerPolicy::Scripted(script) => {
                let s = script[script_pos % script.len()];
                script_pos += 1;
                let wanted = steps.iter().find(|(j, i, t)| {
                    *j == s.agent && *i == s.issue && t.get(s.issue) == s.to
                });
                match wanted {
                    Some(step) => step.clone(),
                    None => {
                        return Err(Error::Scheduler {
                            round,
                            reason: format!(
                                "scripted step (agent {}, issue {}, to {}) is not a valid improvement step",
                                s.agent, s.issue, s.to
                            ),
                        })
                    }
                }
            }
            SchedulerPolicy::RoundRobin => {
                let total = n * p;
                let mut chosen = None;
                for offset in 0..total {
                    let slot = (rr_pointer + offset) % total;
                    let (agent, issue) = (slot / p, slot % p);
                    if let Some(step) = steps
                        .iter()
                        .find(|(j, i, _)| *j == agent && *i == issue)
                    {
                        rr_pointer = (slot + 1) % total;
                        chosen = Some(step.clone());
                        break;
                    }
                }
                chosen.expect("nonempty step list always yields a round-robin choice")
            }
            SchedulerPolicy::UniformRandom { .. } => {
                let rng = rng.as_mut().expect("rng present for random scheduler");
                steps[rng.gen_range(0..steps.len())].clone()
            }
        };

        let from = votes.vote(agent).get(issue);
        votes.set_vote(agent, target);
        if config.record_trace {
            let outcome_after = plurality_outcome(&ScoreTuple::from_votes(&votes, domain));
            trace.push(StepRecord {
                round,
                agent,
                issue,
                from,
                to: votes.vote(agent).get(issue),
                outcome_after,
                mass: None,
            });
        }
    }

    let final_outcome = plurality_outcome(&ScoreTuple::from_votes(&votes, domain));
    Ok(RunResult {
        terminal,
        rounds,
        trace,
        initial_votes: initial,
        final_votes: votes,
        initial_outcome,
        final_outcome,
    })
}

/// Replay a recorded trace, re-deriving every step's validity from scratch:
/// each record must name an available improvement step at its round, the
/// running outcome must match, and an equilibrium result must have no steps
/// left at the final profile.
pub fn audit_trace(
    prefs: &PreferenceProfile,
    config: &DynamicsConfig,
    result: &RunResult,
) -> Result<()> {
    let domain = prefs.domain();
    let mut votes = result.initial_votes.clone();
    for record in &result.trace {
        let steps = enumerate_steps(prefs, &votes, config.kind, &config.mode);
        let valid = steps.iter().any(|(j, i, t)| {
            *j == record.agent && *i == record.issue && t.get(record.issue) == record.to
        });
        if !valid {
            return Err(Error::Audit {
                round: record.round,
                reason: format!(
                    "recorded step (agent {}, issue {}, {} -> {}) is not derivable",
                    record.agent, record.issue, record.from, record.to
                ),
            });
        }
        if votes.vote(record.agent).get(record.issue) != record.from {
            return Err(Error::Audit {
                round: record.round,
                reason: "recorded `from` does not match the replayed profile".into(),
            });
        }
        votes.set_vote(
            record.agent,
            votes.vote(record.agent).with_candidate(record.issue, record.to),
        );
        let outcome = plurality_outcome(&ScoreTuple::from_votes(&votes, domain));
        if outcome != record.outcome_after {
            return Err(Error::Audit {
                round: record.round,
                reason: format!(
                    "recorded outcome {} differs from replayed {}",
                    record.outcome_after, outcome
                ),
            });
        }
    }
    if votes != result.final_votes {
        return Err(Error::Audit {
            round: result.rounds,
            reason: "replayed final profile differs from the recorded one".into(),
        });
    }
    if result.terminal.is_equilibrium()
        && !enumerate_steps(prefs, &votes, config.kind, &config.mode).is_empty()
    {
        return Err(Error::Audit {
            round: result.rounds,
            reason: "result claims equilibrium but steps remain".into(),
        });
    }
    Ok(())
}
