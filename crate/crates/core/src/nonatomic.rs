//! Nonatomic variant: a continuum population partitioned into sets of equal
//! mass epsilon, each set holding one ranking, one uncertainty spec, and one
//! current vote.
//!
//! Two semantic changes against the atomic model: uncertainty sets are
//! centered at the full score tuple (an individual ballot is massless), and
//! an agent's ballot decides exact ties among maximal candidates in its
//! favor, overriding the lexicographic default. Scores are kept internally
//! as integer set counts (units of epsilon) so every feasibility test stays
//! exact; radii given in mass units scale by `1/epsilon`.

use num_rational::Rational64;
use num_traits::One;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::domain::{plurality_outcome, Alternative, IssueDomain, Ranking, ScoreTuple, VoteProfile};
use crate::dominance::StepContext;
use crate::dynamics::{RunResult, StepRecord, Terminal, DEFAULT_ROUND_CAP};
use crate::error::{Error, Result};
use crate::uncertainty::{DistanceMetric, Radius, UncertaintySpec};

/// One epsilon-mass set of identical agents.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeSet {
    pub ranking: Ranking,
    pub spec: UncertaintySpec,
    pub vote: Alternative,
}

/// A population of `1/epsilon` equal-mass sets over a shared domain.
#[derive(Clone, Debug)]
pub struct MassProfile {
    domain: IssueDomain,
    sets: Vec<TypeSet>,
}

impl MassProfile {
    pub fn new(domain: IssueDomain, sets: Vec<TypeSet>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::InvalidProfile("need at least one set".into()));
        }
        let want_alts = domain.num_alternatives();
        for (j, s) in sets.iter().enumerate() {
            domain.validate_alternative(&s.vote)?;
            if s.ranking.len() != want_alts {
                return Err(Error::InvalidProfile(format!(
                    "set {j} ranks {} alternatives, domain has {want_alts}",
                    s.ranking.len()
                )));
            }
            if s.spec.num_issues() != domain.num_issues() {
                return Err(Error::InvalidProfile(format!(
                    "set {j} has {} radii for {} issues",
                    s.spec.num_issues(),
                    domain.num_issues()
                )));
            }
        }
        Ok(Self { domain, sets })
    }

    pub fn domain(&self) -> &IssueDomain {
        &self.domain
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    /// Mass per set: exactly `1 / num_sets`.
    pub fn epsilon(&self) -> Rational64 {
        Rational64::new(1, self.sets.len() as i64)
    }

    pub fn set(&self, j: usize) -> &TypeSet {
        &self.sets[j]
    }

    pub fn sets(&self) -> &[TypeSet] {
        &self.sets
    }

    /// Integer score tuple counting sets; per-issue sums equal `num_sets`.
    pub fn counts(&self) -> ScoreTuple {
        let votes = VoteProfile::new(self.sets.iter().map(|s| s.vote.clone()).collect());
        ScoreTuple::from_votes(&votes, &self.domain)
    }

    /// Scores as fractions of the population, per issue and candidate.
    pub fn mass_scores(&self) -> Vec<Vec<Rational64>> {
        let eps = self.epsilon();
        self.counts()
            .issues()
            .iter()
            .map(|v| v.iter().map(|&c| Rational64::from_integer(c) * eps).collect())
            .collect()
    }

    /// Radii in mass units become radii in set-count units. The
    /// multiplicative metric is scale invariant and passes through.
    fn scaled_spec(&self, spec: &UncertaintySpec) -> UncertaintySpec {
        let k = Rational64::from_integer(self.sets.len() as i64);
        match spec.metric {
            DistanceMetric::LInf => UncertaintySpec {
                metric: spec.metric,
                radii: spec
                    .radii
                    .iter()
                    .map(|r| Radius::new(r.value() * k).expect("non-negative stays non-negative"))
                    .collect(),
            },
            DistanceMetric::Multiplicative => spec.clone(),
        }
    }

    /// Step context for set `j` changing `issue`: uncertainty around the full
    /// counts, ballot-decides-ties evaluation.
    pub fn step_context(&self, j: usize, issue: usize) -> StepContext<'_> {
        let set = &self.sets[j];
        StepContext::with_tie_override(
            &self.domain,
            &set.ranking,
            self.counts(),
            set.vote.clone(),
            issue,
            &self.scaled_spec(&set.spec),
        )
    }

    /// Local-dominance step targets for set `j` on `issue`.
    pub fn step_targets(&self, j: usize, issue: usize) -> Vec<Alternative> {
        self.step_context(j, issue).improvement_targets()
    }

    /// All `(set, issue, target)` steps available anywhere under the
    /// per-type radii.
    pub fn enumerate_steps(&self) -> Vec<(usize, usize, Alternative)> {
        self.enumerate_steps_with(&NonatomicUncertainty::PerType)
    }

    /// Step enumeration under an explicit uncertainty regime.
    pub fn enumerate_steps_with(
        &self,
        uncertainty: &NonatomicUncertainty,
    ) -> Vec<(usize, usize, Alternative)> {
        let counts = self.counts();
        let p = self.domain.num_issues();
        let mut out = Vec::new();
        for (j, set) in self.sets.iter().enumerate() {
            // with per-type radii one uncertainty set serves every issue;
            // alternating radii rebuild it per issue
            let shared = match uncertainty {
                NonatomicUncertainty::PerType => Some(
                    crate::uncertainty::build_uncertainty_set(&counts, &self.scaled_spec(&set.spec)),
                ),
                NonatomicUncertainty::Alternating { .. } => None,
            };
            for issue in 0..p {
                let targets = match &shared {
                    Some(believed) => StepContext::from_cached(
                        &self.domain,
                        &set.ranking,
                        &counts,
                        believed,
                        set.vote.clone(),
                        issue,
                        true,
                    )
                    .improvement_targets(),
                    None => {
                        let spec = uncertainty.spec_for(j, issue, p, &set.spec);
                        StepContext::with_tie_override(
                            &self.domain,
                            &set.ranking,
                            counts.clone(),
                            set.vote.clone(),
                            issue,
                            &self.scaled_spec(&spec),
                        )
                        .improvement_targets()
                    }
                };
                for t in targets {
                    out.push((j, issue, t));
                }
            }
        }
        out
    }

    /// Indices of every set identical to `j` (same ranking, spec, and vote),
    /// including `j` itself. Identical sets always share step availability
    /// because contexts are built from the full counts.
    pub fn identical_sets(&self, j: usize) -> Vec<usize> {
        let probe = &self.sets[j];
        (0..self.sets.len())
            .filter(|&u| {
                let s = &self.sets[u];
                s.vote == probe.vote && s.spec == probe.spec && s.ranking == probe.ranking
            })
            .collect()
    }
}

/// Election winner per issue from mass scores: maximal score, the voted
/// candidate if it is among the tied maxima, otherwise the smallest index.
/// Per-issue scores must sum to 1.
pub fn nonatomic_outcome(scores: &[Vec<Rational64>], vote: &Alternative) -> Alternative {
    debug_assert!(scores
        .iter()
        .all(|v| v.iter().sum::<Rational64>() == Rational64::one()));
    let cands = scores
        .iter()
        .zip(vote.candidates())
        .map(|(issue_scores, &voted)| {
            let max = issue_scores.iter().max().expect("non-empty issue");
            if issue_scores[voted] == *max {
                voted
            } else {
                issue_scores
                    .iter()
                    .position(|s| s == max)
                    .expect("max exists")
            }
        })
        .collect();
    Alternative::new(cands)
}

/// Which radii govern a type's uncertainty when it evaluates a change.
#[derive(Clone, Debug)]
pub enum NonatomicUncertainty {
    /// Each type's own fixed spec, as stored in the profile.
    PerType,
    /// Alternating radii: the issue being changed gets the tighter
    /// `rc`, every other issue `ro`, per type, with `rc < ro`.
    Alternating {
        metric: DistanceMetric,
        pairs: Vec<(Radius, Radius)>,
    },
}

impl NonatomicUncertainty {
    pub fn alternating(metric: DistanceMetric, pairs: Vec<(Radius, Radius)>) -> Result<Self> {
        for (rc, ro) in &pairs {
            if rc >= ro {
                return Err(Error::InvalidSpec(format!(
                    "alternating uncertainty needs the current-issue radius below the others ({rc} >= {ro})"
                )));
            }
        }
        Ok(NonatomicUncertainty::Alternating { metric, pairs })
    }

    /// The radii (in mass units) type `j` applies when changing `issue`.
    fn spec_for(
        &self,
        set: usize,
        issue: usize,
        num_issues: usize,
        own: &UncertaintySpec,
    ) -> UncertaintySpec {
        match self {
            NonatomicUncertainty::PerType => own.clone(),
            NonatomicUncertainty::Alternating { metric, pairs } => {
                let (rc, ro) = pairs[set];
                let mut radii = vec![ro; num_issues];
                radii[issue] = rc;
                UncertaintySpec {
                    metric: *metric,
                    radii,
                }
            }
        }
    }

    fn validate(&self, num_sets: usize) -> Result<()> {
        if let NonatomicUncertainty::Alternating { pairs, .. } = self {
            if pairs.len() != num_sets {
                return Err(Error::InvalidConfig(format!(
                    "{} alternating pairs for {num_sets} sets",
                    pairs.len()
                )));
            }
        }
        Ok(())
    }
}

/// One scheduled batch move: `count` sets identical to `set` switch `issue`
/// to `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonatomicStep {
    pub set: usize,
    pub issue: usize,
    pub to: usize,
    pub count: usize,
}

/// Step selection for nonatomic runs.
#[derive(Clone, Debug)]
pub enum NonatomicScheduler {
    /// Replay fixed batch moves, cyclically; each validated at its round.
    Scripted(Vec<NonatomicStep>),
    /// Uniform draw over available steps; one set moves.
    SingleRandom { seed: u64 },
    /// Uniform draw over available steps; every identical set with that step
    /// moves together.
    BatchRandom { seed: u64 },
}

impl NonatomicScheduler {
    fn is_deterministic(&self) -> bool {
        matches!(self, NonatomicScheduler::Scripted(_))
    }
}

#[derive(Clone, Debug)]
pub struct NonatomicConfig {
    pub scheduler: NonatomicScheduler,
    pub uncertainty: NonatomicUncertainty,
    pub cap: usize,
    pub record_trace: bool,
}

impl NonatomicConfig {
    pub fn new(scheduler: NonatomicScheduler) -> Self {
        Self {
            scheduler,
            uncertainty: NonatomicUncertainty::PerType,
            cap: DEFAULT_ROUND_CAP,
            record_trace: true,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_uncertainty(mut self, uncertainty: NonatomicUncertainty) -> Self {
        self.uncertainty = uncertainty;
        self
    }
}

fn votes_of(profile: &MassProfile) -> VoteProfile {
    VoteProfile::new(profile.sets().iter().map(|s| s.vote.clone()).collect())
}

fn flat_state(profile: &MassProfile, pos: u32) -> (Vec<u16>, u32) {
    let mut flat = Vec::with_capacity(profile.num_sets() * profile.domain().num_issues());
    for s in profile.sets() {
        flat.extend(s.vote.candidates().iter().map(|&c| c as u16));
    }
    (flat, pos)
}

/// Run nonatomic dynamics; one batch of identical sets moves per round.
/// Terminal semantics mirror the atomic run; randomized schedulers rely on
/// the cap instead of cycle detection.
pub fn run(profile: &MassProfile, config: &NonatomicConfig) -> Result<RunResult> {
    if config.cap == 0 {
        return Err(Error::InvalidConfig("round cap must be at least 1".into()));
    }
    if let NonatomicScheduler::Scripted(script) = &config.scheduler {
        if script.is_empty() {
            return Err(Error::InvalidConfig("scripted scheduler needs steps".into()));
        }
    }
    config.uncertainty.validate(profile.num_sets())?;
    let mut profile = profile.clone();
    let total = profile.num_sets() as i64;
    let domain_sums: Vec<i64> = vec![total; profile.domain().num_issues()];
    let initial_votes = votes_of(&profile);
    let initial_outcome = plurality_outcome(&profile.counts());

    let mut trace = Vec::new();
    let mut visited: HashMap<(Vec<u16>, u32), usize> = HashMap::new();
    let mut script_pos = 0usize;
    let mut rng = match &config.scheduler {
        NonatomicScheduler::SingleRandom { seed } | NonatomicScheduler::BatchRandom { seed } => {
            Some(ChaCha8Rng::seed_from_u64(*seed))
        }
        NonatomicScheduler::Scripted(_) => None,
    };

    let mut terminal = Terminal::CapReached;
    let mut rounds = config.cap;
    for round in 0..config.cap {
        let steps = profile.enumerate_steps_with(&config.uncertainty);
        if steps.is_empty() {
            terminal = Terminal::Equilibrium;
            rounds = round;
            break;
        }
        if config.scheduler.is_deterministic() {
            let pos = match &config.scheduler {
                NonatomicScheduler::Scripted(script) => (script_pos % script.len()) as u32,
                _ => 0,
            };
            let key = flat_state(&profile, pos);
            if let Some(&entry) = visited.get(&key) {
                terminal = Terminal::CycleDetected {
                    entry_round: entry,
                    period: round - entry,
                };
                rounds = round;
                break;
            }
            visited.insert(key, round);
        }

        // identity under alternating radii also requires matching pairs
        let same_type = |j: usize| -> Vec<usize> {
            let base = profile.identical_sets(j);
            match &config.uncertainty {
                NonatomicUncertainty::PerType => base,
                NonatomicUncertainty::Alternating { pairs, .. } => base
                    .into_iter()
                    .filter(|&u| pairs[u] == pairs[j])
                    .collect(),
            }
        };
        let (movers, issue, to) = match &config.scheduler {
            NonatomicScheduler::Scripted(script) => {
                let s = script[script_pos % script.len()];
                script_pos += 1;
                let available = steps.iter().any(|(j, i, t)| {
                    *j == s.set && *i == s.issue && t.get(s.issue) == s.to
                });
                if !available {
                    return Err(Error::Scheduler {
                        round,
                        reason: format!(
                            "scripted step (set {}, issue {}, to {}) is not a valid improvement step",
                            s.set, s.issue, s.to
                        ),
                    });
                }
                let identical = same_type(s.set);
                if s.count == 0 || s.count > identical.len() {
                    return Err(Error::Scheduler {
                        round,
                        reason: format!(
                            "batch of {} requested but only {} identical sets exist",
                            s.count,
                            identical.len()
                        ),
                    });
                }
                (identical[..s.count].to_vec(), s.issue, s.to)
            }
            NonatomicScheduler::SingleRandom { .. } => {
                let rng = rng.as_mut().expect("rng present");
                let (j, issue, t) = steps[rng.gen_range(0..steps.len())].clone();
                (vec![j], issue, t.get(issue))
            }
            NonatomicScheduler::BatchRandom { .. } => {
                let rng = rng.as_mut().expect("rng present");
                let (j, issue, t) = steps[rng.gen_range(0..steps.len())].clone();
                (same_type(j), issue, t.get(issue))
            }
        };

        let representative = movers[0];
        let from = profile.sets[representative].vote.get(issue);
        for &u in &movers {
            let new_vote = profile.sets[u].vote.with_candidate(issue, to);
            profile.sets[u].vote = new_vote;
        }
        let counts = profile.counts();
        debug_assert_eq!(
            counts.issues().iter().map(|v| v.iter().sum::<i64>()).collect::<Vec<_>>(),
            domain_sums,
            "population mass must be conserved"
        );
        if config.record_trace {
            trace.push(StepRecord {
                round,
                agent: representative,
                issue,
                from,
                to,
                outcome_after: plurality_outcome(&counts),
                mass: Some((movers.len() as i64, total)),
            });
        }
    }

    let final_outcome = plurality_outcome(&profile.counts());
    Ok(RunResult {
        terminal,
        rounds,
        trace,
        initial_votes,
        final_votes: votes_of(&profile),
        initial_outcome,
        final_outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alt(c: &[usize]) -> Alternative {
        Alternative::new(c.to_vec())
    }

    fn rat(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn outcome_override_examples() {
        // exact tie goes to the ballot
        let scores = vec![vec![rat(1, 2), rat(1, 2)]];
        assert_eq!(nonatomic_outcome(&scores, &alt(&[1])), alt(&[1]));
        // ballot not among the maxima: lexicographic among them
        let scores = vec![vec![rat(2, 5), rat(2, 5), rat(1, 5)]];
        assert_eq!(nonatomic_outcome(&scores, &alt(&[2])), alt(&[0]));
        // no tie: plain plurality
        let scores = vec![vec![rat(3, 4), rat(1, 4)], vec![rat(1, 3), rat(2, 3)]];
        assert_eq!(nonatomic_outcome(&scores, &alt(&[1, 0])), alt(&[0, 1]));
    }

    fn separable_ranking(domain: &IssueDomain, top: &Alternative) -> Ranking {
        let mut alts: Vec<Alternative> = domain.alternatives().collect();
        alts.sort_by_key(|a| {
            a.candidates()
                .iter()
                .zip(top.candidates())
                .map(|(&c, &t)| if c == t { 0 } else { c + 1 })
                .collect::<Vec<_>>()
        });
        Ranking::from_alternatives(domain, &alts).unwrap()
    }

    fn uniform_profile(
        domain: &IssueDomain,
        votes: &[&[usize]],
        radius_num: i64,
    ) -> MassProfile {
        let k = votes.len() as i64;
        let sets = votes
            .iter()
            .map(|v| {
                let vote = alt(v);
                TypeSet {
                    ranking: separable_ranking(domain, &vote),
                    spec: UncertaintySpec::new(
                        DistanceMetric::LInf,
                        vec![
                            Radius::new(rat(radius_num, k)).unwrap();
                            domain.num_issues()
                        ],
                    )
                    .unwrap(),
                    vote,
                }
            })
            .collect();
        MassProfile::new(domain.clone(), sets).unwrap()
    }

    #[test]
    fn zero_radius_strict_winner_gives_no_steps() {
        let domain = IssueDomain::binary(2).unwrap();
        let profile = uniform_profile(
            &domain,
            &[&[0, 0], &[0, 0], &[0, 1], &[1, 0], &[0, 0]],
            0,
        );
        assert!(profile.enumerate_steps().is_empty());
    }

    #[test]
    fn truthful_separable_population_is_equilibrium() {
        let domain = IssueDomain::binary(3).unwrap();
        let profile = uniform_profile(
            &domain,
            &[&[0, 0, 1], &[1, 0, 0], &[0, 1, 1], &[1, 1, 0]],
            2,
        );
        let result = run(
            &profile,
            &NonatomicConfig::new(NonatomicScheduler::BatchRandom { seed: 3 }).with_cap(100),
        )
        .unwrap();
        assert_eq!(result.terminal, Terminal::Equilibrium);
        assert_eq!(result.rounds, 0);
    }

    #[test]
    fn mass_scores_sum_to_one() {
        let domain = IssueDomain::binary(2).unwrap();
        let profile = uniform_profile(&domain, &[&[0, 0], &[1, 1], &[1, 0]], 1);
        for issue in profile.mass_scores() {
            assert_eq!(issue.iter().sum::<Rational64>(), Rational64::one());
        }
    }

    #[test]
    fn batch_moves_shift_whole_types_and_record_mass() {
        let domain = IssueDomain::binary(1).unwrap();
        // three identical sets within one radius of flipping the outcome,
        // two others voting 1; ranking prefers 1 over 0
        let d = domain.clone();
        let prefer_one = Ranking::from_alternatives(&d, &[alt(&[1]), alt(&[0])]).unwrap();
        let prefer_zero = Ranking::from_alternatives(&d, &[alt(&[0]), alt(&[1])]).unwrap();
        let spec = |num: i64| {
            UncertaintySpec::new(DistanceMetric::LInf, vec![Radius::new(rat(num, 5)).unwrap()])
                .unwrap()
        };
        let mut sets = vec![
            TypeSet { ranking: prefer_one.clone(), spec: spec(1), vote: alt(&[0]) };
            3
        ];
        sets.extend(vec![
            TypeSet { ranking: prefer_zero.clone(), spec: spec(0), vote: alt(&[1]) };
            2
        ]);
        let profile = MassProfile::new(domain, sets).unwrap();
        let steps = profile.enumerate_steps();
        assert!(steps.iter().all(|(j, _, t)| *j < 3 && t.get(0) == 1));
        assert_eq!(steps.len(), 3);

        let result = run(
            &profile,
            &NonatomicConfig::new(NonatomicScheduler::BatchRandom { seed: 7 }).with_cap(10),
        )
        .unwrap();
        assert_eq!(result.terminal, Terminal::Equilibrium);
        assert_eq!(result.trace.len(), 1);
        assert_eq!(result.trace[0].mass, Some((3, 5)));
        assert_eq!(result.final_outcome, alt(&[1]));
    }

    #[test]
    fn alternating_uncertainty_rejects_non_increasing_pairs_and_runs() {
        let r0 = Radius::new(rat(0, 1)).unwrap();
        let r1 = Radius::new(rat(1, 4)).unwrap();
        assert!(NonatomicUncertainty::alternating(DistanceMetric::LInf, vec![(r1, r1)]).is_err());

        let domain = IssueDomain::binary(2).unwrap();
        let profile = uniform_profile(&domain, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]], 1);
        let pairs = vec![(r0, r1); 4];
        let config = NonatomicConfig::new(NonatomicScheduler::BatchRandom { seed: 11 })
            .with_cap(500)
            .with_uncertainty(
                NonatomicUncertainty::alternating(DistanceMetric::LInf, pairs).unwrap(),
            );
        let result = run(&profile, &config).unwrap();
        assert_eq!(result.terminal, Terminal::Equilibrium);
    }

    #[test]
    fn scripted_batch_validates_count() {
        let domain = IssueDomain::binary(1).unwrap();
        let prefer_one =
            Ranking::from_alternatives(&domain, &[alt(&[1]), alt(&[0])]).unwrap();
        let spec = UncertaintySpec::new(
            DistanceMetric::LInf,
            vec![Radius::new(rat(1, 4)).unwrap()],
        )
        .unwrap();
        let sets = vec![
            TypeSet { ranking: prefer_one.clone(), spec: spec.clone(), vote: alt(&[0]) },
            TypeSet { ranking: prefer_one.clone(), spec: spec.clone(), vote: alt(&[0]) },
            TypeSet { ranking: prefer_one.clone(), spec: spec.clone(), vote: alt(&[1]) },
            TypeSet { ranking: prefer_one, spec, vote: alt(&[1]) },
        ];
        let profile = MassProfile::new(domain, sets).unwrap();
        let err = run(
            &profile,
            &NonatomicConfig::new(NonatomicScheduler::Scripted(vec![NonatomicStep {
                set: 0,
                issue: 0,
                to: 1,
                count: 3,
            }])),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Scheduler { round: 0, .. }));
    }
}
