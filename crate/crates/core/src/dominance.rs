//! Beat and dominance relations between prospective votes, and the
//! local-dominance improvement step sets built from them.
//!
//! A prospective vote beats another if some believed score tuple makes its
//! outcome strictly preferred; it dominates if it beats and is not beaten
//! back. Votes compared here always differ on a single issue, so the product
//! structure of the uncertainty set factors the search: achievable winner
//! pairs on the changed issue, possible winners everywhere else. The joint
//! preference always goes through the full ranking, never per-issue
//! shortcuts, so interdependent preferences are honored exactly.

use std::borrow::Cow;

use crate::domain::{
    outcome_with_vote, product_scan, Alternative, IssueDomain, Ranking, ScoreTuple, VoteProfile,
};
use crate::error::{Error, Result};
use crate::uncertainty::{
    build_uncertainty_set, pair_feasible, winners_in_box, GameRule, UncertaintySet,
    UncertaintySpec,
};

/// Achievable `(winner with x's ballot, winner with y's ballot)` pairs over
/// one issue's interval box. Enumerates the box when it is smaller than the
/// candidate-pair count, otherwise tests each pair by extreme analysis; the
/// two paths agree (oracle tested).
pub fn issue_outcome_pairs(
    intervals: &[(i64, i64)],
    rule_x: GameRule,
    rule_y: GameRule,
) -> Vec<(usize, usize)> {
    let n = intervals.len();
    let product: u128 = intervals
        .iter()
        .fold(1u128, |acc, &(lo, hi)| acc.saturating_mul((hi - lo + 1) as u128));
    let mut seen = vec![false; n * n];
    if product <= (4 * n * n) as u128 {
        let sizes: Vec<usize> = intervals
            .iter()
            .map(|&(lo, hi)| (hi - lo + 1) as usize)
            .collect();
        let mut v = vec![0i64; n];
        product_scan(&sizes, |offsets| {
            for ((slot, &(lo, _)), &o) in v.iter_mut().zip(intervals).zip(offsets) {
                *slot = lo + o as i64;
            }
            seen[rule_x.winner(&v) * n + rule_y.winner(&v)] = true;
            false
        });
    } else {
        for g in 0..n {
            for h in 0..n {
                if pair_feasible(intervals, rule_x, rule_y, g, h) {
                    seen[g * n + h] = true;
                }
            }
        }
    }
    (0..n * n)
        .filter(|&i| seen[i])
        .map(|i| (i / n, i % n))
        .collect()
}

/// Everything needed to evaluate one agent's prospective votes on one issue:
/// the base scores with the agent's influence handled per model, the
/// uncertainty set around them, and the agent's ranking.
///
/// Hot loops build the scores and set once per agent and lend them to one
/// context per issue.
#[derive(Clone, Debug)]
pub struct StepContext<'a> {
    domain: &'a IssueDomain,
    ranking: &'a Ranking,
    base: Cow<'a, ScoreTuple>,
    current: Alternative,
    issue: usize,
    set: Cow<'a, UncertaintySet>,
    override_ties: bool,
    /// Mixed-radix index weights, issue 0 most significant.
    weights: Vec<usize>,
}

fn index_weights(domain: &IssueDomain) -> Vec<usize> {
    let p = domain.num_issues();
    let mut weights = vec![1usize; p];
    for k in (0..p - 1).rev() {
        weights[k] = weights[k + 1] * domain.size(k + 1);
    }
    weights
}

impl<'a> StepContext<'a> {
    /// Atomic model: scores with agent `j` removed, one-ballot bonus games.
    pub fn atomic(
        domain: &'a IssueDomain,
        ranking: &'a Ranking,
        votes: &VoteProfile,
        agent: usize,
        issue: usize,
        spec: &UncertaintySpec,
    ) -> Self {
        let adjusted = ScoreTuple::adjusted(votes, domain, agent);
        Self::from_adjusted(domain, ranking, adjusted, votes.vote(agent).clone(), issue, spec)
    }

    /// Atomic model around an explicit adjusted tuple (per-issue sums need
    /// not be equal; hypothetical tuples are fine).
    pub fn from_adjusted(
        domain: &'a IssueDomain,
        ranking: &'a Ranking,
        adjusted: ScoreTuple,
        current: Alternative,
        issue: usize,
        spec: &UncertaintySpec,
    ) -> Self {
        let set = build_uncertainty_set(&adjusted, spec);
        Self {
            domain,
            ranking,
            base: Cow::Owned(adjusted),
            current,
            issue,
            set: Cow::Owned(set),
            override_ties: false,
            weights: index_weights(domain),
        }
    }

    /// Nonatomic model: scores kept whole (negligible own influence), ties
    /// decided by the agent's ballot.
    pub fn with_tie_override(
        domain: &'a IssueDomain,
        ranking: &'a Ranking,
        full_scores: ScoreTuple,
        current: Alternative,
        issue: usize,
        spec: &UncertaintySpec,
    ) -> Self {
        let set = build_uncertainty_set(&full_scores, spec);
        Self {
            domain,
            ranking,
            base: Cow::Owned(full_scores),
            current,
            issue,
            set: Cow::Owned(set),
            override_ties: true,
            weights: index_weights(domain),
        }
    }

    /// Borrowing constructor for schedulers that reuse one agent's scores
    /// and set across issues. `set` must be the uncertainty set of `base`
    /// under the agent's radii.
    pub(crate) fn from_cached(
        domain: &'a IssueDomain,
        ranking: &'a Ranking,
        base: &'a ScoreTuple,
        set: &'a UncertaintySet,
        current: Alternative,
        issue: usize,
        override_ties: bool,
    ) -> Self {
        Self {
            domain,
            ranking,
            base: Cow::Borrowed(base),
            current,
            issue,
            set: Cow::Borrowed(set),
            override_ties,
            weights: index_weights(domain),
        }
    }

    pub fn issue(&self) -> usize {
        self.issue
    }

    pub fn current_vote(&self) -> &Alternative {
        &self.current
    }

    pub fn uncertainty_set(&self) -> &UncertaintySet {
        &self.set
    }

    pub fn base_scores(&self) -> &ScoreTuple {
        &self.base
    }

    fn rule(&self, voted: usize) -> GameRule {
        if self.override_ties {
            GameRule::Override { voted }
        } else {
            GameRule::Bonus { voted }
        }
    }

    /// All votes differing from the current one exactly on this issue.
    pub fn switches(&self) -> Vec<Alternative> {
        (0..self.domain.size(self.issue))
            .filter(|&c| c != self.current.get(self.issue))
            .map(|c| self.current.with_candidate(self.issue, c))
            .collect()
    }

    /// Both beat directions at once: `(x beats y, y beats x)`.
    ///
    /// The off-issue possible-winner sets and the achievable issue winner
    /// pairs are identical for the two directions (the reverse direction
    /// reads the pairs transposed), so one context scan answers both.
    fn beat_directions(&self, x: &Alternative, y: &Alternative) -> (bool, bool) {
        assert!(
            x.candidates()
                .iter()
                .zip(y.candidates())
                .enumerate()
                .all(|(k, (a, b))| k == self.issue || a == b),
            "prospective votes may differ only on issue {}",
            self.issue
        );
        if x == y {
            return (false, false);
        }
        let p = self.domain.num_issues();
        // winners achievable on every unchanged issue (same ballot in both games)
        let ctx_winners: Vec<Vec<usize>> = (0..p)
            .filter(|&k| k != self.issue)
            .map(|k| winners_in_box(self.set.issue(k), self.rule(x.get(k))))
            .collect();
        let pairs: Vec<(usize, usize)> = issue_outcome_pairs(
            self.set.issue(self.issue),
            self.rule(x.get(self.issue)),
            self.rule(y.get(self.issue)),
        )
        .into_iter()
        .filter(|&(g, h)| g != h)
        .collect();
        if pairs.is_empty() {
            return (false, false);
        }
        let weights = &self.weights;
        let ctx_sizes: Vec<usize> = ctx_winners.iter().map(|w| w.len()).collect();
        let mut forward = false;
        let mut backward = false;
        product_scan(&ctx_sizes, |offsets| {
            let mut base_index = 0usize;
            let mut slot = 0usize;
            for (k, &weight) in weights.iter().enumerate() {
                if k == self.issue {
                    continue;
                }
                base_index += ctx_winners[slot][offsets[slot]] * weight;
                slot += 1;
            }
            for &(g, h) in &pairs {
                let gi = base_index + g * weights[self.issue];
                let hi = base_index + h * weights[self.issue];
                if self.ranking.prefers_index(gi, hi) {
                    forward = true;
                } else {
                    backward = true; // strict order: not preferred means dispreferred
                }
                if forward && backward {
                    return true;
                }
            }
            false
        });
        (forward, backward)
    }

    /// True iff some tuple in the uncertainty set makes `x`'s outcome
    /// strictly preferred to `y`'s. `x` and `y` must differ at most on this
    /// context's issue.
    pub fn beats(&self, x: &Alternative, y: &Alternative) -> bool {
        self.beat_directions(x, y).0
    }

    /// `x` beats `y` and `y` does not beat `x`.
    pub fn dominates(&self, x: &Alternative, y: &Alternative) -> bool {
        let (forward, backward) = self.beat_directions(x, y);
        forward && !backward
    }

    /// The local-dominance step set: switches on this issue that dominate the
    /// current vote and are not themselves dominated by another switch.
    /// Sorted by replacement candidate; empty means no step.
    pub fn improvement_targets(&self) -> Vec<Alternative> {
        let switches = self.switches();
        let dominating: Vec<&Alternative> = switches
            .iter()
            .filter(|s| self.dominates(s, &self.current))
            .collect();
        dominating
            .iter()
            .filter(|s| {
                !switches
                    .iter()
                    .any(|t| t != **s && self.dominates(t, s))
            })
            .map(|s| (*s).clone())
            .collect()
    }

    /// Best response on this issue with exact knowledge of the base scores:
    /// the switch reaching the most preferred outcome, keeping the current
    /// vote when it already achieves that outcome, smallest candidate index
    /// among otherwise tied switches.
    pub fn best_response(&self) -> Alternative {
        debug_assert!(!self.override_ties);
        let mut best = self.current.clone();
        let mut best_rank = self
            .ranking
            .rank_of(self.domain, &outcome_with_vote(&self.base, &self.current));
        // ascending candidate order: the first switch reaching a strictly
        // better outcome is the smallest-index one
        for c in 0..self.domain.size(self.issue) {
            if c == self.current.get(self.issue) {
                continue;
            }
            let vote = self.current.with_candidate(self.issue, c);
            let rank = self
                .ranking
                .rank_of(self.domain, &outcome_with_vote(&self.base, &vote));
            if rank < best_rank {
                best = vote;
                best_rank = rank;
            }
        }
        best
    }
}

/// Step sets under nested uncertainty: `tighter` raises radii off the
/// changed issue (fewer steps), `looser` raises the radius on it (more
/// steps).
#[derive(Clone, Debug)]
pub struct ContainmentReport {
    pub tighter_steps: Vec<Alternative>,
    pub base_steps: Vec<Alternative>,
    pub looser_steps: Vec<Alternative>,
}

impl ContainmentReport {
    pub fn lower_holds(&self) -> bool {
        is_subset(&self.tighter_steps, &self.base_steps)
    }

    pub fn upper_holds(&self) -> bool {
        is_subset(&self.base_steps, &self.looser_steps)
    }
}

fn is_subset(a: &[Alternative], b: &[Alternative]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// Compute the three step sets for `agent` changing `issue` under the base
/// radii, radii raised off-issue, and radii raised on-issue, and report the
/// containment verdicts. Binary issues only (the nesting can fail otherwise).
#[allow(clippy::too_many_arguments)]
pub fn check_step_containment(
    domain: &IssueDomain,
    ranking: &Ranking,
    votes: &VoteProfile,
    agent: usize,
    issue: usize,
    base: &UncertaintySpec,
    off_issue: &UncertaintySpec,
    on_issue: &UncertaintySpec,
) -> Result<ContainmentReport> {
    if !domain.is_binary() {
        return Err(Error::Unsupported(
            "step-set containment is only defined for binary issues".into(),
        ));
    }
    if off_issue.metric != base.metric || on_issue.metric != base.metric {
        return Err(Error::InvalidSpec("containment contexts must share a metric".into()));
    }
    for (k, ((b, off), on)) in base
        .radii
        .iter()
        .zip(&off_issue.radii)
        .zip(&on_issue.radii)
        .enumerate()
    {
        if k == issue {
            if off != b || on < b {
                return Err(Error::InvalidSpec(
                    "off-issue context must keep the changed issue's radius; on-issue context may only raise it"
                        .into(),
                ));
            }
        } else if off < b || on != b {
            return Err(Error::InvalidSpec(
                "on-issue context must keep other radii; off-issue context may only raise them"
                    .into(),
            ));
        }
    }
    let steps = |spec: &UncertaintySpec| {
        StepContext::atomic(domain, ranking, votes, agent, issue, spec).improvement_targets()
    };
    Ok(ContainmentReport {
        tighter_steps: steps(off_issue),
        base_steps: steps(base),
        looser_steps: steps(on_issue),
    })
}
