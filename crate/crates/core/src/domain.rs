//! Issues, alternatives, rankings, vote profiles, score tuples, and the
//! simultaneous plurality rule with per-issue lexicographic tie-breaking.
//!
//! Candidates on each issue are indexed `0..size`; letter labels used in
//! discussions of the bundled fixtures map as a,b,c,d (or A,B,C,D) = 0,1,2,3.
//! All types are immutable values, safe to share across threads.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Largest joint-alternative count for which full rankings are supported.
pub const MAX_ALTERNATIVES: usize = 1 << 22;

/// The multi-issue candidate space: one candidate set of size `>= 2` per issue.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IssueDomain {
    sizes: Vec<usize>,
}

impl IssueDomain {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidDomain("need at least one issue".into()));
        }
        if let Some(&bad) = sizes.iter().find(|&&k| k < 2) {
            return Err(Error::InvalidDomain(format!(
                "every issue needs at least 2 candidates, got {bad}"
            )));
        }
        let mut total: usize = 1;
        for &k in &sizes {
            total = total
                .checked_mul(k)
                .filter(|&t| t <= MAX_ALTERNATIVES)
                .ok_or_else(|| {
                    Error::InvalidDomain(format!(
                        "joint alternative count exceeds supported maximum {MAX_ALTERNATIVES}"
                    ))
                })?;
        }
        Ok(Self { sizes })
    }

    /// `p` binary issues.
    pub fn binary(p: usize) -> Result<Self> {
        Self::new(vec![2; p])
    }

    pub fn num_issues(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, issue: usize) -> usize {
        self.sizes[issue]
    }

    pub fn is_binary(&self) -> bool {
        self.sizes.iter().all(|&k| k == 2)
    }

    /// Total number of joint alternatives; guarded against overflow in `new`.
    pub fn num_alternatives(&self) -> usize {
        self.sizes.iter().product()
    }

    /// Mixed-radix index of an alternative, issue 0 most significant.
    /// Bijective with `0..num_alternatives()`; purely internal encoding,
    /// never used for tie-breaking.
    pub fn alternative_index(&self, alt: &Alternative) -> usize {
        debug_assert_eq!(alt.num_issues(), self.num_issues());
        let mut idx = 0;
        for (c, &k) in alt.candidates().iter().zip(&self.sizes) {
            debug_assert!(*c < k);
            idx = idx * k + c;
        }
        idx
    }

    /// Inverse of [`alternative_index`](Self::alternative_index).
    pub fn alternative_at(&self, mut index: usize) -> Alternative {
        debug_assert!(index < self.num_alternatives());
        let mut cands = vec![0; self.num_issues()];
        for (slot, &k) in cands.iter_mut().zip(&self.sizes).rev() {
            *slot = index % k;
            index /= k;
        }
        Alternative::new(cands)
    }

    pub fn alternatives(&self) -> impl Iterator<Item = Alternative> + '_ {
        (0..self.num_alternatives()).map(|i| self.alternative_at(i))
    }

    pub fn validate_alternative(&self, alt: &Alternative) -> Result<()> {
        if alt.num_issues() != self.num_issues() {
            return Err(Error::InvalidProfile(format!(
                "vote has {} issues, domain has {}",
                alt.num_issues(),
                self.num_issues()
            )));
        }
        for (i, (&c, &k)) in alt.candidates().iter().zip(&self.sizes).enumerate() {
            if c >= k {
                return Err(Error::InvalidProfile(format!(
                    "candidate {c} out of range on issue {i} (size {k})"
                )));
            }
        }
        Ok(())
    }
}

/// One candidate per issue; both a vote and an election outcome.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Alternative(Vec<usize>);

impl Alternative {
    pub fn new(candidates: Vec<usize>) -> Self {
        Self(candidates)
    }

    pub fn candidates(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, issue: usize) -> usize {
        self.0[issue]
    }

    pub fn num_issues(&self) -> usize {
        self.0.len()
    }

    /// Copy with the candidate on one issue replaced.
    pub fn with_candidate(&self, issue: usize, candidate: usize) -> Self {
        let mut v = self.0.clone();
        v[issue] = candidate;
        Self(v)
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A strict linear order over all joint alternatives, most preferred first,
/// stored with its inverse for O(1) rank lookups.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ranking {
    order: Vec<usize>,
    rank_of: Vec<usize>,
}

impl Ranking {
    /// Build from alternative indices listed most preferred first.
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if n == 0 {
            return Err(Error::InvalidRanking("empty ranking".into()));
        }
        let mut rank_of = vec![usize::MAX; n];
        for (rank, &alt) in order.iter().enumerate() {
            if alt >= n {
                return Err(Error::InvalidRanking(format!(
                    "alternative index {alt} out of range 0..{n}"
                )));
            }
            if rank_of[alt] != usize::MAX {
                return Err(Error::InvalidRanking(format!(
                    "alternative index {alt} listed twice"
                )));
            }
            rank_of[alt] = rank;
        }
        Ok(Self { order, rank_of })
    }

    /// Build from alternatives listed most preferred first.
    pub fn from_alternatives(domain: &IssueDomain, alts: &[Alternative]) -> Result<Self> {
        if alts.len() != domain.num_alternatives() {
            return Err(Error::InvalidRanking(format!(
                "ranking lists {} alternatives, domain has {}",
                alts.len(),
                domain.num_alternatives()
            )));
        }
        for a in alts {
            domain.validate_alternative(a)?;
        }
        Self::from_order(alts.iter().map(|a| domain.alternative_index(a)).collect())
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Alternative indices, most preferred first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// 0-based position of an alternative index; 0 is most preferred.
    pub fn rank_of_index(&self, alt_index: usize) -> usize {
        self.rank_of[alt_index]
    }

    pub fn rank_of(&self, domain: &IssueDomain, alt: &Alternative) -> usize {
        self.rank_of[domain.alternative_index(alt)]
    }

    /// True iff `a` is strictly preferred to `b`.
    pub fn prefers_index(&self, a: usize, b: usize) -> bool {
        self.rank_of[a] < self.rank_of[b]
    }

    /// Most preferred alternative (the truthful vote).
    pub fn top(&self, domain: &IssueDomain) -> Alternative {
        domain.alternative_at(self.order[0])
    }
}

/// A domain together with every agent's ranking.
#[derive(Clone, Debug)]
pub struct PreferenceProfile {
    domain: IssueDomain,
    rankings: Vec<Ranking>,
}

impl PreferenceProfile {
    pub fn new(domain: IssueDomain, rankings: Vec<Ranking>) -> Result<Self> {
        if rankings.is_empty() {
            return Err(Error::InvalidProfile("need at least one agent".into()));
        }
        let want = domain.num_alternatives();
        for (j, r) in rankings.iter().enumerate() {
            if r.len() != want {
                return Err(Error::InvalidProfile(format!(
                    "agent {j} ranks {} alternatives, domain has {want}",
                    r.len()
                )));
            }
        }
        Ok(Self { domain, rankings })
    }

    pub fn domain(&self) -> &IssueDomain {
        &self.domain
    }

    pub fn num_agents(&self) -> usize {
        self.rankings.len()
    }

    pub fn ranking(&self, agent: usize) -> &Ranking {
        &self.rankings[agent]
    }

    pub fn rankings(&self) -> &[Ranking] {
        &self.rankings
    }

    /// Every agent's most preferred alternative.
    pub fn truthful_votes(&self) -> VoteProfile {
        VoteProfile::new(
            self.rankings
                .iter()
                .map(|r| r.top(&self.domain))
                .collect::<Vec<_>>(),
        )
    }
}

/// The reported votes, one alternative per agent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VoteProfile {
    votes: Vec<Alternative>,
}

impl VoteProfile {
    pub fn new(votes: Vec<Alternative>) -> Self {
        Self { votes }
    }

    pub fn validated(votes: Vec<Alternative>, domain: &IssueDomain) -> Result<Self> {
        for v in &votes {
            domain.validate_alternative(v)?;
        }
        Ok(Self { votes })
    }

    pub fn num_agents(&self) -> usize {
        self.votes.len()
    }

    pub fn vote(&self, agent: usize) -> &Alternative {
        &self.votes[agent]
    }

    pub fn votes(&self) -> &[Alternative] {
        &self.votes
    }

    pub fn set_vote(&mut self, agent: usize, vote: Alternative) {
        self.votes[agent] = vote;
    }
}

/// Per-issue vectors of candidate scores.
///
/// Tuples derived from a [`VoteProfile`] have equal per-issue sums, but
/// ad-hoc tuples (analysis around hypothetical scores) are accepted as-is.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScoreTuple {
    scores: Vec<Vec<i64>>,
}

impl ScoreTuple {
    pub fn new(scores: Vec<Vec<i64>>) -> Self {
        debug_assert!(scores.iter().all(|v| v.iter().all(|&s| s >= 0)));
        Self { scores }
    }

    pub fn zeros(domain: &IssueDomain) -> Self {
        Self {
            scores: domain.sizes().iter().map(|&k| vec![0; k]).collect(),
        }
    }

    /// Count every agent's vote per issue.
    pub fn from_votes(profile: &VoteProfile, domain: &IssueDomain) -> Self {
        let mut t = Self::zeros(domain);
        for v in profile.votes() {
            for (i, &c) in v.candidates().iter().enumerate() {
                t.scores[i][c] += 1;
            }
        }
        t
    }

    /// Score tuple with agent `j`'s vote removed.
    pub fn adjusted(profile: &VoteProfile, domain: &IssueDomain, agent: usize) -> Self {
        let mut t = Self::from_votes(profile, domain);
        t.remove_vote(profile.vote(agent));
        t
    }

    pub fn num_issues(&self) -> usize {
        self.scores.len()
    }

    pub fn issue(&self, i: usize) -> &[i64] {
        &self.scores[i]
    }

    pub fn issues(&self) -> &[Vec<i64>] {
        &self.scores
    }

    pub fn add_vote(&mut self, vote: &Alternative) {
        for (i, &c) in vote.candidates().iter().enumerate() {
            self.scores[i][c] += 1;
        }
    }

    pub fn remove_vote(&mut self, vote: &Alternative) {
        for (i, &c) in vote.candidates().iter().enumerate() {
            self.scores[i][c] -= 1;
            debug_assert!(self.scores[i][c] >= 0);
        }
    }
}

/// Winner of one issue: maximal score, ties to the smallest candidate index.
pub(crate) fn issue_winner(scores: &[i64]) -> usize {
    let mut best = 0;
    for (c, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = c;
        }
    }
    best
}

/// Simultaneous plurality: per-issue maximal score, ties broken
/// lexicographically by candidate index, independently across issues.
pub fn plurality_outcome(s: &ScoreTuple) -> Alternative {
    Alternative::new(s.issues().iter().map(|v| issue_winner(v)).collect())
}

/// Outcome after adding one vote to an adjusted score tuple.
pub fn outcome_with_vote(s_without: &ScoreTuple, vote: &Alternative) -> Alternative {
    let mut t = s_without.clone();
    t.add_vote(vote);
    plurality_outcome(&t)
}

/// A permutation of the issues, earliest first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IssueOrder(Vec<usize>);

impl IssueOrder {
    pub fn new(order: Vec<usize>, domain: &IssueDomain) -> Result<Self> {
        let p = domain.num_issues();
        if order.len() != p {
            return Err(Error::InvalidDomain(format!(
                "issue order lists {} issues, domain has {p}",
                order.len()
            )));
        }
        let mut seen = vec![false; p];
        for &i in &order {
            if i >= p || seen[i] {
                return Err(Error::InvalidDomain(format!("invalid issue order entry {i}")));
            }
            seen[i] = true;
        }
        Ok(Self(order))
    }

    /// The identity order 0..p.
    pub fn identity(domain: &IssueDomain) -> Self {
        Self((0..domain.num_issues()).collect())
    }

    pub fn issues(&self) -> &[usize] {
        &self.0
    }
}

/// Visit every assignment of `0..sizes[i]` values, in mixed-radix order,
/// until the visitor returns `true`; returns whether it ever did.
pub(crate) fn product_scan(sizes: &[usize], mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    let mut cur = vec![0usize; sizes.len()];
    loop {
        if visit(&cur) {
            return true;
        }
        let mut pos = sizes.len();
        loop {
            if pos == 0 {
                return false;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < sizes[pos] {
                break;
            }
            cur[pos] = 0;
        }
    }
}

/// The ordering over issue `i`'s candidates induced by ranking the joint
/// alternatives that agree with `context` everywhere else. Best first.
/// `context.get(issue)` is ignored.
pub fn induced_local_preference(
    ranking: &Ranking,
    domain: &IssueDomain,
    issue: usize,
    context: &Alternative,
) -> Vec<usize> {
    let mut cands: Vec<usize> = (0..domain.size(issue)).collect();
    cands.sort_by_key(|&c| ranking.rank_of(domain, &context.with_candidate(issue, c)));
    cands
}

/// True iff for every issue position in `order`, the induced local preference
/// depends only on the candidates fixed for issues earlier in `order`.
pub fn is_o_legal(ranking: &Ranking, domain: &IssueDomain, order: &IssueOrder) -> bool {
    let p = domain.num_issues();
    for pos in 0..p {
        let issue = order.issues()[pos];
        let earlier = &order.issues()[..pos];
        let later = &order.issues()[pos + 1..];
        let earlier_sizes: Vec<usize> = earlier.iter().map(|&i| domain.size(i)).collect();
        let later_sizes: Vec<usize> = later.iter().map(|&i| domain.size(i)).collect();
        let violated = product_scan(&earlier_sizes, |e_ctx| {
            let mut ctx = vec![0usize; p];
            for (&i, &c) in earlier.iter().zip(e_ctx) {
                ctx[i] = c;
            }
            let mut reference: Option<Vec<usize>> = None;
            product_scan(&later_sizes, |l_ctx| {
                for (&i, &c) in later.iter().zip(l_ctx) {
                    ctx[i] = c;
                }
                let local = induced_local_preference(
                    ranking,
                    domain,
                    issue,
                    &Alternative::new(ctx.clone()),
                );
                match &reference {
                    None => {
                        reference = Some(local);
                        false
                    }
                    Some(r) => local != *r,
                }
            })
        });
        if violated {
            return false;
        }
    }
    true
}

/// True iff every issue's induced local preference is identical across all
/// contexts; equivalent to being O-legal for every issue order.
pub fn is_separable(ranking: &Ranking, domain: &IssueDomain) -> bool {
    let p = domain.num_issues();
    for issue in 0..p {
        let other_sizes: Vec<usize> = (0..p)
            .map(|i| if i == issue { 1 } else { domain.size(i) })
            .collect();
        let mut reference: Option<Vec<usize>> = None;
        let violated = product_scan(&other_sizes, |ctx| {
            let local =
                induced_local_preference(ranking, domain, issue, &Alternative::new(ctx.to_vec()));
            match &reference {
                None => {
                    reference = Some(local);
                    false
                }
                Some(r) => local != *r,
            }
        });
        if violated {
            return false;
        }
    }
    true
}
