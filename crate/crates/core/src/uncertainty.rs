//! Candidate-wise distance uncertainty: per-candidate score intervals, the
//! product uncertainty set around an adjusted score tuple, and the possible /
//! potential winner sets it induces.
//!
//! Intervals clip below at zero and are deliberately not capped above; the
//! believed score space is whatever the distance bound allows. All bounds are
//! computed with exact rational arithmetic so membership tests are bit-exact.

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use crate::domain::{issue_winner, Alternative, ScoreTuple};
use crate::error::{Error, Result};

/// Candidate-wise distance measure between score vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMetric {
    /// Absolute difference per candidate.
    LInf,
    /// `max(v/s, s/v) - 1` per candidate; undefined at score 0 unless both
    /// scores are 0, so a zero score admits only the singleton {0}.
    Multiplicative,
}

impl fmt::Display for DistanceMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceMetric::LInf => write!(f, "linf"),
            DistanceMetric::Multiplicative => write!(f, "multiplicative"),
        }
    }
}

impl FromStr for DistanceMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linf" => Ok(DistanceMetric::LInf),
            "multiplicative" => Ok(DistanceMetric::Multiplicative),
            other => Err(Error::Parse(format!("unknown metric `{other}`"))),
        }
    }
}

/// A non-negative exact uncertainty radius.
///
/// Integer-valued for the absolute metric in all bundled scenarios; rational
/// values are accepted everywhere and compared exactly.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Radius(Rational64);

impl Radius {
    pub fn new(value: Rational64) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::InvalidSpec(format!("negative radius {value}")));
        }
        Ok(Self(value))
    }

    pub fn integer(value: i64) -> Result<Self> {
        Self::new(Rational64::from_integer(value))
    }

    pub const fn zero() -> Self {
        Self(Rational64::new_raw(0, 1))
    }

    pub fn value(&self) -> Rational64 {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_integer(&self) -> Option<i64> {
        self.0.is_integer().then(|| self.0.to_integer())
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.to_integer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Radius {
    type Err = Error;

    /// Accepts `"3"` or `"1/2"`.
    fn from_str(s: &str) -> Result<Self> {
        let value = match s.split_once('/') {
            Some((num, den)) => {
                let n: i64 = num
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad radius `{s}`")))?;
                let d: i64 = den
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad radius `{s}`")))?;
                if d == 0 {
                    return Err(Error::Parse(format!("bad radius `{s}`")));
                }
                Rational64::new(n, d)
            }
            None => Rational64::from_integer(
                s.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad radius `{s}`")))?,
            ),
        };
        Radius::new(value)
    }
}

impl Serialize for Radius {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            ser.serialize_i64(self.0.to_integer())
        } else {
            ser.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Radius {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct RadiusVisitor;

        impl Visitor<'_> for RadiusVisitor {
            type Value = Radius;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a non-negative integer or a `num/den` string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Radius, E> {
                Radius::integer(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Radius, E> {
                let v = i64::try_from(v).map_err(E::custom)?;
                Radius::integer(v).map_err(E::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Radius, E> {
                v.parse().map_err(E::custom)
            }
        }

        de.deserialize_any(RadiusVisitor)
    }
}

/// A metric plus one radius per issue: the shape of one agent's uncertainty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UncertaintySpec {
    pub metric: DistanceMetric,
    pub radii: Vec<Radius>,
}

impl UncertaintySpec {
    pub fn new(metric: DistanceMetric, radii: Vec<Radius>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidSpec("need one radius per issue".into()));
        }
        Ok(Self { metric, radii })
    }

    /// One shared integer radius on every issue.
    pub fn uniform(metric: DistanceMetric, radius: i64, num_issues: usize) -> Result<Self> {
        Self::new(metric, vec![Radius::integer(radius)?; num_issues])
    }

    pub fn exact(num_issues: usize) -> Self {
        Self {
            metric: DistanceMetric::LInf,
            radii: vec![Radius::zero(); num_issues],
        }
    }

    pub fn num_issues(&self) -> usize {
        self.radii.len()
    }
}

fn ceil_i64(r: Rational64) -> i64 {
    r.ceil().to_integer()
}

fn floor_i64(r: Rational64) -> i64 {
    r.floor().to_integer()
}

/// The maximal integer interval of scores within `radius` of `score`.
///
/// Lower bounds clip at zero; a multiplicative radius around score 0 admits
/// only 0 itself.
pub fn candidate_interval(metric: DistanceMetric, score: i64, radius: Radius) -> (i64, i64) {
    debug_assert!(score >= 0);
    // integer radii stay out of rational arithmetic; this is the hot path
    if metric == DistanceMetric::LInf {
        if let Some(r) = radius.as_integer() {
            return ((score - r).max(0), score + r);
        }
    }
    let s = Rational64::from_integer(score);
    match metric {
        DistanceMetric::LInf => {
            let lo = ceil_i64(s - radius.value()).max(0);
            let hi = floor_i64(s + radius.value());
            (lo, hi)
        }
        DistanceMetric::Multiplicative => {
            if score == 0 {
                return (0, 0);
            }
            let factor = Rational64::from_integer(1) + radius.value();
            let lo = ceil_i64(s / factor).max(0);
            let hi = floor_i64(s * factor);
            (lo, hi)
        }
    }
}

/// Per-issue, per-candidate closed integer intervals; the represented set of
/// score tuples is the Cartesian product of all intervals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UncertaintySet {
    intervals: Vec<Vec<(i64, i64)>>,
}

impl UncertaintySet {
    pub fn new(intervals: Vec<Vec<(i64, i64)>>) -> Self {
        debug_assert!(intervals
            .iter()
            .all(|iv| iv.iter().all(|&(lo, hi)| 0 <= lo && lo <= hi)));
        Self { intervals }
    }

    pub fn num_issues(&self) -> usize {
        self.intervals.len()
    }

    pub fn issue(&self, i: usize) -> &[(i64, i64)] {
        &self.intervals[i]
    }

    pub fn issues(&self) -> &[Vec<(i64, i64)>] {
        &self.intervals
    }

    /// Membership test, linear in the total number of candidates.
    pub fn contains(&self, s: &ScoreTuple) -> bool {
        self.intervals.len() == s.num_issues()
            && self.intervals.iter().zip(s.issues()).all(|(iv, scores)| {
                iv.len() == scores.len()
                    && iv
                        .iter()
                        .zip(scores)
                        .all(|(&(lo, hi), &v)| lo <= v && v <= hi)
            })
    }

    /// Number of tuples in one issue's product, saturating at `u128::MAX`.
    pub fn issue_product_size(&self, issue: usize) -> u128 {
        self.intervals[issue]
            .iter()
            .fold(1u128, |acc, &(lo, hi)| {
                acc.saturating_mul((hi - lo + 1) as u128)
            })
    }

    /// Total product size across all issues, saturating.
    pub fn product_size(&self) -> u128 {
        (0..self.intervals.len()).fold(1u128, |acc, i| {
            acc.saturating_mul(self.issue_product_size(i))
        })
    }
}

/// Candidate-wise uncertainty set around an adjusted score tuple.
pub fn build_uncertainty_set(adjusted: &ScoreTuple, spec: &UncertaintySpec) -> UncertaintySet {
    debug_assert_eq!(adjusted.num_issues(), spec.num_issues());
    UncertaintySet::new(
        adjusted
            .issues()
            .iter()
            .zip(&spec.radii)
            .map(|(scores, &r)| {
                scores
                    .iter()
                    .map(|&s| candidate_interval(spec.metric, s, r))
                    .collect()
            })
            .collect(),
    )
}

/// How one extra ballot interacts with a believed score vector when a single
/// issue's winner is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GameRule {
    /// Atomic model: the vote adds one point to the chosen candidate, and
    /// ties break lexicographically.
    Bonus { voted: usize },
    /// Nonatomic model: the vote has negligible mass but decides ties among
    /// maximal candidates in its favor; other ties break lexicographically.
    Override { voted: usize },
}

impl GameRule {
    fn bonus(&self, candidate: usize) -> i64 {
        match *self {
            GameRule::Bonus { voted } => i64::from(candidate == voted),
            GameRule::Override { .. } => 0,
        }
    }

    /// 0 if `w` wins a score tie against `d`, 1 if it must strictly exceed.
    fn tie_penalty(&self, w: usize, d: usize) -> i64 {
        debug_assert_ne!(w, d);
        match *self {
            GameRule::Bonus { .. } => i64::from(w > d),
            GameRule::Override { voted } => {
                if w == voted {
                    0
                } else if d == voted {
                    1
                } else {
                    i64::from(w > d)
                }
            }
        }
    }

    /// Winner of one issue under this rule for a concrete score vector.
    pub fn winner(&self, scores: &[i64]) -> usize {
        match *self {
            GameRule::Bonus { voted } => {
                let mut best = 0;
                let mut best_val = scores[0] + i64::from(voted == 0);
                for (c, &s) in scores.iter().enumerate().skip(1) {
                    let val = s + i64::from(c == voted);
                    if val > best_val {
                        best = c;
                        best_val = val;
                    }
                }
                best
            }
            GameRule::Override { voted } => {
                let best = issue_winner(scores);
                if scores[voted] == scores[best] {
                    voted
                } else {
                    best
                }
            }
        }
    }

    /// Can `w` win somewhere in the interval box? Per-candidate extremes are
    /// exact because coordinates vary independently.
    pub fn can_win(&self, intervals: &[(i64, i64)], w: usize) -> bool {
        let hi_w = intervals[w].1 + self.bonus(w);
        intervals.iter().enumerate().all(|(d, &(lo_d, _))| {
            d == w || hi_w >= lo_d + self.bonus(d) + self.tie_penalty(w, d)
        })
    }
}

/// All candidates that can win issue `i` for some tuple in the box, under the
/// given game rule. O(|D_i|^2); equal to brute-force enumeration.
pub fn winners_in_box(intervals: &[(i64, i64)], rule: GameRule) -> Vec<usize> {
    (0..intervals.len())
        .filter(|&c| rule.can_win(intervals, c))
        .collect()
}

/// Candidates that can win issue `i` when the agent keeps voting `voted`.
pub fn possible_issue_outcomes(intervals: &[(i64, i64)], voted: usize) -> Vec<usize> {
    winners_in_box(intervals, GameRule::Bonus { voted })
}

/// Possible winners on one issue of an uncertainty set, given the vote cast.
pub fn possible_winners(set: &UncertaintySet, vote: &Alternative, issue: usize) -> Vec<usize> {
    possible_issue_outcomes(set.issue(issue), vote.get(issue))
}

/// Candidates the agent could make win issue `i` by some vote of their own:
/// the union over candidates `c` of "`c` wins when the agent votes `c`".
pub fn potential_winners(set: &UncertaintySet, issue: usize) -> Vec<usize> {
    let intervals = set.issue(issue);
    (0..intervals.len())
        .filter(|&c| GameRule::Bonus { voted: c }.can_win(intervals, c))
        .collect()
}

/// Potential winners at zero uncertainty: candidates `c` with
/// `f^i(adjusted + vote for c) = c`.
pub fn real_potential_winners(adjusted: &ScoreTuple, issue: usize) -> Vec<usize> {
    let scores = adjusted.issue(issue);
    (0..scores.len())
        .filter(|&c| GameRule::Bonus { voted: c }.winner(scores) == c)
        .collect()
}

/// Feasibility of a joint winner pair `(g, h)` for two one-ballot games over
/// the same interval box: game X casts `rule_x`'s vote, game Y `rule_y`'s.
///
/// With every third candidate pinned to its lower bound, the remaining system
/// is a two-variable difference constraint over `v_g`, `v_h`, solved exactly
/// on interval endpoints. Oracle-tested against full enumeration.
pub fn pair_feasible(
    intervals: &[(i64, i64)],
    rule_x: GameRule,
    rule_y: GameRule,
    g: usize,
    h: usize,
) -> bool {
    let n = intervals.len();
    if g == h {
        // one maximised variable, everything else at its minimum
        let ok_x = rule_x.can_win(intervals, g);
        let hi_g = intervals[g].1;
        let ok_y = (0..n).all(|d| {
            d == g
                || hi_g + rule_y.bonus(g)
                    >= intervals[d].0 + rule_y.bonus(d) + rule_y.tie_penalty(g, d)
        });
        return ok_x && ok_y;
    }
    let (lo_g, hi_g) = intervals[g];
    let (lo_h, hi_h) = intervals[h];
    let mut min_g = lo_g;
    let mut min_h = lo_h;
    for (d, &(lo_d, _)) in intervals.iter().enumerate() {
        if d == g || d == h {
            continue;
        }
        min_g = min_g.max(lo_d + rule_x.bonus(d) + rule_x.tie_penalty(g, d) - rule_x.bonus(g));
        min_h = min_h.max(lo_d + rule_y.bonus(d) + rule_y.tie_penalty(h, d) - rule_y.bonus(h));
    }
    if min_g > hi_g || min_h > hi_h {
        return false;
    }
    // game X: v_g - v_h >= alpha; game Y: v_g - v_h <= gamma
    let alpha = rule_x.bonus(h) + rule_x.tie_penalty(g, h) - rule_x.bonus(g);
    let gamma = -(rule_y.bonus(g) + rule_y.tie_penalty(h, g) - rule_y.bonus(h));
    let diff_lo = alpha.max(min_g - hi_h);
    let diff_hi = gamma.min(hi_g - min_h);
    diff_lo <= diff_hi
}
