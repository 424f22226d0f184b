//! Shared brute-force oracle for integration tests: winners, beat relations,
//! and step sets derived by enumerating the full product of an uncertainty
//! set. Independent of the library's factored evaluation paths.

// each test target compiles this module separately and uses a subset
#![allow(dead_code)]

use ivsim_core::{Alternative, IssueDomain, Ranking, UncertaintySet};

/// Lexicographic argmax, written independently of the library.
pub fn lex_winner(scores: &[i64]) -> usize {
    let mut best = 0;
    for (c, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = c;
        }
    }
    best
}

/// Issue winner given one ballot: either the +1 bonus game or the
/// tie-override game.
pub fn game_winner(scores: &[i64], voted: usize, override_ties: bool) -> usize {
    if override_ties {
        let best = lex_winner(scores);
        if scores[voted] == scores[best] {
            voted
        } else {
            best
        }
    } else {
        let mut v = scores.to_vec();
        v[voted] += 1;
        lex_winner(&v)
    }
}

/// Every integer point of an interval box.
pub fn box_tuples(intervals: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in intervals {
        let mut next = Vec::new();
        for prefix in &out {
            for v in lo..=hi {
                let mut row = prefix.clone();
                row.push(v);
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// Full-product beat test: exists a believed tuple where `x`'s outcome is
/// strictly preferred to `y`'s.
pub fn brute_beats(
    domain: &IssueDomain,
    ranking: &Ranking,
    set: &UncertaintySet,
    x: &Alternative,
    y: &Alternative,
    override_ties: bool,
) -> bool {
    if x == y {
        return false;
    }
    let per_issue: Vec<Vec<Vec<i64>>> = (0..set.num_issues())
        .map(|i| box_tuples(set.issue(i)))
        .collect();
    let mut idx = vec![0usize; per_issue.len()];
    loop {
        let ox = Alternative::new(
            per_issue
                .iter()
                .zip(&idx)
                .zip(x.candidates())
                .map(|((tuples, &t), &c)| game_winner(&tuples[t], c, override_ties))
                .collect(),
        );
        let oy = Alternative::new(
            per_issue
                .iter()
                .zip(&idx)
                .zip(y.candidates())
                .map(|((tuples, &t), &c)| game_winner(&tuples[t], c, override_ties))
                .collect(),
        );
        if ranking.rank_of(domain, &ox) < ranking.rank_of(domain, &oy) {
            return true;
        }
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return false;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < per_issue[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

pub fn brute_dominates(
    domain: &IssueDomain,
    ranking: &Ranking,
    set: &UncertaintySet,
    x: &Alternative,
    y: &Alternative,
    override_ties: bool,
) -> bool {
    brute_beats(domain, ranking, set, x, y, override_ties)
        && !brute_beats(domain, ranking, set, y, x, override_ties)
}

pub fn brute_step_set(
    domain: &IssueDomain,
    ranking: &Ranking,
    set: &UncertaintySet,
    current: &Alternative,
    issue: usize,
    override_ties: bool,
) -> Vec<Alternative> {
    let switches: Vec<Alternative> = (0..domain.size(issue))
        .filter(|&c| c != current.get(issue))
        .map(|c| current.with_candidate(issue, c))
        .collect();
    switches
        .iter()
        .filter(|s| brute_dominates(domain, ranking, set, s, current, override_ties))
        .filter(|s| {
            !switches
                .iter()
                .any(|t| t != *s && brute_dominates(domain, ranking, set, t, s, override_ties))
        })
        .cloned()
        .collect()
}
