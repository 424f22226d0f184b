//! File formats: preference-profile documents, scripted schedules, and the
//! line-delimited trace stream. Field names are part of the tool contract
//! and documented in docs/SCHEMAS.md.

use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::domain::{Alternative, IssueDomain, PreferenceProfile, Ranking, VoteProfile};
use crate::dynamics::{RunResult, ScriptedStep, StepRecord, Terminal};
use crate::error::{Error, Result};
use crate::uncertainty::Radius;

pub const TRACE_SCHEMA: &str = "ivsim-trace-v1";

/// One agent in a profile document: a ranking as alternative indices, most
/// preferred first.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AgentEntry {
    pub ranking: Vec<usize>,
}

/// A complete election description: per-issue candidate counts, one ranking
/// per agent, and optionally explicit initial votes (per-issue candidate
/// lists). Votes default to the truthful profile.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProfileDocument {
    pub sizes: Vec<usize>,
    pub agents: Vec<AgentEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub votes: Option<Vec<Vec<usize>>>,
}

impl ProfileDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    /// Validate and build the preference profile plus initial votes.
    pub fn build(&self) -> Result<(PreferenceProfile, VoteProfile)> {
        let domain = IssueDomain::new(self.sizes.clone())?;
        let rankings = self
            .agents
            .iter()
            .map(|a| Ranking::from_order(a.ranking.clone()))
            .collect::<Result<Vec<_>>>()?;
        let prefs = PreferenceProfile::new(domain.clone(), rankings)?;
        let votes = match &self.votes {
            None => prefs.truthful_votes(),
            Some(rows) => {
                if rows.len() != prefs.num_agents() {
                    return Err(Error::InvalidProfile(format!(
                        "{} votes for {} agents",
                        rows.len(),
                        prefs.num_agents()
                    )));
                }
                VoteProfile::validated(
                    rows.iter().map(|r| Alternative::new(r.clone())).collect(),
                    &domain,
                )?
            }
        };
        Ok((prefs, votes))
    }

    pub fn from_parts(prefs: &PreferenceProfile, votes: Option<&VoteProfile>) -> Self {
        Self {
            sizes: prefs.domain().sizes().to_vec(),
            agents: prefs
                .rankings()
                .iter()
                .map(|r| AgentEntry {
                    ranking: r.order().to_vec(),
                })
                .collect(),
            votes: votes.map(|v| {
                v.votes()
                    .iter()
                    .map(|a| a.candidates().to_vec())
                    .collect()
            }),
        }
    }
}

/// A scripted schedule: a JSON array of `{agent, issue, to}` steps.
pub fn parse_schedule(text: &str) -> Result<Vec<ScriptedStep>> {
    Ok(serde_json::from_str(text)?)
}

/// Config echo at the head of a trace stream.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceHeader {
    pub record: String,
    pub schema: String,
    pub dynamics: String,
    pub metric: String,
    pub radii: Vec<Radius>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alternating: Option<(Radius, Radius)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub cap: usize,
    pub agents: usize,
    pub sizes: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<String>,
}

impl TraceHeader {
    pub fn new(dynamics: String, metric: String, radii: Vec<Radius>, cap: usize, agents: usize, sizes: Vec<usize>) -> Self {
        Self {
            record: "header".into(),
            schema: TRACE_SCHEMA.into(),
            dynamics,
            metric,
            radii,
            alternating: None,
            seed: None,
            cap,
            agents,
            sizes,
            epsilon: None,
        }
    }
}

#[derive(Serialize)]
struct StepLine<'a> {
    record: &'static str,
    #[serde(flatten)]
    step: &'a StepRecord,
}

#[derive(Serialize)]
struct ResultLine<'a> {
    record: &'static str,
    terminal: &'a Terminal,
    rounds: usize,
    final_outcome: &'a Alternative,
}

/// Write one header line, one line per step, and a closing result line.
pub fn write_trace<W: Write>(mut out: W, header: &TraceHeader, result: &RunResult) -> Result<()> {
    serde_json::to_writer(&mut out, header)?;
    writeln!(out)?;
    for step in &result.trace {
        serde_json::to_writer(&mut out, &StepLine { record: "step", step })?;
        writeln!(out)?;
    }
    serde_json::to_writer(
        &mut out,
        &ResultLine {
            record: "result",
            terminal: &result.terminal,
            rounds: result.rounds,
            final_outcome: &result.final_outcome,
        },
    )?;
    writeln!(out)?;
    Ok(())
}
