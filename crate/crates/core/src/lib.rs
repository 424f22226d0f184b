//! Iterative plurality voting over multiple issues under strict uncertainty.
//!
//! Agents hold full rankings over the joint candidate space of `p` issues and
//! repeatedly revise their per-issue votes, either by best response (exact
//! knowledge of the scores) or by local-dominance improvement steps over a
//! candidate-wise distance-based uncertainty set. The crate provides:
//!
//! * the voting domain: rankings, vote profiles, score tuples, the
//!   simultaneous plurality rule with lexicographic tie-breaking, and
//!   separability / order-legality tests ([`domain`]);
//! * per-candidate uncertainty intervals, product uncertainty sets, and
//!   possible/potential winner sets ([`uncertainty`]);
//! * beat/dominance tests between prospective votes and local-dominance step
//!   enumeration ([`dominance`]);
//! * schedulers, improvement dynamics, equilibrium and cycle detection
//!   ([`dynamics`]);
//! * the nonatomic variant with epsilon-mass agent types and tie override
//!   ([`nonatomic`]);
//! * preference samplers, Borda welfare, and the seeded grid experiment
//!   harness with CSV output ([`experiments`]);
//! * bundled golden scenarios replaying the reference examples end to end
//!   ([`fixtures`]).

pub mod domain;
pub mod dominance;
pub mod dynamics;
mod error;
pub mod experiments;
pub mod fixtures;
pub mod io;
pub mod nonatomic;
pub mod uncertainty;

pub use domain::{
    induced_local_preference, is_o_legal, is_separable, outcome_with_vote, plurality_outcome,
    Alternative, IssueDomain, IssueOrder, PreferenceProfile, Ranking, ScoreTuple, VoteProfile,
};
pub use dominance::{check_step_containment, ContainmentReport, StepContext};
pub use dynamics::{
    audit_trace, enumerate_steps, DynamicsConfig, DynamicsKind, RunResult, SchedulerPolicy,
    StepRecord, Terminal, UncertaintyMode, DEFAULT_ROUND_CAP,
};
pub use error::{Error, Result};
pub use experiments::{
    borda_welfare, conditional_lex_ranking, run_experiment, sample_impartial_culture,
    sample_o_legal, write_aggregate_csv, write_raw_csv, CellResult, ExperimentGrid,
    ExperimentOutput, ProfileRow,
};
pub use nonatomic::{
    MassProfile, NonatomicConfig, NonatomicScheduler, NonatomicStep, NonatomicUncertainty, TypeSet,
};
pub use uncertainty::{
    build_uncertainty_set, candidate_interval, possible_issue_outcomes, potential_winners,
    real_potential_winners, DistanceMetric, GameRule, Radius, UncertaintySet, UncertaintySpec,
};
