//! Simulation and analysis of the single-clause Tsetlin Machine on the one-bit
//! IDENTITY / NOT problem.
//!
//! * [`automaton`]: the two-action Tsetlin Automaton.
//! * [`engine`]: clause semantics, Type I / II feedback and the training step.
//! * [`env`]: seeded one-bit sample generators.
//! * [`theory`]: conditional Markov chains, thresholds and region predictions.
//! * [`lab`]: Monte Carlo trials, experiment reports and sweeps.

pub mod automaton;
pub mod engine;
pub mod env;
mod error;
pub(crate) mod float;
pub mod lab;
mod pair;
pub mod rng;
pub mod theory;

pub use automaton::{action_of, apply_feedback, ActionKind, AutomatonState, FeedbackSignal};
pub use engine::{
    clause_eval, dnf_infer, init_team, train_step, type_i_probs, type_ii_probs, voting_infer, voting_score,
    Architecture, ClausePhase, ClauseTeam, FeedbackProbs, InputBits, LiteralRef, Sample, TMConfig, TsetlinMachine,
};
pub use env::OneBitEnv;
pub use error::{Error, Result};
pub use lab::{
    run_experiment, run_trial, sweep, transition_frequency_check, ExperimentReport, PairCounts, SweepAxis,
    TrialOutcome, TrialSpec, Verdict,
};
pub use pair::ActionPair;
pub use theory::{
    asymptotic_action, c_thresholds, predict_regions, scenario_profile, thresholds, ta1_chain, ta2_chain,
    AsymptoticAction, BirthDeathChain, CThresholds, RegionPrediction, StationaryDist, ThresholdSet,
};
