//! Analytical oracle for the one-bit game: conditional chains, their
//! stationary laws, the `s`/`c` thresholds and the predicted absorbing pairs.

pub mod chain;
pub mod scenario;
pub mod thresholds;

pub use chain::{
    asymptotic_action, include_mass, stationary, ta1_chain, ta2_chain, AsymptoticAction, BirthDeathChain,
    StationaryDist,
};
pub use scenario::{scenario_profile, MoveProbs, ScenarioProfile};
pub use thresholds::{
    c_thresholds, predict_regions, thresholds, CThresholds, RegionPrediction, ThresholdSet, BOUNDARY_TOLERANCE,
};
