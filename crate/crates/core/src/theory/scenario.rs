//! Per-configuration movement probabilities of both automata, aggregated over
//! the four sample types of an environment. This is the bridge between the
//! feedback tables (per sample) and the conditional chains (per peer action).

use serde::{Deserialize, Serialize};

use crate::automaton::{ActionKind, AutomatonState};
use crate::engine::{feedback_probs, ClausePhase, ClauseTeam, InputBits};
use crate::env::OneBitEnv;
use crate::error::{check_granularity, Result};
use crate::pair::ActionPair;

/// "Left" is towards the Include end of the state line.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MoveProbs {
    pub left: f64,
    pub right: f64,
    pub stay: f64,
}

impl MoveProbs {
    pub fn total(&self) -> f64 {
        self.left + self.right + self.stay
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioProfile {
    pub config: ActionPair,
    pub ta1: MoveProbs,
    pub ta2: MoveProbs,
}

impl ScenarioProfile {
    pub fn automaton(&self, index: usize) -> &MoveProbs {
        match index {
            0 => &self.ta1,
            1 => &self.ta2,
            _ => panic!("one-bit team has two automata, got index {index}"),
        }
    }
}

pub fn scenario_profile(config: ActionPair, env: &OneBitEnv, s: f64) -> Result<ScenarioProfile> {
    check_granularity(s)?;
    let team = ClauseTeam::one_bit(
        AutomatonState::deepest(config.ta1, 1)?,
        AutomatonState::deepest(config.ta2, 1)?,
    )?;
    let mut moves = [MoveProbs::default(); 2];
    let samples = [(true, true), (true, false), (false, true), (false, false)];
    for ((x, y), weight) in samples.into_iter().zip(env.joint()) {
        let clause = team.evaluate(&InputBits::one_bit(x), ClausePhase::Training)?;
        for (k, (action, literal)) in [(config.ta1, x), (config.ta2, !x)].into_iter().enumerate() {
            let p = feedback_probs(y, action, literal, clause, s)?;
            let (left, right) = match action {
                ActionKind::Include => (p.reward, p.penalty),
                ActionKind::Exclude => (p.penalty, p.reward),
            };
            moves[k].left += weight * left;
            moves[k].right += weight * right;
            moves[k].stay += weight * p.inaction;
        }
    }
    Ok(ScenarioProfile { config, ta1: moves[0], ta2: moves[1] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::ActionKind::{Exclude, Include};
    use crate::theory::chain::{ta1_chain, ta2_chain};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn noise_free_both_exclude() {
        let (c, s) = (0.3, 4.0);
        let p = scenario_profile(ActionPair::EE, &OneBitEnv::noise_free(c).unwrap(), s).unwrap();
        assert!(close(p.ta1.left, (s - 1.0) * c / s + (1.0 - c)));
        assert!(close(p.ta2.right, c / s));
    }

    #[test]
    fn both_include_drift_right() {
        let env = OneBitEnv::new(0.7, 0.4, 0.6).unwrap();
        let s = 3.0;
        let p = scenario_profile(ActionPair::II, &env, s).unwrap();
        assert!(close(p.ta1.right, 0.7 * 0.6 / s + 0.4 * 0.4 / s));
        assert_eq!(p.ta1.left, 0.0);
        let q = scenario_profile(ActionPair::IE, &env, s).unwrap();
        assert!(close(q.ta2.left, (1.0 - 0.7) * 0.6));
    }

    #[test]
    fn moves_sum_to_one() {
        let env = OneBitEnv::new(0.35, 0.8, 0.15).unwrap();
        for config in ActionPair::ALL {
            let p = scenario_profile(config, &env, 2.7).unwrap();
            assert!(close(p.ta1.total(), 1.0) && close(p.ta2.total(), 1.0));
        }
    }

    /// The conditional chain of an automaton is stitched from two
    /// configurations: its Include half uses (Include, peer), its Exclude half
    /// (Exclude, peer). Rightward rates must agree across the halves.
    #[test]
    fn profiles_reproduce_chain_labels() {
        let envs = [(0.9, 0.6, 0.5), (0.2, 0.7, 0.3), (0.55, 0.45, 0.9), (1.0, 0.0, 0.4)];
        for (a, b, c) in envs {
            let env = OneBitEnv::new(a, b, c).unwrap();
            for s in [1.0, 1.5, 3.0, 12.0] {
                for peer in [Include, Exclude] {
                    let inc = scenario_profile(ActionPair::new(Include, peer), &env, s).unwrap();
                    let exc = scenario_profile(ActionPair::new(Exclude, peer), &env, s).unwrap();
                    let chain = ta1_chain(&env, s, peer, 3).unwrap();
                    assert!(close(inc.ta1.right, chain.alpha) && close(exc.ta1.right, chain.alpha));
                    assert!(close(inc.ta1.left, chain.beta));
                    assert!(close(exc.ta1.left, chain.gamma));

                    let inc = scenario_profile(ActionPair::new(peer, Include), &env, s).unwrap();
                    let exc = scenario_profile(ActionPair::new(peer, Exclude), &env, s).unwrap();
                    let chain = ta2_chain(&env, s, peer, 3).unwrap();
                    assert!(close(inc.ta2.right, chain.alpha) && close(exc.ta2.right, chain.alpha));
                    assert!(close(inc.ta2.left, chain.beta));
                    assert!(close(exc.ta2.left, chain.gamma));
                }
            }
        }
    }
}
