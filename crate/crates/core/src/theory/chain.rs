//! Birth-death chains over one automaton's states, conditioned on the action
//! of its peer.
//!
//! The chain has `2N + 1` states `0..=2N`: states `0..=N` are Include, the rest
//! Exclude. Every state except the last moves right (towards Exclude) with rate
//! `alpha`. States `1..=N` move left with rate `beta`, states `N+1..=2N` with
//! rate `gamma`. The remaining mass is a self-loop.

use serde::{Deserialize, Serialize};

use crate::automaton::ActionKind;
use crate::env::OneBitEnv;
use crate::error::{check_granularity, Error, Result};

const RATE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BirthDeathChain {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub depth: u32,
}

impl BirthDeathChain {
    pub fn new(alpha: f64, beta: f64, gamma: f64, depth: u32) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if alpha + beta.max(gamma) > 1.0 + RATE_TOLERANCE {
            return Err(Error::invalid(format!(
                "alpha + max(beta, gamma) = {} exceeds 1",
                alpha + beta.max(gamma)
            )));
        }
        if depth == 0 {
            return Err(Error::invalid("chain half-depth N must be >= 1"));
        }
        Ok(Self { alpha, beta, gamma, depth })
    }

    pub fn len(&self) -> usize {
        2 * self.depth as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `(left, right)` rates out of `state`.
    pub fn rates(&self, state: usize) -> (f64, f64) {
        let n = self.depth as usize;
        let left = match state {
            0 => 0.0,
            s if s <= n => self.beta,
            _ => self.gamma,
        };
        let right = if state < 2 * n { self.alpha } else { 0.0 };
        (left, right)
    }

    /// One-step transition probability, self-loops included.
    pub fn transition(&self, from: usize, to: usize) -> f64 {
        let (left, right) = self.rates(from);
        if to == from {
            1.0 - left - right
        } else if to + 1 == from {
            left
        } else if to == from + 1 {
            right
        } else {
            0.0
        }
    }

    /// Closed-form geometric solution of the balance equations
    /// `alpha * pi_k = beta * pi_{k+1}` (Include half) and
    /// `alpha * pi_k = gamma * pi_{k+1}` (from state N on).
    ///
    /// Weights are accumulated in log space so deep chains with ratios far
    /// from one neither overflow nor underflow before normalisation.
    pub fn stationary(&self) -> Result<StationaryDist> {
        if self.beta == 0.0 || self.gamma == 0.0 {
            return Err(Error::DegenerateChain(format!(
                "beta = {}, gamma = {}: a zero leftward rate collapses the mass onto an end state",
                self.beta, self.gamma
            )));
        }
        let len = self.len();
        let n = self.depth as usize;
        if self.alpha == 0.0 {
            let mut pi = vec![0.0; len];
            pi[0] = 1.0;
            return Ok(StationaryDist { pi });
        }
        let log_include = (self.alpha / self.beta).ln();
        let log_exclude = (self.alpha / self.gamma).ln();
        let log_w: Vec<f64> = (0..len)
            .map(|k| {
                if k <= n {
                    k as f64 * log_include
                } else {
                    n as f64 * log_include + (k - n) as f64 * log_exclude
                }
            })
            .collect();
        let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut pi: Vec<f64> = log_w.iter().map(|w| (w - max).exp()).collect();
        let total: f64 = pi.iter().sum();
        pi.iter_mut().for_each(|p| *p /= total);
        Ok(StationaryDist { pi })
    }

    pub fn asymptotic_action(&self) -> AsymptoticAction {
        asymptotic_action(self.alpha, self.beta, self.gamma)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryDist {
    pi: Vec<f64>,
}

impl StationaryDist {
    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// Mass on states `0..=depth`, i.e. the long-run probability of Include.
    pub fn include_mass(&self, depth: u32) -> f64 {
        let end = (depth as usize + 1).min(self.pi.len());
        self.pi[..end].iter().sum()
    }

    /// Largest violation of the detailed balance equations of `chain`.
    pub fn balance_residual(&self, chain: &BirthDeathChain) -> f64 {
        self.pi
            .windows(2)
            .enumerate()
            .map(|(k, w)| {
                let (left, _) = chain.rates(k + 1);
                (chain.alpha * w[0] - left * w[1]).abs()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AsymptoticAction {
    Include,
    Exclude,
    /// `min(beta, gamma) <= alpha <= max(beta, gamma)`: no asymptotic verdict.
    Indeterminate,
}

impl From<ActionKind> for AsymptoticAction {
    fn from(a: ActionKind) -> Self {
        match a {
            ActionKind::Include => AsymptoticAction::Include,
            ActionKind::Exclude => AsymptoticAction::Exclude,
        }
    }
}

/// Limit `N -> inf` behaviour: Include if `alpha < min(beta, gamma)`,
/// Exclude if `alpha > max(beta, gamma)`.
pub fn asymptotic_action(alpha: f64, beta: f64, gamma: f64) -> AsymptoticAction {
    if alpha < beta.min(gamma) {
        AsymptoticAction::Include
    } else if alpha > beta.max(gamma) {
        AsymptoticAction::Exclude
    } else {
        AsymptoticAction::Indeterminate
    }
}

pub fn stationary(chain: &BirthDeathChain) -> Result<StationaryDist> {
    chain.stationary()
}

pub fn include_mass(dist: &StationaryDist, depth: u32) -> f64 {
    dist.include_mass(depth)
}

/// Chain of `TA_1` (literal `x`) given the action of `TA_2`.
pub fn ta1_chain(env: &OneBitEnv, s: f64, peer: ActionKind, depth: u32) -> Result<BirthDeathChain> {
    check_granularity(s)?;
    let OneBitEnv { a, b, c } = *env;
    let (alpha, beta, gamma) = match peer {
        ActionKind::Exclude => {
            let lean = (s - 1.0) * a * c / s;
            (b * (1.0 - c) / s, lean, lean + (1.0 - b) * (1.0 - c))
        }
        ActionKind::Include => ((a * c + b * (1.0 - c)) / s, 0.0, (1.0 - b) * (1.0 - c)),
    };
    BirthDeathChain::new(alpha, beta, gamma, depth)
}

/// Chain of `TA_2` (literal `¬x`) given the action of `TA_1`.
pub fn ta2_chain(env: &OneBitEnv, s: f64, peer: ActionKind, depth: u32) -> Result<BirthDeathChain> {
    check_granularity(s)?;
    let OneBitEnv { a, b, c } = *env;
    let (alpha, beta, gamma) = match peer {
        ActionKind::Exclude => {
            let lean = (s - 1.0) * b * (1.0 - c) / s;
            (a * c / s, lean, lean + (1.0 - a) * c)
        }
        ActionKind::Include => ((a * c + b * (1.0 - c)) / s, 0.0, (1.0 - a) * c),
    };
    BirthDeathChain::new(alpha, beta, gamma, depth)
}
