//! The two-action Tsetlin Automaton.
//!
//! States are numbered `1..=2N`. The left half `1..=N` selects
//! [`ActionKind::Include`], the right half `N+1..=2N` selects
//! [`ActionKind::Exclude`]. State 1 is the deepest Include state and `2N` the
//! deepest Exclude state; a reward pushes the automaton towards the end of its
//! current half, a penalty towards the opposite half.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActionKind {
    Include,
    Exclude,
}

impl ActionKind {
    pub fn opposite(self) -> Self {
        match self {
            ActionKind::Include => ActionKind::Exclude,
            ActionKind::Exclude => ActionKind::Include,
        }
    }

    /// Single-letter tag, `I` or `E`.
    pub fn letter(self) -> char {
        match self {
            ActionKind::Include => 'I',
            ActionKind::Exclude => 'E',
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionKind::Include => f.write_str("Include"),
            ActionKind::Exclude => f.write_str("Exclude"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeedbackSignal {
    Reward,
    Inaction,
    Penalty,
}

/// Memory state of one automaton together with its half-depth `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AutomatonState {
    state: u32,
    depth: u32,
}

impl AutomatonState {
    pub fn new(state: u32, depth: u32) -> Result<Self> {
        if depth == 0 {
            return Err(Error::invalid("automaton depth N must be >= 1"));
        }
        let max = depth
            .checked_mul(2)
            .ok_or_else(|| Error::invalid(format!("automaton depth {depth} is too large")))?;
        if !(1..=max).contains(&state) {
            return Err(Error::invalid(format!(
                "state {state} outside [1, {max}] for depth {depth}"
            )));
        }
        Ok(Self { state, depth })
    }

    /// The end state of the given action's half.
    pub fn deepest(action: ActionKind, depth: u32) -> Result<Self> {
        let state = match action {
            ActionKind::Include => 1,
            ActionKind::Exclude => depth.saturating_mul(2),
        };
        Self::new(state, depth)
    }

    /// The state of the given action's half that borders the other action.
    pub fn shallowest(action: ActionKind, depth: u32) -> Result<Self> {
        let state = match action {
            ActionKind::Include => depth,
            ActionKind::Exclude => depth.saturating_add(1),
        };
        Self::new(state, depth)
    }

    #[inline]
    pub fn state(&self) -> u32 {
        self.state
    }

    #[inline]
    pub fn depth(&self) -> u32 {
        self.depth
    }

    #[inline]
    pub fn action(&self) -> ActionKind {
        if self.state <= self.depth {
            ActionKind::Include
        } else {
            ActionKind::Exclude
        }
    }

    #[inline]
    pub fn apply(self, signal: FeedbackSignal) -> Self {
        let towards_include = match (signal, self.action()) {
            (FeedbackSignal::Inaction, _) => return self,
            (FeedbackSignal::Reward, ActionKind::Include) => true,
            (FeedbackSignal::Reward, ActionKind::Exclude) => false,
            (FeedbackSignal::Penalty, ActionKind::Include) => false,
            (FeedbackSignal::Penalty, ActionKind::Exclude) => true,
        };
        let state = if towards_include {
            self.state.saturating_sub(1).max(1)
        } else {
            (self.state + 1).min(2 * self.depth)
        };
        Self { state, ..self }
    }
}

pub fn action_of(automaton: &AutomatonState) -> ActionKind {
    automaton.action()
}

pub fn apply_feedback(automaton: AutomatonState, signal: FeedbackSignal) -> AutomatonState {
    automaton.apply(signal)
}
