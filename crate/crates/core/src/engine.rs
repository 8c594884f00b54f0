//! Clause semantics, the Type I / Type II feedback tables and the training step
//! that couples a team of automata into one conjunctive clause.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::automaton::{ActionKind, AutomatonState, FeedbackSignal};
use crate::error::{check_granularity, Error, Result};

/// Widest input vector an [`InputBits`] can hold.
pub const MAX_INPUTS: usize = 64;

/// Fixed-width bit vector `[x_1, ..., x_o]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InputBits {
    bits: u64,
    width: u8,
}

impl InputBits {
    pub fn new(width: usize) -> Result<Self> {
        if width == 0 || width > MAX_INPUTS {
            return Err(Error::invalid(format!(
                "input width must be in [1, {MAX_INPUTS}], got {width}"
            )));
        }
        Ok(Self { bits: 0, width: width as u8 })
    }

    pub fn from_bools(values: &[bool]) -> Result<Self> {
        let mut out = Self::new(values.len())?;
        for (k, &v) in values.iter().enumerate() {
            out.set(k, v);
        }
        Ok(out)
    }

    pub fn one_bit(x: bool) -> Self {
        Self { bits: x as u64, width: 1 }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width as usize
    }

    /// Value of `x_{k+1}` (zero-based `k`).
    #[inline]
    pub fn get(&self, k: usize) -> bool {
        debug_assert!(k < self.width());
        (self.bits >> k) & 1 == 1
    }

    pub fn set(&mut self, k: usize, value: bool) {
        assert!(k < self.width(), "bit {k} out of range for width {}", self.width);
        if value {
            self.bits |= 1 << k;
        } else {
            self.bits &= !(1 << k);
        }
    }
}

/// One training example `(X, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sample {
    pub x: InputBits,
    pub y: bool,
}

impl Sample {
    pub fn one_bit(x: bool, y: bool) -> Self {
        Self { x: InputBits::one_bit(x), y }
    }
}

/// Identifies the literal `x_k` (or `¬x_k` when `negated`), `k` one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LiteralRef {
    pub var_index: usize,
    pub negated: bool,
}

impl LiteralRef {
    /// Zero-based position in a [`ClauseTeam`]: `x_k` sits at `2(k-1)`,
    /// `¬x_k` right after it.
    pub fn position(&self) -> usize {
        2 * (self.var_index - 1) + self.negated as usize
    }

    pub fn from_position(position: usize) -> Self {
        Self { var_index: position / 2 + 1, negated: position % 2 == 1 }
    }

    #[inline]
    pub fn value(&self, x: &InputBits) -> bool {
        x.get(self.var_index - 1) ^ self.negated
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClausePhase {
    Training,
    Testing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedbackProbs {
    pub reward: f64,
    pub inaction: f64,
    pub penalty: f64,
}

impl FeedbackProbs {
    pub const INACTION: Self = Self { reward: 0.0, inaction: 1.0, penalty: 0.0 };
    pub const PENALTY: Self = Self { reward: 0.0, inaction: 0.0, penalty: 1.0 };

    pub fn new(reward: f64, inaction: f64, penalty: f64) -> Result<Self> {
        let probs = Self { reward, inaction, penalty };
        if [reward, inaction, penalty].iter().any(|p| !(0.0..=1.0).contains(p))
            || (probs.total() - 1.0).abs() > 1e-12
        {
            return Err(Error::invalid(format!(
                "feedback probabilities ({reward}, {inaction}, {penalty}) do not form a distribution"
            )));
        }
        Ok(probs)
    }

    pub fn total(&self) -> f64 {
        self.reward + self.inaction + self.penalty
    }

    pub fn of(&self, signal: FeedbackSignal) -> f64 {
        match signal {
            FeedbackSignal::Reward => self.reward,
            FeedbackSignal::Inaction => self.inaction,
            FeedbackSignal::Penalty => self.penalty,
        }
    }

    /// Maps one uniform variate in `[0, 1)` onto a signal by partitioning the
    /// unit interval as reward, inaction, penalty (in that order).
    #[inline]
    pub fn select(&self, u: f64) -> FeedbackSignal {
        if u < self.reward {
            FeedbackSignal::Reward
        } else if u < self.reward + self.inaction {
            FeedbackSignal::Inaction
        } else {
            FeedbackSignal::Penalty
        }
    }
}

fn not_applicable(table: &str) -> Error {
    Error::ContractViolation(format!(
        "{table} queried for an included 0-literal in a clause that evaluated to 1"
    ))
}

/// Type I feedback, triggered by samples labelled `y = 1`.
pub fn type_i_probs(action: ActionKind, literal: bool, clause: bool, s: f64) -> Result<FeedbackProbs> {
    check_granularity(s)?;
    let high = (s - 1.0) / s;
    let low = 1.0 / s;
    let (reward, inaction, penalty) = match (action, clause, literal) {
        (ActionKind::Include, true, true) => (high, low, 0.0),
        (ActionKind::Include, true, false) => return Err(not_applicable("Type I feedback")),
        (ActionKind::Include, false, _) => (0.0, high, low),
        (ActionKind::Exclude, true, true) => (0.0, low, high),
        (ActionKind::Exclude, true, false) | (ActionKind::Exclude, false, _) => (low, high, 0.0),
    };
    Ok(FeedbackProbs { reward, inaction, penalty })
}

/// Type II feedback, triggered by samples labelled `y = 0`.
pub fn type_ii_probs(action: ActionKind, literal: bool, clause: bool) -> Result<FeedbackProbs> {
    match (action, clause, literal) {
        (ActionKind::Include, true, false) => Err(not_applicable("Type II feedback")),
        (ActionKind::Exclude, true, false) => Ok(FeedbackProbs::PENALTY),
        _ => Ok(FeedbackProbs::INACTION),
    }
}

/// Selects the table by label: Type I for `y = 1`, Type II for `y = 0`.
pub fn feedback_probs(
    label: bool,
    action: ActionKind,
    literal: bool,
    clause: bool,
    s: f64,
) -> Result<FeedbackProbs> {
    if label {
        type_i_probs(action, literal, clause, s)
    } else {
        type_ii_probs(action, literal, clause)
    }
}

/// The `2o` automata deciding which literals enter one clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClauseTeam {
    automata: Vec<AutomatonState>,
}

impl ClauseTeam {
    pub fn new(automata: Vec<AutomatonState>) -> Result<Self> {
        if automata.is_empty() || automata.len() % 2 != 0 || automata.len() > 2 * MAX_INPUTS {
            return Err(Error::invalid(format!(
                "a clause team needs 2o automata with 1 <= o <= {MAX_INPUTS}, got {}",
                automata.len()
            )));
        }
        let depth = automata[0].depth();
        if automata.iter().any(|a| a.depth() != depth) {
            return Err(Error::invalid("all automata of a team must share the same depth"));
        }
        Ok(Self { automata })
    }

    /// Team for the one-bit problem: `TA_1` guards `x`, `TA_2` guards `¬x`.
    pub fn one_bit(ta1: AutomatonState, ta2: AutomatonState) -> Result<Self> {
        Self::new(vec![ta1, ta2])
    }

    /// Every automaton starts in a uniformly drawn Exclude state.
    pub fn init<R: Rng + ?Sized>(width: usize, depth: u32, rng: &mut R) -> Result<Self> {
        if width == 0 || width > MAX_INPUTS {
            return Err(Error::invalid(format!("input width must be in [1, {MAX_INPUTS}], got {width}")));
        }
        if depth == 0 {
            return Err(Error::invalid("automaton depth N must be >= 1"));
        }
        let automata = (0..2 * width)
            .map(|_| AutomatonState::new(rng.random_range(depth + 1..=2 * depth), depth))
            .collect::<Result<Vec<_>>>()?;
        Self::new(automata)
    }

    pub fn width(&self) -> usize {
        self.automata.len() / 2
    }

    pub fn depth(&self) -> u32 {
        self.automata[0].depth()
    }

    pub fn automata(&self) -> &[AutomatonState] {
        &self.automata
    }

    pub fn automaton(&self, literal: LiteralRef) -> &AutomatonState {
        &self.automata[literal.position()]
    }

    pub fn actions(&self) -> impl Iterator<Item = ActionKind> + '_ {
        self.automata.iter().map(AutomatonState::action)
    }

    fn check_width(&self, x: &InputBits) -> Result<()> {
        if x.width() == self.width() {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "input width {} does not match clause width {}",
                x.width(),
                self.width()
            )))
        }
    }

    /// Conjunction of the included literals. A clause with nothing included
    /// outputs 1 while training and 0 while testing.
    pub fn evaluate(&self, x: &InputBits, phase: ClausePhase) -> Result<bool> {
        self.check_width(x)?;
        Ok(self.evaluate_unchecked(x, phase))
    }

    #[inline]
    fn evaluate_unchecked(&self, x: &InputBits, phase: ClausePhase) -> bool {
        let mut any_included = false;
        for (position, ta) in self.automata.iter().enumerate() {
            if ta.action() == ActionKind::Include {
                any_included = true;
                if !LiteralRef::from_position(position).value(x) {
                    return false;
                }
            }
        }
        any_included || phase == ClausePhase::Training
    }

    /// One training update. The clause value and every automaton's action are
    /// read from the pre-step configuration; each automaton then draws its own
    /// signal from one uniform variate, in position order.
    pub fn train_step<R: Rng + ?Sized>(&mut self, sample: &Sample, s: f64, rng: &mut R) -> Result<()> {
        self.apply_feedback_from(sample, sample.y, s, rng)
    }

    /// Same as [`ClauseTeam::train_step`] but with the table choice decoupled
    /// from the label, so negative-polarity clauses can be trained with the
    /// tables swapped.
    pub(crate) fn apply_feedback_from<R: Rng + ?Sized>(
        &mut self,
        sample: &Sample,
        type_i: bool,
        s: f64,
        rng: &mut R,
    ) -> Result<()> {
        self.check_width(&sample.x)?;
        let clause = self.evaluate_unchecked(&sample.x, ClausePhase::Training);
        for (position, ta) in self.automata.iter_mut().enumerate() {
            let literal = LiteralRef::from_position(position).value(&sample.x);
            let probs = feedback_probs(type_i, ta.action(), literal, clause, s)?;
            *ta = ta.apply(probs.select(rng.random::<f64>()));
        }
        Ok(())
    }
}

pub fn clause_eval(team: &ClauseTeam, x: &InputBits, phase: ClausePhase) -> Result<bool> {
    team.evaluate(x, phase)
}

pub fn init_team<R: Rng + ?Sized>(width: usize, depth: u32, rng: &mut R) -> Result<ClauseTeam> {
    ClauseTeam::init(width, depth, rng)
}

pub fn train_step<R: Rng + ?Sized>(
    team: &mut ClauseTeam,
    sample: &Sample,
    s: f64,
    rng: &mut R,
) -> Result<()> {
    team.train_step(sample, s, rng)
}

/// Disjunction of clause outputs.
pub fn dnf_infer(clause_values: &[bool]) -> Result<bool> {
    if clause_values.is_empty() {
        return Err(Error::invalid("DNF inference needs at least one clause"));
    }
    Ok(clause_values.iter().any(|&c| c))
}

/// Odd clauses (one-based) vote for, even clauses against.
pub fn voting_score(clause_values: &[bool]) -> Result<i64> {
    if clause_values.is_empty() {
        return Err(Error::invalid("voting needs at least one clause"));
    }
    Ok(clause_values
        .iter()
        .enumerate()
        .map(|(j, &c)| match (c, j % 2 == 0) {
            (false, _) => 0,
            (true, true) => 1,
            (true, false) => -1,
        })
        .sum())
}

/// Unit step: 1 iff the score is non-negative.
pub fn voting_infer(score: i64) -> bool {
    score >= 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Architecture {
    Dnf,
    Voting,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TMConfig {
    pub clauses: usize,
    pub s: f64,
    pub depth: u32,
    pub architecture: Architecture,
    pub inputs: usize,
}

impl TMConfig {
    /// The single-clause, single-input machine used by the convergence lab.
    pub fn one_bit(s: f64, depth: u32) -> Self {
        Self { clauses: 1, s, depth, architecture: Architecture::Dnf, inputs: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        check_granularity(self.s)?;
        if self.clauses == 0 {
            return Err(Error::invalid("clause count m must be >= 1"));
        }
        if self.depth == 0 {
            return Err(Error::invalid("automaton depth N must be >= 1"));
        }
        if self.inputs == 0 || self.inputs > MAX_INPUTS {
            return Err(Error::invalid(format!("input width must be in [1, {MAX_INPUTS}]")));
        }
        Ok(())
    }
}

/// A bank of clauses combined by disjunction or by signed voting.
#[derive(Debug, Clone, PartialEq)]
pub struct TsetlinMachine {
    config: TMConfig,
    clauses: Vec<ClauseTeam>,
}

impl TsetlinMachine {
    pub fn new<R: Rng + ?Sized>(config: TMConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let clauses = (0..config.clauses)
            .map(|_| ClauseTeam::init(config.inputs, config.depth, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { config, clauses })
    }

    pub fn from_clauses(config: TMConfig, clauses: Vec<ClauseTeam>) -> Result<Self> {
        config.validate()?;
        if clauses.len() != config.clauses
            || clauses.iter().any(|c| c.width() != config.inputs || c.depth() != config.depth)
        {
            return Err(Error::invalid("clauses do not match the machine configuration"));
        }
        Ok(Self { config, clauses })
    }

    pub fn config(&self) -> &TMConfig {
        &self.config
    }

    pub fn clauses(&self) -> &[ClauseTeam] {
        &self.clauses
    }

    pub fn clause_values(&self, x: &InputBits, phase: ClausePhase) -> Result<Vec<bool>> {
        self.clauses.iter().map(|c| c.evaluate(x, phase)).collect()
    }

    pub fn predict(&self, x: &InputBits) -> Result<bool> {
        let values = self.clause_values(x, ClausePhase::Testing)?;
        match self.config.architecture {
            Architecture::Dnf => dnf_infer(&values),
            Architecture::Voting => voting_score(&values).map(voting_infer),
        }
    }

    /// Every clause receives feedback on every step. Under voting, the
    /// negative-polarity (even) clauses learn the `y = 0` pattern, so their
    /// Type I and Type II tables are swapped.
    pub fn train_step<R: Rng + ?Sized>(&mut self, sample: &Sample, rng: &mut R) -> Result<()> {
        let s = self.config.s;
        let voting = self.config.architecture == Architecture::Voting;
        for (j, clause) in self.clauses.iter_mut().enumerate() {
            let negative = voting && j % 2 == 1;
            clause.apply_feedback_from(sample, sample.y ^ negative, s, rng)?;
        }
        Ok(())
    }
}
