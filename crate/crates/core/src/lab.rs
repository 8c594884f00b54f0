//! Monte Carlo harness: trains the one-bit machine from seeded streams and
//! compares where it settles with the analytical prediction.
//!
//! Convergence over a finite run is read off the tail window: the action pair
//! occupied most often during the last `tail_window` steps.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automaton::{ActionKind, AutomatonState};
use crate::engine::ClauseTeam;
use crate::env::OneBitEnv;
use crate::error::{check_granularity, Error, Result};
use crate::pair::ActionPair;
use crate::rng::trial_rng;
use crate::theory::{predict_regions, scenario_profile, RegionPrediction};

/// Share of trials that must land in the predicted set.
pub const CONSISTENCY_THRESHOLD: f64 = 0.95;
/// Pairs within this factor of the most frequent pair count as dominant.
pub const DOMINANCE_RATIO: f64 = 0.95;
/// Minimum share for a predicted pair to count towards a split outcome.
pub const SPLIT_SHARE: f64 = 0.05;
/// Smallest draw count accepted by [`transition_frequency_check`].
pub const MIN_FREQUENCY_DRAWS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub env: OneBitEnv,
    pub s: f64,
    pub depth: u32,
    pub steps: u64,
    pub tail_window: u64,
    pub base_seed: u64,
}

impl TrialSpec {
    /// Uses the default tail window of `steps / 10`.
    pub fn new(env: OneBitEnv, s: f64, depth: u32, steps: u64, base_seed: u64) -> Result<Self> {
        let spec = Self { env, s, depth, steps, tail_window: (steps / 10).max(1), base_seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_tail_window(mut self, tail_window: u64) -> Result<Self> {
        self.tail_window = tail_window;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        OneBitEnv::new(self.env.a, self.env.b, self.env.c)?;
        check_granularity(self.s)?;
        if self.depth == 0 {
            return Err(Error::invalid("depth N must be >= 1"));
        }
        if self.tail_window == 0 || self.tail_window > self.steps {
            return Err(Error::invalid(format!(
                "need steps >= tail_window >= 1, got steps = {}, tail_window = {}",
                self.steps, self.tail_window
            )));
        }
        Ok(())
    }
}

/// Counts per action pair, serialised as `{"EE": .., "IE": .., "EI": .., "II": ..}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairCounts {
    #[serde(rename = "EE")]
    pub ee: u64,
    #[serde(rename = "IE")]
    pub ie: u64,
    #[serde(rename = "EI")]
    pub ei: u64,
    #[serde(rename = "II")]
    pub ii: u64,
}

impl PairCounts {
    pub fn get(&self, pair: ActionPair) -> u64 {
        self.as_array()[pair.index()]
    }

    fn slot(&mut self, pair: ActionPair) -> &mut u64 {
        match pair.index() {
            0 => &mut self.ee,
            1 => &mut self.ie,
            2 => &mut self.ei,
            _ => &mut self.ii,
        }
    }

    #[inline]
    pub fn add(&mut self, pair: ActionPair) {
        *self.slot(pair) += 1;
    }

    pub fn as_array(&self) -> [u64; 4] {
        [self.ee, self.ie, self.ei, self.ii]
    }

    pub fn total(&self) -> u64 {
        self.as_array().iter().sum()
    }

    /// Most frequent pair; ties go to the earlier pair in canonical order.
    pub fn argmax(&self) -> (ActionPair, u64) {
        ActionPair::ALL
            .into_iter()
            .map(|p| (p, self.get(p)))
            .fold((ActionPair::EE, 0), |best, cur| if cur.1 > best.1 { cur } else { best })
    }

    pub fn share(&self, pair: ActionPair) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.get(pair) as f64 / t as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub initial_pair: ActionPair,
    pub final_pair: ActionPair,
    pub tail_dominant_pair: ActionPair,
    pub tail_fraction: f64,
    /// Occupancy of every pair over the whole run; sums to `steps`.
    pub occupancy: PairCounts,
    /// Step (one-based) at which the action pair last changed, 0 if never.
    pub last_change_step: u64,
}

fn pair_of(team: &ClauseTeam) -> ActionPair {
    let a = team.automata();
    ActionPair::new(a[0].action(), a[1].action())
}

pub fn run_trial(spec: &TrialSpec, trial_index: u64) -> Result<TrialOutcome> {
    run_trial_observed(spec, trial_index, |_, _| {})
}

/// [`run_trial`] with a callback invoked after every step with the one-based
/// step number and the updated team.
pub fn run_trial_observed<F>(spec: &TrialSpec, trial_index: u64, mut observe: F) -> Result<TrialOutcome>
where
    F: FnMut(u64, &ClauseTeam),
{
    spec.validate()?;
    let mut rng = trial_rng(spec.base_seed, trial_index);
    let mut team = ClauseTeam::init(1, spec.depth, &mut rng)?;
    let initial_pair = pair_of(&team);
    let tail_start = spec.steps - spec.tail_window;
    let mut occupancy = PairCounts::default();
    let mut tail = PairCounts::default();
    let mut previous = initial_pair;
    let mut last_change_step = 0;
    for step in 0..spec.steps {
        let sample = spec.env.draw_sample(&mut rng);
        team.train_step(&sample, spec.s, &mut rng)?;
        let pair = pair_of(&team);
        occupancy.add(pair);
        if step >= tail_start {
            tail.add(pair);
        }
        if pair != previous {
            last_change_step = step + 1;
            previous = pair;
        }
        observe(step + 1, &team);
    }
    let (tail_dominant_pair, count) = tail.argmax();
    Ok(TrialOutcome {
        initial_pair,
        final_pair: previous,
        tail_dominant_pair,
        tail_fraction: count as f64 / spec.tail_window as f64,
        occupancy,
        last_change_step,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::Inconsistent => "inconsistent",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub spec: TrialSpec,
    pub trials: u64,
    /// Tail-dominant pair of each trial.
    pub pair_counts: PairCounts,
    /// Pair held after the last step of each trial.
    pub final_counts: PairCounts,
    pub prediction: RegionPrediction,
    pub verdict: Verdict,
    /// Share of trials whose tail-dominant pair is predicted (0 under no-convergence).
    pub confidence: f64,
    pub mean_tail_fraction: f64,
    /// Diagnostic only: mean step of the last action-pair change.
    pub mean_last_change_step: f64,
}

impl ExperimentReport {
    /// Pairs whose count is within [`DOMINANCE_RATIO`] of the largest count.
    pub fn dominant_pairs(&self) -> Vec<ActionPair> {
        dominant_pairs(&self.pair_counts)
    }
}

fn dominant_pairs(counts: &PairCounts) -> Vec<ActionPair> {
    let (_, max) = counts.argmax();
    if max == 0 {
        return Vec::new();
    }
    ActionPair::ALL
        .into_iter()
        .filter(|&p| counts.get(p) as f64 >= DOMINANCE_RATIO * max as f64)
        .collect()
}

/// Compares tail-dominant counts against a prediction.
///
/// No-convergence predictions are always indeterminate. Otherwise the
/// dominant pairs must be predicted and at least [`CONSISTENCY_THRESHOLD`] of
/// the trials must land in the predicted set; when the prediction allows
/// several pairs and the trials split between them, the verdict is
/// indeterminate.
pub fn judge(counts: &PairCounts, prediction: &RegionPrediction) -> (Verdict, f64) {
    let trials = counts.total().max(1) as f64;
    let predicted = prediction.outcomes();
    let in_mass = predicted.iter().map(|&p| counts.get(p)).sum::<u64>() as f64 / trials;
    if predicted.is_empty() {
        return (Verdict::Indeterminate, 0.0);
    }
    let dominant_ok = dominant_pairs(counts).iter().all(|p| predicted.contains(p));
    if !dominant_ok || in_mass < CONSISTENCY_THRESHOLD {
        return (Verdict::Inconsistent, in_mass);
    }
    let occupied = predicted.iter().filter(|&&p| counts.get(p) as f64 / trials >= SPLIT_SHARE).count();
    if occupied > 1 {
        (Verdict::Indeterminate, in_mass)
    } else {
        (Verdict::Consistent, in_mass)
    }
}

/// Runs `trials` independent trials (in parallel on the current rayon pool)
/// and aggregates them in trial order.
pub fn run_experiment(spec: &TrialSpec, trials: u64) -> Result<ExperimentReport> {
    if trials == 0 {
        return Err(Error::invalid("an experiment needs at least one trial"));
    }
    spec.validate()?;
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(spec, i))
        .collect::<Result<Vec<_>>>()?;
    let mut pair_counts = PairCounts::default();
    let mut final_counts = PairCounts::default();
    let mut tail_sum = 0.0;
    let mut change_sum = 0.0;
    for o in &outcomes {
        pair_counts.add(o.tail_dominant_pair);
        final_counts.add(o.final_pair);
        tail_sum += o.tail_fraction;
        change_sum += o.last_change_step as f64;
    }
    let prediction = predict_regions(&spec.env, spec.s)?;
    let (verdict, confidence) = judge(&pair_counts, &prediction);
    Ok(ExperimentReport {
        spec: *spec,
        trials,
        pair_counts,
        final_counts,
        prediction,
        verdict,
        confidence,
        mean_tail_fraction: tail_sum / trials as f64,
        mean_last_change_step: change_sum / trials as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Left,
    Right,
    Stay,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellCheck {
    /// 1 for the automaton on `x`, 2 for the one on `¬x`.
    pub automaton: u8,
    pub direction: Direction,
    pub expected: f64,
    pub observed: f64,
    pub sigma: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyCheck {
    pub config: ActionPair,
    pub draws: u64,
    pub cells: Vec<CellCheck>,
}

impl FrequencyCheck {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }
}

/// Holds the team at `config` (both automata one step inside their half, so
/// every move is visible), feeds `draws` fresh samples and compares the
/// observed move frequencies with the scenario profile at 3 sigma per cell.
pub fn transition_frequency_check(
    config: ActionPair,
    env: &OneBitEnv,
    s: f64,
    draws: u64,
    seed: u64,
) -> Result<FrequencyCheck> {
    if draws < MIN_FREQUENCY_DRAWS {
        return Err(Error::invalid(format!("need at least {MIN_FREQUENCY_DRAWS} draws, got {draws}")));
    }
    let profile = scenario_profile(config, env, s)?;
    const DEPTH: u32 = 2;
    let start_state = |a: ActionKind| AutomatonState::shallowest(a, DEPTH);
    let start = ClauseTeam::one_bit(start_state(config.ta1)?, start_state(config.ta2)?)?;
    let mut rng = trial_rng(seed, 0);
    let mut tallies = [[0u64; 3]; 2];
    let mut team = start.clone();
    for _ in 0..draws {
        team.clone_from(&start);
        let sample = env.draw_sample(&mut rng);
        team.train_step(&sample, s, &mut rng)?;
        for (k, (before, after)) in start.automata().iter().zip(team.automata()).enumerate() {
            let slot = match after.state().cmp(&before.state()) {
                std::cmp::Ordering::Less => 0,
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Equal => 2,
            };
            tallies[k][slot] += 1;
        }
    }
    let n = draws as f64;
    let mut cells = Vec::with_capacity(6);
    for (k, tally) in tallies.iter().enumerate() {
        let moves = profile.automaton(k);
        let expected = [moves.left, moves.right, moves.stay];
        for (slot, direction) in [Direction::Left, Direction::Right, Direction::Stay].into_iter().enumerate() {
            let p = expected[slot].clamp(0.0, 1.0);
            let observed = tally[slot] as f64 / n;
            let sigma = (p * (1.0 - p) / n).sqrt();
            let pass = (observed - p).abs() <= 3.0 * sigma + 1e-12;
            cells.push(CellCheck { automaton: k as u8 + 1, direction, expected: p, observed, sigma, pass });
        }
    }
    Ok(FrequencyCheck { config, draws, cells })
}

/// The parameter varied by a sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    S(Vec<f64>),
    C(Vec<f64>),
}

impl SweepAxis {
    pub fn values(&self) -> &[f64] {
        match self {
            SweepAxis::S(v) | SweepAxis::C(v) => v,
        }
    }
}

/// `from, from + step, ...` up to and including `to` (within rounding).
pub fn linear_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !from.is_finite() || !to.is_finite() || to < from {
        return Err(Error::invalid(format!("bad grid from {from} to {to} step {step}")));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| from + i as f64 * step).collect())
}

pub fn sweep(axis: &SweepAxis, template: &TrialSpec, trials: u64) -> Result<Vec<ExperimentReport>> {
    if axis.values().is_empty() {
        return Err(Error::invalid("sweep grid is empty"));
    }
    axis.values()
        .iter()
        .map(|&v| {
            let mut spec = *template;
            match axis {
                SweepAxis::S(_) => spec.s = v,
                SweepAxis::C(_) => spec.env = OneBitEnv::new(spec.env.a, spec.env.b, v)?,
            }
            run_experiment(&spec, trials)
        })
        .collect()
}

/// One CSV row per report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub s: f64,
    #[serde(rename = "N")]
    pub depth: u32,
    pub steps: u64,
    pub trials: u64,
    #[serde(rename = "count_EE")]
    pub count_ee: u64,
    #[serde(rename = "count_IE")]
    pub count_ie: u64,
    #[serde(rename = "count_EI")]
    pub count_ei: u64,
    #[serde(rename = "count_II")]
    pub count_ii: u64,
    pub predicted: String,
    pub verdict: Verdict,
}

impl From<&ExperimentReport> for SweepRow {
    fn from(r: &ExperimentReport) -> Self {
        Self {
            a: r.spec.env.a,
            b: r.spec.env.b,
            c: r.spec.env.c,
            s: r.spec.s,
            depth: r.spec.depth,
            steps: r.spec.steps,
            trials: r.trials,
            count_ee: r.pair_counts.ee,
            count_ie: r.pair_counts.ie,
            count_ei: r.pair_counts.ei,
            count_ii: r.pair_counts.ii,
            predicted: r.prediction.code(),
            verdict: r.verdict,
        }
    }
}

pub fn write_csv<W: Write>(reports: &[ExperimentReport], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    for r in reports {
        out.serialize(SweepRow::from(r)).map_err(|e| Error::Output(e.to_string()))?;
    }
    out.flush().map_err(|e| Error::Output(e.to_string()))
}
