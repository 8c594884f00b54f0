//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every check prints exactly one pass/fail line; the process fails if any
//! check fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use tmconv_core::lab::run_trial_observed;
use tmconv_core::rng::trial_rng;
use tmconv_core::{
    run_experiment, thresholds, transition_frequency_check, ActionPair, BirthDeathChain, OneBitEnv, TrialSpec,
    Verdict,
};

const NOISE_FREE_BUDGET: Duration = Duration::from_secs(60);
const NOISY_BUDGET: Duration = Duration::from_secs(300);
const FREQUENCY_DRAWS: u64 = 100_000;
const SOLVER_TOLERANCE: f64 = 1e-10;
const DEEP_INCLUDE_MASS: f64 = 0.999;
const NOISY_SHARE: f64 = 0.95;
const RARE_PATTERN_SHARE: f64 = 0.90;
const MAX_PAIR_SHARE: f64 = 0.80;

const NOISY_DEPTH: u32 = 50;
const NOISY_STEPS: u64 = 200_000;
const NOISY_TRIALS: u64 = 500;
const SEED: u64 = 20_240_917;

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn noisy_spec(env: OneBitEnv, s: f64) -> TrialSpec {
    TrialSpec::new(env, s, NOISY_DEPTH, NOISY_STEPS, SEED).unwrap()
}

fn env(a: f64, b: f64, c: f64) -> OneBitEnv {
    OneBitEnv::new(a, b, c).unwrap()
}

fn noise_free_absorption() -> Outcome {
    let start = Instant::now();
    let mut worst = (u64::MAX, String::new());
    let mut total = 0;
    for c in [0.1, 0.5, 0.9, 1.0] {
        for s in [2.0, 4.0] {
            for depth in [1, 2] {
                let spec = TrialSpec::new(OneBitEnv::noise_free(c).unwrap(), s, depth, 10_000, SEED).unwrap();
                let r = run_experiment(&spec, 1000).unwrap();
                // Absorbed: held (I,E) at the end and for the whole tail window.
                let absorbed = if r.mean_tail_fraction == 1.0 { r.final_counts.ie.min(r.pair_counts.ie) } else { 0 };
                total += absorbed;
                if absorbed < worst.0 {
                    worst = (absorbed, format!("c={c} s={s} N={depth}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        total == 16_000 && elapsed <= NOISE_FREE_BUDGET,
        format!(
            "{total}/16000 trials absorbed at (I,E) (worst cell {}: {}/1000), {:.1}s of {}s",
            worst.1,
            worst.0,
            elapsed.as_secs_f64(),
            NOISE_FREE_BUDGET.as_secs()
        ),
    )
}

fn transition_frequencies() -> Outcome {
    let cases = [
        (OneBitEnv::noise_free(0.5).unwrap(), 4.0),
        (env(0.9, 0.1, 0.5), 3.0),
        (env(0.9, 0.6, 0.5), 3.0),
        (env(0.9, 0.8, 0.05), 10.0),
    ];
    let mut cells = 0;
    let mut failed = Vec::new();
    for (k, (e, s)) in cases.iter().enumerate() {
        for config in ActionPair::ALL {
            let check = transition_frequency_check(config, e, *s, FREQUENCY_DRAWS, SEED + k as u64).unwrap();
            cells += check.cells.len();
            for cell in check.cells.iter().filter(|c| !c.pass) {
                failed.push(format!(
                    "env {:?} {config} TA{} {:?}: expected {} observed {}",
                    e, cell.automaton, cell.direction, cell.expected, cell.observed
                ));
            }
        }
    }
    let detail = if failed.is_empty() {
        format!("{cells} cells within 3 sigma over 16 configurations x {FREQUENCY_DRAWS} draws")
    } else {
        format!("{} of {cells} cells outside 3 sigma: {}", failed.len(), failed.join("; "))
    };
    outcome(failed.is_empty(), detail)
}

/// Dense solve of `pi P = pi`, `sum pi = 1` with `P` built straight from the rates.
fn dense_stationary(alpha: f64, beta: f64, gamma: f64, depth: usize) -> Vec<f64> {
    let n = 2 * depth + 1;
    let mut p = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let left = match k {
            0 => 0.0,
            k if k <= depth => beta,
            _ => gamma,
        };
        let right = if k + 1 < n { alpha } else { 0.0 };
        if k > 0 {
            p[(k, k - 1)] = left;
        }
        if k + 1 < n {
            p[(k, k + 1)] = right;
        }
        p[(k, k)] = 1.0 - left - right;
    }
    let mut m = p.transpose() - DMatrix::<f64>::identity(n, n);
    m.row_mut(n - 1).fill(1.0);
    let mut rhs = DVector::<f64>::zeros(n);
    rhs[n - 1] = 1.0;
    m.lu().solve(&rhs).expect("singular system").iter().copied().collect()
}

fn stationary_oracle() -> Outcome {
    let mut rng = trial_rng(SEED, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let alpha = rng.random_range(0.01..0.5);
        let beta = rng.random_range(0.01..0.5);
        let gamma = rng.random_range(0.01..0.5);
        let depth = rng.random_range(1..=20u32);
        let closed = BirthDeathChain::new(alpha, beta, gamma, depth).unwrap().stationary().unwrap();
        let dense = dense_stationary(alpha, beta, gamma, depth as usize);
        for (x, y) in closed.pi().iter().zip(&dense) {
            worst = worst.max((x - y).abs());
        }
    }
    let deep = BirthDeathChain::new(0.2, 0.4, 0.4, 500).unwrap().stationary().unwrap().include_mass(500);
    outcome(
        worst <= SOLVER_TOLERANCE && deep >= DEEP_INCLUDE_MASS,
        format!(
            "max |closed - dense| = {worst:.2e} over 100 chains (limit {SOLVER_TOLERANCE:e}); \
             include mass at N=500 = {deep} (need >= {DEEP_INCLUDE_MASS})"
        ),
    )
}

fn threshold_algebra() -> Outcome {
    let t = thresholds(&env(0.5, 0.5, 0.5)).unwrap();
    let exact = t.as_array() == [1.0, 2.0, 2.0, 1.0, 2.0, 2.0];
    let mut rng = trial_rng(SEED, 1);
    let mut open_unit = || loop {
        let v: f64 = rng.random();
        if v > 0.0 {
            return v;
        }
    };
    let mut violations = 0;
    for _ in 0..1000 {
        let (a, b, c) = (open_unit(), open_unit(), open_unit());
        let t = thresholds(&env(a, b, c)).unwrap();
        let ok = (t.s2 < t.s6) == (a > 0.5)
            && (t.s5 < t.s3) == (b > 0.5)
            && (t.s1.min(t.s4) > 1.0) == (a > 0.5 && b > 0.5);
        violations += usize::from(!ok);
    }
    outcome(
        exact && violations == 0,
        format!("a=b=c=0.5 gives {t} (exact: {exact}); {violations}/1000 random envs violate an implication"),
    )
}

fn share(counts: &tmconv_core::PairCounts, pair: ActionPair) -> f64 {
    counts.get(pair) as f64 / counts.total() as f64
}

fn noisy_regions() -> Outcome {
    let start = Instant::now();
    let ie = run_experiment(&noisy_spec(env(0.9, 0.1, 0.5), 3.0), NOISY_TRIALS).unwrap();
    let ei = run_experiment(&noisy_spec(env(0.1, 0.9, 0.5), 3.0), NOISY_TRIALS).unwrap();
    let elapsed = start.elapsed();
    let (p, q) = (share(&ie.pair_counts, ActionPair::IE), share(&ei.pair_counts, ActionPair::EI));
    outcome(
        p >= NOISY_SHARE && q >= NOISY_SHARE && elapsed <= NOISY_BUDGET,
        format!(
            "{{0.9,0.1,0.5}} s=3: {:.1}% (I,E); {{0.1,0.9,0.5}} s=3: {:.1}% (E,I) (need {}%); {:.1}s of {}s",
            100.0 * p,
            100.0 * q,
            100.0 * NOISY_SHARE,
            elapsed.as_secs_f64(),
            NOISY_BUDGET.as_secs()
        ),
    )
}

fn rare_pattern() -> Outcome {
    let e = env(0.9, 0.8, 0.05);
    let t = thresholds(&e).unwrap();
    let s_ie = 0.5 * (t.s2 + t.s6);
    let s_ei = 0.5 * (t.s5 + t.s3);
    let ie = run_experiment(&noisy_spec(e, s_ie), NOISY_TRIALS).unwrap();
    let ei = run_experiment(&noisy_spec(e, s_ei), NOISY_TRIALS).unwrap();
    let (p, q) = (share(&ie.pair_counts, ActionPair::IE), share(&ei.pair_counts, ActionPair::EI));
    let fmt = |c: &tmconv_core::PairCounts| {
        ActionPair::ALL.iter().map(|&p| format!("{p}={}", c.get(p))).collect::<Vec<_>>().join(" ")
    };
    outcome(
        p >= RARE_PATTERN_SHARE && q >= RARE_PATTERN_SHARE,
        format!(
            "{{0.9,0.8,0.05}} s={s_ie:.4}: {:.1}% (I,E) [{}]; s={s_ei:.4}: {:.1}% (E,I) [{}] (need {}%)",
            100.0 * p,
            fmt(&ie.pair_counts),
            100.0 * q,
            fmt(&ei.pair_counts),
            100.0 * RARE_PATTERN_SHARE
        ),
    )
}

fn degenerate_cases() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (a, b) in [(0.5, 0.5), (0.4, 0.4)] {
        let r = run_experiment(&noisy_spec(env(a, b, 0.5), 2.5), NOISY_TRIALS).unwrap();
        let (top, _) = r.pair_counts.argmax();
        let top_share = share(&r.pair_counts, top);
        pass &= r.verdict == Verdict::Indeterminate && top_share <= MAX_PAIR_SHARE;
        parts.push(format!(
            "{{{a},{b},0.5}} s=2.5: {}, top {top} {:.1}% (limit {}%)",
            r.verdict,
            100.0 * top_share,
            100.0 * MAX_PAIR_SHARE
        ));
    }
    let spec = TrialSpec::new(OneBitEnv::noise_free(0.0).unwrap(), 4.0, 2, 10_000, SEED).unwrap();
    let mut frozen = 0;
    for i in 0..1000 {
        let mut seen = Vec::with_capacity(2);
        let o = run_trial_observed(&spec, i, |_, team| {
            let now = team.automata()[1].action();
            if !seen.contains(&now) {
                seen.push(now);
            }
        })
        .unwrap();
        let held = seen.iter().all(|&a| a == o.initial_pair.ta2);
        frozen += u32::from(held);
    }
    pass &= frozen == 1000;
    parts.push(format!("noise-free c=0: TA2 kept its initial action in {frozen}/1000 trials"));
    outcome(pass, parts.join("; "))
}

fn verify_json(bin: &str) -> (Vec<u8>, Option<i32>) {
    let out = Command::new(bin)
        .args(["verify", "-a", "0.9", "-b", "0.1", "-c", "0.5", "-s", "3", "-N", "10"])
        .args(["--steps", "20000", "--trials", "200", "--seed", "7", "--format", "json"])
        .env_remove("TMCONV_SEED")
        .output()
        .expect("failed to run tmconv");
    (out.stdout, out.status.code())
}

fn reproducible_verify() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_tmconv");
    let (first, code1) = verify_json(bin);
    let (second, code2) = verify_json(bin);
    let same = !first.is_empty() && first == second && code1 == code2;
    outcome(
        same,
        format!("two verify runs: {} bytes each, identical: {same}, exit codes {code1:?}/{code2:?}", first.len()),
    )
}

fn main() -> ExitCode {
    let checks: [Check; 8] = [
        ("noise-free convergence to (I,E)", noise_free_absorption),
        ("feedback table transition frequencies", transition_frequencies),
        ("stationary solver vs dense solve", stationary_oracle),
        ("threshold algebra", threshold_algebra),
        ("noisy region consistency", noisy_regions),
        ("rare-pattern capture", rare_pattern),
        ("degenerate environments", degenerate_cases),
        ("byte-identical verify output", reproducible_verify),
    ];
    let mut failures = 0;
    for (name, check) in checks {
        let o = check();
        failures += usize::from(!o.pass);
        println!("[{}] {name}: {}", if o.pass { "pass" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} acceptance checks passed", checks.len() - failures, checks.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
