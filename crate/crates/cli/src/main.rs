mod args;

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use tmconv_core::lab::{linear_grid, write_csv};
use tmconv_core::{
    c_thresholds, predict_regions, run_experiment, sweep, ta1_chain, ta2_chain, thresholds, ActionKind,
    BirthDeathChain, CThresholds, Error, ExperimentReport, OneBitEnv, RegionPrediction, StationaryDist, SweepAxis,
    ThresholdSet, TrialSpec, Verdict,
};

use args::{Cli, Command, EnvArgs, Format, GridArgs, RunArgs};

const STEP_BUDGET: u64 = 1_000_000_000;
const SEED_VAR: &str = "TMCONV_SEED";

enum Failure {
    Usage(String),
    Core(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(Error::InvalidArgument(_) | Error::UndefinedThreshold { .. }) => 2,
            Failure::Core(_) | Failure::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> CliResult<u8> {
    let Cli { command, format, output } = cli;
    let (body, code) = match command {
        Command::Thresholds(env) => (cmd_thresholds(&env, format.unwrap_or(Format::Text))?, 0),
        Command::Predict { env, s } => (cmd_predict(&env, s, format.unwrap_or(Format::Text))?, 0),
        Command::Chains { env, s, depth } => (cmd_chains(&env, s, depth, format.unwrap_or(Format::Text))?, 0),
        Command::Stationary { alpha, beta, gamma, depth } => {
            (cmd_stationary(alpha, beta, gamma, depth, format.unwrap_or(Format::Text))?, 0)
        }
        Command::Simulate(run) => (cmd_run(&run, format.unwrap_or(Format::Json))?.0, 0),
        Command::Verify(run) => {
            let (body, verdict) = cmd_run(&run, format.unwrap_or(Format::Json))?;
            let code = match verdict {
                Verdict::Consistent => 0,
                Verdict::Inconsistent => 1,
                Verdict::Indeterminate => 4,
            };
            (body, code)
        }
        Command::Sweep { run, grid } => (cmd_sweep(&run, &grid, format.unwrap_or(Format::Csv))?, 0),
    };
    match output {
        Some(path) => File::create(path)?.write_all(body.as_bytes())?,
        None => io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(code)
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Core(Error::Output(e.to_string())))?;
    s.push('\n');
    Ok(s)
}

fn unsupported(format: Format, command: &str) -> Failure {
    Failure::Usage(format!("{command} does not support --format {format:?}").to_lowercase())
}

fn build_env(args: &EnvArgs, c_override: Option<f64>) -> CliResult<OneBitEnv> {
    let c = c_override
        .or(args.c)
        .ok_or_else(|| Failure::Usage("missing -c (input bias P(x = 1))".into()))?;
    let env = if args.noise_free {
        OneBitEnv::noise_free(c)?
    } else {
        // clap guarantees both are present without --noise-free
        OneBitEnv::new(args.a.unwrap_or(f64::NAN), args.b.unwrap_or(f64::NAN), c)?
    };
    Ok(env)
}

/// Twelve significant digits, so `15.000000000000004` prints as `15`.
fn short(v: f64) -> String {
    if !v.is_finite() || v == 0.0 {
        return v.to_string();
    }
    let digits = (11 - v.abs().log10().floor() as i32).clamp(0, 300) as usize;
    let s = format!("{v:.digits$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

fn named(names: &[&str], values: &[f64]) -> String {
    names.iter().zip(values).map(|(n, v)| format!("{n}={}", short(*v))).collect::<Vec<_>>().join(" ")
}

fn check_s(s: f64) -> CliResult<()> {
    if !(s >= 1.0 && s.is_finite()) {
        return Err(Failure::Usage(format!("s must be a finite real >= 1, got {s}")));
    }
    if s == 1.0 {
        eprintln!("warning: s = 1 drops every (s-1)/s feedback term; results sit on a threshold boundary");
    }
    Ok(())
}

#[derive(Serialize)]
struct ThresholdsOut {
    env: OneBitEnv,
    thresholds: ThresholdSet,
    c_thresholds: Option<CThresholds>,
}

fn cmd_thresholds(args: &EnvArgs, format: Format) -> CliResult<String> {
    let env = build_env(args, None)?;
    let t = thresholds(&env)?;
    let c = match c_thresholds(env.a, env.b) {
        Err(e @ Error::UndefinedThreshold { .. }) => Err(e),
        other => Ok(other?),
    };
    match format {
        Format::Text => {
            let s_line = named(&["s1", "s2", "s3", "s4", "s5", "s6"], &t.as_array());
            let c_line = match &c {
                Ok(c) => named(&["c1", "c2", "c3", "c4"], &c.as_array()),
                Err(e) => format!("c thresholds: {e}"),
            };
            Ok(format!("{s_line}\n{c_line}\n"))
        }
        Format::Json => to_json(&ThresholdsOut { env, thresholds: t, c_thresholds: c.ok() }),
        Format::Csv => Err(unsupported(format, "thresholds")),
    }
}

#[derive(Serialize)]
struct PredictOut {
    env: OneBitEnv,
    s: f64,
    prediction: RegionPrediction,
}

fn cmd_predict(args: &EnvArgs, s: f64, format: Format) -> CliResult<String> {
    let env = build_env(args, None)?;
    check_s(s)?;
    let prediction = predict_regions(&env, s)?;
    match format {
        Format::Text => Ok(format!("{prediction}\n")),
        Format::Json => to_json(&PredictOut { env, s, prediction }),
        Format::Csv => Err(unsupported(format, "predict")),
    }
}

#[derive(Serialize)]
struct ChainOut {
    automaton: u8,
    peer: ActionKind,
    chain: BirthDeathChain,
    asymptotic: tmconv_core::AsymptoticAction,
}

fn cmd_chains(args: &EnvArgs, s: f64, depth: u32, format: Format) -> CliResult<String> {
    let env = build_env(args, None)?;
    check_s(s)?;
    let mut chains = Vec::with_capacity(4);
    for peer in [ActionKind::Include, ActionKind::Exclude] {
        let chain = ta1_chain(&env, s, peer, depth)?;
        chains.push(ChainOut { automaton: 1, peer, chain, asymptotic: chain.asymptotic_action() });
    }
    for peer in [ActionKind::Include, ActionKind::Exclude] {
        let chain = ta2_chain(&env, s, peer, depth)?;
        chains.push(ChainOut { automaton: 2, peer, chain, asymptotic: chain.asymptotic_action() });
    }
    match format {
        Format::Text => {
            let mut out = String::new();
            for c in &chains {
                let peer = 3 - c.automaton;
                let _ = writeln!(
                    out,
                    "TA{} | TA{peer}={}: {} -> {:?}",
                    c.automaton,
                    c.peer.letter(),
                    named(&["alpha", "beta", "gamma"], &[c.chain.alpha, c.chain.beta, c.chain.gamma]),
                    c.asymptotic
                );
            }
            Ok(out)
        }
        Format::Json => to_json(&chains),
        Format::Csv => Err(unsupported(format, "chains")),
    }
}

#[derive(Serialize)]
struct StationaryOut {
    chain: BirthDeathChain,
    stationary: StationaryDist,
    include_mass: f64,
}

fn cmd_stationary(alpha: f64, beta: f64, gamma: f64, depth: u32, format: Format) -> CliResult<String> {
    let chain = BirthDeathChain::new(alpha, beta, gamma, depth)?;
    let dist = chain.stationary()?;
    let include_mass = dist.include_mass(depth);
    match format {
        Format::Text => {
            let pi: Vec<String> = dist.pi().iter().map(|p| short(*p)).collect();
            Ok(format!("pi: {}\ninclude_mass: {}\n", pi.join(" "), short(include_mass)))
        }
        Format::Json => to_json(&StationaryOut { chain, stationary: dist, include_mass }),
        Format::Csv => Err(unsupported(format, "stationary")),
    }
}

fn resolve_seed(flag: u64) -> CliResult<u64> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Usage(format!("{SEED_VAR} must be a u64, got {v:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(flag),
        Err(e) => Err(Failure::Usage(format!("{SEED_VAR}: {e}"))),
    }
}

fn build_spec(run: &RunArgs, s: f64, c_override: Option<f64>) -> CliResult<TrialSpec> {
    let env = build_env(&run.env, c_override)?;
    let (depth, steps) = if run.env.noise_free { (2, 10_000) } else { (50, 200_000) };
    let depth = run.depth.unwrap_or(depth);
    let steps = run.steps.unwrap_or(steps);
    let mut spec = TrialSpec::new(env, s, depth, steps, resolve_seed(run.seed)?)?;
    if let Some(w) = run.tail_window {
        spec = spec.with_tail_window(w)?;
    }
    Ok(spec)
}

fn prepare(run: &RunArgs, points: u64, steps: u64) -> CliResult<()> {
    if run.trials == 0 {
        return Err(Failure::Usage("--trials must be positive".into()));
    }
    let total = steps.checked_mul(run.trials).and_then(|t| t.checked_mul(points));
    if !run.force && total.map_or(true, |t| t > STEP_BUDGET) {
        return Err(Failure::Usage(format!(
            "{points} x {} trials x {steps} steps exceeds {STEP_BUDGET} simulated steps; pass --force to run anyway",
            run.trials
        )));
    }
    if let Some(n) = run.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("--threads: {e}")))?;
    }
    Ok(())
}

fn report_text(r: &ExperimentReport) -> String {
    let mut out = String::new();
    let e = &r.spec.env;
    let _ = writeln!(
        out,
        "env a={} b={} c={} s={} N={} steps={} trials={} seed={}",
        e.a, e.b, e.c, r.spec.s, r.spec.depth, r.spec.steps, r.trials, r.spec.base_seed
    );
    let _ = writeln!(out, "predicted: {}", r.prediction);
    let counts: Vec<String> = tmconv_core::ActionPair::ALL
        .iter()
        .map(|p| format!("{p}={}", r.pair_counts.get(*p)))
        .collect();
    let _ = writeln!(out, "tail-dominant: {}", counts.join(" "));
    let _ = writeln!(out, "verdict: {} (confidence {:.4})", r.verdict, r.confidence);
    out
}

fn cmd_run(run: &RunArgs, format: Format) -> CliResult<(String, Verdict)> {
    let s = run.s.ok_or_else(|| Failure::Usage("missing -s".into()))?;
    check_s(s)?;
    let spec = build_spec(run, s, None)?;
    prepare(run, 1, spec.steps)?;
    let report = run_experiment(&spec, run.trials)?;
    let body = match format {
        Format::Text => report_text(&report),
        Format::Json => to_json(&report)?,
        Format::Csv => csv_string(std::slice::from_ref(&report))?,
    };
    Ok((body, report.verdict))
}

fn csv_string(reports: &[ExperimentReport]) -> CliResult<String> {
    let mut buf = Vec::new();
    write_csv(reports, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Failure::Core(Error::Output(e.to_string())))
}

fn cmd_sweep(run: &RunArgs, grid: &GridArgs, format: Format) -> CliResult<String> {
    let (axis, spec) = match (grid.s_from, grid.c_from) {
        (Some(from), None) => {
            // requires_all on the flag guarantees both bounds
            let values = linear_grid(from, grid.s_to.unwrap_or(from), grid.s_step.unwrap_or(1.0))?;
            values.iter().try_for_each(|&s| check_s(s))?;
            (SweepAxis::S(values.clone()), build_spec(run, values[0], None)?)
        }
        (None, Some(from)) => {
            let s = run.s.ok_or_else(|| Failure::Usage("missing -s for a sweep over c".into()))?;
            check_s(s)?;
            let values = linear_grid(from, grid.c_to.unwrap_or(from), grid.c_step.unwrap_or(1.0))?;
            (SweepAxis::C(values.clone()), build_spec(run, s, Some(values[0]))?)
        }
        _ => return Err(Failure::Usage("sweep needs --s-from/--s-to/--s-step or --c-from/--c-to/--c-step".into())),
    };
    prepare(run, axis.values().len() as u64, spec.steps)?;
    let reports = sweep(&axis, &spec, run.trials)?;
    match format {
        Format::Csv => csv_string(&reports),
        Format::Json => to_json(&reports),
        Format::Text => Ok(reports.iter().map(report_text).collect::<Vec<_>>().join("\n")),
    }
}
