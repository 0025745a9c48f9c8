//! Experiment front end: a flat key-value configuration schema, seeded
//! (optionally parallel) runs, and deterministic learning-curve and
//! summary files.
//!
//! Config keys (`key = value`, `#` starts a comment):
//!
//! ```text
//! environment.kind          random-mdp | star-counterexample
//! environment.seed          u64, default 0            (random-mdp)
//! environment.num_states    required                  (random-mdp)
//! environment.num_actions   required                  (random-mdp)
//! environment.terminal_prob f64 in [0,1), default 0   (random-mdp)
//! question.gamma            constant or per-state comma list, default 0.9
//! question.target           greedy | uniform | rows "p,p;p,p;...", default uniform
//! question.terminal_bonus   optional constant terminal payout z, folded as (1-gamma(s'))*z
//! answer.behavior           uniform | rows, default uniform
//! answer.interest           constant or rows, default 1
//! answer.features           tabular | dense-random, default tabular
//! answer.feature_dim        required for dense-random
//! answer.lambda             constant or per-state comma list, default 0
//! learner.alpha             required, > 0
//! learner.eta               [0,1], default 1
//! learner.theta_init        zeros | comma list, default zeros
//! run.seeds                 required, comma list of u64
//! run.num_steps             required
//! run.report_every          default 1000
//! output.dir                default "out"
//! ```
//!
//! `question.target = greedy` selects the Greedy-GQ driver; the star
//! environment fixes its own question and answer functions, so only the
//! `learner.*`, `run.*`, `output.*`, and `answer.lambda` keys apply there.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{GqError, Result};
use crate::features::FeatureVector;
use crate::learner::LearnerState;
use crate::model::{AnswerFunctions, FiniteMdp, QuestionFunctions};
use crate::oracle::{evaluate_q_pi, optimal_q, rmse_vs_oracle, QTable};
use crate::sim::{
    dense_random_features, random_mdp, run_driver, star_counterexample, tabular_features,
    Algorithm, FeatureMap, RunConfig,
};

const ORACLE_TOL: f64 = 1e-12;
const ORACLE_MAX_ITERS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum EnvSpec {
    RandomMdp {
        seed: u64,
        num_states: usize,
        num_actions: usize,
        terminal_prob: f64,
    },
    StarCounterexample,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PerState {
    Constant(f64),
    Table(Vec<f64>),
}

impl PerState {
    pub fn at(&self, s: usize) -> f64 {
        match self {
            PerState::Constant(v) => *v,
            PerState::Table(t) => t[s],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolicySpec {
    Uniform,
    Table(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    Greedy,
    Uniform,
    Table(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum InterestSpec {
    Constant(f64),
    Table(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureSpec {
    Tabular,
    DenseRandom { dim: usize },
}

/// Fully validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub environment: EnvSpec,
    pub gamma: PerState,
    pub target: TargetSpec,
    pub terminal_bonus: Option<f64>,
    pub behavior: PolicySpec,
    pub interest: InterestSpec,
    pub features: FeatureSpec,
    pub lambda: PerState,
    pub alpha: f64,
    pub eta: f64,
    pub theta_init: Option<Vec<f64>>,
    pub seeds: Vec<u64>,
    pub num_steps: usize,
    pub report_every: usize,
    pub output_dir: PathBuf,
}

fn cfg_err(key: &str, message: impl Into<String>) -> GqError {
    GqError::Config { key: key.to_string(), message: message.into() }
}

struct KeyMap {
    entries: BTreeMap<String, String>,
    consumed: std::cell::RefCell<Vec<String>>,
}

impl KeyMap {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                cfg_err(&format!("line {}", lineno + 1), format!("expected `key = value`, got `{line}`"))
            })?;
            let key = key.trim().to_string();
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(cfg_err(&key, "duplicate key"));
            }
        }
        Ok(Self { entries, consumed: Default::default() })
    }

    fn get(&self, key: &str) -> Option<&str> {
        let v = self.entries.get(key).map(|s| s.as_str());
        if v.is_some() {
            self.consumed.borrow_mut().push(key.to_string());
        }
        v
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| cfg_err(key, "missing required key"))
    }

    fn check_exhausted(&self) -> Result<()> {
        let consumed = self.consumed.borrow();
        for key in self.entries.keys() {
            if !consumed.iter().any(|c| c == key) {
                return Err(cfg_err(key, "unknown or inapplicable key"));
            }
        }
        Ok(())
    }
}

fn parse_scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| cfg_err(key, format!("cannot parse `{value}`")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| parse_scalar(key, v.trim()))
        .collect()
}

fn parse_rows(key: &str, value: &str) -> Result<Vec<Vec<f64>>> {
    value
        .split(';')
        .map(|row| parse_list(key, row.trim()))
        .collect()
}

fn check_distribution_rows(key: &str, rows: &[Vec<f64>], num_states: usize, num_actions: usize) -> Result<()> {
    if rows.len() != num_states {
        return Err(cfg_err(key, format!("expected {num_states} rows, got {}", rows.len())));
    }
    for (s, row) in rows.iter().enumerate() {
        if row.len() != num_actions {
            return Err(cfg_err(key, format!("row {s}: expected {num_actions} entries, got {}", row.len())));
        }
        let total: f64 = row.iter().sum();
        if row.iter().any(|p| !(0.0..=1.0).contains(p)) || (total - 1.0).abs() > 1e-12 {
            return Err(cfg_err(key, format!("row {s} is not a probability distribution (sum {total})")));
        }
    }
    Ok(())
}

fn parse_per_state(key: &str, value: &str, num_states: usize, lo: f64, hi: f64) -> Result<PerState> {
    let list = parse_list(key, value)?;
    let per_state = if list.len() == 1 {
        PerState::Constant(list[0])
    } else if list.len() == num_states {
        PerState::Table(list)
    } else {
        return Err(cfg_err(key, format!("expected 1 or {num_states} entries, got {}", list.len())));
    };
    for s in 0..num_states {
        let v = per_state.at(s);
        if !(lo..=hi).contains(&v) {
            return Err(cfg_err(key, format!("value {v} outside [{lo},{hi}]")));
        }
    }
    Ok(per_state)
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let map = KeyMap::parse(text)?;

    let kind = map.required("environment.kind")?;
    let environment = match kind {
        "random-mdp" => {
            let seed = match map.get("environment.seed") {
                Some(v) => parse_scalar("environment.seed", v)?,
                None => 0,
            };
            let num_states: usize =
                parse_scalar("environment.num_states", map.required("environment.num_states")?)?;
            let num_actions: usize =
                parse_scalar("environment.num_actions", map.required("environment.num_actions")?)?;
            let terminal_prob = match map.get("environment.terminal_prob") {
                Some(v) => parse_scalar("environment.terminal_prob", v)?,
                None => 0.0,
            };
            if num_states < 2 {
                return Err(cfg_err("environment.num_states", "must be at least 2"));
            }
            if num_actions < 1 {
                return Err(cfg_err("environment.num_actions", "must be at least 1"));
            }
            if !(0.0..1.0).contains(&terminal_prob) {
                return Err(cfg_err("environment.terminal_prob", "must be in [0,1)"));
            }
            EnvSpec::RandomMdp { seed, num_states, num_actions, terminal_prob }
        }
        "star-counterexample" => EnvSpec::StarCounterexample,
        other => {
            return Err(cfg_err("environment.kind", format!("unknown environment `{other}`")));
        }
    };

    let (num_states, num_actions) = match &environment {
        EnvSpec::RandomMdp { num_states, num_actions, .. } => (*num_states, *num_actions),
        EnvSpec::StarCounterexample => (7, 2),
    };
    let star = environment == EnvSpec::StarCounterexample;

    let gamma = match map.get("question.gamma") {
        Some(v) if !star => parse_per_state("question.gamma", v, num_states, 0.0, 1.0)?,
        Some(_) => return Err(cfg_err("question.gamma", "fixed by the star environment")),
        None => PerState::Constant(if star { 0.99 } else { 0.9 }),
    };
    let target = match map.get("question.target") {
        Some(_) if star => return Err(cfg_err("question.target", "fixed by the star environment")),
        Some("greedy") => TargetSpec::Greedy,
        Some("uniform") | None => TargetSpec::Uniform,
        Some(rows) => {
            let rows = parse_rows("question.target", rows)?;
            check_distribution_rows("question.target", &rows, num_states, num_actions)?;
            TargetSpec::Table(rows)
        }
    };
    let terminal_bonus = match map.get("question.terminal_bonus") {
        Some(_) if star => {
            return Err(cfg_err("question.terminal_bonus", "fixed by the star environment"))
        }
        Some(v) => Some(parse_scalar("question.terminal_bonus", v)?),
        None => None,
    };

    let behavior = match map.get("answer.behavior") {
        Some(_) if star => return Err(cfg_err("answer.behavior", "fixed by the star environment")),
        Some("uniform") | None => PolicySpec::Uniform,
        Some(rows) => {
            let rows = parse_rows("answer.behavior", rows)?;
            check_distribution_rows("answer.behavior", &rows, num_states, num_actions)?;
            PolicySpec::Table(rows)
        }
    };
    let interest = match map.get("answer.interest") {
        Some(v) => {
            if v.contains(';') {
                let rows = parse_rows("answer.interest", v)?;
                if rows.len() != num_states || rows.iter().any(|r| r.len() != num_actions) {
                    return Err(cfg_err("answer.interest", "table shape must be num_states x num_actions"));
                }
                if rows.iter().flatten().any(|i| !(0.0..=1.0).contains(i)) {
                    return Err(cfg_err("answer.interest", "entries must lie in [0,1]"));
                }
                InterestSpec::Table(rows)
            } else {
                let c: f64 = parse_scalar("answer.interest", v)?;
                if !(0.0..=1.0).contains(&c) {
                    return Err(cfg_err("answer.interest", format!("{c} outside [0,1]")));
                }
                InterestSpec::Constant(c)
            }
        }
        None => InterestSpec::Constant(1.0),
    };
    let features = match map.get("answer.features") {
        Some(_) if star => return Err(cfg_err("answer.features", "fixed by the star environment")),
        Some("tabular") | None => FeatureSpec::Tabular,
        Some("dense-random") => {
            let dim: usize =
                parse_scalar("answer.feature_dim", map.required("answer.feature_dim")?)?;
            if dim == 0 {
                return Err(cfg_err("answer.feature_dim", "must be positive"));
            }
            FeatureSpec::DenseRandom { dim }
        }
        Some(other) => return Err(cfg_err("answer.features", format!("unknown feature map `{other}`"))),
    };
    let lambda = match map.get("answer.lambda") {
        Some(v) => parse_per_state("answer.lambda", v, num_states, 0.0, 1.0)?,
        None => PerState::Constant(0.0),
    };

    let alpha: f64 = parse_scalar("learner.alpha", map.required("learner.alpha")?)?;
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(cfg_err("learner.alpha", format!("{alpha} must be positive")));
    }
    let eta = match map.get("learner.eta") {
        Some(v) => {
            let eta: f64 = parse_scalar("learner.eta", v)?;
            if !(0.0..=1.0).contains(&eta) {
                return Err(cfg_err("learner.eta", format!("{eta} outside [0,1]")));
            }
            eta
        }
        None => 1.0,
    };
    let theta_init = match map.get("learner.theta_init") {
        Some("zeros") | None => None,
        Some(list) => Some(parse_list("learner.theta_init", list)?),
    };

    let seeds: Vec<u64> = map
        .required("run.seeds")?
        .split(',')
        .map(|v| parse_scalar("run.seeds", v.trim()))
        .collect::<Result<_>>()?;
    if seeds.is_empty() {
        return Err(cfg_err("run.seeds", "at least one seed is required"));
    }
    let num_steps: usize = parse_scalar("run.num_steps", map.required("run.num_steps")?)?;
    let report_every = match map.get("run.report_every") {
        Some(v) => {
            let r: usize = parse_scalar("run.report_every", v)?;
            if r == 0 {
                return Err(cfg_err("run.report_every", "must be positive"));
            }
            r
        }
        None => 1000,
    };
    let output_dir = PathBuf::from(map.get("output.dir").unwrap_or("out"));

    map.check_exhausted()?;

    Ok(ExperimentSpec {
        environment,
        gamma,
        target,
        terminal_bonus,
        behavior,
        interest,
        features,
        lambda,
        alpha,
        eta,
        theta_init,
        seeds,
        num_steps,
        report_every,
        output_dir,
    })
}

/// Environment, question, answer, and feature map realized from a spec.
pub struct Workbench {
    pub mdp: FiniteMdp,
    pub features: Arc<FeatureMap>,
    pub question: QuestionFunctions,
    pub answers: AnswerFunctions,
    pub algorithm: Algorithm,
}

/// Instantiates the MDP and the seven question/answer functions a spec
/// describes.
pub fn build_workbench(spec: &ExperimentSpec) -> Result<Workbench> {
    if let EnvSpec::StarCounterexample = spec.environment {
        let (mdp, features, question, mut answers) = star_counterexample();
        let lambda = spec.lambda.clone();
        answers.bootstrap = Arc::new(move |s| lambda.at(s));
        return Ok(Workbench {
            mdp,
            features: Arc::new(features),
            question,
            answers,
            algorithm: Algorithm::Gq,
        });
    }

    let EnvSpec::RandomMdp { seed, num_states, num_actions, terminal_prob } = spec.environment
    else {
        unreachable!()
    };
    let mdp = random_mdp(seed, num_states, num_actions, terminal_prob)?;
    let features = Arc::new(match spec.features {
        FeatureSpec::Tabular => tabular_features(&mdp),
        // features get their own deterministic substream of the env seed
        FeatureSpec::DenseRandom { dim } => dense_random_features(&mdp, dim, seed ^ 0x5eed_f00d),
    });

    let gamma = spec.gamma.clone();
    let terminal = mdp.terminal.clone();
    let discount: Arc<dyn Fn(usize) -> f64 + Send + Sync> =
        Arc::new(move |s| if terminal[s] { 0.0 } else { gamma.at(s) });

    let base_reward = mdp.reward.clone();
    let mut reward: Arc<dyn Fn(usize, usize, usize) -> f64 + Send + Sync> =
        Arc::new(move |s, a, s2| base_reward[s][a][s2]);
    if let Some(z) = spec.terminal_bonus {
        let d = Arc::clone(&discount);
        let base = Arc::clone(&reward);
        reward = Arc::new(move |s, a, s2| base(s, a, s2) + (1.0 - d(s2)) * z);
    }

    let (target_policy, algorithm): (Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>, Algorithm) =
        match &spec.target {
            // the driver re-derives the greedy policy from theta; the
            // uniform placeholder only keeps the question well-formed
            TargetSpec::Greedy => {
                (Arc::new(move |_, _| 1.0 / num_actions as f64), Algorithm::GreedyGq)
            }
            TargetSpec::Uniform => {
                (Arc::new(move |_, _| 1.0 / num_actions as f64), Algorithm::Gq)
            }
            TargetSpec::Table(rows) => {
                let rows = rows.clone();
                (Arc::new(move |s, a| rows[s][a]), Algorithm::Gq)
            }
        };

    let question = QuestionFunctions::new(target_policy, discount, reward);

    let behavior: Arc<dyn Fn(usize, usize) -> f64 + Send + Sync> = match &spec.behavior {
        PolicySpec::Uniform => Arc::new(move |_, _| 1.0 / num_actions as f64),
        PolicySpec::Table(rows) => {
            let rows = rows.clone();
            Arc::new(move |s, a| rows[s][a])
        }
    };
    let interest: Arc<dyn Fn(usize, usize) -> f64 + Send + Sync> = match &spec.interest {
        InterestSpec::Constant(c) => {
            let c = *c;
            Arc::new(move |_, _| c)
        }
        InterestSpec::Table(rows) => {
            let rows = rows.clone();
            Arc::new(move |s, a| rows[s][a])
        }
    };
    let lambda = spec.lambda.clone();
    let answers = AnswerFunctions::new(
        behavior,
        interest,
        features.as_fn(),
        Arc::new(move |s| lambda.at(s)),
    );

    question.validate(mdp.num_states, mdp.num_actions)?;
    answers.validate(mdp.num_states, mdp.num_actions)?;
    if algorithm == Algorithm::Gq {
        answers.validate_coverage(&question, mdp.num_states, mdp.num_actions)?;
    }

    Ok(Workbench { mdp, features, question, answers, algorithm })
}

/// Computes the ground-truth Q table a spec's runs are scored against:
/// policy evaluation for a fixed target, value iteration for greedy.
pub fn build_oracle(bench: &Workbench) -> Result<QTable> {
    match bench.algorithm {
        Algorithm::Gq => evaluate_q_pi(&bench.mdp, &bench.question, ORACLE_TOL, ORACLE_MAX_ITERS),
        Algorithm::GreedyGq => optimal_q(&bench.mdp, &bench.question, ORACLE_TOL, ORACLE_MAX_ITERS),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeedOutcome {
    Ok,
    Diverged { step: usize },
    Failed { message: String },
}

#[derive(Debug, Clone)]
pub struct SeedResult {
    pub seed: u64,
    pub outcome: SeedOutcome,
    pub final_rmse: Option<f64>,
    pub steps_completed: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub results: Vec<SeedResult>,
    pub mean_final_rmse: Option<f64>,
    pub output_dir: PathBuf,
}

struct CurveRow {
    step: usize,
    delta: f64,
    theta_norm: f64,
    trace_norm: f64,
    rmse: f64,
}

/// Lossless float printing for the output files.
fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| GqError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Runs every seed (in parallel), writes one curve file per seed plus a
/// summary file, and returns the summary. Identical specs produce
/// byte-identical files.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    let bench = build_workbench(spec)?;
    let oracle = build_oracle(&bench)?;
    let n = bench.features.n;
    let theta_init = match &spec.theta_init {
        Some(values) => Some(FeatureVector::new(values.clone())?),
        None => None,
    };

    let per_seed: Vec<(SeedResult, Vec<CurveRow>)> = spec
        .seeds
        .par_iter()
        .map(|&seed| {
            let learner = match LearnerState::new(n, spec.alpha, spec.eta, theta_init.clone()) {
                Ok(l) => l,
                Err(e) => {
                    return (
                        SeedResult {
                            seed,
                            outcome: SeedOutcome::Failed { message: e.to_string() },
                            final_rmse: None,
                            steps_completed: 0,
                        },
                        Vec::new(),
                    )
                }
            };
            let config = RunConfig {
                seed,
                num_steps: spec.num_steps,
                alpha: spec.alpha,
                eta: spec.eta,
                lambda_value: match spec.lambda {
                    PerState::Constant(v) => v,
                    PerState::Table(_) => f64::NAN,
                },
                algorithm: bench.algorithm,
                report_every: spec.report_every,
                variant: Default::default(),
            };
            let mut rows = Vec::new();
            let outcome = match run_driver(
                &bench.mdp,
                &bench.question,
                &bench.answers,
                learner,
                &config,
                |log| {
                    let rmse = rmse_vs_oracle(&log.theta, &bench.features, &oracle, &bench.mdp)
                        .unwrap_or(f64::NAN);
                    rows.push(CurveRow {
                        step: log.step,
                        delta: log.report.delta,
                        theta_norm: log.report.theta_norm,
                        trace_norm: log.report.trace_norm,
                        rmse,
                    });
                },
            ) {
                Ok(_) => SeedOutcome::Ok,
                Err(GqError::RunAborted { step, source }) => match *source {
                    GqError::Divergence { .. } => SeedOutcome::Diverged { step },
                    other => SeedOutcome::Failed { message: other.to_string() },
                },
                Err(other) => SeedOutcome::Failed { message: other.to_string() },
            };
            let steps_completed = match &outcome {
                SeedOutcome::Ok => spec.num_steps,
                SeedOutcome::Diverged { step } => *step,
                SeedOutcome::Failed { .. } => rows.last().map(|r| r.step).unwrap_or(0),
            };
            let final_rmse = rows.last().map(|r| r.rmse);
            (
                SeedResult { seed, outcome, final_rmse, steps_completed },
                rows,
            )
        })
        .collect();

    std::fs::create_dir_all(&spec.output_dir).map_err(|source| GqError::Io {
        path: spec.output_dir.display().to_string(),
        source,
    })?;

    // file writes happen here, serially and in seed order, so concurrency
    // never affects the bytes on disk
    for (result, rows) in &per_seed {
        let mut csv = String::from("seed,step,delta,theta_norm,trace_norm,rmse\n");
        for row in rows {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                result.seed,
                row.step,
                fmt_f(row.delta),
                fmt_f(row.theta_norm),
                fmt_f(row.trace_norm),
                fmt_f(row.rmse)
            );
        }
        write_file(
            &spec.output_dir.join(format!("curve_seed{}.csv", result.seed)),
            &csv,
        )?;
    }

    let results: Vec<SeedResult> = per_seed.into_iter().map(|(r, _)| r).collect();
    let ok_rmses: Vec<f64> = results
        .iter()
        .filter(|r| r.outcome == SeedOutcome::Ok)
        .filter_map(|r| r.final_rmse)
        .collect();
    let mean_final_rmse = if ok_rmses.is_empty() {
        None
    } else {
        Some(ok_rmses.iter().sum::<f64>() / ok_rmses.len() as f64)
    };

    let mut summary = String::new();
    let _ = writeln!(summary, "run.num_steps = {}", spec.num_steps);
    let _ = writeln!(summary, "run.report_every = {}", spec.report_every);
    let _ = writeln!(summary, "run.seed_count = {}", results.len());
    for r in &results {
        let status = match &r.outcome {
            SeedOutcome::Ok => "ok".to_string(),
            SeedOutcome::Diverged { .. } => "diverged".to_string(),
            SeedOutcome::Failed { message } => format!("failed: {message}"),
        };
        let _ = writeln!(summary, "seed.{}.status = {status}", r.seed);
        if let SeedOutcome::Diverged { step } = r.outcome {
            let _ = writeln!(summary, "seed.{}.diverged_at = {step}", r.seed);
        }
        let _ = writeln!(summary, "seed.{}.steps_completed = {}", r.seed, r.steps_completed);
        if let Some(rmse) = r.final_rmse {
            let _ = writeln!(summary, "seed.{}.final_rmse = {}", r.seed, fmt_f(rmse));
        }
    }
    if let Some(mean) = mean_final_rmse {
        let _ = writeln!(summary, "mean_final_rmse = {}", fmt_f(mean));
    }
    write_file(&spec.output_dir.join("summary.txt"), &summary)?;

    Ok(ExperimentSummary {
        results,
        mean_final_rmse,
        output_dir: spec.output_dir.clone(),
    })
}

/// Renders the spec's oracle Q table as text (the `oracle` subcommand).
pub fn render_oracle(spec: &ExperimentSpec) -> Result<String> {
    let bench = build_workbench(spec)?;
    let oracle = build_oracle(&bench)?;
    let mut out = String::new();
    let _ = writeln!(out, "# iterations = {}, residual = {}", oracle.iterations, fmt_f(oracle.residual));
    let _ = writeln!(out, "state,action,q");
    for s in 0..bench.mdp.num_states {
        for a in 0..bench.mdp.num_actions {
            let _ = writeln!(out, "{s},{a},{}", fmt_f(oracle.get(s, a)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
        environment.kind = random-mdp
        environment.num_states = 4
        environment.num_actions = 2
        learner.alpha = 0.05
        run.seeds = 1,2
        run.num_steps = 100
    ";

    #[test]
    fn minimal_config_gets_defaults() {
        let spec = parse_config(MINIMAL).unwrap();
        assert_eq!(spec.eta, 1.0);
        assert_eq!(spec.interest, InterestSpec::Constant(1.0));
        assert_eq!(spec.theta_init, None);
        assert_eq!(spec.gamma, PerState::Constant(0.9));
        assert_eq!(spec.lambda, PerState::Constant(0.0));
        assert_eq!(spec.target, TargetSpec::Uniform);
        assert_eq!(spec.behavior, PolicySpec::Uniform);
        assert_eq!(spec.features, FeatureSpec::Tabular);
        assert_eq!(spec.report_every, 1000);
        assert_eq!(spec.seeds, vec![1, 2]);
    }

    #[test]
    fn eta_out_of_range_names_the_key() {
        let text = format!("{MINIMAL}\nlearner.eta = 1.5\n");
        match parse_config(&text) {
            Err(GqError::Config { key, .. }) => assert_eq!(key, "learner.eta"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn bad_behavior_row_is_rejected() {
        let text = format!(
            "{MINIMAL}\nanswer.behavior = 0.5,0.4; 0.5,0.5; 0.5,0.5; 0.5,0.5\n"
        );
        match parse_config(&text) {
            Err(GqError::Config { key, .. }) => assert_eq!(key, "answer.behavior"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = format!("{MINIMAL}\nlearner.momentum = 0.9\n");
        match parse_config(&text) {
            Err(GqError::Config { key, .. }) => assert_eq!(key, "learner.momentum"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn missing_required_key_is_rejected() {
        match parse_config("environment.kind = random-mdp") {
            Err(GqError::Config { key, .. }) => assert_eq!(key, "environment.num_states"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn star_rejects_inapplicable_keys() {
        let text = "
            environment.kind = star-counterexample
            question.gamma = 0.5
            learner.alpha = 0.01
            run.seeds = 1
            run.num_steps = 10
        ";
        assert!(matches!(parse_config(text), Err(GqError::Config { key, .. }) if key == "question.gamma"));
    }

    #[test]
    fn greedy_target_selects_greedy_gq() {
        let text = format!("{MINIMAL}\nquestion.target = greedy\n");
        let spec = parse_config(&text).unwrap();
        assert_eq!(spec.target, TargetSpec::Greedy);
        let bench = build_workbench(&spec).unwrap();
        assert_eq!(bench.algorithm, Algorithm::GreedyGq);
    }
}
