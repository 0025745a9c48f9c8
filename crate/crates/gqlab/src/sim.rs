//! Finite-MDP environments, feature-map constructors, and the episode
//! driver: select A ~ b, step the environment, build phi_bar and rho, and
//! feed the learner.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GqError, Result};
use crate::features::FeatureVector;
use crate::learner::{GqStepInput, GqStepReport, LearnerState, UpdateVariant};
use crate::model::{
    expected_features_under, expected_next_features, greedy_target_policy, importance_ratio,
    Action, AnswerFunctions, FiniteMdp, QuestionFunctions, State,
};

/// One environment step as observed by the driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub state: State,
    pub action: Action,
    pub next_state: State,
    pub terminal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Tabular,
    DenseRandom,
    Explicit,
}

/// Frozen per-(s,a) feature table.
#[derive(Debug, Clone)]
pub struct FeatureMap {
    pub kind: FeatureKind,
    pub n: usize,
    num_actions: usize,
    table: Vec<FeatureVector>,
}

impl FeatureMap {
    pub fn get(&self, s: State, a: Action) -> &FeatureVector {
        &self.table[s * self.num_actions + a]
    }

    pub fn from_table(kind: FeatureKind, num_actions: usize, table: Vec<FeatureVector>) -> Self {
        let n = table[0].dim();
        Self { kind, n, num_actions, table }
    }

    /// The feature closure handed to [`AnswerFunctions`].
    pub fn as_fn(self: &Arc<Self>) -> Arc<dyn Fn(State, Action) -> FeatureVector + Send + Sync> {
        let map = Arc::clone(self);
        Arc::new(move |s, a| map.get(s, a).clone())
    }
}

/// One-hot feature per (s,a) pair at coordinate s * num_actions + a.
pub fn tabular_features(mdp: &FiniteMdp) -> FeatureMap {
    let n = mdp.num_states * mdp.num_actions;
    let table = (0..mdp.num_states)
        .flat_map(|s| {
            (0..mdp.num_actions).map(move |a| FeatureVector::one_hot(n, s * mdp.num_actions + a))
        })
        .collect();
    FeatureMap { kind: FeatureKind::Tabular, n, num_actions: mdp.num_actions, table }
}

/// Dense feature table with entries drawn uniformly from [-1, 1] once at
/// construction.
pub fn dense_random_features(mdp: &FiniteMdp, n: usize, seed: u64) -> FeatureMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = (0..mdp.num_states * mdp.num_actions)
        .map(|_| {
            FeatureVector::new((0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect())
                .expect("finite draws")
        })
        .collect();
    FeatureMap { kind: FeatureKind::DenseRandom, n, num_actions: mdp.num_actions, table }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Fixed target policy from the question functions.
    Gq,
    /// Target policy re-derived greedily from the current theta each step.
    GreedyGq,
}

/// Run parameters for one seeded driver execution.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub num_steps: usize,
    pub alpha: f64,
    pub eta: f64,
    pub lambda_value: f64,
    pub algorithm: Algorithm,
    pub report_every: usize,
    pub variant: UpdateVariant,
}

impl RunConfig {
    pub fn new(seed: u64, num_steps: usize, alpha: f64) -> Self {
        Self {
            seed,
            num_steps,
            alpha,
            eta: 1.0,
            lambda_value: 0.0,
            algorithm: Algorithm::Gq,
            report_every: 1,
            variant: UpdateVariant::Full,
        }
    }
}

/// Everything the driver knows about one step, handed to the sink every
/// `report_every` steps. `post_accum_trace` is the trace after the
/// rho-and-interest accumulation, before the gamma-lambda decay.
#[derive(Debug, Clone)]
pub struct StepLog {
    /// 1-based step index within the run.
    pub step: usize,
    pub transition: Transition,
    pub input: GqStepInput,
    pub report: GqStepReport,
    pub post_accum_trace: FeatureVector,
    pub theta: FeatureVector,
    pub w: FeatureVector,
}

fn sample_index(rng: &mut ChaCha8Rng, probs: impl Iterator<Item = f64>) -> usize {
    let u: f64 = rng.gen();
    let mut cum = 0.0;
    let mut last = 0;
    for (i, p) in probs.enumerate() {
        cum += p;
        last = i;
        if u < cum {
            return i;
        }
    }
    // rounding slack at the top of the CDF
    last
}

/// Executes episodes until `config.num_steps` environment steps have been
/// consumed, feeding each step to the learner. Fully deterministic given
/// `config.seed`.
pub fn run_driver(
    mdp: &FiniteMdp,
    q: &QuestionFunctions,
    ans: &AnswerFunctions,
    mut learner: LearnerState,
    config: &RunConfig,
    mut sink: impl FnMut(&StepLog),
) -> Result<LearnerState> {
    let actions = mdp.actions();
    let mut env_rng = ChaCha8Rng::seed_from_u64(config.seed);
    env_rng.set_stream(0);
    let mut behavior_rng = ChaCha8Rng::seed_from_u64(config.seed);
    behavior_rng.set_stream(1);

    let mut step = 0usize;
    'episodes: while step < config.num_steps {
        learner.reset_traces();
        let mut state = sample_index(&mut env_rng, mdp.initial_distribution.iter().copied());
        loop {
            if step >= config.num_steps {
                break 'episodes;
            }
            let action = sample_index(
                &mut behavior_rng,
                actions.iter().map(|&a| (ans.behavior_policy)(state, a)),
            );
            let next_state =
                sample_index(&mut env_rng, mdp.transition[state][action].iter().copied());
            let terminal = mdp.is_terminal(next_state);

            let abort = |e: GqError| GqError::RunAborted { step: step + 1, source: Box::new(e) };

            let (rho, phi_bar) = match config.algorithm {
                Algorithm::Gq => {
                    let rho = importance_ratio(q, ans, state, action).map_err(abort)?;
                    let phi_bar = if terminal {
                        FeatureVector::zeros(learner.dim())
                    } else {
                        expected_next_features(q, ans, next_state, &actions).map_err(abort)?
                    };
                    (rho, phi_bar)
                }
                Algorithm::GreedyGq => {
                    let greedy_here =
                        greedy_target_policy(&learner.theta, ans, state, &actions).map_err(abort)?;
                    let b = (ans.behavior_policy)(state, action);
                    if b == 0.0 {
                        return Err(abort(GqError::CoverageViolation { state, action }));
                    }
                    let rho = greedy_here[action] / b;
                    let phi_bar = if terminal {
                        FeatureVector::zeros(learner.dim())
                    } else {
                        let greedy_next =
                            greedy_target_policy(&learner.theta, ans, next_state, &actions)
                                .map_err(abort)?;
                        expected_features_under(&|a| greedy_next[a], ans, next_state, &actions)
                            .map_err(abort)?
                    };
                    (rho, phi_bar)
                }
            };

            let input = GqStepInput {
                phi: (ans.features)(state, action),
                phi_bar,
                lambda_next: if terminal { 0.0 } else { (ans.bootstrap)(next_state) },
                gamma_next: if terminal { 0.0 } else { (q.discount)(next_state) },
                reward: (q.reward)(state, action, next_state),
                rho,
                interest: (ans.interest)(state, action),
            };

            // matches the learner's accumulation bitwise: e <- rho*e + I*phi
            let mut post_accum_trace = learner.e.clone();
            post_accum_trace.scale(input.rho);
            post_accum_trace
                .add_scaled(input.interest, &input.phi)
                .map_err(abort)?;

            let report = learner.gq_learn_variant(&input, config.variant).map_err(abort)?;
            step += 1;

            if step.is_multiple_of(config.report_every) {
                sink(&StepLog {
                    step,
                    transition: Transition { state, action, next_state, terminal },
                    input,
                    report,
                    post_accum_trace,
                    theta: learner.theta.clone(),
                    w: learner.w.clone(),
                });
            }

            if terminal {
                continue 'episodes;
            }
            state = next_state;
        }
    }
    Ok(learner)
}

/// Seeded random finite MDP. Every non-terminal row has full support over
/// the non-terminal states plus exactly `terminal_prob` mass on a single
/// designated terminal state (the last index) when `terminal_prob > 0`.
/// Rewards are uniform in [-1, 1].
pub fn random_mdp(
    seed: u64,
    num_states: usize,
    num_actions: usize,
    terminal_prob: f64,
) -> Result<FiniteMdp> {
    if num_states < 2 || num_actions < 1 {
        return Err(GqError::InvalidModel(format!(
            "random_mdp needs num_states >= 2 and num_actions >= 1, got {num_states}/{num_actions}"
        )));
    }
    if !(0.0..1.0).contains(&terminal_prob) {
        return Err(GqError::InvalidParameter {
            name: "terminal_prob",
            message: format!("{terminal_prob} outside [0,1)"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);

    let has_terminal = terminal_prob > 0.0;
    let terminal_state = num_states - 1;
    let live_states: Vec<usize> = if has_terminal {
        (0..terminal_state).collect()
    } else {
        (0..num_states).collect()
    };

    let mut transition = vec![vec![vec![0.0; num_states]; num_actions]; num_states];
    let mut reward = vec![vec![vec![0.0; num_states]; num_actions]; num_states];
    for s in 0..num_states {
        for a in 0..num_actions {
            for s2 in 0..num_states {
                reward[s][a][s2] = rng.gen_range(-1.0..=1.0);
            }
            if has_terminal && s == terminal_state {
                transition[s][a][s] = 1.0; // never stepped from
                continue;
            }
            // exponential draws normalized over the live states
            let draws: Vec<f64> = live_states.iter().map(|_| -rng.gen::<f64>().ln()).collect();
            let total: f64 = draws.iter().sum();
            let live_mass = 1.0 - if has_terminal { terminal_prob } else { 0.0 };
            for (&s2, d) in live_states.iter().zip(&draws) {
                transition[s][a][s2] = live_mass * d / total;
            }
            if has_terminal {
                transition[s][a][terminal_state] = terminal_prob;
            }
        }
    }

    let mut terminal = vec![false; num_states];
    if has_terminal {
        terminal[terminal_state] = true;
    }
    let live_count = live_states.len() as f64;
    let mut initial_distribution = vec![0.0; num_states];
    for &s in &live_states {
        initial_distribution[s] = 1.0 / live_count;
    }

    let mdp = FiniteMdp {
        num_states,
        num_actions,
        transition,
        terminal,
        initial_distribution,
        reward,
    };
    mdp.validate()?;
    Ok(mdp)
}

/// The classic 7-state, 2-action off-policy divergence construction with
/// overparameterized 8-dimensional features. Action 0 is "dashed" (uniform
/// jump to the first six states), action 1 is "solid" (always to the
/// seventh). The target policy always takes solid; the behavior policy
/// takes it with probability 1/7. All rewards are zero, gamma = 0.99.
pub fn star_counterexample() -> (FiniteMdp, FeatureMap, QuestionFunctions, AnswerFunctions) {
    const NS: usize = 7;
    const NA: usize = 2;
    const DIM: usize = 8;
    const SOLID: usize = 1;

    let mut transition = vec![vec![vec![0.0; NS]; NA]; NS];
    for s in 0..NS {
        for s2 in 0..6 {
            transition[s][0][s2] = 1.0 / 6.0;
        }
        transition[s][SOLID][6] = 1.0;
    }
    let mdp = FiniteMdp {
        num_states: NS,
        num_actions: NA,
        transition,
        terminal: vec![false; NS],
        initial_distribution: vec![1.0 / NS as f64; NS],
        reward: vec![vec![vec![0.0; NS]; NA]; NS],
    };

    // Solid pairs carry the classic overparameterized state features:
    // state i < 6 puts weight 2 on its own component plus the shared bias,
    // the seventh state doubles the bias instead. Dashed pairs get the
    // zero vector, so only solid transitions (which always bootstrap on
    // the seventh state) touch the weights. This is what makes the
    // construction lethal for uncorrected off-policy TD.
    let mut table = Vec::with_capacity(NS * NA);
    for s in 0..NS {
        let mut values = vec![0.0; DIM];
        if s < 6 {
            values[s] = 2.0;
            values[7] = 1.0;
        } else {
            values[6] = 1.0;
            values[7] = 2.0;
        }
        table.push(FeatureVector::zeros(DIM)); // dashed
        table.push(FeatureVector::new(values).expect("finite")); // solid
    }
    let features = Arc::new(FeatureMap {
        kind: FeatureKind::Explicit,
        n: DIM,
        num_actions: NA,
        table,
    });

    let q = QuestionFunctions::new(
        Arc::new(|_, a| if a == SOLID { 1.0 } else { 0.0 }),
        Arc::new(|_| 0.99),
        Arc::new(|_, _, _| 0.0),
    );
    let ans = AnswerFunctions::new(
        Arc::new(|_, a| if a == SOLID { 1.0 / 7.0 } else { 6.0 / 7.0 }),
        Arc::new(|_, _| 1.0),
        features.as_fn(),
        Arc::new(|_| 0.0),
    );
    (mdp, features.as_ref().clone(), q, ans)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabular_features_layout() {
        let mdp = random_mdp(7, 2, 2, 0.0).unwrap();
        let fm = tabular_features(&mdp);
        assert_eq!(fm.n, 4);
        assert_eq!(fm.get(1, 0).values(), &[0.0, 0.0, 1.0, 0.0]);
        // pairwise orthogonality and unit norm
        for i in 0..2 {
            for ai in 0..2 {
                assert_eq!(fm.get(i, ai).norm(), 1.0);
                for j in 0..2 {
                    for aj in 0..2 {
                        if (i, ai) != (j, aj) {
                            assert_eq!(fm.get(i, ai).dot(fm.get(j, aj)).unwrap(), 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn random_mdp_is_deterministic_and_stochastic_rows() {
        let a = random_mdp(42, 5, 3, 0.1).unwrap();
        let b = random_mdp(42, 5, 3, 0.1).unwrap();
        assert_eq!(a.transition, b.transition);
        assert_eq!(a.reward, b.reward);
        for s in 0..4 {
            for act in 0..3 {
                let total: f64 = a.transition[s][act].iter().sum();
                assert!((total - 1.0).abs() < 1e-12);
                assert!((a.transition[s][act][4] - 0.1).abs() < 1e-15);
            }
        }
        assert!(a.terminal[4]);
    }

    #[test]
    fn random_mdp_without_terminal() {
        let m = random_mdp(3, 4, 2, 0.0).unwrap();
        assert!(m.terminal.iter().all(|t| !t));
        for s in 0..4 {
            for a in 0..2 {
                assert!(m.transition[s][a].iter().all(|p| *p > 0.0));
            }
        }
    }

    #[test]
    fn random_mdp_rejects_bad_sizes() {
        assert!(random_mdp(0, 1, 2, 0.0).is_err());
        assert!(random_mdp(0, 3, 0, 0.0).is_err());
        assert!(random_mdp(0, 3, 1, 1.0).is_err());
    }

    #[test]
    fn star_construction_basics() {
        let (mdp, fm, q, ans) = star_counterexample();
        mdp.validate().unwrap();
        q.validate(7, 2).unwrap();
        ans.validate(7, 2).unwrap();
        assert!(mdp.reward.iter().flatten().flatten().all(|r| *r == 0.0));
        // rho for the solid action is 7
        assert_eq!(importance_ratio(&q, &ans, 3, 1).unwrap(), 7.0);
        assert_eq!(fm.get(6, 1).values(), &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 2.0]);
        assert_eq!(fm.get(2, 1).values(), &[0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(fm.get(2, 0).values().iter().all(|v| *v == 0.0));
    }

    fn simple_setup(
        seed: u64,
        on_policy: bool,
    ) -> (FiniteMdp, QuestionFunctions, AnswerFunctions) {
        let mdp = random_mdp(seed, 3, 2, 0.0).unwrap();
        let fm = Arc::new(tabular_features(&mdp));
        let pi: Arc<dyn Fn(usize, usize) -> f64 + Send + Sync> = if on_policy {
            Arc::new(|_, a| if a == 0 { 0.6 } else { 0.4 })
        } else {
            Arc::new(|_, a| if a == 0 { 0.2 } else { 0.8 })
        };
        let reward = mdp.reward.clone();
        let q = QuestionFunctions::new(
            pi,
            Arc::new(|_| 0.9),
            Arc::new(move |s, a, s2| reward[s][a][s2]),
        );
        let ans = AnswerFunctions::new(
            Arc::new(|_, a| if a == 0 { 0.6 } else { 0.4 }),
            Arc::new(|_, _| 1.0),
            fm.as_fn(),
            Arc::new(|_| 0.5),
        );
        (mdp, q, ans)
    }

    #[test]
    fn empty_run_returns_learner_unchanged() {
        let (mdp, q, ans) = simple_setup(1, false);
        let learner = LearnerState::new(6, 0.1, 1.0, None).unwrap();
        let snapshot = learner.clone();
        let mut reports = 0;
        let config = RunConfig::new(5, 0, 0.1);
        let out = run_driver(&mdp, &q, &ans, learner, &config, |_| reports += 1).unwrap();
        assert_eq!(out, snapshot);
        assert_eq!(reports, 0);
    }

    #[test]
    fn on_policy_rho_is_one() {
        let (mdp, q, ans) = simple_setup(1, true);
        let learner = LearnerState::new(6, 0.05, 1.0, None).unwrap();
        let config = RunConfig::new(9, 500, 0.05);
        run_driver(&mdp, &q, &ans, learner, &config, |log| {
            assert_eq!(log.input.rho, 1.0);
        })
        .unwrap();
    }

    #[test]
    fn fixed_seed_runs_are_bitwise_identical() {
        let (mdp, q, ans) = simple_setup(4, false);
        let config = RunConfig::new(11, 100, 0.05);
        let run = || {
            let learner = LearnerState::new(6, 0.05, 1.0, None).unwrap();
            run_driver(&mdp, &q, &ans, learner, &config, |_| {}).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.theta, b.theta);
        assert_eq!(a.w, b.w);
        assert_eq!(a.e, b.e);
    }

    #[test]
    fn trace_is_zero_at_episode_starts_and_terminal_bookkeeping() {
        let mdp = random_mdp(13, 4, 2, 0.3).unwrap();
        let fm = Arc::new(tabular_features(&mdp));
        let reward = mdp.reward.clone();
        let q = QuestionFunctions::new(
            Arc::new(|_, _| 0.5),
            Arc::new(|_| 0.9),
            Arc::new(move |s, a, s2| reward[s][a][s2]),
        );
        let ans = AnswerFunctions::new(
            Arc::new(|_, _| 0.5),
            Arc::new(|_, _| 1.0),
            fm.as_fn(),
            Arc::new(|_| 0.7),
        );
        let learner = LearnerState::new(fm.n, 0.05, 1.0, None).unwrap();
        let config = RunConfig::new(3, 400, 0.05);
        let mut episode_start = true;
        run_driver(&mdp, &q, &ans, learner, &config, |log| {
            if episode_start {
                // post-accum trace on the first step of an episode is I*phi
                let mut expected = log.input.phi.clone();
                expected.scale(log.input.interest);
                assert_eq!(log.post_accum_trace, expected);
            }
            if log.transition.terminal {
                assert_eq!(log.input.gamma_next, 0.0);
                assert!(log.input.phi_bar.values().iter().all(|v| *v == 0.0));
            }
            episode_start = log.transition.terminal;
        })
        .unwrap();
    }

    #[test]
    fn behavior_sampling_matches_policy_frequencies() {
        // continuing 2-state MDP, behavior (0.3, 0.7)
        let mdp = random_mdp(21, 2, 2, 0.0).unwrap();
        let fm = Arc::new(tabular_features(&mdp));
        let q = QuestionFunctions::new(
            Arc::new(|_, a| if a == 0 { 0.3 } else { 0.7 }),
            Arc::new(|_| 0.5),
            Arc::new(|_, _, _| 0.0),
        );
        let ans = AnswerFunctions::new(
            Arc::new(|_, a| if a == 0 { 0.3 } else { 0.7 }),
            Arc::new(|_, _| 1.0),
            fm.as_fn(),
            Arc::new(|_| 0.0),
        );
        let learner = LearnerState::new(fm.n, 0.01, 1.0, None).unwrap();
        let config = RunConfig::new(77, 100_000, 0.01);
        let mut counts = [0usize; 2];
        run_driver(&mdp, &q, &ans, learner, &config, |log| {
            counts[log.transition.action] += 1;
        })
        .unwrap();
        let total = (counts[0] + counts[1]) as f64;
        assert!((counts[0] as f64 / total - 0.3).abs() < 0.01);
        assert!((counts[1] as f64 / total - 0.7).abs() < 0.01);
    }
}
