//! Linear GQ(lambda): gradient-based off-policy temporal-difference
//! learning of action values with eligibility traces, packaged with a
//! finite-MDP simulation harness, a dynamic-programming verification
//! oracle, and a deterministic experiment runner.
//!
//! The crate is organized around the question/answer split: the
//! *question* (target policy, discount, reward) says what to predict, the
//! *answer* (behavior policy, interest, features, bootstrap) says how the
//! approximation is formed. See the `examples/` directory for runnable
//! walkthroughs of each major capability.

// index-heavy numeric loops over (s, a, s') triples read better as ranges
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod experiment;
pub mod features;
pub mod learner;
pub mod model;
pub mod oracle;
pub mod sim;

pub use error::{GqError, Result};
pub use features::FeatureVector;
pub use learner::{GqStepInput, GqStepReport, LearnerState, UpdateVariant};
pub use model::{
    expected_next_features, fold_terminal_reward, greedy_target_policy, importance_ratio, q_value,
    AnswerFunctions, FiniteMdp, QuestionFunctions,
};
pub use oracle::{evaluate_q_pi, optimal_q, rmse_vs_oracle, QTable};
pub use sim::{
    dense_random_features, random_mdp, run_driver, star_counterexample, tabular_features,
    Algorithm, FeatureMap, RunConfig, StepLog, Transition,
};
