//! Greedy-GQ control on a four-state chain: the target policy is
//! re-derived greedily from theta each step, and the learned greedy policy
//! is checked against value iteration.

use std::sync::Arc;

use gqlab::oracle::optimal_q;
use gqlab::sim::Algorithm;
use gqlab::{
    greedy_target_policy, run_driver, tabular_features, AnswerFunctions, FiniteMdp, LearnerState,
    QuestionFunctions, RunConfig,
};

/// Action 1 walks right toward a rewarding terminal transition, action 0
/// walks left. Going right is optimal everywhere.
fn chain() -> FiniteMdp {
    let mut transition = vec![vec![vec![0.0; 4]; 2]; 4];
    let mut reward = vec![vec![vec![0.0; 4]; 2]; 4];
    for s in 0..3 {
        transition[s][0][s.saturating_sub(1)] = 1.0;
        transition[s][1][s + 1] = 1.0;
    }
    transition[3][0][3] = 1.0;
    transition[3][1][3] = 1.0;
    reward[2][1][3] = 1.0;
    FiniteMdp {
        num_states: 4,
        num_actions: 2,
        transition,
        terminal: vec![false, false, false, true],
        initial_distribution: vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0],
        reward,
    }
}

fn main() {
    let mdp = chain();
    let features = Arc::new(tabular_features(&mdp));
    let reward = mdp.reward.clone();
    let terminal = mdp.terminal.clone();
    let question = QuestionFunctions::new(
        // placeholder target: the driver re-derives the greedy policy
        Arc::new(|_, _| 0.5),
        Arc::new(move |s| if terminal[s] { 0.0 } else { 0.9 }),
        Arc::new(move |s, a, s2| reward[s][a][s2]),
    );
    let answers = AnswerFunctions::new(
        Arc::new(|_, _| 0.5), // exploring behavior
        Arc::new(|_, _| 1.0),
        features.as_fn(),
        Arc::new(|_| 0.0),
    );

    let optimal = optimal_q(&mdp, &question, 1e-12, 1_000_000).unwrap();

    let learner = LearnerState::new(features.n, 0.05, 1.0, None).unwrap();
    let mut config = RunConfig::new(0, 20_000, 0.05);
    config.algorithm = Algorithm::GreedyGq;
    let final_state = run_driver(&mdp, &question, &answers, learner, &config, |_| {}).unwrap();

    println!("state | greedy from theta | value-iteration optimum");
    for s in 0..3 {
        let learned = greedy_target_policy(&final_state.theta, &answers, s, &[0, 1]).unwrap();
        let learned_act = if learned[1] > learned[0] { "right" } else { "left" };
        let optimal_act = if optimal.get(s, 1) > optimal.get(s, 0) { "right" } else { "left" };
        println!("  {s}   |      {learned_act:<6}       |   {optimal_act}");
    }
}
