//! Off-policy prediction on a seeded random MDP: learn Q^pi under a
//! uniform behavior policy while the target policy prefers action 0, and
//! watch the RMSE against the dynamic-programming oracle fall.

use std::sync::Arc;

use gqlab::oracle::{evaluate_q_pi, rmse_vs_oracle};
use gqlab::{
    random_mdp, run_driver, tabular_features, AnswerFunctions, LearnerState, QuestionFunctions,
    RunConfig,
};

fn main() {
    let mdp = random_mdp(7, 5, 2, 0.0).expect("valid sizes");
    let features = Arc::new(tabular_features(&mdp));

    let reward = mdp.reward.clone();
    let question = QuestionFunctions::new(
        Arc::new(|_, a| if a == 0 { 0.7 } else { 0.3 }), // target policy
        Arc::new(|_| 0.9),                               // discount
        Arc::new(move |s, a, s2| reward[s][a][s2]),      // reward
    );
    let answers = AnswerFunctions::new(
        Arc::new(|_, _| 0.5), // behavior: uniform, so rho is 1.4 or 0.6
        Arc::new(|_, _| 1.0), // interest
        features.as_fn(),
        Arc::new(|_| 0.5), // lambda
    );

    let oracle = evaluate_q_pi(&mdp, &question, 1e-12, 1_000_000).expect("contracting");
    println!("DP oracle solved in {} sweeps, residual {:.2e}", oracle.iterations, oracle.residual);

    let learner = LearnerState::new(features.n, 0.01, 1.0, None).expect("valid parameters");
    let mut config = RunConfig::new(1, 500_000, 0.01);
    config.lambda_value = 0.5;
    config.report_every = 50_000;

    let final_state = run_driver(&mdp, &question, &answers, learner, &config, |log| {
        let rmse = rmse_vs_oracle(&log.theta, &features, &oracle, &mdp).unwrap();
        println!("step {:>7}: delta {:+.4}, rmse {:.4}", log.step, log.report.delta, rmse);
    })
    .expect("run completes");

    let rmse = rmse_vs_oracle(&final_state.theta, &features, &oracle, &mdp).unwrap();
    println!("final rmse vs oracle: {rmse:.4}");
    for s in 0..mdp.num_states {
        let q0 = final_state.theta.values()[s * 2];
        let q1 = final_state.theta.values()[s * 2 + 1];
        println!(
            "state {s}: learned Q = ({q0:+.3}, {q1:+.3}), oracle Q = ({:+.3}, {:+.3})",
            oracle.get(s, 0),
            oracle.get(s, 1)
        );
    }
}
