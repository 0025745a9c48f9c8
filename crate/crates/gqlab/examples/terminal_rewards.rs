//! Folding a termination payout into the reward function: instead of a
//! separate terminal-reward channel, add (1 - gamma(s')) * z(s') to the
//! per-step reward. Soft discounting (gamma < 1) is read as terminating
//! with probability 1 - gamma each step, so a constant payout z shifts
//! every Q-value by exactly z.

use std::sync::Arc;

use gqlab::model::fold_terminal_reward;
use gqlab::oracle::evaluate_q_pi;
use gqlab::{random_mdp, QuestionFunctions};

fn main() {
    let mdp = random_mdp(3, 4, 2, 0.2).unwrap();
    let terminal = mdp.terminal.clone();
    let reward = mdp.reward.clone();
    let question = QuestionFunctions::new(
        Arc::new(|_, _| 0.5),
        Arc::new(move |s| if terminal[s] { 0.0 } else { 0.9 }),
        Arc::new(move |s, a, s2| reward[s][a][s2]),
    );

    let folded = fold_terminal_reward(
        Arc::clone(&question.reward),
        Arc::new(|_| 5.0),
        &question,
    );
    let with_bonus = QuestionFunctions::new(
        Arc::clone(&question.target_policy),
        Arc::clone(&question.discount),
        folded,
    );

    let plain = evaluate_q_pi(&mdp, &question, 1e-12, 100_000).unwrap();
    let bonus = evaluate_q_pi(&mdp, &with_bonus, 1e-12, 100_000).unwrap();

    println!("a constant payout of 5 on (soft or hard) termination shifts Q by 5:");
    for s in 0..3 {
        for a in 0..2 {
            println!(
                "  Q({s},{a}): plain {:+.4}, with payout {:+.4}, shift {:+.4}",
                plain.get(s, a),
                bonus.get(s, a),
                bonus.get(s, a) - plain.get(s, a)
            );
        }
    }
}
