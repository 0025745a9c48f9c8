//! Cross-checks the dynamic-programming oracle against truncated
//! Monte-Carlo rollouts of the target policy.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gqlab::oracle::evaluate_q_pi;
use gqlab::{random_mdp, QuestionFunctions};

fn main() {
    let mdp = random_mdp(101, 3, 2, 0.0).unwrap();
    let target = vec![vec![0.3, 0.7]; 3];
    let gamma = 0.9;
    let reward = mdp.reward.clone();
    let question = QuestionFunctions::new(
        {
            let target = target.clone();
            Arc::new(move |s, a| target[s][a])
        },
        Arc::new(move |_| gamma),
        Arc::new(move |s, a, s2| reward[s][a][s2]),
    );
    let oracle = evaluate_q_pi(&mdp, &question, 1e-11, 1_000_000).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(999);
    let sample = |rng: &mut ChaCha8Rng, probs: &[f64]| {
        let u: f64 = rng.gen();
        let mut cum = 0.0;
        for (i, p) in probs.iter().enumerate() {
            cum += p;
            if u < cum {
                return i;
            }
        }
        probs.len() - 1
    };

    let rollouts = 30_000;
    println!("pair (s,a) | DP oracle |  MC mean  | std err");
    for s0 in 0..3 {
        for a0 in 0..2 {
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..rollouts {
                let (mut s, mut a) = (s0, a0);
                let mut ret = 0.0;
                let mut disc = 1.0;
                for _ in 0..100 {
                    let s2 = sample(&mut rng, &mdp.transition[s][a]);
                    ret += disc * mdp.reward[s][a][s2];
                    disc *= gamma;
                    s = s2;
                    a = sample(&mut rng, &target[s]);
                }
                sum += ret;
                sum_sq += ret * ret;
            }
            let n = rollouts as f64;
            let mean = sum / n;
            let se = (((sum_sq / n - mean * mean).max(0.0)) / n).sqrt();
            println!(
                "  ({s0},{a0})    | {:+.5} | {mean:+.5} | {se:.5}",
                oracle.get(s0, a0)
            );
        }
    }
}
