//! Ground-truth action values on finite MDPs via synchronous expected
//! Bellman backups, plus error metrics against a learned linear weight
//! vector.

use crate::error::{GqError, Result};
use crate::features::FeatureVector;
use crate::model::{FiniteMdp, QuestionFunctions};
use crate::sim::FeatureMap;

/// Exact Q values per (s,a) and the residual the solve terminated at.
#[derive(Debug, Clone)]
pub struct QTable {
    pub values: Vec<Vec<f64>>,
    pub residual: f64,
    pub iterations: usize,
}

impl QTable {
    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.values[s][a]
    }
}

fn backup(
    mdp: &FiniteMdp,
    q: &QuestionFunctions,
    current: &[Vec<f64>],
    policy_value: impl Fn(&[Vec<f64>], usize) -> f64,
) -> Vec<Vec<f64>> {
    let mut next = vec![vec![0.0; mdp.num_actions]; mdp.num_states];
    for s in 0..mdp.num_states {
        if mdp.is_terminal(s) {
            continue;
        }
        for a in 0..mdp.num_actions {
            let mut total = 0.0;
            for s2 in 0..mdp.num_states {
                let p = mdp.transition[s][a][s2];
                if p == 0.0 {
                    continue;
                }
                let r = (q.reward)(s, a, s2);
                let cont = if mdp.is_terminal(s2) {
                    0.0
                } else {
                    (q.discount)(s2) * policy_value(current, s2)
                };
                total += p * (r + cont);
            }
            next[s][a] = total;
        }
    }
    next
}

fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Iterates Q(s,a) = sum_{s'} P(s'|s,a) [r + gamma(s') sum_{a'} pi(s',a') Q(s',a')]
/// from Q = 0 until the max-norm change drops below `tol`.
pub fn evaluate_q_pi(
    mdp: &FiniteMdp,
    q: &QuestionFunctions,
    tol: f64,
    max_iters: usize,
) -> Result<QTable> {
    let pi_value = |table: &[Vec<f64>], s2: usize| {
        (0..mdp.num_actions)
            .map(|a2| (q.target_policy)(s2, a2) * table[s2][a2])
            .sum::<f64>()
    };
    let mut values = vec![vec![0.0; mdp.num_actions]; mdp.num_states];
    let mut residual = f64::INFINITY;
    for it in 1..=max_iters {
        let next = backup(mdp, q, &values, pi_value);
        residual = max_abs_diff(&values, &next);
        values = next;
        if residual < tol {
            return Ok(QTable { values, residual, iterations: it });
        }
    }
    Err(GqError::OracleDidNotConverge { max_iters, residual })
}

/// Value iteration: same backup with a max over next actions. Used to
/// derive the optimal policy on control problems.
pub fn optimal_q(
    mdp: &FiniteMdp,
    q: &QuestionFunctions,
    tol: f64,
    max_iters: usize,
) -> Result<QTable> {
    let max_value = |table: &[Vec<f64>], s2: usize| {
        (0..mdp.num_actions)
            .map(|a2| table[s2][a2])
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut values = vec![vec![0.0; mdp.num_actions]; mdp.num_states];
    let mut residual = f64::INFINITY;
    for it in 1..=max_iters {
        let next = backup(mdp, q, &values, max_value);
        residual = max_abs_diff(&values, &next);
        values = next;
        if residual < tol {
            return Ok(QTable { values, residual, iterations: it });
        }
    }
    Err(GqError::OracleDidNotConverge { max_iters, residual })
}

/// Root-mean-square of theta . phi(s,a) - Q(s,a), uniform over all
/// non-terminal (s,a) pairs.
pub fn rmse_vs_oracle(
    theta: &FeatureVector,
    features: &FeatureMap,
    oracle: &QTable,
    mdp: &FiniteMdp,
) -> Result<f64> {
    let mut total = 0.0;
    let mut count = 0usize;
    for s in 0..mdp.num_states {
        if mdp.is_terminal(s) {
            continue;
        }
        for a in 0..mdp.num_actions {
            let approx = theta.dot(features.get(s, a))?;
            let err = approx - oracle.get(s, a);
            total += err * err;
            count += 1;
        }
    }
    Ok((total / count as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{random_mdp, tabular_features};
    use std::sync::Arc;

    fn question_for(mdp: &FiniteMdp, gamma: f64, pi0: f64) -> QuestionFunctions {
        let reward = mdp.reward.clone();
        QuestionFunctions::new(
            Arc::new(move |_, a| if a == 0 { pi0 } else { 1.0 - pi0 }),
            Arc::new(move |_| gamma),
            Arc::new(move |s, a, s2| reward[s][a][s2]),
        )
    }

    #[test]
    fn myopic_case_is_one_step_expected_reward() {
        let mdp = random_mdp(5, 4, 2, 0.0).unwrap();
        let q = question_for(&mdp, 0.0, 0.5);
        let table = evaluate_q_pi(&mdp, &q, 1e-12, 100).unwrap();
        for s in 0..4 {
            for a in 0..2 {
                let expected: f64 = (0..4)
                    .map(|s2| mdp.transition[s][a][s2] * mdp.reward[s][a][s2])
                    .sum();
                assert!((table.get(s, a) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_rewards_give_zero_q() {
        let mut mdp = random_mdp(9, 3, 2, 0.0).unwrap();
        mdp.reward = vec![vec![vec![0.0; 3]; 2]; 3];
        let q = question_for(&mdp, 0.9, 0.3);
        let table = evaluate_q_pi(&mdp, &q, 1e-12, 10_000).unwrap();
        assert!(table.values.iter().flatten().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn self_loop_geometric_series() {
        // 1-state self-loop, r = 1, gamma = 0.5 -> Q = 1 / (1 - 0.5) = 2
        let mdp = FiniteMdp {
            num_states: 1,
            num_actions: 1,
            transition: vec![vec![vec![1.0]]],
            terminal: vec![false],
            initial_distribution: vec![1.0],
            reward: vec![vec![vec![1.0]]],
        };
        let q = QuestionFunctions::new(
            Arc::new(|_, _| 1.0),
            Arc::new(|_| 0.5),
            Arc::new(|_, _, _| 1.0),
        );
        let table = evaluate_q_pi(&mdp, &q, 1e-13, 100).unwrap();
        // brute-force truncated rollout sum to depth 50
        let brute: f64 = (0..50).map(|t| 0.5f64.powi(t)).sum();
        assert!((table.get(0, 0) - 2.0).abs() < 1e-12);
        assert!((table.get(0, 0) - brute).abs() < 1e-12);
    }

    #[test]
    fn non_convergence_is_reported() {
        // gamma = 1 on a recurrent class with nonzero rewards never settles
        let mdp = FiniteMdp {
            num_states: 1,
            num_actions: 1,
            transition: vec![vec![vec![1.0]]],
            terminal: vec![false],
            initial_distribution: vec![1.0],
            reward: vec![vec![vec![1.0]]],
        };
        let q = QuestionFunctions::new(
            Arc::new(|_, _| 1.0),
            Arc::new(|_| 1.0),
            Arc::new(|_, _, _| 1.0),
        );
        assert!(matches!(
            evaluate_q_pi(&mdp, &q, 1e-10, 50),
            Err(GqError::OracleDidNotConverge { .. })
        ));
    }

    #[test]
    fn bellman_residual_recheck() {
        let mdp = random_mdp(17, 5, 3, 0.2).unwrap();
        let reward = mdp.reward.clone();
        let q = QuestionFunctions::new(
            Arc::new(|_, a| [0.2, 0.5, 0.3][a]),
            Arc::new(|_| 0.95),
            Arc::new(move |s, a, s2| reward[s][a][s2]),
        );
        let tol = 1e-11;
        let table = evaluate_q_pi(&mdp, &q, tol, 100_000).unwrap();
        let pi_value = |t: &[Vec<f64>], s2: usize| {
            (0..3).map(|a2| (q.target_policy)(s2, a2) * t[s2][a2]).sum::<f64>()
        };
        let once_more = backup(&mdp, &q, &table.values, pi_value);
        assert!(max_abs_diff(&table.values, &once_more) < tol);
    }

    #[test]
    fn rmse_cases() {
        let mdp = random_mdp(23, 3, 2, 0.0).unwrap();
        let fm = tabular_features(&mdp);
        let q = question_for(&mdp, 0.8, 0.4);
        let oracle = evaluate_q_pi(&mdp, &q, 1e-12, 100_000).unwrap();

        // theta encoding the oracle exactly under tabular features
        let mut encoded = vec![0.0; fm.n];
        for s in 0..3 {
            for a in 0..2 {
                encoded[s * 2 + a] = oracle.get(s, a);
            }
        }
        let theta = FeatureVector::new(encoded).unwrap();
        assert!(rmse_vs_oracle(&theta, &fm, &oracle, &mdp).unwrap() < 1e-12);

        // theta = 0 gives the rms of the oracle itself
        let zero = FeatureVector::zeros(fm.n);
        let rms: f64 = {
            let ss: f64 = oracle.values.iter().flatten().map(|v| v * v).sum();
            (ss / 6.0).sqrt()
        };
        assert!((rmse_vs_oracle(&zero, &fm, &oracle, &mdp).unwrap() - rms).abs() < 1e-12);

        // oracle = 0, one tabular entry c over N pairs -> |c| / sqrt(N)
        let zero_oracle = QTable { values: vec![vec![0.0; 2]; 3], residual: 0.0, iterations: 0 };
        let mut one = vec![0.0; fm.n];
        one[3] = -2.0;
        let theta = FeatureVector::new(one).unwrap();
        let expected = 2.0 / 6.0f64.sqrt();
        assert!(
            (rmse_vs_oracle(&theta, &fm, &zero_oracle, &mdp).unwrap() - expected).abs() < 1e-12
        );
    }
}
