//! Question/answer function abstractions and the pure helper computations:
//! importance ratio, expected next feature vector, greedy target policy, and
//! terminal-reward folding.

use std::sync::Arc;

use crate::error::{GqError, Result};
use crate::features::FeatureVector;

pub type State = usize;
pub type Action = usize;

type PolicyFn = Arc<dyn Fn(State, Action) -> f64 + Send + Sync>;
type DiscountFn = Arc<dyn Fn(State) -> f64 + Send + Sync>;
type RewardFn = Arc<dyn Fn(State, Action, State) -> f64 + Send + Sync>;
type InterestFn = Arc<dyn Fn(State, Action) -> f64 + Send + Sync>;
type FeatureFn = Arc<dyn Fn(State, Action) -> FeatureVector + Send + Sync>;
type BootstrapFn = Arc<dyn Fn(State) -> f64 + Send + Sync>;

const DIST_TOL: f64 = 1e-12;

/// The prediction target: target policy pi, discount gamma, reward r.
#[derive(Clone)]
pub struct QuestionFunctions {
    pub target_policy: PolicyFn,
    pub discount: DiscountFn,
    pub reward: RewardFn,
}

impl QuestionFunctions {
    pub fn new(target_policy: PolicyFn, discount: DiscountFn, reward: RewardFn) -> Self {
        Self { target_policy, discount, reward }
    }

    /// Builds question functions from a target-policy table, a constant
    /// discount, and a reward table indexed [s][a][s'].
    pub fn from_tables(
        target_policy: Vec<Vec<f64>>,
        gamma: Vec<f64>,
        reward: Vec<Vec<Vec<f64>>>,
    ) -> Self {
        Self {
            target_policy: Arc::new(move |s, a| target_policy[s][a]),
            discount: Arc::new(move |s| gamma[s]),
            reward: Arc::new(move |s, a, s2| reward[s][a][s2]),
        }
    }

    /// Checks the distribution and range invariants over an enumerated
    /// state/action space.
    pub fn validate(&self, num_states: usize, num_actions: usize) -> Result<()> {
        for s in 0..num_states {
            let mut total = 0.0;
            for a in 0..num_actions {
                let p = (self.target_policy)(s, a);
                if !(0.0..=1.0).contains(&p) {
                    return Err(GqError::InvalidModel(format!(
                        "target policy pi({s},{a}) = {p} outside [0,1]"
                    )));
                }
                total += p;
            }
            if (total - 1.0).abs() > DIST_TOL {
                return Err(GqError::InvalidModel(format!(
                    "target policy row for state {s} sums to {total}"
                )));
            }
            let g = (self.discount)(s);
            if !(0.0..=1.0).contains(&g) {
                return Err(GqError::InvalidModel(format!(
                    "discount gamma({s}) = {g} outside [0,1]"
                )));
            }
        }
        Ok(())
    }
}

/// The approximation: behavior policy b, interest I, feature map phi,
/// bootstrap lambda.
#[derive(Clone)]
pub struct AnswerFunctions {
    pub behavior_policy: PolicyFn,
    pub interest: InterestFn,
    pub features: FeatureFn,
    pub bootstrap: BootstrapFn,
}

impl AnswerFunctions {
    pub fn new(
        behavior_policy: PolicyFn,
        interest: InterestFn,
        features: FeatureFn,
        bootstrap: BootstrapFn,
    ) -> Self {
        Self { behavior_policy, interest, features, bootstrap }
    }

    pub fn validate(&self, num_states: usize, num_actions: usize) -> Result<()> {
        for s in 0..num_states {
            let mut total = 0.0;
            for a in 0..num_actions {
                let p = (self.behavior_policy)(s, a);
                if !(0.0..=1.0).contains(&p) {
                    return Err(GqError::InvalidModel(format!(
                        "behavior policy b({s},{a}) = {p} outside [0,1]"
                    )));
                }
                total += p;
                let i = (self.interest)(s, a);
                if !(0.0..=1.0).contains(&i) {
                    return Err(GqError::InvalidModel(format!(
                        "interest I({s},{a}) = {i} outside [0,1]"
                    )));
                }
            }
            if (total - 1.0).abs() > DIST_TOL {
                return Err(GqError::InvalidModel(format!(
                    "behavior policy row for state {s} sums to {total}"
                )));
            }
            let l = (self.bootstrap)(s);
            if !(0.0..=1.0).contains(&l) {
                return Err(GqError::InvalidModel(format!(
                    "bootstrap lambda({s}) = {l} outside [0,1]"
                )));
            }
        }
        Ok(())
    }

    /// Checks b(s,a) > 0 wherever pi(s,a) > 0.
    pub fn validate_coverage(
        &self,
        q: &QuestionFunctions,
        num_states: usize,
        num_actions: usize,
    ) -> Result<()> {
        for s in 0..num_states {
            for a in 0..num_actions {
                if (q.target_policy)(s, a) > 0.0 && (self.behavior_policy)(s, a) == 0.0 {
                    return Err(GqError::CoverageViolation { state: s, action: a });
                }
            }
        }
        Ok(())
    }
}

/// Tabular environment: transition tensor P(s'|s,a), terminal set, and an
/// initial-state distribution.
#[derive(Debug, Clone)]
pub struct FiniteMdp {
    pub num_states: usize,
    pub num_actions: usize,
    /// transition[s][a][s'] = P(s'|s,a)
    pub transition: Vec<Vec<Vec<f64>>>,
    pub terminal: Vec<bool>,
    pub initial_distribution: Vec<f64>,
    /// reward[s][a][s']; the environment's base reward table.
    pub reward: Vec<Vec<Vec<f64>>>,
}

impl FiniteMdp {
    pub fn validate(&self) -> Result<()> {
        if self.num_states == 0 || self.num_actions == 0 {
            return Err(GqError::InvalidModel("empty state or action set".into()));
        }
        for s in 0..self.num_states {
            if self.terminal[s] {
                continue;
            }
            for a in 0..self.num_actions {
                let row = &self.transition[s][a];
                let total: f64 = row.iter().sum();
                if (total - 1.0).abs() > DIST_TOL || row.iter().any(|p| *p < 0.0) {
                    return Err(GqError::InvalidModel(format!(
                        "transition row ({s},{a}) is not a distribution (sum {total})"
                    )));
                }
            }
        }
        let init_total: f64 = self.initial_distribution.iter().sum();
        if (init_total - 1.0).abs() > DIST_TOL {
            return Err(GqError::InvalidModel(format!(
                "initial distribution sums to {init_total}"
            )));
        }
        for s in 0..self.num_states {
            if self.terminal[s] && self.initial_distribution[s] != 0.0 {
                return Err(GqError::InvalidModel(format!(
                    "initial distribution assigns mass to terminal state {s}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_terminal(&self, s: State) -> bool {
        self.terminal[s]
    }

    pub fn actions(&self) -> Vec<Action> {
        (0..self.num_actions).collect()
    }
}

/// Importance sampling ratio rho = pi(s,a) / b(s,a).
///
/// An action with b(s,a) = 0 cannot have been sampled by the behavior
/// policy, so that case is a coverage-violation error rather than an
/// infinite ratio.
pub fn importance_ratio(
    q: &QuestionFunctions,
    a: &AnswerFunctions,
    s: State,
    act: Action,
) -> Result<f64> {
    let b = (a.behavior_policy)(s, act);
    if b == 0.0 {
        return Err(GqError::CoverageViolation { state: s, action: act });
    }
    Ok((q.target_policy)(s, act) / b)
}

/// Expected next feature vector: sum over actions of pi(s,a) * phi(s,a).
pub fn expected_next_features(
    q: &QuestionFunctions,
    ans: &AnswerFunctions,
    s: State,
    action_set: &[Action],
) -> Result<FeatureVector> {
    expected_features_under(&|a| (q.target_policy)(s, a), ans, s, action_set)
}

/// Same expectation but under an explicit action distribution; used when the
/// target policy is re-derived from the learned weights.
pub fn expected_features_under(
    policy_at_s: &dyn Fn(Action) -> f64,
    ans: &AnswerFunctions,
    s: State,
    action_set: &[Action],
) -> Result<FeatureVector> {
    let mut iter = action_set.iter();
    let first = match iter.next() {
        Some(a) => *a,
        None => return Err(GqError::InvalidModel("empty action set".into())),
    };
    let mut acc = (ans.features)(s, first);
    let n = acc.dim();
    acc.scale(policy_at_s(first));
    for &a in iter {
        let phi = (ans.features)(s, a);
        phi.check_dim(n)?;
        acc.add_scaled(policy_at_s(a), &phi)?;
    }
    Ok(acc)
}

/// Greedy policy with respect to theta: probability mass split uniformly
/// over the argmax of theta . phi(s,a); ties share mass equally.
pub fn greedy_target_policy(
    theta: &FeatureVector,
    ans: &AnswerFunctions,
    s: State,
    action_set: &[Action],
) -> Result<Vec<f64>> {
    if action_set.is_empty() {
        return Err(GqError::InvalidModel("empty action set".into()));
    }
    let mut values = Vec::with_capacity(action_set.len());
    for &a in action_set {
        values.push(theta.dot(&(ans.features)(s, a))?);
    }
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ties = values.iter().filter(|v| **v == best).count();
    let share = 1.0 / ties as f64;
    Ok(values
        .iter()
        .map(|v| if *v == best { share } else { 0.0 })
        .collect())
}

/// Adds a termination payout z to a base reward function:
/// r(s,a,s') = r_base(s,a,s') + (1 - gamma(s')) * z(s').
pub fn fold_terminal_reward(
    r_base: RewardFn,
    z: Arc<dyn Fn(State) -> f64 + Send + Sync>,
    q: &QuestionFunctions,
) -> RewardFn {
    let discount = Arc::clone(&q.discount);
    Arc::new(move |s, a, s2| r_base(s, a, s2) + (1.0 - discount(s2)) * z(s2))
}

/// Action value Q(s,a) = theta . phi(s,a).
pub fn q_value(theta: &FeatureVector, phi: &FeatureVector) -> Result<f64> {
    theta.dot(phi)
}
