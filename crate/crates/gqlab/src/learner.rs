//! The GQ(lambda) update kernel: maintains theta, w, e and applies the
//! per-step updates in the order
//!
//!   delta <- R + gamma * theta.phi_bar - theta.phi
//!   e     <- rho * e + I * phi
//!   theta <- theta + alpha * (delta * e - gamma * (1 - lambda) * (w.e) * phi_bar)
//!   w     <- w + alpha * eta * (delta * e - (w.phi) * phi)
//!   e     <- gamma * lambda * e
//!
//! with gamma and lambda evaluated at the successor state.

use crate::error::{GqError, Result};
use crate::features::FeatureVector;

/// The mutable state of one GQ(lambda) learner.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState {
    pub theta: FeatureVector,
    pub w: FeatureVector,
    pub e: FeatureVector,
    pub alpha: f64,
    pub eta: f64,
    steps: usize,
}

/// One step's worth of inputs, mirroring GQLearn(phi, phi_bar, lambda,
/// gamma, R, rho, I).
#[derive(Debug, Clone, PartialEq)]
pub struct GqStepInput {
    pub phi: FeatureVector,
    pub phi_bar: FeatureVector,
    pub lambda_next: f64,
    pub gamma_next: f64,
    pub reward: f64,
    pub rho: f64,
    pub interest: f64,
}

/// Diagnostics emitted by each update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GqStepReport {
    pub delta: f64,
    pub trace_norm: f64,
    pub theta_norm: f64,
}

/// Which pieces of the theta/w update to apply. `Full` is GQ(lambda);
/// the other variants exist to demonstrate what the gradient correction
/// buys (e.g. naive off-policy TD on divergence counterexamples).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateVariant {
    #[default]
    Full,
    /// Omit the -gamma*(1-lambda)*(w.e)*phi_bar term; w is still updated.
    SkipCorrectionTerm,
    /// Naive off-policy TD: no correction term and w is never updated.
    NoGradientCorrection,
}

impl GqStepInput {
    fn validate(&self, n: usize) -> Result<()> {
        self.phi.check_dim(n)?;
        self.phi_bar.check_dim(n)?;
        let ranges: [(&'static str, f64, f64, f64); 3] = [
            ("lambda_next", self.lambda_next, 0.0, 1.0),
            ("gamma_next", self.gamma_next, 0.0, 1.0),
            ("interest", self.interest, 0.0, 1.0),
        ];
        for (name, v, lo, hi) in ranges {
            if !v.is_finite() || v < lo || v > hi {
                return Err(GqError::InvalidParameter {
                    name,
                    message: format!("{v} outside [{lo},{hi}]"),
                });
            }
        }
        if !self.reward.is_finite() {
            return Err(GqError::InvalidParameter {
                name: "reward",
                message: "non-finite".into(),
            });
        }
        if !self.rho.is_finite() || self.rho < 0.0 {
            return Err(GqError::InvalidParameter {
                name: "rho",
                message: format!("{} must be finite and >= 0", self.rho),
            });
        }
        Ok(())
    }
}

impl LearnerState {
    /// Creates a learner with w = e = 0 and theta = `theta_init`
    /// (all-zeros when `None`).
    pub fn new(n: usize, alpha: f64, eta: f64, theta_init: Option<FeatureVector>) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(GqError::InvalidParameter {
                name: "alpha",
                message: format!("{alpha} must be positive"),
            });
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(GqError::InvalidParameter {
                name: "eta",
                message: format!("{eta} outside [0,1]"),
            });
        }
        let theta = match theta_init {
            Some(t) => {
                t.check_dim(n)?;
                t
            }
            None => FeatureVector::zeros(n),
        };
        Ok(Self {
            theta,
            w: FeatureVector::zeros(n),
            e: FeatureVector::zeros(n),
            alpha,
            eta,
            steps: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    /// Number of updates applied so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Zeroes the eligibility trace; called at episode start.
    pub fn reset_traces(&mut self) {
        self.e.fill_zero();
    }

    /// Applies one full GQ(lambda) update.
    pub fn gq_learn(&mut self, input: &GqStepInput) -> Result<GqStepReport> {
        self.gq_learn_variant(input, UpdateVariant::Full)
    }

    pub fn gq_learn_variant(
        &mut self,
        input: &GqStepInput,
        variant: UpdateVariant,
    ) -> Result<GqStepReport> {
        let n = self.dim();
        input.validate(n)?;
        let gamma = input.gamma_next;
        let lambda = input.lambda_next;

        // delta <- R + gamma * theta.phi_bar - theta.phi
        let delta =
            input.reward + gamma * self.theta.dot(&input.phi_bar)? - self.theta.dot(&input.phi)?;

        // e <- rho * e + I * phi
        self.e.scale(input.rho);
        self.e.add_scaled(input.interest, &input.phi)?;

        // theta <- theta + alpha * (delta * e - gamma * (1 - lambda) * (w.e) * phi_bar)
        let correction = if variant == UpdateVariant::Full {
            gamma * (1.0 - lambda) * self.w.dot(&self.e)?
        } else {
            0.0
        };
        self.theta
            .add_combination(self.alpha, delta, &self.e, -correction, &input.phi_bar)?;

        // w <- w + alpha * eta * (delta * e - (w.phi) * phi), using the
        // pre-update w in both terms
        if variant != UpdateVariant::NoGradientCorrection {
            let w_dot_phi = self.w.dot(&input.phi)?;
            let e_snapshot = self.e.clone();
            self.w.add_combination(
                self.alpha * self.eta,
                delta,
                &e_snapshot,
                -w_dot_phi,
                &input.phi,
            )?;
        }

        // e <- gamma * lambda * e
        self.e.scale(gamma * lambda);

        self.steps += 1;
        if !delta.is_finite() {
            return Err(GqError::Divergence { step: self.steps, vector: "delta" });
        }
        for (vec, name) in [(&self.theta, "theta"), (&self.w, "w"), (&self.e, "e")] {
            if !vec.is_finite() {
                return Err(GqError::Divergence { step: self.steps, vector: name });
            }
        }

        Ok(GqStepReport {
            delta,
            trace_norm: self.e.norm(),
            theta_norm: self.theta.norm(),
        })
    }
}
