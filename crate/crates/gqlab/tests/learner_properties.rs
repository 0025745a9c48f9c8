//! Property tests for the update kernel over randomized input sequences.

use gqlab::{FeatureVector, GqStepInput, LearnerState, UpdateVariant};
use proptest::prelude::*;

const DIM: usize = 3;

fn arb_input() -> impl Strategy<Value = GqStepInput> {
    (
        prop::collection::vec(-2.0f64..2.0, DIM),
        prop::collection::vec(-2.0f64..2.0, DIM),
        0.0f64..=1.0,
        0.0f64..=1.0,
        -5.0f64..5.0,
        0.0f64..3.0,
        0.0f64..=1.0,
    )
        .prop_map(|(phi, phi_bar, lambda, gamma, reward, rho, interest)| GqStepInput {
            phi: FeatureVector::new(phi).unwrap(),
            phi_bar: FeatureVector::new(phi_bar).unwrap(),
            lambda_next: lambda,
            gamma_next: gamma,
            reward,
            rho,
            interest,
        })
}

fn arb_sequence() -> impl Strategy<Value = Vec<GqStepInput>> {
    prop::collection::vec(arb_input(), 1..40)
}

proptest! {
    /// The kernel's deferred decay bookkeeping (scale by rho on entry,
    /// decay by gamma*lambda on exit) reproduces the direct trace
    /// recursion e_t = I_t phi_t + gamma_t lambda_t rho_t e_{t-1}.
    #[test]
    fn trace_recursion_equivalence(inputs in arb_sequence()) {
        let mut learner = LearnerState::new(DIM, 0.01, 1.0, None).unwrap();
        let mut direct = FeatureVector::zeros(DIM);
        let mut prev_decay = 0.0; // gamma*lambda entering step t; trace starts at zero
        for input in &inputs {
            // implementation side: reconstruct the post-accumulation trace
            let mut post = learner.e.clone();
            post.scale(input.rho);
            post.add_scaled(input.interest, &input.phi).unwrap();
            learner.gq_learn(input).unwrap();

            // direct recursion on the previous post-accumulation trace
            direct.scale(prev_decay * input.rho);
            direct.add_scaled(input.interest, &input.phi).unwrap();
            for (a, b) in post.values().iter().zip(direct.values()) {
                prop_assert!((a - b).abs() < 1e-12, "trace mismatch: {a} vs {b}");
            }
            prev_decay = input.gamma_next * input.lambda_next;
        }
    }

    /// With theta initialized to zero the (theta, w, delta) trajectories are
    /// jointly linear in the rewards, and the trace trajectory does not
    /// depend on them at all.
    #[test]
    fn reward_scaling_linearity(inputs in arb_sequence(), c in 0.25f64..4.0) {
        let mut base = LearnerState::new(DIM, 0.05, 0.8, None).unwrap();
        let mut scaled = LearnerState::new(DIM, 0.05, 0.8, None).unwrap();
        for input in &inputs {
            let r1 = base.gq_learn(input).unwrap();
            let mut boosted = input.clone();
            boosted.reward *= c;
            let r2 = scaled.gq_learn(&boosted).unwrap();
            prop_assert!((r2.delta - c * r1.delta).abs() <= 1e-12 * (1.0 + (c * r1.delta).abs()));
        }
        let rel = |x: f64, y: f64| (x - y).abs() / (1.0 + x.abs().max(y.abs()));
        for i in 0..DIM {
            prop_assert!(rel(c * base.theta.values()[i], scaled.theta.values()[i]) < 1e-12);
            prop_assert!(rel(c * base.w.values()[i], scaled.w.values()[i]) < 1e-12);
            prop_assert_eq!(base.e.values()[i], scaled.e.values()[i]);
        }
    }

    /// With lambda = 1 the correction term's coefficient vanishes, so
    /// applying or skipping it gives identical theta.
    #[test]
    fn lambda_one_correction_vanishes(inputs in arb_sequence()) {
        let mut full = LearnerState::new(DIM, 0.02, 1.0, None).unwrap();
        let mut skipped = LearnerState::new(DIM, 0.02, 1.0, None).unwrap();
        for input in &inputs {
            let mut fixed = input.clone();
            fixed.lambda_next = 1.0;
            full.gq_learn(&fixed).unwrap();
            skipped.gq_learn_variant(&fixed, UpdateVariant::SkipCorrectionTerm).unwrap();
            for (a, b) in full.theta.values().iter().zip(skipped.theta.values()) {
                prop_assert_eq!(a, b);
            }
        }
    }

    /// rho = 0 severs the trace history: the post-accumulation trace is
    /// exactly I * phi regardless of what came before.
    #[test]
    fn rho_zero_cuts_trace(inputs in arb_sequence(), cut in arb_input()) {
        let mut learner = LearnerState::new(DIM, 0.01, 1.0, None).unwrap();
        for input in &inputs {
            learner.gq_learn(input).unwrap();
        }
        let mut cut = cut.clone();
        cut.rho = 0.0;
        cut.lambda_next = 1.0;
        cut.gamma_next = 1.0;
        learner.gq_learn(&cut).unwrap();
        // with gamma = lambda = 1 the final trace equals the post-accumulation trace
        for (e, phi) in learner.e.values().iter().zip(cut.phi.values()) {
            prop_assert_eq!(*e, cut.interest * phi);
        }
    }

    /// Same state, same input, same output.
    #[test]
    fn update_is_pure(inputs in arb_sequence()) {
        let mut a = LearnerState::new(DIM, 0.03, 0.5, None).unwrap();
        let mut b = LearnerState::new(DIM, 0.03, 0.5, None).unwrap();
        for input in &inputs {
            let ra = a.gq_learn(input).unwrap();
            let rb = b.gq_learn(input).unwrap();
            prop_assert_eq!(ra, rb);
        }
        prop_assert_eq!(a, b);
    }
}
