//! The star counterexample: uncorrected off-policy TD(0) blows up while
//! the gradient-corrected update stays bounded and improves.

use gqlab::learner::UpdateVariant;
use gqlab::{run_driver, star_counterexample, FeatureVector, GqError, LearnerState, RunConfig};

fn main() {
    let (mdp, _features, question, answers) = star_counterexample();
    let classic_init =
        FeatureVector::new(vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 10.0, 1.0]).unwrap();

    for (label, variant) in [
        ("GQ(0) with gradient correction", UpdateVariant::Full),
        ("naive off-policy TD(0)", UpdateVariant::NoGradientCorrection),
    ] {
        println!("--- {label} ---");
        let learner = LearnerState::new(8, 0.005, 1.0, Some(classic_init.clone())).unwrap();
        let mut config = RunConfig::new(2, 100_000, 0.005);
        config.variant = variant;
        config.report_every = 10_000;
        let result = run_driver(&mdp, &question, &answers, learner, &config, |log| {
            println!("step {:>7}: ||theta||_inf = {:.3e}", log.step, log.theta.norm_inf());
        });
        match result {
            Ok(state) => println!("finished with ||theta||_inf = {:.3e}", state.theta.norm_inf()),
            Err(GqError::RunAborted { step, source }) => {
                println!("aborted at step {step}: {source}")
            }
            Err(e) => println!("error: {e}"),
        }
    }
}
