//! Drives the experiment layer programmatically: parse a config document,
//! run all seeds, and read back the summary.

use gqlab::experiment::{parse_config, run_experiment, SeedOutcome};

fn main() {
    let config = "
        environment.kind = random-mdp
        environment.seed = 11
        environment.num_states = 5
        environment.num_actions = 2
        question.gamma = 0.9
        question.target = 0.7,0.3; 0.6,0.4; 0.5,0.5; 0.4,0.6; 0.3,0.7
        answer.lambda = 0.5
        learner.alpha = 0.01
        run.seeds = 1,2,3,4
        run.num_steps = 100000
        run.report_every = 10000
        output.dir = target/example-out
    ";
    let spec = parse_config(config).expect("config is valid");
    let summary = run_experiment(&spec).expect("runs complete");

    for r in &summary.results {
        match (&r.outcome, r.final_rmse) {
            (SeedOutcome::Ok, Some(rmse)) => println!("seed {}: rmse {rmse:.4}", r.seed),
            (outcome, _) => println!("seed {}: {outcome:?}", r.seed),
        }
    }
    if let Some(mean) = summary.mean_final_rmse {
        println!("mean final rmse: {mean:.4}");
    }
    println!("curves and summary written to {}", summary.output_dir.display());
}
