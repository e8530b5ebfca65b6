//! Cross-module check: the exit time scaled by the principal eigenvalue
//! approaches the unit exponential as the threshold grows, measured by the
//! Kolmogorov-Smirnov distance of paired-seed simulations.

use gsr_exit::exitlaw::ExitProblem;
use gsr_exit::montecarlo::{default_t_cap, exp_ks_distance, simulate_exit, SimConfig};
use gsr_exit::spectral::{solve_lambda_a, ModelParams};

fn ks_for(a: f64, r: f64, seed: u64) -> f64 {
    let params = ModelParams::new(1.0).unwrap();
    let problem = ExitProblem::new(a, r).unwrap();
    let scale = -solve_lambda_a(a, &params, 1e-12).unwrap().lambda_a;
    let cfg = SimConfig::new(0.02, 10_000, seed, default_t_cap(&problem)).unwrap();
    let sample = simulate_exit(&problem, &params, &cfg).unwrap();
    assert_eq!(sample.censored, 0, "horizon too small at A={a}, r={r}");
    exp_ks_distance(&sample, scale).unwrap()
}

#[test]
fn scaled_exit_law_approaches_exponential_with_growing_threshold() {
    let ks_moderate = ks_for(100.0, 50.0, 314);
    let ks_large = ks_for(500.0, 50.0, 314);
    assert!(
        ks_large < ks_moderate,
        "KS against Exp(1) should shrink with the threshold: \
         A=500 gives {ks_large}, A=100 gives {ks_moderate}"
    );
    // The moderate configuration is measurably non-exponential, well above
    // the pure-noise floor ~1.36/sqrt(n).
    assert!(ks_moderate > 2.0 * 1.36 / (10_000f64).sqrt());
}
