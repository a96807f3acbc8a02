//! Independent check of the coherent engine: the same scenarios simulated in
//! a truncated Fock basis (matrix exponentials, Kraus loss, numerically
//! integrated sign observable).
//!
//! Run: `cargo run --example fock_oracle`

use coarse_bell::cli::validate::{oracle_agreement, random_scenario, scenario_discrepancy};
use coarse_bell::fock::{oracle_correlation, OracleScenario};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> coarse_bell::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let s: OracleScenario = random_scenario(&mut rng, 3);
    println!("scenario: {:?} family, α = {:.3}, d = {:.3}, η = {:.3}, dim = {}", s.family, s.alpha, s.d, s.eta, s.dim);
    println!("  steps: {:?}", s.steps);
    let engine = coarse_bell::engine::correlation(&s.engine_state(), s.eta)?;
    println!("  engine C = {engine:+.12}\n  oracle C = {:+.12}", oracle_correlation(&s)?);
    println!("  max discrepancy over C, probabilities, trace: {:.2e}", scenario_discrepancy(&s)?);

    let all = oracle_agreement(20, 2)?;
    let worst = all.iter().map(|(_, e)| *e).fold(0.0, f64::max);
    println!("20 random scenarios (both families, Bell and Leggett settings): worst {worst:.2e}");
    Ok(())
}
