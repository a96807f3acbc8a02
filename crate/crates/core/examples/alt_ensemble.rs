//! The alternative ETS (beam-splitter + Kerr preparation) has no closed form:
//! its correlations are a Gauss-Hermite sum over the thermal amplitude α that
//! does not factorize into per-mode kernels. This compares its optimized CHSH value with the
//! qubit ETS and shows the order-doubling convergence check.
//!
//! Run: `cargo run --release --example alt_ensemble` (about a minute on one core)

use coarse_bell::analytic::EtsParams;
use coarse_bell::ensemble::Family;
use coarse_bell::inequalities::{chsh_max, chsh_optimizer, Backend};

fn main() -> coarse_bell::Result<()> {
    let opt = chsh_optimizer(0).with_restarts(1);
    let alt = Backend::Ensemble {
        family: Family::Alt,
        order: 10,
    };
    for (v, d, eta) in [(1.0, 2.0, 1.0), (1.0, 6.0, 1.0), (10.0, 2.0, 0.05), (10.0, 10.0, 0.05)] {
        let p = EtsParams::new(v, d, eta)?;
        let a = chsh_max(&p, alt, &opt)?;
        let q = chsh_max(&p, Backend::Analytic, &opt)?;
        println!(
            "V = {v:>4}, d = {d:>4}, η = {eta:<4}: alt B_max = {:.4} ({}), qubit B_max = {:.4}",
            a.b_max,
            if a.converged { "converged" } else { "NOT converged" },
            q.b_max
        );
    }
    Ok(())
}
