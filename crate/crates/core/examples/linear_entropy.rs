//! Monte-Carlo linear entropy `S = 1 − Tr ρ²` of the qubit ETS: essentially 1
//! (maximally mixed) for `V = 1000`, exactly 0 for the pure `V = 1` state.
//!
//! Run: `cargo run --example linear_entropy`

use coarse_bell::ensemble::linear_entropy;

fn main() -> coarse_bell::Result<()> {
    for v in [1.0, 2.0, 10.0, 1000.0] {
        for d in [1.0, 3.0, 5.0] {
            let e = linear_entropy(v, d, 20_000, 7)?;
            println!("V = {v:>6}, d = {d}: S = {:.6} ± {:.1e} ({} samples)", e.s, e.stderr, e.samples);
        }
    }
    Ok(())
}
