//! The `d`-window where the CHSH inequality is violated (`B_max > 2`) while
//! the Leggett inequality holds (`𝓛 ≤ 0`), located by a coarse scan and
//! bisection of both edges.
//!
//! Run: `cargo run --example coexistence_window`

use coarse_bell::inequalities::{LeggettGate, WindowScan};

fn main() -> coarse_bell::Result<()> {
    let cases: [(f64, f64, LeggettGate, Vec<f64>); 4] = [
        (1.0, 1.0, LeggettGate::Sequence, (1..=40).map(|k| 0.25 * k as f64).collect()),
        (1.0, 1.0, LeggettGate::IdealRotation, (1..=16).map(|k| 0.2 * k as f64).collect()),
        (10.0, 1.0, LeggettGate::IdealRotation, (1..=16).map(|k| 0.5 * k as f64).collect()),
        (1.0, 0.03, LeggettGate::Sequence, (1..=24).map(|k| 0.5 * k as f64).collect()),
    ];
    for (v, eta, gate, ds) in cases {
        let mut scan = WindowScan::new(v, eta);
        scan.leggett.gate = gate;
        match scan.window(&ds, 1e-3)? {
            Some(w) => println!(
                "V = {v:>4}, η = {eta:<4} {gate:?}: window d ∈ {}{:.3}, {:.3}{} (width {:.3})",
                if w.open_lo { "(" } else { "[" },
                w.lo,
                w.hi,
                if w.open_hi { ")" } else { "]" },
                w.width()
            ),
            None => println!("V = {v:>4}, η = {eta:<4} {gate:?}: no window on this grid"),
        }
    }
    Ok(())
}
