//! Branch states of the two entangled-thermal-state families.

use std::f64::consts::FRAC_1_SQRT_2;

use super::{beamsplit, displace, kerr, CoherentOperator, Dyad, Mode};
use crate::numerics::Complex;

/// `|0, 0⟩⟨0, 0|`.
pub fn vacuum() -> CoherentOperator {
    let zero = Complex::new(0.0, 0.0);
    CoherentOperator::new(vec![Dyad::new(Complex::new(1.0, 0.0), (zero, zero), (zero, zero))])
}

/// Unnormalized projected qubit-ETS branch
/// `½(|α,β⟩ + |−α,−β⟩)(⟨α,β| + ⟨−α,−β|)`; trace `1 + Re(⟨α|−α⟩⟨β|−β⟩)`.
pub fn ets_branch(alpha: Complex, beta: Complex) -> CoherentOperator {
    let c = Complex::new(FRAC_1_SQRT_2, 0.0);
    CoherentOperator::from_ket(&[(c, alpha, beta), (c, -alpha, -beta)])
}

/// Alternative-ETS branch before the phase-removing displacement:
/// Kerr on `|α⟩_A`, then a 50:50 beam splitter with vacuum `B`, giving
/// `∝ |α/√2, −α/√2⟩ + i|−α/√2, α/√2⟩`.
pub fn alt_branch_unphased(alpha: Complex) -> CoherentOperator {
    let zero = Complex::new(0.0, 0.0);
    let input = CoherentOperator::from_ket(&[(Complex::new(1.0, 0.0), alpha, zero)]);
    beamsplit(&kerr(&input, Mode::A), FRAC_1_SQRT_2)
}

/// Alternative-ETS branch with the third party's extra `D_A(iπ/8d)`.
pub fn alt_branch(alpha: Complex, d: f64) -> CoherentOperator {
    displace(
        &alt_branch_unphased(alpha),
        Mode::A,
        Complex::new(0.0, std::f64::consts::PI / (8.0 * d)),
    )
}
