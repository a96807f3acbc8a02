//! Sign-binned homodyne statistics in the quadrature `x = (a + a†)/√2`.

use std::f64::consts::FRAC_1_SQRT_2;

use super::{log_overlap, loss, overlap, CoherentOperator, Mode};
use crate::error::{Error, Result};
use crate::numerics::{exp_times_erf, Complex};

/// `⟨bra| sign(x) |ket⟩ = ⟨bra|ket⟩ · erf((ket + bra*)/√2)`.
///
/// The product of two coherent wavefunctions is a Gaussian centred at
/// `(ket + bra*)/√2` with unit width, and `∫ sign(x) e^{-(x-c)^2} dx / √π`
/// is `erf(c)` for complex `c` by analytic continuation.
pub fn sign_element(bra: Complex, ket: Complex) -> Complex {
    exp_times_erf(log_overlap(bra, ket), (ket + bra.conj()) * FRAC_1_SQRT_2)
}

/// Joint outcome probabilities for `(A, B)` sign pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointProbs {
    pub pp: f64,
    pub pm: f64,
    pub mp: f64,
    pub mm: f64,
}

impl JointProbs {
    pub fn sum(&self) -> f64 {
        self.pp + self.pm + self.mp + self.mm
    }

    pub fn correlation(&self) -> f64 {
        self.pp + self.mm - self.pm - self.mp
    }
}

fn nonzero_trace(op: &CoherentOperator) -> Result<Complex> {
    op.check_labels()?;
    let tr = op.trace();
    if tr.norm() <= 1e-300 || !tr.re.is_finite() {
        return Err(Error::ZeroTrace);
    }
    Ok(tr)
}

fn detected(op: &CoherentOperator, eta: f64) -> CoherentOperator {
    loss(&loss(op, Mode::A, eta), Mode::B, eta)
}

/// `Tr[ρ_η (S ⊗ S)] / Tr ρ` with both modes passed through loss `eta`.
pub fn correlation(op: &CoherentOperator, eta: f64) -> Result<f64> {
    let tr = nonzero_trace(op)?;
    let lossy = detected(op, eta);
    let sum: Complex = lossy
        .dyads
        .iter()
        .map(|d| d.coeff * sign_element(d.bra_a, d.ket_a) * sign_element(d.bra_b, d.ket_b))
        .sum();
    Ok((sum / tr).re)
}

/// `P_kl = Tr[ρ_η Π_k ⊗ Π_l] / Tr ρ` with `Π_± = (1 ± S)/2`.
pub fn joint_probs(op: &CoherentOperator, eta: f64) -> Result<JointProbs> {
    let tr = nonzero_trace(op)?;
    let lossy = detected(op, eta);
    let mut acc = [Complex::new(0.0, 0.0); 4];
    for d in &lossy.dyads {
        let (oa, ob) = (overlap(d.bra_a, d.ket_a), overlap(d.bra_b, d.ket_b));
        let (sa, sb) = (sign_element(d.bra_a, d.ket_a), sign_element(d.bra_b, d.ket_b));
        for (slot, (k, l)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
            .into_iter()
            .enumerate()
        {
            acc[slot] += d.coeff * (oa + sa * k) * (ob + sb * l) * 0.25;
        }
    }
    let p = |z: Complex| (z / tr).re;
    Ok(JointProbs {
        pp: p(acc[0]),
        pm: p(acc[1]),
        mp: p(acc[2]),
        mm: p(acc[3]),
    })
}

/// Unnormalized `Tr[ρ_η (S ⊗ 1)]` (or `1 ⊗ S`), loss applied on `mode` only.
pub fn local_sign_moment(op: &CoherentOperator, mode: Mode, eta: f64) -> Complex {
    let lossy = loss(op, mode, eta);
    let other = match mode {
        Mode::A => Mode::B,
        Mode::B => Mode::A,
    };
    lossy
        .dyads
        .iter()
        .map(|d| {
            d.coeff
                * sign_element(d.bra(mode), d.ket(mode))
                * overlap(d.bra(other), d.ket(other))
        })
        .sum()
}
