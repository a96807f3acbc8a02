//! Single-mode pure superpositions of coherent states.
//!
//! Local settings act on one mode only, so for states that are (mixtures
//! of) pure two-mode kets `Σ_k c_k |a_k⟩|b_k⟩` the correlation factorizes
//! into per-mode Heisenberg matrices
//! `M^A_{kl} = ⟨a_k| V_A† L_η†(S) V_A |a_l⟩`. The dual loss channel acts
//! on the sign operator in closed form:
//! `⟨γ'|L_η†(S)|γ⟩ = ⟨γ'|γ⟩ · erf(√(η/2)(γ + γ'*))`.

use nalgebra::{Matrix2, SVD};

use super::{log_overlap, LocalOp, KERR_FLIP, KERR_KEEP};
use crate::numerics::{exp_times_erf, Complex};

/// `Σ_i coeff_i |label_i⟩` on one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    pub terms: Vec<(Complex, Complex)>,
}

impl Ket {
    pub fn coherent(label: Complex) -> Self {
        Self {
            terms: vec![(Complex::new(1.0, 0.0), label)],
        }
    }

    pub fn scaled(mut self, factor: Complex) -> Self {
        for t in &mut self.terms {
            t.0 *= factor;
        }
        self
    }

    pub fn displace(&self, zeta: Complex) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|&(c, g)| {
                let phase = ((zeta * g.conj() - zeta.conj() * g) * 0.5).exp();
                (c * phase, g + zeta)
            })
            .collect();
        Self { terms }
    }

    pub fn kerr(&self) -> Self {
        let mut terms: Vec<(Complex, Complex)> = Vec::with_capacity(self.terms.len() * 2);
        for &(c, g) in &self.terms {
            for (amp, label) in [(KERR_KEEP, g), (KERR_FLIP, -g)] {
                match terms.iter_mut().find(|t| (t.1 - label).norm() <= 1e-12) {
                    Some(t) => t.0 += c * amp,
                    None => terms.push((c * amp, label)),
                }
            }
        }
        Self { terms }
    }

    /// Applies `ops` in order (first element acts first).
    pub fn apply(&self, ops: &[LocalOp]) -> Self {
        ops.iter().fold(self.clone(), |k, op| match *op {
            LocalOp::Displace(z) => k.displace(z),
            LocalOp::Kerr => k.kerr(),
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Complex {
        self.form(other, |b, k| log_overlap(b, k).exp())
    }

    /// `⟨self| L_η†(S) |other⟩`.
    pub fn sign(&self, other: &Ket, eta: f64) -> Complex {
        let s = (0.5 * eta).sqrt();
        self.form(other, |b, k| exp_times_erf(log_overlap(b, k), (k + b.conj()) * s))
    }

    fn form<F: Fn(Complex, Complex) -> Complex>(&self, other: &Ket, element: F) -> Complex {
        let mut total = Complex::new(0.0, 0.0);
        for &(cb, b) in &self.terms {
            for &(ck, k) in &other.terms {
                total += cb.conj() * ck * element(b, k);
            }
        }
        total
    }
}

/// `M_{kl} = ⟨k| L_η†(S) |l⟩` and the Gram matrix `N_{kl} = ⟨k|l⟩`.
pub fn heisenberg_matrices(kets: &[Ket], eta: f64) -> (Vec<Complex>, Vec<Complex>) {
    let n = kets.len();
    let mut m = vec![Complex::new(0.0, 0.0); n * n];
    let mut g = vec![Complex::new(0.0, 0.0); n * n];
    for k in 0..n {
        for l in 0..n {
            m[k * n + l] = kets[k].sign(&kets[l], eta);
            g[k * n + l] = kets[k].inner(&kets[l]);
        }
    }
    (m, g)
}

/// `⟨e_i| U |e_j⟩` on the pair `e = (|d⟩, |−d⟩)` for the local sequence `ops`.
pub fn effective_matrix(ops: &[LocalOp], d: f64) -> Matrix2<Complex> {
    let basis = [Ket::coherent(Complex::new(d, 0.0)), Ket::coherent(Complex::new(-d, 0.0))];
    let images: Vec<Ket> = basis.iter().map(|k| k.apply(ops)).collect();
    Matrix2::from_fn(|i, j| basis[i].inner(&images[j]))
}

/// Quality of a local sequence as a qubit gate on `(|d⟩, |−d⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateFidelity {
    /// `|Tr(W† R)|/2` with `W` the unitary polar factor of the projected
    /// action and `R` the target; global phases are ignored.
    pub fidelity: f64,
    /// `√(Tr(M†M)/2)`: fraction of the amplitude that stays in the span.
    pub retained: f64,
}

pub fn gate_fidelity(ops: &[LocalOp], d: f64, target: &Matrix2<Complex>) -> GateFidelity {
    let m = effective_matrix(ops, d);
    let retained = ((m.adjoint() * m).trace().re / 2.0).sqrt();
    let svd = SVD::new(m, true, true);
    let polar = svd.u.expect("u requested") * svd.v_t.expect("v_t requested");
    let fidelity = (polar.adjoint() * target).trace().norm() / 2.0;
    GateFidelity { fidelity, retained }
}

/// The paper's `R̂(θ, φ)` acting on `(|α⟩, |−α⟩)^T`.
pub fn rotation(theta: f64, phi: f64) -> Matrix2<Complex> {
    let (s, c) = (0.5 * theta).sin_cos();
    let e = Complex::from_polar(1.0, phi);
    Matrix2::new(
        Complex::new(s, 0.0),
        e * c,
        e.conj() * c,
        Complex::new(-s, 0.0),
    )
}
