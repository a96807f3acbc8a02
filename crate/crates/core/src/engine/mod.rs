//! Exact algebra over finite superpositions of two-mode coherent states.
//!
//! A density operator is stored as a list of [`Dyad`]s,
//! `c |γ_A, γ_B⟩⟨γ'_A, γ'_B|`. Displacements, the Kerr cat map, beam
//! splitters and photon loss all map coherent dyads to (sums of) coherent
//! dyads in closed form, and sign-binned homodyne statistics reduce to
//! complex error functions of the labels. Nothing is truncated.

mod measure;
mod ops;
pub mod pure;
mod settings;
mod states;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Complex;

pub use measure::{correlation, joint_probs, local_sign_moment, sign_element, JointProbs};
pub use ops::{beamsplit, displace, kerr, loss, prune, DEFAULT_PRUNE_TOL};
pub use settings::{
    apply_bell_setting, apply_leggett_setting, bell_sequence, leggett_sequence, LeggettSetting,
    LocalOp,
};
pub use states::{alt_branch, alt_branch_unphased, ets_branch, vacuum};

pub const DEFAULT_LABEL_CAP: f64 = 1e3;

/// `e^{-iπ/4}/√2`: amplitude of `|γ⟩` in `U_NL|γ⟩`.
pub const KERR_KEEP: Complex = Complex::new(0.5, -0.5);
/// `i e^{-iπ/4}/√2`: amplitude of `|−γ⟩` in `U_NL|γ⟩`.
pub const KERR_FLIP: Complex = Complex::new(0.5, 0.5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    A,
    B,
}

/// `coeff · |ket_a, ket_b⟩⟨bra_a, bra_b|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dyad {
    pub coeff: Complex,
    pub ket_a: Complex,
    pub ket_b: Complex,
    pub bra_a: Complex,
    pub bra_b: Complex,
}

impl Dyad {
    pub fn new(coeff: Complex, ket: (Complex, Complex), bra: (Complex, Complex)) -> Self {
        Self {
            coeff,
            ket_a: ket.0,
            ket_b: ket.1,
            bra_a: bra.0,
            bra_b: bra.1,
        }
    }

    pub fn ket(&self, mode: Mode) -> Complex {
        match mode {
            Mode::A => self.ket_a,
            Mode::B => self.ket_b,
        }
    }

    pub fn bra(&self, mode: Mode) -> Complex {
        match mode {
            Mode::A => self.bra_a,
            Mode::B => self.bra_b,
        }
    }

    pub(crate) fn set_labels(&mut self, mode: Mode, ket: Complex, bra: Complex) {
        match mode {
            Mode::A => {
                self.ket_a = ket;
                self.bra_a = bra;
            }
            Mode::B => {
                self.ket_b = ket;
                self.bra_b = bra;
            }
        }
    }

    /// `Tr` of this dyad: `coeff ⟨bra_a|ket_a⟩⟨bra_b|ket_b⟩`.
    pub fn trace(&self) -> Complex {
        self.coeff * overlap(self.bra_a, self.ket_a) * overlap(self.bra_b, self.ket_b)
    }

    /// The conjugate-transposed dyad.
    pub fn adjoint(&self) -> Self {
        Self {
            coeff: self.coeff.conj(),
            ket_a: self.bra_a,
            ket_b: self.bra_b,
            bra_a: self.ket_a,
            bra_b: self.ket_b,
        }
    }

    fn max_label(&self) -> f64 {
        [self.ket_a, self.ket_b, self.bra_a, self.bra_b]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Two-mode operator as a weighted list of coherent dyads.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentOperator {
    pub dyads: Vec<Dyad>,
    pub label_cap: f64,
}

impl CoherentOperator {
    pub fn new(dyads: Vec<Dyad>) -> Self {
        Self {
            dyads,
            label_cap: DEFAULT_LABEL_CAP,
        }
    }

    /// `|ψ⟩⟨ψ|` for `|ψ⟩ = Σ c_i |a_i, b_i⟩`.
    pub fn from_ket(terms: &[(Complex, Complex, Complex)]) -> Self {
        let mut dyads = Vec::with_capacity(terms.len() * terms.len());
        for &(ci, ai, bi) in terms {
            for &(cj, aj, bj) in terms {
                dyads.push(Dyad::new(ci * cj.conj(), (ai, bi), (aj, bj)));
            }
        }
        Self::new(dyads)
    }

    pub fn with_label_cap(mut self, cap: f64) -> Self {
        self.label_cap = cap;
        self
    }

    pub fn len(&self) -> usize {
        self.dyads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dyads.is_empty()
    }

    pub fn mode_count(&self) -> usize {
        2
    }

    pub fn trace(&self) -> Complex {
        self.dyads.iter().map(Dyad::trace).sum()
    }

    pub fn coeff_norm(&self) -> f64 {
        self.dyads.iter().map(|d| d.coeff.norm()).sum()
    }

    pub fn max_label(&self) -> f64 {
        self.dyads.iter().map(Dyad::max_label).fold(0.0, f64::max)
    }

    pub fn check_labels(&self) -> Result<()> {
        let m = self.max_label();
        if !m.is_finite() || m > self.label_cap {
            return Err(Error::LabelCap(m));
        }
        Ok(())
    }

    /// Largest coefficient mismatch between a dyad and its adjoint partner,
    /// after merging duplicates. Zero for an exactly Hermitian operator.
    pub fn hermiticity_defect(&self) -> f64 {
        let merged = prune(self, 0.0);
        let mut worst = 0.0f64;
        for d in &merged.dyads {
            let adj = d.adjoint();
            let partner: Complex = merged
                .dyads
                .iter()
                .filter(|e| same_labels(e, &adj, 1e-10))
                .map(|e| e.coeff)
                .sum();
            worst = worst.max((partner - adj.coeff).norm());
        }
        worst
    }

    /// `Tr(self · other)`, each summand a product of coherent overlaps.
    pub fn trace_product(&self, other: &CoherentOperator) -> Complex {
        let mut total = Complex::new(0.0, 0.0);
        for x in &self.dyads {
            for y in &other.dyads {
                // Tr(|k⟩⟨b| |k'⟩⟨b'|) = ⟨b|k'⟩⟨b'|k⟩
                total += x.coeff
                    * y.coeff
                    * overlap(x.bra_a, y.ket_a)
                    * overlap(x.bra_b, y.ket_b)
                    * overlap(y.bra_a, x.ket_a)
                    * overlap(y.bra_b, x.ket_b);
            }
        }
        total
    }
}

pub(crate) fn same_labels(x: &Dyad, y: &Dyad, tol: f64) -> bool {
    (x.ket_a - y.ket_a).norm() <= tol
        && (x.ket_b - y.ket_b).norm() <= tol
        && (x.bra_a - y.bra_a).norm() <= tol
        && (x.bra_b - y.bra_b).norm() <= tol
}

/// Exponent of the coherent overlap `⟨bra|ket⟩`.
#[inline]
pub fn log_overlap(bra: Complex, ket: Complex) -> Complex {
    bra.conj() * ket - 0.5 * (ket.norm_sqr() + bra.norm_sqr())
}

/// `⟨bra|ket⟩ = exp(bra* ket − |ket|²/2 − |bra|²/2)`.
#[inline]
pub fn overlap(bra: Complex, ket: Complex) -> Complex {
    log_overlap(bra, ket).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_of_opposite_labels_is_gaussian() {
        let g = Complex::new(1.0, 0.0);
        assert!((overlap(-g, g).re - (-2.0f64).exp()).abs() < 1e-15);
        let h = Complex::new(0.3, -0.7);
        assert!((overlap(h, h) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn from_ket_is_hermitian() {
        let a = Complex::new(0.4, 0.1);
        let b = Complex::new(-0.2, 0.9);
        let op = CoherentOperator::from_ket(&[
            (Complex::new(0.6, 0.2), a, b),
            (Complex::new(0.0, -0.5), -a, b),
        ]);
        assert_eq!(op.len(), 4);
        assert!(op.hermiticity_defect() < 1e-15);
        assert!(op.trace().im.abs() < 1e-15);
    }

    #[test]
    fn label_cap_catches_runaway_amplitudes() {
        let big = Complex::new(2e3, 0.0);
        let op = CoherentOperator::from_ket(&[(Complex::new(1.0, 0.0), big, big)]);
        assert!(matches!(op.check_labels(), Err(Error::LabelCap(_))));
        assert!(op.clone().with_label_cap(1e4).check_labels().is_ok());
    }
}
