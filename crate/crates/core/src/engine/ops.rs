use super::{same_labels, CoherentOperator, Dyad, Mode, KERR_FLIP, KERR_KEEP};
use crate::numerics::Complex;

pub const DEFAULT_PRUNE_TOL: f64 = 1e-14;

/// Label distance under which two dyads are treated as the same term.
const MERGE_TOL: f64 = 1e-12;

/// `D(ζ) ρ D(ζ)†` on one mode.
///
/// `D(ζ)|γ⟩ = exp((ζγ* − ζ*γ)/2) |γ + ζ⟩`.
pub fn displace(op: &CoherentOperator, mode: Mode, zeta: Complex) -> CoherentOperator {
    let phase = |g: Complex| ((zeta * g.conj() - zeta.conj() * g) * 0.5).exp();
    let dyads = op
        .dyads
        .iter()
        .map(|d| {
            let (k, b) = (d.ket(mode), d.bra(mode));
            let mut out = *d;
            out.coeff = d.coeff * phase(k) * phase(b).conj();
            out.set_labels(mode, k + zeta, b + zeta);
            out
        })
        .collect();
    CoherentOperator {
        dyads,
        label_cap: op.label_cap,
    }
}

/// Kerr cat map `U_NL|γ⟩ = e^{−iπ/4}(|γ⟩ + i|−γ⟩)/√2` on one mode.
///
/// Each dyad splits into four; labels that coincide (vacuum) merge.
pub fn kerr(op: &CoherentOperator, mode: Mode) -> CoherentOperator {
    let branches = [(KERR_KEEP, 1.0), (KERR_FLIP, -1.0)];
    let mut dyads = Vec::with_capacity(op.dyads.len() * 4);
    for d in &op.dyads {
        let (k, b) = (d.ket(mode), d.bra(mode));
        for &(ck, sk) in &branches {
            for &(cb, sb) in &branches {
                let mut out = *d;
                out.coeff = d.coeff * ck * cb.conj();
                out.set_labels(mode, k * sk, b * sb);
                dyads.push(out);
            }
        }
    }
    prune(
        &CoherentOperator {
            dyads,
            label_cap: op.label_cap,
        },
        0.0,
    )
}

/// Two-mode beam splitter with amplitude transmission `t`:
/// `(γ_A, γ_B) → (tγ_A + rγ_B, −rγ_A + tγ_B)`, `r = √(1 − t²)`.
pub fn beamsplit(op: &CoherentOperator, transmission_amplitude: f64) -> CoherentOperator {
    let t = transmission_amplitude;
    let r = (1.0 - t * t).max(0.0).sqrt();
    let mix = |a: Complex, b: Complex| (a * t + b * r, -a * r + b * t);
    let dyads = op
        .dyads
        .iter()
        .map(|d| {
            let (ka, kb) = mix(d.ket_a, d.ket_b);
            let (ba, bb) = mix(d.bra_a, d.bra_b);
            Dyad {
                coeff: d.coeff,
                ket_a: ka,
                ket_b: kb,
                bra_a: ba,
                bra_b: bb,
            }
        })
        .collect();
    CoherentOperator {
        dyads,
        label_cap: op.label_cap,
    }
}

/// Photon loss with intensity transmission `eta`, ancilla traced out:
/// `|γ⟩⟨γ'| → exp[(1−η)(γγ'* − (|γ|²+|γ'|²)/2)] |√η γ⟩⟨√η γ'|`.
pub fn loss(op: &CoherentOperator, mode: Mode, eta: f64) -> CoherentOperator {
    if eta == 1.0 {
        return op.clone();
    }
    let s = eta.sqrt();
    let dyads = op
        .dyads
        .iter()
        .map(|d| {
            let (k, b) = (d.ket(mode), d.bra(mode));
            let factor = ((1.0 - eta) * (k * b.conj() - 0.5 * (k.norm_sqr() + b.norm_sqr()))).exp();
            let mut out = *d;
            out.coeff = d.coeff * factor;
            out.set_labels(mode, k * s, b * s);
            out
        })
        .collect();
    CoherentOperator {
        dyads,
        label_cap: op.label_cap,
    }
}

/// Merges dyads whose four labels agree within `1e-12` and drops terms with
/// `|coeff| < tol · |Tr op|`. `|coeff|` bounds the magnitude of the term
/// under any later unitary and any bounded observable, so a dropped term
/// moves a normalized expectation value by at most `tol`.
pub fn prune(op: &CoherentOperator, tol: f64) -> CoherentOperator {
    let mut sorted = op.dyads.clone();
    sorted.sort_by(|x, y| {
        let kx = [
            x.ket_a.re, x.ket_a.im, x.ket_b.re, x.ket_b.im, x.bra_a.re, x.bra_a.im, x.bra_b.re,
            x.bra_b.im,
        ];
        let ky = [
            y.ket_a.re, y.ket_a.im, y.ket_b.re, y.ket_b.im, y.bra_a.re, y.bra_a.im, y.bra_b.re,
            y.bra_b.im,
        ];
        kx.iter()
            .zip(&ky)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut merged: Vec<Dyad> = Vec::with_capacity(sorted.len());
    for d in sorted {
        match merged.last_mut() {
            Some(last) if same_labels(last, &d, MERGE_TOL) => last.coeff += d.coeff,
            _ => merged.push(d),
        }
    }
    let threshold = if tol > 0.0 {
        tol * op.trace().norm()
    } else {
        0.0
    };
    merged.retain(|d| d.coeff.norm() > threshold);
    CoherentOperator {
        dyads: merged,
        label_cap: op.label_cap,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{overlap, vacuum};
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn coherent(a: Complex, b: Complex) -> CoherentOperator {
        CoherentOperator::from_ket(&[(c(1.0, 0.0), a, b)])
    }

    fn sample_op() -> CoherentOperator {
        CoherentOperator::from_ket(&[
            (c(0.7, 0.1), c(0.8, -0.3), c(0.2, 0.5)),
            (c(-0.2, 0.4), c(-0.8, 0.3), c(-0.2, -0.5)),
            (c(0.1, 0.0), c(0.0, 1.1), c(0.9, 0.0)),
        ])
    }

    #[test]
    fn displace_zero_is_identity() {
        let op = sample_op();
        assert_eq!(displace(&op, Mode::A, c(0.0, 0.0)), op);
    }

    #[test]
    fn displaced_vacuum_is_coherent_state() {
        let z = c(0.4, -1.2);
        let op = displace(&vacuum(), Mode::B, z);
        assert_eq!(op.len(), 1);
        let d = op.dyads[0];
        assert_eq!(d.ket_b, z);
        assert_eq!(d.bra_b, z);
        assert!((op.trace() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn unitary_ops_preserve_trace_and_hermiticity() {
        let op = sample_op();
        let t0 = op.trace();
        let ops = [
            displace(&op, Mode::A, c(0.3, 0.7)),
            kerr(&op, Mode::B),
            beamsplit(&op, 0.6),
            kerr(&kerr(&op, Mode::A), Mode::A),
        ];
        for o in ops {
            assert!((o.trace() - t0).norm() < 1e-12);
            assert!(o.hermiticity_defect() < 1e-12);
        }
    }

    #[test]
    fn kerr_on_vacuum_leaves_state_unchanged() {
        let op = kerr(&vacuum(), Mode::A);
        assert_eq!(op.len(), 1);
        assert!((op.dyads[0].coeff - 1.0).norm() < 1e-15);
    }

    #[test]
    fn kerr_twice_is_parity_up_to_phase() {
        let g = c(0.9, 0.4);
        let op = kerr(&kerr(&coherent(g, c(0.0, 0.0)), Mode::A), Mode::A);
        let twin = coherent(-g, c(0.0, 0.0));
        // same operator: compare via the Hilbert-Schmidt distance
        let dist = op.trace_product(&op) + twin.trace_product(&twin)
            - op.trace_product(&twin) * 2.0;
        assert!(dist.norm() < 1e-12, "{dist}");
    }

    #[test]
    fn beamsplitter_unit_transmission_is_identity_and_half_splits() {
        let op = sample_op();
        assert_eq!(beamsplit(&op, 1.0), op);
        let a = c(1.3, -0.4);
        let out = beamsplit(&coherent(a, c(0.0, 0.0)), std::f64::consts::FRAC_1_SQRT_2);
        let d = out.dyads[0];
        assert!((d.ket_a - a / 2f64.sqrt()).norm() < 1e-15);
        assert!((d.ket_b + a / 2f64.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn loss_identity_and_diagonal_dyads() {
        let op = sample_op();
        assert_eq!(loss(&op, Mode::A, 1.0), op);
        let g = c(1.1, -0.2);
        let out = loss(&coherent(g, c(0.0, 0.0)), Mode::A, 0.3);
        assert!((out.dyads[0].coeff - 1.0).norm() < 1e-15);
        assert!((out.dyads[0].ket_a - g * 0.3f64.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn loss_suppresses_cat_coherence() {
        let g = c(1.0, 0.0);
        let op = CoherentOperator::new(vec![Dyad::new(c(1.0, 0.0), (g, c(0.0, 0.0)), (-g, c(0.0, 0.0)))]);
        let out = loss(&op, Mode::A, 0.5);
        assert!((out.dyads[0].coeff.re - (-2.0 * 0.5f64).exp()).abs() < 1e-15);
        assert!((out.dyads[0].bra_a + g * 0.5f64.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn loss_composes_multiplicatively() {
        let op = sample_op();
        let twice = loss(&loss(&op, Mode::B, 0.7), Mode::B, 0.4);
        let once = loss(&op, Mode::B, 0.28);
        for (x, y) in twice.dyads.iter().zip(&once.dyads) {
            assert!((x.coeff - y.coeff).norm() < 1e-10);
            assert!((x.ket_b - y.ket_b).norm() < 1e-12);
        }
        assert!((op.trace() - once.trace()).norm() < 1e-12);
    }

    #[test]
    fn prune_merges_duplicates() {
        let op = sample_op();
        let mut doubled = op.clone();
        doubled.dyads.extend(op.dyads.iter().copied());
        let merged = prune(&doubled, 0.0);
        assert_eq!(merged.len(), op.len());
        assert!((merged.trace() - op.trace() * 2.0).norm() < 1e-12);
    }

    #[test]
    fn overlap_after_displacement_composition() {
        // D(ζ2)D(ζ1)|0⟩ = exp(i Im(ζ2 ζ1*)) |ζ1+ζ2⟩
        let (z1, z2) = (c(0.3, -0.5), c(-0.1, 0.8));
        let ket = displace(&displace(&vacuum(), Mode::A, z1), Mode::A, z2);
        let d = ket.dyads[0];
        assert!((d.ket_a - (z1 + z2)).norm() < 1e-15);
        // the density operator carries |phase|² = 1
        assert!((d.coeff - 1.0).norm() < 1e-15);
        let _ = overlap(z1, z2);
    }
}
