//! Local measurement settings built from displacements and Kerr maps.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{displace, kerr, CoherentOperator, Mode};
use crate::numerics::Complex;

/// One step of a local gate sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalOp {
    Displace(Complex),
    Kerr,
}

/// `V̂(θ) = U_NL D(iθ/2d) U_NL`, listed in application order.
pub fn bell_sequence(theta: f64, d: f64) -> Vec<LocalOp> {
    vec![
        LocalOp::Kerr,
        LocalOp::Displace(Complex::new(0.0, theta / (2.0 * d))),
        LocalOp::Kerr,
    ]
}

/// Polar/azimuthal angles of a Leggett measurement direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeggettSetting {
    pub theta: f64,
    pub phi: f64,
}

impl LeggettSetting {
    /// Canonicalizes to `θ ∈ [0, π]`, `φ ∈ [−π, π]` (same direction).
    pub fn new(theta: f64, phi: f64) -> Self {
        let mut t = wrap(theta);
        let mut p = phi;
        if t < 0.0 {
            t = -t;
            p += PI;
        }
        Self {
            theta: t,
            phi: wrap(p),
        }
    }

    /// Cartesian unit vector.
    pub fn vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Wraps into `[−π, π]`, leaving values already in range untouched.
fn wrap(x: f64) -> f64 {
    if (-PI..=PI).contains(&x) {
        return x;
    }
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI && x > 0.0 {
        PI
    } else {
        y
    }
}

/// `D(−iφ/4d) U_NL D(iθ/4d) U_NL D(iφ/4d)` in application order
/// (rightmost factor first), with the paper's `α` identified with `d`.
pub fn leggett_sequence(setting: LeggettSetting, d: f64) -> Vec<LocalOp> {
    let z = |x: f64| LocalOp::Displace(Complex::new(0.0, x / (4.0 * d)));
    vec![
        z(setting.phi),
        LocalOp::Kerr,
        z(setting.theta),
        LocalOp::Kerr,
        z(-setting.phi),
    ]
}

fn apply_sequence(op: &CoherentOperator, ops: &[LocalOp], mode: Mode) -> CoherentOperator {
    ops.iter().fold(op.clone(), |acc, step| match *step {
        LocalOp::Displace(zeta) => displace(&acc, mode, zeta),
        LocalOp::Kerr => kerr(&acc, mode),
    })
}

pub fn apply_bell_setting(op: &CoherentOperator, theta: f64, mode: Mode, d: f64) -> CoherentOperator {
    apply_sequence(op, &bell_sequence(theta, d), mode)
}

pub fn apply_leggett_setting(
    op: &CoherentOperator,
    setting: LeggettSetting,
    mode: Mode,
    d: f64,
) -> CoherentOperator {
    apply_sequence(op, &leggett_sequence(setting, d), mode)
}

#[cfg(test)]
mod tests {
    use super::super::{correlation, ets_branch, prune, DEFAULT_PRUNE_TOL};
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn canonicalization() {
        let s = LeggettSetting::new(-0.5, 0.3);
        assert!((s.theta - 0.5).abs() < 1e-15);
        assert!((s.phi - (0.3 + PI - 2.0 * PI)).abs() < 1e-12);
        let u = LeggettSetting::new(0.5, 0.3);
        assert_eq!(u, LeggettSetting { theta: 0.5, phi: 0.3 });
        let v = LeggettSetting::new(1.0, 7.0);
        assert!((v.phi - (7.0 - 2.0 * PI)).abs() < 1e-12);
        // the Cartesian direction is unchanged by canonicalization
        let raw = [(-0.5f64).sin() * 0.3f64.cos(), (-0.5f64).sin() * 0.3f64.sin(), 0.5f64.cos()];
        for (a, b) in s.vector().iter().zip(raw) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_setting_is_parity() {
        let op = ets_branch(c(0.9, 0.1), c(0.8, -0.2));
        let flipped = apply_bell_setting(&op, 0.0, Mode::A, 1.0);
        // parity on A alone maps the branch to ½(|−α,β⟩ + |α,−β⟩)(…)
        let want = CoherentOperator::from_ket(&[
            (c(std::f64::consts::FRAC_1_SQRT_2, 0.0), c(-0.9, -0.1), c(0.8, -0.2)),
            (c(std::f64::consts::FRAC_1_SQRT_2, 0.0), c(0.9, 0.1), c(-0.8, 0.2)),
        ]);
        let dist = flipped.trace_product(&flipped) + want.trace_product(&want)
            - flipped.trace_product(&want) * 2.0;
        assert!(dist.norm() < 1e-12);
        let l = apply_leggett_setting(&op, LeggettSetting::new(0.0, 0.0), Mode::A, 1.0);
        let dist = l.trace_product(&l) + want.trace_product(&want) - l.trace_product(&want) * 2.0;
        assert!(dist.norm() < 1e-12);
    }

    #[test]
    fn settings_preserve_trace() {
        let op = ets_branch(c(1.1, 0.2), c(0.9, 0.0));
        let t0 = op.trace();
        let b = apply_bell_setting(&op, 0.7, Mode::B, 1.1);
        let l = apply_leggett_setting(&op, LeggettSetting::new(1.0, 0.4), Mode::A, 1.1);
        assert!((b.trace() - t0).norm() < 1e-12);
        assert!((l.trace() - t0).norm() < 1e-12);
        assert!(l.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn pruning_the_leggett_pipeline_is_harmless() {
        let op = ets_branch(c(1.3, 0.0), c(1.3, 0.0));
        let s = LeggettSetting::new(1.2, 0.25);
        let t = LeggettSetting::new(0.4, 1.9);
        let full = apply_leggett_setting(&apply_leggett_setting(&op, s, Mode::A, 1.3), t, Mode::B, 1.3);
        let pruned = prune(&full, DEFAULT_PRUNE_TOL);
        let (a, b) = (correlation(&full, 0.8).unwrap(), correlation(&pruned, 0.8).unwrap());
        assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }
}
