//! Closed-form correlations of the qubit-mediated ETS `ρ^{Ψ(+)}`.
//!
//! Every local gate built from displacements and the Kerr cat map sends a
//! coherent state `|σα⟩` to a finite sum of terms
//! `c · exp(λα + μα*) |sα + δ⟩` with `s = ±1` (an "affine" ket). The
//! matrix element of the lossy sign operator between two such terms is
//! `exp(quadratic in Re α, Im α) · erf(linear)`, and the quadratic part is
//! always diagonal, `−(1 − s s')|α|²`. The Gaussian P-function average of
//! each term therefore factorizes into two one-dimensional Gaussian
//! integrals of `exp(−κx² + βx) · erf(ux + v)`, which have closed forms:
//!
//! `E[e^{−κx²+βx}] = (1+2κs²)^{−1/2} exp((−κm² + βm + β²s²/2)/(1+2κs²))`
//! for `x ~ N(m, s²)`, after which `x` is again Gaussian with mean
//! `m' = (m+βs²)/(1+2κs²)` and variance `s'² = s²/(1+2κs²)`, and
//! `E[erf(ux+v)] = erf((um'+v)/√(1+2u²s'²))`. For the combinations that
//! occur, `u²` is real and `1+2u²s'² > 0`, so no branch cuts are crossed.
//!
//! [`corr_eq1`] is the paper's Eq. (1) re-derived this way (the printed
//! formula, kept as [`corr_eq1_printed`], does not reproduce the
//! constructive model; see the repository's decision ledger).

use serde::{Deserialize, Serialize};

use crate::engine::{bell_sequence, leggett_sequence, LeggettSetting, LocalOp, KERR_FLIP, KERR_KEEP};
use crate::error::{invalid, Error, Result};
use crate::numerics::{erf_complex, erfi_complex, exp_times_erf, Complex};

/// Thermal variance `V`, displacement `d` and homodyne efficiency `η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtsParams {
    pub v: f64,
    pub d: f64,
    pub eta: f64,
}

impl EtsParams {
    pub fn new(v: f64, d: f64, eta: f64) -> Result<Self> {
        let p = Self { v, d, eta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v >= 1.0) || !self.v.is_finite() {
            return Err(invalid("V", format!("need V >= 1, got {}", self.v)));
        }
        if !(self.d > 0.0) || !self.d.is_finite() {
            return Err(invalid("d", format!("need d > 0, got {}", self.d)));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(invalid("eta", format!("need 0 < eta <= 1, got {}", self.eta)));
        }
        Ok(())
    }

    /// Per-component variance `(V − 1)/4` of the P-function.
    pub fn spread(&self) -> f64 {
        (self.v - 1.0) / 4.0
    }
}

/// The four CHSH angles `(θ_A, θ_B, θ'_A, θ'_B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshAngles {
    pub theta_a: f64,
    pub theta_b: f64,
    pub theta_a2: f64,
    pub theta_b2: f64,
}

impl ChshAngles {
    pub fn new(theta_a: f64, theta_b: f64, theta_a2: f64, theta_b2: f64) -> Self {
        Self {
            theta_a,
            theta_b,
            theta_a2,
            theta_b2,
        }
    }

    pub fn from_slice(x: &[f64]) -> Self {
        Self::new(x[0], x[1], x[2], x[3])
    }

    pub fn to_vec(&self) -> Vec<f64> {
        vec![self.theta_a, self.theta_b, self.theta_a2, self.theta_b2]
    }
}

/// `c · exp(λα + μα*) |sα + δ⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct AffineTerm {
    coeff: Complex,
    s: f64,
    delta: Complex,
    lam: Complex,
    mu: Complex,
}

fn propagate(sigma: f64, ops: &[LocalOp]) -> Vec<AffineTerm> {
    let zero = Complex::new(0.0, 0.0);
    let mut terms = vec![AffineTerm {
        coeff: Complex::new(1.0, 0.0),
        s: sigma,
        delta: zero,
        lam: zero,
        mu: zero,
    }];
    for op in ops {
        terms = match *op {
            LocalOp::Displace(z) => terms
                .into_iter()
                .map(|t| AffineTerm {
                    // D(ζ)|γ⟩ = e^{(ζγ* − ζ*γ)/2}|γ+ζ⟩ with γ = sα + δ
                    coeff: t.coeff * ((z * t.delta.conj() - z.conj() * t.delta) * 0.5).exp(),
                    s: t.s,
                    delta: t.delta + z,
                    lam: t.lam - z.conj() * (0.5 * t.s),
                    mu: t.mu + z * (0.5 * t.s),
                })
                .collect(),
            LocalOp::Kerr => {
                let mut out: Vec<AffineTerm> = Vec::with_capacity(terms.len() * 2);
                for t in terms {
                    for (amp, flip) in [(KERR_KEEP, 1.0), (KERR_FLIP, -1.0)] {
                        let new = AffineTerm {
                            coeff: t.coeff * amp,
                            s: t.s * flip,
                            delta: t.delta * flip,
                            lam: t.lam,
                            mu: t.mu,
                        };
                        match out.iter_mut().find(|o| same_term(o, &new)) {
                            Some(o) => o.coeff += new.coeff,
                            None => out.push(new),
                        }
                    }
                }
                out
            }
        };
    }
    terms
}

fn same_term(x: &AffineTerm, y: &AffineTerm) -> bool {
    const TOL: f64 = 1e-13;
    x.s == y.s
        && (x.delta - y.delta).norm() <= TOL
        && (x.lam - y.lam).norm() <= TOL
        && (x.mu - y.mu).norm() <= TOL
}

/// `E[e^{−κx²+βx}]` for `x ~ N(m, s²)` as (log factor, tilted mean, tilted variance).
fn gauss_tilt(kappa: f64, beta: Complex, m: f64, s2: f64) -> (Complex, Complex, f64) {
    let denom = 1.0 + 2.0 * kappa * s2;
    let log_factor =
        (beta * m + beta * beta * (0.5 * s2) - kappa * m * m) / denom - 0.5 * denom.ln();
    ((log_factor), (beta * s2 + m) / denom, s2 / denom)
}

/// P-averaged `⟨bra-term(α)| O |ket-term(α)⟩` with `O = L_η†(S)` or `1`.
fn averaged_element(ket: &AffineTerm, bra: &AffineTerm, p: &EtsParams, with_sign: bool) -> Complex {
    let (a, b) = (ket.s, bra.s);
    let (dk, dl) = (ket.delta, bra.delta);
    // coefficients of α and α* in the exponent, collecting the ket phase,
    // the conjugated bra phase and the coherent overlap
    let coef_alpha = ket.lam + bra.mu.conj() + dl.conj() * a - dk.conj() * (0.5 * a) - dl.conj() * (0.5 * b);
    let coef_conj = ket.mu + bra.lam.conj() + dk * b - dk * (0.5 * a) - dl * (0.5 * b);
    let constant = dl.conj() * dk - 0.5 * (dk.norm_sqr() + dl.norm_sqr());
    let kappa = 1.0 - a * b;
    let beta_x = coef_alpha + coef_conj;
    let beta_y = (coef_alpha - coef_conj) * Complex::new(0.0, 1.0);
    let s2 = p.spread();
    let (fx, mx, vx) = gauss_tilt(kappa, beta_x, p.d, s2);
    let (fy, my, vy) = gauss_tilt(kappa, beta_y, 0.0, s2);
    let log_total = constant + fx + fy;
    let coeff = bra.coeff.conj() * ket.coeff;
    if !with_sign {
        return coeff * log_total.exp();
    }
    let r = (0.5 * p.eta).sqrt();
    let v = (dk + dl.conj()) * r;
    let arg = if a == b {
        // erf(√(2η) a x + v)
        let u = 2.0 * r * a;
        (mx * u + v) / (1.0 + 2.0 * u * u * vx).sqrt()
    } else {
        // erf(i √(2η) a y + v); u² = −2η
        let u = Complex::new(0.0, 2.0 * r * a);
        (my * u + v) / (1.0 - 8.0 * r * r * vy).sqrt()
    };
    coeff * exp_times_erf(log_total, arg)
}

/// P-averaged single-mode matrices of one local setting:
/// `sign[i][j] = E_α⟨σ_j α| V† L_η†(S) V |σ_i α⟩` and the Gram analogue
/// `gram[i][j] = E_α⟨σ_j α|σ_i α⟩`, with `σ = (+1, −1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeKernel {
    pub sign: [[Complex; 2]; 2],
    pub gram: [[Complex; 2]; 2],
}

pub fn mode_kernel(ops: &[LocalOp], params: &EtsParams) -> ModeKernel {
    let kets = [propagate(1.0, ops), propagate(-1.0, ops)];
    let mut sign = [[Complex::new(0.0, 0.0); 2]; 2];
    let mut gram = [[Complex::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in &kets[i] {
                for l in &kets[j] {
                    sign[i][j] += averaged_element(k, l, params, true);
                    gram[i][j] += averaged_element(k, l, params, false);
                }
            }
        }
    }
    ModeKernel { sign, gram }
}

/// `Tr[ρ (S⊗S)]/Tr ρ` from the two local kernels. The branch
/// `½ Σ_{σσ'} |σα,σβ⟩⟨σ'α,σ'β|` couples the modes only through the shared
/// `(σ, σ')` index and α, β are independent, so the average factorizes.
pub fn kernel_correlation(ka: &ModeKernel, kb: &ModeKernel) -> Result<f64> {
    let mut num = Complex::new(0.0, 0.0);
    let mut den = Complex::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            num += ka.sign[i][j] * kb.sign[i][j];
            den += ka.gram[i][j] * kb.gram[i][j];
        }
    }
    checked(num / den)
}

fn checked(c: Complex) -> Result<f64> {
    if !c.re.is_finite() || !c.im.is_finite() {
        return Err(Error::FormulaInconsistency(format!("non-finite correlation {c}")));
    }
    if c.im.abs() > 1e-6 {
        return Err(Error::FormulaInconsistency(format!("imaginary residue {:.3e}", c.im)));
    }
    if c.re.abs() > 1.0 + 1e-6 {
        return Err(Error::FormulaInconsistency(format!("|C| = {} exceeds 1", c.re)));
    }
    Ok(c.re.clamp(-1.0, 1.0))
}

/// Correlation of `ρ^{Ψ(+)}` with arbitrary local gate sequences.
pub fn ets_correlation(ops_a: &[LocalOp], ops_b: &[LocalOp], params: &EtsParams) -> Result<f64> {
    params.validate()?;
    kernel_correlation(&mode_kernel(ops_a, params), &mode_kernel(ops_b, params))
}

/// Eq. (1), re-derived: `C(θ_A, θ_B, η)` for the Bell settings
/// `V̂(θ) = U_NL D(iθ/2d) U_NL`.
pub fn corr_eq1(theta_a: f64, theta_b: f64, params: &EtsParams) -> Result<f64> {
    params.validate()?;
    if !theta_a.is_finite() || !theta_b.is_finite() {
        return Err(invalid("theta", "angles must be finite"));
    }
    ets_correlation(&bell_sequence(theta_a, params.d), &bell_sequence(theta_b, params.d), params)
}

/// `B = C(θ_A,θ_B) + C(θ'_A,θ_B) + C(θ_A,θ'_B) − C(θ'_A,θ'_B)`.
pub fn bell_b(angles: &ChshAngles, params: &EtsParams) -> Result<f64> {
    params.validate()?;
    let k = |t: f64| mode_kernel(&bell_sequence(t, params.d), params);
    let (a, b, a2, b2) = (k(angles.theta_a), k(angles.theta_b), k(angles.theta_a2), k(angles.theta_b2));
    Ok(kernel_correlation(&a, &b)? + kernel_correlation(&a2, &b)? + kernel_correlation(&a, &b2)?
        - kernel_correlation(&a2, &b2)?)
}

/// `C^L(a, b)` for the three-displacement Leggett sequences, exactly as
/// printed on both sides (no azimuth convention applied).
pub fn leggett_correlation(a: LeggettSetting, b: LeggettSetting, params: &EtsParams) -> Result<f64> {
    params.validate()?;
    ets_correlation(&leggett_sequence(a, params.d), &leggett_sequence(b, params.d), params)
}

/// Eq. (1) transcribed literally as printed, including `η` in the places
/// the paper puts it. Kept for the erratum comparison only: it does not
/// agree with the constructive model. `θ_B = 0` (where `s_θ` is undefined)
/// is evaluated as the average of the two one-sided limits and an error is
/// returned if they disagree by more than `1e-9`.
pub fn corr_eq1_printed(theta_a: f64, theta_b: f64, params: &EtsParams) -> Result<f64> {
    params.validate()?;
    if theta_b == 0.0 {
        let h = 1e-9;
        let lo = printed_value(theta_a, -h, params);
        let hi = printed_value(theta_a, h, params);
        if (lo - hi).norm() > 1e-6 {
            return Err(Error::FormulaInconsistency(format!(
                "one-sided limits at θ_B = 0 disagree: {lo} vs {hi}"
            )));
        }
        return checked((lo + hi) * 0.5);
    }
    checked(printed_value(theta_a, theta_b, params))
}

fn printed_value(ta: f64, tb: f64, p: &EtsParams) -> Complex {
    let (v, d, eta) = (p.v, p.d, p.eta);
    let i = Complex::new(0.0, 1.0);
    let cexp = |z: Complex| z.exp();
    let y = 1.0 / (8.0 * (1.0 + v * v * (4.0 * d * d / v).exp()));
    let h = |mu: f64| (2.0 * (d.powi(4) + mu * mu) / (d * d * v)).exp();
    let w = cexp(-i * 4.0 * (ta + tb) - 2.0 * (1.0 + v * v) * (ta * ta + tb * tb) / (d * d * v));
    let q = cexp(i * 4.0 * tb + 2.0 * v * (ta * ta + tb * tb) / (d * d)) * 8.0;
    let f = |mu: f64, sgn: f64| {
        erf_complex(
            (Complex::new(d * d, sgn * v * mu)) * (2f64.sqrt() * eta)
                / (d * (1.0 + eta * eta * (v - 1.0)).sqrt()),
        )
    };
    let fp = |mu: f64| f(mu, 1.0);
    let fm = |mu: f64| f(mu, -1.0);
    let kappa = |mu: f64, nu: f64| fm(mu) - cexp(i * 8.0 * nu) * fp(mu);
    let g = |mu: f64| {
        erfi_complex(Complex::new(
            2f64.sqrt() * eta * mu / (d * (v * v - eta * eta * v * (v - 1.0)).sqrt()),
            0.0,
        ))
    };
    let s = |mu: f64| mu.signum();
    let first = cexp(i * 4.0 * ta)
        * g(ta)
        * (i * (2.0 * d * d / v).exp() * y * h(tb) * kappa(tb, tb) + q * g(tb) * s(tb));
    let second = y
        * h(ta)
        * (i * cexp(i * 4.0 * tb + 2.0 * v * tb * tb / (d * d)) * g(tb) * s(tb) * kappa(ta, tb)
            + 4.0 * y * h(tb)
                * (cexp(i * 8.0 * ta) * fm(tb) * fp(ta) + cexp(i * 8.0 * tb) * fm(ta) * fp(tb)));
    y * w * (first + second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{apply_bell_setting, apply_leggett_setting, correlation, ets_branch, Mode};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    fn engine_bell(ta: f64, tb: f64, d: f64, eta: f64) -> f64 {
        let op = ets_branch(Complex::new(d, 0.0), Complex::new(d, 0.0));
        let op = apply_bell_setting(&apply_bell_setting(&op, ta, Mode::A, d), tb, Mode::B, d);
        correlation(&op, eta).unwrap()
    }

    #[test]
    fn params_are_validated() {
        assert!(EtsParams::new(0.5, 1.0, 1.0).is_err());
        assert!(EtsParams::new(1.0, 0.0, 1.0).is_err());
        assert!(EtsParams::new(1.0, 1.0, 0.0).is_err());
        assert!(EtsParams::new(1.0, 1.0, 1.5).is_err());
        assert!(EtsParams::new(1.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn gram_kernel_matches_normalization() {
        // Σ n^A n^B = 2(1 + e^{−4d²/V}/V²), the inverse of the printed 8Y up to 1/4
        let p = EtsParams::new(3.0, 0.7, 0.5).unwrap();
        let k = mode_kernel(&bell_sequence(0.3, p.d), &p);
        let den: Complex = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| k.gram[i][j] * k.gram[i][j])
            .sum();
        let want = 2.0 * (1.0 + (-4.0 * p.d * p.d / p.v).exp() / (p.v * p.v));
        assert!((den - want).norm() < 1e-12, "{den} vs {want}");
    }

    #[test]
    fn pure_state_matches_engine() {
        for &(ta, tb, d, eta) in &[(0.3, -0.3, 1.0, 1.0), (0.9, 0.1, 1.0, 0.4), (-1.2, 2.0, 1.7, 0.05)] {
            let p = EtsParams::new(1.0, d, eta).unwrap();
            let a = corr_eq1(ta, tb, &p).unwrap();
            let e = engine_bell(ta, tb, d, eta);
            assert!((a - e).abs() < 1e-12, "{a} vs {e}");
        }
    }

    #[test]
    fn leggett_pure_state_matches_engine() {
        let d = 1.3;
        let p = EtsParams::new(1.0, d, 0.7).unwrap();
        let (a, b) = (LeggettSetting::new(1.1, 0.4), LeggettSetting::new(FRAC_PI_2, -0.25));
        let op = ets_branch(Complex::new(d, 0.0), Complex::new(d, 0.0));
        let op = apply_leggett_setting(&apply_leggett_setting(&op, a, Mode::A, d), b, Mode::B, d);
        let e = correlation(&op, 0.7).unwrap();
        let c = leggett_correlation(a, b, &p).unwrap();
        assert!((c - e).abs() < 1e-12, "{c} vs {e}");
    }

    #[test]
    fn equal_angles_give_b_equal_twice_c() {
        let p = EtsParams::new(5.0, 2.0, 0.6).unwrap();
        let t = 0.37;
        let b = bell_b(&ChshAngles::new(t, t, t, t), &p).unwrap();
        assert!((b - 2.0 * corr_eq1(t, t, &p).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn large_d_pure_state_approaches_cirelson() {
        let p = EtsParams::new(1.0, 6.0, 1.0).unwrap();
        // C ≈ cos(2θ_A − 2θ_B): the textbook CHSH angles, halved
        let q = std::f64::consts::PI / 8.0;
        let b = bell_b(&ChshAngles::new(0.0, q, 2.0 * q, -q), &p).unwrap();
        assert!(b > 2.8 && b <= 2.0 * SQRT_2 + 1e-9, "{b}");
    }

    #[test]
    fn printed_formula_is_finite_and_distinct() {
        let p = EtsParams::new(1.0, 1.0, 1.0).unwrap();
        let printed = corr_eq1_printed(0.3, -0.3, &p);
        let derived = corr_eq1(0.3, -0.3, &p).unwrap();
        // the literal transcription either errors out or disagrees
        if let Ok(v) = printed {
            assert!((v - derived).abs() > 1e-6);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn correlation_is_bounded_and_symmetric(
            ta in -3.2f64..3.2, tb in -3.2f64..3.2,
            v in 1.0f64..2000.0, d in 0.05f64..8.0, eta in 0.01f64..1.0,
        ) {
            let p = EtsParams::new(v, d, eta).unwrap();
            let c1 = corr_eq1(ta, tb, &p).unwrap();
            let c2 = corr_eq1(tb, ta, &p).unwrap();
            prop_assert!(c1.abs() <= 1.0 + 1e-9);
            prop_assert!((c1 - c2).abs() < 1e-10);
        }

        #[test]
        fn chsh_never_exceeds_cirelson(
            x in proptest::collection::vec(-3.2f64..3.2, 4),
            v in 1.0f64..2000.0, d in 0.05f64..8.0, eta in 0.01f64..1.0,
        ) {
            let p = EtsParams::new(v, d, eta).unwrap();
            let b = bell_b(&ChshAngles::from_slice(&x), &p).unwrap();
            prop_assert!(b.abs() <= 2.0 * SQRT_2 + 1e-6);
        }
    }
}
