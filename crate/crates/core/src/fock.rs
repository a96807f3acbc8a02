//! Brute-force truncated number-basis oracle.
//!
//! Deliberately independent of the coherent-state formulas it validates:
//! displacements come from matrix exponentials of `ζa† − ζ*a` in a padded
//! space, the beam splitter from exponentiating `a†b − ab†` block by block,
//! loss from its Kraus operators and the sign observable from numerical
//! quadrature of Hermite functions. Two-mode states are pure kets stored as
//! `dim × dim` amplitude matrices `ψ[m, n]` (mode A index first); loss only
//! ever happens at detection, where it is applied in the Heisenberg picture.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::engine::{CoherentOperator, LeggettSetting, LocalOp, Mode, KERR_FLIP, KERR_KEEP};
use crate::engine::{bell_sequence, leggett_sequence};
use crate::ensemble::Family;
use crate::error::{invalid, Error, Result};
use crate::numerics::Complex;

/// Extra levels used when exponentiating the displacement generator.
const DISPLACE_PAD: usize = 40;
/// Largest supported truncation per mode.
pub const MAX_DIM: usize = 160;
/// Tolerated population in the top five levels of any mode.
pub const TAIL_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

/// Smallest dimension the oracle accepts for amplitude `|γ|`.
pub fn min_dim(gamma_abs: f64) -> usize {
    (gamma_abs * gamma_abs + 6.0 * gamma_abs + 10.0).ceil() as usize
}

fn check_dim(dim: usize) -> Result<()> {
    if !(2..=MAX_DIM).contains(&dim) {
        return Err(invalid("dim", format!("need 2 <= dim <= {MAX_DIM}, got {dim}")));
    }
    Ok(())
}

/// Coherent-state amplitudes `e^{−|γ|²/2} γⁿ/√n!`.
pub fn fock_coherent(gamma: Complex, dim: usize) -> Result<DVector<Complex>> {
    check_dim(dim)?;
    if dim < min_dim(gamma.norm()) {
        return Err(Error::Truncation(format!(
            "|γ| = {:.3} needs dim >= {}, got {dim}",
            gamma.norm(),
            min_dim(gamma.norm())
        )));
    }
    let mut v = DVector::from_element(dim, c(0.0));
    v[0] = c((-0.5 * gamma.norm_sqr()).exp());
    for n in 1..dim {
        v[n] = v[n - 1] * gamma / (n as f64).sqrt();
    }
    Ok(v)
}

fn annihilation(dim: usize) -> DMatrix<Complex> {
    DMatrix::from_fn(dim, dim, |i, j| if j == i + 1 { c((j as f64).sqrt()) } else { c(0.0) })
}

/// `exp(ζa† − ζ*a)`, exponentiated in `dim + 40` levels and cropped.
pub fn fock_displace(zeta: Complex, dim: usize) -> Result<DMatrix<Complex>> {
    check_dim(dim)?;
    let big = dim + DISPLACE_PAD;
    let a = annihilation(big);
    let generator = a.adjoint() * zeta - a * zeta.conj();
    Ok(generator.exp().view((0, 0), (dim, dim)).into_owned())
}

/// `diag(e^{−iπn²/2})`.
pub fn fock_kerr(dim: usize) -> Result<DMatrix<Complex>> {
    check_dim(dim)?;
    Ok(DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex::from_polar(1.0, -PI * ((i * i) % 4) as f64 / 2.0)
        } else {
            c(0.0)
        }
    }))
}

/// Kraus operators `E_k = Σ_n √C(n,k) η^{(n−k)/2} (1−η)^{k/2} |n−k⟩⟨n|`.
pub fn loss_kraus(eta: f64, dim: usize) -> Result<Vec<DMatrix<f64>>> {
    check_dim(dim)?;
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid("eta", format!("need 0 <= eta <= 1, got {eta}")));
    }
    let ln_choose = |n: usize, k: usize| ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k);
    Ok((0..dim)
        .map(|k| {
            DMatrix::from_fn(dim, dim, |row, col| {
                if col < k || row != col - k {
                    return 0.0;
                }
                let n = col;
                let amp_sq = |p: f64, e: usize| if e == 0 { 1.0 } else { p.powi(e as i32) };
                (ln_choose(n, k).exp() * amp_sq(eta, n - k) * amp_sq(1.0 - eta, k)).sqrt()
            })
        })
        .collect())
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

/// Loss channel on a single-mode density matrix.
pub fn fock_loss(rho: &DMatrix<Complex>, eta: f64) -> Result<DMatrix<Complex>> {
    let dim = rho.nrows();
    let mut out = DMatrix::from_element(dim, dim, c(0.0));
    for e in loss_kraus(eta, dim)? {
        let e = e.map(c);
        out += &e * rho * e.adjoint();
    }
    Ok(out)
}

/// Heisenberg-picture loss `Σ_k E_k† O E_k`.
pub fn heisenberg_loss(obs: &DMatrix<Complex>, eta: f64) -> Result<DMatrix<Complex>> {
    let dim = obs.nrows();
    let mut out = DMatrix::from_element(dim, dim, c(0.0));
    for e in loss_kraus(eta, dim)? {
        let e = e.map(c);
        out += e.adjoint() * obs * &e;
    }
    Ok(out)
}

/// Hermite functions `ψ_0..ψ_{dim−1}` at `x` (x̂ = (a + a†)/√2 convention).
fn hermite_functions(x: f64, dim: usize, out: &mut [f64]) {
    out[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if dim > 1 {
        out[1] = 2f64.sqrt() * x * out[0];
    }
    for n in 1..dim.saturating_sub(1) {
        out[n + 1] = (2.0 / (n + 1) as f64).sqrt() * x * out[n] - (n as f64 / (n + 1) as f64).sqrt() * out[n - 1];
    }
}

/// 20-point Gauss-Legendre rule on `[−1, 1]` by Newton iteration.
fn gauss_legendre_20() -> Vec<(f64, f64)> {
    const N: usize = 20;
    (0..N)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=N {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn half_line_products(dim: usize, panels: usize, upper: f64) -> DMatrix<f64> {
    let rule = gauss_legendre_20();
    let h = upper / panels as f64;
    let mut acc = DMatrix::zeros(dim, dim);
    let mut psi = vec![0.0; dim];
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for &(x, w) in &rule {
            hermite_functions(mid + 0.5 * h * x, dim, &mut psi);
            let w = 0.5 * h * w;
            for m in 0..dim {
                for n in 0..dim {
                    acc[(m, n)] += w * psi[m] * psi[n];
                }
            }
        }
    }
    acc
}

/// `S_mn = ∫ sign(x) ψ_m ψ_n dx`, by composite Gauss-Legendre quadrature on
/// the half line with panel doubling until the matrix changes by < 1e-12.
/// Entries with `m ≡ n (mod 2)` are exactly zero.
pub fn fock_sign(dim: usize) -> Result<DMatrix<Complex>> {
    check_dim(dim)?;
    let upper = (2.0 * dim as f64 + 1.0).sqrt() + 12.0;
    let mut panels = 16;
    let mut prev = half_line_products(dim, panels, upper);
    loop {
        panels *= 2;
        let next = half_line_products(dim, panels, upper);
        let delta = (&next - &prev).amax();
        prev = next;
        if delta < 1e-12 || panels >= 4096 {
            break;
        }
    }
    Ok(DMatrix::from_fn(dim, dim, |m, n| {
        if (m + n) % 2 == 0 {
            c(0.0)
        } else {
            c(2.0 * prev[(m, n)])
        }
    }))
}

/// A two-mode pure state, `ψ[m, n]` the amplitude of `|m⟩_A |n⟩_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockKet {
    pub psi: DMatrix<Complex>,
}

impl FockKet {
    pub fn dim(&self) -> usize {
        self.psi.nrows()
    }

    pub fn product(a: &DVector<Complex>, b: &DVector<Complex>) -> Self {
        Self { psi: a * b.transpose() }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.psi.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn add(&self, other: &FockKet, weight: Complex) -> FockKet {
        FockKet {
            psi: &self.psi + &other.psi * weight,
        }
    }

    /// Applies a single-mode operator to one mode.
    pub fn apply(&self, u: &DMatrix<Complex>, mode: Mode) -> FockKet {
        let psi = match mode {
            Mode::A => u * &self.psi,
            Mode::B => &self.psi * u.transpose(),
        };
        FockKet { psi }
    }

    /// Population of the top five levels of either mode, relative to the norm.
    pub fn tail(&self) -> f64 {
        let dim = self.dim();
        let lo = dim.saturating_sub(5);
        let mut t = 0.0;
        for m in 0..dim {
            for n in 0..dim {
                if m >= lo || n >= lo {
                    t += self.psi[(m, n)].norm_sqr();
                }
            }
        }
        t / self.norm_sqr()
    }

    pub fn check_tail(&self) -> Result<()> {
        let t = self.tail();
        if t > TAIL_TOL {
            return Err(Error::Truncation(format!("tail population {t:.3e} in the top 5 levels")));
        }
        Ok(())
    }

    /// Beam splitter `(γ_A, γ_B) → (tγ_A + rγ_B, −rγ_A + tγ_B)`, i.e.
    /// `exp(θ(a†b − ab†))` with `cos θ = t`, applied in each fixed-total-
    /// photon-number block. Blocks with `N ≥ dim` are incomplete and must
    /// carry no population.
    pub fn beamsplit(&self, t: f64) -> Result<FockKet> {
        self.check_tail()?;
        let dim = self.dim();
        let theta = t.clamp(-1.0, 1.0).acos();
        let mut out = DMatrix::from_element(dim, dim, c(0.0));
        let mut dropped = 0.0;
        for total in 0..(2 * dim - 1) {
            if total >= dim {
                for k in (total + 1 - dim)..dim {
                    dropped += self.psi[(k, total - k)].norm_sqr();
                }
                continue;
            }
            let size = total + 1;
            // K|k, N−k⟩ with K = a†b − ab†
            let gen = DMatrix::from_fn(size, size, |i, j| {
                let k = j as f64;
                let n = total as f64;
                if i == j + 1 {
                    ((k + 1.0) * (n - k)).sqrt()
                } else if j == i + 1 {
                    -((i as f64 + 1.0) * (n - i as f64)).sqrt()
                } else {
                    0.0
                }
            }) * theta;
            let u = gen.exp();
            let v = DVector::from_fn(size, |k, _| self.psi[(k, total - k)]);
            let w = u.map(c) * v;
            for k in 0..size {
                out[(k, total - k)] = w[k];
            }
        }
        if dropped > TAIL_TOL * self.norm_sqr() {
            return Err(Error::Truncation(format!("beam splitter drops population {dropped:.3e}")));
        }
        Ok(FockKet { psi: out })
    }

    /// `⟨ψ| O_A ⊗ O_B |ψ⟩ / ⟨ψ|ψ⟩`.
    pub fn expectation(&self, oa: &DMatrix<Complex>, ob: &DMatrix<Complex>) -> Complex {
        let m = oa * &self.psi * ob.transpose();
        let num: Complex = self.psi.iter().zip(m.iter()).map(|(p, q)| p.conj() * q).sum();
        num / self.norm_sqr()
    }

    /// `⟨ψ|ρ|ψ⟩` for an engine operator, with coherent kets expanded in
    /// this truncation.
    pub fn sandwich(&self, op: &CoherentOperator) -> Result<Complex> {
        let dim = self.dim();
        let mut total = c(0.0);
        for d in &op.dyads {
            let ket = FockKet::product(&fock_coherent(d.ket_a, dim)?, &fock_coherent(d.ket_b, dim)?);
            let bra = FockKet::product(&fock_coherent(d.bra_a, dim)?, &fock_coherent(d.bra_b, dim)?);
            total += d.coeff * inner(&self.psi, &ket.psi) * inner(&bra.psi, &self.psi);
        }
        Ok(total)
    }
}

/// `⟨x|y⟩` of two amplitude matrices.
fn inner(x: &DMatrix<Complex>, y: &DMatrix<Complex>) -> Complex {
    x.iter().zip(y.iter()).map(|(p, q)| p.conj() * q).sum()
}

/// One step of an oracle scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FockStep {
    Displace(Mode, Complex),
    Kerr(Mode),
    Beamsplit(f64),
    Bell(Mode, f64),
    Leggett(Mode, LeggettSetting),
}

/// A pure branch of either ETS family followed by operations and lossy
/// sign detection on both modes.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleScenario {
    pub family: Family,
    pub alpha: Complex,
    /// Mode-B label of the qubit-ETS branch (unused by the alt family).
    pub beta: Complex,
    /// Scale `d` of the setting displacements and of the alt-ETS phase fix.
    pub d: f64,
    pub steps: Vec<FockStep>,
    pub eta: f64,
    pub dim: usize,
}

impl OracleScenario {
    /// The same scenario in the coherent engine.
    pub fn engine_state(&self) -> CoherentOperator {
        use crate::engine::{beamsplit, displace, kerr};
        let mut op = crate::ensemble::branch(self.family, self.alpha, self.beta, self.d);
        let local = |op: &CoherentOperator, mode: Mode, ops: &[LocalOp]| {
            ops.iter().fold(op.clone(), |acc, s| match *s {
                LocalOp::Displace(z) => displace(&acc, mode, z),
                LocalOp::Kerr => kerr(&acc, mode),
            })
        };
        for step in &self.steps {
            op = match *step {
                FockStep::Displace(m, z) => displace(&op, m, z),
                FockStep::Kerr(m) => kerr(&op, m),
                FockStep::Beamsplit(t) => beamsplit(&op, t),
                FockStep::Bell(m, theta) => local(&op, m, &bell_sequence(theta, self.d)),
                FockStep::Leggett(m, s) => local(&op, m, &leggett_sequence(s, self.d)),
            };
        }
        op
    }

    /// A truncation that satisfies the coherent-amplitude guard for every
    /// label the engine visits, plus margin.
    pub fn auto_dim(&self) -> usize {
        let max_label = self.engine_state().max_label().max(self.alpha.norm()).max(self.beta.norm());
        (min_dim(max_label) + 12).min(MAX_DIM)
    }

    /// The branch ket built in Fock space: `(|α,β⟩ + |−α,−β⟩)/√2`, or
    /// `D_A(iπ/8d) BS(1/√2) U_NL,A |α, 0⟩`.
    pub fn initial_ket(&self) -> Result<FockKet> {
        let dim = self.dim;
        match self.family {
            Family::Qubit => {
                let plus = FockKet::product(&fock_coherent(self.alpha, dim)?, &fock_coherent(self.beta, dim)?);
                let minus = FockKet::product(&fock_coherent(-self.alpha, dim)?, &fock_coherent(-self.beta, dim)?);
                let s = std::f64::consts::FRAC_1_SQRT_2;
                Ok(FockKet { psi: plus.psi * c(s) }.add(&minus, c(s)))
            }
            Family::Alt => {
                let vac = fock_coherent(c(0.0), dim)?;
                let k = FockKet::product(&fock_coherent(self.alpha, dim)?, &vac).apply(&fock_kerr(dim)?, Mode::A);
                let k = k.beamsplit(std::f64::consts::FRAC_1_SQRT_2)?;
                Ok(k.apply(&fock_displace(Complex::new(0.0, PI / (8.0 * self.d)), dim)?, Mode::A))
            }
        }
    }

    fn local(&self, ket: &FockKet, mode: Mode, ops: &[LocalOp]) -> Result<FockKet> {
        let dim = self.dim;
        let mut k = ket.clone();
        for op in ops {
            let u = match *op {
                LocalOp::Displace(z) => fock_displace(z, dim)?,
                LocalOp::Kerr => fock_kerr(dim)?,
            };
            k = k.apply(&u, mode);
        }
        Ok(k)
    }

    /// The final (pre-detection) ket.
    pub fn final_ket(&self) -> Result<FockKet> {
        let dim = self.dim;
        let mut k = self.initial_ket()?;
        for step in &self.steps {
            k = match *step {
                FockStep::Displace(m, z) => k.apply(&fock_displace(z, dim)?, m),
                FockStep::Kerr(m) => k.apply(&fock_kerr(dim)?, m),
                FockStep::Beamsplit(t) => k.beamsplit(t)?,
                FockStep::Bell(m, theta) => self.local(&k, m, &bell_sequence(theta, self.d))?,
                FockStep::Leggett(m, s) => self.local(&k, m, &leggett_sequence(s, self.d))?,
            };
        }
        k.check_tail()?;
        Ok(k)
    }
}

/// Lossy detector observables `(1, L_η†(S))` in a truncation.
pub struct Detector {
    pub identity: DMatrix<Complex>,
    pub sign: DMatrix<Complex>,
}

impl Detector {
    pub fn new(eta: f64, dim: usize) -> Result<Self> {
        Ok(Self {
            identity: DMatrix::identity(dim, dim),
            sign: heisenberg_loss(&fock_sign(dim)?, eta)?,
        })
    }
}

/// `Tr[ρ_η S⊗S]` for the scenario.
pub fn oracle_correlation(s: &OracleScenario) -> Result<f64> {
    let k = s.final_ket()?;
    let det = Detector::new(s.eta, s.dim)?;
    Ok(k.expectation(&det.sign, &det.sign).re)
}

/// `[P_{++}, P_{+−}, P_{−+}, P_{−−}]`.
pub fn oracle_joint_probs(s: &OracleScenario) -> Result<[f64; 4]> {
    let k = s.final_ket()?;
    let det = Detector::new(s.eta, s.dim)?;
    let proj = |sgn: f64| (&det.identity + &det.sign * c(sgn)) * c(0.5);
    let (p, m) = (proj(1.0), proj(-1.0));
    Ok([
        k.expectation(&p, &p).re,
        k.expectation(&p, &m).re,
        k.expectation(&m, &p).re,
        k.expectation(&m, &m).re,
    ])
}

/// Single-mode Fock matrix of `Σ c |γ⟩⟨γ'|`.
pub fn single_mode_matrix(terms: &[(Complex, Complex, Complex)], dim: usize) -> Result<DMatrix<Complex>> {
    let mut out = DMatrix::from_element(dim, dim, c(0.0));
    for &(coeff, ket, bra) in terms {
        out += fock_coherent(ket, dim)? * fock_coherent(bra, dim)?.adjoint() * coeff;
    }
    Ok(out)
}

/// Kerr amplitudes implied by the oracle's diagonal, for cross-checks:
/// `U_NL|γ⟩ = KEEP|γ⟩ + FLIP|−γ⟩`.
pub fn kerr_amplitudes() -> (Complex, Complex) {
    (KERR_KEEP, KERR_FLIP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{correlation, joint_probs, loss, sign_element};
    use proptest::prelude::*;

    fn z(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn coherent_vectors() {
        let v = fock_coherent(z(0.0, 0.0), 12).unwrap();
        assert_eq!(v[0], c(1.0));
        let v = fock_coherent(z(1.5, 0.0), 40).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-10);
        let mean: f64 = v.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum();
        assert!((mean - 2.25).abs() < 1e-8);
        let w = fock_coherent(z(-1.0, 0.0), 30).unwrap();
        let u = fock_coherent(z(1.0, 0.0), 30).unwrap();
        assert!((u.dotc(&w).re - (-2f64).exp()).abs() < 1e-9);
        assert!(matches!(fock_coherent(z(3.0, 0.0), 20), Err(Error::Truncation(_))));
    }

    #[test]
    fn displacement_matches_coherent_state() {
        let dim = 40;
        let d = fock_displace(z(0.0, 0.0), dim).unwrap();
        assert!((d - DMatrix::<Complex>::identity(dim, dim)).camax() < 1e-12);
        let g = z(0.7, -1.1);
        let v = fock_displace(g, dim).unwrap() * fock_coherent(z(0.0, 0.0), dim).unwrap();
        assert!((v - fock_coherent(g, dim).unwrap()).camax() < 1e-12);
    }

    #[test]
    fn kerr_pins_the_phase_convention() {
        let dim = 30;
        let out = fock_kerr(dim).unwrap() * fock_coherent(c(1.0), dim).unwrap();
        let e = Complex::from_polar(std::f64::consts::FRAC_1_SQRT_2, -PI / 4.0);
        let want = (fock_coherent(c(1.0), dim).unwrap() + fock_coherent(c(-1.0), dim).unwrap() * z(0.0, 1.0)) * e;
        assert!((out - want).camax() < 1e-9);
        let (keep, flip) = kerr_amplitudes();
        assert!((keep - e).norm() < 1e-15 && (flip - e * z(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn sign_matrix() {
        let s = fock_sign(40).unwrap();
        assert_eq!(s[(0, 0)], c(0.0));
        assert!((s[(0, 1)].re - (2.0 / PI).sqrt()).abs() < 1e-9);
        // closed form: ∫₀^∞ ψ_m ψ_n = (ψ_m(0)ψ_n'(0) − ψ_m'(0)ψ_n(0)) / (2(n − m))
        let mut p0 = vec![0.0; 40];
        let mut p1 = vec![0.0; 40];
        let h = 1e-5;
        hermite_functions(h, 40, &mut p1);
        hermite_functions(-h, 40, &mut p0);
        let mut v = vec![0.0; 40];
        hermite_functions(0.0, 40, &mut v);
        for (m, n) in [(0usize, 3usize), (2, 7), (10, 13), (20, 31)] {
            let dm = (p1[m] - p0[m]) / (2.0 * h);
            let dn = (p1[n] - p0[n]) / (2.0 * h);
            let want = 2.0 * (v[m] * dn - dm * v[n]) / (2.0 * (n as f64 - m as f64));
            assert!((s[(m, n)].re - want).abs() < 1e-7, "{m},{n}: {} vs {want}", s[(m, n)].re);
        }
        let eig = nalgebra::SymmetricEigen::new(s.clone()).eigenvalues;
        assert!(eig.iter().all(|e| e.abs() <= 1.0 + 1e-8));
        for m in 0..40 {
            for n in 0..40 {
                if (m + n) % 2 == 0 {
                    assert_eq!(s[(m, n)], c(0.0));
                }
                assert!((s[(m, n)] - s[(n, m)].conj()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn sign_elements_match_engine() {
        let dim = 40;
        let s = fock_sign(dim).unwrap();
        for (bra, ket) in [(z(0.5, 0.5), z(-0.5, -0.5)), (z(1.0, 0.0), z(1.0, 0.0)), (z(0.3, -1.2), z(-0.8, 0.4))] {
            let f = fock_coherent(bra, dim).unwrap().dotc(&(&s * fock_coherent(ket, dim).unwrap()));
            assert!((f - sign_element(bra, ket)).norm() < 1e-9, "{f} vs {}", sign_element(bra, ket));
        }
    }

    #[test]
    fn loss_channel() {
        let dim = 30;
        let terms = [(c(1.0), c(1.0), c(-1.0)), (z(0.2, 0.1), z(0.3, 0.5), z(0.3, 0.5))];
        let rho = single_mode_matrix(&terms, dim).unwrap();
        assert!((fock_loss(&rho, 1.0).unwrap() - &rho).camax() < 1e-12);
        // trace preservation and composition
        let once = fock_loss(&rho, 0.5).unwrap();
        assert!((once.trace() - rho.trace()).norm() < 1e-10);
        let twice = fock_loss(&fock_loss(&rho, 0.8).unwrap(), 0.6).unwrap();
        let direct = fock_loss(&rho, 0.48).unwrap();
        assert!((twice - direct).camax() < 1e-10);
        // engine closed form on the off-diagonal |γ⟩⟨−γ|
        let op = CoherentOperator::new(vec![crate::engine::Dyad::new(c(1.0), (c(1.0), c(0.0)), (c(-1.0), c(0.0)))]);
        let lossy = loss(&op, Mode::A, 0.5);
        let terms: Vec<_> = lossy.dyads.iter().map(|d| (d.coeff, d.ket_a, d.bra_a)).collect();
        let engine = single_mode_matrix(&terms, dim).unwrap();
        let oracle = fock_loss(&single_mode_matrix(&[(c(1.0), c(1.0), c(-1.0))], dim).unwrap(), 0.5).unwrap();
        assert!((engine - oracle).camax() < 1e-10);
    }

    #[test]
    fn beam_splitter_maps_coherent_labels() {
        let dim = 40;
        let (ga, gb) = (z(1.0, 0.4), z(-0.5, 0.2));
        let t: f64 = 0.6;
        let r = (1.0 - t * t).sqrt();
        let k = FockKet::product(&fock_coherent(ga, dim).unwrap(), &fock_coherent(gb, dim).unwrap());
        let out = k.beamsplit(t).unwrap();
        let want = FockKet::product(
            &fock_coherent(ga * t + gb * r, dim).unwrap(),
            &fock_coherent(-ga * r + gb * t, dim).unwrap(),
        );
        assert!((out.psi - want.psi).camax() < 1e-10);
    }

    #[test]
    fn vacuum_has_zero_correlation() {
        let s = OracleScenario {
            family: Family::Qubit,
            alpha: c(0.0),
            beta: c(0.0),
            d: 1.0,
            steps: vec![],
            eta: 1.0,
            dim: 20,
        };
        assert!(oracle_correlation(&s).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ets_branch_trace_and_correlation() {
        let s = OracleScenario {
            family: Family::Qubit,
            alpha: c(1.0),
            beta: c(1.0),
            d: 1.0,
            steps: vec![FockStep::Bell(Mode::A, 0.3), FockStep::Bell(Mode::B, -0.3)],
            eta: 0.7,
            dim: 40,
        };
        let k = s.initial_ket().unwrap();
        assert!((k.norm_sqr() - (1.0 + (-4f64).exp())).abs() < 1e-10);
        let e = s.engine_state();
        assert!((oracle_correlation(&s).unwrap() - correlation(&e, 0.7).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn alt_branch_matches_engine() {
        let s = OracleScenario {
            family: Family::Alt,
            alpha: z(1.2, 0.2),
            beta: c(0.0),
            d: 1.2,
            steps: vec![FockStep::Bell(Mode::A, 0.5), FockStep::Bell(Mode::B, 0.9)],
            eta: 0.5,
            dim: 0,
        };
        let s = OracleScenario { dim: s.auto_dim(), ..s };
        let e = s.engine_state();
        let k = s.final_ket().unwrap();
        // the engine operator is |ψ⟩⟨ψ| for the oracle's ψ
        let n = k.norm_sqr();
        assert!((e.trace().re - n).abs() < 1e-9);
        assert!((k.sandwich(&e).unwrap().re - n * n).abs() < 1e-9);
        let p = oracle_joint_probs(&s).unwrap();
        let q = joint_probs(&e, 0.5).unwrap();
        for (x, y) in p.iter().zip([q.pp, q.pm, q.mp, q.mm]) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn truncation_is_converged() {
        let base = OracleScenario {
            family: Family::Qubit,
            alpha: z(0.9, 0.1),
            beta: z(0.8, 0.0),
            d: 1.0,
            steps: vec![FockStep::Leggett(Mode::A, LeggettSetting::new(1.0, 0.3))],
            eta: 0.9,
            dim: 0,
        };
        let d0 = base.auto_dim();
        let a = oracle_correlation(&OracleScenario { dim: d0, ..base.clone() }).unwrap();
        let b = oracle_correlation(&OracleScenario { dim: 2 * d0, ..base }).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn heisenberg_loss_is_dual_to_kraus(eta in 0.05f64..1.0, g in -1.2f64..1.2, h in -1.2f64..1.2) {
            let dim = 30;
            let rho = single_mode_matrix(&[(c(1.0), z(g, h), z(h, -g))], dim).unwrap();
            let s = fock_sign(dim).unwrap();
            let schr = (fock_loss(&rho, eta).unwrap() * &s).trace();
            let heis = (&rho * heisenberg_loss(&s, eta).unwrap()).trace();
            prop_assert!((schr - heis).norm() < 1e-10);
        }
    }
}
