//! The CHSH function, the Leggett function and their optimization over
//! measurement settings, on any backend.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use serde::{Deserialize, Serialize};

use crate::analytic::{bell_b, kernel_correlation, mode_kernel, ChshAngles, EtsParams, ModeKernel};
use crate::engine::pure::rotation;
use crate::engine::{bell_sequence, leggett_sequence, LeggettSetting, LocalOp};
use crate::ensemble::{alt_correlations, pfunc_grid, quadrature_kernel, Family, CONVERGENCE_TOL};
use crate::error::{invalid, Result};
use crate::numerics::{minimize_from, Complex, OptimizerConfig};

/// How correlations are computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Closed form (qubit-ETS family only).
    Analytic,
    /// Gauss-Hermite average of the coherent engine at a fixed order.
    Ensemble { family: Family, order: usize },
}

impl Backend {
    pub fn family(&self) -> Family {
        match *self {
            Backend::Analytic => Family::Qubit,
            Backend::Ensemble { family, .. } => family,
        }
    }

    fn doubled(&self) -> Option<Backend> {
        match *self {
            Backend::Analytic => None,
            Backend::Ensemble { family, order } => Some(Backend::Ensemble {
                family,
                order: (2 * order).min(crate::numerics::MAX_ORDER),
            }),
        }
    }
}

/// Evaluates correlations for many local sequences sharing one backend,
/// reusing single-mode kernels where the state allows it.
struct Correlator<'a> {
    params: &'a EtsParams,
    backend: Backend,
    gate: LeggettGate,
}

impl Correlator<'_> {
    fn kernel(&self, ops: &[LocalOp]) -> Result<ModeKernel> {
        match self.backend {
            Backend::Analytic => Ok(mode_kernel(ops, self.params)),
            Backend::Ensemble { order, .. } => {
                let grid = pfunc_grid(self.params.v, self.params.d, order)?;
                Ok(quadrature_kernel(ops, self.params, &grid))
            }
        }
    }

    fn setting_kernel(&self, s: &SettingKind) -> Result<ModeKernel> {
        match (*s, self.gate) {
            (SettingKind::Leggett(l), LeggettGate::IdealRotation) => Ok(ideal_kernel(&self.kernel(&[])?, l)),
            _ => self.kernel(&s.ops(self.params.d)),
        }
    }

    /// Correlations `C(a_i, b_i)` for the given index pairs into the
    /// Alice/Bob setting lists.
    fn correlations(
        &self,
        alice: &[SettingKind],
        bob: &[SettingKind],
        pairs: &[(usize, usize)],
    ) -> Result<Vec<f64>> {
        if self.backend.family() == Family::Qubit {
            let ka: Vec<ModeKernel> = alice.iter().map(|s| self.setting_kernel(s)).collect::<Result<_>>()?;
            let kb: Vec<ModeKernel> = bob.iter().map(|s| self.setting_kernel(s)).collect::<Result<_>>()?;
            return pairs.iter().map(|&(i, j)| kernel_correlation(&ka[i], &kb[j])).collect();
        }
        let order = match self.backend {
            Backend::Ensemble { order, .. } => order,
            Backend::Analytic => unreachable!("analytic backend is qubit-only"),
        };
        if self.gate == LeggettGate::IdealRotation && alice.iter().any(|s| matches!(s, SettingKind::Leggett(_))) {
            return Err(invalid("gate", "the ideal-rotation gate is defined for the qubit-ETS family only"));
        }
        let d = self.params.d;
        let seqs = |list: &[SettingKind]| list.iter().map(|s| s.ops(d)).collect::<Vec<_>>();
        alt_correlations(&seqs(alice), &seqs(bob), pairs, self.params, order)
    }
}

/// Kernel of the exact rotation `R̂(θ, −φ)` (the operator the printed
/// sequence approximates) applied branch-wise to `(|α⟩, |−α⟩)`:
/// `|σ_j α⟩ → Σ_i R_ij |σ_i α⟩`.
fn ideal_kernel(identity: &ModeKernel, s: LeggettSetting) -> ModeKernel {
    let r = rotation(s.theta, -s.phi);
    let zero = Complex::new(0.0, 0.0);
    let mut out = ModeKernel {
        sign: [[zero; 2]; 2],
        gram: [[zero; 2]; 2],
    };
    for i in 0..2 {
        for j in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let w = r[(b, j)].conj() * r[(a, i)];
                    out.sign[i][j] += w * identity.sign[a][b];
                    out.gram[i][j] += w * identity.gram[a][b];
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SettingKind {
    Bell(f64),
    Leggett(LeggettSetting),
}

impl SettingKind {
    fn ops(&self, d: f64) -> Vec<LocalOp> {
        match *self {
            SettingKind::Bell(t) => bell_sequence(t, d),
            SettingKind::Leggett(s) => leggett_sequence(s, d),
        }
    }
}

/// `B(θ_A, θ_B, θ'_A, θ'_B)` on any backend.
pub fn bell_value(angles: &ChshAngles, params: &EtsParams, backend: Backend) -> Result<f64> {
    params.validate()?;
    if backend == Backend::Analytic {
        return bell_b(angles, params);
    }
    let c = Correlator {
        params,
        backend,
        gate: LeggettGate::Sequence,
    };
    let alice = [SettingKind::Bell(angles.theta_a), SettingKind::Bell(angles.theta_a2)];
    let bob = [SettingKind::Bell(angles.theta_b), SettingKind::Bell(angles.theta_b2)];
    let v = c.correlations(&alice, &bob, &[(0, 0), (1, 0), (0, 1), (1, 1)])?;
    Ok(v[0] + v[1] + v[2] - v[3])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshMax {
    pub b_max: f64,
    pub angles: ChshAngles,
    /// Optimizer converged and, on the ensemble backend, doubling the
    /// quadrature order moved `B` by at most the ensemble tolerance.
    pub converged: bool,
    pub evaluations: usize,
}

/// Default search box `[−π, π]` per (scaled) angle.
pub fn chsh_optimizer(seed: u64) -> OptimizerConfig {
    OptimizerConfig::new(vec![(-PI, PI); 4]).with_seed(seed)
}

/// Ideal-qubit CHSH angles (the gate acts as a rotation by `2θ`) and a few
/// sign/scale variants; prepended to the random restarts.
fn structured_chsh_starts() -> Vec<Vec<f64>> {
    let base = [0.0, FRAC_PI_8, FRAC_PI_4, -FRAC_PI_8];
    let mut starts = Vec::new();
    for scale in [1.0, 0.6, 1.5] {
        for sign in [1.0, -1.0] {
            starts.push(base.iter().map(|x| x * scale * sign).collect());
        }
    }
    starts
}

/// Maximizes `|B|` over the four angles. `opt.bounds` apply to the scaled
/// angles `θ/min(1, d)`.
pub fn chsh_max(params: &EtsParams, backend: Backend, opt: &OptimizerConfig) -> Result<ChshMax> {
    params.validate()?;
    if opt.bounds.len() != 4 {
        return Err(invalid("bounds", "CHSH optimization needs 4 angle bounds"));
    }
    // The gate displaces by θ/2d, so below d = 1 the landscape lives on the
    // angle scale d; the search runs over x = θ/min(1, d) to keep the
    // simplex and the structured starts on that scale.
    let scale = params.d.min(1.0);
    let to_angles = |x: &[f64]| ChshAngles::from_slice(&x.iter().map(|v| v * scale).collect::<Vec<_>>());
    let objective = |x: &[f64]| match bell_value(&to_angles(x), params, backend) {
        Ok(b) => -b.abs(),
        Err(_) => f64::INFINITY,
    };
    let m = minimize_from(objective, &structured_chsh_starts(), opt)?;
    let angles = to_angles(&m.argmin);
    let b_max = bell_value(&angles, params, backend)?.abs();
    let mut converged = m.converged;
    if let Some(doubled) = backend.doubled() {
        let check = bell_value(&angles, params, doubled)?.abs();
        converged &= (check - b_max).abs() <= CONVERGENCE_TOL;
    }
    Ok(ChshMax {
        b_max,
        angles,
        converged,
        evaluations: m.evaluations,
    })
}

/// The three Alice and seven Bob directions of the Leggett test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeggettSuite {
    pub phi: f64,
    pub a: [LeggettSetting; 3],
    pub b: [LeggettSetting; 7],
}

pub fn leggett_suite(phi: f64) -> LeggettSuite {
    let s = LeggettSetting::new;
    let a1 = s(FRAC_PI_2, 0.0);
    let a2 = s(FRAC_PI_2, FRAC_PI_2);
    let a3 = s(0.0, 0.0);
    let b1 = s(FRAC_PI_2, phi);
    let b4 = s(phi, FRAC_PI_2);
    // b2, b3 from b1, b4 by φ → π/2 + φ
    let b2 = s(FRAC_PI_2, FRAC_PI_2 + phi);
    let b3 = s(FRAC_PI_2 + phi, FRAC_PI_2);
    LeggettSuite {
        phi,
        a: [a1, a2, a3],
        b: [b1, b2, b3, b4, a1, a2, a3],
    }
}

impl LeggettSuite {
    /// Every direction with its azimuth negated.
    pub fn azimuth_flipped(&self) -> Self {
        let f = |s: &LeggettSetting| LeggettSetting::new(s.theta, -s.phi);
        Self {
            phi: self.phi,
            a: self.a.map(|s| f(&s)),
            b: self.b.map(|s| f(&s)),
        }
    }

    /// The seven distinct directions (`a_i = b_{4+i}` deduplicated).
    pub fn unique(&self) -> Vec<LeggettSetting> {
        let mut out: Vec<LeggettSetting> = Vec::new();
        for s in self.a.iter().chain(&self.b) {
            if !out.contains(s) {
                out.push(*s);
            }
        }
        out
    }
}

/// How a Leggett setting is realized on each mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeggettGate {
    /// The printed three-displacement, two-Kerr sequence (default).
    Sequence,
    /// The exact 2×2 rotation the sequence approximates, applied to the
    /// `(|α⟩, |−α⟩)` pair of every thermal branch (qubit-ETS only).
    IdealRotation,
}

/// Conventions of the Leggett function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeggettOptions {
    /// `c` in `𝓛 = L − 8 + c|sin(φ/2)|`. The paper prints `c = 1` but
    /// quotes the bound `8 − 2|sin(φ/2)|` and the anchor 0.125 at
    /// `φ ≈ 0.25`, which only `c = 2` reproduces; default 2.
    pub sine_coefficient: f64,
    /// Feed Bob's gate the azimuth `−φ`. The printed three-displacement
    /// sequence realizes `R̂(θ, −φ)` on `(|α⟩, |−α⟩)`, and with the ETS
    /// being `Φ+` in that basis the two parties' azimuths must enter with
    /// opposite signs for `C^L(a, b) → a·b`; without this `L` cannot
    /// exceed the local bound. Default on.
    pub mirror_bob_azimuth: bool,
    pub gate: LeggettGate,
}

impl Default for LeggettOptions {
    fn default() -> Self {
        Self {
            sine_coefficient: 2.0,
            mirror_bob_azimuth: true,
            gate: LeggettGate::Sequence,
        }
    }
}

/// `(C(a1,b1), C(a2,b2), C(a1,b5), C(a2,b6), C(a2,b3), C(a3,b4), C(a3,b7))`.
pub fn leggett_correlations(
    params: &EtsParams,
    phi: f64,
    backend: Backend,
    opts: &LeggettOptions,
) -> Result<[f64; 7]> {
    suite_correlations(params, &leggett_suite(phi), backend, opts)
}

/// [`leggett_correlations`] for an explicit (possibly modified) suite.
pub fn suite_correlations(
    params: &EtsParams,
    suite: &LeggettSuite,
    backend: Backend,
    opts: &LeggettOptions,
) -> Result<[f64; 7]> {
    params.validate()?;
    let alice: Vec<SettingKind> = suite.a.iter().map(|&s| SettingKind::Leggett(s)).collect();
    let bob: Vec<SettingKind> = suite
        .b
        .iter()
        .map(|&s| {
            SettingKind::Leggett(if opts.mirror_bob_azimuth {
                LeggettSetting::new(s.theta, -s.phi)
            } else {
                s
            })
        })
        .collect();
    let c = Correlator {
        params,
        backend,
        gate: opts.gate,
    };
    let v = c.correlations(
        &alice,
        &bob,
        &[(0, 0), (1, 1), (0, 4), (1, 5), (1, 2), (2, 3), (2, 6)],
    )?;
    Ok([v[0], v[1], v[2], v[3], v[4], v[5], v[6]])
}

/// `L = |C(a1,b1)+C(a2,b2)+C(a1,b5)+C(a2,b6)| + |C(a2,b3)+C(a3,b4)+C(a2,b6)+C(a3,b7)|`,
/// with `C(a2,b6)` in both groups exactly as printed.
pub fn leggett_l(params: &EtsParams, phi: f64, backend: Backend, opts: &LeggettOptions) -> Result<f64> {
    suite_l(params, &leggett_suite(phi), backend, opts)
}

pub fn suite_l(params: &EtsParams, suite: &LeggettSuite, backend: Backend, opts: &LeggettOptions) -> Result<f64> {
    let c = suite_correlations(params, suite, backend, opts)?;
    Ok((c[0] + c[1] + c[2] + c[3]).abs() + (c[4] + c[5] + c[3] + c[6]).abs())
}

/// `𝓛 = L − 8 + c|sin(φ/2)|`; `𝓛 ≤ 0` under the non-local realistic models.
pub fn leggett_script(params: &EtsParams, phi: f64, backend: Backend, opts: &LeggettOptions) -> Result<f64> {
    Ok(leggett_l(params, phi, backend, opts)? - 8.0 + opts.sine_coefficient * (0.5 * phi).sin().abs())
}

/// Fixed `φ` (the paper's 0.2507) or optimized over `φ ∈ (0, π/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiMode {
    Fixed(f64),
    Optimize,
}

pub const PAPER_PHI: f64 = 0.2507;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeggettMax {
    pub value: f64,
    pub phi: f64,
    pub converged: bool,
}

/// Optimizer for the 1-D `φ` search.
pub fn phi_optimizer(seed: u64) -> OptimizerConfig {
    OptimizerConfig::new(vec![(1e-3, FRAC_PI_2)])
        .with_seed(seed)
        .with_restarts(4)
        .with_tolerance(1e-7)
}

pub fn leggett_script_max(
    params: &EtsParams,
    mode: PhiMode,
    backend: Backend,
    opts: &LeggettOptions,
    opt: &OptimizerConfig,
) -> Result<LeggettMax> {
    match mode {
        PhiMode::Fixed(phi) => Ok(LeggettMax {
            value: leggett_script(params, phi, backend, opts)?,
            phi,
            converged: true,
        }),
        PhiMode::Optimize => {
            let f = |x: &[f64]| leggett_script(params, x[0], backend, opts).map_or(f64::INFINITY, |v| -v);
            let m = minimize_from(f, &[vec![PAPER_PHI]], opt)?;
            Ok(LeggettMax {
                value: -m.value,
                phi: m.argmin[0],
                converged: m.converged,
            })
        }
    }
}

/// `B_max` and the φ-optimized `𝓛` at one `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowPoint {
    pub d: f64,
    pub b_max: f64,
    pub l_max: f64,
    pub phi: f64,
    pub converged: bool,
}

impl WindowPoint {
    /// Bell-CHSH violated while the Leggett inequality holds.
    pub fn coexists(&self) -> bool {
        self.b_max > 2.0 && self.l_max <= 0.0
    }
}

/// Parameters shared by a coexistence scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowScan {
    pub v: f64,
    pub eta: f64,
    pub backend: Backend,
    pub leggett: LeggettOptions,
    pub seed: u64,
    /// CHSH random restarts per point (structured starts are always tried).
    pub restarts: usize,
}

impl WindowScan {
    pub fn new(v: f64, eta: f64) -> Self {
        Self {
            v,
            eta,
            backend: Backend::Analytic,
            leggett: LeggettOptions::default(),
            seed: 0,
            restarts: 4,
        }
    }

    pub fn point(&self, d: f64) -> Result<WindowPoint> {
        let p = EtsParams::new(self.v, d, self.eta)?;
        let b = chsh_max(&p, self.backend, &chsh_optimizer(self.seed).with_restarts(self.restarts))?;
        let l = leggett_script_max(&p, PhiMode::Optimize, self.backend, &self.leggett, &phi_optimizer(self.seed))?;
        Ok(WindowPoint {
            d,
            b_max: b.b_max,
            l_max: l.value,
            phi: l.phi,
            converged: b.converged && l.converged,
        })
    }

    /// Evaluates every `d` in parallel.
    pub fn scan(&self, ds: &[f64]) -> Result<Vec<WindowPoint>> {
        use rayon::prelude::*;
        ds.par_iter().map(|&d| self.point(d)).collect()
    }

    /// Refines the boundary between a coexisting and a non-coexisting `d`
    /// by bisection to `tol`.
    fn refine(&self, inside: f64, outside: f64, tol: f64) -> Result<f64> {
        let (mut a, mut b) = (inside, outside);
        while (b - a).abs() > tol {
            let m = 0.5 * (a + b);
            if self.point(m)?.coexists() {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    }

    /// The widest contiguous run of coexisting grid points, with endpoints
    /// refined to `tol`. An endpoint at the edge of the grid is reported as
    /// the grid edge (`open_lo`/`open_hi` set).
    pub fn window(&self, ds: &[f64], tol: f64) -> Result<Option<CoexistenceWindow>> {
        let pts = self.scan(ds)?;
        let mut best: Option<(usize, usize)> = None;
        let mut i = 0;
        while i < pts.len() {
            if pts[i].coexists() {
                let start = i;
                while i + 1 < pts.len() && pts[i + 1].coexists() {
                    i += 1;
                }
                if best.is_none_or(|(s, e)| i - start > e - s) {
                    best = Some((start, i));
                }
            }
            i += 1;
        }
        let Some((s, e)) = best else {
            return Ok(None);
        };
        let lo = if s == 0 { pts[0].d } else { self.refine(pts[s].d, pts[s - 1].d, tol)? };
        let hi = if e + 1 == pts.len() { pts[e].d } else { self.refine(pts[e].d, pts[e + 1].d, tol)? };
        Ok(Some(CoexistenceWindow {
            lo,
            hi,
            open_lo: s == 0,
            open_hi: e + 1 == pts.len(),
            points: pts,
        }))
    }
}

/// A `d`-interval where `B_max > 2` and `𝓛 ≤ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoexistenceWindow {
    pub lo: f64,
    pub hi: f64,
    pub open_lo: bool,
    pub open_hi: bool,
    pub points: Vec<WindowPoint>,
}

impl CoexistenceWindow {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, other: &CoexistenceWindow) -> bool {
        self.lo < other.lo && self.hi > other.hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn suite_vectors() {
        let s = leggett_suite(0.0);
        assert_eq!(s.b[0], s.a[0]);
        assert_eq!(s.b[1], s.a[1]);
        let s = leggett_suite(PAPER_PHI);
        assert_eq!(s.b[3], LeggettSetting::new(PAPER_PHI, FRAC_PI_2));
        assert_eq!(s.b[2], LeggettSetting::new(FRAC_PI_2 + PAPER_PHI, FRAC_PI_2));
        assert_eq!(s.b[4..], s.a[..]);
        assert_eq!(s.unique().len(), 7);
    }

    #[test]
    fn suite_dot_products_give_ideal_l() {
        // with C = a·b, L = 4 + 4 cos φ
        let phi = 0.4;
        let s = leggett_suite(phi);
        let dot = |x: LeggettSetting, y: LeggettSetting| {
            let (u, v) = (x.vector(), y.vector());
            u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
        };
        let l = (dot(s.a[0], s.b[0]) + dot(s.a[1], s.b[1]) + dot(s.a[0], s.b[4]) + dot(s.a[1], s.b[5])).abs()
            + (dot(s.a[1], s.b[2]) + dot(s.a[2], s.b[3]) + dot(s.a[1], s.b[5]) + dot(s.a[2], s.b[6])).abs();
        assert!((l - (4.0 + 4.0 * phi.cos())).abs() < 1e-12);
    }

    #[test]
    fn large_d_pure_state_reaches_ideal_leggett_values() {
        // the sequence decoheres as O(1/d²), the exact rotation does not
        let p = EtsParams::new(1.0, 48.0, 1.0).unwrap();
        let opts = LeggettOptions::default();
        let l = leggett_l(&p, 0.3, Backend::Analytic, &opts).unwrap();
        assert!((l - (4.0 + 4.0 * 0.3f64.cos())).abs() < 1e-2, "{l}");
        let ideal = LeggettOptions {
            gate: LeggettGate::IdealRotation,
            ..opts
        };
        let p3 = EtsParams::new(1.0, 3.0, 1.0).unwrap();
        let l = leggett_l(&p3, 0.3, Backend::Analytic, &ideal).unwrap();
        assert!((l - (4.0 + 4.0 * 0.3f64.cos())).abs() < 1e-6, "{l}");
        // the unmirrored convention cannot violate
        let plain = LeggettOptions {
            mirror_bob_azimuth: false,
            ..opts
        };
        assert!(leggett_script(&p, 0.3, Backend::Analytic, &plain).unwrap() < 0.0);
    }

    #[test]
    fn leggett_l_is_bounded_and_azimuth_flip_invariant() {
        let opts = LeggettOptions::default();
        for &(v, d, eta) in &[(1.0, 1.0, 1.0), (10.0, 2.5, 0.3), (300.0, 20.0, 0.05)] {
            let p = EtsParams::new(v, d, eta).unwrap();
            let suite = leggett_suite(0.7);
            let a = suite_l(&p, &suite, Backend::Analytic, &opts).unwrap();
            let b = suite_l(&p, &suite.azimuth_flipped(), Backend::Analytic, &opts).unwrap();
            assert!(a <= 8.0 + 1e-6);
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn chsh_max_pure_large_d_and_small_d() {
        let opt = chsh_optimizer(1).with_restarts(4);
        let big = chsh_max(&EtsParams::new(1.0, 5.0, 1.0).unwrap(), Backend::Analytic, &opt).unwrap();
        assert!(big.b_max > 2.8 && big.b_max <= 2.0 * SQRT_2 + 1e-6, "{big:?}");
        let small = chsh_max(&EtsParams::new(1.0, 0.05, 1.0).unwrap(), Backend::Analytic, &opt).unwrap();
        assert!(small.b_max <= 2.0, "{small:?}");
    }

    #[test]
    fn ensemble_and_analytic_chsh_agree() {
        let p = EtsParams::new(4.0, 2.0, 0.5).unwrap();
        let opt = chsh_optimizer(3).with_restarts(2);
        let a = chsh_max(&p, Backend::Analytic, &opt).unwrap();
        let e = bell_value(&a.angles, &p, Backend::Ensemble { family: Family::Qubit, order: 40 }).unwrap();
        assert!((a.b_max - e.abs()).abs() < 2e-3, "{a:?} vs {e}");
    }

    #[test]
    fn ideal_gate_reproduces_paper_anchor() {
        let p = EtsParams::new(1.0, 3.0, 1.0).unwrap();
        let opts = LeggettOptions {
            gate: LeggettGate::IdealRotation,
            ..Default::default()
        };
        let m = leggett_script_max(&p, PhiMode::Optimize, Backend::Analytic, &opts, &phi_optimizer(0)).unwrap();
        assert!((m.value - 0.125).abs() < 1e-3 && (m.phi - PAPER_PHI).abs() < 1e-3, "{m:?}");
        // the ensemble backend supports it too, the alt family does not
        let e = leggett_script(&p, 0.25, Backend::Ensemble { family: Family::Qubit, order: 8 }, &opts).unwrap();
        assert!((e - 0.125).abs() < 1e-3);
        assert!(leggett_script(&p, 0.25, Backend::Ensemble { family: Family::Alt, order: 8 }, &opts).is_err());
    }

    #[test]
    fn coexistence_window_at_v1() {
        let scan = WindowScan {
            leggett: LeggettOptions {
                gate: LeggettGate::IdealRotation,
                ..Default::default()
            },
            ..WindowScan::new(1.0, 1.0)
        };
        let ds: Vec<f64> = (0..12).map(|i| 0.5 + 0.1 * i as f64).collect();
        let w = scan.window(&ds, 1e-3).unwrap().expect("window exists");
        assert!(w.lo < 1.1 && w.hi > 1.1, "{} {}", w.lo, w.hi);
        assert!(!w.open_lo && !w.open_hi);
    }

    #[test]
    fn bad_bounds_are_rejected() {
        let p = EtsParams::new(1.0, 1.0, 1.0).unwrap();
        let opt = OptimizerConfig::new(vec![(-1.0, 1.0)]);
        assert!(chsh_max(&p, Backend::Analytic, &opt).is_err());
    }
}
