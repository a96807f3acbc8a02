//! Averages over the thermal P-function
//! `P_α = (2/π(V−1)) exp(−2|α−d|²/(V−1))`, i.e. independent Gaussian
//! `Re α ~ N(d, (V−1)/4)` and `Im α ~ N(0, (V−1)/4)`.
//!
//! Correlations are ratios of P-averaged numerators and branch traces
//! (the projected branches are unnormalized and their traces vary with α),
//! never averages of per-branch ratios.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{kernel_correlation, EtsParams, ModeKernel};
use crate::engine::pure::{heisenberg_matrices, Ket};
use crate::engine::{
    apply_bell_setting, apply_leggett_setting, bell_sequence, correlation, ets_branch,
    leggett_sequence, overlap, CoherentOperator, LeggettSetting, LocalOp, Mode,
};
use crate::error::{invalid, Error, Result};
use crate::numerics::{gauss_hermite, Complex, MAX_ORDER};

/// Default Gauss-Hermite order per real dimension.
pub const DEFAULT_ORDER: usize = 12;
/// Largest change tolerated when the order is doubled.
pub const CONVERGENCE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Quadrature,
    MonteCarlo,
}

/// Weighted samples of α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfuncGrid {
    pub samples: Vec<(Complex, f64)>,
    pub v: f64,
    pub d: f64,
    pub scheme: Scheme,
    pub seed: Option<u64>,
    /// Quadrature order per dimension, or the Monte-Carlo sample count.
    pub size: usize,
}

fn check_vd(v: f64, d: f64) -> Result<()> {
    if !(v >= 1.0) || !v.is_finite() {
        return Err(invalid("V", format!("need V >= 1, got {v}")));
    }
    if !d.is_finite() {
        return Err(invalid("d", "must be finite"));
    }
    Ok(())
}

/// Tensor Gauss-Hermite grid over `(Re α, Im α)`; a single node for `V = 1`.
pub fn pfunc_grid(v: f64, d: f64, order: usize) -> Result<PfuncGrid> {
    check_vd(v, d)?;
    if v == 1.0 {
        return Ok(PfuncGrid {
            samples: vec![(Complex::new(d, 0.0), 1.0)],
            v,
            d,
            scheme: Scheme::Quadrature,
            seed: None,
            size: 1,
        });
    }
    let rule = gauss_hermite(order)?;
    // x = m + √2 σ t turns ∫ N(m, σ²) f into Σ w f / √π
    let scale = (2.0 * (v - 1.0) / 4.0).sqrt();
    let norm: f64 = rule.weights.iter().sum::<f64>().powi(2);
    let mut samples = Vec::with_capacity(order * order);
    for (&tx, &wx) in rule.nodes.iter().zip(&rule.weights) {
        for (&ty, &wy) in rule.nodes.iter().zip(&rule.weights) {
            samples.push((Complex::new(d + scale * tx, scale * ty), wx * wy / norm));
        }
    }
    Ok(PfuncGrid {
        samples,
        v,
        d,
        scheme: Scheme::Quadrature,
        seed: None,
        size: order,
    })
}

/// Draw `i` of the counter-based generator: depends only on `(seed, i)`.
fn draw(seed: u64, index: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (0..count).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn sample_alpha(v: f64, d: f64, z: &[f64]) -> Complex {
    let s = ((v - 1.0) / 4.0).sqrt();
    Complex::new(d + s * z[0], s * z[1])
}

/// `n` i.i.d. samples of α with weight `1/n`.
pub fn pfunc_monte_carlo(v: f64, d: f64, n: usize, seed: u64) -> Result<PfuncGrid> {
    check_vd(v, d)?;
    if n == 0 {
        return Err(invalid("samples", "need at least one sample"));
    }
    let samples = (0..n as u64)
        .into_par_iter()
        .map(|i| (sample_alpha(v, d, &draw(seed, i, 2)), 1.0 / n as f64))
        .collect();
    Ok(PfuncGrid {
        samples,
        v,
        d,
        scheme: Scheme::MonteCarlo,
        seed: Some(seed),
        size: n,
    })
}

/// Which entangled-thermal-state construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `ρ^{Ψ(+)}`: cross-Kerr with a microscopic qubit, projected on `|+⟩`.
    Qubit,
    /// `ρ^alt`: single-mode Kerr + 50:50 beam splitter + `D_A(iπ/8d)`.
    Alt,
}

/// The local settings of Alice and Bob for one correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SettingPair {
    Bell(f64, f64),
    Leggett(LeggettSetting, LeggettSetting),
}

impl SettingPair {
    fn sequences(&self, d: f64) -> (Vec<LocalOp>, Vec<LocalOp>) {
        match *self {
            SettingPair::Bell(a, b) => (bell_sequence(a, d), bell_sequence(b, d)),
            SettingPair::Leggett(a, b) => (leggett_sequence(a, d), leggett_sequence(b, d)),
        }
    }
}

/// P-averaged qubit-ETS kernel of one mode: the same object the closed
/// form computes, here by quadrature over per-node Heisenberg matrices.
pub fn quadrature_kernel(ops: &[LocalOp], params: &EtsParams, grid: &PfuncGrid) -> ModeKernel {
    let parts: Vec<ModeKernel> = grid
        .samples
        .par_iter()
        .map(|&(alpha, w)| {
            let kets = [Ket::coherent(alpha).apply(ops), Ket::coherent(-alpha).apply(ops)];
            let (m, g) = heisenberg_matrices(&kets, params.eta);
            let mut k = ModeKernel {
                sign: [[Complex::new(0.0, 0.0); 2]; 2],
                gram: [[Complex::new(0.0, 0.0); 2]; 2],
            };
            // heisenberg_matrices is indexed [bra][ket]; kernels are [ket][bra]
            for i in 0..2 {
                for j in 0..2 {
                    k.sign[i][j] = m[j * 2 + i] * w;
                    k.gram[i][j] = g[j * 2 + i] * w;
                }
            }
            k
        })
        .collect();
    parts.into_iter().fold(
        ModeKernel {
            sign: [[Complex::new(0.0, 0.0); 2]; 2],
            gram: [[Complex::new(0.0, 0.0); 2]; 2],
        },
        |mut acc, k| {
            for i in 0..2 {
                for j in 0..2 {
                    acc.sign[i][j] += k.sign[i][j];
                    acc.gram[i][j] += k.gram[i][j];
                }
            }
            acc
        },
    )
}

/// Per-node alt-ETS local matrices `(M, N)` (sign and Gram, indexed
/// `[bra*2 + ket]` over the two branch terms) for each local sequence.
fn alt_local(alpha: Complex, ops: &[Vec<LocalOp>], mode: Mode, params: &EtsParams) -> Vec<(Vec<Complex>, Vec<Complex>)> {
    use crate::engine::{KERR_FLIP, KERR_KEEP};
    let h = alpha * std::f64::consts::FRAC_1_SQRT_2;
    let phase = Complex::new(0.0, std::f64::consts::PI / (8.0 * params.d));
    // Kerr then the 50:50 splitter: KEEP|h, −h⟩ + FLIP|−h, h⟩, then D_A(iπ/8d)
    let terms = [(KERR_KEEP, h, -h), (KERR_FLIP, -h, h)];
    ops.iter()
        .map(|seq| {
            let kets: Vec<Ket> = match mode {
                Mode::A => terms
                    .iter()
                    .map(|&(c, la, _)| Ket::coherent(la).scaled(c).displace(phase).apply(seq))
                    .collect(),
                Mode::B => terms.iter().map(|&(_, _, lb)| Ket::coherent(lb).apply(seq)).collect(),
            };
            heisenberg_matrices(&kets, params.eta)
        })
        .collect()
}

/// Alt-ETS correlations for the index pairs `(i, j)` into the Alice and
/// Bob sequence lists, sharing the per-node local matrices.
pub fn alt_correlations(
    alice: &[Vec<LocalOp>],
    bob: &[Vec<LocalOp>],
    pairs: &[(usize, usize)],
    params: &EtsParams,
    order: usize,
) -> Result<Vec<f64>> {
    params.validate()?;
    if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= alice.len() || j >= bob.len()) {
        return Err(invalid("pairs", format!("index pair ({i}, {j}) out of range")));
    }
    let grid = pfunc_grid(params.v, params.d, order)?;
    let zero = Complex::new(0.0, 0.0);
    let parts: Vec<Vec<(Complex, Complex)>> = grid
        .samples
        .par_iter()
        .map(|&(alpha, w)| {
            let la = alt_local(alpha, alice, Mode::A, params);
            let lb = alt_local(alpha, bob, Mode::B, params);
            pairs
                .iter()
                .map(|&(i, j)| {
                    let (ma, ga) = &la[i];
                    let (mb, gb) = &lb[j];
                    let num: Complex = (0..4).map(|k| ma[k] * mb[k]).sum();
                    let den: Complex = (0..4).map(|k| ga[k] * gb[k]).sum();
                    (num * w, den * w)
                })
                .collect()
        })
        .collect();
    let mut acc = vec![(zero, zero); pairs.len()];
    for node in parts {
        for (a, (n, t)) in acc.iter_mut().zip(node) {
            a.0 += n;
            a.1 += t;
        }
    }
    acc.into_iter().map(|(n, t)| ratio(n, t)).collect()
}

fn ratio(num: Complex, den: Complex) -> Result<f64> {
    if den.norm() <= 1e-300 {
        return Err(Error::ZeroTrace);
    }
    let c = num / den;
    if !c.re.is_finite() {
        return Err(Error::FormulaInconsistency(format!("non-finite ensemble value {c}")));
    }
    Ok(c.re)
}

/// Correlation at a fixed quadrature order.
pub fn ensemble_correlation(
    family: Family,
    settings: SettingPair,
    params: &EtsParams,
    order: usize,
) -> Result<f64> {
    params.validate()?;
    let grid = pfunc_grid(params.v, params.d, order)?;
    let (ops_a, ops_b) = settings.sequences(params.d);
    match family {
        Family::Qubit => kernel_correlation(
            &quadrature_kernel(&ops_a, params, &grid),
            &quadrature_kernel(&ops_b, params, &grid),
        ),
        Family::Alt => Ok(alt_correlations(&[ops_a], &[ops_b], &[(0, 0)], params, order)?[0]),
    }
}

/// Result of an order-escalating evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Converged {
    pub value: f64,
    /// Order whose value was accepted (its doubling agreed within tolerance).
    pub order: usize,
    /// `|value(2·order) − value(order)|`.
    pub delta: f64,
}

/// Evaluates at `order` and `2·order` (capped at 200), escalating until the
/// two agree within [`CONVERGENCE_TOL`]; errors with the last difference if
/// the cap is reached first.
pub fn converge<F>(start_order: usize, eval: F) -> Result<Converged>
where
    F: Fn(usize) -> Result<f64>,
{
    let mut order = start_order.clamp(1, MAX_ORDER);
    let mut value = eval(order)?;
    loop {
        let doubled = (2 * order).min(MAX_ORDER);
        if doubled == order {
            return Err(Error::QuadratureNonConvergence {
                order,
                doubled,
                delta: f64::NAN,
            });
        }
        let next = eval(doubled)?;
        let delta = (next - value).abs();
        if delta <= CONVERGENCE_TOL {
            return Ok(Converged {
                value: next,
                order: doubled,
                delta,
            });
        }
        if doubled == MAX_ORDER {
            return Err(Error::QuadratureNonConvergence {
                order,
                doubled,
                delta,
            });
        }
        order = doubled;
        value = next;
    }
}

/// [`ensemble_correlation`] with the doubling check.
pub fn ensemble_correlation_converged(
    family: Family,
    settings: SettingPair,
    params: &EtsParams,
    start_order: usize,
) -> Result<Converged> {
    if params.v == 1.0 {
        let value = ensemble_correlation(family, settings, params, 1)?;
        return Ok(Converged {
            value,
            order: 1,
            delta: 0.0,
        });
    }
    converge(start_order, |order| ensemble_correlation(family, settings, params, order))
}

/// The qubit-ETS correlation as the literal 4-D product grid over
/// `(α, β)` with the dyad engine. Cost grows as `order⁴`; meant for
/// validating the factorized route at small orders.
pub fn qubit_correlation_4d(settings: SettingPair, params: &EtsParams, order: usize) -> Result<f64> {
    params.validate()?;
    let grid = pfunc_grid(params.v, params.d, order)?;
    let d = params.d;
    let parts: Vec<Result<(Complex, Complex)>> = grid
        .samples
        .par_iter()
        .map(|&(alpha, wa)| {
            let mut num = Complex::new(0.0, 0.0);
            let mut den = Complex::new(0.0, 0.0);
            for &(beta, wb) in &grid.samples {
                let branch = ets_branch(alpha, beta);
                let set = match settings {
                    SettingPair::Bell(ta, tb) => {
                        apply_bell_setting(&apply_bell_setting(&branch, ta, Mode::A, d), tb, Mode::B, d)
                    }
                    SettingPair::Leggett(a, b) => {
                        apply_leggett_setting(&apply_leggett_setting(&branch, a, Mode::A, d), b, Mode::B, d)
                    }
                };
                let tr = branch.trace();
                num += correlation(&set, params.eta)? * tr * wa * wb;
                den += tr * wa * wb;
            }
            Ok((num, den))
        })
        .collect();
    let mut num = Complex::new(0.0, 0.0);
    let mut den = Complex::new(0.0, 0.0);
    for p in parts {
        let (n, t) = p?;
        num += n;
        den += t;
    }
    ratio(num, den)
}

/// Monte-Carlo estimate of the linear entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub s: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

pub const MIN_ENTROPY_SAMPLES: usize = 10_000;

/// `S = 1 − Tr ρ²` for the qubit ETS. With `|ψ⟩ = (|α,β⟩ + |−α,−β⟩)/√2`
/// per P-sample, `Tr ρ² = E|⟨ψ|ψ'⟩|² / N²` over independent sample pairs,
/// and `N = E⟨ψ|ψ⟩ = 1 + (e^{−2d²/V}/V)²` in closed form.
pub fn linear_entropy(v: f64, d: f64, mc_samples: usize, seed: u64) -> Result<EntropyEstimate> {
    check_vd(v, d)?;
    if mc_samples < MIN_ENTROPY_SAMPLES {
        return Err(invalid("mc_samples", format!("need at least {MIN_ENTROPY_SAMPLES}")));
    }
    let norm = 1.0 + ((-2.0 * d * d / v).exp() / v).powi(2);
    let values: Vec<f64> = (0..mc_samples as u64)
        .into_par_iter()
        .map(|i| {
            let z = draw(seed, i, 8);
            let (a, b) = (sample_alpha(v, d, &z[0..2]), sample_alpha(v, d, &z[2..4]));
            let (a2, b2) = (sample_alpha(v, d, &z[4..6]), sample_alpha(v, d, &z[6..8]));
            let mut inner = Complex::new(0.0, 0.0);
            for s in [1.0, -1.0] {
                for t in [1.0, -1.0] {
                    inner += overlap(a * s, a2 * t) * overlap(b * s, b2 * t);
                }
            }
            (inner * 0.5).norm_sqr() / (norm * norm)
        })
        .collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(EntropyEstimate {
        s: 1.0 - mean,
        stderr: (var / n).sqrt(),
        samples: mc_samples,
        seed,
    })
}

/// Branch operator for one sample of either family (engine representation).
pub fn branch(family: Family, alpha: Complex, beta: Complex, d: f64) -> CoherentOperator {
    match family {
        Family::Qubit => ets_branch(alpha, beta),
        Family::Alt => crate::engine::alt_branch(alpha, d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{corr_eq1, leggett_correlation, mode_kernel};
    use crate::engine::alt_branch;

    #[test]
    fn unit_variance_is_a_single_node() {
        let g = pfunc_grid(1.0, 0.8, 12).unwrap();
        assert_eq!(g.samples, vec![(Complex::new(0.8, 0.0), 1.0)]);
        assert!(pfunc_grid(0.9, 1.0, 12).is_err());
    }

    #[test]
    fn grid_moments() {
        let g = pfunc_grid(3.0, 1.2, 20).unwrap();
        let sum: f64 = g.samples.iter().map(|s| s.1).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        let mean_re: f64 = g.samples.iter().map(|s| s.0.re * s.1).sum();
        let var_re: f64 = g.samples.iter().map(|s| (s.0.re - mean_re).powi(2) * s.1).sum();
        assert!((mean_re - 1.2).abs() < 1e-12);
        assert!((var_re - 0.5).abs() < 1e-10);
        let spread: f64 = g.samples.iter().map(|s| (s.0 - 1.2).norm_sqr() * s.1).sum();
        assert!((spread - 1.0).abs() < 1e-8);
    }

    #[test]
    fn monte_carlo_grid_is_deterministic() {
        let a = pfunc_monte_carlo(5.0, 1.0, 1000, 7).unwrap();
        let b = pfunc_monte_carlo(5.0, 1.0, 1000, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.samples.iter().all(|s| s.1 == 1e-3));
    }

    #[test]
    fn quadrature_kernel_matches_closed_form() {
        let p = EtsParams::new(6.0, 1.4, 0.3).unwrap();
        let ops = bell_sequence(0.6, p.d);
        let exact = mode_kernel(&ops, &p);
        let quad = quadrature_kernel(&ops, &p, &pfunc_grid(p.v, p.d, 40).unwrap());
        for i in 0..2 {
            for j in 0..2 {
                // the sign step and the narrow e^{−2|α|²} cross terms limit
                // Gauss-Hermite accuracy to ~1e-7 at order 40
                assert!((exact.sign[i][j] - quad.sign[i][j]).norm() < 1e-6, "{} vs {}", exact.sign[i][j], quad.sign[i][j]);
                assert!((exact.gram[i][j] - quad.gram[i][j]).norm() < 1e-6, "{i}{j} {} vs {}", exact.gram[i][j], quad.gram[i][j]);
            }
        }
    }

    #[test]
    fn ensemble_matches_analytic_for_bell_and_leggett() {
        let p = EtsParams::new(10.0, 2.0, 1.0).unwrap();
        let c = ensemble_correlation_converged(Family::Qubit, SettingPair::Bell(0.3, -0.4), &p, 12).unwrap();
        assert!((c.value - corr_eq1(0.3, -0.4, &p).unwrap()).abs() < 1e-6);
        let (a, b) = (LeggettSetting::new(1.0, 0.3), LeggettSetting::new(0.5, -1.0));
        let c = ensemble_correlation_converged(Family::Qubit, SettingPair::Leggett(a, b), &p, 12).unwrap();
        assert!((c.value - leggett_correlation(a, b, &p).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn four_dimensional_grid_agrees_with_factorized_route() {
        let p = EtsParams::new(2.0, 1.0, 0.7).unwrap();
        let s = SettingPair::Bell(0.4, -0.2);
        let full = qubit_correlation_4d(s, &p, 6).unwrap();
        let fact = ensemble_correlation(Family::Qubit, s, &p, 6).unwrap();
        assert!((full - fact).abs() < 1e-12, "{full} vs {fact}");
    }

    #[test]
    fn alt_family_at_unit_variance_matches_engine() {
        let (d, eta) = (1.1, 0.6);
        let p = EtsParams::new(1.0, d, eta).unwrap();
        let op = alt_branch(Complex::new(d, 0.0), d);
        let op = apply_bell_setting(&apply_bell_setting(&op, 0.5, Mode::A, d), -0.3, Mode::B, d);
        let want = correlation(&op, eta).unwrap();
        let got = ensemble_correlation(Family::Alt, SettingPair::Bell(0.5, -0.3), &p, 1).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn doubling_check_reports_non_convergence() {
        let r = converge(4, |order| Ok(order as f64));
        assert!(matches!(r, Err(Error::QuadratureNonConvergence { .. })));
        let ok = converge(4, |order| Ok(1.0 + 1e-6 / order as f64)).unwrap();
        assert_eq!(ok.order, 8);
    }

    #[test]
    fn entropy_limits() {
        let pure = linear_entropy(1.0, 1.5, 10_000, 3).unwrap();
        assert!(pure.s.abs() <= 1e-12 && pure.stderr <= 1e-12);
        let mixed = linear_entropy(1000.0, 3.0, 10_000, 3).unwrap();
        assert!(mixed.s > 0.999 && mixed.stderr < 1e-4, "{mixed:?}");
        assert!(linear_entropy(5.0, 1.0, 100, 1).is_err());
    }

    #[test]
    fn entropy_matches_gaussian_overlap_moment() {
        // For a single thermal mode, E|⟨α|α'⟩|² = 1/V; at large d the ETS
        // purity approaches (1/V)² · ½·(1 + …) ≈ 1/(2V²)·2 = 1/V² per pair.
        let v = 3.0;
        let e = linear_entropy(v, 4.0, 200_000, 11).unwrap();
        let want = 1.0 - 1.0 / (v * v);
        assert!((e.s - want).abs() < 4.0 * e.stderr + 1e-3, "{e:?} vs {want}");
    }
}
