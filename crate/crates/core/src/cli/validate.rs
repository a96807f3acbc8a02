//! Cross-backend agreement matrix and physics invariants.
//!
//! Shared by the `validate` subcommand and the acceptance harness.

use std::f64::consts::{FRAC_PI_2, PI};

use clap::ValueEnum;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{corr_eq1, leggett_correlation, ChshAngles, EtsParams};
use crate::engine::pure::{gate_fidelity, rotation};
use crate::engine::{
    apply_bell_setting, apply_leggett_setting, beamsplit, bell_sequence, correlation, displace,
    ets_branch, joint_probs, kerr, leggett_sequence, loss, prune, sign_element, CoherentOperator,
    Dyad, LeggettSetting, Mode, DEFAULT_PRUNE_TOL,
};
use crate::ensemble::{
    ensemble_correlation, ensemble_correlation_converged, linear_entropy, pfunc_grid, Family,
    SettingPair,
};
use crate::error::Result;
use crate::fock::{
    fock_coherent, fock_loss, fock_sign, oracle_correlation, oracle_joint_probs,
    single_mode_matrix, FockKet, FockStep, OracleScenario,
};
use crate::inequalities::{bell_value, leggett_l, Backend, LeggettOptions};
use crate::numerics::{gauss_hermite, Complex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Quick,
    Full,
}

/// One pass/fail line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Observed error or value.
    pub value: f64,
    /// Tolerance or threshold it was compared against.
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value <= tolerance` (NaN fails).
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }

    /// Passes when `value >= threshold`.
    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance: threshold,
            passed: value >= threshold,
        }
    }

    fn from_result(name: &str, r: Result<Check>) -> Self {
        r.unwrap_or_else(|e| Check {
            name: format!("{name} (error: {e})"),
            value: f64::NAN,
            tolerance: f64::NAN,
            passed: false,
        })
    }
}

fn z(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn random_label(rng: &mut ChaCha8Rng, radius: f64) -> Complex {
    let r = radius * rng.random::<f64>().sqrt();
    Complex::from_polar(r, rng.random_range(-PI..PI))
}

fn random_dyads(rng: &mut ChaCha8Rng, n: usize) -> CoherentOperator {
    let kets: Vec<(Complex, Complex, Complex)> = (0..n)
        .map(|_| (random_label(rng, 1.0), random_label(rng, 1.5), random_label(rng, 1.5)))
        .collect();
    CoherentOperator::from_ket(&kets)
}

/// Engine operator distance `‖x − y‖²_HS / ‖y‖²_HS`.
fn relative_distance(x: &CoherentOperator, y: &CoherentOperator) -> f64 {
    let d = x.trace_product(x) + y.trace_product(y) - x.trace_product(y) - y.trace_product(x);
    d.norm() / y.trace_product(y).norm()
}

/// Random oracle scenario covering every operation kind.
pub fn random_scenario(rng: &mut ChaCha8Rng, index: usize) -> OracleScenario {
    let family = if index.is_multiple_of(2) { Family::Qubit } else { Family::Alt };
    let d = rng.random_range(0.9..1.6);
    let mode = |rng: &mut ChaCha8Rng| if rng.random::<bool>() { Mode::A } else { Mode::B };
    let mut steps = Vec::new();
    // every scenario ends with a pair of settings; even indices Bell, odd-by-4 Leggett
    let extra = match index % 3 {
        0 => FockStep::Displace(mode(rng), random_label(rng, 0.6)),
        1 => FockStep::Kerr(mode(rng)),
        _ => FockStep::Beamsplit(rng.random_range(0.3..0.95)),
    };
    steps.push(extra);
    if (index / 2).is_multiple_of(2) {
        steps.push(FockStep::Bell(Mode::A, rng.random_range(-1.2..1.2)));
        steps.push(FockStep::Bell(Mode::B, rng.random_range(-1.2..1.2)));
    } else {
        let s = |rng: &mut ChaCha8Rng| LeggettSetting::new(rng.random_range(0.0..PI), rng.random_range(-PI..PI));
        steps.push(FockStep::Leggett(Mode::A, s(rng)));
        steps.push(FockStep::Leggett(Mode::B, s(rng)));
    }
    let base = OracleScenario {
        family,
        alpha: random_label(rng, 1.3),
        beta: random_label(rng, 1.3),
        d,
        steps,
        eta: rng.random_range(0.05..1.0),
        dim: 0,
    };
    OracleScenario {
        dim: base.auto_dim(),
        ..base
    }
}

/// Largest engine/oracle discrepancy in one scenario: correlation, joint
/// probabilities, trace and `⟨ψ|ρ|ψ⟩`.
pub fn scenario_discrepancy(s: &OracleScenario) -> Result<f64> {
    let e = s.engine_state();
    let c_e = correlation(&e, s.eta)?;
    let c_f = oracle_correlation(s)?;
    let p_e = joint_probs(&e, s.eta)?;
    let p_f = oracle_joint_probs(s)?;
    let k = s.final_ket()?;
    let n = k.norm_sqr();
    let mut worst = (c_e - c_f).abs();
    for (x, y) in [p_e.pp, p_e.pm, p_e.mp, p_e.mm].iter().zip(p_f) {
        worst = worst.max((x - y).abs());
    }
    worst = worst.max((e.trace().re - n).abs());
    worst = worst.max((k.sandwich(&e)?.re - n * n).abs());
    Ok(worst)
}

/// Runs `n` random scenarios; returns the per-scenario discrepancies.
pub fn oracle_agreement(n: usize, seed: u64) -> Result<Vec<(OracleScenario, f64)>> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let s = random_scenario(&mut rng, i);
        let worst = scenario_discrepancy(&s)?;
        out.push((s, worst));
    }
    Ok(out)
}

fn invariant_checks(checks: &mut Vec<Check>) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let op = random_dyads(&mut rng, 3);
    let t0 = op.trace();
    let ops: [(&str, CoherentOperator); 4] = [
        ("displace", displace(&op, Mode::A, z(0.4, -0.7))),
        ("kerr", kerr(&op, Mode::B)),
        ("beamsplit", beamsplit(&op, 0.6)),
        ("loss", loss(&op, Mode::A, 0.35)),
    ];
    for (name, out) in &ops {
        checks.push(Check::at_most(format!("trace preserved by {name}"), (out.trace() - t0).norm(), 1e-12));
        checks.push(Check::at_most(format!("hermiticity preserved by {name}"), out.hermiticity_defect(), 1e-12));
    }
    let composed = loss(&loss(&op, Mode::B, 0.8), Mode::B, 0.6);
    let direct = loss(&op, Mode::B, 0.48);
    checks.push(Check::at_most("loss(0.8)∘loss(0.6) = loss(0.48)", relative_distance(&composed, &direct), 1e-10));
    let twice = kerr(&kerr(&op, Mode::A), Mode::A);
    let parity = CoherentOperator::new(
        op.dyads
            .iter()
            .map(|d| Dyad::new(d.coeff, (-d.ket_a, d.ket_b), (-d.bra_a, d.bra_b)))
            .collect(),
    );
    checks.push(Check::at_most("kerr twice is parity", relative_distance(&twice, &parity), 1e-12));

    let branch = ets_branch(z(0.9, 0.2), z(1.1, -0.3));
    let set = apply_bell_setting(&apply_bell_setting(&branch, 0.4, Mode::A, 1.0), -0.9, Mode::B, 1.0);
    match joint_probs(&set, 0.6) {
        Ok(p) => {
            let min = p.pp.min(p.pm).min(p.mp).min(p.mm);
            checks.push(Check::at_least("joint probabilities nonnegative", min, -1e-12));
            checks.push(Check::at_most("joint probabilities sum to 1", (p.sum() - 1.0).abs(), 1e-9));
        }
        Err(e) => checks.push(Check::from_result("joint probabilities", Err(e))),
    }
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let p = EtsParams::new(rng.random_range(1.0..100.0), rng.random_range(0.1..6.0), rng.random_range(0.02..1.0))
            .expect("valid");
        if let Ok(c) = corr_eq1(rng.random_range(-PI..PI), rng.random_range(-PI..PI), &p) {
            worst = worst.max(c.abs());
        }
    }
    checks.push(Check::at_most("|C| <= 1 on random parameters", worst, 1.0 + 1e-9));
    let mut worst_b: f64 = 0.0;
    for _ in 0..20 {
        let p = EtsParams::new(rng.random_range(1.0..50.0), rng.random_range(0.1..8.0), rng.random_range(0.02..1.0))
            .expect("valid");
        let a = ChshAngles::from_slice(&(0..4).map(|_| rng.random_range(-PI..PI)).collect::<Vec<_>>());
        if let Ok(b) = bell_value(&a, &p, Backend::Analytic) {
            worst_b = worst_b.max(b.abs());
        }
    }
    checks.push(Check::at_most("|B| <= 2√2 on random settings", worst_b, 2.0 * 2f64.sqrt() + 1e-6));
    let l = leggett_l(&EtsParams::new(1.0, 2.0, 1.0).expect("valid"), 0.3, Backend::Analytic, &LeggettOptions::default());
    checks.push(Check::from_result("L <= 8", l.map(|l| Check::at_most("L <= 8", l, 8.0 + 1e-6))));

    let full = apply_leggett_setting(&branch, LeggettSetting::new(1.2, 0.25), Mode::A, 1.1);
    let pruned = prune(&full, DEFAULT_PRUNE_TOL);
    let diff = match (correlation(&full, 0.8), correlation(&pruned, 0.8)) {
        (Ok(a), Ok(b)) => (a - b).abs(),
        _ => f64::NAN,
    };
    checks.push(Check::at_most("prune(1e-14) leaves the Leggett correlation", diff, 1e-12));
}

fn numeric_checks(checks: &mut Vec<Check>) {
    let rule = gauss_hermite(20).expect("order 20");
    let moment4 = rule.integrate(|x| x.powi(4));
    checks.push(Check::at_most("Gauss-Hermite order 20 integrates x⁴ (= 3/4 √π)", (moment4 - 0.75 * PI.sqrt()).abs(), 1e-12));
    let g = pfunc_grid(5.0, 1.3, 16).expect("grid");
    let var: f64 = g.samples.iter().map(|(a, w)| w * (a.re - 1.3).powi(2)).sum();
    checks.push(Check::at_most("P-function grid variance (V−1)/4", (var - 1.0).abs(), 1e-12));
    let p = EtsParams::new(5.0, 1.5, 0.5).expect("valid");
    let conv = ensemble_correlation_converged(Family::Qubit, SettingPair::Bell(0.3, -0.4), &p, 8);
    checks.push(Check::from_result(
        "quadrature converged under order doubling",
        conv.map(|c| Check::at_most("quadrature converged under order doubling", c.delta, 1e-4)),
    ));
}

fn gate_checks(checks: &mut Vec<Check>) {
    let worst_bell = [-FRAC_PI_2, -0.6, 0.0, 0.5, FRAC_PI_2]
        .iter()
        .map(|&t| gate_fidelity(&bell_sequence(t, 3.0), 3.0, &rotation(2.0 * t, 0.0)).fidelity)
        .fold(1.0, f64::min);
    checks.push(Check::at_least("Bell gate fidelity to R(2θ, 0) at d = 3", worst_bell, 0.999));
    let phi = 0.2507;
    let worst_leggett = crate::inequalities::leggett_suite(phi)
        .unique()
        .iter()
        .map(|s| gate_fidelity(&leggett_sequence(*s, 3.0), 3.0, &rotation(s.theta, -s.phi)).fidelity)
        .fold(1.0, f64::min);
    checks.push(Check::at_least("Leggett gate fidelity to R(θ, −φ) at d = 3", worst_leggett, 0.99));
}

fn backend_checks(checks: &mut Vec<Check>, suite: Suite) {
    // analytic vs engine at V = 1
    let grid: Vec<f64> = match suite {
        Suite::Quick => vec![-0.9, 0.2, 1.1],
        Suite::Full => vec![-1.2, -0.5, 0.0, 0.6, 1.3],
    };
    let etas: Vec<f64> = match suite {
        Suite::Quick => vec![1.0, 0.3],
        Suite::Full => vec![1.0, 0.5, 0.05],
    };
    let mut worst: f64 = 0.0;
    for &eta in &etas {
        let p = EtsParams::new(1.0, 1.0, eta).expect("valid");
        for &ta in &grid {
            for &tb in &grid {
                let op = ets_branch(z(1.0, 0.0), z(1.0, 0.0));
                let op = apply_bell_setting(&apply_bell_setting(&op, ta, Mode::A, 1.0), tb, Mode::B, 1.0);
                match (corr_eq1(ta, tb, &p), correlation(&op, eta)) {
                    (Ok(a), Ok(e)) => worst = worst.max((a - e).abs()),
                    _ => worst = f64::NAN,
                }
            }
        }
    }
    checks.push(Check::at_most(
        format!("Eq. (1) vs engine on the V = 1, d = 1 grid ({}×{}×{})", grid.len(), grid.len(), etas.len()),
        worst,
        1e-6,
    ));
    let (a, b) = (LeggettSetting::new(1.0, 0.4), LeggettSetting::new(FRAC_PI_2, -1.1));
    let p = EtsParams::new(1.0, 1.2, 0.7).expect("valid");
    let op = ets_branch(z(1.2, 0.0), z(1.2, 0.0));
    let op = apply_leggett_setting(&apply_leggett_setting(&op, a, Mode::A, 1.2), b, Mode::B, 1.2);
    let diff = match (leggett_correlation(a, b, &p), correlation(&op, 0.7)) {
        (Ok(x), Ok(y)) => (x - y).abs(),
        _ => f64::NAN,
    };
    checks.push(Check::at_most("Leggett closed form vs engine at V = 1", diff, 1e-10));
    // analytic vs ensemble at V > 1
    let p = EtsParams::new(3.0, 1.4, 0.6).expect("valid");
    let diff = match (corr_eq1(0.4, -0.2, &p), ensemble_correlation(Family::Qubit, SettingPair::Bell(0.4, -0.2), &p, 40)) {
        (Ok(x), Ok(y)) => (x - y).abs(),
        _ => f64::NAN,
    };
    checks.push(Check::at_most("closed form vs Gauss-Hermite ensemble at V = 3", diff, 1e-6));
    // ensemble V → 1 limit equals the single-branch engine
    let p1 = EtsParams::new(1.0, 1.1, 0.9).expect("valid");
    let op = ets_branch(z(1.1, 0.0), z(1.1, 0.0));
    let op = apply_bell_setting(&apply_bell_setting(&op, 0.3, Mode::A, 1.1), 0.8, Mode::B, 1.1);
    let diff = match (ensemble_correlation(Family::Qubit, SettingPair::Bell(0.3, 0.8), &p1, 12), correlation(&op, 0.9)) {
        (Ok(x), Ok(y)) => (x - y).abs(),
        _ => f64::NAN,
    };
    checks.push(Check::at_most("ensemble at V = 1 equals the engine", diff, 1e-12));
}

fn oracle_checks(checks: &mut Vec<Check>, suite: Suite) {
    let dim = 40;
    let check = |name: &str, f: &dyn Fn() -> Result<f64>, tol: f64| {
        Check::from_result(name, f().map(|v| Check::at_most(name, v, tol)))
    };
    let coherent_pair = |ga: Complex, gb: Complex| -> Result<FockKet> {
        Ok(FockKet::product(&fock_coherent(ga, dim)?, &fock_coherent(gb, dim)?))
    };
    checks.push(check(
        "oracle: displacement",
        &|| {
            let k = coherent_pair(z(0.5, 0.3), z(-0.2, 0.1))?;
            let out = k.apply(&crate::fock::fock_displace(z(-0.4, 0.9), dim)?, Mode::A);
            let e = displace(&CoherentOperator::from_ket(&[(z(1.0, 0.0), z(0.5, 0.3), z(-0.2, 0.1))]), Mode::A, z(-0.4, 0.9));
            Ok((out.sandwich(&e)?.re - 1.0).abs())
        },
        1e-8,
    ));
    checks.push(check(
        "oracle: kerr",
        &|| {
            let k = coherent_pair(z(1.0, 0.2), z(0.3, 0.0))?;
            let out = k.apply(&crate::fock::fock_kerr(dim)?, Mode::A);
            let e = kerr(&CoherentOperator::from_ket(&[(z(1.0, 0.0), z(1.0, 0.2), z(0.3, 0.0))]), Mode::A);
            Ok((out.sandwich(&e)?.re - 1.0).abs())
        },
        1e-8,
    ));
    checks.push(check(
        "oracle: beamsplit",
        &|| {
            let k = coherent_pair(z(1.0, 0.2), z(-0.6, 0.4))?;
            let out = k.beamsplit(0.7)?;
            let e = beamsplit(&CoherentOperator::from_ket(&[(z(1.0, 0.0), z(1.0, 0.2), z(-0.6, 0.4))]), 0.7);
            Ok((out.sandwich(&e)?.re - 1.0).abs())
        },
        1e-8,
    ));
    checks.push(check(
        "oracle: loss on |γ⟩⟨−γ| (γ = 1, η = 0.5)",
        &|| {
            let op = CoherentOperator::new(vec![Dyad::new(z(1.0, 0.0), (z(1.0, 0.0), z(0.0, 0.0)), (z(-1.0, 0.0), z(0.0, 0.0)))]);
            let lossy = loss(&op, Mode::A, 0.5);
            let terms: Vec<_> = lossy.dyads.iter().map(|d| (d.coeff, d.ket_a, d.bra_a)).collect();
            let engine = single_mode_matrix(&terms, 30)?;
            let oracle = fock_loss(&single_mode_matrix(&[(z(1.0, 0.0), z(1.0, 0.0), z(-1.0, 0.0))], 30)?, 0.5)?;
            Ok((engine - oracle).iter().map(|x| x.norm()).fold(0.0, f64::max))
        },
        1e-10,
    ));
    checks.push(check(
        "oracle: sign element at γ = 0.5 + 0.5i",
        &|| {
            let s = fock_sign(dim)?;
            let g = z(0.5, 0.5);
            let f = fock_coherent(-g, dim)?.dotc(&(&s * fock_coherent(g, dim)?));
            Ok((f - sign_element(-g, g)).norm())
        },
        1e-9,
    ));
    checks.push(check(
        "oracle: sign matrix parity selection rule",
        &|| {
            let s: DMatrix<Complex> = fock_sign(20)?;
            let mut worst: f64 = 0.0;
            for m in 0..20 {
                for n in 0..20 {
                    if (m + n) % 2 == 0 {
                        worst = worst.max(s[(m, n)].norm());
                    }
                }
            }
            Ok(worst)
        },
        0.0,
    ));
    let n = match suite {
        Suite::Quick => 8,
        Suite::Full => 100,
    };
    match oracle_agreement(n, 2024) {
        Ok(results) => {
            for kind in [(Family::Qubit, true), (Family::Qubit, false), (Family::Alt, true), (Family::Alt, false)] {
                let worst = results
                    .iter()
                    .filter(|(s, _)| s.family == kind.0 && matches!(s.steps.last(), Some(FockStep::Bell(..))) == kind.1)
                    .map(|(_, w)| *w)
                    .fold(0.0, f64::max);
                let label = format!(
                    "oracle: random {} scenarios with {} settings",
                    match kind.0 {
                        Family::Qubit => "qubit-ETS",
                        Family::Alt => "alt-ETS",
                    },
                    if kind.1 { "Bell" } else { "Leggett" }
                );
                checks.push(Check::at_most(label, worst, 1e-8));
            }
        }
        Err(e) => checks.push(Check::from_result("oracle: random scenarios", Err(e))),
    }
    if suite == Suite::Full {
        checks.push(check(
            "oracle: truncation doubling 40 → 80",
            &|| {
                let s = OracleScenario {
                    family: Family::Qubit,
                    alpha: z(1.0, 0.0),
                    beta: z(1.0, 0.0),
                    d: 1.0,
                    steps: vec![FockStep::Bell(Mode::A, 0.3), FockStep::Bell(Mode::B, -0.3)],
                    eta: 0.8,
                    dim: 40,
                };
                let a = oracle_correlation(&s)?;
                let b = oracle_correlation(&OracleScenario { dim: 80, ..s })?;
                Ok((a - b).abs())
            },
            1e-9,
        ));
    }
}

fn entropy_checks(checks: &mut Vec<Check>) {
    match linear_entropy(1.0, 2.0, 10_000, 5) {
        Ok(e) => checks.push(Check::at_most("linear entropy vanishes at V = 1", e.s.abs(), (3.0 * e.stderr).max(1e-12))),
        Err(err) => checks.push(Check::from_result("linear entropy at V = 1", Err(err))),
    }
    match linear_entropy(1000.0, 3.0, 10_000, 5) {
        Ok(e) => checks.push(Check::at_least("linear entropy at V = 1000, d = 3", e.s, 0.999)),
        Err(err) => checks.push(Check::from_result("linear entropy at V = 1000", Err(err))),
    }
}

/// Runs a suite; the quick suite has at least 30 checks.
pub fn run_suite(suite: Suite) -> Vec<Check> {
    let mut checks = Vec::new();
    invariant_checks(&mut checks);
    numeric_checks(&mut checks);
    gate_checks(&mut checks);
    backend_checks(&mut checks, suite);
    oracle_checks(&mut checks, suite);
    entropy_checks(&mut checks);
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_is_green_and_large_enough() {
        let checks = run_suite(Suite::Quick);
        assert!(checks.len() >= 30, "{}", checks.len());
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn scenarios_cover_every_kind() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let kinds: Vec<_> = (0..12).map(|i| random_scenario(&mut rng, i)).collect();
        assert!(kinds.iter().any(|s| s.family == Family::Alt));
        assert!(kinds.iter().any(|s| matches!(s.steps[0], FockStep::Beamsplit(_))));
        assert!(kinds.iter().any(|s| matches!(s.steps[0], FockStep::Kerr(_))));
        assert!(kinds.iter().any(|s| matches!(s.steps[0], FockStep::Displace(..))));
        assert!(kinds.iter().any(|s| matches!(s.steps[1], FockStep::Leggett(..))));
    }
}
