//! Bounded Nelder-Mead with seeded multistart.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    pub tolerance: f64,
    pub restarts: usize,
    pub seed: u64,
    pub bounds: Vec<(f64, f64)>,
}

impl OptimizerConfig {
    pub fn new(bounds: Vec<(f64, f64)>) -> Self {
        Self {
            max_iters: 400,
            tolerance: 1e-8,
            restarts: 16,
            seed: 0x005e_ed0f_be11,
            bounds,
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(invalid("tolerance", "must be positive"));
        }
        if self.restarts == 0 {
            return Err(invalid("restarts", "must be at least 1"));
        }
        if self.bounds.is_empty() {
            return Err(invalid("bounds", "at least one dimension required"));
        }
        for &(lo, hi) in &self.bounds {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(invalid("bounds", format!("need finite lo < hi, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// Start point of restart `index`; depends only on `(seed, index)`.
    pub fn start_point(&self, index: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        self.bounds
            .iter()
            .map(|&(lo, hi)| rng.random_range(lo..hi))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub argmin: Vec<f64>,
    pub value: f64,
    /// False when the best restart hit `max_iters` before its simplex values
    /// agreed to `tolerance` (and its diameter shrank below `√tolerance`).
    pub converged: bool,
    /// Index of the restart that produced the minimum.
    pub restart: usize,
    pub evaluations: usize,
}

/// Minimizes `f` over the bound box with `config.restarts` independent
/// Nelder-Mead descents. Restarts run in parallel; the best one wins, ties
/// going to the lowest restart index, so the result does not depend on
/// scheduling.
pub fn minimize<F>(f: F, config: &OptimizerConfig) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    let runs: Vec<Minimum> = (0..config.restarts)
        .into_par_iter()
        .map(|i| {
            let start = config.start_point(i);
            let mut m = nelder_mead(&f, start, config);
            m.restart = i;
            m
        })
        .collect();
    Ok(best_of(runs))
}

/// Like [`minimize`] but with caller-supplied start points prepended to the
/// random ones.
pub fn minimize_from<F>(f: F, starts: &[Vec<f64>], config: &OptimizerConfig) -> Result<Minimum>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    let total = starts.len() + config.restarts;
    let runs: Vec<Minimum> = (0..total)
        .into_par_iter()
        .map(|i| {
            let start = if i < starts.len() {
                clamp_into(&starts[i], &config.bounds)
            } else {
                config.start_point(i - starts.len())
            };
            let mut m = nelder_mead(&f, start, config);
            m.restart = i;
            m
        })
        .collect();
    Ok(best_of(runs))
}

fn best_of(runs: Vec<Minimum>) -> Minimum {
    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    let mut best = runs
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("at least one restart");
    best.evaluations = evaluations;
    best
}

fn clamp_into(x: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    x.iter()
        .zip(bounds)
        .map(|(&v, &(lo, hi))| v.clamp(lo, hi))
        .collect()
}

fn nelder_mead<F>(f: &F, start: Vec<f64>, config: &OptimizerConfig) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    const ALPHA: f64 = 1.0;
    const GAMMA: f64 = 2.0;
    const RHO: f64 = 0.5;
    const SIGMA: f64 = 0.5;

    let bounds = &config.bounds;
    let n = start.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.clone());
    for (k, &(lo, hi)) in bounds.iter().enumerate() {
        let step = 0.1 * (hi - lo);
        let mut p = start.clone();
        p[k] = if p[k] + step <= hi { p[k] + step } else { p[k] - step };
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| eval(p)).collect();

    let mut converged = false;
    for _ in 0..config.max_iters {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..]
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let spread = (values[n] - values[0]).abs();
        // Flat valleys (degenerate optima) shrink the simplex slowly, so the
        // argument only has to settle to √tol once the values agree to tol.
        if diameter <= config.tolerance.sqrt() && spread <= config.tolerance.max(1e-14) {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64)
            .collect();
        let toward = |t: f64| -> Vec<f64> {
            let p: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (c - w))
                .collect();
            clamp_into(&p, bounds)
        };

        let reflected = toward(ALPHA);
        let fr = eval(&reflected);
        if fr < values[0] {
            let expanded = toward(GAMMA);
            let fe = eval(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[n] {
            let p = toward(RHO * ALPHA);
            let v = eval(&p);
            (p, v)
        } else {
            let p = toward(-RHO);
            let v = eval(&p);
            (p, v)
        };
        if fc < values[n].min(fr) {
            simplex[n] = contracted;
            values[n] = fc;
            continue;
        }
        // shrink toward the best vertex
        for i in 1..=n {
            let p: Vec<f64> = simplex[0]
                .iter()
                .zip(&simplex[i])
                .map(|(b, x)| b + SIGMA * (x - b))
                .collect();
            values[i] = eval(&p);
            simplex[i] = p;
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    Minimum {
        argmin: simplex[best].clone(),
        value: values[best],
        converged,
        restart: 0,
        evaluations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn parabola_minimum() {
        let cfg = OptimizerConfig::new(vec![(-5.0, 5.0)]).with_tolerance(1e-10);
        let m = minimize(|x| (x[0] - 1.0).powi(2), &cfg).unwrap();
        assert!((m.argmin[0] - 1.0).abs() < 1e-6);
        assert!(m.converged);
    }

    #[test]
    fn rosenbrock_with_eight_restarts() {
        let cfg = OptimizerConfig::new(vec![(-2.0, 2.0), (-2.0, 2.0)])
            .with_restarts(8)
            .with_max_iters(2000)
            .with_tolerance(1e-10);
        let m = minimize(rosenbrock, &cfg).unwrap();
        assert!((m.argmin[0] - 1.0).abs() < 1e-4 && (m.argmin[1] - 1.0).abs() < 1e-4, "{m:?}");
    }

    #[test]
    fn identical_seed_gives_bitwise_identical_result() {
        let cfg = OptimizerConfig::new(vec![(-2.0, 2.0), (-2.0, 2.0)]).with_restarts(5);
        let a = minimize(rosenbrock, &cfg).unwrap();
        let b = minimize(rosenbrock, &cfg).unwrap();
        assert_eq!(a.argmin, b.argmin);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn more_restarts_never_hurt() {
        let f = |x: &[f64]| (3.0 * x[0]).sin() * (2.0 * x[1]).cos() + 0.05 * (x[0] * x[0] + x[1] * x[1]);
        let mut previous = f64::INFINITY;
        for k in 1..=8 {
            let cfg = OptimizerConfig::new(vec![(-4.0, 4.0), (-4.0, 4.0)])
                .with_restarts(k)
                .with_max_iters(60);
            let m = minimize(f, &cfg).unwrap();
            assert!(m.value <= previous);
            previous = m.value;
        }
    }

    #[test]
    fn unconverged_runs_are_flagged() {
        let cfg = OptimizerConfig::new(vec![(-2.0, 2.0), (-2.0, 2.0)])
            .with_restarts(1)
            .with_max_iters(3);
        let m = minimize(rosenbrock, &cfg).unwrap();
        assert!(!m.converged);
    }

    #[test]
    fn stays_inside_bounds() {
        let cfg = OptimizerConfig::new(vec![(0.5, 3.0)]);
        let m = minimize(|x| x[0], &cfg).unwrap();
        assert!((m.argmin[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(OptimizerConfig::new(vec![]).validate().is_err());
        assert!(OptimizerConfig::new(vec![(1.0, 1.0)]).validate().is_err());
        assert!(OptimizerConfig::new(vec![(0.0, 1.0)]).with_restarts(0).validate().is_err());
        assert!(OptimizerConfig::new(vec![(0.0, 1.0)]).with_tolerance(0.0).validate().is_err());
    }
}
