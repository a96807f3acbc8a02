//! Gauss-Hermite quadrature for the weight `exp(-x^2)`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureRule {
    /// `sum_i w_i f(x_i)` approximating `∫ f(x) exp(-x^2) dx`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Nodes and weights of the `order`-point Gauss-Hermite rule.
///
/// Starting guesses are the eigenvalues of the symmetric Jacobi matrix
/// (Golub-Welsch), which are robust for every order; each root is then
/// polished by Newton's method on the orthonormal Hermite recurrence, and
/// the weight follows from the derivative at the root, which keeps its
/// relative accuracy even when it is tiny.
pub fn gauss_hermite(order: usize) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::QuadratureOrder(order));
    }
    let n = order;
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut guesses: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    guesses.sort_by(f64::total_cmp);

    let pim4 = std::f64::consts::PI.powf(-0.25);
    let nf = n as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    // Polish the non-positive half and mirror it, so the rule is exactly
    // symmetric.
    for &guess in guesses.iter().take(n.div_ceil(2)) {
        let mut z = guess;
        let mut pp = 0.0;
        for _ in 0..20 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes.push(z);
        weights.push(2.0 / (pp * pp));
    }
    if n % 2 == 1 {
        // the middle root is exactly zero
        *nodes.last_mut().expect("order >= 1") = 0.0;
    }
    for i in (0..n / 2).rev() {
        nodes.push(-nodes[i]);
        weights.push(weights[i]);
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        order: n,
    })
}
