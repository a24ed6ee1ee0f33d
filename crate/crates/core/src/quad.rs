//! Gauss–Legendre rules and a small adaptive integrator.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// ascending, found by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// A fixed rule mapped onto arbitrary intervals.
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        GaussRule { nodes, weights }
    }

    #[inline]
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (t, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + h * t);
        }
        acc * h
    }

    pub fn points(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(t, w)| (c + h * t, w * h))
    }
}

/// Adaptive bisection comparing a Gauss rule on an interval with the same
/// rule on its halves. Stops when the difference falls below
/// `max(abs_tol, rel_tol·|I|)`, with `I` the first whole-interval estimate and
/// the tolerance split by halving.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    let rule = GaussRule::new(15);
    let whole = rule.integrate(a, b, f);
    let mut budget = 20_000usize;
    let tol = abs_tol.max(rel_tol * whole.abs());
    // below this the halves only differ by round-off
    let floor = 16.0 * f64::EPSILON * whole.abs().max(abs_tol);
    let v = adaptive_step(&rule, f, a, b, whole, tol, floor, 0, &mut budget)?;
    Ok(v)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step<F: Fn(f64) -> f64>(
    rule: &GaussRule,
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    floor: f64,
    depth: usize,
    budget: &mut usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let left = rule.integrate(a, m, f);
    let right = rule.integrate(m, b, f);
    let refined = left + right;
    let err = (refined - whole).abs();
    if err <= tol.max(floor) || depth > 60 {
        return Ok(refined);
    }
    if *budget == 0 {
        return Err(Error::NonConvergence {
            method: "adaptive Gauss-Legendre",
            iterations: 20_000,
            residual: err,
        });
    }
    *budget -= 1;
    let l = adaptive_step(rule, f, a, m, left, 0.5 * tol, floor, depth + 1, budget)?;
    let r = adaptive_step(rule, f, m, b, right, 0.5 * tol, floor, depth + 1, budget)?;
    Ok(l + r)
}
