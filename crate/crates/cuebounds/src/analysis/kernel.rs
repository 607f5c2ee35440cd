use std::f64::consts::{PI, TAU};

use crate::error::{domain, Result};
use crate::numerics::gauss_legendre_rule;
use crate::trigpoly::{hilbert_transform, poly_from_xi, HilbertPair, XiVector};

const DEVINATZ_ORDER: usize = 16;

/// H(θ, x) = ((h(θ) − h(x)) / (2 sin((θ−x)/2)))², with H(θ, θ) = h′(θ)².
pub fn h_kernel(pair: &HilbertPair, theta: f64, x: f64) -> f64 {
    let d = (theta - x + PI).rem_euclid(TAU) - PI;
    if d == 0.0 {
        return pair.h.eval_derivative(theta, 1).powi(2);
    }
    let q = (pair.h.eval(theta) - pair.h.eval(x)) / (2.0 * (0.5 * (theta - x)).sin());
    q * q
}

/// |∬ H dθ dx/(2π)² − ‖ξ‖²| by a tensor Gauss–Legendre rule with 2m + 4
/// panels of order 16 per axis. H is a trigonometric polynomial of degree
/// 2m − 1 in each variable, so the rule is exact up to roundoff.
pub fn devinatz_check(xi: &XiVector) -> Result<f64> {
    let m = xi.m();
    if m > 8 {
        return domain(format!("devinatz_check takes m <= 8, got {m}"));
    }
    let pair = hilbert_transform(&poly_from_xi(xi));
    let (nodes, weights) = tensor_nodes(2 * m + 4);
    let mut total = 0.0;
    for (t, wt) in nodes.iter().zip(&weights) {
        let mut row = 0.0;
        for (x, wx) in nodes.iter().zip(&weights) {
            row += wx * h_kernel(&pair, *t, *x);
        }
        total += wt * row;
    }
    Ok((total / (TAU * TAU) - xi.norm_sq()).abs())
}

fn tensor_nodes(panels: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre_rule(DEVINATZ_ORDER);
    let h = TAU / panels as f64;
    let mut nodes = Vec::with_capacity(panels * x.len());
    let mut weights = Vec::with_capacity(panels * x.len());
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(mid + 0.5 * h * xi);
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}
