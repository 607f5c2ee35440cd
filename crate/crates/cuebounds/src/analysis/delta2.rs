use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numerics::{gauss_legendre_rule, QuadEstimate};
use crate::spectral::char_fn;
use crate::trigpoly::XiVector;

const ORDER: usize = 16;
/// Coarse panel width; the oscillation period of |F_{n,1}|² is about 2.2.
const PANEL_WIDTH: f64 = 2.0;
const EDGES: [f64; 9] = [0.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0];
/// Dyadic increments shrinking by less than 2^{−0.2} per doubling of R are
/// treated as a divergent integral.
const DIVERGENCE_RATIO: f64 = 0.870_550_563_296_124;
const TAIL_REL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadResult {
    /// Δ⁽²⁾ = (2π∫₀^∞ |F_{n,1}(r) − e^{−r²/2}|² r dr)^{1/2}.
    pub value: f64,
    /// Change in Δ⁽²⁾ under one panel doubling on [0, R].
    pub error_estimate: f64,
    pub truncation_radius: f64,
    /// Extrapolated contribution of [R, ∞) to Δ⁽²⁾², included in `value`.
    pub tail_estimate: f64,
}

fn integrand(n: usize, r: f64) -> Result<f64> {
    let f = char_fn(&XiVector::new(vec![r, 0.0])?, n)?.value;
    Ok(TAU * r * (f - (-r * r / 2.0).exp()).norm_sqr())
}

fn panels_sum(n: usize, a: f64, b: f64, panels: usize, rule: &(Vec<f64>, Vec<f64>)) -> Result<f64> {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let mut s = 0.0;
        for (x, w) in rule.0.iter().zip(&rule.1) {
            s += w * integrand(n, mid + 0.5 * h * x)?;
        }
        total += 0.5 * h * s;
    }
    Ok(total)
}

fn segment(n: usize, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> Result<QuadEstimate<f64>> {
    let panels = ((b - a) / PANEL_WIDTH).ceil().max(1.0) as usize;
    let coarse = panels_sum(n, a, b, panels, rule)?;
    let fine = panels_sum(n, a, b, 2 * panels, rule)?;
    Ok(QuadEstimate { value: fine, error_estimate: (fine - coarse).abs() })
}

/// 2π∫₀^R |F_{n,1}(r) − e^{−r²/2}|² r dr with its panel-doubling error.
pub fn delta2_partial_m1(n: usize, r_max: f64) -> Result<QuadEstimate<f64>> {
    if n == 0 || n > 64 {
        return domain(format!("need 1 <= n <= 64, got {n}"));
    }
    if !(r_max > 0.0 && r_max <= EDGES[EDGES.len() - 1]) {
        return domain(format!("R must lie in (0, 1024], got {r_max}"));
    }
    let rule = gauss_legendre_rule(ORDER);
    let mut total = 0.0;
    let mut err = 0.0;
    for w in EDGES.windows(2) {
        if w[0] >= r_max {
            break;
        }
        let q = segment(n, w[0], w[1].min(r_max), &rule)?;
        total += q.value;
        err += q.error_estimate;
    }
    Ok(QuadEstimate { value: total, error_estimate: err })
}

/// Δ⁽²⁾ for m = 1 by radial quadrature.
///
/// The integral is taken over dyadic shells [R, 2R] up to R = 1024. Because
/// |F_{n,1}(r)|² decays like a power of r, the shell increments shrink
/// geometrically; the remaining tail is extrapolated from the last two and
/// the loop stops once it falls below 10⁻¹² of the total. Increments that
/// shrink by less than 2^{−0.2} over three consecutive shells mean the
/// integral diverges, which happens for n ≤ 2.
pub fn delta2_numeric_m1(n: usize) -> Result<QuadResult> {
    if n == 0 || n > 64 {
        return domain(format!("need 1 <= n <= 64, got {n}"));
    }
    let rule = gauss_legendre_rule(ORDER);
    let mut total = 0.0;
    let mut err = 0.0;
    let mut incs: Vec<f64> = Vec::new();
    let mut radius = 0.0;
    let mut tail = f64::NAN;
    let mut slow = 0;
    for w in EDGES.windows(2) {
        let q = segment(n, w[0], w[1], &rule)?;
        total += q.value;
        err += q.error_estimate;
        incs.push(q.value);
        radius = w[1];
        if incs.len() < 3 {
            continue;
        }
        let (d1, d2) = (incs[incs.len() - 2], incs[incs.len() - 1]);
        let rho = if d1 > 0.0 { d2 / d1 } else { 0.0 };
        if rho >= DIVERGENCE_RATIO {
            slow += 1;
            if slow == 3 || radius >= EDGES[EDGES.len() - 1] {
                return Err(Error::Convergence(format!(
                    "radial integral diverges for n = {n}: shell increments shrink by {rho:.3} per doubling"
                )));
            }
            continue;
        }
        slow = 0;
        tail = d2 * rho / (1.0 - rho);
        if tail <= TAIL_REL * total {
            break;
        }
    }
    let sq = total + tail;
    let value = sq.sqrt();
    let error_estimate = if value > 0.0 { err / (2.0 * value) } else { err.sqrt() };
    Ok(QuadResult { value, error_estimate, truncation_radius: radius, tail_estimate: tail })
}
