use serde::Serialize;

use super::haar::{mc_moments, power_traces, TraceSample};
use crate::error::{domain, Result};
use crate::spectral::laplace_transform;
use crate::trigpoly::{a_functional, TrigPoly};
use num_complex::Complex64;

#[derive(Clone, Debug, Serialize)]
pub struct LaplaceMc {
    pub n: usize,
    pub reps: usize,
    /// Monte Carlo mean of e^{Tr f(U)}.
    pub mc: f64,
    pub se: f64,
    /// Toeplitz value of E_n[e^{Tr f}].
    pub exact: f64,
    /// exp(A(f)).
    pub bound: f64,
    /// mc ≤ bound·(1 + 5·se/mc).
    pub pass: bool,
}

/// One-sided Monte Carlo check of E_n[e^{Tr f}] ≤ exp(n f̂₀ + A(f)); here
/// f̂₀ = 0 and Tr f(U) = Σ_k Re(ζ_k T_k) = ⟨ξ, X⟩.
pub fn laplace_mc(f: &TrigPoly, n: usize, reps: usize, seed: u64) -> Result<LaplaceMc> {
    if n == 0 || reps < 2 {
        return domain("need n >= 1 and reps >= 2");
    }
    let zeta = f.zeta().to_vec();
    let m = zeta.len();
    let acc = mc_moments(n, reps, seed, 1, |u, o| {
        let t = TraceSample::from_power_traces(n, &power_traces(u, m));
        let tr: f64 = zeta.iter().zip(&t.traces).map(|(z, tk)| (z * tk).re).sum();
        o[0] = tr.exp();
    })?;
    let se = acc.se()[0];
    let mc = acc.mean[0];
    let bound = a_functional(f, Complex64::new(1.0, 0.0)).re.exp();
    let exact = laplace_transform(f, n)?.value.to_real();
    Ok(LaplaceMc { n, reps, mc, se, exact, bound, pass: mc <= bound * (1.0 + 5.0 * se / mc) })
}

#[derive(Clone, Debug, Serialize)]
pub struct LdTailMc {
    pub n: usize,
    pub m: usize,
    pub l: f64,
    pub reps: usize,
    /// Empirical P[X ∉ [−L/2, L/2]^{2m}].
    pub probability: f64,
    pub se: f64,
    /// 4m e^{−L²/8}.
    pub bound: f64,
    pub pass: bool,
}

pub fn ld_tail_mc(n: usize, m: usize, l: f64, reps: usize, seed: u64) -> Result<LdTailMc> {
    if n == 0 || m == 0 || !(l > 0.0) || reps < 2 {
        return domain("need n, m >= 1, L > 0 and reps >= 2");
    }
    let acc = mc_moments(n, reps, seed, 1, |u, o| {
        let t = TraceSample::from_power_traces(n, &power_traces(u, m));
        o[0] = if t.x().iter().any(|x| x.abs() > l / 2.0) { 1.0 } else { 0.0 };
    })?;
    let p = acc.mean[0];
    let se = acc.se()[0];
    let bound = 4.0 * m as f64 * (-l * l / 8.0).exp();
    // relative slack 5·SE/p, i.e. an absolute slack of 5·SE·bound/p
    let pass = p == 0.0 || p <= bound * (1.0 + 5.0 * se / p);
    Ok(LdTailMc { n, m, l, reps, probability: p, se, bound, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::replica_rng;
    use crate::trigpoly::{poly_from_xi, XiVector};
    use rand::Rng;

    #[test]
    fn laplace_mc_matches_toeplitz() {
        let mut rng = replica_rng(77, 0);
        let xi: Vec<f64> = (0..4).map(|_| rng.random::<f64>() - 0.5).collect();
        let xi = XiVector::new(xi).unwrap();
        let xi = xi.scaled(0.8 / xi.norm());
        let r = laplace_mc(&poly_from_xi(&xi), 6, 40_000, 3).unwrap();
        assert!((r.mc - r.exact).abs() < 5.0 * r.se, "{r:?}");
        assert!(r.pass && r.exact <= r.bound);
    }

    #[test]
    fn ld_tails() {
        for l in [4.0, 6.0] {
            let r = ld_tail_mc(16, 3, l, 40_000, 9).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }
}
