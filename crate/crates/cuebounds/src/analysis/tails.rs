use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use statrs::function::gamma::checked_gamma_ur;

use super::qf::QuadraticFormData;
use super::MarginCheck;
use crate::bounds::constants::{c0, constants, ln_omega, ConstantsLedger};
use crate::bounds::theta::{lambda1, lambda2, ln_lambda3};
use crate::error::{domain, inapplicable, Error, Result};
use crate::montecarlo::haar::mc_moments;
use crate::montecarlo::{ld_tail_mc, power_traces, replica_rng};
use crate::numerics::ln_gamma;
use crate::spectral::{char_fn, fcoeff_bound_check, j1_diagnostics, toeplitz_det, SymbolCoeffs};
use crate::trigpoly::{hilbert_transform, poly_from_xi, XiVector};

/// Regime-4 samples stop at this norm.
pub const NORM_CAP: f64 = 1e3;
/// Replicas for the Monte Carlo checks inside the suite.
pub const SUITE_REPS: usize = 10_000;
/// Largest n for the quadratic-form Monte Carlo check.
pub const QF_MC_MAX_N: usize = 16;

fn lm(m: usize) -> f64 {
    1.0 + (m as f64).ln()
}

/// ln of 4πe(1 + 1/√3).
fn ln_tb1_c() -> f64 {
    (4.0 * PI * E * (1.0 + 1.0 / 3f64.sqrt())).ln()
}

/// ln of c₈²m⁴ e^{2√(2(1+log m))r} ((1+log m)/2)^{2N} r^{4N} / Γ(N+1)⁴ · e^{−r²}.
pub fn ln_ga_envelope(k: &ConstantsLedger, big_n: f64, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let l = lm(k.m);
    Ok(2.0 * k.c8.ln() + 4.0 * (k.m as f64).ln() + 2.0 * (2.0 * l).sqrt() * r + 2.0 * big_n * (l / 2.0).ln()
        + 4.0 * big_n * r.ln()
        - 4.0 * ln_gamma(big_n + 1.0)?
        - r * r)
}

/// ln of the |F| bound for ‖ξ‖ ≥ Λ₂.
pub fn ln_bd1(k: &ConstantsLedger, big_n: f64) -> f64 {
    k.c9 - k.c1 * big_n * big_n / lm(k.m)
}

/// ln of the |F| bound for Λ₁ ≤ ‖ξ‖ ≤ Λ₂.
pub fn ln_bd2(k: &ConstantsLedger, big_n: f64) -> f64 {
    let m = k.m as f64;
    k.c9 - k.c2 * big_n * big_n / ((m + 1.0).sqrt() * lm(k.m).powf(0.75))
}

/// ln of Υ₃^{N/2} c₁₅^{2n} N^{N/4} / r^{N/2}, the |F|² tail bound.
pub fn ln_had(k: &ConstantsLedger, n: usize, r: f64) -> f64 {
    let big_n = n as f64 / k.m as f64;
    0.5 * big_n * k.ups3.ln() + 2.0 * n as f64 * k.c15.ln() + 0.25 * big_n * big_n.ln() - 0.5 * big_n * r.ln()
}

/// ln of cⁿnⁿ / r^{n/(m+1)}, the Van der Corput |F|² tail bound.
pub fn ln_tb1(n: usize, m: usize, r: f64) -> f64 {
    let nf = n as f64;
    nf * ln_tb1_c() + nf * nf.ln() - nf / (m as f64 + 1.0) * r.ln()
}

/// bound − |F(ξ)|² for the |F|² tail bound with the N^{N/4} factor. Needs m ≥ 3.
pub fn had_margin(n: usize, xi: &XiVector) -> Result<f64> {
    let k = constants(xi.m())?;
    let f = char_fn(xi, n)?.value.norm_sqr();
    Ok(ln_had(&k, n, xi.norm()).exp() - f)
}

/// bound − |F(ξ)|² for the Van der Corput tail bound. Needs m, n ≥ 3.
pub fn tb1_margin(n: usize, xi: &XiVector) -> Result<f64> {
    if n < 3 || xi.m() < 3 {
        return inapplicable("the Van der Corput tail bound needs m, n >= 3");
    }
    let f = char_fn(xi, n)?.value.norm_sqr();
    Ok(ln_tb1(n, xi.m(), xi.norm()).exp() - f)
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussianTailRow {
    pub m: usize,
    pub lambda_sq: f64,
    /// ∫_{‖ξ‖≥Λ} e^{−‖ξ‖²} dξ = π^m Q(m, Λ²).
    pub exact: f64,
    /// Ω_m e^{−Λ²}/(Λ² − m).
    pub bound: f64,
    /// (bound − exact)/bound.
    pub margin: f64,
}

pub fn gaussian_tail_check(m: usize, lambda_sq: f64) -> Result<GaussianTailRow> {
    if m == 0 || !(lambda_sq > m as f64) || !lambda_sq.is_finite() {
        return domain(format!("need Λ² > m >= 1, got Λ² = {lambda_sq}, m = {m}"));
    }
    let q = checked_gamma_ur(m as f64, lambda_sq).map_err(|e| Error::Numerical(e.to_string()))?;
    if !(q > 0.0) {
        return Err(Error::Numerical(format!("Q({m}, {lambda_sq}) underflows")));
    }
    let ln_exact = m as f64 * PI.ln() + q.ln();
    let ln_bound = ln_omega(m) - lambda_sq - (lambda_sq - m as f64).ln();
    Ok(GaussianTailRow {
        m,
        lambda_sq,
        exact: ln_exact.exp(),
        bound: ln_bound.exp(),
        margin: -(ln_exact - ln_bound).exp_m1(),
    })
}

/// Λ² = m + δ over δ ∈ {1/4, …, 128} and m ∈ {1, 2, 3, 4, 6, 10}.
pub fn gaussian_tail_grid() -> Result<MarginCheck> {
    let mut c = MarginCheck::new("gaussian_tail");
    for m in [1usize, 2, 3, 4, 6, 10] {
        for j in -2..=7 {
            let ls = m as f64 + 2f64.powi(j);
            let row = gaussian_tail_check(m, ls)?;
            c.record(row.margin, 1.0, false, || format!("m={m} Λ²={ls}"));
        }
    }
    Ok(c)
}

fn nu(k: &ConstantsLedger, big_n: f64, norm: f64, nu_star: f64) -> f64 {
    nu_star * big_n / ((k.m as f64 + 1.0).sqrt() * lm(k.m).powf(0.25) * norm)
}

fn check_nu_star(nu_star: f64) -> Result<()> {
    if !(nu_star > 0.0 && nu_star <= c0()) {
        return domain(format!("ν* must lie in (0, c0], got {nu_star}"));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct Est2Row {
    pub n: usize,
    pub m: usize,
    pub norm: f64,
    pub nu: f64,
    /// ln E_n[exp(−2Σ Im g(θ_j + iνh(θ_j)/n))], exact via a Toeplitz determinant.
    pub ln_lhs: f64,
    pub ln_rhs: f64,
    /// ln_rhs − ln_lhs.
    pub margin: f64,
}

/// The contour-shift Laplace bound. The left side is the Toeplitz determinant
/// of e^{f}, f(θ) = −2 Im g(θ + iνh(θ)/n).
pub fn est2_check(n: usize, xi: &XiVector, nu_star: f64) -> Result<Est2Row> {
    check_nu_star(nu_star)?;
    let m = xi.m();
    let k = constants(m)?;
    let norm = xi.norm();
    if n == 0 || norm == 0.0 {
        return domain("need n >= 1 and ξ ≠ 0");
    }
    let big_n = n as f64 / m as f64;
    let v = nu(&k, big_n, norm, nu_star);
    let pair = hilbert_transform(&poly_from_xi(xi));
    let shift = v / n as f64;
    let f = |t: f64| -> Complex64 {
        let z = Complex64::new(t, shift * pair.h.eval(t));
        let g = pair.g.eval_analytic(z, 0).expect("order 0");
        Complex64::new((-2.0 * g.im).exp(), 0.0)
    };
    let w = SymbolCoeffs::from_samples(f, (n - 1).max(1), 0.0)?;
    let d = toeplitz_det(&w, n)?;
    if d.is_zero() || d.phase.re <= 0.0 {
        return Err(Error::Numerical("Toeplitz determinant of a positive symbol is not positive".into()));
    }
    let ln_lhs = d.magnitude().ln_abs();
    let inner = 1.0 - k.c10 - 4.0 * k.c11 * nu_star * norm * lm(m).powf(0.75) / (big_n * (m as f64 + 1.0).sqrt());
    let ln_rhs = -2.0 * v * norm * norm * inner;
    Ok(Est2Row { n, m, norm, nu: v, ln_lhs, ln_rhs, margin: ln_rhs - ln_lhs })
}

#[derive(Clone, Debug, Serialize)]
pub struct QfMcRow {
    pub n: usize,
    pub m: usize,
    pub norm: f64,
    pub nu: f64,
    pub reps: usize,
    /// Monte Carlo mean of exp((ν²/n²) Σ_{i,j} H(θ_i, θ_j)).
    pub mc: f64,
    pub se: f64,
    /// exp(2c₉ + ν*²N²(1+ε₀)/((m+1)√(1+log m))).
    pub rhs: f64,
    /// (rhs − (mc − 5·se))/rhs.
    pub margin: f64,
    pub pass: bool,
}

/// One-sided Monte Carlo check of the quadratic-form Laplace bound. Σ H is
/// evaluated through the quadratic form in Tr U^p, p < 2m.
pub fn qf_mc_check(n: usize, xi: &XiVector, nu_star: f64, reps: usize, seed: u64) -> Result<QfMcRow> {
    check_nu_star(nu_star)?;
    let m = xi.m();
    let k = constants(m)?;
    let norm = xi.norm();
    if n == 0 || norm == 0.0 || reps < 2 {
        return domain("need n >= 1, ξ ≠ 0 and reps >= 2");
    }
    let big_n = n as f64 / m as f64;
    let v = nu(&k, big_n, norm, nu_star);
    let delta = v * v / (n * n) as f64;
    let qf = QuadraticFormData::new(xi);
    let acc = mc_moments(n, reps, seed, 1, |u, o| {
        let raw = power_traces(u, 2 * m - 1);
        o[0] = (delta * qf.evaluate_traces(n, &raw)).exp();
    })?;
    let (mc, se) = (acc.mean[0], acc.se()[0]);
    let rhs = (2.0 * k.c9 + nu_star * nu_star * big_n * big_n * (1.0 + k.eps0) / ((m as f64 + 1.0) * lm(m).sqrt())).exp();
    let margin = (rhs - (mc - 5.0 * se)) / rhs;
    Ok(QfMcRow { n, m, norm, nu: v, reps, mc, se, rhs, margin, pass: margin >= 0.0 })
}

#[derive(Clone, Debug, Serialize)]
pub struct TailSuiteReport {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "N")]
    pub big_n: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub ln_lambda3: f64,
    pub checks: Vec<MarginCheck>,
    pub passed: bool,
}

impl TailSuiteReport {
    pub fn get(&self, name: &str) -> Option<&MarginCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// A uniform unit vector in R^{2m} from replica stream `idx` of `seed`.
pub fn random_direction(m: usize, seed: u64, idx: u64) -> Vec<f64> {
    let mut rng = replica_rng(seed, idx);
    loop {
        let v: Vec<f64> = (0..2 * m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if s > 1e-3 {
            return v.into_iter().map(|x| x / s).collect();
        }
    }
}

/// Norms for one regime: stratified in [lo, hi], log-spaced when `log`.
fn regime_norms(lo: f64, hi: f64, count: usize, log: bool) -> Vec<f64> {
    (0..count)
        .map(|j| {
            let t = (j as f64 + 0.5) / count as f64;
            if log {
                (lo.ln() + t * (hi.ln() - lo.ln())).exp()
            } else {
                lo + t * (hi - lo)
            }
        })
        .collect()
}

/// Margins of every tail inequality at one (n, m): the Gaussian-approximation
/// envelope and the Fredholm gap for ‖ξ‖ ≤ Λ₁, the intermediate bounds on
/// [Λ₁, Λ₂] and beyond Λ₂, the two large-‖ξ‖ tail bounds everywhere, the
/// Gaussian tail lemma against the incomplete gamma function, the large
/// deviation bound, and the two Laplace bounds of the intermediate regime.
///
/// Needs m ≥ 3, N > 4m and n ≤ 64.
pub fn tail_inequality_suite(n: usize, m: usize, xi_samples: usize, seed: u64) -> Result<TailSuiteReport> {
    if n > 64 {
        return domain(format!("exact |F| is computed for n <= 64, got {n}"));
    }
    if xi_samples == 0 {
        return domain("need at least one ξ per regime");
    }
    let k = constants(m)?;
    let mf = m as f64;
    let big_n = n as f64 / mf;
    if big_n <= 4.0 * mf {
        return inapplicable(format!("N > 4m violated (N = {big_n}, m = {m})"));
    }
    let l1 = lambda1(&k, big_n);
    let l2 = lambda2(&k, big_n);
    let ln_l3 = ln_lambda3(&k, big_n)?;
    let l3 = ln_l3.exp().min(NORM_CAP);

    let mut ga = MarginCheck::new("ga_envelope");
    let mut ga_j1 = MarginCheck::new("ga_j1_envelope");
    let mut gap = MarginCheck::new("j1_gap");
    let mut fco = MarginCheck::new("fcoeff");
    let mut bd2 = MarginCheck::new("bd2");
    let mut bd1 = MarginCheck::new("bd1");
    let mut had = MarginCheck::new("had");
    let mut tb1 = MarginCheck::new("tb1");
    let mut est2 = MarginCheck::new("est2");

    let mut samples: Vec<(usize, f64)> = vec![(1, 0.0)];
    samples.extend(regime_norms(0.0, l1, xi_samples, false).into_iter().map(|r| (1, r)));
    samples.extend(regime_norms(l1, l2, xi_samples, false).into_iter().map(|r| (2, r)));
    samples.extend(regime_norms(l2, l3, xi_samples, true).into_iter().map(|r| (3, r)));
    if l3 < NORM_CAP {
        samples.extend(regime_norms(l3, NORM_CAP, xi_samples, true).into_iter().map(|r| (4, r)));
    }

    let ln_b1 = ln_bd1(&k, big_n);
    let ln_b2 = ln_bd2(&k, big_n);
    for (idx, &(regime, r)) in samples.iter().enumerate() {
        let dir = random_direction(m, seed, idx as u64);
        let xi = XiVector::new(dir.iter().map(|x| x * r).collect())?;
        let f = char_fn(&xi, n)?.value;
        let abs_f = f.norm();
        let at = || format!("regime={regime} |ξ|={r:.4e}");
        if regime == 1 {
            let g = (-r * r / 2.0).exp();
            let lhs = (f - g).norm_sqr();
            let b = ln_ga_envelope(&k, big_n, r)?.exp();
            ga.record(b - lhs, 1.0, b >= 4.0, at);
            if let Ok(d) = j1_diagnostics(&xi, n) {
                let ratio = (r * r / 2.0).exp();
                let actual = (f * ratio - 1.0).norm();
                let bound = d.fredholm_gap_bound.to_real();
                gap.record(bound - actual, ratio, bound >= 1.0 + ratio, at);
                if let Some(env) = d.ga_envelope {
                    let e = env.to_real();
                    ga_j1.record(e - actual, ratio, e >= 1.0 + ratio, at);
                }
                if r > 0.0 {
                    let first = (2.0 * mf * d.rho).floor() as usize + 1;
                    let ks: Vec<usize> = (first..first + 2 * m).collect();
                    fco.record(fcoeff_bound_check(&xi, &ks)?, 1.0, false, at);
                }
            }
        }
        if regime == 2 {
            let b = ln_b2.exp();
            bd2.record(b - abs_f, 1.0, b >= 1.0, at);
        }
        if regime >= 3 {
            let b = ln_b1.exp();
            bd1.record(b - abs_f, 1.0, b >= 1.0, at);
        }
        if r > 0.0 {
            let hb = ln_had(&k, n, r).exp();
            had.record(hb - abs_f * abs_f, 1.0, hb >= 1.0, at);
            let tb = ln_tb1(n, m, r).exp();
            tb1.record(tb - abs_f * abs_f, 1.0, tb >= 1.0, at);
        }
        if r > 0.0 && regime <= 2 {
            let row = est2_check(n, &xi, c0())?;
            est2.record(row.margin, row.ln_rhs.abs().max(1.0), false, at);
        }
    }

    let mut gt = gaussian_tail_grid()?;
    gt.name = "gaussian_tail".into();
    if l1 * l1 > mf {
        let row = gaussian_tail_check(m, l1 * l1)?;
        gt.record(row.margin, 1.0, false, || format!("m={m} Λ₁²={:.4}", l1 * l1));
    }

    let mut ld = MarginCheck::new("ld_tail");
    for (j, l) in [2.0 * 3f64.sqrt(), 4.0, 5.0, 6.0].into_iter().enumerate() {
        let t = ld_tail_mc(n, m, l, SUITE_REPS, seed.wrapping_add(1 + j as u64))?;
        ld.record(t.bound - (t.probability - 5.0 * t.se), 1.0, t.bound >= 1.0, || format!("L={l:.3}"));
    }

    let mut qmc = MarginCheck::new("qf_mc");
    let qn = n.min(QF_MC_MAX_N);
    for (j, r) in [0.5, l1, 10.0].into_iter().enumerate() {
        let dir = random_direction(m, seed ^ 0x51F0, j as u64);
        let xi = XiVector::new(dir.iter().map(|x| x * r).collect())?;
        let row = qf_mc_check(qn, &xi, c0(), SUITE_REPS, seed.wrapping_add(100 + j as u64))?;
        qmc.record(row.margin, 1.0, false, || format!("n={qn} |ξ|={r:.3}"));
    }

    let checks = vec![ga, ga_j1, gap, fco, bd2, bd1, had, tb1, gt, ld, qmc, est2];
    let passed = checks.iter().all(|c| c.passed);
    Ok(TailSuiteReport { n, m, big_n, lambda1: l1, lambda2: l2, ln_lambda3: ln_l3, checks, passed })
}
