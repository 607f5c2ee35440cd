use std::f64::consts::{LN_10, PI};

use serde::Serialize;

use super::constants::{constants, ln_omega};
use super::theta::{theta_with, ThetaBreakdown};
use crate::error::{domain, inapplicable, Error, Result};
use crate::numerics::{ln_gamma, LogReal};

pub const BISECTION_STEPS: usize = 60;

#[derive(Clone, Debug, Serialize)]
pub struct Applicability {
    pub m_ge_3: bool,
    pub n_over_m_gt_4m: bool,
    pub thm_tv_conditions: bool,
    pub tv_uniform_conditions: bool,
    pub w2_conditions: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "N")]
    pub big_n: f64,
    pub theta: ThetaBreakdown,
    pub delta2_bound: LogReal,
    pub delta2_condition_met: bool,
    pub delta1_bound: Option<LogReal>,
    pub delta1_refined: Option<LogReal>,
    /// Cube side length L solving Δ⁽²⁾ = (5/4)L^{2−m}e^{−L²/8}.
    pub l_opt: Option<f64>,
    pub tv_theorem: Option<LogReal>,
    pub tv_uniform: Option<LogReal>,
    /// Smallest available total-variation bound and the route producing it.
    pub tv_bound: Option<LogReal>,
    pub tv_route: Option<String>,
    pub w2_bound: Option<f64>,
    pub applicability: Applicability,
}

/// ln of the threshold 5·2^{−m} m^{1−m/2} e^{−m/2}.
pub fn ln_delta2_threshold(m: usize) -> f64 {
    let m = m as f64;
    5f64.ln() - m * 2f64.ln() + (1.0 - 0.5 * m) * m.ln() - 0.5 * m
}

/// Solves ln Δ = ln(5/4) + (2−m) ln L − L²/8 for L on [2√m, √(8 ln Δ⁻¹)].
pub fn solve_l(ln_delta2: f64, m: usize) -> Result<f64> {
    if ln_delta2 > ln_delta2_threshold(m) {
        return inapplicable("Delta2 above the threshold 5 2^-m m^(1-m/2) e^(-m/2)");
    }
    let mf = m as f64;
    let f = |l: f64| 1.25f64.ln() + (2.0 - mf) * l.ln() - l * l / 8.0 - ln_delta2;
    let mut lo = 2.0 * mf.sqrt();
    let mut hi = (-8.0 * ln_delta2).sqrt();
    if f(lo) < 0.0 || f(hi) > 0.0 {
        return Err(Error::Numerical(format!("Delta3 root not bracketed on [{lo}, {hi}]")));
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Relative residual of the L equation, measured on the log scale.
pub fn l_residual(ln_delta2: f64, m: usize, l: f64) -> f64 {
    let rhs = 1.25f64.ln() + (2.0 - m as f64) * l.ln() - l * l / 8.0;
    ((rhs - ln_delta2).exp() - 1.0).abs()
}

fn ln_delta2_bound(theta: &ThetaBreakdown) -> Result<f64> {
    let m = theta.m as f64;
    Ok(8f64.ln() + 0.5 * ln_omega(theta.m) + 0.5 * m * theta.big_n.ln() + theta.total()?.ln_abs())
}

pub fn delta_chain(n: usize, m: usize) -> Result<BoundReport> {
    if m < 3 {
        return domain(format!("the bound chain needs m >= 3, got {m}"));
    }
    let big_n = n as f64 / m as f64;
    if big_n <= 4.0 * m as f64 {
        return inapplicable(format!("N > 4m violated (N = n/m = {big_n:.4}, 4m = {})", 4 * m));
    }
    let k = constants(m)?;
    let theta = theta_with(&k, big_n)?;
    let ln_d2 = ln_delta2_bound(&theta)?;
    let mf = m as f64;
    let condition = ln_d2 <= ln_delta2_threshold(m);
    let (delta1_bound, delta1_refined, l_opt) = if condition {
        let big_l = (-8.0 * ln_d2).sqrt();
        let d1 = 2f64.ln() + mf * big_l.ln() + ln_d2;
        let l = solve_l(ln_d2, m)?;
        let refined = mf * l.ln() + (1.0 + 4.0 * mf / (l * l)).ln() + ln_d2;
        (Some(LogReal::from_ln(d1)), Some(LogReal::from_ln(refined)), Some(l))
    } else {
        (None, None, None)
    };
    let tv_thm = tv_theorem(n, m);
    let tv_uni = tv_uniform(n).ok().filter(|u| m <= u.m_max).map(|u| u.bound);
    let mut candidates: Vec<(LogReal, &str)> = Vec::new();
    if let Some(v) = delta1_refined {
        candidates.push((v, "delta1_refined"));
    }
    if let Ok(v) = &tv_thm {
        candidates.push((*v, "thm_tv"));
    }
    if let Some(v) = tv_uni {
        candidates.push((v, "tv_uniform"));
    }
    let best = candidates.into_iter().reduce(|a, b| if b.0 < a.0 { b } else { a });
    let w2 = w2_bound(n, m).ok();
    Ok(BoundReport {
        n,
        m,
        big_n,
        theta,
        delta2_bound: LogReal::from_ln(ln_d2),
        delta2_condition_met: condition,
        delta1_bound,
        delta1_refined,
        l_opt,
        tv_theorem: tv_thm.as_ref().ok().copied(),
        tv_uniform: tv_uni,
        tv_bound: best.map(|b| b.0),
        tv_route: best.map(|b| b.1.to_string()),
        w2_bound: w2,
        applicability: Applicability {
            m_ge_3: true,
            n_over_m_gt_4m: true,
            thm_tv_conditions: tv_thm.is_ok(),
            tv_uniform_conditions: tv_uni.is_some(),
            w2_conditions: w2.is_some(),
        },
    })
}

/// Hypothesis threshold N ≥ 146.5·m·√(1+log m).
pub fn thm_tv_threshold(m: usize) -> f64 {
    146.5 * m as f64 * (1.0 + (m as f64).ln()).sqrt()
}

/// The total-variation bound for n ≥ 1911 and N ≥ 146.5·m·√(1+log m).
pub fn tv_theorem(n: usize, m: usize) -> Result<LogReal> {
    if m < 3 {
        return domain(format!("the total-variation theorem is stated for m >= 3, got {m}"));
    }
    if n < 1911 {
        return inapplicable(format!("n >= 1911 violated (n = {n})"));
    }
    let mf = m as f64;
    let big_n = n as f64 / mf;
    let thr = thm_tv_threshold(m);
    if big_n < thr {
        return inapplicable(format!("N >= 146.5 m sqrt(1+log m) violated (N = {big_n:.4}, need {thr:.4})"));
    }
    let ln = 16f64.ln() + 0.5 * ln_omega(m) + 2.5 * mf.ln() + mf * 4f64.ln()
        + big_n / 2.0
        + mf * mf / (4.0 * big_n)
        + mf * (big_n * big_n.ln().sqrt()).ln()
        + big_n * (1.0 + mf.ln()).ln()
        - 0.5 * big_n.ln()
        - ln_gamma(big_n + 1.0)?;
    Ok(LogReal::from_ln(ln))
}

pub const N_ALPHA_CAP: u64 = 1_000_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct TvAlpha {
    pub bound: LogReal,
    pub eps_n: f64,
    pub eps_envelope: f64,
    pub n_alpha: u64,
    pub m: u64,
}

fn n_alpha_condition(n: f64, alpha: f64) -> bool {
    (1.0 - 2.0 * alpha) * n.ln() >= 20.4f64.ln() + 0.5 * n.ln().ln()
}

/// inf{n ≥ 18^{1/α} : n^{1−2α} ≥ 20.4√log n}, by linear scan up to 10⁹.
pub fn n_alpha(alpha: f64) -> Result<u64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return domain(format!("alpha must lie in (0, 1/2), got {alpha}"));
    }
    let start = 18f64.powf(1.0 / alpha).ceil();
    if start > N_ALPHA_CAP as f64 {
        return inapplicable(format!("n_alpha exceeds the scan cap 1e9 (18^(1/alpha) = {start:.3e})"));
    }
    // The condition's log-difference increases once log n > 1/(2(1−2α)); if it
    // still fails at the cap past that point, nothing below the cap satisfies it.
    let cap = N_ALPHA_CAP as f64;
    let turn = (1.0 / (2.0 * (1.0 - 2.0 * alpha))).exp();
    if start >= turn && !n_alpha_condition(cap, alpha) {
        return inapplicable(format!("n_alpha exceeds the scan cap 1e9 for alpha = {alpha}"));
    }
    let mut n = start as u64;
    while n <= N_ALPHA_CAP {
        if n_alpha_condition(n as f64, alpha) {
            return Ok(n);
        }
        n += 1;
    }
    inapplicable(format!("n_alpha exceeds the scan cap 1e9 for alpha = {alpha}"))
}

/// ε_n of the m = ⌊n^α⌋ corollary.
pub fn tv_alpha_eps(n: u64, alpha: f64) -> f64 {
    let nf = n as f64;
    let ln = nf.ln();
    let l1a = (1.0 - alpha) * ln;
    let p = 1.0 - 2.0 * alpha;
    ((0.5 * ln).ln() + 1.5) / l1a + (-p * ln).exp() * (1.0 + (ln.ln() + 0.1144) / (2.0 * l1a))
        + (-2.0 * p * ln).exp() / (4.0 * l1a)
}

/// The α-free envelope of ε_n.
pub fn tv_alpha_eps_envelope(n: u64) -> f64 {
    let ln = (n as f64).ln();
    2.0 * (ln.ln() + 0.8069) / ln + 0.0649 / ln.sqrt() + 0.0012 / (ln * ln)
}

pub fn tv_alpha(n: u64, alpha: f64) -> Result<TvAlpha> {
    let na = n_alpha(alpha)?;
    if n < na {
        return inapplicable(format!("n >= n_alpha violated (n = {n}, n_alpha = {na})"));
    }
    let nf = n as f64;
    let eps = tv_alpha_eps(n, alpha);
    let ln_c = 18f64.ln() + 8.0 * PI - 0.75 * (2.0 * PI).ln();
    let x = (1.0 - alpha) * nf.ln();
    let ln = ln_c + (3.0 * alpha - 1.5) * nf.ln() - (1.0 - eps) * x.exp() * x;
    Ok(TvAlpha {
        bound: LogReal::from_ln(ln),
        eps_n: eps,
        eps_envelope: tv_alpha_eps_envelope(n),
        n_alpha: na,
        m: nf.powf(alpha).floor() as u64,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TvUniform {
    pub m_max: usize,
    pub bound: LogReal,
    pub log10_bound: f64,
    pub eps_n: f64,
}

pub fn tv_uniform_m_max(n: usize) -> usize {
    let nf = n as f64;
    (nf / (41.5 * nf.ln().sqrt())).sqrt().floor() as usize
}

/// The proof-internal ε_n of the uniform bound.
pub fn tv_uniform_eps(n: usize) -> f64 {
    let ln = (n as f64).ln();
    let lln = ln.ln();
    1.0 / (41.5 * ln.sqrt()) + (3.0 - 2.0 * 2f64.ln() + 2.0 * lln) / ln + lln / (41.5 * ln.powf(1.5))
        + 0.5 / (41.5 * ln).powi(2)
}

pub fn tv_uniform(n: usize) -> Result<TvUniform> {
    if n < 4322 {
        return inapplicable(format!("n >= 4322 violated (n = {n})"));
    }
    let nf = n as f64;
    let ln = 0.5 * nf.ln() + 19.4 - 0.93 * nf.sqrt() * nf.ln().powf(1.25);
    Ok(TvUniform {
        m_max: tv_uniform_m_max(n),
        bound: LogReal::from_ln(ln),
        log10_bound: ln / LN_10,
        eps_n: tv_uniform_eps(n),
    })
}

/// Wasserstein-2 bound (√8+√2)(m+1)√m/(3n), valid for n ≥ 2m.
pub fn w2_bound(n: usize, m: usize) -> Result<f64> {
    if m == 0 {
        return domain("m must be positive");
    }
    if n < 2 * m {
        return inapplicable(format!("n >= 2m violated (n = {n}, m = {m})"));
    }
    let mf = m as f64;
    Ok((8f64.sqrt() + 2f64.sqrt()) * (mf + 1.0) * mf.sqrt() / (3.0 * n as f64))
}
