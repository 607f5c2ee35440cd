use std::f64::consts::PI;

use serde::Serialize;

use super::constants::{c1_limit, c2_limit, constants, ConstantsLedger};
use super::tables::{cm_for, gamma_for};
use super::theta::{ln_lambda3, ln_theta0, ln_theta1, ln_theta2, ln_theta3, lambda1, lambda2};
use crate::error::Result;
use crate::numerics::{ln_gamma, LogReal};

/// One inequality family checked over a grid. Margins are relative
/// ((rhs − lhs)/|rhs|) for plain reals and ln rhs − ln lhs for log-domain
/// quantities; a negative margin is a failure.
#[derive(Clone, Debug, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub checked: usize,
    pub failures: usize,
    pub min_margin: f64,
    pub worst_at: String,
    /// Informational checks are reported but do not count towards `passed`.
    pub informational: bool,
    pub passed: bool,
}

impl InequalityCheck {
    fn new(name: &str) -> Self {
        InequalityCheck {
            name: name.to_string(),
            checked: 0,
            failures: 0,
            min_margin: f64::INFINITY,
            worst_at: String::new(),
            informational: false,
            passed: true,
        }
    }

    fn record(&mut self, margin: f64, at: impl FnOnce() -> String) {
        self.checked += 1;
        if !(margin >= 0.0) {
            self.failures += 1;
            self.passed = false;
        }
        if margin < self.min_margin || margin.is_nan() {
            self.min_margin = margin;
            self.worst_at = at();
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificationReport {
    pub checks: Vec<InequalityCheck>,
    pub passed: bool,
}

impl CertificationReport {
    pub fn get(&self, name: &str) -> Option<&InequalityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// All m ≤ 200 plus 120 log-spaced values up to 10⁴.
pub fn m_grid() -> Vec<usize> {
    let mut ms: Vec<usize> = (3..=200).collect();
    let (a, b) = (200f64.ln(), 1e4f64.ln());
    for j in 1..=120 {
        ms.push((a + (b - a) * j as f64 / 120.0).exp().round() as usize);
    }
    ms.dedup();
    ms
}

fn rel(lhs: f64, rhs: f64) -> f64 {
    (rhs - lhs) / rhs.abs()
}

/// Margin of (Υ₁): √(c₁⁻¹(1+log m)Υ₁) ≥ 34m.
pub fn upsilon1_margin(k: &ConstantsLedger) -> f64 {
    (k.n_scale() - 34.0 * k.m as f64) / (34.0 * k.m as f64)
}

/// Margin of (Υ₂): c₁Υ₂√(m+1)/(c₂(1+log m)^{1/4}) ≤ Υ₁/1500.
pub fn upsilon2_margin(k: &ConstantsLedger) -> f64 {
    let m = k.m as f64;
    let lhs = k.c1 * k.ups2 * (m + 1.0).sqrt() / (k.c2 * (1.0 + m.ln()).powf(0.25));
    rel(lhs, k.ups1 / 1500.0)
}

fn ln_theta0_envelope(k: &ConstantsLedger, big_n: f64) -> f64 {
    let m = k.m as f64;
    -0.5 * PI.ln() - big_n * m.ln() * (1.0 - (1.0 + m.ln()).ln() / m.ln())
}

fn ln_theta3_envelope(k: &ConstantsLedger, big_n: f64, gamma: f64) -> f64 {
    let lm = 1.0 + (k.m as f64).ln();
    k.c5.ln() - (1.0 - 2.0 / (17.0 * gamma) - 1.0 / (gamma * gamma)) * k.c1 * big_n * big_n / lm
}

fn ln_theta4_first(k: &ConstantsLedger, big_n: f64, gamma: f64) -> f64 {
    let m = k.m as f64;
    let lm = 1.0 + m.ln();
    k.c5.ln() + 0.5 * m * big_n.ln()
        - (1.0 - 1.0 / (1500.0 * gamma * gamma)) * k.c2 * big_n * big_n / ((m + 1.0).sqrt() * lm.powf(0.75))
}

fn ln_theta4_second(k: &ConstantsLedger, big_n: f64, gamma: f64) -> f64 {
    let lm = 1.0 + (k.m as f64).ln();
    let coef = (13.0 * gamma).sqrt() - k.c13 / gamma - k.c14 / gamma.powf(1.5);
    k.c5.ln() - coef * k.c2 * big_n.powf(1.5) / lm.sqrt()
}

fn ln_tail_reference(k: &ConstantsLedger, big_n: f64) -> Result<f64> {
    let lm = 1.0 + (k.m as f64).ln();
    Ok(0.011f64.ln() + big_n * lm.ln() + 0.5 * big_n - 0.5 * big_n.ln() - ln_gamma(big_n + 1.0)?)
}

fn ln_theta0_upper(k: &ConstantsLedger, big_n: f64) -> f64 {
    let m = k.m as f64;
    -0.5 * m * big_n.ln() - 12.0 * m * (m.ln() - 0.26) - 0.5 * PI.ln() - m * k.c16.ln()
}

fn ln_tail_sum(k: &ConstantsLedger, big_n: f64) -> Result<f64> {
    let s = LogReal::from_ln(ln_theta1(k, big_n)?)
        + LogReal::from_ln(ln_theta2(k, big_n))
        + LogReal::from_ln(ln_theta3(k, big_n));
    Ok(s.ln_abs())
}

pub fn certify_inequalities() -> Result<CertificationReport> {
    let mut ups1 = InequalityCheck::new("upsilon1");
    let mut ups2 = InequalityCheck::new("upsilon2");
    let mut th0 = InequalityCheck::new("theta0_envelope");
    let mut th3 = InequalityCheck::new("theta1_envelope");
    let mut th4a = InequalityCheck::new("theta2_envelope_gaussian");
    let mut th4b = InequalityCheck::new("theta2_envelope_n32");
    let mut tail = InequalityCheck::new("tail_sum_reference");
    let mut dom = InequalityCheck::new("tail_domination");
    let mut th0u = InequalityCheck::new("theta0_upper");
    let mut eps0 = InequalityCheck::new("eps0");
    let mut lam = InequalityCheck::new("lambda_ordering");

    for m in m_grid() {
        let k = constants(m)?;
        let mf = m as f64;
        ups1.record(upsilon1_margin(&k), || format!("m={m}"));
        ups2.record(upsilon2_margin(&k), || format!("m={m}"));
        eps0.record(rel(k.eps0, 0.041), || format!("m={m}"));

        for j in 0..12 {
            let big_n = (5.0 * mf * 1.6f64.powi(j)).ceil();
            th0.record(ln_theta0_envelope(&k, big_n) - ln_theta0(&k, big_n)?, || format!("m={m} N={big_n}"));
        }

        let gamma = gamma_for(m).expect("m >= 3");
        for f in [1.0, 1.25, 2.0, 4.0, 10.0] {
            let big_n = gamma * k.n_scale() * f;
            let at = || format!("m={m} N={big_n:.2}");
            th3.record(ln_theta3_envelope(&k, big_n, gamma) - ln_theta1(&k, big_n)?, at);
            let first = ln_theta4_first(&k, big_n, gamma);
            th4a.record(first - ln_theta2(&k, big_n), at);
            th4b.record(ln_theta4_second(&k, big_n, gamma) - first, at);
        }

        let (big_m, cm) = cm_for(m).expect("m >= 3");
        for f in [1.0, 1.5, 3.0, 10.0] {
            let big_n = cm * mf * (1.0 + mf.ln()).sqrt() * f;
            let at = || format!("m={m} M={big_m} N={big_n:.2}");
            let ts = ln_tail_sum(&k, big_n)?;
            let t0 = ln_theta0(&k, big_n)?;
            tail.record(ln_tail_reference(&k, big_n)? - ts, at);
            dom.record((25e-5f64).ln() + t0 - ts, at);
            th0u.record(ln_theta0_upper(&k, big_n) - t0, at);
        }

        let mut big_n = 4.0 * mf * 1.01;
        while big_n < 1e6 {
            let l1 = lambda1(&k, big_n).ln();
            let l2 = lambda2(&k, big_n).ln();
            let l3 = ln_lambda3(&k, big_n)?;
            lam.record((l2 - l1).min(l3 - l2), || format!("m={m} N={big_n:.2}"));
            big_n *= 2.0;
        }
    }

    let mut limits = InequalityCheck::new("c_limits");
    limits.record(0.02 - (c1_limit() - 0.0605).abs() / 0.0605, || "c1_hat".into());
    limits.record(0.02 - (c2_limit() - 0.119).abs() / 0.119, || "c2_hat".into());

    let k4 = constants(10_000)?;
    let mut at_1e4 = InequalityCheck::new("c_values_at_m_1e4");
    at_1e4.informational = true;
    at_1e4.record(0.02 - (k4.c1 - 0.0605).abs() / 0.0605, || "c1(1e4)".into());
    at_1e4.record(0.02 - (k4.c2 - 0.119).abs() / 0.119, || "c2(1e4)".into());

    let checks = vec![ups1, ups2, th0, th3, th4a, th4b, tail, dom, th0u, eps0, limits, at_1e4, lam];
    let passed = checks.iter().all(|c| c.passed || c.informational);
    Ok(CertificationReport { checks, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upsilon1_at_3() {
        assert!(upsilon1_margin(&constants(3).unwrap()) >= 0.0);
    }

    #[test]
    fn tail_domination_m3_n637() {
        let k = constants(3).unwrap();
        let big_n = 637.0;
        let ts = ln_tail_sum(&k, big_n).unwrap();
        assert!(ts <= ln_tail_reference(&k, big_n).unwrap());
        assert!(ts <= (25e-5f64).ln() + ln_theta0(&k, big_n).unwrap());
    }

    #[test]
    fn grid_covers_range() {
        let g = m_grid();
        assert_eq!(g[0], 3);
        assert_eq!(*g.last().unwrap(), 10_000);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn report_shape() {
        let r = certify_inequalities().unwrap();
        for name in ["upsilon1", "theta0_envelope", "theta1_envelope", "tail_domination", "eps0", "c_limits"] {
            let c = r.get(name).unwrap();
            assert!(c.passed, "{name}: {c:?}");
        }
        // the (Υ₂) window around m ∈ [446, 1042] is a known failure
        let u2 = r.get("upsilon2").unwrap();
        assert!(!u2.passed);
        assert!(r.get("c_values_at_m_1e4").unwrap().informational);
    }
}
