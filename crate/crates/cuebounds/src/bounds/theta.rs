use serde::Serialize;

use super::constants::{constants, ConstantsLedger};
use crate::error::{inapplicable, Result};
use crate::numerics::{ln_gamma, LogReal};

/// The four error terms of Θ_{N,m} and the regime thresholds Λ₁ ≤ Λ₂ ≤ Λ₃.
/// Θ¹, Λ₃ and the total need N > 4m and are `None` otherwise.
#[derive(Clone, Debug, Serialize)]
pub struct ThetaBreakdown {
    #[serde(rename = "N")]
    pub big_n: f64,
    pub m: usize,
    pub theta0: LogReal,
    pub theta1: Option<LogReal>,
    pub theta2: LogReal,
    pub theta3: LogReal,
    pub theta: Option<LogReal>,
    pub lambda1: LogReal,
    pub lambda2: LogReal,
    pub lambda3: Option<LogReal>,
}

impl ThetaBreakdown {
    /// Θ, or an applicability error when N ≤ 4m.
    pub fn total(&self) -> Result<LogReal> {
        match self.theta {
            Some(t) => Ok(t),
            None => inapplicable(format!("N > 4m violated (N = {}, m = {})", self.big_n, self.m)),
        }
    }
}

pub fn ln_theta0(k: &ConstantsLedger, big_n: f64) -> Result<f64> {
    let m = k.m as f64;
    let lm = 1.0 + m.ln();
    Ok(2.5 * m.ln() + 0.5 * m * 2f64.ln() + m * m / (4.0 * big_n) + 0.5 * big_n + big_n * lm.ln()
        - 0.5 * big_n.ln()
        - ln_gamma(big_n + 1.0)?)
}

pub fn ln_theta1(k: &ConstantsLedger, big_n: f64) -> Result<f64> {
    let m = k.m as f64;
    if big_n <= 4.0 * m {
        return inapplicable(format!("Theta1 needs N > 4m (N = {big_n}, m = {})", k.m));
    }
    let x = 4.0 * m / big_n;
    let lm = 1.0 + m.ln();
    Ok(k.c5.ln() - k.c9 * x - (1.0 - 2.0 * m / big_n) * (1.0 - x).ln() + k.ups1
        - k.c1 * big_n * (big_n - 4.0 * m) / lm)
}

pub fn ln_theta2(k: &ConstantsLedger, big_n: f64) -> f64 {
    let m = k.m as f64;
    let lm = 1.0 + m.ln();
    k.c5.ln() + 0.5 * m * big_n.ln() + k.ups2 - k.c2 * big_n * big_n / ((m + 1.0).sqrt() * lm.powf(0.75))
}

pub fn ln_theta3(k: &ConstantsLedger, big_n: f64) -> f64 {
    let m = k.m as f64;
    let lm = 1.0 + m.ln();
    -k.c3.ln() - 0.5 * m.ln() - 0.5 * m * big_n.ln() - big_n * big_n / (16.0 * lm)
}

pub fn lambda1(k: &ConstantsLedger, big_n: f64) -> f64 {
    k.c4 * big_n / (1.0 + (k.m as f64).ln()).sqrt()
}

pub fn lambda2(k: &ConstantsLedger, big_n: f64) -> f64 {
    let m = k.m as f64;
    (1.0 - k.c10) * big_n * (m + 1.0).sqrt() / (k.c0 * 8.0 * (1.0 + m.ln()).powf(0.75) * k.c11)
}

pub fn ln_lambda3(k: &ConstantsLedger, big_n: f64) -> Result<f64> {
    let m = k.m as f64;
    if big_n <= 4.0 * m {
        return inapplicable(format!("Lambda3 needs N > 4m (N = {big_n}, m = {})", k.m));
    }
    Ok(-4.0 * k.c9 / big_n
        + 4.0 * m * k.c15.ln()
        + 2.0 / big_n * (big_n / (4.0 * m) - 1.0).ln()
        + k.ups3.ln()
        + 0.5 * big_n.ln()
        + 4.0 * k.c1 * big_n / (1.0 + m.ln()))
}

/// Θ¹ alone; errors when N ≤ 4m.
pub fn theta1_at(big_n: f64, m: usize) -> Result<LogReal> {
    let k = constants(m)?;
    Ok(LogReal::from_ln(ln_theta1(&k, big_n)?))
}

pub fn theta_at(big_n: f64, m: usize) -> Result<ThetaBreakdown> {
    let k = constants(m)?;
    theta_with(&k, big_n)
}

pub fn theta_with(k: &ConstantsLedger, big_n: f64) -> Result<ThetaBreakdown> {
    if !(big_n > 0.0) || !big_n.is_finite() {
        return crate::error::domain(format!("N must be positive, got {big_n}"));
    }
    let theta0 = LogReal::from_ln(ln_theta0(k, big_n)?);
    let theta2 = LogReal::from_ln(ln_theta2(k, big_n));
    let theta3 = LogReal::from_ln(ln_theta3(k, big_n));
    let theta1 = ln_theta1(k, big_n).ok().map(LogReal::from_ln);
    let lambda3 = ln_lambda3(k, big_n).ok().map(LogReal::from_ln);
    let theta = theta1.map(|t1| theta0 + t1 + theta2 + theta3);
    Ok(ThetaBreakdown {
        big_n,
        m: k.m,
        theta0,
        theta1,
        theta2,
        theta3,
        theta,
        lambda1: LogReal::from_real(lambda1(k, big_n)),
        lambda2: LogReal::from_real(lambda2(k, big_n)),
        lambda3,
    })
}

/// Θ at N = n/m.
pub fn theta(n: usize, m: usize) -> Result<ThetaBreakdown> {
    theta_at(n as f64 / m as f64, m)
}

/// Smallest integer N > 4m with Θ⁰_{N,m} ≥ Θ¹_{N,m}, scanning up to `n_max`.
pub fn theta0_theta1_crossing(m: usize, n_max: usize) -> Result<Option<usize>> {
    let k = constants(m)?;
    for big_n in (4 * m + 1)..=n_max {
        let x = big_n as f64;
        if ln_theta0(&k, x)? >= ln_theta1(&k, x)? {
            return Ok(Some(big_n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ln_factorial;

    #[test]
    fn figure1_crossing() {
        let c = theta0_theta1_crossing(3, 5000).unwrap().unwrap();
        assert!((629..=633).contains(&c), "crossing at {c}");
    }

    #[test]
    fn theta1_boundary() {
        assert!(theta1_at(12.0, 3).is_err());
        assert!(theta1_at(12.5, 3).is_ok());
        let t = theta_at(12.0, 3).unwrap();
        assert!(t.theta1.is_none() && t.theta.is_none() && t.lambda3.is_none());
        assert!(matches!(t.total(), Err(crate::Error::Applicability(_))));
    }

    #[test]
    fn theta0_direct_oracle() {
        // integer N: Γ(N+1) = N!
        let (m, n) = (4usize, 90usize);
        let mf = m as f64;
        let nf = n as f64;
        let direct = 2.5 * mf.ln() + mf / 2.0 * 2f64.ln() + mf * mf / (4.0 * nf) + nf / 2.0
            + nf * (1.0 + mf.ln()).ln()
            - 0.5 * nf.ln()
            - ln_factorial(n as u64);
        let t = theta_at(nf, m).unwrap();
        assert!((t.theta0.ln_abs() - direct).abs() < 1e-10 * direct.abs());
    }

    #[test]
    fn sum_of_terms() {
        let t = theta(3000, 3).unwrap();
        let s = t.theta0 + t.theta1.unwrap() + t.theta2 + t.theta3;
        assert!((s.ln_abs() - t.theta.unwrap().ln_abs()).abs() < 1e-12);
    }

    #[test]
    fn dominated_by_theta0_above_threshold() {
        let start = (146.5 * 3.0 * (1.0 + 3f64.ln()).sqrt()).ceil();
        let mut big_n = start;
        while big_n < 20000.0 {
            let t = theta_at(big_n, 3).unwrap();
            let ratio = (t.theta.unwrap().ln_abs() - t.theta0.ln_abs()).exp() - 1.0;
            assert!(ratio <= 25e-5, "N = {big_n}: {ratio}");
            big_n *= 1.3;
        }
    }

    #[test]
    fn lambda_ordering() {
        for m in [3usize, 4, 7, 20, 100] {
            let k = constants(m).unwrap();
            let mut big_n = 4.0 * m as f64 + 0.5;
            while big_n < 1e5 {
                let t = theta_with(&k, big_n).unwrap();
                assert!(t.lambda1 <= t.lambda2, "m={m} N={big_n}");
                assert!(t.lambda2 <= t.lambda3.unwrap(), "m={m} N={big_n}");
                big_n *= 1.7;
            }
        }
    }
}
