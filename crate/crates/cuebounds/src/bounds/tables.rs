use serde::Serialize;

use super::chain::delta_chain;
use super::constants::{constants, ConstantsLedger};
use super::theta::{ln_theta0, ln_theta1, ln_theta2, ln_theta3};
use crate::error::{domain, Result};

/// Printed c(M) values.
pub const CM_TABLE: [(usize, f64); 11] = [
    (3, 146.5),
    (4, 93.8),
    (5, 71.1),
    (6, 58.66),
    (8, 45.5),
    (12, 34.5),
    (17, 28.8),
    (23, 25.5),
    (30, 23.4),
    (40, 21.64),
    (70, 19.4),
];

/// Printed γ(m) values; the last row covers every m ≥ 70.
pub const GAMMA_TABLE: [(usize, f64); 11] = [
    (3, 5.119),
    (4, 3.806),
    (5, 3.149),
    (6, 2.754),
    (8, 2.30),
    (12, 1.882),
    (17, 1.65),
    (23, 1.507),
    (30, 1.413),
    (40, 1.334),
    (70, 1.230),
];

pub const TABLE_TOL: f64 = 5e-3;

/// γ(m) from the table: the entry of the largest tabulated m' ≤ m.
pub fn gamma_for(m: usize) -> Option<f64> {
    GAMMA_TABLE.iter().rev().find(|(mm, _)| *mm <= m).map(|(_, g)| *g)
}

/// c(M) from the table for the largest tabulated M ≤ m.
pub fn cm_for(m: usize) -> Option<(usize, f64)> {
    CM_TABLE.iter().rev().find(|(mm, _)| *mm <= m).copied()
}

#[derive(Clone, Debug, Serialize)]
pub struct CmRow {
    #[serde(rename = "M")]
    pub big_m: usize,
    pub gamma: f64,
    pub computed: f64,
    pub printed: f64,
    pub rel_err: f64,
    pub within_tol: bool,
}

/// c(M) = γ(M)·M⁻¹·√(c₁(M)⁻¹Υ₁(M)).
pub fn cm_value(big_m: usize, gamma: f64) -> Result<f64> {
    let k = constants(big_m)?;
    Ok(gamma / big_m as f64 * (k.ups1 / k.c1).sqrt())
}

pub fn table_cm() -> Result<Vec<CmRow>> {
    CM_TABLE
        .iter()
        .map(|&(big_m, printed)| {
            let gamma = gamma_for(big_m).expect("table rows share their m values");
            let computed = cm_value(big_m, gamma)?;
            let rel_err = (computed - printed).abs() / printed;
            Ok(CmRow { big_m, gamma, computed, printed, rel_err, within_tol: rel_err <= TABLE_TOL })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaRow {
    pub m: usize,
    pub gamma: f64,
    pub theta: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs − rhs; the right side must also be positive.
    pub slack: f64,
    pub rhs_positive: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaCertificate {
    pub rows: Vec<GammaRow>,
    pub min_slack: f64,
    pub non_increasing: bool,
    pub negative_control: GammaRow,
    pub passed: bool,
}

/// (γ − 2/17 − γ⁻¹)θ versus log(5.12 c₁⁻¹ θ) − 1.48 with θ = √(c₁Υ₁/(1+log m)).
pub fn gamma_row(k: &ConstantsLedger, gamma: f64) -> GammaRow {
    let lm = 1.0 + (k.m as f64).ln();
    let theta = (k.c1 * k.ups1 / lm).sqrt();
    let lhs = (gamma - 2.0 / 17.0 - 1.0 / gamma) * theta;
    let rhs = (5.12 / k.c1 * theta).ln() - 1.48;
    GammaRow { m: k.m, gamma, theta, lhs, rhs, slack: lhs - rhs, rhs_positive: rhs > 0.0 }
}

pub fn gamma_table_certify() -> Result<GammaCertificate> {
    let rows = GAMMA_TABLE
        .iter()
        .map(|&(m, g)| Ok(gamma_row(&constants(m)?, g)))
        .collect::<Result<Vec<_>>>()?;
    let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let non_increasing = GAMMA_TABLE.windows(2).all(|w| w[1].1 <= w[0].1);
    let negative_control = gamma_row(&constants(3)?, 1.0);
    let passed =
        min_slack >= 0.0 && rows.iter().all(|r| r.rhs_positive) && non_increasing && negative_control.slack < 0.0;
    Ok(GammaCertificate { rows, min_slack, non_increasing, negative_control, passed })
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaCurveRow {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: f64,
    pub log10_theta0: f64,
    pub log10_theta1: Option<f64>,
    pub log10_theta2: f64,
    pub log10_theta3: f64,
}

/// Θ⁰…Θ³ along n = start, start+step, …, ≤ end.
pub fn theta_curve(m: usize, start: usize, end: usize, step: usize) -> Result<Vec<ThetaCurveRow>> {
    if step == 0 || start == 0 || end < start {
        return domain(format!("bad n range {start}:{end}:{step}"));
    }
    let k = constants(m)?;
    let l10 = std::f64::consts::LN_10;
    (start..=end)
        .step_by(step)
        .map(|n| {
            let big_n = n as f64 / m as f64;
            Ok(ThetaCurveRow {
                n,
                big_n,
                log10_theta0: ln_theta0(&k, big_n)? / l10,
                log10_theta1: ln_theta1(&k, big_n).ok().map(|v| v / l10),
                log10_theta2: ln_theta2(&k, big_n) / l10,
                log10_theta3: ln_theta3(&k, big_n) / l10,
            })
        })
        .collect()
}

/// The Δ⁽²⁾ bound 8√Ω_m N^{m/2}Θ along n; rows with N ≤ 4m are skipped.
pub fn delta2_bound_curve(m: usize, start: usize, end: usize, step: usize) -> Result<Vec<(usize, f64)>> {
    if step == 0 || start == 0 || end < start {
        return domain(format!("bad n range {start}:{end}:{step}"));
    }
    constants(m)?;
    let mut out = Vec::new();
    for n in (start..=end).step_by(step) {
        if n > 4 * m * m {
            out.push((n, delta_chain(n, m)?.delta2_bound.log10_abs()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cm_table_reproduced() {
        let rows = table_cm().unwrap();
        assert_eq!(rows.len(), 11);
        for r in &rows {
            assert!(r.within_tol, "M = {}: {} vs {}", r.big_m, r.computed, r.printed);
        }
        assert!(rows.windows(2).all(|w| w[1].computed <= w[0].computed));
    }

    #[test]
    fn gamma_table_holds() {
        let cert = gamma_table_certify().unwrap();
        assert!(cert.min_slack >= 0.0, "{cert:?}");
        assert!(cert.non_increasing);
        assert!(cert.negative_control.slack < 0.0);
        assert!(cert.passed);
    }

    #[test]
    fn gamma_must_exceed_c12() {
        // the left side is non-positive below c₁₂, so no solution lives there
        let k = constants(3).unwrap();
        let r = gamma_row(&k, 0.99 * k.c12);
        assert!(r.lhs <= 0.0);
    }

    #[test]
    fn lookup() {
        assert_eq!(gamma_for(3), Some(5.119));
        assert_eq!(gamma_for(7), Some(2.754));
        assert_eq!(gamma_for(10_000), Some(1.230));
        assert_eq!(gamma_for(2), None);
        assert_eq!(cm_for(69), Some((40, 21.64)));
    }

    #[test]
    fn curve_shape() {
        let rows = theta_curve(3, 30, 6000, 3).unwrap();
        assert_eq!(rows.len(), 1991);
        assert!(rows[0].log10_theta1.is_none());
        assert!(rows.last().unwrap().log10_theta1.is_some());
        assert!(theta_curve(3, 10, 5, 1).is_err());
        let d = delta2_bound_curve(3, 30, 120, 10).unwrap();
        assert!(d.iter().all(|(n, _)| *n > 36));
    }
}
