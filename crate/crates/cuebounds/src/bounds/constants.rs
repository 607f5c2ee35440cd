use std::f64::consts::{E, PI};

use serde::Serialize;

use crate::error::{domain, Result};
use crate::numerics::{ln_factorial, LogReal};

/// c₀ = (6√2)^{−1/2}.
pub fn c0() -> f64 {
    (1.0 / (6.0 * 2f64.sqrt())).sqrt()
}

pub const C4: f64 = 0.353_553_390_593_273_8; // 1/(2√2)
pub const C9: f64 = 538.0 / 243.0;

pub fn c8() -> f64 {
    4.0 * 2.766 / (1.0 - 1.0 / 16.0f64).powi(2)
}

pub fn c3() -> f64 {
    c8() / (2.0 * PI).powf(0.25)
}

pub fn c12() -> f64 {
    (1.0 + 290f64.sqrt()) / 17.0
}

pub fn c16() -> f64 {
    2.0 * E * PI.sqrt()
}

/// Limit of c₁₀ as m → ∞.
pub fn c10_limit() -> f64 {
    c0() * c0() / (3.0 * 6f64.sqrt())
}

/// Limit of c₁ as m → ∞.
pub fn c1_limit() -> f64 {
    (1.0 - c10_limit()).powi(2) / 16.0
}

/// Limit of c₂ as m → ∞.
pub fn c2_limit() -> f64 {
    4.0 * c0() * C4 * c1_limit().sqrt()
}

/// ln Ω_m with Ω_m = π^m/m!, the volume of the unit ball in ℝ^{2m}.
pub fn ln_omega(m: usize) -> f64 {
    m as f64 * PI.ln() - ln_factorial(m as u64)
}

/// Every m-dependent constant entering Θ and the regime thresholds.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantsLedger {
    pub m: usize,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
    pub c9: f64,
    pub c10: f64,
    pub c11: f64,
    pub c12: f64,
    pub c13: f64,
    pub c14: f64,
    pub c15: f64,
    pub c16: f64,
    pub c17: f64,
    pub c18: f64,
    pub c19: f64,
    pub c20: f64,
    pub c21: f64,
    pub eps0: f64,
    pub ups1: f64,
    pub ups2: f64,
    pub ups3: f64,
    pub omega_m: LogReal,
}

pub fn constants(m: usize) -> Result<ConstantsLedger> {
    if m < 3 {
        return domain(format!("constants need m >= 3, got {m}"));
    }
    let mf = m as f64;
    let lm = 1.0 + mf.ln();
    let c0 = c0();
    let c4 = C4;
    let c8 = c8();
    let c3 = c3();
    let c6 = 4.0 * (2.0 + 2f64.ln());
    let c7 = PI * E.sqrt() / 2.0;
    let c15 = 2.0 * E * E;
    let eps0 = 2.0 * c0 * c0 / (3.0 * (1.0 + 1.0 / mf) * lm.sqrt());
    let c19 = (2f64.sqrt() * c0 * lm.powf(0.25) / (mf + 1.0).sqrt()).exp() / (3.0 * 6f64.sqrt());
    let c10 = c0 * c0 * (1.0 + 1.0 / mf).sqrt() / (3.0 * 6f64.sqrt())
        * (c0 * lm.powf(0.25) / ((mf + 1.0) / 2.0).sqrt()).exp();
    let c11 = (1.0 + c10 / mf.sqrt()) * (1.0 + 2.0 * c10 / mf + ((1.0 + 1.0 / mf) / (2.0 * lm)).sqrt());
    let c1 = (1.0 - c10).powi(2) / (16.0 * c11) - c0 * c0 * (1.0 + eps0) * lm.sqrt() / (2.0 * (mf + 1.0));
    let c2 = c0 * c4 * (1.0 - c10 - 4.0 * c4 * c0 * c11 * lm.powf(0.25) / (mf + 1.0).sqrt())
        - c0 * c0 * (1.0 + eps0) * lm.powf(0.25) / (2.0 * (mf + 1.0).sqrt());
    let c13 = 108f64.ln() * (1.0 + 3f64.ln()).sqrt() / (68.0 * 108f64.sqrt() * c2);
    let c17 = 32.0 / 3.0 * (1.0 + (2.0 - 1.0 / mf).powi(3) / (3.0 * (mf + 1.0)));
    let c18 = 8.0 / 3.0 * (1.0 + 4.0 * (1.0 - 1.0 / mf).powi(3) / (3.0 * (mf + 1.0)));
    let eta = 1.0 / (PI * mf.sqrt());
    let c20 = PI * PI * eta * eta / 8.0;
    let c21 = (eta / (2.0 * (mf * (mf + 1.0)).sqrt())).exp() / (6.0 * 3f64.sqrt());
    let ups1 = c6 * mf * mf + 2.5 * mf * mf.ln() + c7.ln() * mf + 1.5;
    let ups2 = 0.5 * mf * mf.ln() - 0.75 * mf * lm.ln() - mf * (8.0 * c0).ln() + 0.5;
    let ups3 = PI * mf.powf(1.5) * (mf + 1.0) * (0.5 * (1.0 + 0.5 / (PI * mf).powi(2))).exp()
        / (2.0 * (1.0 - c21 / (4.0 * PI * PI * mf.powi(3))));
    Ok(ConstantsLedger {
        m,
        c0,
        c1,
        c2,
        c3,
        c4,
        c5: C9.exp() / c3,
        c6,
        c7,
        c8,
        c9: C9,
        c10,
        c11,
        c12: c12(),
        c13,
        c14: 13f64.sqrt() / 1500.0,
        c15,
        c16: c16(),
        c17,
        c18,
        c19,
        c20,
        c21,
        eps0,
        ups1,
        ups2,
        ups3,
        omega_m: LogReal::from_ln(ln_omega(m)),
    })
}

impl ConstantsLedger {
    /// ln(1 + log m), used throughout.
    pub fn log_factor(&self) -> f64 {
        (1.0 + (self.m as f64).ln()).ln()
    }

    /// √(c₁⁻¹(1+log m)Υ₁), the N-scale of the Θ₁/Θ₂ envelopes.
    pub fn n_scale(&self) -> f64 {
        let lm = 1.0 + (self.m as f64).ln();
        (lm * self.ups1 / self.c1).sqrt()
    }
}
