//! Explicit constants, the error terms Θ⁰…Θ³ with thresholds Λ₁…Λ₃, the
//! Δ⁽²⁾ → Δ⁽¹⁾ → total-variation chain, and the printed tables, all in
//! log-domain arithmetic.

pub mod certify;
pub mod chain;
pub mod constants;
pub mod tables;
pub mod theta;

pub use certify::{certify_inequalities, CertificationReport, InequalityCheck};
pub use chain::{
    delta_chain, n_alpha, tv_alpha, tv_theorem, tv_uniform, w2_bound, Applicability, BoundReport, TvAlpha,
    TvUniform,
};
pub use constants::{constants, ConstantsLedger};
pub use tables::{delta2_bound_curve, gamma_table_certify, table_cm, theta_curve, CmRow, GammaCertificate, GammaRow, ThetaCurveRow};
pub use theta::{theta, theta_at, ThetaBreakdown};
