//! Numerical checks of the analytic machinery: the change-of-variables kernel
//! H and its quadratic-form decomposition, the tail, level-set and auxiliary
//! inequalities, and direct quadrature of Δ⁽²⁾ for m = 1.

pub mod delta2;
pub mod kernel;
pub mod lemmas;
pub mod qf;
pub mod tails;

use serde::Serialize;

pub use delta2::{delta2_numeric_m1, delta2_partial_m1, QuadResult};
pub use kernel::{devinatz_check, h_kernel};
pub use lemmas::{
    levelset_check, levelset_measure, misc_lemma_suite, term5_check, unibound_grid, vandermonde_check,
    LevelsetReport, MiscReport, Term5Report, VandermondeReport,
};
pub use qf::{b_border_checks, qf_identity_residual, qf_identity_sides, BorderReport, QuadraticFormData};
pub use tails::{
    est2_check, gaussian_tail_check, gaussian_tail_grid, had_margin, qf_mc_check, random_direction, tail_inequality_suite,
    tb1_margin, Est2Row, GaussianTailRow, QfMcRow, TailSuiteReport,
};

/// Roundoff slack: a margin passes when it is ≥ −SLACK·scale.
pub const SLACK: f64 = 1e-12;

/// One family of inequality margins. A margin is rhs − lhs in the units the
/// check states; bounds that cannot bite (a bound on |F| above 1, say) are
/// counted as vacuous and kept apart from the informative passes.
#[derive(Clone, Debug, Serialize)]
pub struct MarginCheck {
    pub name: String,
    pub checked: usize,
    pub vacuous: usize,
    pub failures: usize,
    pub min_margin: f64,
    pub worst_at: String,
    pub passed: bool,
}

impl MarginCheck {
    pub fn new(name: &str) -> Self {
        MarginCheck {
            name: name.to_string(),
            checked: 0,
            vacuous: 0,
            failures: 0,
            min_margin: f64::INFINITY,
            worst_at: String::new(),
            passed: true,
        }
    }

    pub fn record(&mut self, margin: f64, scale: f64, vacuous: bool, at: impl FnOnce() -> String) {
        self.checked += 1;
        if vacuous {
            self.vacuous += 1;
        }
        if !(margin >= -SLACK * scale.abs().max(f64::MIN_POSITIVE)) {
            self.failures += 1;
            self.passed = false;
        }
        if margin < self.min_margin || margin.is_nan() {
            self.min_margin = margin;
            self.worst_at = at();
        }
    }

    /// Checks whose bound was below the trivial one.
    pub fn informative(&self) -> usize {
        self.checked - self.vacuous
    }
}
