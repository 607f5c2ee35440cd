//! Haar sampling, trace vectors, moment checks against complex Gaussians, and
//! the generator / carré-du-champ identities with the two Stein error terms.

pub mod checks;
pub mod generator;
pub mod haar;
pub mod moments;
pub mod stein;

pub use checks::{laplace_mc, ld_tail_mc, LaplaceMc, LdTailMc};
pub use generator::{
    drift_sums, gamma_identities, generator_apply, generator_residual, zeta_gen, Configuration, GammaIdentityReport,
};
pub use haar::{power_traces, replica_rng, sample_haar, sample_traces, trace_vector, TraceSample};
pub use moments::{ds_moment, ds_verify, gaussian_moment, DsEntry, DsReport, MomentSpec};
pub use stein::{closed_a, closed_b, exact_b, stein_terms, SteinTerms};
