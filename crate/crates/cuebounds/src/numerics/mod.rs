//! Numeric kernels: signed log-domain reals, log-gamma, radix-2 FFT, complex
//! LU determinants and composite Gauss–Legendre quadrature.

mod fft;
mod gamma;
mod linalg;
mod logreal;
mod quad;

pub use fft::{fft, fft_in_place, Direction};
pub use gamma::{ln_factorial, ln_gamma};
pub use linalg::{lu_det, ComplexLogDet, ComplexMatrix};
pub use logreal::{LogReal, Sign};
pub use quad::{gauss_legendre_rule, quad_gl, QuadEstimate, Integrand};
