//! Explicit bounds on the distance between the trace vector of a Haar unitary
//! and a Gaussian vector, together with the exact finite-n machinery used to
//! check them: Toeplitz and Borodin–Okounkov determinants, Monte Carlo moment
//! and Stein checks, and numerical certification of the analytic lemmas.

pub mod analysis;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod spectral;
pub mod trigpoly;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, LogReal, Sign};

pub use trigpoly::{HilbertPair, TrigPoly, XiVector};
