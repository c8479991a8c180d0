//! Mesoscopic eigenvalue statistics of Wigner matrices.
//!
//! Samplers for complex Wigner ensembles, finite-N resolvent and linear
//! statistics, the limiting Gaussian processes, Fourier and
//! Helffer–Sjöstrand tools, and a Monte Carlo harness comparing the two.

pub mod ensembles;
pub mod error;
pub mod harness;
pub mod hscalc;
pub mod processes;
pub mod quad;
pub mod rng;
pub mod sobolev;
pub mod spectral;
pub mod stats;
pub mod testfn;

pub use error::{Error, Result};
