//! Determinantal sampling library.
//!
//! Implements exact sampling of fermion position configurations from
//! Slater-determinant distributions (projection-kernel determinantal point
//! processes) via an iterative Gaussian-elimination chain rule, together with
//! two reference samplers (a modified HKPV chain-rule sampler and a Metropolis
//! Markov chain), L-ensemble DPP sampling, the lattice models used by the
//! experiment drivers, and the error/autocorrelation statistics that compare
//! the samplers. Every sampler is instrumented with an exact floating-point
//! operation ledger so complexity claims can be checked rather than assumed.

pub mod dpp;
pub mod ffs;
pub mod numerics;
pub mod physics;
pub mod reference;
pub mod stats;

pub use ffs::SampleConfig;
pub use numerics::{FlopLedger, Matrix, OrbitalMatrix, RngStream};
