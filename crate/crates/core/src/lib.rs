//! Verification tools for the drift heat semigroup `e^{tΔ_f}` on model
//! gradient shrinking Ricci solitons.
//!
//! Models are the Gaussian shrinker on `R^n` and the round cylinder
//! `S^{n-1} × R`. Solutions come from truncated eigen-expansions, closed-form
//! Gaussian families, and an independent finite-difference solver; monitors
//! compare weighted norms along the flow against the proposed bounds.

pub mod battery;
pub mod error;
pub mod fd;
pub mod hermite;
pub mod identities;
pub mod monitors;
pub mod poly;
pub mod quadrature;
pub mod soliton;
pub mod spectral;
pub mod tables;
pub mod transfer;

pub use error::{Error, Result};
pub use soliton::{ModelKind, SolitonModel};
pub use spectral::{GaussianProfile, HermiteField, InitialData, ProfileFamily};
