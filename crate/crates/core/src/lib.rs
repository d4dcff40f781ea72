//! Matrix-level simulator for block-encoded advection-diffusion-reaction
//! time steps under competing amplitude-amplification strategies, with the
//! distortion metrics and analytic bounds used to compare them.

pub mod adr;
pub mod amplification;
pub mod encoding;
pub mod harness;
pub mod linalg;
pub mod metrics;

pub use adr::{AdrParams, PhysicalParams, TimeScale};
pub use encoding::{BlockEncoding, PostSelection};
pub use linalg::{Matrix, RandomSeed, StateVector, C64};
