//! Executable layered random-binning scheme: codebook generation with
//! permuted bins, typicality enrollment and identification, the secret-only
//! partial decoder, and Monte Carlo measurement of error and leakage.

mod codebook;
mod protocol;
mod sim;

pub use codebook::{
    build_codebook, derive_seed, CodeParams, Codebook, Database, RateAccounting, RateSpec,
    Template, FALLBACK_SECRET, FALLBACK_TEMPLATE, MAX_EXPONENT, STORAGE_CAP_SYMBOLS,
};
pub use protocol::{enroll, identify, partial_decode, Enrollment};
pub use sim::{run_simulation, SimOptions, SimulationResult};
