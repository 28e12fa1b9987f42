//! Rate-region computation and random-binning simulation for biometric
//! identification systems whose enrollment channel is noisy.
//!
//! The library has three layers:
//!
//! - [`prob`] — exact finite-alphabet probability: distributions, channels,
//!   the joint law of the chain Z - X - Y - U (- V), entropy and mutual
//!   information in bits, strong typicality, and seeded sampling.
//! - [`region`] — achievable-rate geometry: per-test-channel rate triples,
//!   corner points, sampled region boundaries with convexification, the
//!   one-auxiliary/two-auxiliary equivalence construction, and special-case
//!   reduction checks.
//! - [`binning`] — an executable layered random-binning scheme: permuted and
//!   binned codebooks, typicality enrollment and identification, the partial
//!   (secret-only) decoder, and Monte Carlo estimation of error rates and
//!   leakage.
//!
//! All value types are immutable after construction. Operations are pure
//! except sampling, which advances only the stream passed to it; parallel
//! routines derive per-worker sub-streams from a master seed so results are
//! independent of scheduling.

pub mod binning;
pub mod error;
pub mod prob;
pub mod region;
pub mod rng;

pub use error::{Error, Result};
