//! Simulation and analysis of a bit-commitment protocol built on a
//! double-slit setup with unstable particles.
//!
//! Bob fires unstable particles at a double slit whose setting (both open,
//! one shut, both shut) he draws at random. Alice commits to `b = 0` by
//! recording screen positions and to `b = 1` by measuring which slit each
//! particle used. After the commit phase closes, ten half-lives past the last
//! detection, she unveils her records and Bob checks them against his
//! private settings.
//!
//! Modules:
//! - [`quantum`]: small dense states, partial traces, trace distance,
//!   Helstrom discrimination and the local unitary of a purification attack.
//! - [`optics`]: far-field screen patterns and sampling from them.
//! - [`decay`]: survival, decay times and the commit deadline.
//! - [`stats`]: goodness of fit, binomial tails, rank tests, intervals.
//! - [`protocol`]: commit runs, strategies, unveil, verification, sweeps.
//! - [`nogo`]: the purification attack on toy commitments.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decay;
pub mod exec;
pub mod nogo;
pub mod optics;
pub mod protocol;
pub mod quantum;
pub mod rng;
pub mod stats;
