//! Asymptotic secret-key rates for the twin-field QKD protocol with
//! measurement at an untrusted middle node, using analytical decoy-state
//! upper bounds on the photon-number yields for two, three or four decoy
//! intensity settings.
//!
//! The crate is organized around the flow of a rate computation:
//!
//! * [`channel`] — the analytical channel model producing every observable
//!   quantity (X/Z-basis gains, exact yields); also the correctness oracle
//!   for the bound modules.
//! * [`bounds`] — the decoy-state machinery: closed-form yield bounds from
//!   two, three or four intensity settings.
//! * [`security`] — bit/phase error rates and the asymptotic key-rate
//!   formula.
//! * [`optimize`] — scenario presets, key-rate maximization over the free
//!   intensities, loss sweeps, worst-case analysis under intensity
//!   fluctuations.
//! * [`io`] — gain-table CSV and intensity-list parsing (the untrusted-input
//!   surface; fuzz targets live under `fuzz/`).
//! * [`validate`] — self-check suites (model consistency, bound soundness
//!   against planted yield tables, algebra cross-checks).
//!
//! Everything is pure and deterministic: identical inputs give bit-identical
//! outputs, and all types are safe to share across threads.

pub mod bounds;
pub mod channel;
pub mod error;
pub mod io;
pub mod math;
pub mod optimize;
pub mod security;
pub mod types;
pub mod validate;

pub use error::{Error, Result};
pub use types::{
    ChannelParams, GainTable, IntensitySet, KeyRatePoint, Outcome, ProtocolParams, YieldBoundSet,
};
