//! Robust representatives selection under discrete scenario uncertainty.
//!
//! Choose one tool from each of `p` disjoint groups so that the worst cost
//! over `K` scenarios (min-max) or the worst regret against the per-scenario
//! optimum (min-max regret) is as small as possible.
//!
//! The crate provides
//!
//! * the instance model and both objectives ([`instance`]),
//! * the LP relaxation and its minimal threshold L* ([`lp`], on the
//!   self-contained [`simplex`] engine),
//! * `r_max`, randomized and derandomized rounding ([`rounding`]),
//! * exact oracles and the aggregation baseline ([`exact`]),
//! * hard-instance generators ([`generators`]),
//! * the instance file format and a benchmark harness ([`io`], [`bench`]).

pub mod bench;
pub mod error;
pub mod exact;
pub mod generators;
pub mod instance;
pub mod io;
pub mod lp;
pub mod rounding;
pub mod simplex;

pub use error::{Error, Result};
pub use instance::{EvaluationReport, Instance, Objective, Selection};

/// Environment variable overriding the enumeration cap of the exact oracle.
pub const ENUM_CAP_ENV: &str = "REPSEL_ENUM_CAP";

/// The oracle enumeration cap, honoring [`ENUM_CAP_ENV`].
pub fn enum_cap_from_env() -> u128 {
    std::env::var(ENUM_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(exact::DEFAULT_ENUM_CAP)
}
