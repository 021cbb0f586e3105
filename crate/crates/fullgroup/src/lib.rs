//! File formats, command-line front end and randomized self-tests on top of
//! [`fullgroup_core`].
//!
//! * [`json`]: versioned JSON artifacts for witnesses, decompositions,
//!   intertwining runs and certificates;
//! * [`random`]: seeded generators of clopen sets and group elements, with
//!   labeled substreams so every trial is reproducible on its own;
//! * [`oracle`]: brute-force reference computations by linear scans over
//!   pieces, used to cross-check the canonical-form algorithms;
//! * [`selftest`]: the property suites;
//! * [`cli`]: argument parsing and dispatch for the `fullgroup` binary.

pub mod cli;
pub mod config;
pub mod error;
pub mod json;
pub mod oracle;
pub mod random;
pub mod selftest;

pub use config::RunConfig;
pub use error::HarnessError;
pub use selftest::{run_suite, PropertyReport, SelftestReport, SuiteResult, SUITES};
