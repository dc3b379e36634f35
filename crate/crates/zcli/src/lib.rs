//! Support code for the `zcli` binary: configuration files, run manifests,
//! output formatting and the presets of the published table of standalone
//! estimates.

pub mod config;
pub mod manifest;
pub mod output;
pub mod presets;
