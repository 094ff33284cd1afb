//! Command implementations behind the `povmw` binary.

pub mod commands;
pub mod fraction;
pub mod report;
pub mod scenario;
pub mod svg;
pub mod table;
