//! Report rows and CSV encoding used by the `crystfib` binary.

pub mod report;
