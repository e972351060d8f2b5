//! Support code for the `nmsp` binary.

pub mod checks;
