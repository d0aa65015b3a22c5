//! Core library for characterizing classical-drive crosstalk on
//! fixed-frequency transmon processors.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats and the CLI
//! live in the companion `crosstalk-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod chipgen;
pub mod experiment;
pub mod learning;
pub mod model;
pub mod oracle;
pub mod predict;
pub mod report;
