//! Library surface of the `crosstalk` command-line tool: error taxonomy,
//! on-disk schemas and command implementations. The binary in `main.rs` is a
//! thin argument-parsing shell over [`ops`].

pub mod error;
pub mod ops;
pub mod schema;
