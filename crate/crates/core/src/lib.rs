//! Requirements-based test generation.
//!
//! The pipeline turns formal pre-/post-conditions into test vectors:
//!
//! 1. [`speclang`] parses `.reqspec` documents into [`speclang::FunctionSpec`]s.
//! 2. [`coverage`] derives testing conditions for every requirement under
//!    MC/DC extended with equivalence-class partitioning, boundary values
//!    and if-then-else structure.
//! 3. [`context`] wraps a function in its calling context: in-type
//!    constraints, required pre-conditions, over-approximated outputs and
//!    required post-conditions, pairing each testing condition with its trap
//!    property.
//! 4. [`solver`] decides each condition over the finite typed domains and
//!    extracts a witness.
//! 5. [`harness`] exports vectors, runs an implementation against them and
//!    reports requirements coverage.

pub mod context;
pub mod coverage;
pub mod expr;
pub mod harness;
pub mod solver;
pub mod speclang;
