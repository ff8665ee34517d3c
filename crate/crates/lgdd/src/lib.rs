//! Construction and certification engine for large sets of group divisible
//! designs with block size three.
//!
//! The crate is organised around a small set of combinatorial objects
//! ([`core`]), an independent checker that validates every defining law of
//! those objects ([`verifier`]), a catalog of hand-entered base designs
//! ([`catalog`]), a deterministic backtracking search for small open cases
//! ([`search`]), the recursive machinery that builds large designs out of
//! small ones ([`constructions`]), and a planner that decides, for requested
//! parameters, which route to take and then executes it with verification at
//! every step ([`planner`]). [`document`] provides a stable JSON interchange
//! format for all object kinds.

pub mod catalog;
pub mod constructions;
pub mod core;
pub mod document;
pub mod planner;
pub mod search;
pub mod verifier;
