//! Synchronization-error analysis and link-level simulation for
//! physical-layer network coding at a two-way relay.

// `!(x <= lim)` rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod chain;
pub mod detection;
pub mod harness;
pub mod impairments;
pub mod info;
pub mod mapping;
pub mod runner;
