//! Seeded generators: white and correlated graph signals over arbitrary
//! scalar distributions, and the graph polynomial VAR (GPVAR) system with
//! its optimal one-step predictor.
//!
//! Every draw is addressed by a counter tuple (see [`crate::rng`]); the
//! innovation of node `v` at time `t`, feature `f` is the same number in
//! every generator that uses the same seed, which makes experiments paired.

mod correlated;
mod distribution;
mod gpvar;

pub use correlated::{
    estimate_offset, gen_correlated, gen_correlated_with_offset, gen_white, CorrParams,
    DEFAULT_PRESAMPLE, OFFSET_SEED,
};
pub use distribution::{sample, DistributionSpec, Sampler};
pub use gpvar::{
    gen_gpvar, gpvar_optimal_predict, gpvar_residuals, GpvarOutput, GpvarParams, ShiftKind,
    ShiftOperator, DEFAULT_BURN_IN,
};

// Stream domain tags.
pub(crate) const TAG_SAMPLE: u64 = 1;
pub(crate) const TAG_ETA: u64 = 2;
pub(crate) const TAG_GPVAR_INIT: u64 = 3;
pub(crate) const TAG_GPVAR_NOISE: u64 = 4;
