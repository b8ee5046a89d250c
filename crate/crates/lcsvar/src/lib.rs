//! Exact and Monte Carlo machinery for studying the variance of the length
//! of the longest common subsequence (LCS) of two independent random words.
//!
//! The model: one word draws i.i.d. letters uniformly from `m` shared
//! letters, the other draws from the same `m` letters plus one extra letter
//! that appears with probability `p`. This crate provides
//!
//! * reproducible word sampling ([`words`]),
//! * exact LCS computation, minimal matchings and compartment analysis
//!   ([`lcs`]),
//! * the random insertion chain and its incremental LCS profile ([`chain`]),
//! * closed-form evaluation of every constant and bound used by the
//!   variance argument ([`constants`]),
//! * a brute-force exact-enumeration oracle over tiny instances
//!   ([`oracle`]),
//! * seeded Monte Carlo estimators for all empirical quantities
//!   ([`experiments`]),
//! * a runtime verification suite ([`verification`]) and plot-ready
//!   CSV/JSON rendering ([`report`]).
//!
//! Replicate-level parallelism is provided by rayon behind the default
//! `parallel` feature; disabling it yields a fully sequential build with
//! bit-identical results.

pub mod chain;
pub mod constants;
pub mod error;
pub mod experiments;
pub mod lcs;
pub mod oracle;
pub mod rational;
pub mod report;
pub mod stats;
pub mod verification;
pub mod words;

pub use error::Error;
pub use words::{ModelParams, SeedSpec, Word};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Maps `f` over replicate indices `0..replicates`, in parallel when the
/// `parallel` feature is enabled. The output vector is always ordered by
/// replicate index, so downstream aggregation is independent of scheduling
/// and worker count.
pub fn map_replicates<T, F>(replicates: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..replicates).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..replicates).map(f).collect()
    }
}

/// Sequential twin of [`map_replicates`], available regardless of features.
/// Used by the benchmark suite to compare both execution modes.
pub fn map_replicates_sequential<T, F>(replicates: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..replicates).map(f).collect()
}
