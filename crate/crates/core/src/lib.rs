//! The one-sided transposition shuffle on the generalized symmetric group.
//!
//! A deck of `n` cards, each carrying one of `m` orientations, is shuffled by
//! choosing a position `j` uniformly, a position `i <= j` uniformly, swapping
//! the two cards and rotating both by a uniform amount. The states of the deck
//! form the group `G(m, n)` of order `m^n n!`, and the shuffle is a random
//! walk on it that mixes abruptly around `n ln n` steps.
//!
//! The crate provides:
//!
//! - [`group`]: elements of `G(m, n)`, their product, inverse, dense ranking,
//!   and the projection onto `S_n`.
//! - [`shuffle`]: the generator law and step sampling.
//! - [`exact`]: exact `t`-step laws on groups up to a few million elements,
//!   with total variation and separation distances and mixing times.
//! - [`monte_carlo`]: chain simulation, the strong stationary time given by
//!   the first draws, and its coupon-collector tail.
//! - [`selftest`]: exhaustive invariant checks on small groups.
//!
//! ```
//! use ost_shuffle::{ExactEngine, GroupParams, Metric};
//!
//! let params = GroupParams::new(2, 4)?;
//! let engine = ExactEngine::new(params)?;
//! let curve = engine.distance_curve(40);
//! assert!(curve.tv.iter().zip(&curve.sep).all(|(tv, sep)| tv <= sep));
//! assert!(curve.mixing_time(0.25, Metric::Tv).unwrap() < 30);
//! # Ok::<(), ost_shuffle::Error>(())
//! ```

pub mod error;
pub mod exact;
pub mod group;
pub mod monte_carlo;
pub mod numeric;
pub mod selftest;
pub mod shuffle;

pub use error::{Error, Result};
pub use exact::{
    convolve_step, pushforward_projection, sep_distance, tv_distance, tv_to_uniform, DenseDistribution,
    DistanceCurve, ExactEngine, Metric, MixingSummary, StepKernel,
};
pub use group::{Card, GroupElement, GroupIndex, GroupParams, DEFAULT_EXACT_CAP};
pub use monte_carlo::{
    empirical_law, empirical_pj_check, sample_sst, sep_upper_bound_check, simulate_chain, sst_tail,
    sst_tail_grid, trial_rng, ChainState, SstSample, SstTailRow, TailEstimate, TrialRecord,
};
pub use shuffle::{identity_mass, ost_generators, Generator, GeneratorDistribution};

// The guide's and the README's code listings run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/group.md")]
    mod group {}
    #[doc = include_str!("../../../book/src/shuffle.md")]
    mod shuffle {}
    #[doc = include_str!("../../../book/src/distances.md")]
    mod distances {}
    #[doc = include_str!("../../../book/src/projection.md")]
    mod projection {}
    #[doc = include_str!("../../../book/src/stationary_time.md")]
    mod stationary_time {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
