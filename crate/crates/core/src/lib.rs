//! Metric projections onto density-capped sets of probability measures in
//! Wasserstein space.
//!
//! The crate computes the projection `P[mu]` of a probability measure onto the set
//! `K_lambda` of measures with density at most `lambda`, both exactly in one
//! dimension (isotonic regression on quantile functions) and on grids in any
//! dimension (capacitated transport). On top of the projections sit executable
//! checks of the structural properties of `P` and the two-ball construction in
//! which `P` fails to be `W_p`-nonexpansive for `p` close to one.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`measures`] | point clouds, grid measures, ball unions, ball volumes |
//! | [`ot`] | network simplex, plans, 1-D quantile transport |
//! | [`proj1d`] | exact 1-D projection by pool-adjacent-violators |
//! | [`projnd`] | ball-union and grid projections in `R^d` |
//! | [`props`] | property checks with explicit slack |
//! | [`experiments`] | the two-ball counterexample and its `p` threshold |
//! | [`cli`] | the `wproj` command line |

pub mod cli;
pub mod error;
pub mod experiments;
pub mod measures;
pub mod ot;
pub mod proj1d;
pub mod projnd;
pub mod props;

pub use error::{Error, Result};
