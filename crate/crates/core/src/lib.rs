//! Exact-arithmetic constructions around sets that contain, or are forced to
//! miss, affine copies of decreasing sequences.
//!
//! Everything is computed over [`Rational`]; there is no floating point in
//! any construction or check.
//!
//! - [`interval`]: flagged intervals and canonical interval unions.
//! - [`cantor`]: the middle-third gap ladder driven by a [`cantor::GapOracle`].
//! - [`slow`]: the slowly decreasing interpolated sequence, translate
//!   decompositions and coverage deficits.
//! - [`avoider`]: threshold sequences and the closed nowhere-dense set that
//!   still hosts affine copies of every sequence of prescribed decay.
//! - [`appendix`]: the mixed-radix construction, digit machinery and the
//!   nested-interval intersection.
//! - [`props`]: seeded randomized checks of the kernel's set identities.

pub mod appendix;
pub mod avoider;
pub mod cantor;
pub mod interval;
pub mod props;
pub mod rational;
pub mod sequence;
pub mod slow;

pub use interval::{Interval, IntervalError, IntervalSet};
pub use rational::{q, Rational};
