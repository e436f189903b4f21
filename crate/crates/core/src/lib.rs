//! Online exemplar-set learning of functions between metric spaces.
//!
//! A [`Learner`] keeps a multiset of `(input, output)` exemplars. Each new
//! observation is compared against the output of a uniformly sampled nearest
//! exemplar: a miss (output further than `epsilon`) inserts the observation,
//! a hit removes the consulted exemplar with probability `1/q - 1` and keeps
//! it otherwise. When the model size stops drifting, the long-run hit rate
//! settles at `q`.
//!
//! The crate also ships concrete metric spaces, synthetic target functions,
//! two exact nearest-set backends (linear scan and a dynamic vantage-point
//! tree), stream generators, windowed statistics and the Monte Carlo drivers
//! used to check the growth identity and the limiting hit rate.

pub mod error;
pub mod experiments;
pub mod index;
pub mod learner;
pub mod metric;
pub mod rng;
pub mod stats;
pub mod stream;
pub mod suite;
pub mod target;

pub use error::{Error, Result};
pub use index::{IndexKind, NearestIndex, NearestSetIndex};
pub use learner::{
    nearest_set, sample_uniform, Action, EmptyModelPolicy, Exemplar, Learner, LearnerConfig,
    Model, StepOutcome,
};
pub use metric::{Metric, PointVector};
pub use rng::RandomStream;
