//! Artificial Bee Colony optimizer with the AsBeC technologies, three
//! parallel execution strategies and a benchmark harness computing gain
//! curves against standard ABC.

// NaN must fail comparisons such as `!(f < best)`, which the suggested rewrites obscure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod colony;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod objective;
pub mod parallel;
pub mod rng;
pub mod tech;
pub mod trace;

pub use colony::{BoundsMode, Colony, ColonyConfig, FoodSource};
pub use error::{Error, Result};
pub use objective::{fitness, make_suite, BenchmarkSpec, Bounds, FunctionId, Objective};
pub use parallel::{ExecMode, ParallelPlan, RunOutcome};
pub use rng::RandomStream;
pub use tech::TechnologySet;
pub use trace::{pointwise_min_merge, TimedTrace, TracePoint};
