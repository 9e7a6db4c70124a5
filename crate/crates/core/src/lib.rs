//! Parallel spooky pebble games on the line graph.
//!
//! [`pebble`] holds the game semantics and validator, [`a_sequence`] the
//! recursive optimal-depth construction, [`search`] exact optimal-depth
//! search, [`estimator`] the factoring cost model built on top and
//! [`report`] its table output.

pub mod a_sequence;
pub mod estimator;
pub mod format;
pub mod pebble;
pub mod report;
pub mod search;
pub mod weights;

pub use a_sequence::{a_inv, a_seq, blast, construct, unblast, ConstructionTrace};
pub use estimator::{
    d_max, estimate, fibonacci_estimate, log_d_bound, select_params, sequential_costs, shor_reference,
    CostReport, EstimateError, EstimatorParams, FibReport, RootHermite, Strategy,
};
pub use format::{parse, serialize, ParseError};
pub use pebble::{
    apply_time_step, depth_lower_bound, replay, replay_from, validate, Failure, GameState, Move, MoveKind,
    Schedule, SiteState, StepError, StepMetrics, TimeStep, ValidationReport, Variant,
};
pub use search::{
    astar_search, bfs_oracle, min_pebbles_for_depth, OptResult, PebbleConfig, SearchError, SearchParams,
    TieBreak,
};
pub use weights::{TransientRule, WeightProfile};
