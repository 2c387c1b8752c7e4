//! Exhaustive per-frame state enumeration engines.
//!
//! Both engines count, per frame, the states whose shortest discovery
//! distance from the root equals that frame, deduplicating across paths by
//! state key. They stop after the first frame whose completed cumulative
//! count reaches the cap (`CapReached`) or after a frame that adds nothing
//! (`FrontierExhausted`). A frame is always expanded to completion first, so
//! the final cumulative count may overshoot the cap.

use thiserror::Error;

use crate::env::{EnvError, Environment, StateKey};
use crate::estimator::EstimateError;
use crate::trace::EnumerationTrace;

mod bfs;
mod id;
mod seen;

pub use seen::{SeenSet, DEFAULT_SEEN_BUDGET_BYTES};

#[derive(Debug, Error)]
pub enum EnumerationError {
    #[error("cap must be >= 1")]
    InvalidCap,
    #[error("seen-set budget exhausted after {limit_keys} keys (budget {budget_bytes} bytes)")]
    CapacityExceeded { limit_keys: u64, budget_bytes: u64 },
    #[error("workers > 1 requires the 'parallel' feature")]
    ParallelUnavailable,
    #[error("failed to start worker pool: {0}")]
    WorkerPool(String),
    #[error(transparent)]
    Env(#[from] EnvError),
}

impl From<seen::CapacityExceeded> for EnumerationError {
    fn from(e: seen::CapacityExceeded) -> Self {
        EnumerationError::CapacityExceeded {
            limit_keys: e.limit_keys,
            budget_bytes: e.budget_bytes,
        }
    }
}

/// Knobs shared by both engines.
#[derive(Clone, Debug)]
pub struct EnumerationConfig {
    /// Stop once a completed frame's cumulative distinct-state count reaches
    /// this value.
    pub cap: u64,
    /// Worker count for frame expansion. `1` runs the plain sequential path;
    /// results are byte-identical for any value. Iterative deepening is
    /// always sequential.
    pub workers: usize,
    /// Memory budget for the seen set, in bytes.
    pub seen_budget_bytes: u64,
    /// Store 128-bit fingerprints instead of full keys. Exactness is then
    /// probabilistic; leave off unless memory-bound.
    pub fingerprint: bool,
}

impl EnumerationConfig {
    pub fn new(cap: u64) -> Self {
        EnumerationConfig {
            cap,
            workers: 1,
            seen_budget_bytes: DEFAULT_SEEN_BUDGET_BYTES,
            fingerprint: false,
        }
    }
}

/// Breadth-first enumeration with default configuration.
pub fn bfs_enumerate(
    env: &mut dyn Environment,
    cap: u64,
) -> Result<EnumerationTrace, EnumerationError> {
    bfs::run(env, &EnumerationConfig::new(cap))
}

/// Breadth-first enumeration with explicit configuration.
pub fn bfs_enumerate_with(
    env: &mut dyn Environment,
    config: &EnumerationConfig,
) -> Result<EnumerationTrace, EnumerationError> {
    bfs::run(env, config)
}

/// Iterative-deepening enumeration with default configuration.
///
/// Produces byte-identical traces to [`bfs_enumerate`] on any environment
/// that honors the determinism contract; divergence is the cross-check
/// signal.
pub fn id_enumerate(
    env: &mut dyn Environment,
    cap: u64,
) -> Result<EnumerationTrace, EnumerationError> {
    id::run(env, &EnumerationConfig::new(cap))
}

/// Iterative-deepening enumeration with explicit configuration.
pub fn id_enumerate_with(
    env: &mut dyn Environment,
    config: &EnumerationConfig,
) -> Result<EnumerationTrace, EnumerationError> {
    id::run(env, config)
}

/// Average number of distinct successors per expanded state.
///
/// Counts every generated move, including those that land on
/// already-visited states, so it upper-bounds the node-based estimate.
pub fn edge_branching(trace: &EnumerationTrace) -> Result<f64, EstimateError> {
    let expanded = trace.expanded_states();
    if trace.edge_move_count == 0 || expanded == 0 {
        return Err(EstimateError::EmptyTrace);
    }
    Ok(trace.edge_distinct_count as f64 / expanded as f64)
}

/// Number of distinct keys within one state's successor list.
fn count_distinct(succ: &[StateKey]) -> u64 {
    let mut n = 0u64;
    for (i, s) in succ.iter().enumerate() {
        if succ[..i].iter().all(|earlier| earlier != s) {
            n += 1;
        }
    }
    n
}
