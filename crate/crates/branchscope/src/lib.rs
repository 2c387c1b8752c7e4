//! Branching-factor estimation for deterministic discrete-action
//! environments, by exhaustive enumeration of distinct reachable states.
//!
//! The estimate rests on one identity: in a tree with uniform branching
//! factor `b`, the number of distinct states reachable within `f` frames is
//! `1 + b + b^2 + ... + b^f`. Enumerating an environment frame by frame
//! yields an observed cumulative count `s`; the average branching factor is
//! then the unique non-negative root of `(1 - s) + b + b^2 + ... + b^f`.
//!
//! - [`env`] defines the [`Environment`] contract: canonical byte state
//!   keys, deterministic successor expansion.
//! - [`enumeration`] counts distinct states per frame with BFS (optionally
//!   parallel, always deterministic) and an iterative-deepening
//!   cross-check engine.
//! - [`estimator`] solves for `b` from `(s, f)` or from a finished trace.
//! - [`envs`] holds the built-in ground-truth environments plus the
//!   subprocess adapter and its serve loop.
//! - [`validator`] detects engine disagreement, nondeterminism, and dead
//!   initial states.
//! - [`report`] reads and writes the trace/results/mismatch CSV formats.
//! - [`cli`] wires everything into the `branchscope` binary.

pub mod cli;
pub mod env;
pub mod enumeration;
pub mod envs;
pub mod estimator;
pub mod report;
pub mod testing;
pub mod trace;
pub mod validator;

pub use env::{ActionId, EnvDescriptor, EnvError, Environment, StateKey};
pub use enumeration::{
    bfs_enumerate, edge_branching, id_enumerate, EnumerationConfig, EnumerationError,
};
pub use estimator::{estimate_branching, estimate_from_trace, EstimateError};
pub use trace::{
    BranchingEstimate, CrossCheckRecord, EnumerationRecord, EnumerationTrace, Termination,
};
