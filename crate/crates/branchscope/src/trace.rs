//! Record types produced by enumeration and estimation.

/// Why an enumeration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// The cumulative distinct-state count reached the cap after a frame
    /// completed.
    CapReached,
    /// A frame yielded zero new states; the reachable set is exhausted.
    FrontierExhausted,
}

/// One enumeration frame: how many states were first discovered at `frame`,
/// and the running total of distinct states seen so far.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationRecord {
    pub frame: u32,
    pub new_states: u64,
    pub cumulative_states: u64,
}

/// Full result of one enumeration run.
///
/// `records[0]` is always `(0, 1, 1)` (the root). Frames are contiguous and
/// each record's cumulative count is the previous cumulative plus its own
/// `new_states`. Two traces compare equal exactly when every record, both
/// edge counters and the termination reason agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationTrace {
    pub records: Vec<EnumerationRecord>,
    /// Total successor evaluations: `num_actions` per expanded state.
    pub edge_move_count: u64,
    /// Total of per-state distinct successor counts.
    pub edge_distinct_count: u64,
    pub terminated_by: Termination,
}

impl EnumerationTrace {
    /// The last record (every trace has at least the root record).
    pub fn final_record(&self) -> &EnumerationRecord {
        self.records.last().expect("trace has at least the root record")
    }

    /// Number of states that were expanded: everything discovered before the
    /// final frame. The final frame's states are counted but never expanded.
    pub fn expanded_states(&self) -> u64 {
        match self.records.len() {
            0 | 1 => 0,
            n => self.records[n - 2].cumulative_states,
        }
    }
}

/// A branching-factor estimate together with the data it came from.
///
/// `b` is the unique non-negative root of
/// `(1 - states) + b + b^2 + ... + b^frames`; `residual` is that polynomial
/// evaluated at the returned `b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchingEstimate {
    pub frames: u32,
    pub states: u64,
    pub b: f64,
    pub residual: f64,
}

/// Paired BFS/iterative-deepening results for one environment.
///
/// Identical traces always give `b_diff = 0`; a nonzero `b_diff` is the
/// mismatch signal used to flag nondeterministic or state-lossy
/// environments.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossCheckRecord {
    pub env_name: String,
    pub states_bfs: u64,
    pub states_id: u64,
    pub frames_bfs: u32,
    pub frames_id: u32,
    pub b_bfs: f64,
    pub b_id: f64,
    pub b_diff: f64,
}
