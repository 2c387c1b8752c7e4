//! Solves for the branching factor implied by a distinct-state count.
//!
//! A uniform tree of branching factor `b` explored for `f` frames holds
//! `1 + b + b^2 + ... + b^f` nodes, so given `s` distinct states at frame `f`
//! the estimate is the unique non-negative root of
//! `g(b) = (1 - s) + b + b^2 + ... + b^f`.

use thiserror::Error;

use crate::trace::{BranchingEstimate, EnumerationTrace};

/// Absolute tolerance on `b` at which bisection stops.
pub const SOLVER_TOLERANCE: f64 = 1e-9;

/// Width of the band around `b = 1` inside which the geometric sum is
/// evaluated as `f + 1` to avoid the removable singularity.
const UNIT_BAND: f64 = 1e-9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EstimateError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("trace too short to estimate: need at least two records")]
    EmptyTrace,
}

/// Evaluates `sum_{i=0}^{f} b^i` for `b >= 0`.
///
/// Uses the closed form `(b^(f+1) - 1) / (b - 1)` away from `b = 1` and
/// `f + 1` inside the unit band. Returns `f64::INFINITY` when `b^(f+1)`
/// overflows; callers treat the sentinel as "greater than any target".
pub fn geometric_cumulative(b: f64, f: u32) -> f64 {
    debug_assert!(b >= 0.0, "branching factor must be non-negative");
    let n = f as f64 + 1.0;
    if (b - 1.0).abs() <= UNIT_BAND {
        return n;
    }
    if b > 1.0 && n * b.ln() > f64::MAX.ln() {
        return f64::INFINITY;
    }
    (b.powf(n) - 1.0) / (b - 1.0)
}

/// Estimates the branching factor from `s` distinct states observed by
/// frame `f`.
///
/// `g(0) = 1 - s <= 0` and `g` is strictly increasing for `b > 0`, so the
/// non-negative root exists and is unique. The root is bracketed by doubling
/// from `[0, 2]` and then bisected to [`SOLVER_TOLERANCE`].
pub fn estimate_branching(s: u64, f: u32) -> Result<BranchingEstimate, EstimateError> {
    if s < 1 {
        return Err(EstimateError::InvalidInput(format!("states must be >= 1, got {s}")));
    }
    if f < 1 {
        return Err(EstimateError::InvalidInput(format!("frames must be >= 1, got {f}")));
    }
    if s == 1 {
        return Ok(BranchingEstimate { frames: f, states: s, b: 0.0, residual: 0.0 });
    }

    let target = s as f64;
    let g = |b: f64| geometric_cumulative(b, f) - target;

    let mut lo = 0.0_f64;
    let mut hi = 2.0_f64;
    while g(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    let b = loop {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= SOLVER_TOLERANCE {
            break mid;
        }
        let gm = g(mid);
        if gm == 0.0 {
            break mid;
        } else if gm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    };

    let residual = g(b);
    Ok(BranchingEstimate {
        frames: f,
        states: s,
        b,
        residual: if residual.is_finite() { residual } else { 0.0 },
    })
}

/// Estimates from the final record of an enumeration trace.
///
/// A trace with only the root record carries no growth information and is
/// rejected.
pub fn estimate_from_trace(trace: &EnumerationTrace) -> Result<BranchingEstimate, EstimateError> {
    if trace.records.len() < 2 {
        return Err(EstimateError::EmptyTrace);
    }
    let last = trace.final_record();
    estimate_branching(last.cumulative_states, last.frame)
}
