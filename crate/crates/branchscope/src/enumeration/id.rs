//! Iterative-deepening enumeration.
//!
//! One depth-limited depth-first pass per frame, each with a fresh
//! key-to-best-depth table. A state reached again at an equal or greater
//! depth is pruned; reached at a shallower depth, its entry is revised and
//! the state re-expanded so every entry settles at the true minimal depth.
//! States count as new only at their minimal depth, and edge statistics are
//! recorded the first time a state is ever expanded, so re-expansions
//! inflate nothing.

use std::collections::{HashMap, HashSet};

use crate::env::{Environment, StateKey};
use crate::trace::{EnumerationRecord, EnumerationTrace, Termination};

use super::{count_distinct, EnumerationConfig, EnumerationError};

pub(super) fn run(
    env: &mut dyn Environment,
    config: &EnumerationConfig,
) -> Result<EnumerationTrace, EnumerationError> {
    if config.cap < 1 {
        return Err(EnumerationError::InvalidCap);
    }

    env.begin_run();
    let desc = env.descriptor().clone();
    let root = env.initial_state()?;
    crate::env::check_key_len(&desc, &root)?;

    let per_key = desc.state_key_len as u64 + super::seen::SLOT_OVERHEAD_BYTES;
    let max_keys = (config.seen_budget_bytes / per_key).max(1);
    let capacity_exceeded = || EnumerationError::CapacityExceeded {
        limit_keys: max_keys,
        budget_bytes: config.seen_budget_bytes,
    };

    let mut records = vec![EnumerationRecord { frame: 0, new_states: 1, cumulative_states: 1 }];
    let mut cumulative = 1u64;
    let mut stats_done: HashSet<StateKey> = HashSet::new();
    let mut edge_move_count = 0u64;
    let mut edge_distinct_count = 0u64;
    let mut limit = 0u32;

    let terminated_by = loop {
        if cumulative >= config.cap {
            break Termination::CapReached;
        }
        limit += 1;

        let mut best_depth: HashMap<StateKey, u32> = HashMap::from([(root.clone(), 0)]);
        let mut stack: Vec<(StateKey, u32)> = vec![(root.clone(), 0)];
        while let Some((state, depth)) = stack.pop() {
            if best_depth.get(&state).is_some_and(|&d| d < depth) {
                // Superseded by a shallower discovery after being pushed.
                continue;
            }
            let succ = env.successors(&state)?;
            if stats_done.insert(state) {
                edge_move_count += desc.num_actions as u64;
                edge_distinct_count += count_distinct(&succ);
            }
            let next_depth = depth + 1;
            for s in succ {
                match best_depth.get(&s).copied() {
                    None => {
                        if best_depth.len() as u64 >= max_keys {
                            return Err(capacity_exceeded());
                        }
                        best_depth.insert(s.clone(), next_depth);
                        if next_depth < limit {
                            stack.push((s, next_depth));
                        }
                    }
                    Some(known) if known > next_depth => {
                        best_depth.insert(s.clone(), next_depth);
                        if next_depth < limit {
                            stack.push((s, next_depth));
                        }
                    }
                    Some(_) => {}
                }
            }
        }

        let new_states = best_depth.values().filter(|&&d| d == limit).count() as u64;
        cumulative += new_states;
        records.push(EnumerationRecord {
            frame: limit,
            new_states,
            cumulative_states: cumulative,
        });
        if new_states == 0 {
            break Termination::FrontierExhausted;
        }
    };

    Ok(EnumerationTrace { records, edge_move_count, edge_distinct_count, terminated_by })
}
