//! Breadth-first enumeration with optional data-parallel frame expansion.

use crate::env::{Environment, StateKey};
use crate::trace::{EnumerationRecord, EnumerationTrace, Termination};

use super::seen::SeenSet;
use super::{count_distinct, EnumerationConfig, EnumerationError};

/// Successor lists for one frontier, in frontier order, with the summed
/// per-state distinct counts.
struct Expansion {
    successor_lists: Vec<Vec<StateKey>>,
    distinct: u64,
}

pub(super) fn run(
    env: &mut dyn Environment,
    config: &EnumerationConfig,
) -> Result<EnumerationTrace, EnumerationError> {
    if config.cap < 1 {
        return Err(EnumerationError::InvalidCap);
    }
    if config.workers > 1 && !cfg!(feature = "parallel") {
        return Err(EnumerationError::ParallelUnavailable);
    }

    env.begin_run();
    let desc = env.descriptor().clone();
    let root = env.initial_state()?;
    crate::env::check_key_len(&desc, &root)?;

    let mut seen = SeenSet::new(desc.state_key_len, config.seen_budget_bytes, config.fingerprint);
    seen.insert(&root)?;

    let mut workers = Workers::new(env, config.workers)?;

    let mut records = vec![EnumerationRecord { frame: 0, new_states: 1, cumulative_states: 1 }];
    let mut frontier = vec![root];
    let mut cumulative = 1u64;
    let mut frame = 0u32;
    let mut edge_move_count = 0u64;
    let mut edge_distinct_count = 0u64;

    let terminated_by = loop {
        if cumulative >= config.cap {
            break Termination::CapReached;
        }

        let expansion = workers.expand(&frontier)?;
        edge_move_count += frontier.len() as u64 * desc.num_actions as u64;
        edge_distinct_count += expansion.distinct;

        // Merging in frontier order keeps the next frontier's order
        // independent of worker count.
        let mut next = Vec::new();
        for succ in expansion.successor_lists.into_iter().flatten() {
            if seen.insert(&succ)? {
                next.push(succ);
            }
        }

        frame += 1;
        cumulative += next.len() as u64;
        records.push(EnumerationRecord {
            frame,
            new_states: next.len() as u64,
            cumulative_states: cumulative,
        });
        if next.is_empty() {
            break Termination::FrontierExhausted;
        }
        frontier = next;
    };

    Ok(EnumerationTrace { records, edge_move_count, edge_distinct_count, terminated_by })
}

enum Workers<'e> {
    Sequential(&'e mut dyn Environment),
    #[cfg(feature = "parallel")]
    Pool {
        envs: Vec<Box<dyn Environment>>,
        pool: rayon::ThreadPool,
    },
}

impl<'e> Workers<'e> {
    fn new(env: &'e mut dyn Environment, workers: usize) -> Result<Self, EnumerationError> {
        if workers <= 1 {
            return Ok(Workers::Sequential(env));
        }
        #[cfg(feature = "parallel")]
        {
            let envs = (0..workers).map(|_| env.fork()).collect::<Result<Vec<_>, _>>()?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| EnumerationError::WorkerPool(e.to_string()))?;
            Ok(Workers::Pool { envs, pool })
        }
        #[cfg(not(feature = "parallel"))]
        Err(EnumerationError::ParallelUnavailable)
    }

    fn expand(&mut self, frontier: &[StateKey]) -> Result<Expansion, EnumerationError> {
        match self {
            Workers::Sequential(env) => {
                let mut successor_lists = Vec::with_capacity(frontier.len());
                let mut distinct = 0u64;
                for state in frontier {
                    let succ = env.successors(state)?;
                    distinct += count_distinct(&succ);
                    successor_lists.push(succ);
                }
                Ok(Expansion { successor_lists, distinct })
            }
            #[cfg(feature = "parallel")]
            Workers::Pool { envs, pool } => {
                use rayon::prelude::*;
                type ChunkExpansion = (Vec<Vec<StateKey>>, u64);
                let chunk_len = frontier.len().div_ceil(envs.len()).max(1);
                let per_chunk: Result<Vec<ChunkExpansion>, EnumerationError> =
                    pool.install(|| {
                        frontier
                            .par_chunks(chunk_len)
                            .zip(envs.par_iter_mut())
                            .map(|(chunk, env)| {
                                let mut lists = Vec::with_capacity(chunk.len());
                                let mut distinct = 0u64;
                                for state in chunk {
                                    let succ = env.successors(state)?;
                                    distinct += count_distinct(&succ);
                                    lists.push(succ);
                                }
                                Ok((lists, distinct))
                            })
                            .collect()
                    });
                let per_chunk = per_chunk?;
                let mut successor_lists = Vec::with_capacity(frontier.len());
                let mut distinct = 0u64;
                for (lists, d) in per_chunk {
                    successor_lists.extend(lists);
                    distinct += d;
                }
                Ok(Expansion { successor_lists, distinct })
            }
        }
    }
}
