//! Consistency checks that catch environments violating the determinism or
//! key-completeness assumptions the estimates rest on.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::env::{ActionId, EnvError, Environment, StateKey};
use crate::enumeration::{bfs_enumerate_with, id_enumerate_with, EnumerationConfig, EnumerationError};
use crate::estimator::{estimate_from_trace, EstimateError};
use crate::trace::CrossCheckRecord;

#[derive(Debug, Error)]
pub enum ValidatorError {
    #[error("determinism probe needs at least 2 trials, got {0}")]
    InvalidTrials(usize),
    #[error("environment still dead after {steps} warm-up steps")]
    StillDead { steps: u32 },
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
}

/// Runs BFS and iterative deepening to the same cap and compares the
/// resulting estimates. On a well-behaved environment the traces are
/// byte-identical and `b_diff` is exactly zero.
pub fn cross_check(
    env: &mut dyn Environment,
    cap: u64,
) -> Result<CrossCheckRecord, ValidatorError> {
    cross_check_with(env, &EnumerationConfig::new(cap))
}

/// [`cross_check`] with explicit enumeration configuration.
pub fn cross_check_with(
    env: &mut dyn Environment,
    config: &EnumerationConfig,
) -> Result<CrossCheckRecord, ValidatorError> {
    let bfs = bfs_enumerate_with(env, config)?;
    let id = id_enumerate_with(env, config)?;
    let eb = estimate_from_trace(&bfs)?;
    let ei = estimate_from_trace(&id)?;
    let b_diff = if bfs == id { 0.0 } else { (eb.b - ei.b).abs() };
    Ok(CrossCheckRecord {
        env_name: env.descriptor().name.clone(),
        states_bfs: eb.states,
        states_id: ei.states,
        frames_bfs: eb.frames,
        frames_id: ei.frames,
        b_bfs: eb.b,
        b_id: ei.b,
        b_diff,
    })
}

/// Outcome of [`determinism_probe`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub deterministic: bool,
    pub divergence: Option<Divergence>,
}

/// First point at which a replay disagreed with the baseline trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divergence {
    /// 1-based index of the trial that disagreed.
    pub trial: usize,
    /// Frame of the first differing key; frame 0 is the initial state.
    pub frame: u32,
    pub expected: StateKey,
    pub actual: StateKey,
}

/// Replays one seeded pseudorandom action sequence `trials` times and
/// checks that every replay walks the same key sequence.
pub fn determinism_probe(
    env: &mut dyn Environment,
    sequence_length: u32,
    trials: usize,
    seed: u64,
) -> Result<ProbeReport, ValidatorError> {
    if trials < 2 {
        return Err(ValidatorError::InvalidTrials(trials));
    }
    let num_actions = env.descriptor().num_actions;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let actions: Vec<ActionId> = (0..sequence_length)
        .map(|_| ActionId(rng.random_range(0..num_actions)))
        .collect();

    let baseline = replay(env, &actions)?;
    for trial in 2..=trials {
        let walk = replay(env, &actions)?;
        for (frame, (expected, actual)) in baseline.iter().zip(walk.iter()).enumerate() {
            if expected != actual {
                return Ok(ProbeReport {
                    deterministic: false,
                    divergence: Some(Divergence {
                        trial,
                        frame: frame as u32,
                        expected: expected.clone(),
                        actual: actual.clone(),
                    }),
                });
            }
        }
    }
    Ok(ProbeReport { deterministic: true, divergence: None })
}

fn replay(env: &mut dyn Environment, actions: &[ActionId]) -> Result<Vec<StateKey>, ValidatorError> {
    env.begin_run();
    let mut keys = Vec::with_capacity(actions.len() + 1);
    let mut current = env.initial_state()?;
    keys.push(current.clone());
    for &action in actions {
        current = env.successors(&current)?.swap_remove(action.0);
        keys.push(current.clone());
    }
    Ok(keys)
}

/// True when every action from the initial state returns the initial key,
/// i.e. the environment ignores input at its root.
pub fn detect_dead_initial(env: &mut dyn Environment) -> Result<bool, ValidatorError> {
    let root = env.initial_state()?;
    let succ = env.successors(&root)?;
    Ok(succ.iter().all(|s| *s == root))
}

/// Result of [`warm_up`]: the root to enumerate from and how many no-op
/// steps it took to get there. Frame numbering restarts at the new root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WarmUp {
    pub root: StateKey,
    pub steps: u32,
}

/// Advances a dead-initial environment with its no-op action until it
/// responds to input, up to `max_steps`.
pub fn warm_up(env: &mut dyn Environment, max_steps: u32) -> Result<WarmUp, ValidatorError> {
    let noop = env.descriptor().noop_action;
    let mut steps = 0u32;
    loop {
        if !detect_dead_initial(env)? {
            let root = env.initial_state()?;
            return Ok(WarmUp { root, steps });
        }
        if steps >= max_steps {
            return Err(ValidatorError::StillDead { steps });
        }
        env.warm_step(noop)?;
        steps += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::EnvDescriptor;
    use crate::envs::{DeadStart, FreezeFrames, ModRotator, PaddleMini, UniformTree};
    use crate::enumeration::bfs_enumerate;

    #[test]
    fn cross_check_agrees_on_builtins() {
        let mut env = ModRotator::new(4).unwrap();
        let record = cross_check(&mut env, 4).unwrap();
        assert_eq!(record.env_name, "mod_rotator");
        assert_eq!(record.b_diff, 0.0);
        assert_eq!(record.states_bfs, record.states_id);
        assert_eq!(record.frames_bfs, record.frames_id);

        let mut env = UniformTree::new(2).unwrap();
        let record = cross_check(&mut env, 100).unwrap();
        assert_eq!(record.b_diff, 0.0);
        assert!((record.b_bfs - 2.0).abs() < 1e-9);
    }

    #[test]
    fn probe_accepts_deterministic_builtins() {
        for seed in [0u64, 7, 42] {
            let mut env = PaddleMini::new(false);
            let report = determinism_probe(&mut env, 64, 3, seed).unwrap();
            assert!(report.deterministic, "seed {seed}");
            assert_eq!(report.divergence, None);

            let mut env = FreezeFrames::new(2, 4, 2).unwrap();
            assert!(determinism_probe(&mut env, 64, 3, seed).unwrap().deterministic);

            let mut env = DeadStart::new(1);
            assert!(determinism_probe(&mut env, 64, 3, seed).unwrap().deterministic);
        }
    }

    #[test]
    fn probe_requires_two_trials() {
        let mut env = PaddleMini::new(false);
        assert!(matches!(
            determinism_probe(&mut env, 8, 1, 0),
            Err(ValidatorError::InvalidTrials(1))
        ));
    }

    /// Deliberately broken environment: the successor of the root flips on
    /// every call, so the second replay diverges at frame 1.
    struct Flicker {
        desc: EnvDescriptor,
        calls: u32,
    }

    impl Flicker {
        fn new() -> Self {
            Flicker {
                desc: EnvDescriptor {
                    name: "flicker".into(),
                    num_actions: 1,
                    noop_action: ActionId(0),
                    state_key_len: 1,
                    has_controller_state: false,
                },
                calls: 0,
            }
        }
    }

    impl Environment for Flicker {
        fn descriptor(&self) -> &EnvDescriptor {
            &self.desc
        }
        fn initial_state(&mut self) -> Result<StateKey, EnvError> {
            Ok(StateKey::new(vec![0u8]))
        }
        fn successors(&mut self, _: &StateKey) -> Result<Vec<StateKey>, EnvError> {
            self.calls += 1;
            Ok(vec![StateKey::new(vec![self.calls as u8])])
        }
        fn warm_step(&mut self, _: ActionId) -> Result<StateKey, EnvError> {
            self.initial_state()
        }
        fn fork(&self) -> Result<Box<dyn Environment>, EnvError> {
            Err(EnvError::AdapterFailure("not forkable".into()))
        }
    }

    #[test]
    fn probe_reports_first_divergence() {
        let mut env = Flicker::new();
        let report = determinism_probe(&mut env, 4, 2, 9).unwrap();
        assert!(!report.deterministic);
        let d = report.divergence.unwrap();
        assert_eq!(d.trial, 2);
        assert_eq!(d.frame, 1);
        assert_eq!(d.expected, StateKey::new(vec![1u8]));
        assert_eq!(d.actual, StateKey::new(vec![5u8]));
    }

    #[test]
    fn dead_initial_is_detected_and_warmable() {
        let mut env = DeadStart::new(1);
        assert!(detect_dead_initial(&mut env).unwrap());
        let wu = warm_up(&mut env, 100).unwrap();
        assert_eq!(wu.steps, 1);
        assert!(!detect_dead_initial(&mut env).unwrap());

        let trace = bfs_enumerate(&mut env, 100).unwrap();
        assert!(trace.records[1].cumulative_states > 1);
    }

    #[test]
    fn live_environments_warm_up_in_zero_steps() {
        let mut env = ModRotator::new(4).unwrap();
        assert!(!detect_dead_initial(&mut env).unwrap());
        let wu = warm_up(&mut env, 100).unwrap();
        assert_eq!(wu.steps, 0);
        assert_eq!(wu.root, env.initial_state().unwrap());
    }

    #[test]
    fn three_step_dead_window_takes_three_steps() {
        let mut env = DeadStart::new(3);
        let wu = warm_up(&mut env, 10).unwrap();
        assert_eq!(wu.steps, 3);
    }

    #[test]
    fn forever_dead_environment_errors() {
        let mut env = DeadStart::new(u32::MAX);
        let err = warm_up(&mut env, 5).unwrap_err();
        assert!(matches!(err, ValidatorError::StillDead { steps: 5 }));
    }

    #[test]
    fn unwarmed_dead_start_counts_one_state() {
        let mut env = DeadStart::new(1);
        let trace = bfs_enumerate(&mut env, 100).unwrap();
        assert_eq!(trace.final_record().cumulative_states, 1);
        let record = cross_check(&mut DeadStart::new(1), 100).unwrap();
        assert_eq!(record.b_diff, 0.0);
        assert_eq!(record.b_bfs, 0.0);
    }
}
