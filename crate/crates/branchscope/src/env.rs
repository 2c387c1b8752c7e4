//! State identity and the environment contract shared by engines, built-ins and adapters.

use std::fmt;

use thiserror::Error;

/// Canonical identity of a state: a fixed-length byte string.
///
/// Core memory bytes come first; controller-extension bytes, if the
/// environment has any, are appended after them. The frame number is never
/// part of the key, so states reached at different frames compare equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey(Box<[u8]>);

impl StateKey {
    pub fn new(bytes: impl Into<Box<[u8]>>) -> Self {
        StateKey(bytes.into())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateKey(")?;
        for b in self.0.iter() {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0.iter() {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl AsRef<[u8]> for StateKey {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

/// Index of a discrete action, in `[0, num_actions)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub usize);

/// Static facts about an environment, fixed for its lifetime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvDescriptor {
    pub name: String,
    pub num_actions: usize,
    /// Action used when advancing without intent (warm-up steps).
    pub noop_action: ActionId,
    /// Exact byte length of every key this environment produces or accepts.
    pub state_key_len: usize,
    /// True when the key carries controller-extension bytes beyond core memory.
    pub has_controller_state: bool,
}

impl EnvDescriptor {
    /// Checks the structural invariants: at least one action, no-op index in
    /// range, non-empty key.
    pub fn validate(&self) -> Result<(), EnvError> {
        if self.num_actions == 0 {
            return Err(EnvError::AdapterFailure(format!(
                "descriptor for '{}' has zero actions",
                self.name
            )));
        }
        if self.noop_action.0 >= self.num_actions {
            return Err(EnvError::AdapterFailure(format!(
                "descriptor for '{}' has no-op index {} out of range (num_actions = {})",
                self.name, self.noop_action.0, self.num_actions
            )));
        }
        if self.state_key_len == 0 {
            return Err(EnvError::AdapterFailure(format!(
                "descriptor for '{}' has zero-length state keys",
                self.name
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum EnvError {
    /// The backing process or channel misbehaved (bad handshake, protocol
    /// violation, timeout, early exit).
    #[error("adapter failure: {0}")]
    AdapterFailure(String),
    /// A state key had the wrong length for this environment.
    #[error("malformed state key: expected {expected} bytes, got {actual}")]
    MalformedState { expected: usize, actual: usize },
}

/// A deterministic discrete-action environment.
///
/// `successors` must be a pure function of the key: two calls with equal keys
/// return byte-identical successor lists, one per action, in action order.
/// Engines rely on this to deduplicate states across paths. Implementations
/// need not be thread-safe; parallel engines obtain one instance per worker
/// via [`Environment::fork`].
pub trait Environment: Send {
    fn descriptor(&self) -> &EnvDescriptor;

    /// Key of the current root state.
    fn initial_state(&mut self) -> Result<StateKey, EnvError>;

    /// Successor keys of `state`, one per action, indexed by [`ActionId`].
    fn successors(&mut self, state: &StateKey) -> Result<Vec<StateKey>, EnvError>;

    /// Marks the start of a fresh enumeration run or replay trial.
    ///
    /// Implementations that memoize responses (adapters) drop per-run caches
    /// here so a new run observes the backing process afresh.
    fn begin_run(&mut self) {}

    /// Takes one action from the root and makes the outcome the new root.
    ///
    /// This is the only operation that advances internal, non-key state, and
    /// exists so warm-up can nudge environments whose initial state ignores
    /// input.
    fn warm_step(&mut self, action: ActionId) -> Result<StateKey, EnvError>;

    /// Creates an independent instance with the same dynamics and root,
    /// suitable for a parallel worker.
    fn fork(&self) -> Result<Box<dyn Environment>, EnvError>;
}

/// Verifies that `key` has the length the descriptor promises.
pub fn check_key_len(desc: &EnvDescriptor, key: &StateKey) -> Result<(), EnvError> {
    if key.len() != desc.state_key_len {
        return Err(EnvError::MalformedState {
            expected: desc.state_key_len,
            actual: key.len(),
        });
    }
    Ok(())
}
