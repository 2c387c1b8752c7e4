//! Synthetic tree with exact, known branching factor.

use crate::env::{check_key_len, ActionId, EnvDescriptor, EnvError, Environment, StateKey};
use crate::envs::MakeEnvError;

const KEY_LEN: usize = 12;

/// A uniform tree of branching factor `b`: node `(frame, index)` has
/// children `(frame + 1, index * b + a)` for each action `a`. Every key is
/// unique, so the distinct-state count after `f` frames is exactly
/// `1 + b + ... + b^f`.
#[derive(Clone)]
pub struct UniformTree {
    desc: EnvDescriptor,
    b: u64,
    root: StateKey,
}

impl UniformTree {
    pub fn new(b: u32) -> Result<Self, MakeEnvError> {
        if !(1..=18).contains(&b) {
            return Err(MakeEnvError::BadParams(format!(
                "uniform_tree branching must be in 1..=18, got {b}"
            )));
        }
        Ok(UniformTree {
            desc: EnvDescriptor {
                name: "uniform_tree".into(),
                num_actions: b as usize,
                noop_action: ActionId(0),
                state_key_len: KEY_LEN,
                has_controller_state: false,
            },
            b: b as u64,
            root: encode(0, 0),
        })
    }
}

fn encode(frame: u32, index: u64) -> StateKey {
    let mut bytes = [0u8; KEY_LEN];
    bytes[..4].copy_from_slice(&frame.to_le_bytes());
    bytes[4..].copy_from_slice(&index.to_le_bytes());
    StateKey::new(bytes.to_vec())
}

fn decode(key: &StateKey) -> (u32, u64) {
    let bytes = key.as_bytes();
    let frame = u32::from_le_bytes(bytes[..4].try_into().unwrap());
    let index = u64::from_le_bytes(bytes[4..].try_into().unwrap());
    (frame, index)
}

impl Environment for UniformTree {
    fn descriptor(&self) -> &EnvDescriptor {
        &self.desc
    }

    fn initial_state(&mut self) -> Result<StateKey, EnvError> {
        Ok(self.root.clone())
    }

    fn successors(&mut self, state: &StateKey) -> Result<Vec<StateKey>, EnvError> {
        check_key_len(&self.desc, state)?;
        let (frame, index) = decode(state);
        Ok((0..self.b)
            .map(|a| encode(frame.wrapping_add(1), index.wrapping_mul(self.b).wrapping_add(a)))
            .collect())
    }

    fn warm_step(&mut self, action: ActionId) -> Result<StateKey, EnvError> {
        let root = self.root.clone();
        self.root = self.successors(&root)?.swap_remove(action.0);
        Ok(self.root.clone())
    }

    fn fork(&self) -> Result<Box<dyn Environment>, EnvError> {
        Ok(Box::new(self.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn children_are_distinct_and_indexed() {
        let mut env = UniformTree::new(2).unwrap();
        let node = encode(1, 0);
        let succ = env.successors(&node).unwrap();
        assert_eq!(succ, vec![encode(2, 0), encode(2, 1)]);
    }

    #[test]
    fn chain_degenerate_case_has_one_action() {
        let mut env = UniformTree::new(1).unwrap();
        assert_eq!(env.descriptor().num_actions, 1);
        let root = env.initial_state().unwrap();
        let succ = env.successors(&root).unwrap();
        assert_eq!(succ, vec![encode(1, 0)]);
    }

    #[test]
    fn wrong_key_length_is_malformed() {
        let mut env = UniformTree::new(3).unwrap();
        let err = env.successors(&StateKey::new(vec![0u8; 4])).unwrap_err();
        assert!(matches!(err, EnvError::MalformedState { expected: 12, actual: 4 }));
    }

    #[test]
    fn warm_step_moves_the_root() {
        let mut env = UniformTree::new(3).unwrap();
        let stepped = env.warm_step(ActionId(2)).unwrap();
        assert_eq!(stepped, encode(1, 2));
        assert_eq!(env.initial_state().unwrap(), stepped);
    }
}
