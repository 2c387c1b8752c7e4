//! Environment whose initial state ignores input until warmed up.

use crate::env::{check_key_len, ActionId, EnvDescriptor, EnvError, Environment, StateKey};

const T_MOD: u8 = 16;

/// Reproduces the uninitialized-start failure mode: an internal flag, kept
/// deliberately outside the key, makes every action return the initial key
/// until `dead_steps` warm-up steps have been taken. Afterwards the first
/// byte counts frames mod 16 and three actions move the second byte by
/// 0 / +1 / -1 (wrapping).
///
/// The Markov contract is violated only at the root, and only until warm-up:
/// the same key `[0, 0]` answers differently before and after.
#[derive(Clone)]
pub struct DeadStart {
    desc: EnvDescriptor,
    dead_remaining: u32,
    root: StateKey,
}

impl DeadStart {
    pub fn new(dead_steps: u32) -> Self {
        DeadStart {
            desc: EnvDescriptor {
                name: "dead_start".into(),
                num_actions: 3,
                noop_action: ActionId(0),
                state_key_len: 2,
                has_controller_state: false,
            },
            dead_remaining: dead_steps,
            root: StateKey::new(vec![0u8, 0u8]),
        }
    }

    fn live_successors(state: &StateKey) -> Vec<StateKey> {
        let bytes = state.as_bytes();
        let t = (bytes[0] + 1) % T_MOD;
        let p = bytes[1];
        vec![
            StateKey::new(vec![t, p]),
            StateKey::new(vec![t, p.wrapping_add(1)]),
            StateKey::new(vec![t, p.wrapping_sub(1)]),
        ]
    }
}

impl Environment for DeadStart {
    fn descriptor(&self) -> &EnvDescriptor {
        &self.desc
    }

    fn initial_state(&mut self) -> Result<StateKey, EnvError> {
        Ok(self.root.clone())
    }

    fn successors(&mut self, state: &StateKey) -> Result<Vec<StateKey>, EnvError> {
        check_key_len(&self.desc, state)?;
        if self.dead_remaining > 0 {
            return Ok(vec![state.clone(); self.desc.num_actions]);
        }
        Ok(Self::live_successors(state))
    }

    fn warm_step(&mut self, action: ActionId) -> Result<StateKey, EnvError> {
        if self.dead_remaining > 0 {
            // The step lands on the unchanged initial memory; it only burns
            // down the uninitialized window.
            self.dead_remaining -= 1;
            return Ok(self.root.clone());
        }
        let root = self.root.clone();
        self.root = self.successors(&root)?.swap_remove(action.0);
        Ok(self.root.clone())
    }

    fn fork(&self) -> Result<Box<dyn Environment>, EnvError> {
        Ok(Box::new(self.clone()))
    }
}
