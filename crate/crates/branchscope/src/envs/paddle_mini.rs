//! Miniature paddle game demonstrating controller state outside core memory.

use crate::env::{check_key_len, ActionId, EnvDescriptor, EnvError, Environment, StateKey};

const T_MOD: u8 = 8;
const P_MIN: u8 = 0;
const P_MAX: u8 = 7;
const P_START: u8 = 3;
const PADDLE_DELTA: u8 = 1;

/// One core byte `t` that counts frames mod 8 plus a paddle position byte
/// `p` driven by {no-op, right, left} and clamped to `[0, 7]`.
///
/// With the full two-byte key there are 64 reachable states. With
/// `core_only` the paddle byte is projected out of both the key and the
/// dynamics (which is sound because `t` never depends on `p`), leaving the
/// 8 states an observer of core memory alone would count.
#[derive(Clone)]
pub struct PaddleMini {
    desc: EnvDescriptor,
    core_only: bool,
    root: StateKey,
}

impl PaddleMini {
    pub fn new(core_only: bool) -> Self {
        let root = if core_only {
            StateKey::new(vec![0u8])
        } else {
            StateKey::new(vec![0u8, P_START])
        };
        PaddleMini {
            desc: EnvDescriptor {
                name: "paddle_mini".into(),
                num_actions: 3,
                noop_action: ActionId(0),
                state_key_len: if core_only { 1 } else { 2 },
                has_controller_state: !core_only,
            },
            core_only,
            root,
        }
    }
}

impl Environment for PaddleMini {
    fn descriptor(&self) -> &EnvDescriptor {
        &self.desc
    }

    fn initial_state(&mut self) -> Result<StateKey, EnvError> {
        Ok(self.root.clone())
    }

    fn successors(&mut self, state: &StateKey) -> Result<Vec<StateKey>, EnvError> {
        check_key_len(&self.desc, state)?;
        let bytes = state.as_bytes();
        let t = (bytes[0] + 1) % T_MOD;
        if self.core_only {
            return Ok(vec![StateKey::new(vec![t]); 3]);
        }
        let p = bytes[1];
        let right = (p + PADDLE_DELTA).min(P_MAX);
        let left = if p >= P_MIN + PADDLE_DELTA { p - PADDLE_DELTA } else { P_MIN };
        Ok(vec![
            StateKey::new(vec![t, p]),
            StateKey::new(vec![t, right]),
            StateKey::new(vec![t, left]),
        ])
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
