//! Small cyclic graph where states are reachable along many paths.

use crate::env::{check_key_len, ActionId, EnvDescriptor, EnvError, Environment, StateKey};
use crate::envs::MakeEnvError;

const KEY_LEN: usize = 4;

/// Position on a ring of `m` cells with actions `+1` and `-1` (mod `m`).
/// Both neighbors of every cell are shared with other cells, so edge
/// branching stays at 2 while node branching collapses once the ring fills.
#[derive(Clone)]
pub struct ModRotator {
    desc: EnvDescriptor,
    m: u32,
    root: StateKey,
}

impl ModRotator {
    pub fn new(m: u32) -> Result<Self, MakeEnvError> {
        if m < 2 {
            return Err(MakeEnvError::BadParams(format!(
                "mod_rotator modulus must be >= 2, got {m}"
            )));
        }
        Ok(ModRotator {
            desc: EnvDescriptor {
                name: "mod_rotator".into(),
                num_actions: 2,
                noop_action: ActionId(0),
                state_key_len: KEY_LEN,
                has_controller_state: false,
            },
            m,
            root: encode(0),
        })
    }
}

fn encode(pos: u32) -> StateKey {
    StateKey::new(pos.to_le_bytes().to_vec())
}

fn decode(key: &StateKey) -> u32 {
    u32::from_le_bytes(key.as_bytes().try_into().unwrap())
}

impl Environment for ModRotator {
    fn descriptor(&self) -> &EnvDescriptor {
        &self.desc
    }

    fn initial_state(&mut self) -> Result<StateKey, EnvError> {
        Ok(self.root.clone())
    }

    fn successors(&mut self, state: &StateKey) -> Result<Vec<StateKey>, EnvError> {
        check_key_len(&self.desc, state)?;
        let pos = decode(state) % self.m;
        Ok(vec![
            encode((pos + 1) % self.m),
            encode((pos + self.m - 1) % self.m),
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
