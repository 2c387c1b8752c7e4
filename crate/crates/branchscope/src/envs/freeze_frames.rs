//! Environment where input is ignored for stretches of frames.

use crate::env::{check_key_len, ActionId, EnvDescriptor, EnvError, Environment, StateKey};
use crate::envs::MakeEnvError;

/// State `(phase, pos)` over `m` positions. While `phase > 0` every action
/// yields `(phase - 1, pos)`; at `phase = 0` action `a` yields
/// `(k, (pos + a) mod m)`. Input therefore only matters once every `k + 1`
/// frames, deflating the branching factor the same way frame-skip does.
#[derive(Clone)]
pub struct FreezeFrames {
    desc: EnvDescriptor,
    k: u8,
    m: u8,
    root: StateKey,
}

impl FreezeFrames {
    pub fn new(k: u8, m: u8, a: u8) -> Result<Self, MakeEnvError> {
        if k < 1 {
            return Err(MakeEnvError::BadParams("freeze_frames k must be >= 1".into()));
        }
        if m < 2 {
            return Err(MakeEnvError::BadParams("freeze_frames m must be >= 2".into()));
        }
        if a < 1 {
            return Err(MakeEnvError::BadParams("freeze_frames a must be >= 1".into()));
        }
        Ok(FreezeFrames {
            desc: EnvDescriptor {
                name: "freeze_frames".into(),
                num_actions: a as usize,
                noop_action: ActionId(0),
                state_key_len: 2,
                has_controller_state: false,
            },
            k,
            m,
            root: StateKey::new(vec![0u8, 0u8]),
        })
    }
}

impl Environment for FreezeFrames {
    fn descriptor(&self) -> &EnvDescriptor {
        &self.desc
    }

    fn initial_state(&mut self) -> Result<StateKey, EnvError> {
        Ok(self.root.clone())
    }

    fn successors(&mut self, state: &StateKey) -> Result<Vec<StateKey>, EnvError> {
        check_key_len(&self.desc, state)?;
        let bytes = state.as_bytes();
        let (phase, pos) = (bytes[0], bytes[1]);
        if phase > 0 {
            return Ok(vec![StateKey::new(vec![phase - 1, pos]); self.desc.num_actions]);
        }
        Ok((0..self.desc.num_actions as u16)
            .map(|a| {
                let shifted = ((pos as u16 + a) % self.m as u16) as u8;
                StateKey::new(vec![self.k, shifted])
            })
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
