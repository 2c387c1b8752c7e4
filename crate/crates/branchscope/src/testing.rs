//! Deterministic fixtures for tests and benches.

use crate::env::{check_key_len, ActionId, EnvDescriptor, EnvError, Environment, StateKey};
use crate::envs::MakeEnvError;

/// Environment defined by an explicit transition table: state `i` under
/// action `a` moves to `table[i][a]`. Keys are the state index as a
/// little-endian `u32`.
#[derive(Clone)]
pub struct TableEnv {
    desc: EnvDescriptor,
    table: Vec<Vec<u32>>,
    root: StateKey,
}

impl TableEnv {
    pub fn new(name: &str, table: Vec<Vec<u32>>, root: u32) -> Result<Self, MakeEnvError> {
        let n = table.len() as u32;
        if n == 0 {
            return Err(MakeEnvError::BadParams("table must be non-empty".into()));
        }
        let actions = table[0].len();
        if actions == 0 {
            return Err(MakeEnvError::BadParams("table needs at least one action".into()));
        }
        for row in &table {
            if row.len() != actions {
                return Err(MakeEnvError::BadParams("ragged transition table".into()));
            }
            if row.iter().any(|&t| t >= n) {
                return Err(MakeEnvError::BadParams("transition target out of range".into()));
            }
        }
        if root >= n {
            return Err(MakeEnvError::BadParams("root out of range".into()));
        }
        Ok(TableEnv {
            desc: EnvDescriptor {
                name: name.into(),
                num_actions: actions,
                noop_action: ActionId(0),
                state_key_len: 4,
                has_controller_state: false,
            },
            table,
            root: encode(root),
        })
    }
}

fn encode(state: u32) -> StateKey {
    StateKey::new(state.to_le_bytes().to_vec())
}

impl Environment for TableEnv {
    fn descriptor(&self) -> &EnvDescriptor {
        &self.desc
    }

    fn initial_state(&mut self) -> Result<StateKey, EnvError> {
        Ok(self.root.clone())
    }

    fn successors(&mut self, state: &StateKey) -> Result<Vec<StateKey>, EnvError> {
        check_key_len(&self.desc, state)?;
        let idx = u32::from_le_bytes(state.as_bytes().try_into().unwrap()) as usize;
        let row = self.table.get(idx).ok_or(EnvError::MalformedState {
            expected: self.desc.state_key_len,
            actual: state.len(),
        })?;
        Ok(row.iter().map(|&t| encode(t)).collect())
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
    fn table_env_follows_its_table() {
        let mut env = TableEnv::new("t", vec![vec![1, 0], vec![1, 1]], 0).unwrap();
        assert_eq!(env.initial_state().unwrap(), encode(0));
        assert_eq!(env.successors(&encode(0)).unwrap(), vec![encode(1), encode(0)]);
    }

    #[test]
    fn invalid_tables_are_rejected() {
        assert!(TableEnv::new("t", vec![], 0).is_err());
        assert!(TableEnv::new("t", vec![vec![0], vec![]], 0).is_err());
        assert!(TableEnv::new("t", vec![vec![2]], 0).is_err());
        assert!(TableEnv::new("t", vec![vec![0]], 5).is_err());
    }
}
