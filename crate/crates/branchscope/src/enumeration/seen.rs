//! Deduplication set with a hard memory budget.

use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use crate::env::StateKey;

/// Bookkeeping bytes charged per stored key on top of the key bytes
/// themselves (table slot, allocation header, load-factor slack).
pub const SLOT_OVERHEAD_BYTES: u64 = 48;

/// Default budget: room for two million keys of up to 136 bytes each.
pub const DEFAULT_SEEN_BUDGET_BYTES: u64 = 2_000_000 * (136 + SLOT_OVERHEAD_BYTES);

/// Raised when an insert would grow the set past its configured budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CapacityExceeded {
    pub limit_keys: u64,
    pub budget_bytes: u64,
}

enum Store {
    /// Full key bytes; membership is exact.
    Exact(HashSet<StateKey>),
    /// 128-bit fingerprints of the key bytes, for memory-constrained runs.
    /// Distinct keys collide only with negligible probability, but results
    /// are no longer exact by construction.
    Fingerprint(HashSet<u128>),
}

pub struct SeenSet {
    store: Store,
    max_keys: u64,
    budget_bytes: u64,
}

impl SeenSet {
    pub fn new(key_len: usize, budget_bytes: u64, fingerprint: bool) -> SeenSet {
        let per_key = if fingerprint { 16 } else { key_len as u64 } + SLOT_OVERHEAD_BYTES;
        let store = if fingerprint {
            Store::Fingerprint(HashSet::new())
        } else {
            Store::Exact(HashSet::new())
        };
        SeenSet {
            store,
            max_keys: (budget_bytes / per_key).max(1),
            budget_bytes,
        }
    }

    /// Inserts `key`, returning `true` if it was not present.
    pub fn insert(&mut self, key: &StateKey) -> Result<bool, CapacityExceeded> {
        let full = self.len() >= self.max_keys;
        match &mut self.store {
            Store::Exact(set) => {
                if set.contains(key) {
                    return Ok(false);
                }
                if full {
                    return Err(self.exceeded());
                }
                set.insert(key.clone());
                Ok(true)
            }
            Store::Fingerprint(set) => {
                let fp = fingerprint128(key.as_bytes());
                if set.contains(&fp) {
                    return Ok(false);
                }
                if full {
                    return Err(self.exceeded());
                }
                set.insert(fp);
                Ok(true)
            }
        }
    }

    pub fn contains(&self, key: &StateKey) -> bool {
        match &self.store {
            Store::Exact(set) => set.contains(key),
            Store::Fingerprint(set) => set.contains(&fingerprint128(key.as_bytes())),
        }
    }

    pub fn len(&self) -> u64 {
        match &self.store {
            Store::Exact(set) => set.len() as u64,
            Store::Fingerprint(set) => set.len() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_keys(&self) -> u64 {
        self.max_keys
    }

    fn exceeded(&self) -> CapacityExceeded {
        CapacityExceeded { limit_keys: self.max_keys, budget_bytes: self.budget_bytes }
    }
}

/// 128-bit process-local fingerprint: two independently domain-separated
/// 64-bit hashes of the byte string.
fn fingerprint128(bytes: &[u8]) -> u128 {
    let mut a = std::hash::DefaultHasher::new();
    a.write_u8(0x01);
    bytes.hash(&mut a);
    let mut b = std::hash::DefaultHasher::new();
    b.write_u8(0x02);
    bytes.hash(&mut b);
    ((a.finish() as u128) << 64) | b.finish() as u128
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(n: u32) -> StateKey {
        StateKey::new(n.to_le_bytes().to_vec())
    }

    #[test]
    fn insert_reports_novelty() {
        let mut seen = SeenSet::new(4, DEFAULT_SEEN_BUDGET_BYTES, false);
        assert!(seen.insert(&key(7)).unwrap());
        assert!(!seen.insert(&key(7)).unwrap());
        assert!(seen.contains(&key(7)));
        assert!(!seen.contains(&key(8)));
        assert_eq!(seen.len(), 1);
    }

    #[test]
    fn budget_is_a_hard_error() {
        // Budget admits exactly 2 keys of 4 bytes.
        let mut seen = SeenSet::new(4, 2 * (4 + SLOT_OVERHEAD_BYTES), false);
        assert_eq!(seen.max_keys(), 2);
        seen.insert(&key(0)).unwrap();
        seen.insert(&key(1)).unwrap();
        assert!(!seen.insert(&key(0)).unwrap(), "re-inserts never trip the budget");
        let err = seen.insert(&key(2)).unwrap_err();
        assert_eq!(err.limit_keys, 2);
    }

    #[test]
    fn default_budget_fits_two_million_max_width_keys() {
        let seen = SeenSet::new(136, DEFAULT_SEEN_BUDGET_BYTES, false);
        assert_eq!(seen.max_keys(), 2_000_000);
    }

    #[test]
    fn fingerprint_mode_deduplicates_equal_keys() {
        let mut seen = SeenSet::new(64, DEFAULT_SEEN_BUDGET_BYTES, true);
        let a = StateKey::new(vec![9u8; 64]);
        assert!(seen.insert(&a).unwrap());
        assert!(!seen.insert(&a).unwrap());
        assert!(seen.insert(&StateKey::new(vec![8u8; 64])).unwrap());
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn fingerprint_mode_charges_sixteen_bytes_per_key() {
        let wide = SeenSet::new(4096, 100 * (16 + SLOT_OVERHEAD_BYTES), true);
        assert_eq!(wide.max_keys(), 100);
    }
}
