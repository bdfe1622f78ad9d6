//! Bounded FIFO memory of (solution fingerprint, operator pair) keys.
//! Deterministic destroy-repair pairs applied to an already-seen solution
//! would reproduce a known result, so the pair selection vetoes them.

use std::collections::{HashSet, VecDeque};

pub type TabuKey = (u64, u8);

#[derive(Clone, Debug)]
pub struct TabuList {
    capacity: usize,
    set: HashSet<TabuKey>,
    order: VecDeque<TabuKey>,
}

impl TabuList {
    pub fn new(capacity: usize) -> Self {
        TabuList { capacity: capacity.max(1), set: HashSet::new(), order: VecDeque::new() }
    }

    pub fn contains(&self, key: TabuKey) -> bool {
        self.set.contains(&key)
    }

    pub fn record(&mut self, key: TabuKey) {
        if self.set.contains(&key) {
            return;
        }
        if self.order.len() == self.capacity {
            if let Some(old) = self.order.pop_front() {
                self.set.remove(&old);
            }
        }
        self.order.push_back(key);
        self.set.insert(key);
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}
