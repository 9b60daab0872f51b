use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::domain::Millis;

#[derive(Debug, Clone, Copy)]
struct Slot {
    ready: Millis,
    vm: usize,
}

impl PartialEq for Slot {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Slot {}

impl PartialOrd for Slot {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Slot {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ready.total_cmp(&other.ready).then(self.vm.cmp(&other.vm))
    }
}

/// Next-free timestamps of every VM on one cloudlet, min-ordered by
/// `(ready_time, vm_index)`.
#[derive(Debug, Clone)]
pub struct VmSchedule {
    heap: BinaryHeap<Reverse<Slot>>,
}

impl VmSchedule {
    /// All VMs free at time zero.
    pub fn new(vm_count: usize) -> Self {
        VmSchedule::from_ready_times(&vec![0.0; vm_count])
    }

    pub fn from_ready_times(ready: &[Millis]) -> Self {
        assert!(!ready.is_empty(), "a cloudlet needs at least one VM");
        VmSchedule {
            heap: ready
                .iter()
                .enumerate()
                .map(|(vm, &ready)| Reverse(Slot { ready, vm }))
                .collect(),
        }
    }

    pub fn vm_count(&self) -> usize {
        self.heap.len()
    }

    /// `(ready_time, vm_index)` of the VM that frees up first.
    pub fn earliest(&self) -> (Millis, usize) {
        let Reverse(slot) = self.heap.peek().expect("non-empty");
        (slot.ready, slot.vm)
    }

    pub fn has_idle_vm(&self, now: Millis) -> bool {
        self.earliest().0 <= now
    }

    /// Ready times indexed by VM.
    pub fn ready_times(&self) -> Vec<Millis> {
        let mut out = vec![0.0; self.heap.len()];
        for Reverse(slot) in &self.heap {
            out[slot.vm] = slot.ready;
        }
        out
    }

    /// Occupies the earliest-ready VM for `exec` starting no sooner than
    /// `now`. Returns `(vm_index, start)`.
    pub fn commit(&mut self, now: Millis, exec: Millis) -> (usize, Millis) {
        let Reverse(mut slot) = self.heap.pop().expect("non-empty");
        let start = now.max(slot.ready);
        slot.ready = start + exec;
        let vm = slot.vm;
        self.heap.push(Reverse(slot));
        (vm, start)
    }
}
