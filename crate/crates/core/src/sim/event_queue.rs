use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct Scheduled<T, E> {
    pub time: T,
    pub seq: u64,
    pub event: E,
}

impl<T: Real, E> PartialEq for Scheduled<T, E> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Real, E> Eq for Scheduled<T, E> {}

impl<T: Real, E> PartialOrd for Scheduled<T, E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real, E> Ord for Scheduled<T, E> {
    // Reversed so the earliest event pops first.
    // Times are never NaN; the engine rejects non-finite delays first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .partial_cmp(&self.time)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Future event list ordered by `(time, insertion sequence)`.
#[derive(Debug)]
pub struct EventQueue<T, E> {
    heap: BinaryHeap<Scheduled<T, E>>,
    next_seq: u64,
}

impl<T: Real, E> Default for EventQueue<T, E> {
    fn default() -> Self {
        EventQueue {
            heap: BinaryHeap::new(),
            next_seq: 0,
        }
    }
}

impl<T: Real, E> EventQueue<T, E> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn schedule(&mut self, time: T, event: E) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Scheduled { time, seq, event });
    }

    pub fn peek_time(&self) -> Option<T> {
        self.heap.peek().map(|s| s.time)
    }

    pub fn pop(&mut self) -> Option<Scheduled<T, E>> {
        self.heap.pop()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_then_insertion_order() {
        let mut q = EventQueue::<f64, &str>::new();
        q.schedule(5.0, "c");
        q.schedule(1.0, "a");
        q.schedule(5.0, "d");
        q.schedule(1.0, "b");
        q.schedule(0.5, "first");
        let order: Vec<&str> = std::iter::from_fn(|| q.pop().map(|s| s.event)).collect();
        assert_eq!(order, vec!["first", "a", "b", "c", "d"]);
        assert!(q.is_empty());
    }

    #[test]
    fn sequence_numbers_are_monotone() {
        let mut q = EventQueue::<f32, u8>::new();
        for i in 0..10 {
            q.schedule(1.0, i);
        }
        let seqs: Vec<u64> = std::iter::from_fn(|| q.pop().map(|s| s.seq)).collect();
        assert_eq!(seqs, (0..10).collect::<Vec<_>>());
    }
}
