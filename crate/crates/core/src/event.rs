//! Future-event set ordered by `(time, insertion sequence)`.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::time::SimTime;

/// Where a packet arrival came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrivalSource {
    /// Produced by the load generator; handling it pulls the next one.
    Generator,
    /// Placed by hand (tests, external drivers).
    Injected,
}

/// Which entity a wakeup is addressed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WakeTarget {
    /// Critical task reaches its next period boundary.
    Critical,
    /// Network driver polling while held by a policy. Stale generations are ignored.
    DriverPoll { generation: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    PacketArrival(ArrivalSource),
    TickInterrupt,
    SliceBoundary,
    TaskWakeup(WakeTarget),
    ReportBoundary,
    SimEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub time: SimTime,
    pub kind: EventKind,
}

impl Event {
    pub fn new(time: SimTime, kind: EventKind) -> Self {
        Event { time, kind }
    }

    pub fn injected_arrival(time: SimTime) -> Self {
        Event::new(time, EventKind::PacketArrival(ArrivalSource::Injected))
    }
}

#[derive(Debug)]
struct Entry {
    time: SimTime,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.seq == other.seq
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.time, self.seq).cmp(&(other.time, other.seq))
    }
}

/// Min-heap of pending events. Equal timestamps pop in insertion order.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Reverse<Entry>>,
    next_seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, event: Event) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse(Entry {
            time: event.time,
            seq,
            kind: event.kind,
        }));
    }

    pub fn peek_time(&self) -> Option<SimTime> {
        self.heap.peek().map(|Reverse(e)| e.time)
    }

    /// Pops the earliest event if its time is `<= limit`.
    pub fn pop_due(&mut self, limit: SimTime) -> Option<Event> {
        match self.heap.peek() {
            Some(Reverse(e)) if e.time <= limit => {
                let Reverse(e) = self.heap.pop().unwrap();
                Some(Event::new(e.time, e.kind))
            }
            _ => None,
        }
    }

    pub fn pop(&mut self) -> Option<Event> {
        self.heap
            .pop()
            .map(|Reverse(e)| Event::new(e.time, e.kind))
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}
