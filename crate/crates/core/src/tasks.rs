//! Workload entities sharing the core: the network ISR, the network driver task,
//! the periodic critical task, and the bounded queue between ISR and driver.

use std::collections::VecDeque;

use crate::time::SimTime;

/// An opaque received packet. Only its arrival time and order matter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Packet {
    pub arrival_time: SimTime,
    pub sequence: u64,
}

/// Bounded FIFO filled by the ISR and drained by the driver.
///
/// A packet stays in the queue while the driver works on it and is removed when
/// processing completes, so `len() == enqueued - processed` at every instant.
#[derive(Debug, Clone)]
pub struct PacketQueue {
    capacity: usize,
    entries: VecDeque<Packet>,
}

impl PacketQueue {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "queue capacity must be positive");
        PacketQueue {
            capacity,
            entries: VecDeque::with_capacity(capacity.min(4096)),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() >= self.capacity
    }

    /// Appends `packet`, handing it back if the queue is already full.
    pub fn try_push(&mut self, packet: Packet) -> Result<(), Packet> {
        if self.is_full() {
            return Err(packet);
        }
        self.entries.push_back(packet);
        Ok(())
    }

    pub fn front(&self) -> Option<&Packet> {
        self.entries.front()
    }

    pub fn pop_front(&mut self) -> Option<Packet> {
        self.entries.pop_front()
    }
}

/// What happened to one packet arrival at the interrupt level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsrOutcome {
    /// ISR ran and the packet went into the queue.
    ReceivedEnqueued,
    /// ISR ran but the queue was full; packet dropped.
    ReceivedQueueFull,
    /// ISR ran but the policy refused the packet; counted with the full-queue drops.
    RejectedByPolicy,
    /// Network interrupts were off; no CPU consumed.
    IgnoredDisabled,
}

impl IsrOutcome {
    /// Whether the ISR executed (and charged its cost) for this arrival.
    pub fn executed(self) -> bool {
        !matches!(self, IsrOutcome::IgnoredDisabled)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IsrCounters {
    pub executed: u64,
    pub enqueued: u64,
    pub dropped_disabled: u64,
    pub dropped_full: u64,
}

impl IsrCounters {
    pub fn record(&mut self, outcome: IsrOutcome) {
        match outcome {
            IsrOutcome::ReceivedEnqueued => {
                self.executed += 1;
                self.enqueued += 1;
            }
            IsrOutcome::ReceivedQueueFull | IsrOutcome::RejectedByPolicy => {
                self.executed += 1;
                self.dropped_full += 1;
            }
            IsrOutcome::IgnoredDisabled => self.dropped_disabled += 1,
        }
    }
}

/// Network interrupt handler. Its logic runs at the arrival instant; its CPU cost
/// is then served at interrupt level ahead of every task.
#[derive(Debug, Clone)]
pub struct IsrModel {
    pub per_packet_cost: u64,
    pub counters: IsrCounters,
}

impl IsrModel {
    pub fn new(per_packet_cost: u64) -> Self {
        IsrModel {
            per_packet_cost,
            counters: IsrCounters::default(),
        }
    }
}

/// Network driver task: takes packets off the queue head one at a time.
#[derive(Debug, Clone)]
pub struct DriverModel {
    pub per_packet_cost: u64,
    pub processed: u64,
    /// Remaining work on the packet at the queue head, if one is in progress.
    in_flight: Option<u64>,
}

impl DriverModel {
    pub fn new(per_packet_cost: u64) -> Self {
        assert!(per_packet_cost > 0, "driver cost must be positive");
        DriverModel {
            per_packet_cost,
            processed: 0,
            in_flight: None,
        }
    }

    /// A started packet is always finished; new packets are only taken when not suspended.
    pub fn is_runnable(&self, queue: &PacketQueue, suspended: bool) -> bool {
        self.in_flight.is_some() || (!suspended && !queue.is_empty())
    }

    pub fn is_mid_packet(&self) -> bool {
        self.in_flight.is_some()
    }

    /// Work left before the next packet completes, starting the head packet if idle.
    pub fn next_chunk(&mut self, queue: &PacketQueue) -> u64 {
        match self.in_flight {
            Some(rem) => rem,
            None => {
                assert!(!queue.is_empty(), "driver dispatched with nothing to do");
                self.in_flight = Some(self.per_packet_cost);
                self.per_packet_cost
            }
        }
    }

    /// Charges `us` of CPU. Returns the finished packet when its work completes.
    pub fn advance(&mut self, us: u64, queue: &mut PacketQueue) -> Option<Packet> {
        let rem = self.in_flight.as_mut().expect("driver advanced while idle");
        *rem -= us;
        if *rem > 0 {
            return None;
        }
        self.in_flight = None;
        self.processed += 1;
        Some(queue.pop_front().expect("in-flight packet missing from queue"))
    }
}

/// Outcome of one critical-task cycle, reported at completion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleReport {
    pub cycle: u64,
    pub elapsed: u64,
    /// `(period - elapsed) / period`; positive means early.
    pub earliness: f64,
}

impl CycleReport {
    /// Lateness as a fraction of the period; zero for on-time cycles.
    pub fn lateness(&self) -> f64 {
        (-self.earliness).max(0.0)
    }
}

/// What the critical task does after a cycle completes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AfterCycle {
    SleepUntil(SimTime),
    StartNow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CriticalState {
    Running { cycle_start: SimTime, remaining: u64 },
    Sleeping { until: SimTime },
}

/// Periodic workload needing `work_per_cycle` of CPU every `period`.
#[derive(Debug, Clone)]
pub struct CriticalTask {
    pub period: u64,
    pub work_per_cycle: u64,
    pub cycles_completed: u64,
    /// Sum of `(elapsed - period)` over late cycles, in microseconds.
    pub lateness_us: u64,
    state: CriticalState,
}

impl CriticalTask {
    pub fn new(period: u64, work_per_cycle: u64) -> Self {
        assert!(period > 0 && work_per_cycle > 0);
        CriticalTask {
            period,
            work_per_cycle,
            cycles_completed: 0,
            lateness_us: 0,
            state: CriticalState::Running {
                cycle_start: SimTime::ZERO,
                remaining: work_per_cycle,
            },
        }
    }

    /// Accumulated lateness in units of the period.
    pub fn lateness_accum(&self) -> f64 {
        self.lateness_us as f64 / self.period as f64
    }

    pub fn is_running(&self) -> bool {
        matches!(self.state, CriticalState::Running { .. })
    }

    pub fn sleeping_until(&self) -> Option<SimTime> {
        match self.state {
            CriticalState::Sleeping { until } => Some(until),
            _ => None,
        }
    }

    pub fn remaining(&self) -> u64 {
        match self.state {
            CriticalState::Running { remaining, .. } => remaining,
            CriticalState::Sleeping { .. } => 0,
        }
    }

    pub fn start_cycle(&mut self, now: SimTime) {
        self.state = CriticalState::Running {
            cycle_start: now,
            remaining: self.work_per_cycle,
        };
    }

    /// Charges `us` of CPU. Returns the cycle report if this completed the cycle.
    pub fn advance(&mut self, us: u64, now: SimTime) -> Option<(CycleReport, AfterCycle)> {
        let CriticalState::Running { remaining, .. } = &mut self.state else {
            panic!("critical task advanced while sleeping");
        };
        *remaining -= us;
        if *remaining > 0 {
            return None;
        }
        Some(self.finish_cycle(now))
    }

    /// Closes the running cycle at `now`, books lateness and picks the next state.
    pub fn finish_cycle(&mut self, now: SimTime) -> (CycleReport, AfterCycle) {
        let CriticalState::Running { cycle_start, .. } = self.state else {
            panic!("no cycle in progress");
        };
        let elapsed = now - cycle_start;
        let report = CycleReport {
            cycle: self.cycles_completed,
            elapsed,
            earliness: (self.period as f64 - elapsed as f64) / self.period as f64,
        };
        self.cycles_completed += 1;
        let after = if elapsed < self.period {
            let until = cycle_start + self.period;
            self.state = CriticalState::Sleeping { until };
            AfterCycle::SleepUntil(until)
        } else {
            self.lateness_us += elapsed - self.period;
            self.start_cycle(now);
            AfterCycle::StartNow
        };
        (report, after)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pkt(seq: u64) -> Packet {
        Packet {
            arrival_time: SimTime::from_micros(seq),
            sequence: seq,
        }
    }

    #[test]
    fn queue_push_until_full() {
        let mut q = PacketQueue::new(100);
        for i in 0..3 {
            q.try_push(pkt(i)).unwrap();
        }
        q.try_push(pkt(3)).unwrap();
        assert_eq!(q.len(), 4);

        let mut full = PacketQueue::new(500);
        for i in 0..500 {
            full.try_push(pkt(i)).unwrap();
        }
        assert_eq!(full.try_push(pkt(500)), Err(pkt(500)));
        assert_eq!(full.len(), 500);
    }

    #[test]
    fn isr_counters_classify_once() {
        let mut c = IsrCounters::default();
        c.record(IsrOutcome::ReceivedEnqueued);
        c.record(IsrOutcome::ReceivedQueueFull);
        c.record(IsrOutcome::IgnoredDisabled);
        assert_eq!(c.executed, 2);
        assert_eq!(c.enqueued, 1);
        assert_eq!(c.dropped_full, 1);
        assert_eq!(c.dropped_disabled, 1);
    }

    #[test]
    fn driver_processes_fifo() {
        let mut q = PacketQueue::new(10);
        q.try_push(pkt(1)).unwrap();
        q.try_push(pkt(2)).unwrap();
        let mut d = DriverModel::new(10);
        assert!(d.is_runnable(&q, false));
        assert_eq!(d.next_chunk(&q), 10);
        assert_eq!(d.advance(4, &mut q), None);
        assert_eq!(q.len(), 2, "packet stays queued until processed");
        assert_eq!(d.next_chunk(&q), 6);
        assert_eq!(d.advance(6, &mut q), Some(pkt(1)));
        assert_eq!(q.front(), Some(&pkt(2)));
        assert_eq!(d.processed, 1);
    }

    #[test]
    fn driver_blocks_on_empty_queue_and_when_suspended() {
        let mut q = PacketQueue::new(10);
        let mut d = DriverModel::new(10);
        assert!(!d.is_runnable(&q, false));
        q.try_push(pkt(1)).unwrap();
        assert!(!d.is_runnable(&q, true));
        d.next_chunk(&q);
        // a started packet is finished even after suspension
        assert!(d.is_runnable(&q, true));
    }

    #[test]
    fn early_cycle_sleeps_to_boundary() {
        let mut c = CriticalTask::new(10_000, 6_000);
        let (r, after) = c.advance(6_000, SimTime::from_micros(6_000)).unwrap();
        assert_eq!(r.elapsed, 6_000);
        assert!((r.earliness - 0.40).abs() < 1e-12);
        assert_eq!(after, AfterCycle::SleepUntil(SimTime::from_micros(10_000)));
        assert_eq!(c.lateness_us, 0);
    }

    #[test]
    fn late_cycle_accumulates_and_restarts() {
        let mut c = CriticalTask::new(10_000, 6_000);
        let (r, after) = c.advance(6_000, SimTime::from_micros(16_000)).unwrap();
        assert!((r.earliness + 0.60).abs() < 1e-12);
        assert!((r.lateness() - 0.60).abs() < 1e-12);
        assert_eq!(after, AfterCycle::StartNow);
        assert!((c.lateness_accum() - 0.60).abs() < 1e-12);
        assert!(c.is_running());
    }

    #[test]
    fn exact_period_is_neither_early_nor_late() {
        let mut c = CriticalTask::new(10_000, 6_000);
        let (r, after) = c.advance(6_000, SimTime::from_micros(10_000)).unwrap();
        assert_eq!(r.earliness, 0.0);
        assert_eq!(r.lateness(), 0.0);
        assert_eq!(after, AfterCycle::StartNow);
        assert_eq!(c.lateness_us, 0);
    }
}
