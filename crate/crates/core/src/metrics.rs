//! Per-second counters and the CSV report format.

use std::fmt::Write as _;

use crate::time::MICROS_PER_SEC;

pub const CSV_HEADER: &str =
    "second,sent,received,dropped_disabled,dropped_full,processed,cycles,lateness_pct,queue_len,intr_off_frac";

/// CPU time charged to each execution context, in microseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CpuTime {
    pub isr: u64,
    pub tick: u64,
    pub driver: u64,
    pub critical: u64,
    pub idle: u64,
}

impl CpuTime {
    pub fn total(&self) -> u64 {
        self.isr + self.tick + self.driver + self.critical + self.idle
    }

    pub fn add(&mut self, other: &CpuTime) {
        self.isr += other.isr;
        self.tick += other.tick;
        self.driver += other.driver;
        self.critical += other.critical;
        self.idle += other.idle;
    }
}

/// Raw counters accumulated between two report boundaries (or over a whole run).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub sent: u64,
    pub isr_executed: u64,
    pub enqueued: u64,
    pub dropped_disabled: u64,
    pub dropped_full: u64,
    pub processed: u64,
    pub cycles_completed: u64,
    /// Lateness summed over late cycles, microseconds.
    pub lateness_us: u64,
    /// Times a policy suspended the driver.
    pub suspensions: u64,
    pub driver_polls: u64,
    /// Network interrupts-off time, microseconds.
    pub interrupts_off_us: u64,
    pub cpu: CpuTime,
}

impl Counters {
    pub fn add(&mut self, o: &Counters) {
        self.sent += o.sent;
        self.isr_executed += o.isr_executed;
        self.enqueued += o.enqueued;
        self.dropped_disabled += o.dropped_disabled;
        self.dropped_full += o.dropped_full;
        self.processed += o.processed;
        self.cycles_completed += o.cycles_completed;
        self.lateness_us += o.lateness_us;
        self.suspensions += o.suspensions;
        self.driver_polls += o.driver_polls;
        self.interrupts_off_us += o.interrupts_off_us;
        self.cpu.add(&o.cpu);
    }
}

/// One virtual second of observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondSnapshot {
    pub second: u64,
    pub sent: u64,
    pub isr_executed: u64,
    pub enqueued: u64,
    pub dropped_disabled: u64,
    pub dropped_full: u64,
    pub processed: u64,
    pub cycles_completed: u64,
    /// Sum of per-cycle lateness fractions completed this second.
    pub lateness_accum: f64,
    pub queue_len_end: u64,
    pub interrupts_disabled_fraction: f64,
    pub suspensions: u64,
    pub driver_polls: u64,
    pub cpu: CpuTime,
}

impl SecondSnapshot {
    /// Received is what the ISR executed, including packets it then dropped.
    pub fn received(&self) -> u64 {
        self.isr_executed
    }

    pub fn lateness_pct(&self) -> f64 {
        self.lateness_accum * 100.0
    }
}

/// Accumulates one second's counters and turns them into a snapshot.
#[derive(Debug, Clone, Default)]
pub struct Meter {
    pub current: Counters,
}

impl Meter {
    /// Emits the snapshot for `second` and clears the counters.
    /// `queue_len` is sampled, not accumulated.
    pub fn flush_second(&mut self, second: u64, queue_len: u64, period_us: u64) -> (SecondSnapshot, Counters) {
        let c = std::mem::take(&mut self.current);
        let snap = SecondSnapshot {
            second,
            sent: c.sent,
            isr_executed: c.isr_executed,
            enqueued: c.enqueued,
            dropped_disabled: c.dropped_disabled,
            dropped_full: c.dropped_full,
            processed: c.processed,
            cycles_completed: c.cycles_completed,
            lateness_accum: c.lateness_us as f64 / period_us as f64,
            queue_len_end: queue_len,
            interrupts_disabled_fraction: c.interrupts_off_us as f64 / MICROS_PER_SEC as f64,
            suspensions: c.suspensions,
            driver_polls: c.driver_polls,
            cpu: c.cpu,
        };
        (snap, c)
    }
}

pub fn to_csv_row(s: &SecondSnapshot) -> String {
    format!(
        "{},{},{},{},{},{},{},{:.2},{},{:.6}",
        s.second,
        s.sent,
        s.received(),
        s.dropped_disabled,
        s.dropped_full,
        s.processed,
        s.cycles_completed,
        s.lateness_pct(),
        s.queue_len_end,
        s.interrupts_disabled_fraction,
    )
}

/// Header plus one row per snapshot, newline-terminated.
pub fn to_csv(snapshots: &[SecondSnapshot]) -> String {
    let mut out = String::with_capacity(64 * (snapshots.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in snapshots {
        let _ = writeln!(out, "{}", to_csv_row(s));
    }
    out
}
