//! Single-core discrete-event engine.
//!
//! Three execution levels share one CPU:
//!
//! 1. interrupt level: scheduler tick work, then network ISR work; always runs first,
//! 2. tasks by fixed priority (critical task, network driver); equal priorities
//!    round-robin with a time-slice quantum,
//! 3. idle.
//!
//! Time advances in steps bounded by the next pending event, the running entity's
//! remaining work and, when an equal-priority peer is ready, its remaining quantum.
//! Every microsecond is charged to exactly one entity.

use crate::error::ConfigError;
use crate::event::{ArrivalSource, Event, EventKind, EventQueue, WakeTarget};
use crate::loadgen::{ArrivalGenerator, LoadConfig};
use crate::metrics::{Counters, Meter, SecondSnapshot};
use crate::mitigation::{
    policy_priority_profile, Admission, MitigationPolicy, PolicyConfig, PolicyCtx, PolicyRequest,
    PriorityLayout, Switches,
};
use crate::tasks::{AfterCycle, CriticalTask, CycleReport, DriverModel, IsrModel, IsrOutcome, Packet, PacketQueue};
use crate::time::{SimTime, MICROS_PER_SEC};

/// Per-unit CPU costs, microseconds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostModel {
    pub isr_us: u64,
    pub driver_us: u64,
    /// Cost of one scheduler tick interrupt; 0 disables the tick stream.
    pub tick_us: u64,
    pub tick_interval_us: u64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            isr_us: 4,
            driver_us: 10,
            tick_us: 2,
            tick_interval_us: 1_000,
        }
    }
}

impl CostModel {
    /// Costs the builtin scenarios run with: a heavier ISR and lighter driver than
    /// the nominal defaults, so queue-size effects on lateness show up in range.
    pub fn calibrated() -> Self {
        CostModel {
            isr_us: 6,
            driver_us: 8,
            ..CostModel::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalConfig {
    pub period_us: u64,
    pub work_us: u64,
}

impl Default for CriticalConfig {
    fn default() -> Self {
        CriticalConfig {
            period_us: 10_000,
            work_us: 6_000,
        }
    }
}

/// Everything needed to build one simulation instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub costs: CostModel,
    pub critical: CriticalConfig,
    pub quantum_us: u64,
    pub queue_capacity: usize,
    pub priorities: PriorityLayout,
    pub policy: PolicyConfig,
    /// Generated traffic; `None` leaves only injected arrivals.
    pub load: Option<LoadConfig>,
    /// Record a [`TraceEvent`] log (memory grows with traffic).
    pub trace: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        let policy = PolicyConfig::Baseline {
            layout: PriorityLayout::CriticalHigher,
        };
        SimConfig {
            costs: CostModel::default(),
            critical: CriticalConfig::default(),
            quantum_us: 1_000,
            queue_capacity: 100,
            priorities: policy_priority_profile(&policy),
            policy,
            load: None,
            trace: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.costs.driver_us == 0 {
            return bad("driver cost must be positive");
        }
        if self.costs.tick_us > 0 && self.costs.tick_interval_us <= self.costs.tick_us {
            return bad("tick interval must exceed tick cost");
        }
        if self.critical.period_us == 0 || self.critical.work_us == 0 {
            return bad("critical period and work must be positive");
        }
        if self.quantum_us == 0 {
            return bad("quantum must be positive");
        }
        if self.queue_capacity == 0 {
            return bad("queue capacity must be positive");
        }
        if let PolicyConfig::Hysteresis(h) = &self.policy {
            if h.block_threshold.partial_cmp(&h.unblock_threshold) != Some(std::cmp::Ordering::Less) {
                return bad("hysteresis block threshold must be below unblock threshold");
            }
            if h.poll_us == 0 {
                return bad("hysteresis poll interval must be positive");
            }
        }
        if let PolicyConfig::Burst(b) = &self.policy {
            if b.capacity == 0 || b.slice_us == 0 {
                return bad("burst capacity and slice must be positive");
            }
        }
        if let Some(load) = &self.load {
            load.profile.validate()?;
        }
        Ok(())
    }
}

/// Who holds the CPU during a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entity {
    Tick,
    Isr,
    Driver,
    Critical,
    Idle,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceKind {
    Arrival { sequence: u64, outcome: IsrOutcome },
    Processed { sequence: u64 },
    /// `driver_cpu_us` is cumulative driver CPU at the report instant.
    Cycle { report: CycleReport, driver_cpu_us: u64 },
    Interrupts { enabled: bool },
    Driver { suspended: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub time: SimTime,
    pub kind: TraceKind,
}

/// Result of a completed run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub snapshots: Vec<SecondSnapshot>,
    /// Counters over the whole run, including any unreported partial second.
    pub totals: Counters,
    pub end_time: SimTime,
    pub final_queue_len: u64,
}

const CRITICAL: usize = 0;
const DRIVER: usize = 1;

#[derive(Debug, Clone)]
struct TaskSlot {
    priority: u8,
    ready_seq: u64,
    quantum_left: u64,
    was_runnable: bool,
}

pub struct Simulation {
    now: SimTime,
    events: EventQueue,
    quantum: u64,
    costs: CostModel,
    queue: PacketQueue,
    isr: IsrModel,
    driver: DriverModel,
    critical: CriticalTask,
    switches: Switches,
    policy: Box<dyn MitigationPolicy>,
    requests: Vec<PolicyRequest>,
    slots: [TaskSlot; 2],
    ready_counter: u64,
    tick_backlog: u64,
    isr_backlog: u64,
    generator: Option<ArrivalGenerator>,
    next_packet_seq: u64,
    meter: Meter,
    flushed: Counters,
    snapshots: Vec<SecondSnapshot>,
    reports_through: u64,
    intr_off_since: Option<SimTime>,
    driver_cpu_total: u64,
    poll_generation: u64,
    poll_interval: u64,
    trace: Option<Vec<TraceEvent>>,
}

fn min_horizon(work: u64, horizon: Option<u64>) -> u64 {
    horizon.map_or(work, |h| work.min(h))
}

impl Simulation {
    pub fn new(cfg: SimConfig) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let (crit_prio, drv_prio) = cfg.priorities.priorities();
        let slot = |priority| TaskSlot {
            priority,
            ready_seq: 0,
            quantum_left: cfg.quantum_us,
            was_runnable: false,
        };
        let mut sim = Simulation {
            now: SimTime::ZERO,
            events: EventQueue::new(),
            quantum: cfg.quantum_us,
            queue: PacketQueue::new(cfg.queue_capacity),
            isr: IsrModel::new(cfg.costs.isr_us),
            driver: DriverModel::new(cfg.costs.driver_us),
            critical: CriticalTask::new(cfg.critical.period_us, cfg.critical.work_us),
            switches: Switches::default(),
            policy: cfg.policy.build(cfg.critical.period_us, cfg.costs.isr_us),
            requests: Vec::new(),
            slots: [slot(crit_prio), slot(drv_prio)],
            ready_counter: 0,
            tick_backlog: 0,
            isr_backlog: 0,
            generator: cfg.load.clone().map(ArrivalGenerator::new),
            next_packet_seq: 0,
            meter: Meter::default(),
            flushed: Counters::default(),
            snapshots: Vec::new(),
            reports_through: 0,
            intr_off_since: None,
            driver_cpu_total: 0,
            poll_generation: 0,
            poll_interval: 0,
            trace: cfg.trace.then(Vec::new),
            costs: cfg.costs,
        };
        sim.with_policy(|p, ctx| p.on_start(ctx));
        if sim.costs.tick_us > 0 {
            sim.schedule(Event::new(
                SimTime::from_micros(sim.costs.tick_interval_us),
                EventKind::TickInterrupt,
            ));
        }
        sim.schedule_next_generated();
        Ok(sim)
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn switches(&self) -> Switches {
        self.switches
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    pub fn isr_backlog(&self) -> u64 {
        self.isr_backlog
    }

    pub fn critical(&self) -> &CriticalTask {
        &self.critical
    }

    pub fn driver(&self) -> &DriverModel {
        &self.driver
    }

    pub fn isr(&self) -> &IsrModel {
        &self.isr
    }

    pub fn pending_events(&self) -> usize {
        self.events.len()
    }

    /// Counters accumulated since the last report boundary.
    pub fn current_counters(&self) -> &Counters {
        &self.meter.current
    }

    pub fn snapshots(&self) -> &[SecondSnapshot] {
        &self.snapshots
    }

    pub fn trace(&self) -> Option<&[TraceEvent]> {
        self.trace.as_deref()
    }

    /// Removes and returns the trace recorded so far; recording continues.
    pub fn take_trace(&mut self) -> Vec<TraceEvent> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }

    /// Adds an event to the future-event set.
    ///
    /// # Panics
    /// If `event.time` is earlier than the current time.
    pub fn schedule(&mut self, event: Event) {
        assert!(
            event.time >= self.now,
            "cannot schedule {:?} at {} in the past (now {})",
            event.kind,
            event.time,
            self.now
        );
        self.events.push(event);
    }

    /// Processes every event up to and including `until` and returns the summary.
    /// Report boundaries fall on every whole second in `(now, until]`.
    pub fn run(&mut self, until: SimTime) -> RunSummary {
        assert!(until >= self.now, "run target lies in the past");
        let last_report = until.second();
        for s in (self.reports_through + 1)..=last_report {
            self.schedule(Event::new(SimTime::from_secs(s), EventKind::ReportBoundary));
        }
        self.reports_through = self.reports_through.max(last_report);
        self.schedule(Event::new(until, EventKind::SimEnd));

        loop {
            let mut ended = false;
            while let Some(ev) = self.events.pop_due(self.now) {
                if ev.kind == EventKind::SimEnd {
                    ended = true;
                } else {
                    self.handle(ev);
                }
            }
            if ended {
                break;
            }
            self.step();
        }
        self.summary()
    }

    pub fn summary(&self) -> RunSummary {
        let mut totals = self.flushed;
        totals.add(&self.meter.current);
        RunSummary {
            snapshots: self.snapshots.clone(),
            totals,
            end_time: self.now,
            final_queue_len: self.queue.len() as u64,
        }
    }

    /// Handles due events, then runs one CPU step. Returns the microseconds consumed.
    pub fn dispatch_step(&mut self) -> u64 {
        while let Some(ev) = self.events.pop_due(self.now) {
            if ev.kind != EventKind::SimEnd {
                self.handle(ev);
            }
        }
        self.step()
    }

    /// Entity that would receive the CPU right now.
    pub fn running_entity(&mut self) -> Entity {
        self.refresh_ready();
        self.pick()
    }

    fn next_ready_seq(&mut self) -> u64 {
        self.ready_counter += 1;
        self.ready_counter
    }

    fn is_runnable(&self, id: usize) -> bool {
        match id {
            CRITICAL => self.critical.is_running(),
            _ => self.driver.is_runnable(&self.queue, self.switches.driver_suspended),
        }
    }

    fn peer_runnable(&self, id: usize) -> bool {
        let other = 1 - id;
        self.slots[other].priority == self.slots[id].priority && self.is_runnable(other)
    }

    /// Newly ready tasks join the back of their priority level with a fresh quantum.
    fn refresh_ready(&mut self) {
        for id in [CRITICAL, DRIVER] {
            let r = self.is_runnable(id);
            if r && !self.slots[id].was_runnable {
                let seq = self.next_ready_seq();
                let slot = &mut self.slots[id];
                slot.ready_seq = seq;
                slot.quantum_left = self.quantum;
            }
            self.slots[id].was_runnable = r;
        }
    }

    fn pick(&self) -> Entity {
        if self.tick_backlog > 0 {
            return Entity::Tick;
        }
        if self.isr_backlog > 0 {
            return Entity::Isr;
        }
        let best = [CRITICAL, DRIVER]
            .into_iter()
            .filter(|&id| self.is_runnable(id))
            .min_by_key(|&id| (std::cmp::Reverse(self.slots[id].priority), self.slots[id].ready_seq));
        match best {
            Some(CRITICAL) => Entity::Critical,
            Some(_) => Entity::Driver,
            None => Entity::Idle,
        }
    }

    fn task_slice(&self, id: usize, work: u64, horizon: Option<u64>) -> u64 {
        let d = min_horizon(work, horizon);
        if self.peer_runnable(id) {
            d.min(self.slots[id].quantum_left)
        } else {
            d
        }
    }

    /// Quantum bookkeeping after a task ran `d` microseconds.
    fn consume_quantum(&mut self, id: usize, d: u64) {
        let left = self.slots[id].quantum_left.saturating_sub(d);
        if left > 0 {
            self.slots[id].quantum_left = left;
            return;
        }
        self.slots[id].quantum_left = self.quantum;
        if self.peer_runnable(id) && self.is_runnable(id) {
            let seq = self.next_ready_seq();
            self.slots[id].ready_seq = seq;
        }
    }

    fn step(&mut self) -> u64 {
        self.refresh_ready();
        let horizon = self.events.peek_time().map(|t| t - self.now);
        match self.pick() {
            Entity::Tick => {
                let d = min_horizon(self.tick_backlog, horizon);
                self.tick_backlog -= d;
                self.meter.current.cpu.tick += d;
                self.now += d;
                d
            }
            Entity::Isr => {
                let d = min_horizon(self.isr_backlog, horizon);
                self.isr_backlog -= d;
                self.meter.current.cpu.isr += d;
                self.now += d;
                d
            }
            Entity::Critical => {
                let d = self.task_slice(CRITICAL, self.critical.remaining(), horizon);
                self.meter.current.cpu.critical += d;
                self.now += d;
                if let Some((report, after)) = self.critical.advance(d, self.now) {
                    self.on_cycle_complete(report, after);
                }
                self.consume_quantum(CRITICAL, d);
                d
            }
            Entity::Driver => {
                let work = self.driver.next_chunk(&self.queue);
                let d = self.task_slice(DRIVER, work, horizon);
                self.meter.current.cpu.driver += d;
                self.driver_cpu_total += d;
                self.now += d;
                if let Some(pkt) = self.driver.advance(d, &mut self.queue) {
                    self.on_packet_processed(pkt);
                }
                self.consume_quantum(DRIVER, d);
                d
            }
            Entity::Idle => {
                let Some(d) = horizon else { return 0 };
                self.meter.current.cpu.idle += d;
                self.now += d;
                d
            }
        }
    }

    fn handle(&mut self, ev: Event) {
        debug_assert_eq!(ev.time, self.now);
        match ev.kind {
            EventKind::PacketArrival(src) => {
                self.on_arrival();
                if src == ArrivalSource::Generator {
                    self.schedule_next_generated();
                }
            }
            EventKind::TickInterrupt => {
                self.tick_backlog += self.costs.tick_us;
                self.schedule(Event::new(self.now + self.costs.tick_interval_us, EventKind::TickInterrupt));
            }
            EventKind::SliceBoundary => self.with_policy(|p, ctx| p.on_slice_boundary(ctx)),
            EventKind::TaskWakeup(WakeTarget::Critical) => {
                debug_assert_eq!(self.critical.sleeping_until(), Some(self.now));
                self.critical.start_cycle(self.now);
            }
            EventKind::TaskWakeup(WakeTarget::DriverPoll { generation }) => {
                if generation == self.poll_generation && self.switches.driver_suspended {
                    self.meter.current.driver_polls += 1;
                    self.schedule(Event::new(
                        self.now + self.poll_interval,
                        EventKind::TaskWakeup(WakeTarget::DriverPoll { generation }),
                    ));
                }
            }
            EventKind::ReportBoundary => self.flush_second(),
            EventKind::SimEnd => {}
        }
    }

    fn schedule_next_generated(&mut self) {
        if let Some(t) = self.generator.as_mut().and_then(Iterator::next) {
            self.schedule(Event::new(t, EventKind::PacketArrival(ArrivalSource::Generator)));
        }
    }

    fn on_arrival(&mut self) {
        self.meter.current.sent += 1;
        let packet = Packet {
            arrival_time: self.now,
            sequence: self.next_packet_seq,
        };
        self.next_packet_seq += 1;

        let outcome = if !self.switches.interrupts_enabled {
            IsrOutcome::IgnoredDisabled
        } else {
            self.isr_backlog += self.isr.per_packet_cost;
            match self.with_policy(|p, ctx| p.on_isr_admit(ctx)) {
                Admission::Reject => IsrOutcome::RejectedByPolicy,
                Admission::Admit => match self.queue.try_push(packet) {
                    Ok(()) => IsrOutcome::ReceivedEnqueued,
                    Err(_) => {
                        self.with_policy(|p, ctx| p.on_enqueue_failure(ctx));
                        IsrOutcome::ReceivedQueueFull
                    }
                },
            }
        };

        self.isr.counters.record(outcome);
        let m = &mut self.meter.current;
        match outcome {
            IsrOutcome::ReceivedEnqueued => {
                m.isr_executed += 1;
                m.enqueued += 1;
            }
            IsrOutcome::ReceivedQueueFull | IsrOutcome::RejectedByPolicy => {
                m.isr_executed += 1;
                m.dropped_full += 1;
            }
            IsrOutcome::IgnoredDisabled => m.dropped_disabled += 1,
        }
        self.record(TraceKind::Arrival {
            sequence: packet.sequence,
            outcome,
        });
    }

    fn on_packet_processed(&mut self, pkt: Packet) {
        self.meter.current.processed += 1;
        self.record(TraceKind::Processed { sequence: pkt.sequence });
        let cost = self.driver.per_packet_cost;
        self.with_policy(|p, ctx| p.on_packet_processed(ctx, cost));
        if self.queue.is_empty() {
            self.with_policy(|p, ctx| p.on_queue_empty(ctx));
        }
    }

    fn on_cycle_complete(&mut self, report: CycleReport, after: AfterCycle) {
        self.meter.current.cycles_completed += 1;
        if report.elapsed > self.critical.period {
            self.meter.current.lateness_us += report.elapsed - self.critical.period;
        }
        self.record(TraceKind::Cycle {
            report,
            driver_cpu_us: self.driver_cpu_total,
        });
        self.with_policy(|p, ctx| p.on_earliness_report(ctx, report.earliness));
        if let AfterCycle::SleepUntil(t) = after {
            self.schedule(Event::new(t, EventKind::TaskWakeup(WakeTarget::Critical)));
        }
    }

    fn flush_second(&mut self) {
        debug_assert_eq!(self.now.as_micros() % MICROS_PER_SEC, 0);
        if let Some(since) = self.intr_off_since {
            self.meter.current.interrupts_off_us += self.now - since;
            self.intr_off_since = Some(self.now);
        }
        let second = self.now.second() - 1;
        let (snap, counters) = self
            .meter
            .flush_second(second, self.queue.len() as u64, self.critical.period);
        self.flushed.add(&counters);
        self.snapshots.push(snap);
    }

    fn record(&mut self, kind: TraceKind) {
        if let Some(t) = self.trace.as_mut() {
            t.push(TraceEvent { time: self.now, kind });
        }
    }

    /// Runs one policy hook and applies whatever it changed.
    fn with_policy<R>(&mut self, f: impl FnOnce(&mut dyn MitigationPolicy, &mut PolicyCtx<'_>) -> R) -> R {
        let before = self.switches;
        let mut requests = std::mem::take(&mut self.requests);
        let out = {
            let mut ctx = PolicyCtx::new(self.now, &mut self.switches, &mut requests);
            f(self.policy.as_mut(), &mut ctx)
        };
        self.apply_switch_changes(before);
        for req in requests.drain(..) {
            match req {
                PolicyRequest::SliceBoundaryAt(t) => self.schedule(Event::new(t, EventKind::SliceBoundary)),
                PolicyRequest::PollDriver { interval } => {
                    self.poll_generation += 1;
                    self.poll_interval = interval;
                    self.schedule(Event::new(
                        self.now + interval,
                        EventKind::TaskWakeup(WakeTarget::DriverPoll {
                            generation: self.poll_generation,
                        }),
                    ));
                }
            }
        }
        self.requests = requests;
        out
    }

    fn apply_switch_changes(&mut self, before: Switches) {
        let after = self.switches;
        if before.interrupts_enabled != after.interrupts_enabled {
            if after.interrupts_enabled {
                if let Some(since) = self.intr_off_since.take() {
                    self.meter.current.interrupts_off_us += self.now - since;
                }
            } else {
                self.intr_off_since = Some(self.now);
            }
            self.record(TraceKind::Interrupts {
                enabled: after.interrupts_enabled,
            });
        }
        if before.driver_suspended != after.driver_suspended {
            if after.driver_suspended {
                self.meter.current.suspensions += 1;
            }
            self.record(TraceKind::Driver {
                suspended: after.driver_suspended,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mitigation::{BudgetConfig, HysteresisConfig};

    fn quiet() -> SimConfig {
        SimConfig {
            costs: CostModel {
                tick_us: 0,
                ..CostModel::default()
            },
            ..SimConfig::default()
        }
    }

    #[test]
    #[should_panic(expected = "in the past")]
    fn scheduling_in_the_past_faults() {
        let mut sim = Simulation::new(quiet()).unwrap();
        sim.schedule(Event::new(SimTime::from_micros(100), EventKind::SimEnd));
        sim.run(SimTime::from_micros(100));
        sim.schedule(Event::injected_arrival(SimTime::from_micros(99)));
    }

    #[test]
    fn empty_run_is_all_zero() {
        let mut sim = Simulation::new(SimConfig::default()).unwrap();
        let s = sim.run(SimTime::ZERO);
        assert_eq!(s.totals, Counters::default());
        assert!(s.snapshots.is_empty());
    }

    #[test]
    fn no_load_one_second() {
        // 100 periods of 10ms fit exactly; 6ms work each, never late.
        let mut sim = Simulation::new(SimConfig::default()).unwrap();
        let s = sim.run(SimTime::from_secs(1));
        assert_eq!(s.snapshots.len(), 1);
        assert_eq!(s.snapshots[0].cycles_completed, 100);
        assert_eq!(s.totals.lateness_us, 0);
        assert_eq!(s.totals.cpu.critical, 600_000);
        // ticks at 1ms..=1000ms; the one at exactly 1s belongs to the next second
        assert_eq!(s.totals.cpu.tick, 999 * 2);
        assert_eq!(s.totals.cpu.total(), 1_000_000);
    }

    #[test]
    fn isr_preempts_critical() {
        let mut sim = Simulation::new(quiet()).unwrap();
        sim.schedule(Event::injected_arrival(SimTime::from_micros(100)));
        assert_eq!(sim.running_entity(), Entity::Critical);
        assert_eq!(sim.dispatch_step(), 100);
        assert_eq!(sim.dispatch_step(), 4);
        assert_eq!(sim.current_counters().cpu.isr, 4);
        assert_eq!(sim.current_counters().cpu.critical, 100);
        assert_eq!(sim.running_entity(), Entity::Critical);
        assert_eq!(sim.critical().remaining(), 5_900);
    }

    #[test]
    fn equal_priorities_alternate_every_quantum() {
        let cfg = SimConfig {
            priorities: PriorityLayout::Equal,
            queue_capacity: 1_000,
            ..quiet()
        };
        let mut sim = Simulation::new(cfg).unwrap();
        // fill the queue well beyond a few quanta of driver work
        for i in 0..800 {
            sim.schedule(Event::injected_arrival(SimTime::from_micros(i)));
        }
        sim.run(SimTime::from_micros(800));
        // after the ISR burst both tasks are ready; observe whole steps
        let mut segments: Vec<(Entity, u64)> = Vec::new();
        while sim.now() < SimTime::from_micros(7_000) {
            let who = sim.running_entity();
            let d = sim.dispatch_step();
            match segments.last_mut() {
                Some((e, len)) if *e == who => *len += d,
                _ => segments.push((who, d)),
            }
        }
        let tasks: Vec<_> = segments
            .iter()
            .filter(|(e, _)| matches!(e, Entity::Critical | Entity::Driver))
            .collect();
        for w in tasks.windows(2) {
            assert_ne!(w[0].0, w[1].0, "tasks must alternate: {segments:?}");
        }
        for (_, len) in &tasks[1..tasks.len() - 1] {
            assert_eq!(*len, 1_000, "{segments:?}");
        }
    }

    #[test]
    fn higher_priority_critical_starves_driver() {
        let mut sim = Simulation::new(quiet()).unwrap();
        for i in 0..10 {
            sim.schedule(Event::injected_arrival(SimTime::from_micros(i * 10)));
        }
        sim.run(SimTime::from_micros(5_999));
        assert_eq!(sim.current_counters().cpu.driver, 0);
        assert_eq!(sim.queue_len(), 10);
        sim.run(SimTime::from_micros(6_000 + 40 + 100));
        assert_eq!(sim.driver().processed, 10);
    }

    #[test]
    fn driver_blocks_on_empty_queue() {
        let mut sim = Simulation::new(SimConfig {
            priorities: PriorityLayout::Equal,
            ..quiet()
        })
        .unwrap();
        sim.run(SimTime::from_micros(7_000));
        assert_eq!(sim.current_counters().cpu.driver, 0);
        assert_eq!(sim.current_counters().cpu.idle, 1_000);
    }

    #[test]
    fn disabled_arrival_costs_nothing() {
        let cfg = SimConfig {
            policy: PolicyConfig::Budget(BudgetConfig::default()),
            priorities: PriorityLayout::Equal,
            ..quiet()
        };
        let mut sim = Simulation::new(cfg).unwrap();
        assert!(!sim.switches().interrupts_enabled);
        sim.schedule(Event::injected_arrival(SimTime::from_micros(10)));
        sim.run(SimTime::from_micros(20));
        assert_eq!(sim.isr().counters.dropped_disabled, 1);
        assert_eq!(sim.current_counters().cpu.isr, 0);
        assert_eq!(sim.queue_len(), 0);
        assert_eq!(sim.current_counters().interrupts_off_us, 0, "accounted at flush or re-enable");
    }

    #[test]
    fn queue_full_drop_and_reenable_on_drain() {
        let cfg = SimConfig {
            policy: PolicyConfig::Queue,
            queue_capacity: 5,
            ..quiet()
        };
        let mut sim = Simulation::new(cfg).unwrap();
        for i in 0..8 {
            sim.schedule(Event::injected_arrival(SimTime::from_micros(10 + i * 10)));
        }
        sim.run(SimTime::from_micros(200));
        let c = sim.isr().counters;
        assert_eq!(c.enqueued, 5);
        assert_eq!(c.dropped_full, 1);
        assert_eq!(c.dropped_disabled, 2);
        assert!(!sim.switches().interrupts_enabled);
        // critical sleeps from 6000+isr; driver drains 5 packets then interrupts return
        sim.run(SimTime::from_micros(7_000));
        assert_eq!(sim.driver().processed, 5);
        assert!(sim.switches().interrupts_enabled);
    }

    #[test]
    fn hysteresis_polls_while_blocked() {
        let cfg = SimConfig {
            policy: PolicyConfig::Hysteresis(HysteresisConfig::default()),
            critical: CriticalConfig {
                period_us: 10_000,
                work_us: 9_500,
            },
            ..quiet()
        };
        let mut sim = Simulation::new(cfg).unwrap();
        sim.run(SimTime::from_micros(9_500));
        assert!(sim.switches().driver_suspended);
        sim.run(SimTime::from_micros(15_000));
        assert_eq!(sim.current_counters().driver_polls, 5);
    }
}
