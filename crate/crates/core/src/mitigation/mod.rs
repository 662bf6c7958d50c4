//! Overload mitigation policies.
//!
//! Every policy sees the system only through the hooks of [`MitigationPolicy`] and
//! acts only through two switches: network interrupts on/off and driver
//! suspended/resumed. Burst and the policy-driven driver poll loop additionally
//! ask the engine for timer events via [`PolicyCtx`].

mod budget;
mod burst;
mod hysteresis;
mod queue;

pub use budget::{Budget, BudgetConfig};
pub use burst::{Burst, BurstConfig};
pub use hysteresis::{Hysteresis, HysteresisConfig};
pub use queue::QueueMitigation;

use std::fmt;

use crate::time::SimTime;

/// The two controls a policy may flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Switches {
    pub interrupts_enabled: bool,
    pub driver_suspended: bool,
}

impl Default for Switches {
    fn default() -> Self {
        Switches {
            interrupts_enabled: true,
            driver_suspended: false,
        }
    }
}

/// Timer requests a policy can hand back to the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyRequest {
    /// Deliver `on_slice_boundary` at this instant.
    SliceBoundaryAt(SimTime),
    /// Put the held driver into a wait loop waking every `interval` microseconds.
    PollDriver { interval: u64 },
}

/// Handle passed to each hook.
pub struct PolicyCtx<'a> {
    now: SimTime,
    switches: &'a mut Switches,
    requests: &'a mut Vec<PolicyRequest>,
}

impl<'a> PolicyCtx<'a> {
    pub fn new(now: SimTime, switches: &'a mut Switches, requests: &'a mut Vec<PolicyRequest>) -> Self {
        PolicyCtx {
            now,
            switches,
            requests,
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn switches(&self) -> Switches {
        *self.switches
    }

    pub fn enable_interrupts(&mut self) {
        self.switches.interrupts_enabled = true;
    }

    pub fn disable_interrupts(&mut self) {
        self.switches.interrupts_enabled = false;
    }

    pub fn suspend_driver(&mut self) {
        self.switches.driver_suspended = true;
    }

    pub fn resume_driver(&mut self) {
        self.switches.driver_suspended = false;
    }

    pub fn request(&mut self, req: PolicyRequest) {
        self.requests.push(req);
    }
}

/// Verdict of the ISR admission hook.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    Admit,
    Reject,
}

/// Hook interface shared by all strategies. Defaults do nothing.
pub trait MitigationPolicy: Send {
    fn name(&self) -> &'static str;

    /// Called once before the first event, to set initial switch positions.
    fn on_start(&mut self, _ctx: &mut PolicyCtx<'_>) {}

    /// Network ISR is running for a new packet (interrupts are enabled).
    fn on_isr_admit(&mut self, _ctx: &mut PolicyCtx<'_>) -> Admission {
        Admission::Admit
    }

    fn on_enqueue_failure(&mut self, _ctx: &mut PolicyCtx<'_>) {}

    /// Driver finished a packet that took `cost` microseconds of driver time.
    fn on_packet_processed(&mut self, _ctx: &mut PolicyCtx<'_>, _cost: u64) {}

    /// Driver just drained the queue.
    fn on_queue_empty(&mut self, _ctx: &mut PolicyCtx<'_>) {}

    /// Critical task completed a cycle with the given earliness ratio.
    fn on_earliness_report(&mut self, _ctx: &mut PolicyCtx<'_>, _earliness: f64) {}

    fn on_slice_boundary(&mut self, _ctx: &mut PolicyCtx<'_>) {}
}

/// Scheduler only; no mitigation logic.
#[derive(Debug, Clone, Default)]
pub struct Baseline;

impl MitigationPolicy for Baseline {
    fn name(&self) -> &'static str {
        "baseline"
    }
}

/// Relative priority of the critical task and the network driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorityLayout {
    CriticalHigher,
    Equal,
}

impl PriorityLayout {
    /// Numeric `(critical, driver)` priorities; higher runs first.
    pub fn priorities(self) -> (u8, u8) {
        match self {
            PriorityLayout::CriticalHigher => (3, 2),
            PriorityLayout::Equal => (2, 2),
        }
    }
}

impl fmt::Display for PriorityLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PriorityLayout::CriticalHigher => "critical-higher",
            PriorityLayout::Equal => "equal",
        })
    }
}

/// Policy choice plus its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyConfig {
    Baseline { layout: PriorityLayout },
    Burst(BurstConfig),
    Hysteresis(HysteresisConfig),
    Budget(BudgetConfig),
    Queue,
}

impl PolicyConfig {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyConfig::Baseline { .. } => "baseline",
            PolicyConfig::Burst(_) => "burst",
            PolicyConfig::Hysteresis(_) => "hysteresis",
            PolicyConfig::Budget(_) => "budget",
            PolicyConfig::Queue => "queue",
        }
    }

    /// Instantiates the policy. Budget needs the critical period and ISR cost.
    pub fn build(&self, period_us: u64, isr_cost_us: u64) -> Box<dyn MitigationPolicy> {
        match self {
            PolicyConfig::Baseline { .. } => Box::new(Baseline),
            PolicyConfig::Burst(cfg) => Box::new(Burst::new(cfg.clone())),
            PolicyConfig::Hysteresis(cfg) => Box::new(Hysteresis::new(cfg.clone())),
            PolicyConfig::Budget(cfg) => Box::new(Budget::new(cfg.clone(), period_us, isr_cost_us)),
            PolicyConfig::Queue => Box::new(QueueMitigation::default()),
        }
    }
}

/// Default priority layout each policy is meant to run with.
pub fn policy_priority_profile(policy: &PolicyConfig) -> PriorityLayout {
    match policy {
        PolicyConfig::Baseline { layout } => *layout,
        PolicyConfig::Budget(_) => PriorityLayout::Equal,
        PolicyConfig::Burst(_) | PolicyConfig::Hysteresis(_) | PolicyConfig::Queue => {
            PriorityLayout::CriticalHigher
        }
    }
}
