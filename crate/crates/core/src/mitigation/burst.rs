use crate::time::SimTime;

use super::{Admission, MitigationPolicy, PolicyCtx, PolicyRequest};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BurstConfig {
    pub slice_us: u64,
    /// Packets admitted per slice before interrupts go off.
    pub capacity: u32,
}

impl Default for BurstConfig {
    fn default() -> Self {
        BurstConfig {
            slice_us: 20_000,
            capacity: 600,
        }
    }
}

/// Caps ISR executions per fixed time slice.
///
/// The ISR counts packets in the current slice. The packet that brings the count
/// to `capacity` is still admitted; interrupts then stay off until the next slice
/// boundary, delivered as a timer event because no ISR runs while they are off.
#[derive(Debug, Clone)]
pub struct Burst {
    cfg: BurstConfig,
    slice_start: SimTime,
    count: u32,
    tripped: bool,
}

impl Burst {
    pub fn new(cfg: BurstConfig) -> Self {
        assert!(cfg.slice_us > 0 && cfg.capacity > 0);
        Burst {
            cfg,
            slice_start: SimTime::ZERO,
            count: 0,
            tripped: false,
        }
    }

    pub fn count_in_slice(&self) -> u32 {
        self.count
    }

    pub fn slice_start(&self) -> SimTime {
        self.slice_start
    }

    fn roll_slice(&mut self, now: SimTime) {
        let since = now - self.slice_start;
        if since >= self.cfg.slice_us {
            self.slice_start = SimTime::from_micros(now.as_micros() - since % self.cfg.slice_us);
            self.count = 0;
        }
    }
}

impl MitigationPolicy for Burst {
    fn name(&self) -> &'static str {
        "burst"
    }

    fn on_isr_admit(&mut self, ctx: &mut PolicyCtx<'_>) -> Admission {
        self.roll_slice(ctx.now());
        self.count += 1;
        if self.count >= self.cfg.capacity && !self.tripped {
            self.tripped = true;
            ctx.disable_interrupts();
            ctx.request(PolicyRequest::SliceBoundaryAt(self.slice_start + self.cfg.slice_us));
        }
        Admission::Admit
    }

    fn on_slice_boundary(&mut self, ctx: &mut PolicyCtx<'_>) {
        if self.tripped {
            self.tripped = false;
            self.roll_slice(ctx.now());
            ctx.enable_interrupts();
        }
    }
}
