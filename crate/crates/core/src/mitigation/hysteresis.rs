use super::{MitigationPolicy, PolicyCtx, PolicyRequest};

#[derive(Debug, Clone, PartialEq)]
pub struct HysteresisConfig {
    /// Block networking when reported earliness drops below this.
    pub block_threshold: f64,
    /// Unblock once reported earliness reaches this.
    pub unblock_threshold: f64,
    /// Sleep interval of the blocked driver's wait loop.
    pub poll_us: u64,
}

impl Default for HysteresisConfig {
    fn default() -> Self {
        HysteresisConfig {
            block_threshold: 0.10,
            unblock_threshold: 0.50,
            poll_us: 1_000,
        }
    }
}

/// Two-threshold control on the critical task's earliness.
///
/// ```text
///   late <---- blocked ----[ block .... dead band .... unblock )---- running ----> early
/// ```
#[derive(Debug, Clone)]
pub struct Hysteresis {
    cfg: HysteresisConfig,
    blocked: bool,
}

impl Hysteresis {
    pub fn new(cfg: HysteresisConfig) -> Self {
        assert!(
            cfg.block_threshold < cfg.unblock_threshold,
            "block threshold must lie below unblock threshold"
        );
        Hysteresis {
            cfg,
            blocked: false,
        }
    }

    pub fn is_blocked(&self) -> bool {
        self.blocked
    }
}

impl MitigationPolicy for Hysteresis {
    fn name(&self) -> &'static str {
        "hysteresis"
    }

    fn on_earliness_report(&mut self, ctx: &mut PolicyCtx<'_>, earliness: f64) {
        if earliness < self.cfg.block_threshold {
            if !self.blocked {
                self.blocked = true;
                ctx.disable_interrupts();
                ctx.suspend_driver();
                ctx.request(PolicyRequest::PollDriver {
                    interval: self.cfg.poll_us,
                });
            }
        } else if earliness >= self.cfg.unblock_threshold && self.blocked {
            self.blocked = false;
            ctx.enable_interrupts();
            ctx.resume_driver();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mitigation::test_support::Harness;

    #[test]
    fn low_earliness_blocks() {
        let mut h = Harness::default();
        let mut p = Hysteresis::new(HysteresisConfig::default());
        p.on_earliness_report(&mut h.ctx(0), 0.05);
        assert!(p.is_blocked());
        assert!(!h.switches.interrupts_enabled);
        assert!(h.switches.driver_suspended);
        assert_eq!(h.requests, vec![PolicyRequest::PollDriver { interval: 1_000 }]);
    }

    #[test]
    fn dead_band_holds_state() {
        let mut h = Harness::default();
        let mut p = Hysteresis::new(HysteresisConfig::default());
        p.on_earliness_report(&mut h.ctx(0), 0.30);
        assert!(!p.is_blocked());
        p.on_earliness_report(&mut h.ctx(1), 0.05);
        p.on_earliness_report(&mut h.ctx(2), 0.30);
        assert!(p.is_blocked());
        assert!(!h.switches.interrupts_enabled);
        // lower edge of the band does not block
        let mut p2 = Hysteresis::new(HysteresisConfig::default());
        p2.on_earliness_report(&mut h.ctx(3), 0.10);
        assert!(!p2.is_blocked());
    }

    #[test]
    fn high_earliness_unblocks() {
        let mut h = Harness::default();
        let mut p = Hysteresis::new(HysteresisConfig::default());
        p.on_earliness_report(&mut h.ctx(0), -0.2);
        p.on_earliness_report(&mut h.ctx(1), 0.55);
        assert!(!p.is_blocked());
        assert!(h.switches.interrupts_enabled);
        assert!(!h.switches.driver_suspended);
    }

    #[test]
    #[should_panic]
    fn inverted_thresholds_rejected() {
        Hysteresis::new(HysteresisConfig {
            block_threshold: 0.5,
            unblock_threshold: 0.1,
            poll_us: 1_000,
        });
    }
}
