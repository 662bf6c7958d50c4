use super::{Admission, MitigationPolicy, PolicyCtx};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BudgetConfig {
    /// Also bill ISR time against the budget, not just driver time.
    pub charge_isr_time: bool,
}

/// Gives the network subsystem a CPU allowance equal to the critical task's last
/// reported slack (`period * earliness`).
///
/// Each report replaces the budget. Driver time is billed per completed packet,
/// so the budget may overshoot by at most one packet. While the budget is `<= 0`
/// the driver is suspended and interrupts are off. Networking starts suspended
/// until the first report arrives.
#[derive(Debug, Clone)]
pub struct Budget {
    cfg: BudgetConfig,
    period_us: u64,
    isr_cost_us: u64,
    remaining: i64,
}

impl Budget {
    pub fn new(cfg: BudgetConfig, period_us: u64, isr_cost_us: u64) -> Self {
        Budget {
            cfg,
            period_us,
            isr_cost_us,
            remaining: 0,
        }
    }

    pub fn remaining(&self) -> i64 {
        self.remaining
    }

    fn apply(&self, ctx: &mut PolicyCtx<'_>) {
        if self.remaining > 0 {
            ctx.enable_interrupts();
            ctx.resume_driver();
        } else {
            ctx.disable_interrupts();
            ctx.suspend_driver();
        }
    }

    fn charge(&mut self, ctx: &mut PolicyCtx<'_>, us: u64) {
        self.remaining -= us as i64;
        if self.remaining <= 0 {
            self.apply(ctx);
        }
    }
}

impl MitigationPolicy for Budget {
    fn name(&self) -> &'static str {
        "budget"
    }

    fn on_start(&mut self, ctx: &mut PolicyCtx<'_>) {
        self.apply(ctx);
    }

    fn on_isr_admit(&mut self, ctx: &mut PolicyCtx<'_>) -> Admission {
        if self.cfg.charge_isr_time {
            self.charge(ctx, self.isr_cost_us);
        }
        Admission::Admit
    }

    fn on_packet_processed(&mut self, ctx: &mut PolicyCtx<'_>, cost: u64) {
        self.charge(ctx, cost);
    }

    fn on_earliness_report(&mut self, ctx: &mut PolicyCtx<'_>, earliness: f64) {
        self.remaining = (self.period_us as f64 * earliness).round() as i64;
        self.apply(ctx);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mitigation::test_support::Harness;

    #[test]
    fn starts_suspended() {
        let mut h = Harness::default();
        let mut b = Budget::new(BudgetConfig::default(), 10_000, 6);
        b.on_start(&mut h.ctx(0));
        assert!(!h.switches.interrupts_enabled);
        assert!(h.switches.driver_suspended);
    }

    #[test]
    fn report_sets_budget_and_resumes() {
        let mut h = Harness::default();
        let mut b = Budget::new(BudgetConfig::default(), 10_000, 6);
        b.on_start(&mut h.ctx(0));
        b.on_earliness_report(&mut h.ctx(6_000), 0.40);
        assert_eq!(b.remaining(), 4_000);
        assert!(h.switches.interrupts_enabled);
        assert!(!h.switches.driver_suspended);
    }

    #[test]
    fn four_hundred_packets_deplete_four_milliseconds() {
        let mut h = Harness::default();
        let mut b = Budget::new(BudgetConfig::default(), 10_000, 6);
        b.on_earliness_report(&mut h.ctx(0), 0.40);
        for i in 0..399 {
            b.on_packet_processed(&mut h.ctx(i), 10);
            assert!(!h.switches.driver_suspended);
        }
        b.on_packet_processed(&mut h.ctx(400), 10);
        assert_eq!(b.remaining(), 0);
        assert!(h.switches.driver_suspended);
        assert!(!h.switches.interrupts_enabled);
    }

    #[test]
    fn report_replaces_rather_than_accumulates() {
        let mut h = Harness::default();
        let mut b = Budget::new(BudgetConfig::default(), 10_000, 6);
        b.on_earliness_report(&mut h.ctx(0), 0.40);
        b.on_earliness_report(&mut h.ctx(10_000), 0.40);
        assert_eq!(b.remaining(), 4_000);
    }

    #[test]
    fn non_positive_earliness_keeps_suspended() {
        let mut h = Harness::default();
        let mut b = Budget::new(BudgetConfig::default(), 10_000, 6);
        b.on_earliness_report(&mut h.ctx(0), 0.40);
        b.on_earliness_report(&mut h.ctx(20_000), -0.25);
        assert_eq!(b.remaining(), -2_500);
        assert!(h.switches.driver_suspended);
        b.on_earliness_report(&mut h.ctx(30_000), 0.0);
        assert!(h.switches.driver_suspended);
        assert!(!h.switches.interrupts_enabled);
    }

    #[test]
    fn isr_charging_only_when_enabled() {
        let mut h = Harness::default();
        let mut plain = Budget::new(BudgetConfig::default(), 10_000, 6);
        plain.on_earliness_report(&mut h.ctx(0), 0.01);
        for _ in 0..100 {
            plain.on_isr_admit(&mut h.ctx(1));
        }
        assert_eq!(plain.remaining(), 100);

        let mut h = Harness::default();
        let mut charged = Budget::new(BudgetConfig { charge_isr_time: true }, 10_000, 6);
        charged.on_earliness_report(&mut h.ctx(0), 0.01);
        for _ in 0..16 {
            charged.on_isr_admit(&mut h.ctx(1));
        }
        assert!(h.switches.interrupts_enabled);
        charged.on_isr_admit(&mut h.ctx(2));
        assert_eq!(charged.remaining(), -2);
        assert!(!h.switches.interrupts_enabled);
    }
}
