use super::{MitigationPolicy, PolicyCtx};

/// Uses the receive queue fill state as the overload signal: interrupts go off
/// when the ISR fails to enqueue and come back when the driver drains the queue.
#[derive(Debug, Clone, Default)]
pub struct QueueMitigation {
    disabled_by_policy: bool,
}

impl QueueMitigation {
    pub fn interrupts_disabled_by_policy(&self) -> bool {
        self.disabled_by_policy
    }
}

impl MitigationPolicy for QueueMitigation {
    fn name(&self) -> &'static str {
        "queue"
    }

    fn on_enqueue_failure(&mut self, ctx: &mut PolicyCtx<'_>) {
        self.disabled_by_policy = true;
        ctx.disable_interrupts();
    }

    fn on_queue_empty(&mut self, ctx: &mut PolicyCtx<'_>) {
        if self.disabled_by_policy {
            self.disabled_by_policy = false;
            ctx.enable_interrupts();
        }
    }
}
