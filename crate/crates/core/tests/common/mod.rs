#![allow(dead_code)]

use proptest::prelude::*;
use rtsim::engine::{CostModel, CriticalConfig, SimConfig};
use rtsim::loadgen::{ArrivalMode, LoadConfig, PyramidProfile};
use rtsim::metrics::SecondSnapshot;
use rtsim::mitigation::{BudgetConfig, BurstConfig, HysteresisConfig, PolicyConfig, PriorityLayout};

/// Per-snapshot bookkeeping invariants. Returns the first violation found.
pub fn check_conservation(snaps: &[SecondSnapshot], capacity: usize) -> Result<(), String> {
    let (mut enq, mut done) = (0u64, 0u64);
    for s in snaps {
        let at = s.second;
        if s.sent != s.isr_executed + s.dropped_disabled {
            return Err(format!("second {at}: sent {} != executed {} + dropped_disabled {}", s.sent, s.isr_executed, s.dropped_disabled));
        }
        if s.isr_executed != s.enqueued + s.dropped_full {
            return Err(format!("second {at}: executed {} != enqueued {} + dropped_full {}", s.isr_executed, s.enqueued, s.dropped_full));
        }
        enq += s.enqueued;
        done += s.processed;
        if done > enq {
            return Err(format!("second {at}: processed {done} exceeds enqueued {enq} so far"));
        }
        if s.queue_len_end != enq - done {
            return Err(format!("second {at}: queue holds {} but enqueued minus processed is {}", s.queue_len_end, enq - done));
        }
        if s.queue_len_end > capacity as u64 {
            return Err(format!("second {at}: queue length {} outside [0, {capacity}]", s.queue_len_end));
        }
        if s.cpu.total() != 1_000_000 {
            return Err(format!("second {at}: charged {}us of 1000000us", s.cpu.total()));
        }
    }
    Ok(())
}

pub fn arb_policy() -> impl Strategy<Value = PolicyConfig> {
    prop_oneof![
        prop_oneof![Just(PriorityLayout::Equal), Just(PriorityLayout::CriticalHigher)]
            .prop_map(|layout| PolicyConfig::Baseline { layout }),
        (1u32..800, 1_000u64..40_000).prop_map(|(capacity, slice_us)| PolicyConfig::Burst(BurstConfig { slice_us, capacity })),
        (0.0f64..0.5, 0.01f64..0.5, 100u64..3_000).prop_map(|(b, gap, poll_us)| PolicyConfig::Hysteresis(HysteresisConfig {
            block_threshold: b,
            unblock_threshold: b + gap,
            poll_us,
        })),
        any::<bool>().prop_map(|charge_isr_time| PolicyConfig::Budget(BudgetConfig { charge_isr_time })),
        Just(PolicyConfig::Queue),
    ]
}

/// Small random configurations: a few seconds of traffic over a wide range of costs.
pub fn arb_config() -> impl Strategy<Value = (SimConfig, u64)> {
    (
        arb_policy(),
        any::<bool>(),
        1usize..800,
        (1u64..12, 1u64..20, 0u64..5, 100u64..3_000),
        (2_000u64..20_000, 1u64..100),
        (0.0f64..150_000.0, 1u32..3, 0u32..2),
        proptest::option::of(any::<u64>()),
    )
        .prop_map(|(policy, equal, queue, (isr, drv, tick, quantum), (period, work_pct), (peak, ramp, plateau), seed)| {
            let load = LoadConfig::new(
                PyramidProfile { floor_rate: 0.0, peak_rate: peak, ramp_seconds: ramp, plateau_seconds: plateau },
                seed.map_or(ArrivalMode::Uniform, |seed| ArrivalMode::Poisson { seed }),
            );
            let duration = load.profile.duration_seconds() + 1;
            let cfg = SimConfig {
                costs: CostModel { isr_us: isr, driver_us: drv, tick_us: tick, tick_interval_us: 1_000 },
                critical: CriticalConfig { period_us: period, work_us: (period * work_pct / 100).max(1) },
                quantum_us: quantum,
                queue_capacity: queue,
                priorities: if equal { PriorityLayout::Equal } else { PriorityLayout::CriticalHigher },
                policy,
                load: Some(load),
                trace: false,
            };
            (cfg, duration)
        })
}
