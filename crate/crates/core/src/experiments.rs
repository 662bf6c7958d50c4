//! Named scenarios and the statistics the acceptance checks read from them.

use crate::engine::{CostModel, CriticalConfig, RunSummary, SimConfig, Simulation};
use crate::error::{AnalysisError, ConfigError};
use crate::loadgen::{ArrivalMode, LoadConfig, PyramidProfile};
use crate::metrics::SecondSnapshot;
use crate::mitigation::{
    policy_priority_profile, BudgetConfig, BurstConfig, HysteresisConfig, PolicyConfig, PriorityLayout,
};
use crate::time::SimTime;

pub const SCENARIO_NAMES: [&str; 8] = [
    "baseline-equal",
    "baseline-priority",
    "burst",
    "hysteresis",
    "budget",
    "queue-100",
    "queue-500",
    "queue-750",
];

/// Keys accepted by [`ScenarioSpec::set`].
pub const OVERRIDE_KEYS: [&str; 17] = [
    "duration",
    "peak-rate",
    "floor-rate",
    "queue-size",
    "capacity",
    "slice-us",
    "block-th",
    "unblock-th",
    "isr-cost-us",
    "driver-cost-us",
    "tick-cost-us",
    "quantum-us",
    "work-us",
    "period-us",
    "seed",
    "arrivals",
    "charge-isr-time",
];

/// A complete, reproducible run description.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub config: SimConfig,
    pub duration_s: u64,
    pub seed: u64,
}

fn sweep(peak: f64) -> LoadConfig {
    LoadConfig::new(
        PyramidProfile {
            peak_rate: peak,
            ..PyramidProfile::default()
        },
        ArrivalMode::Uniform,
    )
}

fn scenario(name: &str, policy: PolicyConfig, queue: usize, peak: f64) -> ScenarioSpec {
    let load = sweep(peak);
    ScenarioSpec {
        name: name.to_string(),
        duration_s: load.profile.duration_seconds(),
        config: SimConfig {
            costs: CostModel::calibrated(),
            queue_capacity: queue,
            priorities: policy_priority_profile(&policy),
            policy,
            load: Some(load),
            ..SimConfig::default()
        },
        seed: 0,
    }
}

/// The eight builtin scenarios, in [`SCENARIO_NAMES`] order.
pub fn builtin_scenarios() -> Vec<ScenarioSpec> {
    let baseline = |layout| PolicyConfig::Baseline { layout };
    let mut hysteresis = scenario(
        "hysteresis",
        PolicyConfig::Hysteresis(HysteresisConfig::default()),
        500,
        174_000.0,
    );
    hysteresis.config.critical = CriticalConfig {
        work_us: 1_500,
        ..CriticalConfig::default()
    };
    let mut budget = scenario("budget", PolicyConfig::Budget(BudgetConfig::default()), 100, 90_000.0);
    budget.config.critical = CriticalConfig {
        work_us: 3_000,
        ..CriticalConfig::default()
    };
    vec![
        scenario("baseline-equal", baseline(PriorityLayout::Equal), 100, 40_000.0),
        scenario("baseline-priority", baseline(PriorityLayout::CriticalHigher), 100, 60_000.0),
        scenario("burst", PolicyConfig::Burst(BurstConfig::default()), 100, 100_000.0),
        hysteresis,
        budget,
        scenario("queue-100", PolicyConfig::Queue, 100, 100_000.0),
        scenario("queue-500", PolicyConfig::Queue, 500, 100_000.0),
        scenario("queue-750", PolicyConfig::Queue, 750, 100_000.0),
    ]
}

pub fn scenario_by_name(name: &str) -> Result<ScenarioSpec, ConfigError> {
    builtin_scenarios()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| ConfigError::UnknownScenario {
            name: name.to_string(),
            valid: SCENARIO_NAMES.iter().map(|s| s.to_string()).collect(),
        })
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
    })
}

fn parse_positive(key: &str, value: &str) -> Result<u64, ConfigError> {
    match parse::<u64>(key, value)? {
        0 => Err(ConfigError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
        }),
        v => Ok(v),
    }
}

impl ScenarioSpec {
    fn load_mut(&mut self) -> &mut LoadConfig {
        self.config.load.get_or_insert_with(|| sweep(0.0))
    }

    fn not_applicable(&self, key: &str) -> ConfigError {
        ConfigError::NotApplicable {
            key: key.to_string(),
            scenario: self.name.clone(),
        }
    }

    /// Applies one override. Keys are listed in [`OVERRIDE_KEYS`].
    ///
    /// `duration` also rescales the load pyramid to span the new run length.
    /// Policy parameters are rejected for scenarios running a different policy.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "duration" => {
                let d = parse_positive(key, value)?;
                if d > 86_400 {
                    return Err(ConfigError::BadValue {
                        key: key.into(),
                        value: value.into(),
                    });
                }
                self.duration_s = d;
                let p = &mut self.load_mut().profile;
                p.ramp_seconds = (d / 2).max(1) as u32;
                p.plateau_seconds = d.saturating_sub(2 * p.ramp_seconds as u64) as u32;
            }
            "peak-rate" => self.load_mut().profile.peak_rate = parse(key, value)?,
            "floor-rate" => self.load_mut().profile.floor_rate = parse(key, value)?,
            "queue-size" => self.config.queue_capacity = parse_positive(key, value)? as usize,
            "capacity" | "slice-us" => {
                let v = parse_positive(key, value)?;
                let PolicyConfig::Burst(b) = &mut self.config.policy else {
                    return Err(self.not_applicable(key));
                };
                if key == "capacity" {
                    b.capacity = u32::try_from(v).map_err(|_| ConfigError::BadValue {
                        key: key.into(),
                        value: value.into(),
                    })?;
                } else {
                    b.slice_us = v;
                }
            }
            "block-th" | "unblock-th" => {
                let v: f64 = parse(key, value)?;
                let PolicyConfig::Hysteresis(h) = &mut self.config.policy else {
                    return Err(self.not_applicable(key));
                };
                if key == "block-th" {
                    h.block_threshold = v;
                } else {
                    h.unblock_threshold = v;
                }
            }
            "charge-isr-time" => {
                let v: bool = parse(key, value)?;
                let PolicyConfig::Budget(b) = &mut self.config.policy else {
                    return Err(self.not_applicable(key));
                };
                b.charge_isr_time = v;
            }
            "isr-cost-us" => self.config.costs.isr_us = parse(key, value)?,
            "driver-cost-us" => self.config.costs.driver_us = parse_positive(key, value)?,
            "tick-cost-us" => self.config.costs.tick_us = parse(key, value)?,
            "quantum-us" => self.config.quantum_us = parse_positive(key, value)?,
            "work-us" => self.config.critical.work_us = parse_positive(key, value)?,
            "period-us" => self.config.critical.period_us = parse_positive(key, value)?,
            "seed" => {
                self.seed = parse(key, value)?;
                let seed = self.seed;
                if let ArrivalMode::Poisson { .. } = self.load_mut().mode {
                    self.load_mut().mode = ArrivalMode::Poisson { seed };
                }
            }
            "arrivals" => {
                let mode = match value.trim() {
                    "uniform" => ArrivalMode::Uniform,
                    "poisson" => ArrivalMode::Poisson { seed: self.seed },
                    _ => {
                        return Err(ConfigError::BadValue {
                            key: key.into(),
                            value: value.into(),
                        })
                    }
                };
                self.load_mut().mode = mode;
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.config.validate()
    }

    /// Last second of the rising ramp.
    pub fn ramp_end(&self) -> u64 {
        self.config
            .load
            .as_ref()
            .map_or(0, |l| l.profile.ramp_seconds as u64)
    }

    pub fn run(&self) -> Result<RunSummary, ConfigError> {
        let mut sim = Simulation::new(self.config.clone())?;
        Ok(sim.run(SimTime::from_secs(self.duration_s)))
    }
}

/// Ordinary least-squares slope of processed against received.
pub fn fit_processed_vs_received_slope(snapshots: &[SecondSnapshot]) -> Result<f64, AnalysisError> {
    let pts: Vec<(f64, f64)> = snapshots
        .iter()
        .map(|s| (s.received() as f64, s.processed as f64))
        .collect();
    if pts.len() < 2 {
        return Err(AnalysisError::DegenerateSlope);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(AnalysisError::DegenerateSlope);
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub max_lateness_pct_per_s: f64,
    /// Sum of per-second lateness, in percent of one period.
    pub total_lateness_pct: f64,
    pub peak_received_per_s: u64,
    pub total_processed: u64,
    /// Processed-vs-received slope over the rising ramp, when defined.
    pub slope: Option<f64>,
    pub zero_lateness: bool,
}

pub fn summarize(spec: &ScenarioSpec, run: &RunSummary) -> Summary {
    let snaps = &run.snapshots;
    let rising: Vec<SecondSnapshot> = snaps
        .iter()
        .filter(|s| s.second <= spec.ramp_end())
        .copied()
        .collect();
    Summary {
        max_lateness_pct_per_s: snaps.iter().map(|s| s.lateness_pct()).fold(0.0, f64::max),
        total_lateness_pct: snaps.iter().map(|s| s.lateness_pct()).sum(),
        peak_received_per_s: snaps.iter().map(|s| s.received()).max().unwrap_or(0),
        total_processed: snaps.iter().map(|s| s.processed).sum(),
        slope: fit_processed_vs_received_slope(&rising).ok(),
        zero_lateness: run.totals.lateness_us == 0,
    }
}
