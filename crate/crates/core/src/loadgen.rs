//! Virtual traffic source: pyramid-shaped packet rate, one rate per virtual second.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::error::ConfigError;
use crate::time::{SimTime, MICROS_PER_SEC};

/// Rate ramps linearly `floor -> peak` over `ramp_seconds`, holds for
/// `plateau_seconds`, then ramps back down.
#[derive(Debug, Clone, PartialEq)]
pub struct PyramidProfile {
    pub floor_rate: f64,
    pub peak_rate: f64,
    pub ramp_seconds: u32,
    pub plateau_seconds: u32,
}

impl Default for PyramidProfile {
    fn default() -> Self {
        PyramidProfile {
            floor_rate: 0.0,
            peak_rate: 100_000.0,
            ramp_seconds: 60,
            plateau_seconds: 0,
        }
    }
}

impl PyramidProfile {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.floor_rate >= 0.0 && self.peak_rate >= self.floor_rate && self.peak_rate.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "pyramid rates need 0 <= floor <= peak, got floor {} peak {}",
                self.floor_rate, self.peak_rate
            )));
        }
        if self.peak_rate > MICROS_PER_SEC as f64 {
            return Err(ConfigError::Invalid("peak rate above 1e6 packets/s".into()));
        }
        if self.ramp_seconds == 0 {
            return Err(ConfigError::Invalid("ramp must last at least one second".into()));
        }
        Ok(())
    }

    pub fn duration_seconds(&self) -> u64 {
        2 * self.ramp_seconds as u64 + self.plateau_seconds as u64
    }

    /// Packets per second during virtual second `second`.
    pub fn rate_at(&self, second: u64) -> Result<f64, ConfigError> {
        if second >= self.duration_seconds() {
            return Err(ConfigError::OutOfRange {
                second,
                duration: self.duration_seconds(),
            });
        }
        let ramp = self.ramp_seconds as u64;
        let top = ramp + self.plateau_seconds as u64;
        let steps_from_floor = if second <= ramp {
            second
        } else if second <= top {
            ramp
        } else {
            ramp - (second - top)
        };
        let span = self.peak_rate - self.floor_rate;
        Ok(self.floor_rate + span * steps_from_floor as f64 / ramp as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrivalMode {
    /// Evenly spaced within each second.
    Uniform,
    /// Exponential inter-arrival times, reproducible from the seed.
    Poisson { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadConfig {
    pub profile: PyramidProfile,
    pub mode: ArrivalMode,
}

impl LoadConfig {
    pub fn new(profile: PyramidProfile, mode: ArrivalMode) -> Self {
        LoadConfig { profile, mode }
    }

    /// Arrival timestamps falling in virtual second `second`, sorted.
    /// Seconds past the end of the profile carry no traffic.
    pub fn arrivals_for_second(&self, second: u64) -> Vec<SimTime> {
        let Ok(rate) = self.profile.rate_at(second) else {
            return Vec::new();
        };
        let start = second * MICROS_PER_SEC;
        match self.mode {
            ArrivalMode::Uniform => {
                let n = rate.round() as u64;
                (0..n)
                    .map(|i| SimTime::from_micros(start + i * MICROS_PER_SEC / n))
                    .collect()
            }
            ArrivalMode::Poisson { seed } => {
                if rate <= 0.0 {
                    return Vec::new();
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(second);
                let exp = Exp::new(rate).expect("positive rate");
                let mut out = Vec::with_capacity(rate as usize + 16);
                let mut t = 0.0f64;
                loop {
                    t += exp.sample(&mut rng);
                    if t >= 1.0 {
                        break;
                    }
                    out.push(SimTime::from_micros(start + (t * MICROS_PER_SEC as f64) as u64));
                }
                out
            }
        }
    }

    /// Total packets a uniform run over the whole profile produces.
    pub fn uniform_total(&self) -> u64 {
        (0..self.profile.duration_seconds())
            .map(|s| self.profile.rate_at(s).unwrap().round() as u64)
            .sum()
    }
}

/// Streams arrivals second by second without materialising the whole run.
#[derive(Debug, Clone)]
pub struct ArrivalGenerator {
    load: LoadConfig,
    second: u64,
    buffer: Vec<SimTime>,
    idx: usize,
}

impl ArrivalGenerator {
    pub fn new(load: LoadConfig) -> Self {
        ArrivalGenerator {
            load,
            second: 0,
            buffer: Vec::new(),
            idx: 0,
        }
    }
}

impl Iterator for ArrivalGenerator {
    type Item = SimTime;

    fn next(&mut self) -> Option<SimTime> {
        let end = self.load.profile.duration_seconds();
        while self.idx >= self.buffer.len() {
            if self.second >= end {
                return None;
            }
            self.buffer = self.load.arrivals_for_second(self.second);
            self.idx = 0;
            self.second += 1;
        }
        let t = self.buffer[self.idx];
        self.idx += 1;
        Some(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sweep() -> PyramidProfile {
        PyramidProfile {
            floor_rate: 0.0,
            peak_rate: 100_000.0,
            ramp_seconds: 60,
            plateau_seconds: 0,
        }
    }

    #[test]
    fn rate_midpoint_and_endpoints() {
        let p = sweep();
        // two-point line through (0, 0) and (60, 100000)
        let expected_mid = 0.0 + (100_000.0 - 0.0) * (30.0 - 0.0) / (60.0 - 0.0);
        assert_eq!(p.rate_at(30).unwrap(), expected_mid);
        assert_eq!(p.rate_at(30).unwrap(), 50_000.0);
        assert_eq!(p.rate_at(0).unwrap(), 0.0);
        assert_eq!(p.rate_at(60).unwrap(), 100_000.0);
        assert_eq!(p.duration_seconds(), 120);
    }

    #[test]
    fn rate_out_of_range_is_error() {
        assert!(sweep().rate_at(120).is_err());
    }

    #[test]
    fn plateau_holds_peak() {
        let p = PyramidProfile {
            plateau_seconds: 5,
            ..sweep()
        };
        for s in 60..=65 {
            assert_eq!(p.rate_at(s).unwrap(), 100_000.0);
        }
        assert_eq!(p.rate_at(66).unwrap(), p.rate_at(59).unwrap());
    }

    #[test]
    fn uniform_even_spacing() {
        let load = LoadConfig::new(
            PyramidProfile {
                floor_rate: 4.0,
                peak_rate: 4.0,
                ramp_seconds: 2,
                plateau_seconds: 0,
            },
            ArrivalMode::Uniform,
        );
        let times: Vec<u64> = load.arrivals_for_second(2).iter().map(|t| t.as_micros()).collect();
        assert_eq!(times, vec![2_000_000, 2_250_000, 2_500_000, 2_750_000]);
    }

    #[test]
    fn zero_rate_is_empty() {
        let load = LoadConfig::new(sweep(), ArrivalMode::Uniform);
        assert!(load.arrivals_for_second(0).is_empty());
        let load = LoadConfig::new(sweep(), ArrivalMode::Poisson { seed: 3 });
        assert!(load.arrivals_for_second(0).is_empty());
    }

    #[test]
    fn poisson_reproducible_and_plausible() {
        let load = LoadConfig::new(sweep(), ArrivalMode::Poisson { seed: 42 });
        let a = load.arrivals_for_second(30);
        assert_eq!(a, load.arrivals_for_second(30));
        // 50k expected; 6 sigma is ~1340
        assert!((a.len() as i64 - 50_000).abs() < 1_400, "got {}", a.len());
        assert!(a.windows(2).all(|w| w[0] <= w[1]));
        let other = LoadConfig::new(sweep(), ArrivalMode::Poisson { seed: 43 });
        assert_ne!(a, other.arrivals_for_second(30));
    }

    #[test]
    fn generator_total_matches_sum_of_rounded_rates() {
        let load = LoadConfig::new(
            PyramidProfile {
                floor_rate: 10.0,
                peak_rate: 2_345.0,
                ramp_seconds: 7,
                plateau_seconds: 2,
            },
            ArrivalMode::Uniform,
        );
        let n = ArrivalGenerator::new(load.clone()).count() as u64;
        assert_eq!(n, load.uniform_total());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn pyramid_bounded_and_symmetric(floor in 0.0f64..5e4, extra in 0.0f64..5e4, ramp in 1u32..100) {
            let p = PyramidProfile { floor_rate: floor, peak_rate: floor + extra, ramp_seconds: ramp, plateau_seconds: 0 };
            for s in 0..p.duration_seconds() {
                let r = p.rate_at(s).unwrap();
                prop_assert!(r >= p.floor_rate - 1e-9 && r <= p.peak_rate + 1e-9);
            }
            for k in 1..ramp as u64 {
                prop_assert_eq!(p.rate_at(ramp as u64 - k).unwrap(), p.rate_at(ramp as u64 + k).unwrap());
            }
        }

        #[test]
        fn uniform_timestamps_distinct(rate in 0u32..=1_000_000) {
            let load = LoadConfig::new(
                PyramidProfile { floor_rate: rate as f64, peak_rate: rate as f64, ramp_seconds: 1, plateau_seconds: 0 },
                ArrivalMode::Uniform,
            );
            let t = load.arrivals_for_second(1);
            prop_assert_eq!(t.len() as u32, rate);
            prop_assert!(t.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(t.iter().all(|x| x.second() == 1));
        }
    }
}
