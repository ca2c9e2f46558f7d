//! Wall-clock stage timing.

use std::time::{Duration, Instant};

use adoracle_core::BuildObserver;

/// Records the time since the previous stage (or construction) each time a
/// build stage finishes.
pub struct StageClock {
    last: Instant,
    start: Instant,
    pub stages: Vec<(&'static str, Duration)>,
}

impl StageClock {
    pub fn start() -> Self {
        let now = Instant::now();
        StageClock {
            last: now,
            start: now,
            stages: Vec::new(),
        }
    }

    pub fn total(&self) -> Duration {
        self.last - self.start
    }

    pub fn as_nanos(&self) -> Vec<(&'static str, u64)> {
        self.stages.iter().map(|&(s, d)| (s, d.as_nanos() as u64)).collect()
    }
}

impl BuildObserver for StageClock {
    fn stage_done(&mut self, stage: &'static str) {
        let now = Instant::now();
        self.stages.push((stage, now - self.last));
        self.last = now;
    }
}

/// `q`-quantile (nearest rank) of an unsorted sample.
pub fn quantile(samples: &mut [u64], q: f64) -> u64 {
    if samples.is_empty() {
        return 0;
    }
    samples.sort_unstable();
    let rank = (q * samples.len() as f64).ceil() as usize;
    samples[rank.clamp(1, samples.len()) - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clock_records_stages_in_order() {
        let mut c = StageClock::start();
        c.stage_done("a");
        c.stage_done("b");
        let names: Vec<_> = c.stages.iter().map(|s| s.0).collect();
        assert_eq!(names, ["a", "b"]);
        assert_eq!(c.total(), c.stages.iter().map(|s| s.1).sum());
    }

    #[test]
    fn quantiles() {
        let mut v: Vec<u64> = (1..=100).rev().collect();
        assert_eq!(quantile(&mut v, 0.5), 50);
        assert_eq!(quantile(&mut v, 0.99), 99);
        assert_eq!(quantile(&mut v, 1.0), 100);
        assert_eq!(quantile(&mut [], 0.5), 0);
    }
}
