use chrono::{DateTime, Duration, TimeZone, Utc};
use std::sync::Mutex;

/// Source of timestamps for messages, campaign metadata and turn traces.
pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// Deterministic clock that advances by a fixed step on every reading.
/// Replays and golden tests use it so that timestamps are reproducible.
#[derive(Debug)]
pub struct StepClock {
    next: Mutex<DateTime<Utc>>,
    step: Duration,
}

impl StepClock {
    pub fn new(start: DateTime<Utc>, step: Duration) -> Self {
        Self {
            next: Mutex::new(start),
            step,
        }
    }

    /// 2024-01-01T00:00:00Z, one millisecond per reading.
    pub fn fixed() -> Self {
        Self::new(
            Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap(),
            Duration::milliseconds(1),
        )
    }

    /// Continues after `last`, for resuming a deterministic run.
    pub fn after(last: DateTime<Utc>) -> Self {
        let step = Duration::milliseconds(1);
        Self::new(last + step, step)
    }
}

impl Clock for StepClock {
    fn now(&self) -> DateTime<Utc> {
        let mut next = self.next.lock().expect("clock poisoned");
        let now = *next;
        *next = now + self.step;
        now
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_clock_is_strictly_increasing() {
        let clock = StepClock::fixed();
        let a = clock.now();
        let b = clock.now();
        assert!(b > a);
        assert_eq!(b - a, Duration::milliseconds(1));
    }
}
