use std::time::{Duration, Instant};

use crate::error::{Error, LimitKind, Progress, Result};

/// Budgets for the potentially explosive computations (Buchberger completion,
/// large products).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceLimits {
    pub max_spairs: usize,
    pub max_terms: usize,
    pub timeout: Duration,
}

impl Default for ResourceLimits {
    fn default() -> Self {
        ResourceLimits {
            max_spairs: 1_000_000,
            max_terms: 1_000_000,
            timeout: Duration::from_secs(600),
        }
    }
}

impl ResourceLimits {
    pub fn unlimited() -> Self {
        ResourceLimits {
            max_spairs: usize::MAX,
            max_terms: usize::MAX,
            timeout: Duration::MAX,
        }
    }

    pub(crate) fn start(&self) -> Budget {
        Budget {
            limits: *self,
            started: Instant::now(),
        }
    }
}

/// A running budget: the limits plus the instant the computation started.
#[derive(Debug, Clone)]
pub(crate) struct Budget {
    pub limits: ResourceLimits,
    started: Instant,
}

impl Budget {
    pub fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }

    pub fn check_time(&self, progress: impl FnOnce() -> Progress) -> Result<()> {
        if self.elapsed() > self.limits.timeout {
            let mut progress = progress();
            progress.elapsed_ms = self.elapsed().as_millis();
            return Err(Error::ResourceLimit {
                kind: LimitKind::WallClock,
                progress,
            });
        }
        Ok(())
    }

    pub fn check_terms(&self, terms: usize, progress: impl FnOnce() -> Progress) -> Result<()> {
        if terms > self.limits.max_terms {
            let mut progress = progress();
            progress.largest_poly = progress.largest_poly.max(terms);
            progress.elapsed_ms = self.elapsed().as_millis();
            return Err(Error::ResourceLimit {
                kind: LimitKind::Terms,
                progress,
            });
        }
        Ok(())
    }
}
