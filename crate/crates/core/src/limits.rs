//! A global cap on elementary expansion steps.
//!
//! Long-running loops call [`Budget::spend`] so that pathological inputs fail
//! with [`Error::StepLimit`] instead of running away.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;

/// The step cap, read once from `SUBSTRATA_MAX_STEPS`.
pub fn max_steps() -> u64 {
    static CAP: OnceLock<u64> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("SUBSTRATA_MAX_STEPS")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .filter(|&n| n > 0)
            .unwrap_or(DEFAULT_MAX_STEPS)
    })
}

/// A per-call step counter.
#[derive(Debug)]
pub struct Budget {
    used: u64,
    cap: u64,
}

impl Budget {
    pub fn new() -> Self {
        Budget {
            used: 0,
            cap: max_steps(),
        }
    }

    pub fn spend(&mut self, n: usize) -> Result<()> {
        self.used = self.used.saturating_add(n as u64);
        if self.used > self.cap {
            Err(Error::StepLimit(self.cap))
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::new()
    }
}
