//! Global work budget shared by the expensive direct evaluators.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Default number of elementary terms an operation may touch.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Environment variable that overrides [`DEFAULT_BUDGET`] in the CLI.
pub const BUDGET_ENV: &str = "FFPROG_BUDGET";

static BUDGET: AtomicU64 = AtomicU64::new(DEFAULT_BUDGET);

pub fn global_budget() -> u64 {
    BUDGET.load(Ordering::Relaxed)
}

pub fn set_global_budget(terms: u64) {
    BUDGET.store(terms, Ordering::Relaxed);
}

/// Fails with [`Error::BudgetExceeded`] when `needed` is above the global budget.
pub fn check(needed: u128) -> Result<()> {
    let budget = global_budget();
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// `base^exp` saturating at `u128::MAX`.
pub(crate) fn pow_saturating(base: u64, exp: u32) -> u128 {
    (base as u128).checked_pow(exp).unwrap_or(u128::MAX)
}
