//! Desk-scale guardrail on basis sizes.
//!
//! Any routine that enumerates a photon-number sector checks its size against a
//! process-wide cap first. The cap defaults to [`DEFAULT_SECTOR_CAP`] and can be
//! overridden through the `BARGMANN_SECTOR_CAP` environment variable or
//! [`set_sector_cap`].

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

pub const DEFAULT_SECTOR_CAP: u64 = 2_000_000;
pub const SECTOR_CAP_ENV: &str = "BARGMANN_SECTOR_CAP";

// 0 means "not yet initialised from the environment"
static SECTOR_CAP: AtomicU64 = AtomicU64::new(0);

/// Current cap on the number of occupation vectors in any single sector.
pub fn sector_cap() -> u64 {
    let cap = SECTOR_CAP.load(Ordering::Relaxed);
    if cap != 0 {
        return cap;
    }
    let from_env = std::env::var(SECTOR_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_SECTOR_CAP);
    // a concurrent set_sector_cap wins over the environment
    let _ = SECTOR_CAP.compare_exchange(0, from_env, Ordering::Relaxed, Ordering::Relaxed);
    SECTOR_CAP.load(Ordering::Relaxed)
}

/// Override the sector cap for this process. Zero restores the default.
pub fn set_sector_cap(cap: u64) {
    let cap = if cap == 0 { DEFAULT_SECTOR_CAP } else { cap };
    SECTOR_CAP.store(cap, Ordering::Relaxed);
}

/// Binomial coefficient, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is always an integer at this point
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
    }
    Some(acc)
}

/// Number of occupation vectors with `total` photons over `modes` modes,
/// C(total + modes - 1, total).
pub fn sector_size(total: u32, modes: usize) -> Result<u128> {
    if modes == 0 {
        return Err(Error::InvalidArgument("sector needs at least one mode".into()));
    }
    binomial(total as u64 + modes as u64 - 1, total as u64).ok_or_else(|| Error::Capacity {
        what: format!("sector ({total} photons, {modes} modes)"),
        required: u128::MAX,
        cap: sector_cap() as u128,
    })
}

/// Fail with a capacity error when `required` exceeds the current cap.
pub fn check(what: impl FnOnce() -> String, required: u128) -> Result<()> {
    let cap = sector_cap() as u128;
    if required > cap {
        return Err(Error::Capacity {
            what: what(),
            required,
            cap,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), Some(20));
        assert_eq!(binomial(5, 0), Some(1));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(60, 30), Some(118_264_581_564_861_424));
        assert!(binomial(400, 200).is_none());
    }

    #[test]
    fn sector_sizes() {
        assert_eq!(sector_size(3, 4).unwrap(), 20);
        assert_eq!(sector_size(0, 3).unwrap(), 1);
        assert!(sector_size(2, 0).is_err());
        assert!(matches!(sector_size(400, 400), Err(Error::Capacity { .. })));
    }
}
