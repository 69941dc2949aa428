//! Call tallies: robust cost function calls (RCFC), weight function calls
//! (CFC) and current model evaluations (CMC).
//!
//! Counters are atomics so concurrent evaluators can share one handle; the
//! totals are sums and therefore independent of scheduling.

use core::ops::{Add, AddAssign};
use core::sync::atomic::{AtomicU64, Ordering};

#[derive(Debug, Default)]
pub struct CallCounters {
    rcfc: AtomicU64,
    cfc: AtomicU64,
    cmc: AtomicU64,
}

impl CallCounters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_rcfc(&self, n: u64) {
        self.rcfc.fetch_add(n, Ordering::Relaxed);
    }

    pub fn add_cfc(&self, n: u64) {
        self.cfc.fetch_add(n, Ordering::Relaxed);
    }

    pub fn add_cmc(&self, n: u64) {
        self.cmc.fetch_add(n, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> Counts {
        Counts {
            rcfc: self.rcfc.load(Ordering::Relaxed),
            cfc: self.cfc.load(Ordering::Relaxed),
            cmc: self.cmc.load(Ordering::Relaxed),
        }
    }
}

/// A plain copy of the three tallies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Counts {
    pub rcfc: u64,
    pub cfc: u64,
    pub cmc: u64,
}

impl Add for Counts {
    type Output = Counts;
    fn add(self, rhs: Counts) -> Counts {
        Counts { rcfc: self.rcfc + rhs.rcfc, cfc: self.cfc + rhs.cfc, cmc: self.cmc + rhs.cmc }
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, rhs: Counts) {
        *self = *self + rhs;
    }
}

impl core::ops::Sub for Counts {
    type Output = Counts;
    fn sub(self, rhs: Counts) -> Counts {
        Counts { rcfc: self.rcfc - rhs.rcfc, cfc: self.cfc - rhs.cfc, cmc: self.cmc - rhs.cmc }
    }
}
