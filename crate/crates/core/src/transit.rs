//! Edge traversal times.
//!
//! [`edge_transit_time`] is the weight function: the vehicle holds the
//! straight ground track of the edge by crabbing into the cross current and
//! the edge is integrated over `n_seg` sub-segments, each sampling the flow
//! at its midpoint at the time the vehicle enters it.
//!
//! [`robust_edge_cost`] is the robust cost function: it maps a departure
//! interval onto an arrival interval by evaluating the weight function for
//! every corner parameter set from the interval bounds and from evenly spaced
//! interior start times, then taking the minimum and maximum arrival.

use alloc::vec::Vec;

use crate::counters::CallCounters;
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::flowfield::{FlowProvider, FlowSample};
use crate::geom::Point;
use crate::uncertainty::ParameterSet;

/// Arrival-time bounds `[lo, hi]` at a vertex, absolute times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostInterval {
    pub lo: f64,
    pub hi: f64,
}

impl CostInterval {
    pub const UNREACHED: CostInterval = CostInterval { lo: f64::INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo <= hi && !lo.is_nan() {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidConfig("interval lower bound exceeds upper bound"))
        }
    }

    pub const fn point(t: f64) -> Self {
        Self { lo: t, hi: t }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_reached(&self) -> bool {
        self.hi.is_finite()
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransitConfig {
    /// Sub-segments per edge.
    pub n_seg: usize,
    /// Largest spacing between consecutive start times of a robust cost.
    pub tau: f64,
    /// Nominal vehicle speed through water.
    pub v_veh: f64,
}

impl Default for TransitConfig {
    fn default() -> Self {
        Self { n_seg: 8, tau: 0.5, v_veh: 0.5 }
    }
}

impl TransitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_seg == 0 {
            return Err(Error::InvalidConfig("n_seg must be at least 1"));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidConfig("tau must be positive"));
        }
        if !(self.v_veh > 0.0 && self.v_veh.is_finite()) {
            return Err(Error::InvalidConfig("vehicle speed must be positive"));
        }
        Ok(())
    }
}

/// Speed over ground along unit direction `dir`, or `None` when the vehicle
/// cannot hold the track (cross current at least as fast as the vehicle, or
/// no forward progress).
pub fn ground_speed(dir: Point, current: FlowSample, v_veh: f64) -> Option<f64> {
    let along = current.u * dir.x + current.v * dir.y;
    let cross = current.v * dir.x - current.u * dir.y;
    if v_veh <= cross.abs() {
        return None;
    }
    let s = libm::sqrt(v_veh * v_veh - cross * cross) + along;
    (s > 0.0).then_some(s)
}

/// Travel time from `from` to `to` departing at `t_start` under parameter
/// set `set`; `None` when impassable. Counts one CFC and `n_seg` CMC; all
/// sub-segments are sampled even after the edge turns out impassable, so
/// the tallies do not depend on where it failed.
pub fn edge_transit_time(
    from: Point,
    to: Point,
    t_start: f64,
    provider: &FlowProvider,
    set: &ParameterSet,
    cfg: &TransitConfig,
    counters: &CallCounters,
) -> Result<Option<f64>> {
    let delta = to - from;
    let len = delta.norm();
    if len == 0.0 {
        return Err(Error::DegenerateEdge);
    }
    counters.add_cfc(1);
    let dir = delta * (1.0 / len);
    let speed = set.perturb_speed(cfg.v_veh)?;
    let n = cfg.n_seg;
    let sub_len = len / n as f64;
    let mut elapsed = 0.0;
    let mut passable = true;
    for i in 0..n {
        let mid = from.lerp(to, (i as f64 + 0.5) / n as f64);
        let current = set.perturb_flow(provider.flow_at(mid.x, mid.y, t_start + elapsed, counters)?);
        if !passable {
            continue;
        }
        match ground_speed(dir, current, speed) {
            Some(s) => elapsed += sub_len / s,
            None => passable = false,
        }
    }
    Ok(passable.then_some(elapsed))
}

/// Start times for a robust cost: the interval bounds plus
/// `ceil(width / tau) - 1` evenly spaced interior points. A degenerate
/// interval yields its single time.
pub fn start_times(interval: CostInterval, tau: f64) -> Vec<f64> {
    let width = interval.width();
    if width <= 0.0 {
        return alloc::vec![interval.lo];
    }
    let interior = (libm::ceil(width / tau) as usize).saturating_sub(1);
    let gaps = interior + 1;
    let mut out = Vec::with_capacity(gaps + 1);
    out.push(interval.lo);
    for i in 1..gaps {
        out.push(interval.lo + width * (i as f64) / (gaps as f64));
    }
    out.push(interval.hi);
    out
}

/// Arrival interval at `to` for departures anywhere in `departure`, or
/// `None` when any (start time, corner set) evaluation is impassable.
/// Counts one RCFC plus the CFC/CMC of every weight function call.
#[allow(clippy::too_many_arguments)]
pub fn robust_edge_cost<E: Executor>(
    from: Point,
    to: Point,
    departure: CostInterval,
    provider: &FlowProvider,
    corners: &[ParameterSet],
    cfg: &TransitConfig,
    counters: &CallCounters,
    exec: &E,
) -> Result<Option<CostInterval>> {
    counters.add_rcfc(1);
    let starts = start_times(departure, cfg.tau);
    let jobs: Vec<(f64, &ParameterSet)> =
        starts.iter().flat_map(|&t| corners.iter().map(move |c| (t, c))).collect();
    let arrivals = exec.map(&jobs, |&(t, set)| {
        edge_transit_time(from, to, t, provider, set, cfg, counters).map(|d| d.map(|d| t + d))
    });
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut passable = true;
    for a in arrivals {
        match a? {
            Some(a) => {
                lo = lo.min(a);
                hi = hi.max(a);
            }
            None => passable = false,
        }
    }
    Ok(passable.then_some(CostInterval { lo, hi }))
}

/// Admissible lower bound on the travel time from `p` to `goal`.
pub fn heuristic_h(p: Point, goal: Point, v_veh: f64, v_c_max: f64) -> f64 {
    p.distance(goal) / (v_veh + v_c_max)
}
