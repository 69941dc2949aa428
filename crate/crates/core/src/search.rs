//! Label-setting search in a time-varying environment.
//!
//! One engine covers the eight algorithm variants through three switches:
//!
//! * `robust`: labels carry arrival intervals propagated by the robust cost
//!   function; edges are compared and queued on the upper bound.
//! * `heuristic`: A* ordering on `f = hi + h`, with `h` the straight-line
//!   distance over the largest achievable ground speed.
//! * `gating`: successor edges are only examined when their direction lies
//!   within `delta_phi_max` of an optimal heading obtained by integrating
//!   Zermelo's heading equation along the incoming edge.
//!
//! Labels start unreached (`+inf`, no predecessor). The priority queue uses
//! lazy re-insertion for decrease-key; ties on the key are broken by
//! insertion sequence so extraction order is reproducible.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::{FRAC_PI_4, PI};
use core::fmt;

use crate::counters::{CallCounters, Counts};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::flowfield::{FlowProvider, DEFAULT_JACOBIAN_STEP};
use crate::geom::Point;
use crate::graph::Graph;
use crate::transit::{edge_transit_time, ground_speed, heuristic_h, robust_edge_cost, CostInterval, TransitConfig};
use crate::uncertainty::{ParameterSet, UncertaintyDomain};

/// Feature switches selecting one of the eight search variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Algorithm {
    pub robust: bool,
    pub heuristic: bool,
    pub gating: bool,
}

impl Algorithm {
    pub const TVE: Algorithm = Algorithm::new(false, false, false);
    pub const ASTAR_TVE: Algorithm = Algorithm::new(false, true, false);
    pub const ZTVE: Algorithm = Algorithm::new(false, false, true);
    pub const ZASTAR_TVE: Algorithm = Algorithm::new(false, true, true);
    pub const RTVE: Algorithm = Algorithm::new(true, false, false);
    pub const RASTAR_TVE: Algorithm = Algorithm::new(true, true, false);
    pub const RZTVE: Algorithm = Algorithm::new(true, false, true);
    pub const RZASTAR_TVE: Algorithm = Algorithm::new(true, true, true);

    pub const ALL: [Algorithm; 8] = [
        Self::TVE,
        Self::ASTAR_TVE,
        Self::ZTVE,
        Self::ZASTAR_TVE,
        Self::RTVE,
        Self::RASTAR_TVE,
        Self::RZTVE,
        Self::RZASTAR_TVE,
    ];

    pub const fn new(robust: bool, heuristic: bool, gating: bool) -> Self {
        Self { robust, heuristic, gating }
    }

    pub fn name(self) -> &'static str {
        match (self.robust, self.gating, self.heuristic) {
            (false, false, false) => "TVE",
            (false, false, true) => "A*TVE",
            (false, true, false) => "ZTVE",
            (false, true, true) => "ZA*TVE",
            (true, false, false) => "RTVE",
            (true, false, true) => "RA*TVE",
            (true, true, false) => "RZTVE",
            (true, true, true) => "RZA*TVE",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name().eq_ignore_ascii_case(name.trim()))
    }

    /// Same switches with `robust` cleared.
    pub fn non_robust(self) -> Self {
        Self { robust: false, ..self }
    }

    /// Whether the search stops as soon as the goal is extracted.
    pub fn needs_goal(self) -> bool {
        self.heuristic || self.gating
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig {
    pub algorithm: Algorithm,
    pub goal: Option<usize>,
    /// Departure time at the source.
    pub t0: f64,
    pub delta_phi_max: f64,
    /// Ignored by the non-robust variants.
    pub uncertainty: UncertaintyDomain,
    pub transit: TransitConfig,
    /// Upper bound on the current speed, used by the A* heuristic.
    pub current_bound: f64,
    pub jacobian_step: f64,
}

impl SearchConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            goal: None,
            t0: 0.0,
            delta_phi_max: FRAC_PI_4,
            uncertainty: UncertaintyDomain::nominal(),
            transit: TransitConfig::default(),
            current_bound: 0.0,
            jacobian_step: DEFAULT_JACOBIAN_STEP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.transit.validate()?;
        self.uncertainty.validate()?;
        if !(self.delta_phi_max > 0.0 && self.delta_phi_max <= PI) {
            return Err(Error::InvalidConfig("delta_phi_max must lie in (0, pi]"));
        }
        if self.algorithm.needs_goal() && self.goal.is_none() {
            return Err(Error::InvalidConfig("heuristic and gated searches need a goal"));
        }
        if !self.t0.is_finite() {
            return Err(Error::InvalidConfig("departure time must be finite"));
        }
        if !(self.current_bound >= 0.0 && self.current_bound.is_finite()) {
            return Err(Error::InvalidConfig("current bound must be non-negative"));
        }
        if !(self.jacobian_step > 0.0 && self.jacobian_step.is_finite()) {
            return Err(Error::InvalidConfig("jacobian step must be positive"));
        }
        Ok(())
    }

    /// Corner sets the engine evaluates: the operating-domain vertices when
    /// robust, the nominal set otherwise.
    pub fn corner_sets(&self) -> Vec<ParameterSet> {
        if self.algorithm.robust {
            self.uncertainty.corner_sets()
        } else {
            alloc::vec![ParameterSet::nominal()]
        }
    }

    /// Largest ground speed any evaluated corner can reach.
    fn heuristic_speeds(&self) -> (f64, f64) {
        let d = if self.algorithm.robust { self.uncertainty } else { UncertaintyDomain::nominal() };
        (self.transit.v_veh * (1.0 + d.rel_var_speed), self.current_bound * (1.0 + d.max_current_var()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Color {
    White,
    Gray,
    Black,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VertexLabel {
    pub color: Color,
    pub interval: CostInterval,
    pub f: f64,
    pub pred: Option<usize>,
}

impl VertexLabel {
    const UNREACHED: VertexLabel =
        VertexLabel { color: Color::White, interval: CostInterval::UNREACHED, f: f64::INFINITY, pred: None };
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub labels: Vec<VertexLabel>,
    /// The goal was reached (always false without a goal).
    pub reached: bool,
    /// Source to goal, empty when unreached.
    pub path: Vec<usize>,
    /// Arrival interval per path vertex.
    pub intervals: Vec<CostInterval>,
    pub counts: Counts,
    /// Number of vertices extracted from the queue.
    pub expanded: usize,
}

impl SearchResult {
    pub fn goal_interval(&self) -> Option<CostInterval> {
        self.intervals.last().copied().filter(|_| self.reached)
    }

    pub fn predecessors(&self) -> Vec<Option<usize>> {
        self.labels.iter().map(|l| l.pred).collect()
    }
}

/// Shared inputs for heading computations.
#[derive(Clone, Copy)]
pub struct FlowContext<'a> {
    pub provider: &'a FlowProvider,
    pub transit: &'a TransitConfig,
    pub jacobian_step: f64,
    pub counters: &'a CallCounters,
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = libm::remainder(a, 2.0 * PI);
    if w <= -PI {
        w += 2.0 * PI;
    }
    w
}

/// Ground-track direction from `from` to `to`.
pub fn calc_path_dir(from: Point, to: Point) -> f64 {
    wrap_angle(libm::atan2(to.y - from.y, to.x - from.x))
}

/// `|wrap(a - b)| < tol`.
pub fn angle_within(a: f64, b: f64, tol: f64) -> bool {
    wrap_angle(a - b).abs() < tol
}

/// Optimal heading at the end of edge `from -> to`, or `None` when the
/// vehicle cannot crab onto the edge at departure.
///
/// The initial heading is the crab heading holding the ground track at
/// `from`. It is then advanced with Zermelo's heading equation
///
/// ```text
/// dtheta/dt = sin^2(theta) dv/dx + sin(theta) cos(theta) (du/dx - dv/dy) - cos^2(theta) du/dy
/// ```
///
/// using explicit Euler over `n_seg` equal time steps, with the flow
/// gradient sampled at the sub-segment midpoints. The result is the
/// ground-track direction of heading plus current at `to`.
pub fn zermelo_direction(
    from: Point,
    to: Point,
    t_depart: f64,
    t_arrive: f64,
    set: &ParameterSet,
    ctx: &FlowContext<'_>,
) -> Result<Option<f64>> {
    let delta = to - from;
    let len = delta.norm();
    if len == 0.0 {
        return Err(Error::DegenerateEdge);
    }
    let dir = delta * (1.0 / len);
    let speed = set.perturb_speed(ctx.transit.v_veh)?;
    let c0 = set.perturb_flow(ctx.provider.flow_at(from.x, from.y, t_depart, ctx.counters)?);
    let cross = c0.v * dir.x - c0.u * dir.y;
    if ground_speed(dir, c0, speed).is_none() {
        return Ok(None);
    }
    // Heading = along-track component plus a cross-track component cancelling the current.
    let along = libm::sqrt(speed * speed - cross * cross);
    let normal = Point::new(-dir.y, dir.x);
    let w = dir * along + normal * (-cross);
    let mut theta = libm::atan2(w.y, w.x);

    let n = ctx.transit.n_seg;
    let dt = (t_arrive - t_depart) / n as f64;
    for i in 0..n {
        let mid = from.lerp(to, (i as f64 + 0.5) / n as f64);
        let t = t_depart + dt * i as f64;
        let j = set.perturb_jacobian(ctx.provider.flow_jacobian(mid.x, mid.y, t, ctx.jacobian_step, ctx.counters)?);
        let (s, c) = (libm::sin(theta), libm::cos(theta));
        theta += dt * (s * s * j.dv_dx + s * c * (j.du_dx - j.dv_dy) - c * c * j.du_dy);
    }
    let c1 = set.perturb_flow(ctx.provider.flow_at(to.x, to.y, t_arrive, ctx.counters)?);
    let gx = speed * libm::cos(theta) + c1.u;
    let gy = speed * libm::sin(theta) + c1.v;
    Ok(Some(wrap_angle(libm::atan2(gy, gx))))
}

/// [`zermelo_direction`], falling back to the edge direction when the crab
/// at departure is impossible.
pub fn calc_opt_dir(
    from: Point,
    to: Point,
    t_depart: f64,
    t_arrive: f64,
    set: &ParameterSet,
    ctx: &FlowContext<'_>,
) -> Result<f64> {
    Ok(zermelo_direction(from, to, t_depart, t_arrive, set, ctx)?.unwrap_or_else(|| calc_path_dir(from, to)))
}

/// Departure/arrival pairs `(lo, lo)` and `(hi, hi)`, deduplicated.
fn boundary_pairs(pred: CostInterval, at: CostInterval) -> Vec<(f64, f64)> {
    let mut pairs = alloc::vec![(pred.lo, at.lo)];
    if (pred.hi, at.hi) != (pred.lo, at.lo) {
        pairs.push((pred.hi, at.hi));
    }
    pairs
}

/// Optimal headings for every (boundary time pair, corner set), time pair
/// major; `None` if any of them degenerates.
pub fn unc_zermelo_directions(
    from: Point,
    to: Point,
    pred: CostInterval,
    at: CostInterval,
    corners: &[ParameterSet],
    ctx: &FlowContext<'_>,
) -> Result<Option<Vec<f64>>> {
    let mut out = Vec::with_capacity(2 * corners.len());
    for (td, ta) in boundary_pairs(pred, at) {
        for set in corners {
            match zermelo_direction(from, to, td, ta, set, ctx)? {
                Some(a) => out.push(a),
                None => return Ok(None),
            }
        }
    }
    Ok(Some(out))
}

/// [`calc_opt_dir`] over every (boundary time pair, corner set).
pub fn calc_unc_opt_dir(
    from: Point,
    to: Point,
    pred: CostInterval,
    at: CostInterval,
    corners: &[ParameterSet],
    ctx: &FlowContext<'_>,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * corners.len());
    for (td, ta) in boundary_pairs(pred, at) {
        for set in corners {
            out.push(calc_opt_dir(from, to, td, ta, set, ctx)?);
        }
    }
    Ok(out)
}

/// Follows predecessors from `goal` back to `source`.
pub fn reconstruct_path(labels: &[VertexLabel], source: usize, goal: usize) -> Result<Vec<usize>> {
    let mut path = alloc::vec![goal];
    let mut v = goal;
    while v != source {
        v = labels.get(v).ok_or(Error::UnknownVertex(v))?.pred.ok_or(Error::Unreached(goal))?;
        path.push(v);
        if path.len() > labels.len() {
            return Err(Error::Unreached(goal));
        }
    }
    path.reverse();
    Ok(path)
}

#[derive(Clone, Copy, Debug)]
struct QueueEntry {
    key: f64,
    seq: u64,
    vertex: usize,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for QueueEntry {}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QueueEntry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.total_cmp(&self.key).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Min-queue with lazy decrease-key.
struct Queue {
    heap: BinaryHeap<QueueEntry>,
    live: Vec<u64>,
    next_seq: u64,
}

impl Queue {
    fn new(n: usize) -> Self {
        Self { heap: BinaryHeap::new(), live: alloc::vec![u64::MAX; n], next_seq: 0 }
    }

    /// INSERT and DECREASE-KEY: any older entry for `vertex` becomes stale.
    fn push(&mut self, vertex: usize, key: f64) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.live[vertex] = seq;
        self.heap.push(QueueEntry { key, seq, vertex });
    }

    fn pop(&mut self) -> Option<usize> {
        while let Some(e) = self.heap.pop() {
            if self.live[e.vertex] == e.seq {
                self.live[e.vertex] = u64::MAX;
                return Some(e.vertex);
            }
        }
        None
    }
}

/// Runs the variant selected by `cfg.algorithm` from `source`.
///
/// Successor edges of one expanded vertex are evaluated through `exec`;
/// relaxations are then committed in ascending successor id, so labels,
/// paths and counters equal those of a sequential run.
pub fn search<G: Graph, E: Executor>(
    graph: &G,
    provider: &FlowProvider,
    source: usize,
    cfg: &SearchConfig,
    exec: &E,
) -> Result<SearchResult> {
    cfg.validate()?;
    let n = graph.num_vertices();
    if source >= n {
        return Err(Error::UnknownVertex(source));
    }
    if let Some(g) = cfg.goal {
        if g >= n {
            return Err(Error::UnknownVertex(g));
        }
    }
    let alg = cfg.algorithm;
    let corners = cfg.corner_sets();
    let counters = CallCounters::new();
    let ctx = FlowContext { provider, transit: &cfg.transit, jacobian_step: cfg.jacobian_step, counters: &counters };
    let (h_vehicle, h_current) = cfg.heuristic_speeds();
    let goal_pos = cfg.goal.map(|g| graph.position(g));
    let h = |v: usize| match (alg.heuristic, goal_pos) {
        (true, Some(gp)) => heuristic_h(graph.position(v), gp, h_vehicle, h_current),
        _ => 0.0,
    };
    let gate_all = cfg.delta_phi_max >= PI;

    let mut labels = alloc::vec![VertexLabel::UNREACHED; n];
    let mut queue = Queue::new(n);
    labels[source] = VertexLabel {
        color: Color::Gray,
        interval: CostInterval::point(cfg.t0),
        f: cfg.t0 + h(source),
        pred: None,
    };
    queue.push(source, labels[source].f);

    let mut expanded = 0;
    let mut stopped_at_goal = false;
    let mut candidates: Vec<(usize, CostInterval)> = Vec::new();
    while let Some(u) = queue.pop() {
        expanded += 1;
        if alg.needs_goal() && Some(u) == cfg.goal {
            stopped_at_goal = true;
            break;
        }
        labels[u].color = Color::Black;
        let pu = graph.position(u);
        let at_u = labels[u].interval;

        let headings = match (alg.gating && !gate_all, labels[u].pred) {
            (true, Some(p)) => {
                let pp = graph.position(p);
                let at_p = labels[p].interval;
                if alg.robust {
                    unc_zermelo_directions(pp, pu, at_p, at_u, &corners, &ctx)?
                } else {
                    zermelo_direction(pp, pu, at_p.lo, at_u.lo, &ParameterSet::nominal(), &ctx)?.map(|a| alloc::vec![a])
                }
            }
            _ => None,
        };

        candidates.clear();
        for &v in graph.successors(u) {
            if labels[v].color == Color::Black || at_u.hi >= labels[v].interval.hi {
                continue;
            }
            if let Some(dirs) = &headings {
                let path_dir = calc_path_dir(pu, graph.position(v));
                if !dirs.iter().any(|&d| angle_within(d, path_dir, cfg.delta_phi_max)) {
                    continue;
                }
            }
            candidates.push((v, at_u));
        }

        let costs = exec.map(&candidates, |&(v, dep)| {
            let pv = graph.position(v);
            if alg.robust {
                robust_edge_cost(pu, pv, dep, provider, &corners, &cfg.transit, &counters, exec)
            } else {
                edge_transit_time(pu, pv, dep.lo, provider, &corners[0], &cfg.transit, &counters)
                    .map(|w| w.map(|w| CostInterval::point(dep.lo + w)))
            }
        });

        for (&(v, _), cost) in candidates.iter().zip(costs) {
            let Some(arrival) = cost? else { continue };
            let label = &mut labels[v];
            if arrival.hi < label.interval.hi {
                label.interval = arrival;
                label.f = arrival.hi + h(v);
                label.pred = Some(u);
                label.color = Color::Gray;
                queue.push(v, label.f);
            }
        }
    }

    let reached = match cfg.goal {
        Some(_) if alg.needs_goal() => stopped_at_goal,
        Some(g) => labels[g].interval.is_reached(),
        None => false,
    };
    let (path, intervals) = match (reached, cfg.goal) {
        (true, Some(g)) => {
            let path = reconstruct_path(&labels, source, g)?;
            let intervals = path.iter().map(|&v| labels[v].interval).collect();
            (path, intervals)
        }
        _ => (Vec::new(), Vec::new()),
    };
    Ok(SearchResult { labels, reached, path, intervals, counts: counters.snapshot(), expanded })
}
