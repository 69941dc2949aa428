//! Exhaustive path enumeration on tiny grids, and empirical audits of the
//! edge cost: non-overtaking in departure time and nominal containment.

use flowpath_core::flowfield::{max_speed_bound, Lattice};
use flowpath_core::search::search;
use flowpath_core::transit::{edge_transit_time, robust_edge_cost, start_times};
use flowpath_core::{
    Algorithm, CallCounters, CostInterval, FlowProvider, Graph, GridGraph, GridSpec, JetParams, Neighborhood,
    ParameterSet, Point, Region, SearchConfig, Sequential, TransitConfig, UncertaintyDomain,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Absolute agreement required between search and enumeration.
pub const ORACLE_TOLERANCE: f64 = 1e-9;
/// Slack allowed before a later departure counts as overtaking.
pub const FIFO_TOLERANCE: f64 = 1e-9;

/// Earliest arrival at `goal` over all simple paths, each edge departing at
/// the arrival time of its tail. Returns the path with per-vertex times.
pub fn enumerate_best_path<G: Graph>(
    graph: &G,
    provider: &FlowProvider,
    source: usize,
    goal: usize,
    t0: f64,
    transit: &TransitConfig,
) -> flowpath_core::Result<Option<Vec<(usize, f64)>>> {
    struct Walk<'a, G> {
        graph: &'a G,
        provider: &'a FlowProvider,
        goal: usize,
        transit: &'a TransitConfig,
        counters: CallCounters,
        on_path: Vec<bool>,
        path: Vec<(usize, f64)>,
        best: Option<Vec<(usize, f64)>>,
    }

    impl<G: Graph> Walk<'_, G> {
        fn go(&mut self) -> flowpath_core::Result<()> {
            let (v, t) = *self.path.last().expect("path starts at the source");
            if v == self.goal {
                if self.best.as_ref().is_none_or(|b| t < b[b.len() - 1].1) {
                    self.best = Some(self.path.clone());
                }
                return Ok(());
            }
            let nominal = ParameterSet::nominal();
            for &w in self.graph.successors(v) {
                if self.on_path[w] {
                    continue;
                }
                let (pv, pw) = (self.graph.position(v), self.graph.position(w));
                let Some(d) = edge_transit_time(pv, pw, t, self.provider, &nominal, self.transit, &self.counters)? else {
                    continue;
                };
                self.on_path[w] = true;
                self.path.push((w, t + d));
                self.go()?;
                self.path.pop();
                self.on_path[w] = false;
            }
            Ok(())
        }
    }

    let mut walk = Walk {
        graph,
        provider,
        goal,
        transit,
        counters: CallCounters::new(),
        on_path: vec![false; graph.num_vertices()],
        path: vec![(source, t0)],
        best: None,
    };
    walk.on_path[source] = true;
    walk.go()?;
    Ok(walk.best)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleCase {
    pub seed: u64,
    pub nx: usize,
    pub ny: usize,
    pub source: usize,
    pub goal: usize,
    pub t0: f64,
    pub enumerated: Option<f64>,
    pub tve: Option<f64>,
    pub astar: Option<f64>,
    pub tve_deviation: f64,
    pub astar_deviation: f64,
    /// The enumerated optimum reaches some vertex later than the search
    /// label does, so a disagreement stems from overtaking.
    pub overtaking_witness: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub seeds: u64,
    pub max_side: usize,
    pub max_tve_deviation: f64,
    pub max_astar_deviation: f64,
    pub mismatches: usize,
    pub passed: bool,
    pub cases: Vec<OracleCase>,
}

fn deviation(a: Option<f64>, b: Option<f64>) -> f64 {
    match (a, b) {
        (None, None) => 0.0,
        (Some(a), Some(b)) => (a - b).abs(),
        _ => f64::INFINITY,
    }
}

/// Random grid inside the jet region: 2 to `max_side` points per axis,
/// spacing 0.2 to 0.6.
fn random_grid(rng: &mut ChaCha8Rng, max_side: usize, neighborhood: Neighborhood) -> GridSpec {
    let nx = rng.gen_range(2..=max_side);
    let ny = rng.gen_range(2..=max_side);
    let dx = rng.gen_range(0.2..0.6);
    let dy = rng.gen_range(0.2..0.6);
    let (w, h) = (dx * (nx - 1) as f64, dy * (ny - 1) as f64);
    let x_min = rng.gen_range(0.0..12.0 - w);
    let y_min = rng.gen_range(-4.0..4.0 - h);
    GridSpec { x_min, x_max: x_min + w, y_min, y_max: y_min + h, nx, ny, neighborhood }
}

/// TVE and A*TVE against exhaustive enumeration on `seeds` random grids of
/// at most `max_side` x `max_side` points in the default jet.
pub fn run_oracle_check(seeds: u64, max_side: usize, neighborhood: Neighborhood) -> flowpath_core::Result<OracleReport> {
    if !(2..=3).contains(&max_side) {
        return Err(flowpath_core::Error::InvalidConfig("oracle grids hold 2 to 3 points per axis"));
    }
    let provider = FlowProvider::Jet(JetParams::default());
    let transit = TransitConfig::default();
    let mut cases = Vec::with_capacity(seeds as usize);
    for seed in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_grid(&mut rng, max_side, neighborhood);
        let graph = GridGraph::build(spec)?;
        let n = graph.num_vertices();
        let source = rng.gen_range(0..n);
        let goal = (source + rng.gen_range(1..n)) % n;
        let t0 = rng.gen_range(0.0..16.0);
        let bound =
            max_speed_bound(&provider, spec.region(), (t0, t0 + 200.0), Lattice::default(), &CallCounters::new())?;

        let run = |algorithm| {
            let mut cfg = SearchConfig::new(algorithm);
            cfg.goal = Some(goal);
            cfg.t0 = t0;
            cfg.transit = transit;
            cfg.current_bound = bound;
            search(&graph, &provider, source, &cfg, &Sequential)
        };
        let tve = run(Algorithm::TVE)?;
        let astar = run(Algorithm::ASTAR_TVE)?;
        let best = enumerate_best_path(&graph, &provider, source, goal, t0, &transit)?;
        let arrival = |r: &flowpath_core::SearchResult| r.reached.then(|| r.labels[goal].interval.hi);
        let enumerated = best.as_ref().map(|b| b[b.len() - 1].1);
        let (tve_at, astar_at) = (arrival(&tve), arrival(&astar));
        let overtaking_witness = best.as_ref().is_some_and(|b| {
            b.iter().any(|&(v, t)| tve.labels[v].interval.hi < t - ORACLE_TOLERANCE)
        });
        cases.push(OracleCase {
            seed,
            nx: spec.nx,
            ny: spec.ny,
            source,
            goal,
            t0,
            enumerated,
            tve: tve_at,
            astar: astar_at,
            tve_deviation: deviation(tve_at, enumerated),
            astar_deviation: deviation(astar_at, tve_at),
            overtaking_witness,
        });
    }
    let max_tve_deviation = cases.iter().map(|c| c.tve_deviation).fold(0.0, f64::max);
    let max_astar_deviation = cases.iter().map(|c| c.astar_deviation).fold(0.0, f64::max);
    let mismatches = cases
        .iter()
        .filter(|c| c.tve_deviation >= ORACLE_TOLERANCE || c.astar_deviation >= ORACLE_TOLERANCE)
        .count();
    Ok(OracleReport {
        seeds,
        max_side,
        max_tve_deviation,
        max_astar_deviation,
        mismatches,
        passed: mismatches == 0,
        cases,
    })
}

/// A random edge inside `region` with length in `[0.2, 0.6)`.
fn random_edge(rng: &mut ChaCha8Rng, region: Region) -> (Point, Point) {
    loop {
        let from = Point::new(rng.gen_range(region.x_min..region.x_max), rng.gen_range(region.y_min..region.y_max));
        let len = rng.gen_range(0.2..0.6);
        let ang = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let to = from + Point::new(ang.cos(), ang.sin()) * len;
        if region.contains(to) {
            return (from, to);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FifoViolation {
    pub from: [f64; 2],
    pub to: [f64; 2],
    pub t1: f64,
    pub t2: f64,
    pub arrival1: f64,
    pub arrival2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FifoReport {
    pub edges: usize,
    /// Pairs where both departures are passable.
    pub checked: usize,
    /// Impassable at the earlier departure but passable at the later one.
    pub opened_later: usize,
    /// Passable at the earlier departure, impassable at the later one.
    pub closed_later: usize,
    pub both_impassable: usize,
    pub violations: Vec<FifoViolation>,
    pub violation_rate: f64,
}

/// Departs along `edges` random edges at `t1 < t2` and checks that the later
/// departure never arrives first.
pub fn fifo_audit(provider: &FlowProvider, region: Region, transit: &TransitConfig, edges: usize, seed: u64) -> flowpath_core::Result<FifoReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counters = CallCounters::new();
    let nominal = ParameterSet::nominal();
    let mut report = FifoReport {
        edges,
        checked: 0,
        opened_later: 0,
        closed_later: 0,
        both_impassable: 0,
        violations: Vec::new(),
        violation_rate: 0.0,
    };
    for _ in 0..edges {
        let (from, to) = random_edge(&mut rng, region);
        let t1 = rng.gen_range(0.0..50.0);
        let t2 = t1 + rng.gen_range(0.01..2.0);
        let a1 = edge_transit_time(from, to, t1, provider, &nominal, transit, &counters)?.map(|d| t1 + d);
        let a2 = edge_transit_time(from, to, t2, provider, &nominal, transit, &counters)?.map(|d| t2 + d);
        match (a1, a2) {
            (Some(a1), Some(a2)) => {
                report.checked += 1;
                if a1 > a2 + FIFO_TOLERANCE {
                    report.violations.push(FifoViolation {
                        from: [from.x, from.y],
                        to: [to.x, to.y],
                        t1,
                        t2,
                        arrival1: a1,
                        arrival2: a2,
                    });
                }
            }
            (None, Some(_)) => report.opened_later += 1,
            (Some(_), None) => report.closed_later += 1,
            (None, None) => report.both_impassable += 1,
        }
    }
    if report.checked > 0 {
        report.violation_rate = report.violations.len() as f64 / report.checked as f64;
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContainmentMiss {
    pub from: [f64; 2],
    pub to: [f64; 2],
    pub departure: [f64; 2],
    pub start: f64,
    /// `None` when the nominal set cannot pass although every corner can.
    pub nominal_arrival: Option<f64>,
    pub interval: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContainmentReport {
    pub variance_pct: f64,
    pub edges: usize,
    /// Edges with a passable robust cost.
    pub checked: usize,
    pub misses: Vec<ContainmentMiss>,
}

/// Checks that the robust arrival interval holds the nominal arrival for
/// each start time it evaluated.
pub fn containment_audit(
    provider: &FlowProvider,
    region: Region,
    transit: &TransitConfig,
    variance_pct: f64,
    edges: usize,
    seed: u64,
) -> flowpath_core::Result<ContainmentReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counters = CallCounters::new();
    let corners = UncertaintyDomain::from_percent(variance_pct)?.corner_sets();
    let nominal = ParameterSet::nominal();
    let mut report = ContainmentReport { variance_pct, edges, checked: 0, misses: Vec::new() };
    for _ in 0..edges {
        let (from, to) = random_edge(&mut rng, region);
        let lo = rng.gen_range(0.0..50.0);
        let departure = CostInterval::new(lo, lo + rng.gen_range(0.0..1.5))?;
        let Some(iv) = robust_edge_cost(from, to, departure, provider, &corners, transit, &counters, &Sequential)? else {
            continue;
        };
        report.checked += 1;
        for t in start_times(departure, transit.tau) {
            let a = edge_transit_time(from, to, t, provider, &nominal, transit, &counters)?.map(|d| t + d);
            if a.is_none_or(|a| a < iv.lo - FIFO_TOLERANCE || a > iv.hi + FIFO_TOLERANCE) {
                report.misses.push(ContainmentMiss {
                    from: [from.x, from.y],
                    to: [to.x, to.y],
                    departure: [departure.lo, departure.hi],
                    start: t,
                    nominal_arrival: a,
                    interval: [iv.lo, iv.hi],
                });
            }
        }
    }
    Ok(report)
}
