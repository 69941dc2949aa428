//! Experiment runs over a prepared scenario.
//!
//! Independent runs are spread over a bounded rayon pool; each run also hands
//! its edge evaluations to the same pool. Records come back in job order, so
//! reports and counters do not depend on the worker count.

use std::io::Write;
use std::time::Instant;

use flowpath_core::flowfield::lattice_coord;
use flowpath_core::search::search;
use flowpath_core::{Algorithm, CallCounters, Graph};
use rayon::prelude::*;

use crate::parallel::{pool, RayonExecutor};
use crate::report::{
    interval_pair, sig12, CounterRecord, CounterRow, DepartureCurve, DeparturePoint, RunRecord, RunReport,
    VarianceTrend,
};
use crate::scenario::{Prepared, Scenario, ScenarioError};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{algorithm} from start {start_index} at {variance_pct}%: {source}")]
    Run { algorithm: String, start_index: usize, variance_pct: f64, source: flowpath_core::Error },
    #[error("{0}")]
    Selection(String),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Core(#[from] flowpath_core::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Job {
    pub algorithm: Algorithm,
    pub start_index: usize,
    pub variance_pct: f64,
    pub t0: f64,
}

pub struct Harness {
    prepared: Prepared,
    pool: rayon::ThreadPool,
}

impl Harness {
    /// Builds the scenario and a pool of `workers` threads (the scenario's
    /// own setting when `None`).
    pub fn new(scenario: Scenario, workers: Option<usize>) -> Result<Self> {
        let workers = workers.unwrap_or(scenario.workers);
        if workers == 0 {
            return Err(HarnessError::Selection("worker count must be at least 1".into()));
        }
        let prepared = Prepared::new(scenario)?;
        Ok(Self { prepared, pool: pool(workers)? })
    }

    pub fn prepared(&self) -> &Prepared {
        &self.prepared
    }

    pub fn scenario(&self) -> &Scenario {
        &self.prepared.scenario
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    fn check_start(&self, start_index: usize) -> Result<()> {
        let n = self.prepared.starts.len();
        if start_index >= n {
            return Err(HarnessError::Selection(format!("start index {start_index} out of range, scenario has {n} starts")));
        }
        Ok(())
    }

    fn run_one(&self, job: Job) -> Result<RunRecord> {
        let p = &self.prepared;
        let fail = |source| HarnessError::Run {
            algorithm: job.algorithm.name().into(),
            start_index: job.start_index,
            variance_pct: job.variance_pct,
            source,
        };
        let cfg = p.search_config(job.algorithm, job.variance_pct, job.t0).map_err(fail)?;
        let clock = Instant::now();
        let r = search(&p.graph, &p.provider, p.starts[job.start_index], &cfg, &RayonExecutor).map_err(fail)?;
        let wall_ms = clock.elapsed().as_secs_f64() * 1e3;
        Ok(RunRecord {
            algorithm: job.algorithm.name().into(),
            start_index: job.start_index,
            variance_pct: job.variance_pct,
            t0: job.t0,
            reached: r.reached,
            path: r.path.iter().map(|&v| p.graph.position(v)).map(|q| [sig12(q.x), sig12(q.y)]).collect(),
            intervals: r.intervals.iter().copied().map(interval_pair).collect(),
            goal_interval: r.goal_interval().filter(|_| r.reached).map(interval_pair),
            counters: CounterRecord::from(r.counts),
            expanded: r.expanded,
            wall_ms: (wall_ms * 1e3).round() / 1e3,
        })
    }

    /// Runs `jobs` concurrently; records come back in job order.
    pub fn run_jobs(&self, jobs: &[Job]) -> Result<Vec<RunRecord>> {
        for j in jobs {
            self.check_start(j.start_index)?;
        }
        self.pool.install(|| jobs.par_iter().map(|&j| self.run_one(j)).collect())
    }

    /// Single search.
    pub fn run_plan(&self, algorithm: Algorithm, start_index: usize, variance_pct: f64) -> Result<RunReport> {
        let job = Job { algorithm, start_index, variance_pct, t0: self.scenario().t0 };
        Ok(RunReport::new(self.scenario().clone(), self.run_jobs(&[job])?))
    }

    /// Every algorithm from every start at every configured variance, with
    /// a counter table: one row per algorithm, one column per start.
    pub fn run_bench(&self) -> Result<RunReport> {
        let s = self.scenario();
        let n_starts = s.starts.len();
        let mut jobs = Vec::new();
        for &variance_pct in &s.variances_pct {
            for &algorithm in &self.prepared.algorithms {
                for start_index in 0..n_starts {
                    jobs.push(Job { algorithm, start_index, variance_pct, t0: s.t0 });
                }
            }
        }
        let runs = self.run_jobs(&jobs)?;
        let table = runs
            .chunks(n_starts)
            .map(|row| CounterRow {
                algorithm: row[0].algorithm.clone(),
                variance_pct: row[0].variance_pct,
                cfc: row.iter().map(|r| r.counters.cfc).collect(),
                rcfc: row.iter().map(|r| r.counters.rcfc).collect(),
                cmc: row.iter().map(|r| r.counters.cmc).collect(),
            })
            .collect();
        let mut report = RunReport::new(s.clone(), runs);
        report.counter_table = Some(table);
        Ok(report)
    }

    /// One algorithm over `variances` for the selected starts (all when
    /// empty). Trends are evaluated in ascending variance.
    pub fn run_variance_sweep(&self, algorithm: Algorithm, variances: &[f64], starts: &[usize]) -> Result<RunReport> {
        if variances.is_empty() {
            return Err(HarnessError::Selection("variance list is empty".into()));
        }
        let s = self.scenario();
        let starts: Vec<usize> = if starts.is_empty() { (0..s.starts.len()).collect() } else { starts.to_vec() };
        let mut jobs = Vec::new();
        for &variance_pct in variances {
            for &start_index in &starts {
                jobs.push(Job { algorithm, start_index, variance_pct, t0: s.t0 });
            }
        }
        let runs = self.run_jobs(&jobs)?;
        let mut order: Vec<usize> = (0..variances.len()).collect();
        order.sort_by(|&a, &b| variances[a].total_cmp(&variances[b]));
        let trends = starts
            .iter()
            .enumerate()
            .map(|(k, &start_index)| {
                let recs: Vec<&RunRecord> = order.iter().map(|&i| &runs[i * starts.len() + k]).collect();
                let widths: Vec<Option<f64>> = recs.iter().map(|r| r.goal_interval.map(|[lo, hi]| sig12(hi - lo))).collect();
                let reached: Vec<f64> = widths.iter().flatten().copied().collect();
                VarianceTrend {
                    start_index,
                    variances_pct: order.iter().map(|&i| variances[i]).collect(),
                    width_non_decreasing: reached.windows(2).all(|w| w[0] <= w[1]),
                    feasibility_non_increasing: recs.windows(2).all(|w| w[0].reached || !w[1].reached),
                    widths,
                }
            })
            .collect();
        let mut report = RunReport::new(s.clone(), runs);
        report.variance_trends = Some(trends);
        Ok(report)
    }

    /// One search per departure time, reporting the arrival curve and the
    /// departure with the shortest transit.
    pub fn run_departure_sweep(
        &self,
        algorithm: Algorithm,
        start_index: usize,
        variance_pct: f64,
        departures: &[f64],
    ) -> Result<RunReport> {
        if departures.is_empty() {
            return Err(HarnessError::Selection("departure list is empty".into()));
        }
        let jobs: Vec<Job> = departures.iter().map(|&t0| Job { algorithm, start_index, variance_pct, t0 }).collect();
        let runs = self.run_jobs(&jobs)?;
        let points: Vec<DeparturePoint> = runs
            .iter()
            .map(|r| {
                let arrival = r.goal_interval.map(|[_, hi]| hi);
                DeparturePoint { t0: r.t0, reached: r.reached, arrival, duration: arrival.map(|a| sig12(a - r.t0)) }
            })
            .collect();
        let best_t0 = points
            .iter()
            .filter_map(|p| p.duration.map(|d| (d, p.t0)))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)))
            .map(|(_, t0)| t0);
        let mut report = RunReport::new(self.scenario().clone(), runs);
        report.departure_curve = Some(DepartureCurve {
            algorithm: algorithm.name().into(),
            start_index,
            variance_pct,
            points,
            best_t0,
        });
        Ok(report)
    }

    /// Current samples on a `density` x `density` lattice over the grid
    /// region at each of `times`: rows `[x, y, t, u, v]`.
    pub fn emit_field(&self, times: &[f64], density: usize) -> Result<Vec<[f64; 5]>> {
        if density < 2 {
            return Err(HarnessError::Selection("field density must be at least 2".into()));
        }
        let region = self.prepared.graph.spec().region();
        let counters = CallCounters::new();
        let mut rows = Vec::with_capacity(times.len() * density * density);
        for &t in times {
            for iy in 0..density {
                let y = lattice_coord(region.y_min, region.y_max, iy, density);
                for ix in 0..density {
                    let x = lattice_coord(region.x_min, region.x_max, ix, density);
                    let s = self.prepared.provider.flow_at(x, y, t, &counters)?;
                    rows.push([x, y, t, s.u, s.v]);
                }
            }
        }
        Ok(rows)
    }
}

pub fn write_field_csv<W: Write>(rows: &[[f64; 5]], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "t", "u", "v"])?;
    for r in rows {
        w.write_record(r.iter().map(|v| format!("{v:?}")))?;
    }
    w.flush()?;
    Ok(())
}

/// First robust algorithm of the scenario, else its first algorithm.
pub fn default_sweep_algorithm(p: &Prepared) -> Algorithm {
    p.algorithms.iter().copied().find(|a| a.robust).unwrap_or(p.algorithms[0])
}
