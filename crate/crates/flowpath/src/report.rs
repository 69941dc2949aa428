//! Run records and their JSON / CSV renderings.

use std::io::Write;

use flowpath_core::{Counts, CostInterval};
use serde::Serialize;

use crate::scenario::Scenario;

/// Rounds to 12 significant digits so reports do not depend on the last few
/// bits of floating-point noise. Non-finite values pass through.
pub fn sig12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CounterRecord {
    pub rcfc: u64,
    pub cfc: u64,
    pub cmc: u64,
}

impl From<Counts> for CounterRecord {
    fn from(c: Counts) -> Self {
        Self { rcfc: c.rcfc, cfc: c.cfc, cmc: c.cmc }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub start_index: usize,
    pub variance_pct: f64,
    pub t0: f64,
    pub reached: bool,
    pub path: Vec<[f64; 2]>,
    pub intervals: Vec<[f64; 2]>,
    pub goal_interval: Option<[f64; 2]>,
    pub counters: CounterRecord,
    pub expanded: usize,
    pub wall_ms: f64,
}

pub fn interval_pair(c: CostInterval) -> [f64; 2] {
    [sig12(c.lo), sig12(c.hi)]
}

/// One row of the counter table: an algorithm against every start.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterRow {
    pub algorithm: String,
    pub variance_pct: f64,
    pub cfc: Vec<u64>,
    pub rcfc: Vec<u64>,
    pub cmc: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeparturePoint {
    pub t0: f64,
    pub reached: bool,
    pub arrival: Option<f64>,
    pub duration: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DepartureCurve {
    pub algorithm: String,
    pub start_index: usize,
    pub variance_pct: f64,
    pub points: Vec<DeparturePoint>,
    /// Departure with the shortest transit; ties go to the earliest.
    pub best_t0: Option<f64>,
}

/// Per-start trend over increasing variance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceTrend {
    pub start_index: usize,
    pub variances_pct: Vec<f64>,
    pub widths: Vec<Option<f64>>,
    pub width_non_decreasing: bool,
    pub feasibility_non_increasing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub runs: Vec<RunRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counter_table: Option<Vec<CounterRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance_trends: Option<Vec<VarianceTrend>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub departure_curve: Option<DepartureCurve>,
}

impl RunReport {
    pub fn new(scenario: Scenario, runs: Vec<RunRecord>) -> Self {
        Self { scenario, runs, counter_table: None, variance_trends: None, departure_curve: None }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per run.
    pub fn write_runs_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "algorithm",
            "start_index",
            "variance_pct",
            "t0",
            "reached",
            "goal_lo",
            "goal_hi",
            "waypoints",
            "rcfc",
            "cfc",
            "cmc",
            "expanded",
            "wall_ms",
        ])?;
        for r in &self.runs {
            let (lo, hi) = r.goal_interval.map_or((String::new(), String::new()), |[a, b]| (a.to_string(), b.to_string()));
            w.write_record([
                r.algorithm.clone(),
                r.start_index.to_string(),
                r.variance_pct.to_string(),
                r.t0.to_string(),
                r.reached.to_string(),
                lo,
                hi,
                r.path.len().to_string(),
                r.counters.rcfc.to_string(),
                r.counters.cfc.to_string(),
                r.counters.cmc.to_string(),
                r.expanded.to_string(),
                r.wall_ms.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// One row per waypoint of every reached run: the interval series along
    /// each path.
    pub fn write_waypoints_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["algorithm", "start_index", "variance_pct", "waypoint", "x", "y", "lo", "hi"])?;
        for r in &self.runs {
            for (i, (p, iv)) in r.path.iter().zip(&r.intervals).enumerate() {
                w.write_record([
                    r.algorithm.clone(),
                    r.start_index.to_string(),
                    r.variance_pct.to_string(),
                    i.to_string(),
                    p[0].to_string(),
                    p[1].to_string(),
                    iv[0].to_string(),
                    iv[1].to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Counter table rows (`cfc` per start), or the runs when there is none.
    pub fn write_table_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let Some(table) = &self.counter_table else {
            return self.write_runs_csv(out);
        };
        let mut w = csv::Writer::from_writer(out);
        let n = table.first().map_or(0, |r| r.cfc.len());
        let mut header = vec!["algorithm".to_string(), "variance_pct".to_string(), "counter".to_string()];
        header.extend((1..=n).map(|i| format!("SP{i}")));
        w.write_record(&header)?;
        for row in table {
            for (name, vals) in [("rcfc", &row.rcfc), ("cfc", &row.cfc), ("cmc", &row.cmc)] {
                let mut rec = vec![row.algorithm.clone(), row.variance_pct.to_string(), name.to_string()];
                rec.extend(vals.iter().map(u64::to_string));
                w.write_record(&rec)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_departure_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let Some(curve) = &self.departure_curve else {
            return self.write_runs_csv(out);
        };
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t0", "reached", "arrival", "duration"])?;
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        for p in &curve.points {
            w.write_record([p.t0.to_string(), p.reached.to_string(), opt(p.arrival), opt(p.duration)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Drops `wall_ms` from every run of a JSON report so two reports can be
/// compared byte for byte.
pub fn strip_wall_times(json: &str) -> serde_json::Result<String> {
    let mut v: serde_json::Value = serde_json::from_str(json)?;
    if let Some(runs) = v.get_mut("runs").and_then(|r| r.as_array_mut()) {
        for r in runs {
            if let Some(obj) = r.as_object_mut() {
                obj.remove("wall_ms");
            }
        }
    }
    serde_json::to_string_pretty(&v)
}
