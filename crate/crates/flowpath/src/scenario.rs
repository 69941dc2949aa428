//! Scenario files: TOML mirror of everything a run needs, plus the prepared
//! graph, provider and speed bound derived from it.

use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};

use flowpath_core::flowfield::{max_speed_bound, Lattice};
use flowpath_core::{
    Algorithm, CallCounters, FlowProvider, GridGraph, GridSpec, JetParams, Neighborhood, Point, SearchConfig,
    TransitConfig, UncertaintyDomain,
};
use serde::{Deserialize, Serialize};

use crate::fieldfile;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: Box<toml::de::Error> },
    #[error("{path}: `{key}`: {msg}")]
    Invalid { path: String, key: String, msg: String },
    #[error("{path}: flow file: {source}")]
    Field { path: PathBuf, source: fieldfile::FieldFileError },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FlowSpec {
    Jet {
        #[serde(default = "d::b0")]
        b0: f64,
        #[serde(default = "d::eps")]
        eps: f64,
        #[serde(default = "d::omega")]
        omega: f64,
        #[serde(default = "d::theta")]
        theta: f64,
        #[serde(default = "d::k")]
        k: f64,
        #[serde(default = "d::c")]
        c: f64,
    },
    Gridded {
        path: PathBuf,
    },
}

impl Default for FlowSpec {
    fn default() -> Self {
        let p = JetParams::default();
        FlowSpec::Jet { b0: p.b0, eps: p.eps, omega: p.omega, theta: p.theta, k: p.k, c: p.c }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    #[serde(default = "d::neighborhood")]
    pub neighborhood: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitSection {
    #[serde(default = "d::n_seg")]
    pub n_seg: usize,
    #[serde(default = "d::tau")]
    pub tau: f64,
    #[serde(default = "d::v_veh")]
    pub v_veh: f64,
}

impl Default for TransitSection {
    fn default() -> Self {
        Self { n_seg: d::n_seg(), tau: d::tau(), v_veh: d::v_veh() }
    }
}

/// Sampling used for the current-speed bound of the A* heuristic. The time
/// span runs from the earliest departure to the latest one plus `horizon`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeedBoundSection {
    #[serde(default = "d::horizon")]
    pub horizon: f64,
    #[serde(default = "d::lattice")]
    pub lattice: [usize; 3],
}

impl Default for SpeedBoundSection {
    fn default() -> Self {
        Self { horizon: d::horizon(), lattice: d::lattice() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "d::name")]
    pub name: String,
    #[serde(default)]
    pub flow: FlowSpec,
    pub grid: GridSection,
    pub starts: Vec<[f64; 2]>,
    pub goal: [f64; 2],
    #[serde(default)]
    pub t0: f64,
    /// Percent, applied to u, v and vehicle speed alike.
    #[serde(default = "d::variances")]
    pub variances_pct: Vec<f64>,
    #[serde(default = "d::algorithms")]
    pub algorithms: Vec<String>,
    #[serde(default = "d::delta_phi_max")]
    pub delta_phi_max: f64,
    #[serde(default)]
    pub transit: TransitSection,
    #[serde(default = "d::workers")]
    pub workers: usize,
    /// Departure grid for the departure sweep; empty means `[t0]`.
    #[serde(default)]
    pub departure_times: Vec<f64>,
    #[serde(default)]
    pub speed_bound: SpeedBoundSection,
}

mod d {
    use super::*;

    pub fn b0() -> f64 {
        JetParams::default().b0
    }
    pub fn eps() -> f64 {
        JetParams::default().eps
    }
    pub fn omega() -> f64 {
        JetParams::default().omega
    }
    pub fn theta() -> f64 {
        JetParams::default().theta
    }
    pub fn k() -> f64 {
        JetParams::default().k
    }
    pub fn c() -> f64 {
        JetParams::default().c
    }
    pub fn neighborhood() -> usize {
        16
    }
    pub fn n_seg() -> usize {
        TransitConfig::default().n_seg
    }
    pub fn tau() -> f64 {
        TransitConfig::default().tau
    }
    pub fn v_veh() -> f64 {
        TransitConfig::default().v_veh
    }
    pub fn horizon() -> f64 {
        200.0
    }
    pub fn lattice() -> [usize; 3] {
        let l = Lattice::default();
        [l.nx, l.ny, l.nt]
    }
    pub fn name() -> String {
        "unnamed".into()
    }
    pub fn variances() -> Vec<f64> {
        vec![5.0]
    }
    pub fn algorithms() -> Vec<String> {
        ["RTVE", "RA*TVE", "RZTVE", "RZA*TVE"].map(String::from).to_vec()
    }
    pub fn delta_phi_max() -> f64 {
        FRAC_PI_4
    }
    pub fn workers() -> usize {
        1
    }
}

/// Source text of the reference scenario shipped with the crate.
pub const REFERENCE_TOML: &str = include_str!("../scenarios/reference.toml");

impl Scenario {
    /// The reference setup: meandering jet over `[0, 12] x [-4, 4]`, a 61 x 41
    /// lattice with 16 neighbours and five starts.
    pub fn reference() -> Self {
        Self::from_toml_str(REFERENCE_TOML, Path::new("<reference>")).expect("bundled reference scenario is valid")
    }

    /// Parses and validates `text`; `origin` names the source in errors and
    /// anchors relative flow-file paths.
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self, ScenarioError> {
        let mut s: Scenario =
            toml::from_str(text).map_err(|e| ScenarioError::Parse { path: origin.to_path_buf(), source: Box::new(e) })?;
        if let FlowSpec::Gridded { path } = &mut s.flow {
            if path.is_relative() {
                if let Some(dir) = origin.parent() {
                    *path = dir.join(&*path);
                }
            }
        }
        s.validate().map_err(|(key, msg)| ScenarioError::Invalid { path: origin.display().to_string(), key, msg })?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| ScenarioError::Io { path: path.to_path_buf(), source: e })?;
        Self::from_toml_str(&text, path)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn grid_spec(&self) -> Result<GridSpec, (String, String)> {
        let g = &self.grid;
        let neighborhood = Neighborhood::from_order(g.neighborhood).map_err(|e| invalid("grid.neighborhood", e))?;
        let spec = GridSpec { x_min: g.x_min, x_max: g.x_max, y_min: g.y_min, y_max: g.y_max, nx: g.nx, ny: g.ny, neighborhood };
        spec.validate().map_err(|e| invalid("grid", e))?;
        Ok(spec)
    }

    pub fn transit_config(&self) -> TransitConfig {
        TransitConfig { n_seg: self.transit.n_seg, tau: self.transit.tau, v_veh: self.transit.v_veh }
    }

    pub fn parsed_algorithms(&self) -> Result<Vec<Algorithm>, (String, String)> {
        self.algorithms
            .iter()
            .enumerate()
            .map(|(i, name)| {
                Algorithm::from_name(name)
                    .ok_or_else(|| (format!("algorithms[{i}]"), format!("unknown algorithm {name:?}")))
            })
            .collect()
    }

    /// Every departure the scenario can ask for.
    pub fn departures(&self) -> Vec<f64> {
        if self.departure_times.is_empty() {
            vec![self.t0]
        } else {
            self.departure_times.clone()
        }
    }

    fn validate(&self) -> Result<(), (String, String)> {
        let spec = self.grid_spec()?;
        let region = spec.region();
        if self.starts.is_empty() {
            return Err(("starts".into(), "at least one start is required".into()));
        }
        for (i, s) in self.starts.iter().enumerate() {
            if !region.contains(Point::new(s[0], s[1])) {
                return Err((format!("starts[{i}]"), "start lies outside the grid".into()));
            }
        }
        if !region.contains(Point::new(self.goal[0], self.goal[1])) {
            return Err(("goal".into(), "goal lies outside the grid".into()));
        }
        if self.variances_pct.is_empty() {
            return Err(("variances_pct".into(), "at least one variance is required".into()));
        }
        for (i, &v) in self.variances_pct.iter().enumerate() {
            UncertaintyDomain::from_percent(v).map_err(|e| invalid(&format!("variances_pct[{i}]"), e))?;
        }
        if self.algorithms.is_empty() {
            return Err(("algorithms".into(), "at least one algorithm is required".into()));
        }
        self.parsed_algorithms()?;
        self.transit_config().validate().map_err(|e| invalid("transit", e))?;
        if !(self.delta_phi_max > 0.0 && self.delta_phi_max <= std::f64::consts::PI) {
            return Err(("delta_phi_max".into(), "must lie in (0, pi]".into()));
        }
        if self.workers == 0 {
            return Err(("workers".into(), "must be at least 1".into()));
        }
        if !self.t0.is_finite() || self.departure_times.iter().any(|t| !t.is_finite()) {
            return Err(("departure_times".into(), "departure times must be finite".into()));
        }
        let sb = &self.speed_bound;
        if !(sb.horizon >= 0.0 && sb.horizon.is_finite()) {
            return Err(("speed_bound.horizon".into(), "must be non-negative".into()));
        }
        if sb.lattice.contains(&0) {
            return Err(("speed_bound.lattice".into(), "lattice counts must be positive".into()));
        }
        if let FlowSpec::Jet { b0, eps, omega, theta, k, c } = self.flow {
            JetParams { b0, eps, omega, theta, k, c }.validate().map_err(|e| invalid("flow", e))?;
        }
        Ok(())
    }
}

fn invalid(key: &str, e: flowpath_core::Error) -> (String, String) {
    (key.to_string(), e.to_string())
}

/// A scenario with its graph, provider and mapped vertices built.
#[derive(Debug)]
pub struct Prepared {
    pub scenario: Scenario,
    pub provider: FlowProvider,
    pub graph: GridGraph,
    pub starts: Vec<usize>,
    pub goal: usize,
    pub algorithms: Vec<Algorithm>,
    pub transit: TransitConfig,
    /// Current-speed bound for the A* heuristic.
    pub current_bound: f64,
}

impl Prepared {
    pub fn new(scenario: Scenario) -> Result<Self, ScenarioError> {
        let at = |(key, msg): (String, String)| ScenarioError::Invalid { path: scenario.name.clone(), key, msg };
        let spec = scenario.grid_spec().map_err(at)?;
        let provider = match &scenario.flow {
            FlowSpec::Jet { b0, eps, omega, theta, k, c } => {
                FlowProvider::Jet(JetParams { b0: *b0, eps: *eps, omega: *omega, theta: *theta, k: *k, c: *c })
            }
            FlowSpec::Gridded { path } => {
                let field = fieldfile::read_path(path)
                    .map_err(|source| ScenarioError::Field { path: path.clone(), source })?;
                let fr = field.region();
                let gr = spec.region();
                if gr.x_min < fr.x_min || gr.x_max > fr.x_max || gr.y_min < fr.y_min || gr.y_max > fr.y_max {
                    return Err(at(("grid".into(), "grid extends beyond the gridded field".into())));
                }
                FlowProvider::Gridded(field)
            }
        };
        let graph = GridGraph::build(spec).map_err(|e| at(invalid("grid", e)))?;
        let starts = scenario
            .starts
            .iter()
            .enumerate()
            .map(|(i, s)| graph.nearest_vertex(Point::new(s[0], s[1])).map_err(|e| at(invalid(&format!("starts[{i}]"), e))))
            .collect::<Result<Vec<_>, _>>()?;
        let goal = graph.nearest_vertex(Point::new(scenario.goal[0], scenario.goal[1])).map_err(|e| at(invalid("goal", e)))?;
        let algorithms = scenario.parsed_algorithms().map_err(at)?;
        let deps = scenario.departures();
        let t_lo = deps.iter().copied().fold(scenario.t0, f64::min);
        let t_hi = deps.iter().copied().fold(scenario.t0, f64::max) + scenario.speed_bound.horizon;
        let [nx, ny, nt] = scenario.speed_bound.lattice;
        let current_bound =
            max_speed_bound(&provider, spec.region(), (t_lo, t_hi), Lattice { nx, ny, nt }, &CallCounters::new())
                .map_err(|e| at(invalid("speed_bound", e)))?;
        let transit = scenario.transit_config();
        Ok(Self { scenario, provider, graph, starts, goal, algorithms, transit, current_bound })
    }

    /// Search settings for one run.
    pub fn search_config(&self, algorithm: Algorithm, variance_pct: f64, t0: f64) -> flowpath_core::Result<SearchConfig> {
        let mut cfg = SearchConfig::new(algorithm);
        cfg.goal = Some(self.goal);
        cfg.t0 = t0;
        cfg.delta_phi_max = self.scenario.delta_phi_max;
        cfg.uncertainty = UncertaintyDomain::from_percent(variance_pct)?;
        cfg.transit = self.transit;
        cfg.current_bound = self.current_bound;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use flowpath_core::Graph;

    #[test]
    fn reference_scenario_parses() {
        let s = Scenario::reference();
        assert_eq!(s.grid.nx, 61);
        assert_eq!(s.grid.ny, 41);
        assert_eq!(s.starts.len(), 5);
        assert_eq!(s.goal, [11.0, 3.0]);
        assert_eq!(s.variances_pct, vec![5.0]);
        assert_eq!(s.flow, FlowSpec::default());
    }

    #[test]
    fn round_trips_through_toml() {
        let s = Scenario::reference();
        let back = Scenario::from_toml_str(&s.to_toml_string(), Path::new("x.toml")).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn minimal_file_takes_defaults() {
        let s = Scenario::from_toml_str(
            "starts = [[0.5, 0.0]]\ngoal = [2.0, 0.0]\n[grid]\nx_min = 0\nx_max = 3\ny_min = -1\ny_max = 1\nnx = 4\nny = 3\n",
            Path::new("m.toml"),
        )
        .unwrap();
        assert_eq!(s.transit, TransitSection::default());
        assert_eq!(s.grid.neighborhood, 16);
        assert_eq!(s.parsed_algorithms().unwrap(), vec![Algorithm::RTVE, Algorithm::RASTAR_TVE, Algorithm::RZTVE, Algorithm::RZASTAR_TVE]);
        assert_eq!(s.departures(), vec![0.0]);
    }

    fn reference_with(edit: impl Fn(&mut Scenario)) -> Result<Scenario, ScenarioError> {
        let mut s = Scenario::reference();
        edit(&mut s);
        Scenario::from_toml_str(&s.to_toml_string(), Path::new("bad.toml"))
    }

    fn invalid_key(r: Result<Scenario, ScenarioError>) -> String {
        match r {
            Err(ScenarioError::Invalid { key, path, .. }) => {
                assert_eq!(path, "bad.toml");
                key
            }
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn validation_names_the_offending_key() {
        assert_eq!(invalid_key(reference_with(|s| s.starts.clear())), "starts");
        assert_eq!(invalid_key(reference_with(|s| s.starts[2] = [20.0, 0.0])), "starts[2]");
        assert_eq!(invalid_key(reference_with(|s| s.goal = [11.0, 9.0])), "goal");
        assert_eq!(invalid_key(reference_with(|s| s.variances_pct = vec![5.0, 120.0])), "variances_pct[1]");
        assert_eq!(invalid_key(reference_with(|s| s.algorithms.push("BFS".into()))), "algorithms[4]");
        assert_eq!(invalid_key(reference_with(|s| s.grid.neighborhood = 6)), "grid.neighborhood");
        assert_eq!(invalid_key(reference_with(|s| s.grid.nx = 1)), "grid");
        assert_eq!(invalid_key(reference_with(|s| s.transit.tau = 0.0)), "transit");
        assert_eq!(invalid_key(reference_with(|s| s.delta_phi_max = 4.0)), "delta_phi_max");
        assert_eq!(invalid_key(reference_with(|s| s.workers = 0)), "workers");
    }

    #[test]
    fn parse_errors_carry_file_and_line() {
        let err = Scenario::from_toml_str("goal = [1.0,\n[grid", Path::new("broken.toml")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("broken.toml"), "{msg}");
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{}\nspeed = 3\n", REFERENCE_TOML);
        assert!(matches!(Scenario::from_toml_str(&text, Path::new("u.toml")), Err(ScenarioError::Parse { .. })));
    }

    #[test]
    fn prepared_reference_maps_starts_and_goal() {
        let p = Prepared::new(Scenario::reference()).unwrap();
        assert_eq!(p.graph.position(p.goal), Point::new(11.0, 3.0));
        // 0.5 sits halfway between lattice columns 0.4 and 0.6; the lower id wins
        assert_eq!(p.graph.position(p.starts[0]), Point::new(0.4, -3.0));
        assert_eq!(p.graph.position(p.starts[4]), Point::new(6.0, -3.0));
        assert!(p.current_bound > 1.0 && p.current_bound < 1.2, "{}", p.current_bound);
    }

    #[test]
    fn gridded_flow_paths_resolve_against_the_config_directory() {
        let s = Scenario::from_toml_str(
            "starts = [[0.5, 0.0]]\ngoal = [2.0, 0.0]\n[flow]\nkind = \"gridded\"\npath = \"field.txt\"\n[grid]\nx_min = 0\nx_max = 3\ny_min = -1\ny_max = 1\nnx = 4\nny = 3\n",
            Path::new("/data/cfg/s.toml"),
        )
        .unwrap();
        assert_eq!(s.flow, FlowSpec::Gridded { path: PathBuf::from("/data/cfg/field.txt") });
    }
}
