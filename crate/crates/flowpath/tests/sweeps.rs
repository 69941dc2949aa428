use std::f64::consts::PI;
use std::path::Path;

use flowpath::{Harness, Scenario};
use flowpath_core::flowfield::{max_speed_bound, Lattice};
use flowpath_core::{Algorithm, CallCounters, FlowSample, GriddedField, Region};

fn small(extra: &str, flow: &str) -> Scenario {
    let text = format!(
        "name = \"small\"\nstarts = [[0.5, -3.0], [1.0, -2.0]]\ngoal = [3.0, -2.5]\n{extra}\n{flow}\n\
         [grid]\nx_min = 0\nx_max = 4\ny_min = -4\ny_max = -1\nnx = 9\nny = 7\n"
    );
    Scenario::from_toml_str(&text, Path::new("/tmp/small.toml")).unwrap()
}

fn still_water_scenario(dir: &Path) -> Scenario {
    let field = GriddedField::uniform(Region::new(0.0, 4.0, -4.0, -1.0), FlowSample::ZERO).unwrap();
    let path = dir.join("still.txt");
    std::fs::write(&path, flowpath::fieldfile::write(&field)).unwrap();
    small("", &format!("[flow]\nkind = \"gridded\"\npath = {:?}", path.to_str().unwrap()))
}

#[test]
fn still_water_transit_does_not_depend_on_departure() {
    let dir = tempfile::tempdir().unwrap();
    let h = Harness::new(still_water_scenario(dir.path()), None).unwrap();
    let t0s = [0.0, 1.25, 7.0, 31.5];
    let r = h.run_departure_sweep(Algorithm::RZASTAR_TVE, 1, 5.0, &t0s).unwrap();
    let curve = r.departure_curve.unwrap();
    let d0 = curve.points[0].duration.unwrap();
    for p in &curve.points {
        assert!((p.duration.unwrap() - d0).abs() < 1e-9, "{p:?}");
    }
    assert_eq!(curve.best_t0, Some(0.0));
}

#[test]
fn jet_departure_curve_varies_and_best_is_worker_independent() {
    let period = 2.0 * PI / 0.4;
    let t0s: Vec<f64> = (0..8).map(|i| period * i as f64 / 8.0).collect();
    let mut bests = Vec::new();
    let mut curves = Vec::new();
    for workers in [1, 3] {
        let h = Harness::new(small("", ""), Some(workers)).unwrap();
        let c = h.run_departure_sweep(Algorithm::RASTAR_TVE, 0, 2.5, &t0s).unwrap().departure_curve.unwrap();
        bests.push(c.best_t0);
        curves.push(c.points);
    }
    assert_eq!(bests[0], bests[1]);
    assert_eq!(curves[0], curves[1]);
    let durations: Vec<f64> = curves[0].iter().filter_map(|p| p.duration).collect();
    assert!(durations.len() >= 2);
    let spread = durations.iter().cloned().fold(f64::MIN, f64::max) - durations.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread > 1e-3, "spread {spread}");
}

#[test]
fn emitted_field_matches_flow_and_stays_under_the_bound() {
    let h = Harness::new(Scenario::reference(), None).unwrap();
    let p = h.prepared();
    let times = [0.0, 12.5, 40.0];
    let rows = h.emit_field(&times, 24).unwrap();
    assert_eq!(rows.len(), 3 * 24 * 24);
    let c = CallCounters::new();
    for r in &rows {
        assert_eq!(p.provider.flow_at(r[0], r[1], r[2], &c).unwrap(), FlowSample::new(r[3], r[4]));
    }
    let bound = max_speed_bound(&p.provider, p.graph.spec().region(), (0.0, 50.0), Lattice::default(), &c).unwrap();
    let max = rows.iter().map(|r| r[3].hypot(r[4])).fold(0.0, f64::max);
    assert!(max <= bound, "{max} > {bound}");
}

#[test]
fn unreachable_goal_still_reports_counters() {
    // a slow vehicle cannot cross the jet between a southern start and a northern goal
    let text = "starts = [[0.5, -2.5]]\ngoal = [5.5, 2.5]\n[transit]\nv_veh = 0.2\n\
                [grid]\nx_min = 0\nx_max = 6\ny_min = -3\ny_max = 3\nnx = 13\nny = 13\n";
    let s = Scenario::from_toml_str(text, Path::new("slow.toml")).unwrap();
    let h = Harness::new(s, None).unwrap();
    for alg in [Algorithm::TVE, Algorithm::RTVE, Algorithm::RZASTAR_TVE] {
        let r = &h.run_plan(alg, 0, 5.0).unwrap().runs[0];
        assert!(!r.reached, "{alg}");
        assert!(r.path.is_empty() && r.goal_interval.is_none());
        assert!(r.counters.cfc > 0 && r.counters.cmc > 0);
    }
}

#[test]
fn robust_goal_interval_has_width_on_the_reference_scenario() {
    let h = Harness::new(Scenario::reference(), None).unwrap();
    for alg in [Algorithm::RTVE, Algorithm::RZASTAR_TVE] {
        let r = &h.run_plan(alg, 3, 5.0).unwrap().runs[0];
        let [lo, hi] = r.goal_interval.unwrap();
        assert!(hi > lo, "{alg}");
    }
}

#[test]
fn counter_consistency_for_a_robust_run() {
    // every cost function call samples n_seg currents; gating adds Jacobian samples on top
    let h = Harness::new(small("", ""), None).unwrap();
    let r = &h.run_plan(Algorithm::RASTAR_TVE, 0, 5.0).unwrap().runs[0];
    assert_eq!(r.counters.cmc, 8 * r.counters.cfc);
    let z = &h.run_plan(Algorithm::RZASTAR_TVE, 0, 5.0).unwrap().runs[0];
    assert!(z.counters.cmc > 8 * z.counters.cfc);
    assert!(z.counters.cfc >= 8 * z.counters.rcfc);
}
