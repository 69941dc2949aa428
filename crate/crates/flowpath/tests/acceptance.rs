//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use flowpath::harness::default_sweep_algorithm;
use flowpath::oracle::{fifo_audit, run_oracle_check, FIFO_TOLERANCE, ORACLE_TOLERANCE};
use flowpath::report::strip_wall_times;
use flowpath::{Harness, Prepared, Scenario};
use flowpath_core::flowfield::{jet_velocity, meander_amplitude, stream_value};
use flowpath_core::search::search;
use flowpath_core::transit::{edge_transit_time, robust_edge_cost};
use flowpath_core::{
    Algorithm, CallCounters, CostInterval, FlowProvider, FlowSample, GriddedField, JetParams, Neighborhood,
    ParameterSet, Point, Region, Sequential, TransitConfig, UncertaintyDomain,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Outcome;

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(elapsed: Duration, budget_s: u64) -> bool {
    elapsed < Duration::from_secs(budget_s)
}

fn reference() -> Prepared {
    Prepared::new(Scenario::reference()).expect("reference scenario")
}

fn zero_variance_reduction() -> Outcome {
    let clock = Instant::now();
    let p = reference();
    let mut bad = Vec::new();
    for alg in Algorithm::ALL.into_iter().filter(|a| a.robust) {
        for (i, &s) in p.starts.iter().enumerate() {
            let robust = search(&p.graph, &p.provider, s, &p.search_config(alg, 0.0, 0.0).unwrap(), &Sequential).unwrap();
            let twin = alg.non_robust();
            let plain = search(&p.graph, &p.provider, s, &p.search_config(twin, 0.0, 0.0).unwrap(), &Sequential).unwrap();
            let same = robust.reached == plain.reached
                && robust.path == plain.path
                && robust.predecessors() == plain.predecessors()
                && robust.goal_interval() == plain.goal_interval()
                && robust.labels.iter().all(|l| l.interval.is_degenerate());
            if !same {
                bad.push(format!("{alg}/SP{}", i + 1));
            }
        }
    }
    let t = clock.elapsed();
    outcome(bad.is_empty() && within(t, 30), format!("20 pairs, mismatches {bad:?}, {:.1} s", t.as_secs_f64()))
}

fn brute_force_oracle() -> Outcome {
    let clock = Instant::now();
    let r = run_oracle_check(100, 3, Neighborhood::N4).unwrap();
    let t = clock.elapsed();
    let reachable = r.cases.iter().filter(|c| c.enumerated.is_some()).count();
    outcome(
        r.max_tve_deviation < ORACLE_TOLERANCE && r.max_astar_deviation < ORACLE_TOLERANCE && within(t, 60),
        format!(
            "100 seeds ({reachable} reachable), max |TVE - enum| {:e}, max |A*TVE - TVE| {:e}, {:.1} s",
            r.max_tve_deviation,
            r.max_astar_deviation,
            t.as_secs_f64()
        ),
    )
}

fn robust_call_structure() -> Outcome {
    let provider = FlowProvider::Jet(JetParams::default());
    let corners = UncertaintyDomain::from_percent(5.0).unwrap().corner_sets();
    let mut detail = Vec::new();
    let mut pass = corners.len() == 8;
    for n_seg in [8, 5] {
        let cfg = TransitConfig { n_seg, ..TransitConfig::default() };
        let c = CallCounters::new();
        let dep = CostInterval::new(1.0, 1.3).unwrap();
        let out = robust_edge_cost(Point::new(2.0, -3.0), Point::new(2.4, -2.8), dep, &provider, &corners, &cfg, &c, &Sequential)
            .unwrap();
        let k = c.snapshot();
        pass &= out.is_some() && k.rcfc == 1 && k.cfc == 16 && k.cmc == 16 * n_seg as u64;
        detail.push(format!("n_seg {n_seg}: rcfc {} cfc {} cmc {}", k.rcfc, k.cfc, k.cmc));
    }
    outcome(pass, detail.join("; "))
}

fn table_ordering() -> Outcome {
    let clock = Instant::now();
    let h = Harness::new(Scenario::reference(), None).unwrap();
    let r = h.run_bench().unwrap();
    let t = clock.elapsed();
    let table = r.counter_table.unwrap();
    let row = |name: &str| &table.iter().find(|r| r.algorithm == name).unwrap().cfc;
    let (rtve, ra, rz, rza) = (row("RTVE"), row("RA*TVE"), row("RZTVE"), row("RZA*TVE"));
    let mut pass = within(t, 300);
    let mut ratios = Vec::new();
    for i in 0..rtve.len() {
        let ratio = rtve[i] as f64 / rza[i] as f64;
        pass &= rza[i] < rz[i] && rz[i] < ra[i] && ra[i] < rtve[i] && ratio >= 4.0;
        ratios.push(format!("{ratio:.2}"));
    }
    outcome(pass, format!("RTVE/RZA*TVE per start [{}], {:.1} s", ratios.join(", "), t.as_secs_f64()))
}

fn flow_field_correctness() -> Outcome {
    let p = JetParams::default();
    let prov = FlowProvider::Jet(p);
    let c = CallCounters::new();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut max_div = 0.0f64;
    for _ in 0..1000 {
        let (x, y, t) = (rng.gen_range(0.0..12.0), rng.gen_range(-4.0..4.0), rng.gen_range(0.0..50.0));
        max_div = max_div.max(prov.flow_jacobian(x, y, t, 1e-4, &c).unwrap().divergence().abs());
    }
    let h = 1e-6;
    let mut max_rel = 0.0f64;
    for _ in 0..1000 {
        let (x, t) = (rng.gen_range(0.0..12.0), rng.gen_range(0.0..50.0));
        // within two widths of the jet axis, where the field is not saturated
        let y = meander_amplitude(t, &p) * (p.k * (x - p.c * t)).cos() + rng.gen_range(-2.0..2.0);
        let phi_x = (stream_value(x + h, y, t, &p) - stream_value(x - h, y, t, &p)) / (2.0 * h);
        let phi_y = (stream_value(x, y + h, t, &p) - stream_value(x, y - h, t, &p)) / (2.0 * h);
        let s = jet_velocity(x, y, t, &p);
        max_rel = max_rel.max((s.u + phi_y).hypot(s.v - phi_x) / s.speed());
    }
    let mut max_axis = 0.0f64;
    for _ in 0..100 {
        let (x, t) = (rng.gen_range(-20.0..20.0), rng.gen_range(0.0..100.0));
        let y = meander_amplitude(t, &p) * (p.k * (x - p.c * t)).cos();
        max_axis = max_axis.max((stream_value(x, y, t, &p) - 1.0).abs());
    }
    outcome(
        max_div < 1e-6 && max_rel < 1e-6 && max_axis < 1e-12,
        format!("max divergence {max_div:.2e}, velocity rel error {max_rel:.2e}, axis deviation {max_axis:.2e}"),
    )
}

fn uniform_closed_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let region = Region::new(-10.0, 10.0, -10.0, 10.0);
    let c = CallCounters::new();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let v: f64 = rng.gen_range(0.2..2.0);
        let x = rng.gen_range(-0.95..0.95) * v;
        let base = (v * v - x * x).sqrt();
        let a = rng.gen_range(-0.9..1.5) * base;
        let len = rng.gen_range(0.1..5.0);
        let ang = rng.gen_range(-PI..PI);
        let dir = Point::new(ang.cos(), ang.sin());
        let perp = Point::new(-dir.y, dir.x);
        let current = dir * a + perp * x;
        let prov = FlowProvider::Gridded(GriddedField::uniform(region, FlowSample::new(current.x, current.y)).unwrap());
        let from = Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let want = len / (base + a);
        for n_seg in [1, 3, 8, 32] {
            let cfg = TransitConfig { n_seg, tau: 0.5, v_veh: v };
            let got = edge_transit_time(from, from + dir * len, 4.0, &prov, &ParameterSet::nominal(), &cfg, &c)
                .unwrap()
                .unwrap_or(f64::INFINITY);
            worst = worst.max((got - want).abs() / want);
        }
    }
    outcome(worst < 1e-9, format!("50 draws x n_seg {{1, 3, 8, 32}}, worst rel error {worst:.2e}"))
}

fn variance_sweep_trend() -> Outcome {
    let clock = Instant::now();
    let h = Harness::new(Scenario::reference(), None).unwrap();
    let alg = default_sweep_algorithm(h.prepared());
    let variances = [0.0, 2.5, 5.0, 10.0, 15.0];
    let r = h.run_variance_sweep(alg, &variances, &[1]).unwrap();
    let t = clock.elapsed();
    let widths: Vec<Option<f64>> = r.runs.iter().map(|r| r.goal_interval.map(|[lo, hi]| hi - lo)).collect();
    let all_reached = widths.iter().all(Option::is_some);
    let increasing = all_reached && widths.windows(2).all(|w| w[0].unwrap() < w[1].unwrap());
    let monotone_paths = r.runs.iter().filter(|r| r.reached).all(|r| {
        r.intervals.windows(2).all(|w| w[0][0] < w[1][0] && w[0][1] < w[1][1])
    });
    let shown: Vec<String> = variances
        .iter()
        .zip(&widths)
        .map(|(v, w)| match w {
            Some(w) => format!("{v}%: {w:.4}"),
            None => format!("{v}%: unreachable"),
        })
        .collect();
    outcome(
        increasing && monotone_paths && within(t, 120),
        format!("{alg} from SP2, goal widths [{}], waypoint series monotone {monotone_paths}, {:.1} s", shown.join(", "), t.as_secs_f64()),
    )
}

fn cli_bench(workers: usize) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_flowpath"))
        .args(["bench", "--workers", &workers.to_string()])
        .output()
        .expect("run flowpath");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn parallel_determinism() -> Outcome {
    let one = strip_wall_times(&cli_bench(1)).unwrap();
    let eight = strip_wall_times(&cli_bench(8)).unwrap();
    let counted = one.matches("\"cfc\"").count();
    outcome(one == eight, format!("{} bytes each after dropping wall_ms, {counted} counter blocks", one.len()))
}

fn gating_soundness() -> Outcome {
    let p = reference();
    let mut bad = Vec::new();
    for (gated, plain, pct) in [(Algorithm::ZASTAR_TVE, Algorithm::ASTAR_TVE, 0.0), (Algorithm::RZASTAR_TVE, Algorithm::RASTAR_TVE, 5.0)] {
        for (i, &s) in p.starts.iter().enumerate() {
            let mut cfg = p.search_config(gated, pct, 0.0).unwrap();
            cfg.delta_phi_max = PI;
            let a = search(&p.graph, &p.provider, s, &cfg, &Sequential).unwrap();
            let b = search(&p.graph, &p.provider, s, &p.search_config(plain, pct, 0.0).unwrap(), &Sequential).unwrap();
            if a.labels != b.labels || a.path != b.path || a.counts != b.counts || a.reached != b.reached {
                bad.push(format!("{gated}/SP{}", i + 1));
            }
        }
    }
    outcome(bad.is_empty(), format!("10 pairs at delta_phi_max = pi, mismatches {bad:?}"))
}

fn fifo() -> Outcome {
    let p = reference();
    let r = fifo_audit(&p.provider, p.graph.spec().region(), &p.transit, 1000, 7).unwrap();
    let listed: Vec<String> = r
        .violations
        .iter()
        .map(|v| {
            format!(
                "({:.3},{:.3})->({:.3},{:.3}) t {:.3}/{:.3} arrives {:.6} > {:.6}",
                v.from[0], v.from[1], v.to[0], v.to[1], v.t1, v.t2, v.arrival1, v.arrival2
            )
        })
        .collect();
    outcome(
        r.violation_rate <= 0.01,
        format!(
            "{} of {} passable pairs overtake by more than {FIFO_TOLERANCE:e} ({:.2}%); {} opened, {} closed, {} impassable; [{}]",
            r.violations.len(),
            r.checked,
            100.0 * r.violation_rate,
            r.opened_later,
            r.closed_later,
            r.both_impassable,
            listed.join("; ")
        ),
    )
}


fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("zero-variance reduction", zero_variance_reduction),
        ("brute-force oracle", brute_force_oracle),
        ("robust cost call structure", robust_call_structure),
        ("counter ordering", table_ordering),
        ("flow-field correctness", flow_field_correctness),
        ("uniform-current closed forms", uniform_closed_forms),
        ("variance sweep trend", variance_sweep_trend),
        ("parallel determinism", parallel_determinism),
        ("gating soundness", gating_soundness),
        ("FIFO audit", fifo),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {:<28} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
