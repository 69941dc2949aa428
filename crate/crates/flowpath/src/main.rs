use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use flowpath::harness::{default_sweep_algorithm, write_field_csv};
use flowpath::oracle::{containment_audit, fifo_audit, run_oracle_check};
use flowpath::{Harness, RunReport, Scenario};
use flowpath_core::{Algorithm, Neighborhood};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "flowpath", version, about = "Robust time-optimal routing through time-varying currents")]
struct Cli {
    /// Scenario file (TOML); the bundled reference scenario when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; overrides the scenario setting.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one route.
    Plan {
        /// Algorithm name, e.g. TVE, RA*TVE, RZA*TVE; the scenario's first when omitted.
        #[arg(long)]
        algorithm: Option<String>,
        #[arg(long, default_value_t = 0)]
        start: usize,
        /// Variance in percent; the scenario's first when omitted.
        #[arg(long)]
        variance: Option<f64>,
    },
    /// Every algorithm from every start, with the counter table.
    Bench,
    /// One algorithm over a list of variances.
    SweepVariance {
        #[arg(long)]
        algorithm: Option<String>,
        /// Percentages; the scenario list when omitted.
        #[arg(long, value_delimiter = ',')]
        variances: Vec<f64>,
        /// Start indices; all when omitted.
        #[arg(long, value_delimiter = ',')]
        starts: Vec<usize>,
    },
    /// One search per departure time.
    SweepDeparture {
        #[arg(long)]
        algorithm: Option<String>,
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[arg(long)]
        variance: Option<f64>,
        /// Departure times; the scenario list when omitted.
        #[arg(long, value_delimiter = ',')]
        t0: Vec<f64>,
    },
    /// Brute-force oracle on tiny grids plus the edge-cost audits.
    Oracle {
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// Largest number of grid points per axis (2 or 3).
        #[arg(long, default_value_t = 3)]
        side: usize,
        #[arg(long, default_value_t = 4)]
        neighborhood: usize,
        /// Random edges for the audits.
        #[arg(long, default_value_t = 1000)]
        edges: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Current samples over the grid region, for plotting.
    EmitField {
        #[arg(long, value_delimiter = ',')]
        times: Vec<f64>,
        #[arg(long, default_value_t = 32)]
        density: usize,
    },
}

#[derive(Serialize)]
struct OracleOutput {
    oracle: flowpath::oracle::OracleReport,
    fifo: flowpath::oracle::FifoReport,
    containment: flowpath::oracle::ContainmentReport,
}

fn algorithm(name: Option<&str>, fallback: Algorithm) -> Result<Algorithm> {
    match name {
        None => Ok(fallback),
        Some(n) => Algorithm::from_name(n).ok_or_else(|| anyhow!("unknown algorithm {n:?}")),
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_report(report: &RunReport, cli: &Cli, csv: fn(&RunReport, &mut dyn Write) -> csv::Result<()>) -> Result<()> {
    let mut w = sink(&cli.out)?;
    match cli.format {
        Format::Json => writeln!(w, "{}", report.to_json())?,
        Format::Csv => csv(report, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    let scenario = match &cli.config {
        Some(p) => Scenario::load(p)?,
        None => Scenario::reference(),
    };
    if let Command::Oracle { seeds, side, neighborhood, edges, seed } = cli.command {
        let h = Harness::new(scenario, cli.workers)?;
        let p = h.prepared();
        let region = p.graph.spec().region();
        let out = OracleOutput {
            oracle: run_oracle_check(seeds, side, Neighborhood::from_order(neighborhood)?)?,
            fifo: fifo_audit(&p.provider, region, &p.transit, edges, seed)?,
            containment: containment_audit(&p.provider, region, &p.transit, p.scenario.variances_pct[0], edges, seed)?,
        };
        let mut w = sink(&cli.out)?;
        match cli.format {
            Format::Json => writeln!(w, "{}", serde_json::to_string_pretty(&out)?)?,
            Format::Csv => {
                let mut c = csv::Writer::from_writer(&mut w);
                for case in &out.oracle.cases {
                    c.serialize(case)?;
                }
                c.flush()?;
            }
        }
        w.flush()?;
        eprintln!(
            "oracle: {} of {} seeds disagree, max deviation {:e}; overtaking {} of {} edge pairs",
            out.oracle.mismatches,
            seeds,
            out.oracle.max_tve_deviation.max(out.oracle.max_astar_deviation),
            out.fifo.violations.len(),
            out.fifo.checked
        );
        return Ok(out.oracle.passed);
    }

    let h = Harness::new(scenario, cli.workers)?;
    let p = h.prepared();
    let first_variance = p.scenario.variances_pct[0];
    match &cli.command {
        Command::Plan { algorithm: name, start, variance } => {
            let alg = algorithm(name.as_deref(), p.algorithms[0])?;
            let report = h.run_plan(alg, *start, variance.unwrap_or(first_variance))?;
            write_report(&report, cli, |r, w| r.write_runs_csv(w))?;
        }
        Command::Bench => {
            let report = h.run_bench()?;
            write_report(&report, cli, |r, w| r.write_table_csv(w))?;
        }
        Command::SweepVariance { algorithm: name, variances, starts } => {
            let alg = algorithm(name.as_deref(), default_sweep_algorithm(p))?;
            let variances = if variances.is_empty() { p.scenario.variances_pct.clone() } else { variances.clone() };
            let report = h.run_variance_sweep(alg, &variances, starts)?;
            write_report(&report, cli, |r, w| r.write_waypoints_csv(w))?;
        }
        Command::SweepDeparture { algorithm: name, start, variance, t0 } => {
            let alg = algorithm(name.as_deref(), p.algorithms[0])?;
            let t0s = if t0.is_empty() { p.scenario.departures() } else { t0.clone() };
            let report = h.run_departure_sweep(alg, *start, variance.unwrap_or(first_variance), &t0s)?;
            write_report(&report, cli, |r, w| r.write_departure_csv(w))?;
        }
        Command::EmitField { times, density } => {
            let times = if times.is_empty() { vec![p.scenario.t0] } else { times.clone() };
            let rows = h.emit_field(&times, *density)?;
            let mut w = sink(&cli.out)?;
            match cli.format {
                Format::Csv => write_field_csv(&rows, &mut w)?,
                Format::Json => writeln!(w, "{}", serde_json::to_string(&rows)?)?,
            }
            w.flush()?;
        }
        Command::Oracle { .. } => unreachable!("handled above"),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
