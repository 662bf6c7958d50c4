//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::chart::write_charts;
use crate::error::ConfigError;
use crate::experiments::{builtin_scenarios, scenario_by_name, summarize, ScenarioSpec, SCENARIO_NAMES};
use crate::metrics::to_csv;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rtsim", version, about = "Simulate a real-time device under network interrupt flood")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one builtin scenario, or all of them.
    Run(Box<RunArgs>),
    /// Print the builtin scenario names.
    List,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Arrivals {
    Uniform,
    Poisson,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Builtin scenario name (see `rtsim list`).
    #[arg(long, required_unless_present = "all", conflicts_with = "all")]
    pub scenario: Option<String>,
    /// Run every builtin scenario concurrently.
    #[arg(long)]
    pub all: bool,
    /// Output directory.
    #[arg(long, env = "RTSIM_OUT", default_value = "results")]
    pub out: PathBuf,
    /// Also write packets.svg and critical.svg per scenario.
    #[arg(long)]
    pub charts: bool,

    /// Virtual seconds to simulate; the load pyramid is stretched to fit.
    #[arg(long)]
    pub duration: Option<u64>,
    #[arg(long)]
    pub peak_rate: Option<f64>,
    #[arg(long)]
    pub queue_size: Option<u64>,
    /// Burst: interrupts allowed per slice.
    #[arg(long)]
    pub capacity: Option<u64>,
    /// Burst: slice length.
    #[arg(long)]
    pub slice_us: Option<u64>,
    /// Hysteresis: block below this earliness.
    #[arg(long)]
    pub block_th: Option<f64>,
    /// Hysteresis: unblock at or above this earliness.
    #[arg(long)]
    pub unblock_th: Option<f64>,
    /// Budget: bill ISR time against the budget too.
    #[arg(long)]
    pub charge_isr_time: bool,
    #[arg(long)]
    pub isr_cost_us: Option<u64>,
    #[arg(long)]
    pub driver_cost_us: Option<u64>,
    #[arg(long)]
    pub work_us: Option<u64>,
    #[arg(long)]
    pub period_us: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub arrivals: Option<Arrivals>,
}

impl RunArgs {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        fn push<T: ToString>(v: &mut Vec<(&'static str, String)>, key: &'static str, val: &Option<T>) {
            if let Some(x) = val {
                v.push((key, x.to_string()));
            }
        }
        let mut v = Vec::new();
        push(&mut v, "duration", &self.duration);
        push(&mut v, "peak-rate", &self.peak_rate);
        push(&mut v, "queue-size", &self.queue_size);
        push(&mut v, "capacity", &self.capacity);
        push(&mut v, "slice-us", &self.slice_us);
        push(&mut v, "block-th", &self.block_th);
        push(&mut v, "unblock-th", &self.unblock_th);
        push(&mut v, "isr-cost-us", &self.isr_cost_us);
        push(&mut v, "driver-cost-us", &self.driver_cost_us);
        push(&mut v, "work-us", &self.work_us);
        push(&mut v, "period-us", &self.period_us);
        push(&mut v, "seed", &self.seed);
        if self.charge_isr_time {
            v.push(("charge-isr-time", "true".into()));
        }
        if let Some(a) = self.arrivals {
            let s = match a {
                Arrivals::Uniform => "uniform",
                Arrivals::Poisson => "poisson",
            };
            v.push(("arrivals", s.into()));
        }
        v
    }

    /// Scenarios to run with overrides applied. Under `--all`, policy options
    /// reach only the scenarios whose policy takes them.
    pub fn specs(&self) -> Result<Vec<ScenarioSpec>, ConfigError> {
        let mut specs = match &self.scenario {
            Some(name) => vec![scenario_by_name(name)?],
            None => builtin_scenarios(),
        };
        let overrides = self.overrides();
        for spec in &mut specs {
            for (k, v) in &overrides {
                match spec.set(k, v) {
                    Err(ConfigError::NotApplicable { .. }) if self.all => {}
                    r => r?,
                }
            }
            spec.validate()?;
        }
        Ok(specs)
    }
}

fn write_outputs(spec: &ScenarioSpec, out: &Path, charts: bool) -> Result<String, String> {
    let run = spec.run().map_err(|e| e.to_string())?;
    let csv_path = out.join(format!("{}.csv", spec.name));
    std::fs::write(&csv_path, to_csv(&run.snapshots)).map_err(|e| format!("{}: {e}", csv_path.display()))?;
    if charts {
        let dir = out.join(&spec.name);
        write_charts(&run.snapshots, &dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    let s = summarize(spec, &run);
    Ok(format!(
        "{}: {} s, peak received {}/s, processed {}, max lateness {:.2}% -> {}",
        spec.name,
        run.snapshots.len(),
        s.peak_received_per_s,
        s.total_processed,
        s.max_lateness_pct_per_s,
        csv_path.display()
    ))
}

fn run(args: &RunArgs) -> i32 {
    let specs = match args.specs() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = std::fs::create_dir_all(&args.out) {
        eprintln!("error: {}: {e}", args.out.display());
        return EXIT_IO;
    }
    let results: Vec<Result<String, String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = specs
            .iter()
            .map(|spec| scope.spawn(|| write_outputs(spec, &args.out, args.charts)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
    });
    let mut code = EXIT_OK;
    for r in results {
        match r {
            Ok(line) => println!("{line}"),
            Err(e) => {
                eprintln!("error: {e}");
                code = EXIT_IO;
            }
        }
    }
    code
}

/// Parses `argv` and runs the command. Returns the process exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match cli.command {
        Command::List => {
            for n in SCENARIO_NAMES {
                println!("{n}");
            }
            EXIT_OK
        }
        Command::Run(args) => run(&args),
    }
}
