//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage/configuration/simulation error, 2 I/O or
//! file-format error. Diagnostics go to stderr; stdout carries data only.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::array::simulate_array;
use crate::config::{LoadError, RunConfig};
use crate::event::DvsEvent;
use crate::io::{read_events_binary, read_events_csv, write_events_binary, write_events_csv, EventFileHeader, EventIoError};
use crate::stats::{
    isi_by_class, pair_transitions, per_pixel_rates, rate_percentile_radius, DEFAULT_BINS_PER_DECADE,
    DEFAULT_ISI_MAX_US, DEFAULT_ISI_MIN_US,
};
use crate::sweep::{emit_sweep_csv, run_sweep, write_sweep_csv, SweepError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dvs-shotnoise", version, about = "DVS shot-noise event simulator and pair statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a pixel array and write its event stream.
    Simulate(RunArgs),
    /// Run the parameter sweep described in the config.
    Sweep(RunArgs),
    /// Compute pair, ISI and rate statistics of an event file.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for pixel simulation (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Event file (.evb binary, or .csv).
    events: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Analysis window in seconds for rates (default: last timestamp).
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_BINS_PER_DECADE)]
    bins_per_decade: u32,
    #[arg(long, default_value_t = DEFAULT_ISI_MIN_US)]
    isi_min_us: f64,
    #[arg(long, default_value_t = DEFAULT_ISI_MAX_US)]
    isi_max_us: f64,
    /// Percentile reported for the per-pixel rate radius.
    #[arg(long, default_value_t = 99.0)]
    percentile: f64,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Io(m) => m,
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Io { .. } => Failure::Io(e.to_string()),
            LoadError::Config(c) => Failure::Config(c.to_string()),
        }
    }
}

impl From<EventIoError> for Failure {
    fn from(e: EventIoError) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Io { .. } | SweepError::Csv { .. } => Failure::Io(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    EXIT_OK
                }
                _ => {
                    eprint!("{}", e.render());
                    EXIT_CONFIG
                }
            };
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => with_threads(args.threads, || simulate(&args)),
        Command::Sweep(args) => with_threads(args.threads, || sweep(&args)),
        Command::Stats(args) => stats(&args),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn with_threads(
    threads: Option<usize>,
    job: impl FnOnce() -> Result<(), Failure> + Send,
) -> Result<(), Failure> {
    match threads {
        None => job(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Config(format!("thread pool: {e}")))?
            .install(job),
    }
}

fn load(args: &RunArgs) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.set_seed(seed);
    }
    Ok(cfg)
}

fn simulate(args: &RunArgs) -> Result<(), Failure> {
    let cfg = load(args)?;
    let Some(out) = &cfg.events_out else {
        return Err(Failure::Config("key `events_out`: required for simulate".into()));
    };
    let events = simulate_array(&cfg.array, cfg.duration).map_err(|e| Failure::Config(e.to_string()))?;
    let header = EventFileHeader::new(cfg.array.width, cfg.array.height, events.len() as u64);
    write_events_binary(&events, &header, out)?;
    if let Some(csv) = &cfg.events_csv_out {
        write_events_csv(&events, csv)?;
    }
    eprintln!("wrote {} events to {}", events.len(), out.display());
    Ok(())
}

fn sweep(args: &RunArgs) -> Result<(), Failure> {
    let cfg = load(args)?;
    let Some(spec) = &cfg.sweep else {
        return Err(Failure::Config("key `sweep_kind`: required for sweep".into()));
    };
    let result = run_sweep(spec)?;
    match &cfg.sweep_out {
        Some(path) => {
            emit_sweep_csv(&result, path)?;
            eprintln!("wrote {} sweep rows to {}", result.rows.len(), path.display());
        }
        None => write_sweep_csv(&result.rows, std::io::stdout().lock())
            .map_err(|e| Failure::Io(format!("stdout: {e}")))?,
    }
    Ok(())
}

fn read_events(path: &Path) -> Result<Vec<DvsEvent>, Failure> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    Ok(if is_csv {
        read_events_csv(path)?
    } else {
        read_events_binary(path)?.1
    })
}

fn stats(args: &StatsArgs) -> Result<(), Failure> {
    let events = read_events(&args.events)?;
    let duration = match args.duration {
        Some(d) => d,
        None => events.last().map_or(1e-6, |e| e.t_us.max(1) as f64 * 1e-6),
    };
    let config = |e: crate::stats::StatsError| Failure::Config(format!("{}: {e}", args.events.display()));
    let pairs = pair_transitions(&events).map_err(config)?;
    let hists = isi_by_class(&events, args.bins_per_decade, args.isi_min_us, args.isi_max_us)
        .map_err(config)?;
    let rates = per_pixel_rates(&events, duration).map_err(config)?;
    let radius = if rates.is_empty() {
        None
    } else {
        Some(rate_percentile_radius(&rates, args.percentile).map_err(config)?)
    };

    std::fs::create_dir_all(&args.out_dir).map_err(|e| io_failure(&args.out_dir, e))?;

    write_file(&args.out_dir.join("pairstats.csv"), |w| {
        writeln!(w, "on_on,on_off,off_on,off_off,total_pairs,active_pixels,opposite_fraction")?;
        let c = pairs.counts;
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            c[0][0],
            c[0][1],
            c[1][0],
            c[1][1],
            pairs.total_pairs(),
            pairs.active_pixels,
            pairs.opposite_fraction
        )
    })?;
    write_file(&args.out_dir.join("isi.csv"), |w| {
        writeln!(w, "class,bin_lo_us,bin_hi_us,count")?;
        for h in &hists {
            for (i, count) in h.counts.iter().enumerate() {
                writeln!(w, "{},{},{},{}", h.class.key(), h.bin_edges[i], h.bin_edges[i + 1], count)?;
            }
        }
        Ok(())
    })?;
    write_file(&args.out_dir.join("rates.csv"), |w| {
        writeln!(w, "x,y,rate_on_hz,rate_off_hz")?;
        for r in &rates.rows {
            writeln!(w, "{},{},{},{}", r.x, r.y, r.rate_on, r.rate_off)?;
        }
        Ok(())
    })?;

    println!("events={}", events.len());
    println!("opposite_fraction={}", pairs.opposite_fraction);
    if let Some(r) = radius {
        println!("rate_radius_p{}_hz={}", args.percentile, r);
    }
    Ok(())
}

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| io_failure(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| io_failure(path, e))
}
