use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use heftrt::hw::{asymptotic_decision_ps, HwConfig};
use heftrt::report::{self, VerifyOptions};
use heftrt::sim::{self, OverheadModel, SchedulerKind, SimConfig, TransferCoeffs};
use heftrt::sw::SoftwareCoeffs;
use heftrt::workload::{self, WorkloadSpec};

/// Heterogeneous SoC runtime simulator with software and hardware HEFT_RT
/// schedulers.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one workload and print per-instance metrics.
    Run(RunArgs),
    /// Simulate a workload over a range of injection rates.
    Sweep(SweepArgs),
    /// Cross-check the hardware model against the software scheduler.
    Verify(VerifyArgs),
    /// Cycle counts of worst-case events over a range of queue sizes.
    Cycles(CyclesArgs),
}

#[derive(Args)]
struct HwArgs {
    /// Priority queue depth.
    #[arg(long, default_value_t = 512)]
    d: usize,
    /// Number of PEs (cycles only; simulations use the workload's PEs).
    #[arg(long, default_value_t = 4)]
    p: usize,
    #[arg(long, default_value_t = 16)]
    w_avg: u32,
    #[arg(long, default_value_t = 3048)]
    clock_ps: u64,
    /// Nanoseconds per scheduler time unit.
    #[arg(long, default_value_t = 1000)]
    time_unit_ns: u64,
}

impl HwArgs {
    fn config(&self) -> HwConfig {
        HwConfig {
            p: self.p,
            d: self.d,
            w_avg: self.w_avg,
            clock_period_ps: self.clock_ps,
            time_unit_ns: self.time_unit_ns,
        }
    }
}

#[derive(Args)]
struct OverheadArgs {
    #[arg(long)]
    sw_fixed_ns: Option<f64>,
    #[arg(long)]
    sw_per_task_ns: Option<f64>,
    #[arg(long)]
    sw_per_compare_ns: Option<f64>,
    #[arg(long)]
    transfer_fixed_ns: Option<u64>,
    #[arg(long)]
    transfer_per_task_ns: Option<u64>,
    #[arg(long)]
    result_fixed_ns: Option<u64>,
    /// Charge no time for mapping events at all.
    #[arg(long)]
    zero_overhead: bool,
}

impl OverheadArgs {
    fn model(&self) -> OverheadModel {
        let base = if self.zero_overhead {
            OverheadModel::zero()
        } else {
            OverheadModel::default()
        };
        let sw = base.software;
        let tr = base.transfer;
        OverheadModel {
            software: SoftwareCoeffs {
                fixed_ns: self.sw_fixed_ns.unwrap_or(sw.fixed_ns),
                per_task_ns: self.sw_per_task_ns.unwrap_or(sw.per_task_ns),
                per_compare_ns: self.sw_per_compare_ns.unwrap_or(sw.per_compare_ns),
            },
            transfer: TransferCoeffs {
                transfer_fixed_ns: self.transfer_fixed_ns.unwrap_or(tr.transfer_fixed_ns),
                transfer_per_task_ns: self.transfer_per_task_ns.unwrap_or(tr.transfer_per_task_ns),
                result_fixed_ns: self.result_fixed_ns.unwrap_or(tr.result_fixed_ns),
            },
            zero_compute: base.zero_compute,
        }
    }
}

#[derive(Args)]
struct SimArgs {
    /// Workload TOML file, or `low` / `high` for the built-in workloads.
    spec: String,
    /// sw, hw or fifo.
    #[arg(long, default_value = "sw")]
    scheduler: SchedulerKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Give the software engines quantized inputs, as the hardware sees them.
    #[arg(long)]
    quantize_software: bool,
    #[command(flatten)]
    hw: HwArgs,
    #[command(flatten)]
    overhead: OverheadArgs,
}

impl SimArgs {
    fn config(&self) -> SimConfig {
        SimConfig {
            scheduler: self.scheduler,
            hw: self.hw.config(),
            overhead: self.overhead.model(),
            quantize_software: self.quantize_software,
            seed: self.seed,
            cycle_trace: false,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Per-instance CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the per-event overhead CSV here.
    #[arg(long)]
    events: Option<PathBuf>,
    /// Also write the hardware cycle trace here (hw scheduler only).
    #[arg(long)]
    cycle_trace: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// Comma-separated combined target rates in frames/s, or `paper29`.
    #[arg(long, default_value = "paper29")]
    rates: String,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    n_min: usize,
    #[arg(long, default_value_t = 512)]
    n_max: usize,
    /// PE counts to draw from.
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
    pes: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    hw: HwArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CyclesArgs {
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1,2,4,8,16,32,64,128,256,512"
    )]
    sizes: Vec<usize>,
    #[command(flatten)]
    hw: HwArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

type BoxError = Box<dyn std::error::Error>;

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(spec: &str) -> Result<WorkloadSpec, BoxError> {
    if !Path::new(spec).exists() {
        match spec {
            "low" => return Ok(workload::low_workload()),
            "high" => return Ok(workload::high_workload()),
            _ => {}
        }
    }
    Ok(workload::load_spec(spec)?)
}

fn parse_rates(s: &str) -> Result<Vec<f64>, BoxError> {
    if s == "paper29" {
        return Ok(report::sweep29_rates());
    }
    let rates = s
        .split(',')
        .map(|r| {
            r.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad rate {r:?}: {e}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if rates.is_empty() || rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err("rates must be positive".into());
    }
    Ok(rates)
}

fn run(args: RunArgs) -> Result<(), BoxError> {
    let spec = load(&args.sim.spec)?;
    let mut config = args.sim.config();
    config.cycle_trace = args.cycle_trace.is_some();
    let (report, trace) = sim::simulate_traced(&spec, &config)?;
    report::write_run_csv(output(args.out.as_deref())?, &report)?;
    if let Some(path) = &args.events {
        report::write_events_csv(output(Some(path))?, &report)?;
    }
    if let Some(path) = &args.cycle_trace {
        report::write_trace_csv(output(Some(path))?, &trace)?;
    }
    if report.saturation_events > 0 {
        eprintln!(
            "warning: {} quantized values saturated",
            report.saturation_events
        );
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), BoxError> {
    if args.repeats == 0 {
        return Err("repeats must be at least 1".into());
    }
    let spec = load(&args.sim.spec)?;
    let rates = parse_rates(&args.rates)?;
    let result = report::sweep(&spec, &args.sim.config(), &rates, args.repeats)?;
    report::write_sweep_csv(output(args.out.as_deref())?, &result)?;
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<bool, BoxError> {
    let opts = VerifyOptions {
        trials: args.trials,
        sizes: args.n_min..=args.n_max,
        pe_counts: args.pes,
        seed: args.seed,
        hw: args.hw.config(),
    };
    let report = report::verify(&opts)?;
    let mut out = output(args.out.as_deref())?;
    report.write(&mut out)?;
    out.flush()?;
    Ok(report.passed())
}

fn cycles(args: CyclesArgs) -> Result<(), BoxError> {
    let hw = args.hw.config();
    if let Some(&n) = args.sizes.iter().find(|&&n| n == 0 || n > hw.d) {
        return Err(format!("queue size {n} outside 1..={}", hw.d).into());
    }
    let rows = report::cycle_table(&args.sizes, &hw)?;
    let mut out = output(args.out.as_deref())?;
    report::write_cycle_table(&mut out, &rows)?;
    out.flush()?;
    eprintln!(
        "asymptotic latency per decision: {:.3} ns",
        asymptotic_decision_ps(&hw) as f64 / 1_000.0
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a).map(|()| true),
        Command::Sweep(a) => sweep(a).map(|()| true),
        Command::Verify(a) => verify(a),
        Command::Cycles(a) => cycles(a).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
