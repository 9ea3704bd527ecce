//! Benchmark harness CLI: per-gate, QFT and random-circuit scenarios with
//! min-of-N timing and CSV/JSON output.

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use qsimd::bench::{
    self, BenchGate, BenchParams, BenchmarkResult, EmitFormat, TimingMode, DEFAULT_REPS,
};
use qsimd::circuits::{QftVariant, RqcSpec};
use qsimd::numa::{detect_topology, AllocPolicy};
use qsimd::scheduler::{Executor, PinMode};
use qsimd::{Error, KernelConfig, KernelVariant};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BenchKind {
    Gate,
    Qft,
    Rqc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GateArg {
    H,
    X,
    Y,
    Cnot,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KernelArg {
    Scalar,
    Opt,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    Default,
    Local,
    Split,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PinArg {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum QftArg {
    Recursive,
    Iterative,
    Blocked,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    PerGate,
    EndToEnd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// State-vector gate/QFT/RQC benchmarks.
///
/// Kernel tuning honors the PREFETCH_AHEAD and UNROLL environment variables;
/// CORE_LIST (comma-separated CPU ids) selects per-core pinning when --pin is
/// on.
#[derive(Debug, Parser)]
#[command(name = "qsimd-bench", version)]
struct Cli {
    /// Benchmark family.
    #[arg(long, value_enum)]
    bench: BenchKind,

    /// Gate to measure (gate family).
    #[arg(long, value_enum, default_value = "h")]
    gate: GateArg,

    /// Register size, one value `N` or an inclusive sweep `N..M`.
    #[arg(long)]
    qubits: String,

    /// Target qubit for gate benchmarks.
    #[arg(long, default_value_t = 1)]
    target: usize,

    /// Control qubit (cnot only).
    #[arg(long)]
    control: Option<usize>,

    /// Kernel variant.
    #[arg(long, value_enum, default_value = "opt")]
    kernel: KernelArg,

    /// Allocation policy.
    #[arg(long, value_enum, default_value = "default")]
    policy: PolicyArg,

    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    threads: usize,

    /// Pin workers to NUMA nodes (or CORE_LIST cores).
    #[arg(long, value_enum, default_value = "off")]
    pin: PinArg,

    /// QFT construction (qft family).
    #[arg(long, value_enum, default_value = "iterative")]
    qft: QftArg,

    /// Block factor for --qft blocked.
    #[arg(long, default_value_t = 16)]
    block_factor: usize,

    /// Layers per random circuit.
    #[arg(long, default_value_t = 5)]
    layers: usize,

    /// Random-circuit seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Timed repetitions per scenario (minimum reported).
    #[arg(long, default_value_t = DEFAULT_REPS)]
    reps: usize,

    /// What the timed region covers.
    #[arg(long, value_enum, default_value = "per-gate")]
    mode: ModeArg,

    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,

    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

fn parse_qubit_range(s: &str) -> Result<(usize, usize), String> {
    if let Some((a, b)) = s.split_once("..") {
        let lo: usize = a.trim().parse().map_err(|_| format!("bad qubit count {a:?}"))?;
        let hi: usize = b.trim().parse().map_err(|_| format!("bad qubit count {b:?}"))?;
        if lo == 0 || hi < lo {
            return Err(format!("invalid qubit range {s:?}"));
        }
        Ok((lo, hi))
    } else {
        let n: usize = s.trim().parse().map_err(|_| format!("bad qubit count {s:?}"))?;
        if n == 0 {
            return Err("qubit count must be at least 1".into());
        }
        Ok((n, n))
    }
}

fn core_list_from_env() -> Option<Vec<usize>> {
    let raw = std::env::var("CORE_LIST").ok()?;
    let cores: Vec<usize> = raw
        .split(',')
        .filter_map(|s| s.trim().parse().ok())
        .collect();
    if cores.is_empty() {
        None
    } else {
        Some(cores)
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::AllocationFailed { .. } | Error::QubitCountOutOfRange(_) => 3,
        Error::CorrectnessGate { .. } => 4,
        _ => 2,
    }
}

fn run(cli: &Cli) -> Result<Vec<BenchmarkResult>, Error> {
    let (n_lo, n_hi) =
        parse_qubit_range(&cli.qubits).map_err(Error::InvalidArgument)?;

    let cfg = KernelConfig::from_env()?;
    let variant = match cli.kernel {
        KernelArg::Scalar => KernelVariant::ScalarBaseline,
        KernelArg::Opt => KernelVariant::Optimized,
    };
    let policy = match cli.policy {
        PolicyArg::Default => AllocPolicy::Default,
        PolicyArg::Local => AllocPolicy::LocalFirst,
        PolicyArg::Split => AllocPolicy::SplitEven,
    };
    let pin_requested = matches!(cli.pin, PinArg::On);
    let pin_mode = if pin_requested {
        match core_list_from_env() {
            Some(cores) => PinMode::CoreList(cores),
            None => PinMode::Node,
        }
    } else {
        PinMode::Off
    };

    let topo = detect_topology();
    let exec = Executor::new(cli.threads, topo, pin_mode);

    let mut params = BenchParams::new(variant, policy);
    params.reps = cli.reps;
    params.cfg = cfg;
    params.pin_requested = pin_requested;
    params.mode = match cli.mode {
        ModeArg::PerGate => TimingMode::PerGate,
        ModeArg::EndToEnd => TimingMode::EndToEnd,
    };

    let mut results = Vec::new();
    for n in n_lo..=n_hi {
        let result = match cli.bench {
            BenchKind::Gate => {
                let gate = match cli.gate {
                    GateArg::H => BenchGate::H,
                    GateArg::X => BenchGate::X,
                    GateArg::Y => BenchGate::Y,
                    GateArg::Cnot => BenchGate::Cnot,
                };
                bench::run_gate_bench(gate, n, cli.target, cli.control, &params, &exec)?
            }
            BenchKind::Qft => {
                let qft = match cli.qft {
                    QftArg::Recursive => QftVariant::Recursive,
                    QftArg::Iterative => QftVariant::Iterative,
                    QftArg::Blocked => QftVariant::Blocked(cli.block_factor),
                };
                bench::run_qft_bench(n, qft, &params, &exec)?
            }
            BenchKind::Rqc => {
                let spec = RqcSpec {
                    num_qubits: n,
                    layers: cli.layers,
                    seed: cli.seed,
                    gate_set: RqcSpec::new(2, 1, 0).gate_set,
                };
                bench::run_rqc_bench(&spec, &params, &exec)?
            }
        };
        results.push(result);
    }
    Ok(results)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let results = match run(&cli) {
        Ok(r) => r,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(exit_code_for(&err));
        }
    };

    let format = match cli.format {
        FormatArg::Csv => EmitFormat::Csv,
        FormatArg::Json => EmitFormat::Json,
    };
    let emit_result = match &cli.out {
        Some(path) => std::fs::File::create(path)
            .map_err(Error::from)
            .and_then(|mut f| bench::emit(&results, format, &mut f).and_then(|()| Ok(f.flush()?))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            bench::emit(&results, format, &mut lock)
        }
    };
    if let Err(err) = emit_result {
        eprintln!("error: {err}");
        return ExitCode::from(exit_code_for(&err));
    }
    ExitCode::SUCCESS
}
