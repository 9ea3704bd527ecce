//! Measurement harness: per-gate and end-to-end timings, ten repetitions
//! with the minimum reported, an oracle correctness gate before any timed
//! run at small sizes, and CSV/JSON emission.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::circuits::{self, Circuit, GateKind, GateRecord, QftVariant, RqcSpec};
use crate::error::{Error, Result};
use crate::kernels::{KernelConfig, KernelVariant};
use crate::numa::{AllocPolicy, PlacementReport};
use crate::oracle::{self, DenseState};
use crate::scheduler::Executor;
use crate::state::StateVector;

/// Repetitions per measurement, with the minimum reported.
pub const DEFAULT_REPS: usize = 10;

/// Runs at or below this size are replayed against the oracle before any
/// timing; larger runs skip the gate (the oracle is a small-n tool).
pub const CORRECTNESS_GATE_MAX_QUBITS: usize = 10;

/// Max abs diff allowed by the correctness gate.
pub const CORRECTNESS_GATE_TOLERANCE: f64 = 1e-10;

/// What sits inside the timed region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimingMode {
    /// Time only the gate/circuit execution; state setup happens once
    /// outside the timed region.
    PerGate,
    /// Time state creation, circuit generation, execution and destruction
    /// per repetition.
    EndToEnd,
}

/// Echo of the kernel tuning in effect for a measurement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub unroll: usize,
    pub prefetch_near: usize,
    pub prefetch_far: usize,
    pub vector_complexes: usize,
    pub isa: String,
}

impl From<&KernelConfig> for ConfigEcho {
    fn from(cfg: &KernelConfig) -> Self {
        ConfigEcho {
            unroll: cfg.unroll,
            prefetch_near: cfg.prefetch_near,
            prefetch_far: cfg.prefetch_far,
            vector_complexes: cfg.vector_complexes,
            isa: cfg.isa.to_string(),
        }
    }
}

/// One benchmark measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub scenario: String,
    pub n: usize,
    pub variant: KernelVariant,
    pub policy: AllocPolicy,
    pub threads: usize,
    pub pinned: bool,
    pub reps: usize,
    pub min_ns: u128,
    pub mean_ns: u128,
    pub all_reps_ns: Vec<u128>,
    pub placement: PlacementReport,
    pub config: ConfigEcho,
}

impl BenchmarkResult {
    #[allow(clippy::too_many_arguments)]
    fn from_reps(
        scenario: String,
        n: usize,
        variant: KernelVariant,
        policy: AllocPolicy,
        exec: &Executor,
        pinned_requested: bool,
        all_reps_ns: Vec<u128>,
        placement: PlacementReport,
        cfg: &KernelConfig,
    ) -> Self {
        let min_ns = all_reps_ns.iter().copied().min().unwrap_or(0);
        let mean_ns = if all_reps_ns.is_empty() {
            0
        } else {
            all_reps_ns.iter().sum::<u128>() / all_reps_ns.len() as u128
        };
        BenchmarkResult {
            scenario,
            n,
            variant,
            policy,
            threads: exec.num_threads(),
            pinned: pinned_requested && !exec.pin_degraded(),
            reps: all_reps_ns.len(),
            min_ns,
            mean_ns,
            all_reps_ns,
            placement,
            config: ConfigEcho::from(cfg),
        }
    }
}

/// baseline min / optimized min computed from two measurements of the same
/// scenario.
pub fn speedup(baseline: &BenchmarkResult, optimized: &BenchmarkResult) -> f64 {
    baseline.min_ns as f64 / optimized.min_ns.max(1) as f64
}

/// Which gate a gate-benchmark measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchGate {
    H,
    X,
    Y,
    Cnot,
}

/// Parameters shared by all benchmark scenarios.
#[derive(Debug, Clone)]
pub struct BenchParams {
    pub variant: KernelVariant,
    pub policy: AllocPolicy,
    pub reps: usize,
    pub mode: TimingMode,
    pub cfg: KernelConfig,
    /// Pinning was requested (the result's `pinned` also reflects whether it
    /// actually took).
    pub pin_requested: bool,
}

impl BenchParams {
    pub fn new(variant: KernelVariant, policy: AllocPolicy) -> Self {
        BenchParams {
            variant,
            policy,
            reps: DEFAULT_REPS,
            mode: TimingMode::PerGate,
            cfg: KernelConfig::default(),
            pin_requested: false,
        }
    }
}

fn gate_record(gate: BenchGate, target: usize, control: Option<usize>) -> Result<GateRecord> {
    Ok(match gate {
        BenchGate::H => GateRecord::single(GateKind::H, target),
        BenchGate::X => GateRecord::single(GateKind::X, target),
        BenchGate::Y => GateRecord::single(GateKind::Y, target),
        BenchGate::Cnot => {
            let control = control.ok_or_else(|| {
                Error::InvalidArgument("cnot benchmark needs --control".into())
            })?;
            GateRecord::controlled(GateKind::Cnot, target, control)
        }
    })
}

/// Replay `circuit` on a fresh state with the same kernel settings and
/// compare against the oracle; refuses (error) beyond the tolerance.
fn correctness_gate(
    n: usize,
    circuit: &Circuit,
    params: &BenchParams,
    exec: &Executor,
) -> Result<()> {
    if n > CORRECTNESS_GATE_MAX_QUBITS {
        return Ok(());
    }
    let mut state = StateVector::new(n, params.policy)?;
    circuits::run_circuit(&mut state, circuit, params.variant, &params.cfg, exec)?;
    let reference = oracle::oracle_run(&DenseState::zero_state(n)?, circuit)?;
    let max_abs_diff = oracle::compare_states(&state, &reference)?;
    if max_abs_diff > CORRECTNESS_GATE_TOLERANCE {
        return Err(Error::CorrectnessGate {
            max_abs_diff,
            tolerance: CORRECTNESS_GATE_TOLERANCE,
        });
    }
    Ok(())
}

/// Time `circuit` under the measurement protocol: one untimed warmup, then
/// `reps` timed repetitions.
fn measure_circuit(
    scenario: String,
    n: usize,
    circuit: &Circuit,
    params: &BenchParams,
    exec: &Executor,
) -> Result<BenchmarkResult> {
    correctness_gate(n, circuit, params, exec)?;

    let reps = params.reps.max(1);
    let mut all_reps_ns = Vec::with_capacity(reps);
    match params.mode {
        TimingMode::PerGate => {
            let mut state = StateVector::new(n, params.policy)?;
            let placement = state.placement().clone();
            // Warmup pass, untimed.
            circuits::run_circuit(&mut state, circuit, params.variant, &params.cfg, exec)?;
            for _ in 0..reps {
                state.reset_zero_state();
                let start = Instant::now();
                circuits::run_circuit(&mut state, circuit, params.variant, &params.cfg, exec)?;
                all_reps_ns.push(start.elapsed().as_nanos());
            }
            Ok(BenchmarkResult::from_reps(
                scenario,
                n,
                params.variant,
                params.policy,
                exec,
                params.pin_requested,
                all_reps_ns,
                placement,
                &params.cfg,
            ))
        }
        TimingMode::EndToEnd => {
            // Warmup.
            let mut state = StateVector::new(n, params.policy)?;
            let placement = state.placement().clone();
            circuits::run_circuit(&mut state, circuit, params.variant, &params.cfg, exec)?;
            state.destroy();
            for _ in 0..reps {
                let start = Instant::now();
                let mut state = StateVector::new(n, params.policy)?;
                circuits::run_circuit(&mut state, circuit, params.variant, &params.cfg, exec)?;
                state.destroy();
                all_reps_ns.push(start.elapsed().as_nanos());
            }
            Ok(BenchmarkResult::from_reps(
                scenario,
                n,
                params.variant,
                params.policy,
                exec,
                params.pin_requested,
                all_reps_ns,
                placement,
                &params.cfg,
            ))
        }
    }
}

/// Per-gate benchmark for one gate kind on one target (and control).
pub fn run_gate_bench(
    gate: BenchGate,
    n: usize,
    target: usize,
    control: Option<usize>,
    params: &BenchParams,
    exec: &Executor,
) -> Result<BenchmarkResult> {
    let record = gate_record(gate, target, control)?;
    record.validate(n)?;
    let mut circuit = Circuit::new(n);
    circuit.gates.push(record);
    let scenario = format!("gate:{}", format!("{gate:?}").to_lowercase());
    measure_circuit(scenario, n, &circuit, params, exec)
}

/// Whole-QFT benchmark.
pub fn run_qft_bench(
    n: usize,
    qft: QftVariant,
    params: &BenchParams,
    exec: &Executor,
) -> Result<BenchmarkResult> {
    let circuit = circuits::build_qft(n, qft);
    let scenario = match qft {
        QftVariant::Recursive => "qft:recursive".to_string(),
        QftVariant::Iterative => "qft:iterative".to_string(),
        QftVariant::Blocked(b) => format!("qft:blocked{b}"),
    };
    measure_circuit(scenario, n, &circuit, params, exec)
}

/// Random-circuit benchmark. In end-to-end mode circuit generation sits
/// inside the timed region, matching the protocol that times initialization,
/// gate generation, execution and destruction together.
pub fn run_rqc_bench(
    spec: &RqcSpec,
    params: &BenchParams,
    exec: &Executor,
) -> Result<BenchmarkResult> {
    let n = spec.num_qubits;
    let scenario = format!("rqc:l{}", spec.layers);
    let prebuilt = circuits::build_rqc(spec)?;
    correctness_gate(n, &prebuilt, params, exec)?;

    let reps = params.reps.max(1);
    let mut all_reps_ns = Vec::with_capacity(reps);
    let placement;
    match params.mode {
        TimingMode::PerGate => {
            let mut state = StateVector::new(n, params.policy)?;
            placement = state.placement().clone();
            circuits::run_circuit(&mut state, &prebuilt, params.variant, &params.cfg, exec)?;
            for _ in 0..reps {
                state.reset_zero_state();
                let start = Instant::now();
                circuits::run_circuit(&mut state, &prebuilt, params.variant, &params.cfg, exec)?;
                all_reps_ns.push(start.elapsed().as_nanos());
            }
        }
        TimingMode::EndToEnd => {
            let mut warm = StateVector::new(n, params.policy)?;
            placement = warm.placement().clone();
            circuits::run_circuit(&mut warm, &prebuilt, params.variant, &params.cfg, exec)?;
            warm.destroy();
            for _ in 0..reps {
                let start = Instant::now();
                let circuit = circuits::build_rqc(spec)?;
                let mut state = StateVector::new(n, params.policy)?;
                circuits::run_circuit(&mut state, &circuit, params.variant, &params.cfg, exec)?;
                state.destroy();
                all_reps_ns.push(start.elapsed().as_nanos());
            }
        }
    }
    Ok(BenchmarkResult::from_reps(
        scenario,
        n,
        params.variant,
        params.policy,
        exec,
        params.pin_requested,
        all_reps_ns,
        placement,
        &params.cfg,
    ))
}

/// Output format for [`emit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Json,
}

pub const CSV_HEADER: &str = "scenario,n,variant,policy,threads,pinned,reps,min_ns,mean_ns";

/// Write results. CSV carries the fixed column set; JSON carries full
/// records including placement and config echo.
pub fn emit(results: &[BenchmarkResult], format: EmitFormat, out: &mut dyn Write) -> Result<()> {
    match format {
        EmitFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for r in results {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    r.scenario,
                    r.n,
                    r.variant,
                    r.policy,
                    r.threads,
                    r.pinned,
                    r.reps,
                    r.min_ns,
                    r.mean_ns
                )?;
            }
        }
        EmitFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, results)
                .map_err(|e| Error::InvalidArgument(format!("json write failed: {e}")))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_params() -> BenchParams {
        let mut p = BenchParams::new(KernelVariant::Optimized, AllocPolicy::Default);
        p.reps = DEFAULT_REPS;
        p
    }

    #[test]
    fn gate_bench_smoke_n4_validates_and_reports_ten_reps() {
        let exec = Executor::serial();
        let r = run_gate_bench(BenchGate::H, 4, 1, None, &quick_params(), &exec).unwrap();
        assert_eq!(r.reps, 10);
        assert_eq!(r.all_reps_ns.len(), 10);
        assert_eq!(r.min_ns, *r.all_reps_ns.iter().min().unwrap());
        assert!(r.min_ns <= r.mean_ns);
        assert_eq!(r.n, 4);
        assert_eq!(r.scenario, "gate:h");
    }

    #[test]
    fn cnot_bench_requires_control() {
        let exec = Executor::serial();
        assert!(run_gate_bench(BenchGate::Cnot, 4, 1, None, &quick_params(), &exec).is_err());
        let r = run_gate_bench(BenchGate::Cnot, 4, 1, Some(3), &quick_params(), &exec).unwrap();
        assert_eq!(r.scenario, "gate:cnot");
    }

    #[test]
    fn qft_bench_desk_scale() {
        let exec = Executor::serial();
        let r = run_qft_bench(10, QftVariant::Recursive, &quick_params(), &exec).unwrap();
        assert_eq!(r.scenario, "qft:recursive");
        assert_eq!(r.reps, 10);
        assert!(r.min_ns > 0);
    }

    #[test]
    fn rqc_bench_end_to_end_includes_generation() {
        let exec = Executor::serial();
        let mut params = quick_params();
        params.mode = TimingMode::EndToEnd;
        params.reps = 3;
        let spec = RqcSpec::new(5, 2, 7);
        let r = run_rqc_bench(&spec, &params, &exec).unwrap();
        assert_eq!(r.reps, 3);
        assert_eq!(r.scenario, "rqc:l2");
    }

    #[test]
    fn csv_emission_shape() {
        let exec = Executor::serial();
        let r = run_gate_bench(BenchGate::X, 3, 0, None, &quick_params(), &exec).unwrap();
        let mut buf = Vec::new();
        emit(&[r], EmitFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("gate:x,3,opt,default,1,false,10,"));
    }

    #[test]
    fn empty_result_set_is_header_only() {
        let mut buf = Vec::new();
        emit(&[], EmitFormat::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn json_roundtrips() {
        let exec = Executor::serial();
        let r = run_gate_bench(BenchGate::Y, 3, 2, None, &quick_params(), &exec).unwrap();
        let mut buf = Vec::new();
        emit(std::slice::from_ref(&r), EmitFormat::Json, &mut buf).unwrap();
        let back: Vec<BenchmarkResult> = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].scenario, r.scenario);
        assert_eq!(back[0].all_reps_ns, r.all_reps_ns);
        assert_eq!(back[0].config, r.config);
    }
}
