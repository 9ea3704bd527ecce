//! Error type shared across the simulator.

use thiserror::Error;

/// Errors produced by state construction, gate application and the
/// benchmark harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} out of range (need 1 <= n and an allocatable 16 * 2^n bytes)")]
    QubitCountOutOfRange(usize),

    #[error(
        "allocation of {requested_bytes} bytes failed: per-node free bytes {per_node_free:?}"
    )]
    AllocationFailed {
        requested_bytes: u64,
        per_node_free: Vec<u64>,
    },

    #[error("memory binding facility unavailable (errno {errno}) and strict placement was requested")]
    BindUnavailable { errno: i32 },

    #[error("amplitude index {index} out of bounds for {num_amps} amplitudes")]
    IndexOutOfBounds { index: u64, num_amps: u64 },

    #[error("target qubit {target} out of range for {num_qubits} qubits")]
    TargetOutOfRange { target: usize, num_qubits: usize },

    #[error("control qubit equals target qubit ({0})")]
    ControlEqualsTarget(usize),

    #[error("gate matrix is not unitary (max deviation {deviation:.3e})")]
    NonUnitaryGate { deviation: f64 },

    #[error("invalid kernel config: {0}")]
    InvalidKernelConfig(String),

    #[error("state sizes differ: {0} vs {1} qubits")]
    SizeMismatch(usize, usize),

    #[error("oracle limited to 14 qubits, got {0}")]
    OracleTooLarge(usize),

    #[error("cannot parse circuit line {line}: {reason}")]
    CircuitParse { line: usize, reason: String },

    #[error("correctness gate failed: max abs diff {max_abs_diff:.3e} exceeds {tolerance:.1e}")]
    CorrectnessGate { max_abs_diff: f64, tolerance: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
