//! Gate kernels in two variants: a scalar baseline walking amplitude pairs
//! one task at a time, and an optimized variant that processes blocks with
//! vector batches of complex amplitudes, manual unrolling, dual-distance
//! software prefetch, fused multiply-add arithmetic and a scalar tail.
//!
//! Both variants share the amplitude-index convention (qubit `q` is bit `q`
//! of the index) and must agree within 1e-12 per gate; fused arithmetic
//! changes low-order rounding, so exact equality is not promised for the
//! arithmetic gates. Pure data-movement gates (X, CNOT, SWAP) match exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheduler::Executor;
use crate::state::{ComplexAmp, StateVector};

mod optimized;
mod scalar;

/// Which code path applies a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelVariant {
    /// Straight task loop over amplitude pairs.
    ScalarBaseline,
    /// Block loop with vector batches, unrolling and prefetch.
    Optimized,
}

impl std::fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KernelVariant::ScalarBaseline => "scalar",
            KernelVariant::Optimized => "opt",
        })
    }
}

/// Vector instruction path taken by the optimized variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsaPath {
    /// 512-bit path, 4 complex amplitudes (8 doubles) per operation.
    Avx512,
    /// 256-bit path, 2 complex amplitudes per operation.
    Avx2,
    /// Compiler-guided fallback; same arithmetic via scalar fused ops.
    Portable,
}

impl std::fmt::Display for IsaPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IsaPath::Avx512 => "avx512",
            IsaPath::Avx2 => "avx2",
            IsaPath::Portable => "portable",
        })
    }
}

/// Pick the widest vector path the host supports.
pub fn detect_isa() -> IsaPath {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx512f") {
            return IsaPath::Avx512;
        }
        if std::arch::is_x86_feature_detected!("avx2") && std::arch::is_x86_feature_detected!("fma")
        {
            return IsaPath::Avx2;
        }
    }
    IsaPath::Portable
}

/// Tuning knobs for the optimized variant. None of them change results, only
/// timing: the arithmetic applied to each amplitude is fixed per variant.
///
/// Prefetch distances count double-precision elements ahead of the current
/// position (8 doubles per 64-byte cache line).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// Pair iterations per unrolled chunk.
    pub unroll: usize,
    /// Near prefetch distance, in doubles.
    pub prefetch_near: usize,
    /// Far prefetch distance, in doubles.
    pub prefetch_far: usize,
    /// Complex amplitudes per vector batch.
    pub vector_complexes: usize,
    /// Instruction path for vector batches.
    pub isa: IsaPath,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            unroll: 16,
            prefetch_near: 16,
            prefetch_far: 32,
            vector_complexes: 4,
            isa: detect_isa(),
        }
    }
}

impl KernelConfig {
    /// Default config with `PREFETCH_AHEAD` and `UNROLL` environment
    /// overrides applied. `PREFETCH_AHEAD` sets the far distance; the near
    /// distance tracks it at half.
    pub fn from_env() -> Result<Self> {
        let mut cfg = KernelConfig::default();
        if let Ok(v) = std::env::var("PREFETCH_AHEAD") {
            let ahead: usize = v.parse().map_err(|_| {
                Error::InvalidKernelConfig(format!("PREFETCH_AHEAD={v} is not a number"))
            })?;
            cfg.prefetch_far = ahead;
            cfg.prefetch_near = ahead / 2;
        }
        if let Ok(v) = std::env::var("UNROLL") {
            cfg.unroll = v.parse().map_err(|_| {
                Error::InvalidKernelConfig(format!("UNROLL={v} is not a number"))
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vector_complexes == 0 || !self.vector_complexes.is_power_of_two() {
            return Err(Error::InvalidKernelConfig(format!(
                "vector_complexes must be a power of two, got {}",
                self.vector_complexes
            )));
        }
        if self.unroll == 0 || !self.unroll.is_multiple_of(self.vector_complexes) {
            return Err(Error::InvalidKernelConfig(format!(
                "unroll ({}) must be a positive multiple of vector_complexes ({})",
                self.unroll, self.vector_complexes
            )));
        }
        if self.prefetch_far < self.prefetch_near {
            return Err(Error::InvalidKernelConfig(format!(
                "prefetch_far ({}) must be >= prefetch_near ({})",
                self.prefetch_far, self.prefetch_near
            )));
        }
        Ok(())
    }
}

/// A 2x2 complex matrix acting on one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleQubitGate {
    pub m00: ComplexAmp,
    pub m01: ComplexAmp,
    pub m10: ComplexAmp,
    pub m11: ComplexAmp,
}

impl SingleQubitGate {
    pub fn new(m00: ComplexAmp, m01: ComplexAmp, m10: ComplexAmp, m11: ComplexAmp) -> Self {
        SingleQubitGate { m00, m01, m10, m11 }
    }

    pub fn hadamard() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(
            ComplexAmp::new(r, 0.0),
            ComplexAmp::new(r, 0.0),
            ComplexAmp::new(r, 0.0),
            ComplexAmp::new(-r, 0.0),
        )
    }

    pub fn pauli_x() -> Self {
        Self::new(
            ComplexAmp::ZERO,
            ComplexAmp::ONE,
            ComplexAmp::ONE,
            ComplexAmp::ZERO,
        )
    }

    pub fn pauli_y() -> Self {
        Self::new(
            ComplexAmp::ZERO,
            ComplexAmp::new(0.0, -1.0),
            ComplexAmp::new(0.0, 1.0),
            ComplexAmp::ZERO,
        )
    }

    pub fn pauli_z() -> Self {
        Self::new(
            ComplexAmp::ONE,
            ComplexAmp::ZERO,
            ComplexAmp::ZERO,
            ComplexAmp::new(-1.0, 0.0),
        )
    }

    /// diag(1, e^{i theta})
    pub fn phase(theta: f64) -> Self {
        Self::new(
            ComplexAmp::ONE,
            ComplexAmp::ZERO,
            ComplexAmp::ZERO,
            ComplexAmp::new(theta.cos(), theta.sin()),
        )
    }

    pub fn t_gate() -> Self {
        Self::phase(std::f64::consts::FRAC_PI_4)
    }

    /// Max abs deviation of M^dagger M from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let conj = |z: ComplexAmp| ComplexAmp::new(z.re, -z.im);
        let mul = |a: ComplexAmp, b: ComplexAmp| {
            ComplexAmp::new(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re)
        };
        let add = |a: ComplexAmp, b: ComplexAmp| ComplexAmp::new(a.re + b.re, a.im + b.im);
        // rows of M^dagger are conjugated columns of M
        let d00 = add(mul(conj(self.m00), self.m00), mul(conj(self.m10), self.m10));
        let d01 = add(mul(conj(self.m00), self.m01), mul(conj(self.m10), self.m11));
        let d10 = add(mul(conj(self.m01), self.m00), mul(conj(self.m11), self.m10));
        let d11 = add(mul(conj(self.m01), self.m01), mul(conj(self.m11), self.m11));
        let dev = |z: ComplexAmp, want_re: f64| ((z.re - want_re).abs()).max(z.im.abs());
        dev(d00, 1.0)
            .max(dev(d11, 1.0))
            .max(dev(d01, 0.0))
            .max(dev(d10, 0.0))
    }
}

const UNITARITY_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Index math
// ---------------------------------------------------------------------------

/// Map a task index to the amplitude pair it updates for a gate on `target`.
///
/// `index_up` has bit `target` clear, `index_lo` has it set; over
/// `task in 0..2^(n-1)` this enumerates every such pair exactly once.
pub fn pair_indices(task: usize, target: usize) -> (usize, usize) {
    let half_block = 1usize << target;
    let block = task / half_block;
    let index_up = block * (half_block << 1) + (task % half_block);
    (index_up, index_up + half_block)
}

/// Spread `x` so bit position `pos` becomes a zero bit.
#[inline]
pub(crate) fn insert_zero_bit(x: usize, pos: usize) -> usize {
    ((x >> pos) << (pos + 1)) | (x & ((1usize << pos) - 1))
}

/// Amplitude index with bits `p1 < p2` both set, enumerated by `task` over
/// the remaining bits.
#[inline]
pub(crate) fn expand_both_set(task: usize, p1: usize, p2: usize) -> usize {
    debug_assert!(p1 < p2);
    insert_zero_bit(insert_zero_bit(task, p1), p2) | (1 << p1) | (1 << p2)
}

/// The two amplitude indices exchanged by SWAP(q1, q2) for one task: bit q1
/// set in the first, bit q2 set in the second.
#[inline]
pub(crate) fn expand_swap_pair(task: usize, q1: usize, q2: usize) -> (usize, usize) {
    let (p1, p2) = if q1 < q2 { (q1, q2) } else { (q2, q1) };
    let base = insert_zero_bit(insert_zero_bit(task, p1), p2);
    (base | (1 << q1), base | (1 << q2))
}

// ---------------------------------------------------------------------------
// Shared raw view used by kernel workers
// ---------------------------------------------------------------------------

/// Raw amplitude buffer handle passed to kernel workers. Workers write only
/// within the pair/index sets of their disjoint task ranges, which never
/// overlap across threads (see the scheduler contract).
#[derive(Clone, Copy)]
pub(crate) struct SharedAmps {
    ptr: *mut ComplexAmp,
    len: usize,
}

// SAFETY: disjointness of the written index sets is guaranteed by the task
// partition; the buffer outlives the parallel region.
unsafe impl Send for SharedAmps {}
unsafe impl Sync for SharedAmps {}

impl SharedAmps {
    fn new(state: &mut StateVector) -> Self {
        SharedAmps {
            len: state.num_amps(),
            ptr: state.amps_ptr(),
        }
    }

    #[inline(always)]
    pub(crate) unsafe fn read(self, idx: usize) -> ComplexAmp {
        debug_assert!(idx < self.len);
        *self.ptr.add(idx)
    }

    #[inline(always)]
    pub(crate) unsafe fn write(self, idx: usize, v: ComplexAmp) {
        debug_assert!(idx < self.len);
        *self.ptr.add(idx) = v;
    }

    #[inline(always)]
    pub(crate) fn ptr_at(self, idx: usize) -> *mut f64 {
        debug_assert!(idx < self.len);
        self.ptr.wrapping_add(idx).cast()
    }

    /// Base pointer for prefetch address computation only.
    #[inline(always)]
    pub(crate) fn base(self) -> *const u8 {
        self.ptr.cast()
    }
}

// ---------------------------------------------------------------------------
// Public gate application API
// ---------------------------------------------------------------------------

fn check_target(state: &StateVector, target: usize) -> Result<()> {
    if target >= state.num_qubits() {
        return Err(Error::TargetOutOfRange {
            target,
            num_qubits: state.num_qubits(),
        });
    }
    Ok(())
}

fn check_two(state: &StateVector, a: usize, b: usize) -> Result<()> {
    check_target(state, a)?;
    check_target(state, b)?;
    if a == b {
        return Err(Error::ControlEqualsTarget(a));
    }
    Ok(())
}

/// newUp = (up + lo)/sqrt(2), newLo = (up - lo)/sqrt(2) for every pair.
pub fn apply_hadamard(
    state: &mut StateVector,
    target: usize,
    variant: KernelVariant,
    cfg: &KernelConfig,
    exec: &Executor,
) -> Result<()> {
    check_target(state, target)?;
    let num_tasks = state.num_amps() >> 1;
    let amps = SharedAmps::new(state);
    let cfg = cfg.clone();
    match variant {
        KernelVariant::ScalarBaseline => exec.run_tasks(num_tasks, target, &|r| unsafe {
            scalar::hadamard_range(amps, target, r)
        }),
        KernelVariant::Optimized => exec.run_tasks(num_tasks, target, &|r| unsafe {
            optimized::hadamard_range(amps, target, r, &cfg)
        }),
    }
    Ok(())
}

/// (up', lo') = (m00 up + m01 lo, m10 up + m11 lo); the gate must be unitary.
pub fn apply_single_qubit_unitary(
    state: &mut StateVector,
    target: usize,
    gate: &SingleQubitGate,
    variant: KernelVariant,
    cfg: &KernelConfig,
    exec: &Executor,
) -> Result<()> {
    let deviation = gate.unitarity_deviation();
    if deviation > UNITARITY_TOL {
        return Err(Error::NonUnitaryGate { deviation });
    }
    apply_single_qubit_matrix(state, target, gate, variant, cfg, exec)
}

/// As [`apply_single_qubit_unitary`] without the unitarity check; test
/// plumbing for deliberately non-unitary matrices.
pub fn apply_single_qubit_matrix(
    state: &mut StateVector,
    target: usize,
    gate: &SingleQubitGate,
    variant: KernelVariant,
    cfg: &KernelConfig,
    exec: &Executor,
) -> Result<()> {
    check_target(state, target)?;
    let num_tasks = state.num_amps() >> 1;
    let amps = SharedAmps::new(state);
    let gate = *gate;
    let cfg = cfg.clone();
    match variant {
        KernelVariant::ScalarBaseline => exec.run_tasks(num_tasks, target, &|r| unsafe {
            scalar::unitary_range(amps, target, &gate, r)
        }),
        KernelVariant::Optimized => exec.run_tasks(num_tasks, target, &|r| unsafe {
            optimized::unitary_range(amps, target, &gate, r, &cfg)
        }),
    }
    Ok(())
}

/// Exchange the amplitudes of every pair (bit flip on `target`).
pub fn apply_pauli_x(
    state: &mut StateVector,
    target: usize,
    variant: KernelVariant,
    cfg: &KernelConfig,
    exec: &Executor,
) -> Result<()> {
    check_target(state, target)?;
    let num_tasks = state.num_amps() >> 1;
    let amps = SharedAmps::new(state);
    let cfg = cfg.clone();
    match variant {
        KernelVariant::ScalarBaseline => exec.run_tasks(num_tasks, target, &|r| unsafe {
            scalar::pauli_x_range(amps, target, r)
        }),
        KernelVariant::Optimized => exec.run_tasks(num_tasks, target, &|r| unsafe {
            optimized::pauli_x_range(amps, target, r, &cfg)
        }),
    }
    Ok(())
}

/// up' = -i lo, lo' = i up: component swaps and sign flips, no multiplies.
pub fn apply_pauli_y(
    state: &mut StateVector,
    target: usize,
    variant: KernelVariant,
    cfg: &KernelConfig,
    exec: &Executor,
) -> Result<()> {
    check_target(state, target)?;
    let num_tasks = state.num_amps() >> 1;
    let amps = SharedAmps::new(state);
    let cfg = cfg.clone();
    match variant {
        KernelVariant::ScalarBaseline => exec.run_tasks(num_tasks, target, &|r| unsafe {
            scalar::pauli_y_range(amps, target, r)
        }),
        KernelVariant::Optimized => exec.run_tasks(num_tasks, target, &|r| unsafe {
            optimized::pauli_y_range(amps, target, r, &cfg)
        }),
    }
    Ok(())
}

/// Swap the pair amplitudes wherever bit `control` of the pair's indices is
/// set; pairs with the control bit clear are never touched.
pub fn apply_controlled_not(
    state: &mut StateVector,
    control: usize,
    target: usize,
    variant: KernelVariant,
    cfg: &KernelConfig,
    exec: &Executor,
) -> Result<()> {
    check_two(state, control, target)?;
    let num_tasks = state.num_amps() >> 1;
    let amps = SharedAmps::new(state);
    let cfg = cfg.clone();
    match variant {
        KernelVariant::ScalarBaseline => exec.run_tasks(num_tasks, target, &|r| unsafe {
            scalar::cnot_range(amps, control, target, r)
        }),
        KernelVariant::Optimized => exec.run_tasks(num_tasks, target, &|r| unsafe {
            optimized::cnot_range(amps, control, target, r, &cfg)
        }),
    }
    Ok(())
}

/// Multiply amplitudes whose index has both qubit bits set by e^{i angle};
/// symmetric in (control, target).
pub fn apply_controlled_phase(
    state: &mut StateVector,
    control: usize,
    target: usize,
    angle: f64,
    variant: KernelVariant,
    cfg: &KernelConfig,
    exec: &Executor,
) -> Result<()> {
    check_two(state, control, target)?;
    let num_tasks = state.num_amps() >> 2;
    let low = control.min(target);
    let high = control.max(target);
    let amps = SharedAmps::new(state);
    let cfg = cfg.clone();
    match variant {
        KernelVariant::ScalarBaseline => exec.run_tasks(num_tasks, low, &|r| unsafe {
            scalar::cphase_range(amps, low, high, angle, r)
        }),
        KernelVariant::Optimized => exec.run_tasks(num_tasks, low, &|r| unsafe {
            optimized::cphase_range(amps, low, high, angle, r, &cfg)
        }),
    }
    Ok(())
}

/// Exchange amplitudes at index pairs that differ by trading bits q1 and q2;
/// an involution.
pub fn apply_swap(
    state: &mut StateVector,
    q1: usize,
    q2: usize,
    variant: KernelVariant,
    cfg: &KernelConfig,
    exec: &Executor,
) -> Result<()> {
    check_two(state, q1, q2)?;
    let num_tasks = state.num_amps() >> 2;
    let low = q1.min(q2);
    let amps = SharedAmps::new(state);
    let cfg = cfg.clone();
    match variant {
        KernelVariant::ScalarBaseline => exec.run_tasks(num_tasks, low, &|r| unsafe {
            scalar::swap_range(amps, q1, q2, r)
        }),
        KernelVariant::Optimized => exec.run_tasks(num_tasks, low, &|r| unsafe {
            optimized::swap_range(amps, q1, q2, r, &cfg)
        }),
    }
    Ok(())
}
