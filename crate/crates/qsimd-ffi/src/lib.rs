//! C ABI for the simulator: opaque simulator handles, plain status codes,
//! and gate/benchmark entry points usable from any language with a C FFI.
//!
//! The matching header lives at `include/qsimd.h` and mirrors these
//! declarations one to one; keep the two in sync when editing.

use std::ffi::{c_char, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qsimd::circuits::{self, QftVariant, RqcSpec};
use qsimd::kernels;
use qsimd::numa::AllocPolicy;
use qsimd::scheduler::{Executor, PinMode};
use qsimd::{ComplexAmp, Error, KernelConfig, KernelVariant, SingleQubitGate, StateVector};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsimdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    AllocationFailed = 3,
    OutOfRange = 4,
    ControlEqualsTarget = 5,
    NonUnitary = 6,
    Internal = 7,
}

fn status_for(err: &Error) -> QsimdStatus {
    match err {
        Error::AllocationFailed { .. } | Error::QubitCountOutOfRange(_) => {
            QsimdStatus::AllocationFailed
        }
        Error::IndexOutOfBounds { .. } | Error::TargetOutOfRange { .. } => QsimdStatus::OutOfRange,
        Error::ControlEqualsTarget(_) => QsimdStatus::ControlEqualsTarget,
        Error::NonUnitaryGate { .. } => QsimdStatus::NonUnitary,
        Error::InvalidArgument(_) | Error::InvalidKernelConfig(_) => QsimdStatus::InvalidArgument,
        _ => QsimdStatus::Internal,
    }
}

/// One complex amplitude crossing the FFI boundary.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QsimdComplex {
    pub re: f64,
    pub im: f64,
}

/// Opaque simulator: a state vector plus its executor and kernel config.
pub struct QsimdSim {
    state: StateVector,
    exec: Executor,
    cfg: KernelConfig,
}

fn policy_from(raw: c_int) -> Option<AllocPolicy> {
    match raw {
        0 => Some(AllocPolicy::Default),
        1 => Some(AllocPolicy::LocalFirst),
        2 => Some(AllocPolicy::SplitEven),
        _ => None,
    }
}

fn variant_from(raw: c_int) -> Option<KernelVariant> {
    match raw {
        0 => Some(KernelVariant::ScalarBaseline),
        1 => Some(KernelVariant::Optimized),
        _ => None,
    }
}

fn catch(body: impl FnOnce() -> QsimdStatus) -> QsimdStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(QsimdStatus::Internal)
}

/// Create a simulator. `policy`: 0 default, 1 local-first, 2 split-even.
/// `num_threads`: 0 or 1 runs serial; more spawns a pinned worker pool when
/// `pin` is nonzero.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qsimd_sim_create(
    num_qubits: u32,
    policy: c_int,
    num_threads: u32,
    pin: c_int,
    out: *mut *mut QsimdSim,
) -> QsimdStatus {
    if out.is_null() {
        return QsimdStatus::NullPointer;
    }
    *out = std::ptr::null_mut();
    catch(|| {
        let Some(policy) = policy_from(policy) else {
            return QsimdStatus::InvalidArgument;
        };
        let state = match StateVector::new(num_qubits as usize, policy) {
            Ok(s) => s,
            Err(e) => return status_for(&e),
        };
        let topo = qsimd::detect_topology();
        let pin_mode = if pin != 0 { PinMode::Node } else { PinMode::Off };
        let exec = Executor::new(num_threads.max(1) as usize, topo, pin_mode);
        let cfg = match KernelConfig::from_env() {
            Ok(c) => c,
            Err(e) => return status_for(&e),
        };
        let sim = Box::new(QsimdSim { state, exec, cfg });
        unsafe { *out = Box::into_raw(sim) };
        QsimdStatus::Ok
    })
}

/// Destroy a simulator created by [`qsimd_sim_create`]. NULL is a no-op.
///
/// # Safety
/// `sim` must come from `qsimd_sim_create` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qsimd_sim_destroy(sim: *mut QsimdSim) {
    if !sim.is_null() {
        drop(unsafe { Box::from_raw(sim) });
    }
}

macro_rules! deref_sim {
    ($sim:expr) => {
        match unsafe { $sim.as_mut() } {
            Some(s) => s,
            None => return QsimdStatus::NullPointer,
        }
    };
}

/// Number of qubits.
///
/// # Safety
/// `sim` valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qsimd_sim_num_qubits(sim: *mut QsimdSim, out: *mut u32) -> QsimdStatus {
    let sim = deref_sim!(sim);
    if out.is_null() {
        return QsimdStatus::NullPointer;
    }
    unsafe { *out = sim.state.num_qubits() as u32 };
    QsimdStatus::Ok
}

/// Sum of |amplitude|^2 over the state.
///
/// # Safety
/// `sim` valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qsimd_sim_total_probability(
    sim: *mut QsimdSim,
    out: *mut f64,
) -> QsimdStatus {
    let sim = deref_sim!(sim);
    if out.is_null() {
        return QsimdStatus::NullPointer;
    }
    unsafe { *out = sim.state.total_probability() };
    QsimdStatus::Ok
}

/// Read one amplitude.
///
/// # Safety
/// `sim` valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qsimd_sim_get_amp(
    sim: *mut QsimdSim,
    index: u64,
    out: *mut QsimdComplex,
) -> QsimdStatus {
    let sim = deref_sim!(sim);
    if out.is_null() {
        return QsimdStatus::NullPointer;
    }
    match sim.state.get_amp(index) {
        Ok(a) => {
            unsafe { *out = QsimdComplex { re: a.re, im: a.im } };
            QsimdStatus::Ok
        }
        Err(e) => status_for(&e),
    }
}

/// Overwrite one amplitude (no renormalization).
///
/// # Safety
/// `sim` valid.
#[no_mangle]
pub unsafe extern "C" fn qsimd_sim_set_amp(
    sim: *mut QsimdSim,
    index: u64,
    value: QsimdComplex,
) -> QsimdStatus {
    let sim = deref_sim!(sim);
    match sim.state.set_amp(index, ComplexAmp::new(value.re, value.im)) {
        Ok(()) => QsimdStatus::Ok,
        Err(e) => status_for(&e),
    }
}

fn apply_result(r: Result<(), Error>) -> QsimdStatus {
    match r {
        Ok(()) => QsimdStatus::Ok,
        Err(e) => status_for(&e),
    }
}

/// Apply a Hadamard gate. `variant`: 0 scalar baseline, 1 optimized.
///
/// # Safety
/// `sim` valid.
#[no_mangle]
pub unsafe extern "C" fn qsimd_apply_hadamard(
    sim: *mut QsimdSim,
    target: u32,
    variant: c_int,
) -> QsimdStatus {
    let sim = deref_sim!(sim);
    let Some(variant) = variant_from(variant) else {
        return QsimdStatus::InvalidArgument;
    };
    catch(|| {
        apply_result(kernels::apply_hadamard(
            &mut sim.state,
            target as usize,
            variant,
            &sim.cfg,
            &sim.exec,
        ))
    })
}

/// Apply Pauli-X.
///
/// # Safety
/// `sim` valid.
#[no_mangle]
pub unsafe extern "C" fn qsimd_apply_pauli_x(
    sim: *mut QsimdSim,
    target: u32,
    variant: c_int,
) -> QsimdStatus {
    let sim = deref_sim!(sim);
    let Some(variant) = variant_from(variant) else {
        return QsimdStatus::InvalidArgument;
    };
    catch(|| {
        apply_result(kernels::apply_pauli_x(
            &mut sim.state,
            target as usize,
            variant,
            &sim.cfg,
            &sim.exec,
        ))
    })
}

/// Apply Pauli-Y.
///
/// # Safety
/// `sim` valid.
#[no_mangle]
pub unsafe extern "C" fn qsimd_apply_pauli_y(
    sim: *mut QsimdSim,
    target: u32,
    variant: c_int,
) -> QsimdStatus {
    let sim = deref_sim!(sim);
    let Some(variant) = variant_from(variant) else {
        return QsimdStatus::InvalidArgument;
    };
    catch(|| {
        apply_result(kernels::apply_pauli_y(
            &mut sim.state,
            target as usize,
            variant,
            &sim.cfg,
            &sim.exec,
        ))
    })
}

/// Apply an arbitrary single-qubit unitary given as 4 complex entries in
/// row-major order (m00, m01, m10, m11).
///
/// # Safety
/// `sim` valid; `matrix` points to 4 readable `QsimdComplex` values.
#[no_mangle]
pub unsafe extern "C" fn qsimd_apply_unitary(
    sim: *mut QsimdSim,
    target: u32,
    matrix: *const QsimdComplex,
    variant: c_int,
) -> QsimdStatus {
    let sim = deref_sim!(sim);
    if matrix.is_null() {
        return QsimdStatus::NullPointer;
    }
    let Some(variant) = variant_from(variant) else {
        return QsimdStatus::InvalidArgument;
    };
    let m = unsafe { std::slice::from_raw_parts(matrix, 4) };
    let gate = SingleQubitGate::new(
        ComplexAmp::new(m[0].re, m[0].im),
        ComplexAmp::new(m[1].re, m[1].im),
        ComplexAmp::new(m[2].re, m[2].im),
        ComplexAmp::new(m[3].re, m[3].im),
    );
    catch(|| {
        apply_result(kernels::apply_single_qubit_unitary(
            &mut sim.state,
            target as usize,
            &gate,
            variant,
            &sim.cfg,
            &sim.exec,
        ))
    })
}

/// Apply CNOT.
///
/// # Safety
/// `sim` valid.
#[no_mangle]
pub unsafe extern "C" fn qsimd_apply_cnot(
    sim: *mut QsimdSim,
    control: u32,
    target: u32,
    variant: c_int,
) -> QsimdStatus {
    let sim = deref_sim!(sim);
    let Some(variant) = variant_from(variant) else {
        return QsimdStatus::InvalidArgument;
    };
    catch(|| {
        apply_result(kernels::apply_controlled_not(
            &mut sim.state,
            control as usize,
            target as usize,
            variant,
            &sim.cfg,
            &sim.exec,
        ))
    })
}

/// Apply a controlled phase of `angle` radians.
///
/// # Safety
/// `sim` valid.
#[no_mangle]
pub unsafe extern "C" fn qsimd_apply_cphase(
    sim: *mut QsimdSim,
    control: u32,
    target: u32,
    angle: f64,
    variant: c_int,
) -> QsimdStatus {
    let sim = deref_sim!(sim);
    let Some(variant) = variant_from(variant) else {
        return QsimdStatus::InvalidArgument;
    };
    catch(|| {
        apply_result(kernels::apply_controlled_phase(
            &mut sim.state,
            control as usize,
            target as usize,
            angle,
            variant,
            &sim.cfg,
            &sim.exec,
        ))
    })
}

/// Apply SWAP.
///
/// # Safety
/// `sim` valid.
#[no_mangle]
pub unsafe extern "C" fn qsimd_apply_swap(
    sim: *mut QsimdSim,
    q1: u32,
    q2: u32,
    variant: c_int,
) -> QsimdStatus {
    let sim = deref_sim!(sim);
    let Some(variant) = variant_from(variant) else {
        return QsimdStatus::InvalidArgument;
    };
    catch(|| {
        apply_result(kernels::apply_swap(
            &mut sim.state,
            q1 as usize,
            q2 as usize,
            variant,
            &sim.cfg,
            &sim.exec,
        ))
    })
}

/// Run a whole QFT in place. `qft_variant`: 0 recursive, 1 iterative,
/// 2 blocked with `block_factor`.
///
/// # Safety
/// `sim` valid.
#[no_mangle]
pub unsafe extern "C" fn qsimd_run_qft(
    sim: *mut QsimdSim,
    qft_variant: c_int,
    block_factor: u32,
    kernel_variant: c_int,
) -> QsimdStatus {
    let sim = deref_sim!(sim);
    let Some(variant) = variant_from(kernel_variant) else {
        return QsimdStatus::InvalidArgument;
    };
    let qft = match qft_variant {
        0 => QftVariant::Recursive,
        1 => QftVariant::Iterative,
        2 => QftVariant::Blocked(block_factor.max(1) as usize),
        _ => return QsimdStatus::InvalidArgument,
    };
    catch(|| {
        apply_result(circuits::run_qft(
            &mut sim.state,
            qft,
            variant,
            &sim.cfg,
            &sim.exec,
        ))
    })
}

/// Build and run a layered random circuit (deterministic in `seed`).
///
/// # Safety
/// `sim` valid.
#[no_mangle]
pub unsafe extern "C" fn qsimd_run_rqc(
    sim: *mut QsimdSim,
    layers: u32,
    seed: u64,
    kernel_variant: c_int,
) -> QsimdStatus {
    let sim = deref_sim!(sim);
    let Some(variant) = variant_from(kernel_variant) else {
        return QsimdStatus::InvalidArgument;
    };
    catch(|| {
        let spec = RqcSpec::new(sim.state.num_qubits(), layers as usize, seed);
        let circuit = match circuits::build_rqc(&spec) {
            Ok(c) => c,
            Err(e) => return status_for(&e),
        };
        apply_result(circuits::run_circuit(
            &mut sim.state,
            &circuit,
            variant,
            &sim.cfg,
            &sim.exec,
        ))
    })
}

/// Static human-readable name for a status code.
#[no_mangle]
pub extern "C" fn qsimd_status_name(status: QsimdStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        QsimdStatus::Ok => b"ok\0",
        QsimdStatus::NullPointer => b"null pointer\0",
        QsimdStatus::InvalidArgument => b"invalid argument\0",
        QsimdStatus::AllocationFailed => b"allocation failed\0",
        QsimdStatus::OutOfRange => b"out of range\0",
        QsimdStatus::ControlEqualsTarget => b"control equals target\0",
        QsimdStatus::NonUnitary => b"non-unitary gate\0",
        QsimdStatus::Internal => b"internal error\0",
    };
    s.as_ptr().cast()
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn qsimd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
