//! The state-vector representation: one contiguous, 64-byte-aligned buffer of
//! interleaved complex amplitudes plus its placement metadata.
//!
//! Amplitude index convention, shared by every module: qubit `q` corresponds
//! to bit `q` of the amplitude index (qubit 0 is the least significant bit).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numa::{
    allocate_bound, detect_topology, AllocPolicy, BoundBuffer, NodeTopology, PlacementReport,
};

/// One complex amplitude; real and imaginary parts are adjacent in memory so
/// a cache line always carries whole amplitudes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexAmp {
    pub re: f64,
    pub im: f64,
}

impl ComplexAmp {
    pub const ZERO: ComplexAmp = ComplexAmp { re: 0.0, im: 0.0 };
    pub const ONE: ComplexAmp = ComplexAmp { re: 1.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        ComplexAmp { re, im }
    }

    /// |z|^2
    pub fn abs_sq(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

const _: () = assert!(std::mem::size_of::<ComplexAmp>() == 16);
const _: () = assert!(std::mem::align_of::<ComplexAmp>() == 8);

/// A full 2^n-amplitude state vector.
///
/// The buffer is a single contiguous region regardless of placement policy;
/// `SplitEven` binds halves of that one region rather than allocating twice.
/// The type provides no internal synchronization: concurrent kernel workers
/// must hold disjoint task ranges (the scheduler enforces this).
pub struct StateVector {
    num_qubits: usize,
    buf: BoundBuffer,
    placement: PlacementReport,
    policy: AllocPolicy,
}

impl StateVector {
    /// Allocate and initialize |0...0> under `policy`, detecting the host
    /// topology. 16 * 2^n bytes must be allocatable.
    pub fn new(num_qubits: usize, policy: AllocPolicy) -> Result<Self> {
        let topo = detect_topology();
        Self::with_topology(num_qubits, policy, &topo, false)
    }

    /// As [`StateVector::new`] with an explicit topology. With `strict` set,
    /// an unavailable binding facility is an error rather than a fallback.
    pub fn with_topology(
        num_qubits: usize,
        policy: AllocPolicy,
        topo: &NodeTopology,
        strict: bool,
    ) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::QubitCountOutOfRange(num_qubits));
        }
        let bytes = (std::mem::size_of::<ComplexAmp>() as u64)
            .checked_shl(num_qubits as u32)
            .filter(|_| num_qubits < 58)
            .ok_or(Error::QubitCountOutOfRange(num_qubits))?;

        let (buf, placement) = allocate_bound(bytes, policy, topo, strict)?;
        let mut state = StateVector {
            num_qubits,
            buf,
            placement,
            policy,
        };
        state.reset_zero_state();
        Ok(state)
    }

    /// Re-initialize to |0...0> in place. Writes every amplitude, so this is
    /// also the first touch that realizes the placement policy.
    pub fn reset_zero_state(&mut self) {
        let amps = self.amps_mut();
        // SAFETY: zeroing the full slice; ComplexAmp is plain f64 pairs.
        unsafe {
            std::ptr::write_bytes(amps.as_mut_ptr(), 0, amps.len());
        }
        amps[0] = ComplexAmp::ONE;
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Number of amplitudes, 2^n.
    pub fn num_amps(&self) -> usize {
        1usize << self.num_qubits
    }

    pub fn policy(&self) -> AllocPolicy {
        self.policy
    }

    pub fn placement(&self) -> &PlacementReport {
        &self.placement
    }

    /// Measure where this state's pages currently reside.
    pub fn audit_placement(&self, topo: &NodeTopology) -> PlacementReport {
        crate::numa::audit_placement(&self.buf, topo)
    }

    pub fn amps(&self) -> &[ComplexAmp] {
        // SAFETY: the mapping holds at least num_amps elements and outlives
        // the borrow; alignment is page-level.
        unsafe {
            std::slice::from_raw_parts(self.buf.as_ptr().cast::<ComplexAmp>(), self.num_amps())
        }
    }

    pub fn amps_mut(&mut self) -> &mut [ComplexAmp] {
        // SAFETY: as amps(), with exclusive access through &mut self.
        unsafe {
            std::slice::from_raw_parts_mut(self.buf.as_ptr().cast::<ComplexAmp>(), self.num_amps())
        }
    }

    /// Raw base pointer for kernel workers. Writers must hold disjoint
    /// ranges; see the scheduler contract.
    pub(crate) fn amps_ptr(&mut self) -> *mut ComplexAmp {
        self.buf.as_ptr().cast()
    }

    /// Sum of |amp|^2 over the whole vector; 1 within 1e-12 for any state
    /// reached by unitary gates from |0...0>.
    pub fn total_probability(&self) -> f64 {
        self.amps().iter().map(ComplexAmp::abs_sq).sum()
    }

    pub fn get_amp(&self, index: u64) -> Result<ComplexAmp> {
        let amps = self.amps();
        if index >= amps.len() as u64 {
            return Err(Error::IndexOutOfBounds {
                index,
                num_amps: amps.len() as u64,
            });
        }
        Ok(amps[index as usize])
    }

    /// Overwrite one amplitude. Does not renormalize.
    pub fn set_amp(&mut self, index: u64, value: ComplexAmp) -> Result<()> {
        let num_amps = self.num_amps() as u64;
        if index >= num_amps {
            return Err(Error::IndexOutOfBounds { index, num_amps });
        }
        self.amps_mut()[index as usize] = value;
        Ok(())
    }

    /// Tear the state down now. Equivalent to dropping, but callable as an
    /// explicit step so teardown can sit inside a timed region.
    pub fn destroy(self) {
        drop(self);
    }
}

impl std::fmt::Debug for StateVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StateVector")
            .field("num_qubits", &self.num_qubits)
            .field("policy", &self.policy)
            .finish()
    }
}
