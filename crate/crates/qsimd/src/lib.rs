//! Full state-vector quantum circuit simulator with a NUMA-aware,
//! SIMD-optimized execution stack.
//!
//! Amplitudes live in one contiguous, 64-byte-aligned buffer of interleaved
//! real/imaginary pairs. Gate kernels come in a scalar baseline and an
//! optimized variant (vector batches, loop unrolling, software prefetch,
//! fused multiply-add); placement policies bind the buffer's pages to NUMA
//! nodes and the scheduler pins workers next to their data. QFT and layered
//! random-circuit benchmarks plus a dense-matrix oracle round out the crate.
//!
//! ```
//! use qsimd::{AllocPolicy, Executor, KernelConfig, KernelVariant, StateVector};
//!
//! let mut state = StateVector::new(3, AllocPolicy::Default).unwrap();
//! let exec = Executor::serial();
//! let cfg = KernelConfig::default();
//! qsimd::kernels::apply_hadamard(&mut state, 0, KernelVariant::Optimized, &cfg, &exec).unwrap();
//! assert!((state.total_probability() - 1.0).abs() < 1e-12);
//! ```

pub mod bench;
pub mod circuits;
pub mod error;
pub mod kernels;
pub mod numa;
pub mod oracle;
pub mod scheduler;
pub mod state;

pub use error::{Error, Result};
pub use kernels::{detect_isa, IsaPath, KernelConfig, KernelVariant, SingleQubitGate};
pub use numa::{detect_topology, AllocPolicy, NodeTopology, PlacementReport};
pub use scheduler::{make_plan, Executor, PinMode, ThreadPlan, WorkerPool};
pub use state::{ComplexAmp, StateVector};
