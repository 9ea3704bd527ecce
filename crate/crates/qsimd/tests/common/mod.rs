//! Shared helpers for integration tests.
#![allow(dead_code)] // each test binary uses a different subset

use qsimd::circuits::GateRecord;
use qsimd::oracle::DenseState;
use qsimd::{AllocPolicy, ComplexAmp, SingleQubitGate, StateVector};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Fill `state` with a normalized pseudo-random vector.
pub fn randomize_state(state: &mut StateVector, seed: u64) {
    let mut r = rng(seed);
    for amp in state.amps_mut() {
        *amp = ComplexAmp::new(uniform(&mut r) - 0.5, uniform(&mut r) - 0.5);
    }
    let norm = state.total_probability().sqrt();
    for amp in state.amps_mut() {
        amp.re /= norm;
        amp.im /= norm;
    }
}

pub fn random_state(n: usize, seed: u64) -> StateVector {
    let mut s = StateVector::new(n, AllocPolicy::Default).unwrap();
    randomize_state(&mut s, seed);
    s
}

/// Haar-ish random unitary from three angles; unitary to machine precision.
pub fn random_unitary(r: &mut ChaCha8Rng) -> SingleQubitGate {
    let theta = uniform(r) * std::f64::consts::PI;
    let phi = uniform(r) * 2.0 * std::f64::consts::PI;
    let lambda = uniform(r) * 2.0 * std::f64::consts::PI;
    let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    SingleQubitGate::new(
        ComplexAmp::new(ct, 0.0),
        ComplexAmp::new(-(lambda.cos()) * st, -(lambda.sin()) * st),
        ComplexAmp::new(phi.cos() * st, phi.sin() * st),
        ComplexAmp::new(
            (phi + lambda).cos() * ct,
            (phi + lambda).sin() * ct,
        ),
    )
}

/// Max complex-modulus difference between two simulator states.
pub fn max_diff_states(a: &StateVector, b: &StateVector) -> f64 {
    assert_eq!(a.num_qubits(), b.num_qubits());
    a.amps()
        .iter()
        .zip(b.amps())
        .map(|(x, y)| ((x.re - y.re).powi(2) + (x.im - y.im).powi(2)).sqrt())
        .fold(0.0, f64::max)
}

pub fn bit_identical(a: &StateVector, b: &StateVector) -> bool {
    a.amps()
        .iter()
        .zip(b.amps())
        .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
}

/// Copy a simulator state into a dense oracle state.
pub fn to_dense(state: &StateVector) -> DenseState {
    DenseState::from_state_vector(state).unwrap()
}

/// Apply a gate record on the oracle side.
pub fn oracle_step(dense: &DenseState, gate: &GateRecord) -> DenseState {
    qsimd::oracle::oracle_apply(dense, gate).unwrap()
}
