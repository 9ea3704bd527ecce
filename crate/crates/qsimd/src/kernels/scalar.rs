//! Baseline kernels: one task at a time over the interleaved amplitude
//! layout, plain (non-fused) arithmetic, index math by divide and modulo.
//! These double as the scalar tails of the optimized variant.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Range;

use super::{expand_both_set, expand_swap_pair, pair_indices, SharedAmps, SingleQubitGate};
use crate::state::ComplexAmp;

#[inline(always)]
pub(super) unsafe fn pair_hadamard_plain(amps: SharedAmps, up: usize, lo: usize) {
    let a = amps.read(up);
    let b = amps.read(lo);
    amps.write(
        up,
        ComplexAmp::new(FRAC_1_SQRT_2 * (a.re + b.re), FRAC_1_SQRT_2 * (a.im + b.im)),
    );
    amps.write(
        lo,
        ComplexAmp::new(FRAC_1_SQRT_2 * (a.re - b.re), FRAC_1_SQRT_2 * (a.im - b.im)),
    );
}

#[inline(always)]
pub(super) unsafe fn pair_unitary_plain(
    amps: SharedAmps,
    up: usize,
    lo: usize,
    m: &SingleQubitGate,
) {
    let a = amps.read(up);
    let b = amps.read(lo);
    amps.write(
        up,
        ComplexAmp::new(
            (m.m00.re * a.re - m.m00.im * a.im) + (m.m01.re * b.re - m.m01.im * b.im),
            (m.m00.re * a.im + m.m00.im * a.re) + (m.m01.re * b.im + m.m01.im * b.re),
        ),
    );
    amps.write(
        lo,
        ComplexAmp::new(
            (m.m10.re * a.re - m.m10.im * a.im) + (m.m11.re * b.re - m.m11.im * b.im),
            (m.m10.re * a.im + m.m10.im * a.re) + (m.m11.re * b.im + m.m11.im * b.re),
        ),
    );
}

#[inline(always)]
pub(super) unsafe fn pair_exchange(amps: SharedAmps, up: usize, lo: usize) {
    let a = amps.read(up);
    let b = amps.read(lo);
    amps.write(up, b);
    amps.write(lo, a);
}

#[inline(always)]
pub(super) unsafe fn pair_pauli_y_plain(amps: SharedAmps, up: usize, lo: usize) {
    let a = amps.read(up);
    let b = amps.read(lo);
    // up' = -i lo, lo' = i up
    amps.write(up, ComplexAmp::new(b.im, -b.re));
    amps.write(lo, ComplexAmp::new(-a.im, a.re));
}

#[inline(always)]
pub(super) unsafe fn phase_mul_plain(amps: SharedAmps, idx: usize, cos_t: f64, sin_t: f64) {
    let z = amps.read(idx);
    amps.write(
        idx,
        ComplexAmp::new(z.re * cos_t - z.im * sin_t, z.im * cos_t + z.re * sin_t),
    );
}

pub(super) unsafe fn hadamard_range(amps: SharedAmps, target: usize, tasks: Range<usize>) {
    for task in tasks {
        let (up, lo) = pair_indices(task, target);
        pair_hadamard_plain(amps, up, lo);
    }
}

pub(super) unsafe fn unitary_range(
    amps: SharedAmps,
    target: usize,
    gate: &SingleQubitGate,
    tasks: Range<usize>,
) {
    for task in tasks {
        let (up, lo) = pair_indices(task, target);
        pair_unitary_plain(amps, up, lo, gate);
    }
}

pub(super) unsafe fn pauli_x_range(amps: SharedAmps, target: usize, tasks: Range<usize>) {
    for task in tasks {
        let (up, lo) = pair_indices(task, target);
        pair_exchange(amps, up, lo);
    }
}

pub(super) unsafe fn pauli_y_range(amps: SharedAmps, target: usize, tasks: Range<usize>) {
    for task in tasks {
        let (up, lo) = pair_indices(task, target);
        pair_pauli_y_plain(amps, up, lo);
    }
}

pub(super) unsafe fn cnot_range(
    amps: SharedAmps,
    control: usize,
    target: usize,
    tasks: Range<usize>,
) {
    for task in tasks {
        let (up, lo) = pair_indices(task, target);
        if (up >> control) & 1 == 1 {
            pair_exchange(amps, up, lo);
        }
    }
}

/// `low < high` are the two qubit bit positions; tasks run over the
/// quarter-sized subspace with both bits set.
pub(super) unsafe fn cphase_range(
    amps: SharedAmps,
    low: usize,
    high: usize,
    angle: f64,
    tasks: Range<usize>,
) {
    let (sin_t, cos_t) = angle.sin_cos();
    for task in tasks {
        let idx = expand_both_set(task, low, high);
        phase_mul_plain(amps, idx, cos_t, sin_t);
    }
}

pub(super) unsafe fn swap_range(amps: SharedAmps, q1: usize, q2: usize, tasks: Range<usize>) {
    for task in tasks {
        let (a, b) = expand_swap_pair(task, q1, q2);
        pair_exchange(amps, a, b);
    }
}
