//! Brute-force reference simulator for equivalence testing at small qubit
//! counts.
//!
//! Gates are applied by explicit dense matrix arithmetic on a plain complex
//! vector: full operator matrices below nine qubits, an index-wise tensor
//! contraction above. Both routes are deliberately written without reusing
//! any of the kernel index machinery, so they can serve as an independent
//! check on it. Performance is a non-goal.

use num_complex::Complex64;

use crate::circuits::{Circuit, GateKind, GateRecord};
use crate::error::{Error, Result};
use crate::state::StateVector;

/// Largest register the oracle will touch (cost guard).
pub const ORACLE_MAX_QUBITS: usize = 14;

/// Above this size the full-matrix route is replaced by the contraction
/// route.
const MATRIX_ROUTE_MAX_QUBITS: usize = 8;

/// A plain list of 2^n complex values; no alignment or placement semantics.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    pub num_qubits: usize,
    pub amps: Vec<Complex64>,
}

impl DenseState {
    pub fn zero_state(num_qubits: usize) -> Result<Self> {
        Self::basis_state(num_qubits, 0)
    }

    /// |k> as a dense vector.
    pub fn basis_state(num_qubits: usize, k: usize) -> Result<Self> {
        check_size(num_qubits)?;
        let mut amps = vec![Complex64::ZERO; 1 << num_qubits];
        amps[k] = Complex64::ONE;
        Ok(DenseState { num_qubits, amps })
    }

    /// Copy the amplitudes out of a simulator state.
    pub fn from_state_vector(state: &StateVector) -> Result<Self> {
        check_size(state.num_qubits())?;
        Ok(DenseState {
            num_qubits: state.num_qubits(),
            amps: state
                .amps()
                .iter()
                .map(|a| Complex64::new(a.re, a.im))
                .collect(),
        })
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }
}

fn check_size(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > ORACLE_MAX_QUBITS {
        return Err(Error::OracleTooLarge(num_qubits));
    }
    Ok(())
}

/// The oracle's own 2x2 matrix table; kept separate from the kernel gate
/// constructors on purpose.
fn gate_matrix_2x2(kind: &GateKind) -> [Complex64; 4] {
    let z = Complex64::ZERO;
    let one = Complex64::ONE;
    match kind {
        GateKind::H => {
            let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            [r, r, r, -r]
        }
        GateKind::X | GateKind::Cnot => [z, one, one, z],
        GateKind::Y => [z, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), z],
        GateKind::T => [one, z, z, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
        GateKind::Phase(theta) | GateKind::CPhase(theta) => {
            [one, z, z, Complex64::from_polar(1.0, *theta)]
        }
        GateKind::Unitary(m) => [
            Complex64::new(m.m00.re, m.m00.im),
            Complex64::new(m.m01.re, m.m01.im),
            Complex64::new(m.m10.re, m.m10.im),
            Complex64::new(m.m11.re, m.m11.im),
        ],
        GateKind::Swap => unreachable!("swap has no 2x2 form"),
    }
}

/// Apply one gate, returning a fresh state.
pub fn oracle_apply(state: &DenseState, gate: &GateRecord) -> Result<DenseState> {
    check_size(state.num_qubits)?;
    gate.validate(state.num_qubits)?;
    let amps = if state.num_qubits <= MATRIX_ROUTE_MAX_QUBITS {
        apply_via_matrix(&state.amps, state.num_qubits, gate)
    } else {
        apply_via_contraction(&state.amps, state.num_qubits, gate)
    };
    Ok(DenseState {
        num_qubits: state.num_qubits,
        amps,
    })
}

/// Replay a whole gate list.
pub fn oracle_run(state: &DenseState, circuit: &Circuit) -> Result<DenseState> {
    let mut cur = state.clone();
    for gate in &circuit.gates {
        cur = oracle_apply(&cur, gate)?;
    }
    Ok(cur)
}

/// Max over indices of |a_i - b_i| (complex modulus of the difference).
pub fn compare_states(a: &StateVector, b: &DenseState) -> Result<f64> {
    if a.num_qubits() != b.num_qubits {
        return Err(Error::SizeMismatch(a.num_qubits(), b.num_qubits));
    }
    Ok(a.amps()
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| (Complex64::new(x.re, x.im) - y).norm())
        .fold(0.0, f64::max))
}

/// Same comparison between two dense states.
pub fn compare_dense(a: &DenseState, b: &DenseState) -> Result<f64> {
    if a.num_qubits != b.num_qubits {
        return Err(Error::SizeMismatch(a.num_qubits, b.num_qubits));
    }
    Ok(a.amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

// ---------------------------------------------------------------------------
// Route 1: full 2^n x 2^n operator matrices.
// ---------------------------------------------------------------------------

/// Kronecker product, row-major square matrices.
fn kron(a: &[Complex64], an: usize, b: &[Complex64], bn: usize) -> Vec<Complex64> {
    let n = an * bn;
    let mut out = vec![Complex64::ZERO; n * n];
    for ar in 0..an {
        for ac in 0..an {
            let v = a[ar * an + ac];
            for br in 0..bn {
                for bc in 0..bn {
                    out[(ar * bn + br) * n + (ac * bn + bc)] = v * b[br * bn + bc];
                }
            }
        }
    }
    out
}

fn identity(n: usize) -> Vec<Complex64> {
    let mut m = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        m[i * n + i] = Complex64::ONE;
    }
    m
}

fn matmul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; n * n];
    for r in 0..n {
        for k in 0..n {
            let v = a[r * n + k];
            if v == Complex64::ZERO {
                continue;
            }
            for c in 0..n {
                out[r * n + c] += v * b[k * n + c];
            }
        }
    }
    out
}

fn matadd(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// I (x) ... (x) M (x) ... (x) I with `m` sitting at qubit `target`
/// (qubit 0 = least significant index bit, hence the rightmost Kronecker
/// factor).
fn embed_single(m: &[Complex64; 4], num_qubits: usize, target: usize) -> Vec<Complex64> {
    let below = identity(1 << target);
    let above = identity(1 << (num_qubits - target - 1));
    let low = kron(m, 2, &below, 1 << target);
    kron(&above, 1 << (num_qubits - target - 1), &low, 2 << target)
}

/// Full operator matrix for any supported gate record.
pub(crate) fn full_operator(num_qubits: usize, gate: &GateRecord) -> Vec<Complex64> {
    let dim = 1usize << num_qubits;
    match (&gate.kind, gate.control) {
        (GateKind::Swap, _) => {
            // Permutation matrix exchanging the two qubit bits.
            let (q1, q2) = (gate.target, gate.control.expect("swap has two qubits"));
            let mut m = vec![Complex64::ZERO; dim * dim];
            for col in 0..dim {
                let b1 = (col >> q1) & 1;
                let b2 = (col >> q2) & 1;
                let row = (col & !(1 << q1) & !(1 << q2)) | (b2 << q1) | (b1 << q2);
                m[row * dim + col] = Complex64::ONE;
            }
            m
        }
        (kind, Some(control)) => {
            // |0><0|_c (x) I  +  |1><1|_c (x) U_t
            let p0 = [Complex64::ONE, Complex64::ZERO, Complex64::ZERO, Complex64::ZERO];
            let p1 = [Complex64::ZERO, Complex64::ZERO, Complex64::ZERO, Complex64::ONE];
            let idle = embed_single(&p0, num_qubits, control);
            let act = matmul(
                &embed_single(&p1, num_qubits, control),
                &embed_single(&gate_matrix_2x2(kind), num_qubits, gate.target),
                dim,
            );
            matadd(&idle, &act)
        }
        (kind, None) => embed_single(&gate_matrix_2x2(kind), num_qubits, gate.target),
    }
}

pub(crate) fn apply_via_matrix(
    amps: &[Complex64],
    num_qubits: usize,
    gate: &GateRecord,
) -> Vec<Complex64> {
    let dim = amps.len();
    let op = full_operator(num_qubits, gate);
    let mut out = vec![Complex64::ZERO; dim];
    for (r, o) in out.iter_mut().enumerate() {
        let row = &op[r * dim..(r + 1) * dim];
        *o = row.iter().zip(amps).map(|(m, a)| m * a).sum();
    }
    out
}

// ---------------------------------------------------------------------------
// Route 2: index-wise tensor contraction (gather style: each output element
// is computed from its own row of the implicit operator).
// ---------------------------------------------------------------------------

pub(crate) fn apply_via_contraction(
    amps: &[Complex64],
    _num_qubits: usize,
    gate: &GateRecord,
) -> Vec<Complex64> {
    let dim = amps.len();
    let mut out = vec![Complex64::ZERO; dim];
    match (&gate.kind, gate.control) {
        (GateKind::Swap, _) => {
            let (q1, q2) = (gate.target, gate.control.expect("swap has two qubits"));
            for (k, o) in out.iter_mut().enumerate() {
                let b1 = (k >> q1) & 1;
                let b2 = (k >> q2) & 1;
                let src = (k & !(1 << q1) & !(1 << q2)) | (b2 << q1) | (b1 << q2);
                *o = amps[src];
            }
        }
        (GateKind::CPhase(theta), Some(control)) => {
            let phase = Complex64::from_polar(1.0, *theta);
            for (k, o) in out.iter_mut().enumerate() {
                let both = (k >> control) & 1 == 1 && (k >> gate.target) & 1 == 1;
                *o = if both { amps[k] * phase } else { amps[k] };
            }
        }
        (kind, Some(control)) => {
            let m = gate_matrix_2x2(kind);
            for (k, o) in out.iter_mut().enumerate() {
                if (k >> control) & 1 == 0 {
                    *o = amps[k];
                } else {
                    let own = (k >> gate.target) & 1;
                    let partner = k ^ (1 << gate.target);
                    *o = m[own * 2 + own] * amps[k] + m[own * 2 + (1 - own)] * amps[partner];
                }
            }
        }
        (kind, None) => {
            let m = gate_matrix_2x2(kind);
            for (k, o) in out.iter_mut().enumerate() {
                let own = (k >> gate.target) & 1;
                let partner = k ^ (1 << gate.target);
                *o = m[own * 2 + own] * amps[k] + m[own * 2 + (1 - own)] * amps[partner];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::build_qft;
    use crate::circuits::QftVariant;
    use crate::kernels::SingleQubitGate;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn h(target: usize) -> GateRecord {
        GateRecord::single(GateKind::H, target)
    }

    #[test]
    fn hadamard_on_zero() {
        let s = DenseState::zero_state(1).unwrap();
        let s = oracle_apply(&s, &h(0)).unwrap();
        assert!((s.amps[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amps[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(s.amps[0].im.abs() < 1e-15);
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        // |10> is index 2 (qubit 1 set); CNOT(control=1, target=0) -> |11>.
        let s = DenseState::basis_state(2, 2).unwrap();
        let s = oracle_apply(&s, &GateRecord::controlled(GateKind::Cnot, 0, 1)).unwrap();
        assert!((s.amps[3] - Complex64::ONE).norm() < 1e-15);
        assert!(s.amps[2].norm() < 1e-15);
    }

    #[test]
    fn qft_gate_list_matches_direct_dft_matrix() {
        // QFT|k> must equal the DFT matrix column k, for every k at n=4.
        let n = 4;
        let dim = 1usize << n;
        let circuit = build_qft(n, QftVariant::Iterative);
        for k in 0..dim {
            let s = DenseState::basis_state(n, k).unwrap();
            let got = oracle_run(&s, &circuit).unwrap();
            for j in 0..dim {
                let expect = Complex64::from_polar(
                    1.0 / (dim as f64).sqrt(),
                    2.0 * PI * (j as f64) * (k as f64) / dim as f64,
                );
                assert!(
                    (got.amps[j] - expect).norm() < 1e-12,
                    "n=4 k={k} j={j}: {} vs {expect}",
                    got.amps[j]
                );
            }
        }
    }

    #[test]
    fn matrix_and_contraction_routes_agree() {
        // Self-check: both routes must agree on every gate family at n <= 6.
        let mut rng_state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            (rng_state >> 11) as f64 / (1u64 << 53) as f64
        };
        for n in 2..=6 {
            let dim = 1usize << n;
            let amps: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(next() - 0.5, next() - 0.5))
                .collect();
            let gates = [
                GateRecord::single(GateKind::H, n - 1),
                GateRecord::single(GateKind::Y, 0),
                GateRecord::single(GateKind::T, 1),
                GateRecord::controlled(GateKind::Cnot, 0, n - 1),
                GateRecord::controlled(GateKind::CPhase(PI / 8.0), n - 1, 1),
                GateRecord::two_qubit(GateKind::Swap, 0, n - 1),
                GateRecord::single(
                    GateKind::Unitary(SingleQubitGate::phase(PI / 3.0)),
                    n / 2,
                ),
            ];
            for gate in &gates {
                let a = apply_via_matrix(&amps, n, gate);
                let b = apply_via_contraction(&amps, n, gate);
                let diff = a
                    .iter()
                    .zip(&b)
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                assert!(diff < 1e-13, "routes disagree on {gate:?} at n={n}: {diff}");
            }
        }
    }

    #[test]
    fn unitarity_preserved_per_gate() {
        let n = 5;
        let mut s = DenseState::basis_state(n, 7).unwrap();
        for gate in [
            h(2),
            GateRecord::single(GateKind::Y, 4),
            GateRecord::controlled(GateKind::CPhase(1.234), 0, 3),
            GateRecord::two_qubit(GateKind::Swap, 1, 4),
        ] {
            s = oracle_apply(&s, &gate).unwrap();
            assert!((s.norm_sq() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn compare_states_reports_max_abs_diff() {
        let a = DenseState::zero_state(3).unwrap();
        let mut b = a.clone();
        assert_eq!(compare_dense(&a, &b).unwrap(), 0.0);
        b.amps[5] += Complex64::new(1e-13, 0.0);
        let d = compare_dense(&a, &b).unwrap();
        assert!((d - 1e-13).abs() < 1e-25);

        // A fresh simulator state equals the oracle's zero state exactly.
        let sim = crate::state::StateVector::new(3, crate::numa::AllocPolicy::Default).unwrap();
        assert_eq!(compare_states(&sim, &a).unwrap(), 0.0);
        let mismatched = DenseState::zero_state(4).unwrap();
        assert!(compare_states(&sim, &mismatched).is_err());
    }

    #[test]
    fn size_guard() {
        assert!(DenseState::zero_state(15).is_err());
        assert!(DenseState::zero_state(0).is_err());
    }
}
