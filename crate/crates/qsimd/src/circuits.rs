//! Circuit construction and execution: the QFT family (recursive, iterative,
//! cache-blocked) and layered random circuits, plus a line-oriented text
//! format for replay and fixtures.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernels::{self, KernelConfig, KernelVariant, SingleQubitGate};
use crate::scheduler::Executor;
use crate::state::{ComplexAmp, StateVector};

/// One gate in a circuit.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    H,
    X,
    Y,
    T,
    Phase(f64),
    Cnot,
    CPhase(f64),
    Swap,
    Unitary(SingleQubitGate),
}

impl GateKind {
    fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::T => "T",
            GateKind::Phase(_) => "PHASE",
            GateKind::Cnot => "CNOT",
            GateKind::CPhase(_) => "CPHASE",
            GateKind::Swap => "SWAP",
            GateKind::Unitary(_) => "U",
        }
    }

    fn wants_control(&self) -> bool {
        matches!(self, GateKind::Cnot | GateKind::CPhase(_) | GateKind::Swap)
    }
}

/// A gate applied to concrete qubits. For SWAP the second qubit rides in
/// `control`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateRecord {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
}

impl GateRecord {
    pub fn single(kind: GateKind, target: usize) -> Self {
        GateRecord {
            kind,
            target,
            control: None,
        }
    }

    pub fn controlled(kind: GateKind, target: usize, control: usize) -> Self {
        GateRecord {
            kind,
            target,
            control: Some(control),
        }
    }

    pub fn two_qubit(kind: GateKind, q1: usize, q2: usize) -> Self {
        GateRecord {
            kind,
            target: q1,
            control: Some(q2),
        }
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if self.target >= num_qubits {
            return Err(Error::TargetOutOfRange {
                target: self.target,
                num_qubits,
            });
        }
        match (self.kind.wants_control(), self.control) {
            (true, None) => {
                return Err(Error::InvalidArgument(format!(
                    "{} needs two qubits",
                    self.kind.name()
                )))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidArgument(format!(
                    "{} takes no control",
                    self.kind.name()
                )))
            }
            _ => {}
        }
        if let Some(c) = self.control {
            if c >= num_qubits {
                return Err(Error::TargetOutOfRange {
                    target: c,
                    num_qubits,
                });
            }
            if c == self.target {
                return Err(Error::ControlEqualsTarget(c));
            }
        }
        Ok(())
    }

    /// The inverse gate.
    pub fn inverse(&self) -> GateRecord {
        let kind = match &self.kind {
            GateKind::H | GateKind::X | GateKind::Y | GateKind::Cnot | GateKind::Swap => {
                self.kind.clone()
            }
            GateKind::T => GateKind::Phase(-std::f64::consts::FRAC_PI_4),
            GateKind::Phase(t) => GateKind::Phase(-t),
            GateKind::CPhase(t) => GateKind::CPhase(-t),
            GateKind::Unitary(m) => GateKind::Unitary(SingleQubitGate::new(
                ComplexAmp::new(m.m00.re, -m.m00.im),
                ComplexAmp::new(m.m10.re, -m.m10.im),
                ComplexAmp::new(m.m01.re, -m.m01.im),
                ComplexAmp::new(m.m11.re, -m.m11.im),
            )),
        };
        GateRecord {
            kind,
            target: self.target,
            control: self.control,
        }
    }
}

/// An ordered gate list over a fixed register width.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<GateRecord>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for gate in &self.gates {
            gate.validate(self.num_qubits)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Gates inverted and reversed; running it after the original restores
    /// the input state.
    pub fn inverted(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(GateRecord::inverse).collect(),
        }
    }

    /// One gate per line: `KIND target [control] [angle]`; U carries its four
    /// matrix entries as re/im pairs instead of an angle.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(g.kind.name());
            out.push(' ');
            out.push_str(&g.target.to_string());
            if let Some(c) = g.control {
                out.push(' ');
                out.push_str(&c.to_string());
            }
            match &g.kind {
                GateKind::Phase(t) | GateKind::CPhase(t) => {
                    out.push(' ');
                    out.push_str(&format!("{t:?}"));
                }
                GateKind::Unitary(m) => {
                    for v in [
                        m.m00.re, m.m00.im, m.m01.re, m.m01.im, m.m10.re, m.m10.im, m.m11.re,
                        m.m11.im,
                    ] {
                        out.push(' ');
                        out.push_str(&format!("{v:?}"));
                    }
                }
                _ => {}
            }
            out.push('\n');
        }
        out
    }

    /// Parse the text format back. Blank lines and `#` comments are skipped.
    pub fn from_text(text: &str, num_qubits: usize) -> Result<Circuit> {
        let mut circuit = Circuit::new(num_qubits);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse().map_err(|_| Error::CircuitParse {
                    line: lineno + 1,
                    reason: format!("bad number {s:?}"),
                })
            };
            let parse_idx = |s: &str| -> Result<usize> {
                s.parse().map_err(|_| Error::CircuitParse {
                    line: lineno + 1,
                    reason: format!("bad qubit index {s:?}"),
                })
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let expect = |n: usize| -> Result<()> {
                if fields.len() != n {
                    return Err(Error::CircuitParse {
                        line: lineno + 1,
                        reason: format!("expected {n} fields, got {}", fields.len()),
                    });
                }
                Ok(())
            };
            let record = match fields[0] {
                "H" | "X" | "Y" | "T" => {
                    expect(2)?;
                    let kind = match fields[0] {
                        "H" => GateKind::H,
                        "X" => GateKind::X,
                        "Y" => GateKind::Y,
                        _ => GateKind::T,
                    };
                    GateRecord::single(kind, parse_idx(fields[1])?)
                }
                "PHASE" => {
                    expect(3)?;
                    GateRecord::single(GateKind::Phase(parse(fields[2])?), parse_idx(fields[1])?)
                }
                "CNOT" => {
                    expect(3)?;
                    GateRecord::controlled(GateKind::Cnot, parse_idx(fields[1])?, parse_idx(fields[2])?)
                }
                "CPHASE" => {
                    expect(4)?;
                    GateRecord::controlled(
                        GateKind::CPhase(parse(fields[3])?),
                        parse_idx(fields[1])?,
                        parse_idx(fields[2])?,
                    )
                }
                "SWAP" => {
                    expect(3)?;
                    GateRecord::two_qubit(GateKind::Swap, parse_idx(fields[1])?, parse_idx(fields[2])?)
                }
                "U" => {
                    expect(10)?;
                    let v: Vec<f64> = fields[2..10]
                        .iter()
                        .map(|s| parse(s))
                        .collect::<Result<_>>()?;
                    GateRecord::single(
                        GateKind::Unitary(SingleQubitGate::new(
                            ComplexAmp::new(v[0], v[1]),
                            ComplexAmp::new(v[2], v[3]),
                            ComplexAmp::new(v[4], v[5]),
                            ComplexAmp::new(v[6], v[7]),
                        )),
                        parse_idx(fields[1])?,
                    )
                }
                other => {
                    return Err(Error::CircuitParse {
                        line: lineno + 1,
                        reason: format!("unknown gate {other:?}"),
                    })
                }
            };
            record.validate(num_qubits)?;
            circuit.gates.push(record);
        }
        Ok(circuit)
    }
}

/// Apply every gate of `circuit` to `state`, in order.
pub fn run_circuit(
    state: &mut StateVector,
    circuit: &Circuit,
    variant: KernelVariant,
    cfg: &KernelConfig,
    exec: &Executor,
) -> Result<()> {
    if circuit.num_qubits > state.num_qubits() {
        return Err(Error::SizeMismatch(circuit.num_qubits, state.num_qubits()));
    }
    for gate in &circuit.gates {
        apply_gate(state, gate, variant, cfg, exec)?;
    }
    Ok(())
}

/// Apply one gate record.
pub fn apply_gate(
    state: &mut StateVector,
    gate: &GateRecord,
    variant: KernelVariant,
    cfg: &KernelConfig,
    exec: &Executor,
) -> Result<()> {
    match (&gate.kind, gate.control) {
        (GateKind::H, None) => kernels::apply_hadamard(state, gate.target, variant, cfg, exec),
        (GateKind::X, None) => kernels::apply_pauli_x(state, gate.target, variant, cfg, exec),
        (GateKind::Y, None) => kernels::apply_pauli_y(state, gate.target, variant, cfg, exec),
        (GateKind::T, None) => kernels::apply_single_qubit_unitary(
            state,
            gate.target,
            &SingleQubitGate::t_gate(),
            variant,
            cfg,
            exec,
        ),
        (GateKind::Phase(t), None) => kernels::apply_single_qubit_unitary(
            state,
            gate.target,
            &SingleQubitGate::phase(*t),
            variant,
            cfg,
            exec,
        ),
        (GateKind::Unitary(m), None) => {
            kernels::apply_single_qubit_unitary(state, gate.target, m, variant, cfg, exec)
        }
        (GateKind::Cnot, Some(control)) => {
            kernels::apply_controlled_not(state, control, gate.target, variant, cfg, exec)
        }
        (GateKind::CPhase(t), Some(control)) => {
            kernels::apply_controlled_phase(state, control, gate.target, *t, variant, cfg, exec)
        }
        (GateKind::Swap, Some(q2)) => {
            kernels::apply_swap(state, gate.target, q2, variant, cfg, exec)
        }
        _ => Err(Error::InvalidArgument(format!(
            "malformed gate record {gate:?}"
        ))),
    }
}

// ---------------------------------------------------------------------------
// QFT
// ---------------------------------------------------------------------------

/// Construction strategy for the QFT gate sequence. All variants emit the
/// same unitary: n Hadamards, n(n-1)/2 controlled phases and floor(n/2)
/// swaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QftVariant {
    /// Divide and conquer: gates for the top qubit, then recurse on the rest.
    Recursive,
    /// The same sweep written as nested loops.
    Iterative,
    /// Qubits processed in groups of `block_factor`, with the final reversal
    /// swaps hoisted to each group's start so a group's H and phase targets
    /// stay inside one contiguous index window.
    Blocked(usize),
}

fn cphase_angle(distance: usize) -> f64 {
    std::f64::consts::PI / (1u64 << distance) as f64
}

/// Standard most-significant-first sweep; `emit_qubit` pushes H(k) then the
/// controlled phases from lower qubits.
fn emit_qubit_gates(gates: &mut Vec<GateRecord>, k: usize, descending_controls: bool) {
    gates.push(GateRecord::single(GateKind::H, k));
    let controls: Box<dyn Iterator<Item = usize>> = if descending_controls {
        Box::new((0..k).rev())
    } else {
        Box::new(0..k)
    };
    for j in controls {
        gates.push(GateRecord::controlled(
            GateKind::CPhase(cphase_angle(k - j)),
            k,
            j,
        ));
    }
}

fn qft_recursive(gates: &mut Vec<GateRecord>, k: usize) {
    emit_qubit_gates(gates, k, true);
    if k > 0 {
        qft_recursive(gates, k - 1);
    }
}

/// Build the QFT circuit for `n` qubits under the chosen construction.
pub fn build_qft(num_qubits: usize, variant: QftVariant) -> Circuit {
    let n = num_qubits;
    let mut gates = Vec::with_capacity(n + n * (n - 1) / 2 + n / 2);
    match variant {
        QftVariant::Recursive => {
            qft_recursive(&mut gates, n - 1);
            for q in 0..n / 2 {
                gates.push(GateRecord::two_qubit(GateKind::Swap, q, n - 1 - q));
            }
        }
        QftVariant::Iterative => {
            for k in (0..n).rev() {
                emit_qubit_gates(&mut gates, k, false);
            }
            for q in 0..n / 2 {
                gates.push(GateRecord::two_qubit(GateKind::Swap, q, n - 1 - q));
            }
        }
        QftVariant::Blocked(block_factor) => {
            let b = block_factor.max(1);
            // phys[q] = current position of logical qubit q under the swaps
            // hoisted so far.
            let mut phys: Vec<usize> = (0..n).collect();
            let mut hi = n as isize - 1;
            while hi >= 0 {
                let lo = (hi - b as isize + 1).max(0) as usize;
                let hi_u = hi as usize;
                // Hoist the reversal swaps whose upper endpoint sits in this
                // group; every group member then occupies its final position.
                for q in (lo..=hi_u).rev() {
                    let partner = n - 1 - q;
                    if q > partner && phys[q] == q {
                        gates.push(GateRecord::two_qubit(GateKind::Swap, q, partner));
                        phys.swap(q, partner);
                    }
                }
                for q in (lo..=hi_u).rev() {
                    gates.push(GateRecord::single(GateKind::H, phys[q]));
                    for j in (0..q).rev() {
                        gates.push(GateRecord::controlled(
                            GateKind::CPhase(cphase_angle(q - j)),
                            phys[q],
                            phys[j],
                        ));
                    }
                }
                hi = lo as isize - 1;
            }
        }
    }
    Circuit { num_qubits: n, gates }
}

/// Apply the QFT to `state` in place.
pub fn run_qft(
    state: &mut StateVector,
    variant: QftVariant,
    kernel: KernelVariant,
    cfg: &KernelConfig,
    exec: &Executor,
) -> Result<()> {
    let circuit = build_qft(state.num_qubits(), variant);
    run_circuit(state, &circuit, kernel, cfg, exec)
}

// ---------------------------------------------------------------------------
// Random quantum circuits
// ---------------------------------------------------------------------------

/// Parameters of the layered random-circuit family: per layer, one random
/// single-qubit gate on every qubit, then the entangling CNOT ring
/// `i -> (i+1) mod n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RqcSpec {
    pub num_qubits: usize,
    pub layers: usize,
    pub seed: u64,
    pub gate_set: Vec<GateKind>,
}

impl RqcSpec {
    pub fn new(num_qubits: usize, layers: usize, seed: u64) -> Self {
        RqcSpec {
            num_qubits,
            layers,
            seed,
            gate_set: vec![GateKind::H, GateKind::X, GateKind::Y, GateKind::T],
        }
    }
}

/// Deterministic circuit generation: the same spec yields the same gate list
/// on every platform (ChaCha8 stream seeded from the 64-bit seed).
pub fn build_rqc(spec: &RqcSpec) -> Result<Circuit> {
    if spec.num_qubits < 2 {
        return Err(Error::InvalidArgument(
            "random circuits need at least 2 qubits for the CNOT ring".into(),
        ));
    }
    if spec.layers == 0 || spec.gate_set.is_empty() {
        return Err(Error::InvalidArgument(
            "random circuits need layers >= 1 and a non-empty gate set".into(),
        ));
    }
    let n = spec.num_qubits;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut gates = Vec::with_capacity(spec.layers * 2 * n);
    for _ in 0..spec.layers {
        for q in 0..n {
            // Multiply-shift keeps the draw exact for power-of-two set sizes
            // and platform-independent always.
            let pick = ((rng.next_u64() as u128 * spec.gate_set.len() as u128) >> 64) as usize;
            gates.push(GateRecord::single(spec.gate_set[pick].clone(), q));
        }
        for i in 0..n {
            gates.push(GateRecord::controlled(GateKind::Cnot, (i + 1) % n, i));
        }
    }
    Ok(Circuit { num_qubits: n, gates })
}
