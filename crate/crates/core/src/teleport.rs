//! The teleportation network: three qubit automata, the classical sender
//! and receiver, their composite, and a hand-built reference trace.
//!
//! The composite is
//!
//! ```text
//! TP = Alice ; (id(C) * ((Q1 * id(A22)) ; Q2)) ; (id(C) * Q3) ; Bob
//! ```
//!
//! where `C = {eps, 00, 01, 10, 11}` carries Alice's two classical bits to
//! Bob. Its state space factors as
//! `Alice(7) ⊗ wire(1) ⊗ Q1(2) ⊗ wire(1) ⊗ Q2(2) ⊗ wire(1) ⊗ Q3(2) ⊗ Bob(2)`.

use std::f64::consts::FRAC_1_SQRT_2;

use thiserror::Error;

use crate::algebra::{constant, parallel, series, ConstantKind};
use crate::automaton::{CAutomaton, Label};
use crate::linalg::{mixed_radix_index, ComplexMatrix, Scalar, StateVector, ONE};

/// Dimensions of the tensor factors of the composite state space.
pub const FACTOR_DIMS: [usize; 8] = [7, 1, 2, 1, 2, 1, 2, 2];

/// Total dimension of the composite state space.
pub const TP_DIM: usize = 112;

pub const ALICE_STATES: [&str; 7] = ["x1", "x2", "x3", "x00", "x01", "x10", "x11"];
pub const BOB_STATES: [&str; 2] = ["y1", "y2"];

/// The four two-bit messages, in alphabet order.
pub const MESSAGES: [&str; 4] = ["00", "01", "10", "11"];

/// Interface alphabets of the network.
pub mod alphabets {
    use crate::automaton::Alphabet;

    /// `{eps, c, h, m0, m1}`: Q1's left interface.
    pub fn a1() -> Alphabet {
        Alphabet::atoms(&["eps", "c", "h", "m0", "m1"]).expect("valid")
    }

    /// `{eps, not}`: Q1's right interface.
    pub fn b1() -> Alphabet {
        Alphabet::atoms(&["eps", "not"]).expect("valid")
    }

    /// `{eps, m0, m1}`: measurement signals for Q2.
    pub fn a22() -> Alphabet {
        Alphabet::atoms(&["eps", "m0", "m1"]).expect("valid")
    }

    /// `B1 × A22`: Q2's left interface.
    pub fn a2() -> Alphabet {
        b1().product(&a22())
    }

    /// `{eps, 00, 01, 10, 11}`: Q3's right interface and the classical wire.
    pub fn message() -> Alphabet {
        Alphabet::atoms(&["eps", "00", "01", "10", "11"]).expect("valid")
    }

    /// `C × A1 × A22`: Alice's right interface.
    pub fn alice_right() -> Alphabet {
        message().product(&a1()).product(&a22())
    }

    /// `C × C`: Bob's left interface.
    pub fn bob_left() -> Alphabet {
        message().product(&message())
    }
}

/// The five named components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Q1,
    Q2,
    Q3,
    Alice,
    Bob,
}

impl Component {
    pub const ALL: [Component; 5] =
        [Component::Q1, Component::Q2, Component::Q3, Component::Alice, Component::Bob];

    pub fn name(self) -> &'static str {
        match self {
            Component::Q1 => "Q1",
            Component::Q2 => "Q2",
            Component::Q3 => "Q3",
            Component::Alice => "Alice",
            Component::Bob => "Bob",
        }
    }
}

/// Which matrix Q3 uses for the `11` correction.
///
/// `AsPrinted` is `[[0,-1],[1,0]]`, which leaves a global phase of -1 on
/// the `x11` branch of the final state. `MatchTrace` uses `[[0,1],[-1,0]]`
/// so that every branch ends in exactly `α0 + β1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorrectionSign {
    #[default]
    AsPrinted,
    MatchTrace,
}

impl CorrectionSign {
    /// Phase picked up by the `x11` branch.
    pub fn branch_phase(self) -> f64 {
        match self {
            CorrectionSign::AsPrinted => -1.0,
            CorrectionSign::MatchTrace => 1.0,
        }
    }
}

fn real(rows: &[&[f64]]) -> ComplexMatrix {
    ComplexMatrix::real(rows)
}

fn p0() -> ComplexMatrix {
    real(&[&[1.0, 0.0], &[0.0, 0.0]])
}

fn p1() -> ComplexMatrix {
    real(&[&[0.0, 0.0], &[0.0, 1.0]])
}

fn hadamard() -> ComplexMatrix {
    let h = FRAC_1_SQRT_2;
    real(&[&[h, h], &[h, -h]])
}

fn pauli_x() -> ComplexMatrix {
    real(&[&[0.0, 1.0], &[1.0, 0.0]])
}

fn atom(s: &str) -> Label {
    Label::atom(s)
}

fn tuple(parts: &[&str]) -> Label {
    Label::tuple(parts.iter().copied())
}

pub fn build_component(component: Component, sign: CorrectionSign) -> CAutomaton {
    match component {
        Component::Q1 => q1(),
        Component::Q2 => q2(),
        Component::Q3 => q3(sign),
        Component::Alice => alice(),
        Component::Bob => bob(),
    }
}

fn q1() -> CAutomaton {
    let entries = [
        (atom("eps"), atom("eps"), ComplexMatrix::identity(2)),
        (atom("c"), atom("not"), p1()),
        (atom("c"), atom("eps"), p0()),
        (atom("h"), atom("eps"), hadamard()),
        (atom("m0"), atom("eps"), p0()),
        (atom("m1"), atom("eps"), p1()),
    ];
    CAutomaton::new(alphabets::a1(), alphabets::b1(), 2, entries, None).expect("Q1 is well formed")
}

fn q2() -> CAutomaton {
    let eps = atom("eps");
    let entries = [
        (tuple(&["eps", "eps"]), eps.clone(), ComplexMatrix::identity(2)),
        (tuple(&["not", "eps"]), eps.clone(), pauli_x()),
        (tuple(&["eps", "m0"]), eps.clone(), p0()),
        (tuple(&["eps", "m1"]), eps, p1()),
    ];
    CAutomaton::new(alphabets::a2(), crate::automaton::Alphabet::unit(), 2, entries, None)
        .expect("Q2 is well formed")
}

fn q3(sign: CorrectionSign) -> CAutomaton {
    let eps = atom("eps");
    let eleven = match sign {
        CorrectionSign::AsPrinted => real(&[&[0.0, -1.0], &[1.0, 0.0]]),
        CorrectionSign::MatchTrace => real(&[&[0.0, 1.0], &[-1.0, 0.0]]),
    };
    let entries = [
        (eps.clone(), atom("eps"), ComplexMatrix::identity(2)),
        (eps.clone(), atom("00"), ComplexMatrix::identity(2)),
        (eps.clone(), atom("10"), real(&[&[1.0, 0.0], &[0.0, -1.0]])),
        (eps.clone(), atom("01"), pauli_x()),
        (eps, atom("11"), eleven),
    ];
    CAutomaton::new(crate::automaton::Alphabet::unit(), alphabets::message(), 2, entries, None)
        .expect("Q3 is well formed")
}

fn alice_index(name: &str) -> usize {
    ALICE_STATES.iter().position(|&s| s == name).expect("known Alice state")
}

/// Alice's transitions, all with left label `eps`:
///
/// * `x1 → x2` on `(eps, c, eps)`: request the controlled-not;
/// * `x2 → x3` on `(eps, h, eps)`: request the Hadamard;
/// * `x3 → xij` on `(eps, mi, mj)`: the joint measurement with outcome `ij`;
/// * `xij → xij` on `(ij, eps, eps)`: send the outcome to Bob.
///
/// There are no idle loops, so Alice stops once the message is sent.
fn alice() -> CAutomaton {
    let n = ALICE_STATES.len();
    let eps = atom("eps");
    let edge = |from: &str, to: &str| ComplexMatrix::indicator(n, &[(alice_index(to), alice_index(from))]);
    let mut entries = vec![
        (eps.clone(), tuple(&["eps", "c", "eps"]), edge("x1", "x2")),
        (eps.clone(), tuple(&["eps", "h", "eps"]), edge("x2", "x3")),
    ];
    for msg in MESSAGES {
        let target = format!("x{msg}");
        let (i, j) = (&msg[..1], &msg[1..]);
        let (mi, mj) = (format!("m{i}"), format!("m{j}"));
        entries.push((eps.clone(), tuple(&["eps", &mi, &mj]), edge("x3", &target)));
        entries.push((eps.clone(), tuple(&[msg, "eps", "eps"]), edge(&target, &target)));
    }
    let names = ALICE_STATES.iter().map(|s| s.to_string()).collect();
    CAutomaton::new(
        crate::automaton::Alphabet::unit(),
        alphabets::alice_right(),
        n,
        entries,
        Some(names),
    )
    .expect("Alice is well formed")
}

/// Bob idles at `y1` and moves to `y2` on receiving a matching pair of
/// message letters. Nothing leaves `y2`.
fn bob() -> CAutomaton {
    let eps = atom("eps");
    let mut entries = vec![(tuple(&["eps", "eps"]), eps.clone(), ComplexMatrix::indicator(2, &[(0, 0)]))];
    for msg in MESSAGES {
        entries.push((tuple(&[msg, msg]), eps.clone(), ComplexMatrix::indicator(2, &[(1, 0)])));
    }
    let names = BOB_STATES.iter().map(|s| s.to_string()).collect();
    CAutomaton::new(alphabets::bob_left(), crate::automaton::Alphabet::unit(), 2, entries, Some(names))
        .expect("Bob is well formed")
}

/// `(Q1 * id(A22)) ; Q2`: the two-qubit block Alice drives.
pub fn entangling_block() -> CAutomaton {
    let id22 = constant(ConstantKind::Identity, &alphabets::a22(), None).expect("identity");
    series(&parallel(&q1(), &id22), &q2()).expect("Q1 * id(A22) feeds Q2")
}

/// The closed teleportation network.
pub fn build_tp(sign: CorrectionSign) -> CAutomaton {
    let wire = constant(ConstantKind::Identity, &alphabets::message(), None).expect("identity");
    let upper = series(&alice(), &parallel(&wire, &entangling_block()))
        .expect("Alice feeds the entangling block");
    let middle = series(&upper, &parallel(&wire, &q3(sign))).expect("wire feeds Q3");
    series(&middle, &bob()).expect("Q3 and the wire feed Bob")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TeleportError {
    #[error("input qubit is not normalized: |alpha|^2 + |beta|^2 = {0}")]
    NotNormalized(f64),
}

/// The qubit `α0 + β1` to be teleported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleportInput {
    alpha: Scalar,
    beta: Scalar,
}

impl TeleportInput {
    pub const NORM_TOLERANCE: f64 = 1e-9;

    pub fn new(alpha: Scalar, beta: Scalar) -> Result<Self, TeleportError> {
        let norm2 = alpha.norm_sqr() + beta.norm_sqr();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(TeleportError::NotNormalized(norm2));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> Scalar {
        self.alpha
    }

    pub fn beta(&self) -> Scalar {
        self.beta
    }
}

/// Flat index of a basis element of the composite state space. Wire
/// factors are one-dimensional and always contribute digit 0.
pub fn tp_index(alice: usize, q1: usize, q2: usize, q3: usize, bob: usize) -> usize {
    mixed_radix_index(&[alice, 0, q1, 0, q2, 0, q3, bob], &FACTOR_DIMS)
}

/// `x1 ⊗ (α0 + β1) ⊗ (00 + 11)/√2 ⊗ y1`.
pub fn initial_state(input: &TeleportInput) -> StateVector {
    let x1 = StateVector::basis(ALICE_STATES.len(), 0);
    let wire = StateVector::basis(1, 0);
    let q1 = StateVector::new(vec![input.alpha, input.beta]).expect("finite amplitudes");
    let bell = StateVector::real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]);
    let y1 = StateVector::basis(BOB_STATES.len(), 0);
    // Q1, the Q2 wire, and Q2 ⊗ wire ⊗ Q3 interleave with one-dimensional
    // wires, which the Kronecker product absorbs.
    x1.kron(&wire).kron(&q1).kron(&wire).kron(&bell).kron(&y1)
}

/// The states of a run of the closed network.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceReport {
    pub factor_dims: Vec<usize>,
    pub steps: Vec<StateVector>,
}

impl TraceReport {
    pub fn final_state(&self) -> &StateVector {
        self.steps.last().expect("a trace has its initial state")
    }
}

/// Iterates the closed transformation of the network.
#[derive(Debug, Clone)]
pub struct Teleporter {
    theta: ComplexMatrix,
    sign: CorrectionSign,
}

impl Teleporter {
    pub fn new(sign: CorrectionSign) -> Self {
        let theta = build_tp(sign).closed_transform().expect("TP is closed").clone();
        Self { theta, sign }
    }

    pub fn theta(&self) -> &ComplexMatrix {
        &self.theta
    }

    pub fn sign(&self) -> CorrectionSign {
        self.sign
    }

    pub fn run(&self, input: &TeleportInput, steps: usize) -> TraceReport {
        let mut states = vec![initial_state(input)];
        for _ in 0..steps {
            let next = self.theta.apply(states.last().expect("non-empty")).expect("dimension 112");
            states.push(next);
        }
        TraceReport { factor_dims: FACTOR_DIMS.to_vec(), steps: states }
    }
}

pub fn run_protocol(input: &TeleportInput, steps: usize, sign: CorrectionSign) -> TraceReport {
    Teleporter::new(sign).run(input, steps)
}

/// Accumulates `coef · alice ⊗ q1 q2 q3 ⊗ bob` terms.
struct Terms(StateVector);

impl Terms {
    fn new() -> Self {
        Self(StateVector::zeros(TP_DIM))
    }

    fn add(&mut self, coef: Scalar, alice: &str, qubits: [usize; 3], bob: usize) -> &mut Self {
        let [a, b, c] = qubits;
        self.0.add_at(tp_index(alice_index(alice), a, b, c, bob), coef);
        self
    }

    fn done(&mut self) -> StateVector {
        std::mem::replace(&mut self.0, StateVector::zeros(TP_DIM))
    }
}

/// The five states of the four-step protocol, written out term by term
/// rather than computed from the network. `sign` fixes the phase on the
/// `x11` branch of the last state.
pub fn reference_trace(input: &TeleportInput, sign: CorrectionSign) -> TraceReport {
    let (a, b) = (input.alpha, input.beta);
    let r = Scalar::new(FRAC_1_SQRT_2, 0.0);
    let half = Scalar::new(0.5, 0.0);
    let (y1, y2) = (0, 1);
    let mut t = Terms::new();

    // x1 ⊗ (α0 + β1) ⊗ (00 + 11)/√2 ⊗ y1
    let s0 = t
        .add(r * a, "x1", [0, 0, 0], y1)
        .add(r * a, "x1", [0, 1, 1], y1)
        .add(r * b, "x1", [1, 0, 0], y1)
        .add(r * b, "x1", [1, 1, 1], y1)
        .done();

    // x2 ⊗ (α000 + α011 + β110 + β101)/√2 ⊗ y1
    let s1 = t
        .add(r * a, "x2", [0, 0, 0], y1)
        .add(r * a, "x2", [0, 1, 1], y1)
        .add(r * b, "x2", [1, 1, 0], y1)
        .add(r * b, "x2", [1, 0, 1], y1)
        .done();

    // ½ x3 ⊗ (α(000 + 100 + 011 + 111) + β(010 − 110 + 001 − 101)) ⊗ y1
    let s2 = t
        .add(half * a, "x3", [0, 0, 0], y1)
        .add(half * a, "x3", [1, 0, 0], y1)
        .add(half * a, "x3", [0, 1, 1], y1)
        .add(half * a, "x3", [1, 1, 1], y1)
        .add(half * b, "x3", [0, 1, 0], y1)
        .add(-half * b, "x3", [1, 1, 0], y1)
        .add(half * b, "x3", [0, 0, 1], y1)
        .add(-half * b, "x3", [1, 0, 1], y1)
        .done();

    // ½ (x00 ⊗ (α000 + β001) + x01 ⊗ (α011 + β010)
    //    + x10 ⊗ (α100 − β101) + x11 ⊗ (α111 − β110)) ⊗ y1
    let s3 = t
        .add(half * a, "x00", [0, 0, 0], y1)
        .add(half * b, "x00", [0, 0, 1], y1)
        .add(half * a, "x01", [0, 1, 1], y1)
        .add(half * b, "x01", [0, 1, 0], y1)
        .add(half * a, "x10", [1, 0, 0], y1)
        .add(-half * b, "x10", [1, 0, 1], y1)
        .add(half * a, "x11", [1, 1, 1], y1)
        .add(-half * b, "x11", [1, 1, 0], y1)
        .done();

    // ½ (x00 ⊗ 00 + x01 ⊗ 01 + x10 ⊗ 10 + s·x11 ⊗ 11) ⊗ (α0 + β1) ⊗ y2
    let s = half * sign.branch_phase();
    let s4 = t
        .add(half * a, "x00", [0, 0, 0], y2)
        .add(half * b, "x00", [0, 0, 1], y2)
        .add(half * a, "x01", [0, 1, 0], y2)
        .add(half * b, "x01", [0, 1, 1], y2)
        .add(half * a, "x10", [1, 0, 0], y2)
        .add(half * b, "x10", [1, 0, 1], y2)
        .add(s * a, "x11", [1, 1, 0], y2)
        .add(s * b, "x11", [1, 1, 1], y2)
        .done();

    TraceReport { factor_dims: FACTOR_DIMS.to_vec(), steps: vec![s0, s1, s2, s3, s4] }
}

/// Names of the basis elements of each factor, for display.
pub fn factor_names() -> Vec<Vec<String>> {
    let bits = || vec!["0".to_string(), "1".to_string()];
    let wire = || vec!["*".to_string()];
    vec![
        ALICE_STATES.iter().map(|s| s.to_string()).collect(),
        wire(),
        bits(),
        wire(),
        bits(),
        wire(),
        bits(),
        BOB_STATES.iter().map(|s| s.to_string()).collect(),
    ]
}

/// The input qubit `(1, 0)`.
pub fn basis_input() -> TeleportInput {
    TeleportInput::new(ONE, Scalar::new(0.0, 0.0)).expect("normalized")
}
