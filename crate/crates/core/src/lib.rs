//! Automata with left and right interfaces over complex vector spaces.
//!
//! An automaton carries one linear map per pair of interface signals.
//! Automata compose in parallel (tensor product of state spaces, product
//! of interfaces) and in series (tensor product of state spaces,
//! synchronised on the shared interface). Classical components are 0/1
//! matrices over named basis states; quantum components use unitaries and
//! orthogonal projections.
//!
//! The [`teleport`] module assembles a quantum teleportation network from
//! three qubits and two classical controllers, and [`dsl`] provides a small
//! text language for writing such networks down.

pub mod algebra;
pub mod automaton;
pub mod cli;
pub mod dsl;
pub mod json;
pub mod linalg;
pub mod teleport;

pub use algebra::{
    check_frobenius, constant, from_relation, parallel, relation_series_count, series,
    AlgebraError, ConstantKind, FrobeniusSides, Relation,
};
pub use automaton::{Alphabet, AutomatonError, Behaviour, CAutomaton, Label};
pub use linalg::{ComplexMatrix, Scalar, StateVector, DEFAULT_TOLERANCE};
pub use teleport::{
    build_component, build_tp, initial_state, reference_trace, run_protocol, Component,
    CorrectionSign, TeleportInput, Teleporter, TraceReport,
};
