//! JSON forms of matrices, vectors, automata, and protocol traces.
//!
//! * matrix: array of rows; each entry is a real number or `[re, im]`;
//! * automaton: `{ "left", "right", "dim", "basis"?, "transitions": [{ "l", "r", "m" }] }`,
//!   labels as strings or arrays of strings, omitted pairs zero;
//! * trace: `{ "factor_dims", "steps": [{ "step", "state": [[re, im], …], "norm2" }] }`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automaton::{Alphabet, AlphabetError, AutomatonError, CAutomaton, Label};
use crate::linalg::{ComplexMatrix, LinalgError, Scalar, StateVector};
use crate::teleport::TraceReport;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Syntax(#[from] serde_json::Error),

    #[error("invalid matrix: {0}")]
    Matrix(#[from] LinalgError),

    #[error("invalid alphabet: {0}")]
    Alphabet(#[from] AlphabetError),

    #[error("invalid automaton: {0}")]
    Automaton(#[from] AutomatonError),

    #[error("a label needs at least one component")]
    EmptyLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Scalar> for EntryJson {
    fn from(z: Scalar) -> Self {
        if z.im == 0.0 {
            EntryJson::Real(z.re)
        } else {
            EntryJson::Complex([z.re, z.im])
        }
    }
}

impl From<EntryJson> for Scalar {
    fn from(e: EntryJson) -> Self {
        match e {
            EntryJson::Real(re) => Scalar::new(re, 0.0),
            EntryJson::Complex([re, im]) => Scalar::new(re, im),
        }
    }
}

pub type MatrixJson = Vec<Vec<EntryJson>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.rows()).map(|i| m.row(i).iter().map(|&z| z.into()).collect()).collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix, LinalgError> {
    ComplexMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&e| e.into()).collect()).collect())
}

/// A state vector given as a flat array of entries.
pub fn vector_from_json(text: &str) -> Result<StateVector, JsonError> {
    let entries: Vec<EntryJson> = serde_json::from_str(text)?;
    Ok(StateVector::new(entries.into_iter().map(Scalar::from).collect())?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelJson {
    Atom(String),
    Tuple(Vec<String>),
}

impl From<&Label> for LabelJson {
    fn from(l: &Label) -> Self {
        match l.components() {
            [single] => LabelJson::Atom(single.clone()),
            many => LabelJson::Tuple(many.to_vec()),
        }
    }
}

impl TryFrom<&LabelJson> for Label {
    type Error = JsonError;

    fn try_from(l: &LabelJson) -> Result<Self, JsonError> {
        match l {
            LabelJson::Atom(s) => Ok(Label::atom(s.clone())),
            LabelJson::Tuple(v) if v.is_empty() => Err(JsonError::EmptyLabel),
            LabelJson::Tuple(v) => Ok(Label::tuple(v.iter().cloned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionJson {
    pub l: LabelJson,
    pub r: LabelJson,
    pub m: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutomatonJson {
    pub left: Vec<LabelJson>,
    pub right: Vec<LabelJson>,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    pub transitions: Vec<TransitionJson>,
}

impl From<&CAutomaton> for AutomatonJson {
    fn from(q: &CAutomaton) -> Self {
        let transitions = q
            .transitions()
            .filter(|(_, _, m)| !m.is_exact_zero())
            .map(|(l, r, m)| TransitionJson { l: l.into(), r: r.into(), m: matrix_to_json(m) })
            .collect();
        Self {
            left: q.left().iter().map(LabelJson::from).collect(),
            right: q.right().iter().map(LabelJson::from).collect(),
            dim: q.dim(),
            basis: q.basis_names().map(<[String]>::to_vec),
            transitions,
        }
    }
}

fn alphabet_from_json(labels: &[LabelJson]) -> Result<Alphabet, JsonError> {
    let labels = labels.iter().map(Label::try_from).collect::<Result<Vec<_>, _>>()?;
    Ok(Alphabet::new(labels)?)
}

impl TryFrom<&AutomatonJson> for CAutomaton {
    type Error = JsonError;

    fn try_from(j: &AutomatonJson) -> Result<Self, JsonError> {
        let left = alphabet_from_json(&j.left)?;
        let right = alphabet_from_json(&j.right)?;
        let mut entries = Vec::with_capacity(j.transitions.len());
        for t in &j.transitions {
            entries.push((Label::try_from(&t.l)?, Label::try_from(&t.r)?, matrix_from_json(&t.m)?));
        }
        Ok(CAutomaton::new(left, right, j.dim, entries, j.basis.clone())?)
    }
}

pub fn automaton_to_string(q: &CAutomaton) -> String {
    serde_json::to_string_pretty(&AutomatonJson::from(q)).expect("automaton serializes")
}

pub fn automaton_from_str(text: &str) -> Result<CAutomaton, JsonError> {
    let j: AutomatonJson = serde_json::from_str(text)?;
    CAutomaton::try_from(&j)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepJson {
    pub step: usize,
    pub state: Vec<[f64; 2]>,
    pub norm2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceJson {
    pub factor_dims: Vec<usize>,
    pub steps: Vec<StepJson>,
}

impl From<&TraceReport> for TraceJson {
    fn from(t: &TraceReport) -> Self {
        Self {
            factor_dims: t.factor_dims.clone(),
            steps: t
                .steps
                .iter()
                .enumerate()
                .map(|(step, s)| StepJson {
                    step,
                    state: s.entries().iter().map(|z| [z.re, z.im]).collect(),
                    norm2: s.norm_sqr(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&TraceJson> for TraceReport {
    type Error = JsonError;

    fn try_from(j: &TraceJson) -> Result<Self, JsonError> {
        let steps = j
            .steps
            .iter()
            .map(|s| StateVector::new(s.state.iter().map(|&[re, im]| Scalar::new(re, im)).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TraceReport { factor_dims: j.factor_dims.clone(), steps })
    }
}

pub fn trace_to_string(t: &TraceReport) -> String {
    serde_json::to_string_pretty(&TraceJson::from(t)).expect("trace serializes")
}

pub fn trace_from_str(text: &str) -> Result<TraceReport, JsonError> {
    let j: TraceJson = serde_json::from_str(text)?;
    TraceReport::try_from(&j)
}
