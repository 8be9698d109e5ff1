//! Two-interface automata over complex vector spaces.
//!
//! An automaton has a left and a right alphabet of interface signals, a
//! state space `C^dim`, and one `dim x dim` matrix per (left, right) label
//! pair. Matrix columns index the source state: entry `(y, x)` is the
//! coefficient of `e_y` in the image of `e_x`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{ComplexMatrix, LinalgError, StateVector};

/// Name of the idle signal.
pub const IDLE: &str = "eps";

/// An interface signal. Product labels are flat tuples of atomic names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Vec<String>);

impl Label {
    pub fn atom(name: impl Into<String>) -> Self {
        Self(vec![name.into()])
    }

    pub fn idle() -> Self {
        Self::atom(IDLE)
    }

    /// A tuple label. Panics on an empty component list.
    pub fn tuple<S: Into<String>>(components: impl IntoIterator<Item = S>) -> Self {
        let components: Vec<String> = components.into_iter().map(Into::into).collect();
        assert!(!components.is_empty(), "a label needs at least one component");
        Self(components)
    }

    pub fn components(&self) -> &[String] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// Flat concatenation `(a..., b...)`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut components = self.0.clone();
        components.extend(other.0.iter().cloned());
        Self(components)
    }

    /// Copy with `name` inserted as component `position`.
    pub fn insert(&self, position: usize, name: &str) -> Self {
        let mut components = self.0.clone();
        components.insert(position, name.to_string());
        Self(components)
    }

    /// Splits off the first `n` components, if `0 < n < arity`.
    pub fn split_at(&self, n: usize) -> Option<(Self, Self)> {
        if n == 0 || n >= self.0.len() {
            return None;
        }
        Some((Self(self.0[..n].to_vec()), Self(self.0[n..].to_vec())))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_slice() {
            [single] => f.write_str(single),
            many => write!(f, "({})", many.join(",")),
        }
    }
}

impl From<&str> for Label {
    fn from(name: &str) -> Self {
        Self::atom(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("an alphabet needs at least one label")]
    Empty,

    #[error("duplicate label {0}")]
    Duplicate(Label),

    #[error("label {label} has {found} components, expected {expected}")]
    MixedArity { label: Label, expected: usize, found: usize },
}

#[derive(Debug)]
struct AlphabetInner {
    labels: Vec<Label>,
    index: HashMap<Label, usize>,
}

/// Ordered set of labels of uniform arity. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Alphabet(Arc<AlphabetInner>);

impl Alphabet {
    pub fn new(labels: Vec<Label>) -> Result<Self, AlphabetError> {
        let expected = labels.first().ok_or(AlphabetError::Empty)?.arity();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.arity() != expected {
                return Err(AlphabetError::MixedArity {
                    label: label.clone(),
                    expected,
                    found: label.arity(),
                });
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(AlphabetError::Duplicate(label.clone()));
            }
        }
        Ok(Self(Arc::new(AlphabetInner { labels, index })))
    }

    /// Alphabet of atomic labels.
    pub fn atoms<S: AsRef<str>>(names: &[S]) -> Result<Self, AlphabetError> {
        Self::new(names.iter().map(|n| Label::atom(n.as_ref())).collect())
    }

    /// The one-point alphabet `{eps}`.
    pub fn unit() -> Self {
        Self::atoms(&[IDLE]).expect("singleton alphabet")
    }

    /// Flattened product, `self` most significant.
    pub fn product(&self, other: &Self) -> Self {
        let labels = self
            .labels()
            .iter()
            .flat_map(|a| other.labels().iter().map(move |b| a.concat(b)))
            .collect();
        Self::new(labels).expect("product of valid alphabets is valid")
    }

    pub fn labels(&self) -> &[Label] {
        &self.0.labels
    }

    pub fn len(&self) -> usize {
        self.0.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.labels.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.0.labels[0].arity()
    }

    pub fn position(&self, label: &Label) -> Option<usize> {
        self.0.index.get(label).copied()
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.0.index.contains_key(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Label> {
        self.0.labels.iter()
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.labels() == other.labels()
    }
}

impl Eq for Alphabet {}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels().iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", labels.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AutomatonError {
    #[error("state dimension must be positive")]
    ZeroDimension,

    #[error("unknown {side} label {label} in pair ({a}, {b})")]
    UnknownLabel { side: Side, label: Label, a: Label, b: Label },

    #[error("unknown {side} label {label}")]
    UnknownSignal { side: Side, label: Label },

    #[error("matrix for ({a}, {b}) is {rows}x{cols}, expected {dim}x{dim}")]
    WrongShape { a: Label, b: Label, rows: usize, cols: usize, dim: usize },

    #[error("duplicate transition for ({a}, {b})")]
    DuplicateKey { a: Label, b: Label },

    #[error("basis has {found} names, expected {dim}")]
    BasisLength { found: usize, dim: usize },

    #[error("duplicate basis name {0}")]
    DuplicateBasisName(String),

    #[error("state has dimension {found}, automaton has dimension {expected}")]
    StateDimension { expected: usize, found: usize },

    #[error("words have different lengths: {left} left labels, {right} right labels")]
    WordLengths { left: usize, right: usize },

    #[error("automaton is not closed: left alphabet has {left} labels, right has {right}")]
    NotClosed { left: usize, right: usize },

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A finite-dimensional complex automaton with left and right interfaces.
#[derive(Debug, Clone)]
pub struct CAutomaton {
    left: Alphabet,
    right: Alphabet,
    dim: usize,
    basis_names: Option<Vec<String>>,
    // Row-major over (left index, right index).
    transitions: Vec<ComplexMatrix>,
}

impl CAutomaton {
    /// Builds an automaton from a partial family of transition matrices.
    /// Label pairs that are not listed get the zero matrix.
    pub fn new(
        left: Alphabet,
        right: Alphabet,
        dim: usize,
        entries: impl IntoIterator<Item = (Label, Label, ComplexMatrix)>,
        basis_names: Option<Vec<String>>,
    ) -> Result<Self, AutomatonError> {
        if dim == 0 {
            return Err(AutomatonError::ZeroDimension);
        }
        if let Some(names) = &basis_names {
            check_basis(names, dim)?;
        }
        let mut slots: Vec<Option<ComplexMatrix>> = vec![None; left.len() * right.len()];
        for (a, b, m) in entries {
            let i = left.position(&a).ok_or_else(|| AutomatonError::UnknownLabel {
                side: Side::Left,
                label: a.clone(),
                a: a.clone(),
                b: b.clone(),
            })?;
            let j = right.position(&b).ok_or_else(|| AutomatonError::UnknownLabel {
                side: Side::Right,
                label: b.clone(),
                a: a.clone(),
                b: b.clone(),
            })?;
            if m.shape() != (dim, dim) {
                return Err(AutomatonError::WrongShape {
                    a,
                    b,
                    rows: m.rows(),
                    cols: m.cols(),
                    dim,
                });
            }
            let slot = &mut slots[i * right.len() + j];
            if slot.is_some() {
                return Err(AutomatonError::DuplicateKey { a, b });
            }
            *slot = Some(m);
        }
        let transitions = slots
            .into_iter()
            .map(|m| m.unwrap_or_else(|| ComplexMatrix::zeros(dim, dim)))
            .collect();
        Ok(Self { left, right, dim, basis_names, transitions })
    }

    /// Builds from a total row-major family; callers guarantee the shapes.
    pub(crate) fn from_family(
        left: Alphabet,
        right: Alphabet,
        dim: usize,
        transitions: Vec<ComplexMatrix>,
        basis_names: Option<Vec<String>>,
    ) -> Self {
        debug_assert_eq!(transitions.len(), left.len() * right.len());
        debug_assert!(transitions.iter().all(|m| m.shape() == (dim, dim)));
        Self { left, right, dim, basis_names, transitions }
    }

    pub fn left(&self) -> &Alphabet {
        &self.left
    }

    pub fn right(&self) -> &Alphabet {
        &self.right
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_names(&self) -> Option<&[String]> {
        self.basis_names.as_deref()
    }

    /// Replaces the basis names. Fails if the length or uniqueness is wrong.
    pub fn with_basis_names(mut self, names: Option<Vec<String>>) -> Result<Self, AutomatonError> {
        if let Some(names) = &names {
            check_basis(names, self.dim)?;
        }
        self.basis_names = names;
        Ok(self)
    }

    /// Matrix at label indices `(i, j)`.
    pub fn transition_at(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.transitions[i * self.right.len() + j]
    }

    pub fn transition(&self, a: &Label, b: &Label) -> Result<&ComplexMatrix, AutomatonError> {
        let i = self.left.position(a).ok_or_else(|| AutomatonError::UnknownSignal {
            side: Side::Left,
            label: a.clone(),
        })?;
        let j = self.right.position(b).ok_or_else(|| AutomatonError::UnknownSignal {
            side: Side::Right,
            label: b.clone(),
        })?;
        Ok(self.transition_at(i, j))
    }

    /// All `(left, right, matrix)` triples in label order.
    pub fn transitions(&self) -> impl Iterator<Item = (&Label, &Label, &ComplexMatrix)> {
        let width = self.right.len();
        self.transitions.iter().enumerate().map(move |(k, m)| {
            (&self.left.labels()[k / width], &self.right.labels()[k % width], m)
        })
    }

    /// Every transition is a unitary, an orthogonal projection, or a
    /// unitary acting on the range of a commuting projection (such as
    /// `H ⊗ P0`, a Hadamard on one qubit while another is measured).
    pub fn is_quantum(&self, tol: f64) -> bool {
        self.transitions.iter().all(|m| TransitionKind::of(m, tol) != TransitionKind::Other)
    }

    /// Every transition is literally a unitary or an orthogonal projection.
    pub fn is_strictly_quantum(&self, tol: f64) -> bool {
        self.transitions.iter().all(|m| {
            matches!(TransitionKind::of(m, tol), TransitionKind::Unitary | TransitionKind::Projection)
        })
    }

    /// The state space carries named basis elements and every transition is 0/1.
    pub fn is_classical(&self, tol: f64) -> bool {
        self.basis_names.is_some() && self.transitions.iter().all(|m| m.is_zero_one(tol))
    }

    /// Both interfaces are singletons.
    pub fn is_closed(&self) -> bool {
        self.left.len() == 1 && self.right.len() == 1
    }

    /// Same interfaces (ordered, flattened) and dimension.
    pub fn interfaces_match(&self, other: &Self) -> bool {
        self.left == other.left && self.right == other.right && self.dim == other.dim
    }

    /// Interfaces match and every pair of matrices agrees entrywise within `tol`.
    pub fn equals(&self, other: &Self, tol: f64) -> bool {
        self.interfaces_match(other) && self.max_transition_diff(other).is_some_and(|d| d <= tol)
    }

    /// Largest entrywise difference over all transitions, or `None` when the
    /// interfaces or dimensions differ.
    pub fn max_transition_diff(&self, other: &Self) -> Option<f64> {
        if !self.interfaces_match(other) {
            return None;
        }
        self.transitions
            .iter()
            .zip(&other.transitions)
            .map(|(a, b)| a.max_abs_diff(b))
            .try_fold(0.0_f64, |acc, d| d.map(|d| acc.max(d)))
    }

    fn check_state(&self, x: &StateVector) -> Result<(), AutomatonError> {
        if x.dim() != self.dim {
            return Err(AutomatonError::StateDimension { expected: self.dim, found: x.dim() });
        }
        Ok(())
    }

    pub fn step(&self, x: &StateVector, a: &Label, b: &Label) -> Result<StateVector, AutomatonError> {
        self.check_state(x)?;
        Ok(self.transition(a, b)?.apply(x)?)
    }

    /// Applies the word pair letter by letter. No renormalization; states
    /// may become zero.
    pub fn run_behaviour(
        &self,
        x0: &StateVector,
        left_word: &[Label],
        right_word: &[Label],
    ) -> Result<Behaviour, AutomatonError> {
        self.check_state(x0)?;
        if left_word.len() != right_word.len() {
            return Err(AutomatonError::WordLengths {
                left: left_word.len(),
                right: right_word.len(),
            });
        }
        let mut states = Vec::with_capacity(left_word.len() + 1);
        states.push(x0.clone());
        for (a, b) in left_word.iter().zip(right_word) {
            let next = self.transition(a, b)?.apply(states.last().expect("non-empty"))?;
            states.push(next);
        }
        Ok(Behaviour {
            left_word: left_word.to_vec(),
            right_word: right_word.to_vec(),
            states,
        })
    }

    /// All behaviours of length `k` from `x0` whose states all have norm
    /// above `prune_tol`, ordered by (left word, right word) in alphabet order.
    pub fn enumerate_behaviours(
        &self,
        x0: &StateVector,
        k: usize,
        prune_tol: f64,
    ) -> Result<Vec<Behaviour>, AutomatonError> {
        self.check_state(x0)?;
        let mut found: Vec<(Vec<usize>, Vec<usize>, Vec<StateVector>)> = Vec::new();
        let mut stack = vec![(Vec::new(), Vec::new(), vec![x0.clone()])];
        while let Some((lw, rw, states)) = stack.pop() {
            if lw.len() == k {
                found.push((lw, rw, states));
                continue;
            }
            let current = states.last().expect("non-empty");
            for i in 0..self.left.len() {
                for j in 0..self.right.len() {
                    let m = self.transition_at(i, j);
                    if m.is_exact_zero() {
                        continue;
                    }
                    let next = m.apply(current)?;
                    if next.norm() <= prune_tol {
                        continue;
                    }
                    let mut lw = lw.clone();
                    lw.push(i);
                    let mut rw = rw.clone();
                    rw.push(j);
                    let mut states = states.clone();
                    states.push(next);
                    stack.push((lw, rw, states));
                }
            }
        }
        found.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        Ok(found
            .into_iter()
            .map(|(lw, rw, states)| Behaviour {
                left_word: lw.into_iter().map(|i| self.left.labels()[i].clone()).collect(),
                right_word: rw.into_iter().map(|j| self.right.labels()[j].clone()).collect(),
                states,
            })
            .collect())
    }

    /// The single transition matrix of a closed automaton.
    pub fn closed_transform(&self) -> Result<&ComplexMatrix, AutomatonError> {
        if !self.is_closed() {
            return Err(AutomatonError::NotClosed {
                left: self.left.len(),
                right: self.right.len(),
            });
        }
        Ok(&self.transitions[0])
    }

    /// Human-readable name of basis element `index`.
    pub fn basis_label(&self, index: usize) -> String {
        match &self.basis_names {
            Some(names) => names[index].clone(),
            None => index.to_string(),
        }
    }
}

fn check_basis(names: &[String], dim: usize) -> Result<(), AutomatonError> {
    if names.len() != dim {
        return Err(AutomatonError::BasisLength { found: names.len(), dim });
    }
    let mut seen = HashSet::with_capacity(dim);
    for name in names {
        if !seen.insert(name.as_str()) {
            return Err(AutomatonError::DuplicateBasisName(name.clone()));
        }
    }
    Ok(())
}

/// How a transition matrix acts on the hermitian state space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionKind {
    Unitary,
    Projection,
    /// `U P` with `U` unitary and `P` a commuting orthogonal projection.
    ProjectedUnitary,
    Other,
}

impl TransitionKind {
    pub fn of(m: &ComplexMatrix, tol: f64) -> Self {
        if m.is_unitary(tol).unwrap_or(false) {
            TransitionKind::Unitary
        } else if m.is_orthogonal_projection(tol).unwrap_or(false) {
            TransitionKind::Projection
        } else if m.is_projected_unitary(tol).unwrap_or(false) {
            TransitionKind::ProjectedUnitary
        } else {
            TransitionKind::Other
        }
    }
}

/// A pair of equal-length words with the induced chain of states.
#[derive(Debug, Clone, PartialEq)]
pub struct Behaviour {
    pub left_word: Vec<Label>,
    pub right_word: Vec<Label>,
    pub states: Vec<StateVector>,
}

impl Behaviour {
    pub fn len(&self) -> usize {
        self.left_word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left_word.is_empty()
    }

    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("a behaviour has at least one state")
    }
}
