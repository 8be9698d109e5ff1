//! Parallel and series composition, relation constants, and the Frobenius
//! equations for the diagonal and codiagonal constants.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::automaton::{Alphabet, CAutomaton, Label, Side, IDLE};
use crate::linalg::{ComplexMatrix, Scalar, ONE, ZERO};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("interface mismatch in series composition: right interface {right_of_lhs} does not match left interface {left_of_rhs}")]
    InterfaceMismatch { right_of_lhs: Alphabet, left_of_rhs: Alphabet },

    #[error("relation pair ({a}, {b}) uses {side} label outside the alphabet")]
    LabelOutsideRelation { a: Label, b: Label, side: Side },

    #[error("{0} needs a second alphabet")]
    MissingSecondAlphabet(ConstantKind),

    #[error("cannot insert eps at component {position} of labels with {arity} components")]
    EpsPosition { position: usize, arity: usize },
}

/// Basis names of a tensor product, joined as `x.y`.
fn product_names(p: &CAutomaton, q: &CAutomaton) -> Option<Vec<String>> {
    let (a, b) = (p.basis_names()?, q.basis_names()?);
    Some(a.iter().flat_map(|x| b.iter().map(move |y| format!("{x}.{y}"))).collect())
}

/// Parallel composite: product interfaces, tensor state space,
/// `((a,c),(b,d)) ↦ φ(a,b) ⊗ ψ(c,d)`.
pub fn parallel(p: &CAutomaton, q: &CAutomaton) -> CAutomaton {
    let left = p.left().product(q.left());
    let right = p.right().product(q.right());
    let dim = p.dim() * q.dim();
    let mut family = Vec::with_capacity(left.len() * right.len());
    for a in 0..p.left().len() {
        for c in 0..q.left().len() {
            for b in 0..p.right().len() {
                for d in 0..q.right().len() {
                    family.push(p.transition_at(a, b).kron(q.transition_at(c, d)));
                }
            }
        }
    }
    CAutomaton::from_family(left, right, dim, family, product_names(p, q))
}

/// Series (communicating parallel) composite: `(a,c) ↦ Σ_b φ(a,b) ⊗ ψ(b,c)`.
///
/// Requires the right interface of `p` to equal the left interface of `q`
/// as ordered, flattened alphabets.
pub fn series(p: &CAutomaton, q: &CAutomaton) -> Result<CAutomaton, AlgebraError> {
    if p.right() != q.left() {
        return Err(AlgebraError::InterfaceMismatch {
            right_of_lhs: p.right().clone(),
            left_of_rhs: q.left().clone(),
        });
    }
    let dim = p.dim() * q.dim();
    let middle = p.right().len();
    let mut family = Vec::with_capacity(p.left().len() * q.right().len());
    for a in 0..p.left().len() {
        for c in 0..q.right().len() {
            let mut sum = ComplexMatrix::zeros(dim, dim);
            for b in 0..middle {
                let (phi, psi) = (p.transition_at(a, b), q.transition_at(b, c));
                if phi.is_exact_zero() || psi.is_exact_zero() {
                    continue;
                }
                sum.add_assign(&phi.kron(psi)).expect("shapes agree by construction");
            }
            family.push(sum);
        }
    }
    Ok(CAutomaton::from_family(
        p.left().clone(),
        q.right().clone(),
        dim,
        family,
        product_names(p, q),
    ))
}

/// A relation between two alphabets.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    domain: Alphabet,
    codomain: Alphabet,
    // Index pairs into domain and codomain.
    pairs: BTreeSet<(usize, usize)>,
}

impl Relation {
    pub fn new(
        domain: Alphabet,
        codomain: Alphabet,
        pairs: impl IntoIterator<Item = (Label, Label)>,
    ) -> Result<Self, AlgebraError> {
        let mut indexed = BTreeSet::new();
        for (a, b) in pairs {
            let i = domain.position(&a);
            let j = codomain.position(&b);
            match (i, j) {
                (Some(i), Some(j)) => {
                    indexed.insert((i, j));
                }
                (None, _) => return Err(AlgebraError::LabelOutsideRelation { a, b, side: Side::Left }),
                (_, None) => return Err(AlgebraError::LabelOutsideRelation { a, b, side: Side::Right }),
            }
        }
        Ok(Self { domain, codomain, pairs: indexed })
    }

    pub fn from_indices(
        domain: Alphabet,
        codomain: Alphabet,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let pairs: BTreeSet<_> = pairs.into_iter().collect();
        assert!(
            pairs.iter().all(|&(i, j)| i < domain.len() && j < codomain.len()),
            "relation index out of range"
        );
        Self { domain, codomain, pairs }
    }

    pub fn empty(domain: Alphabet, codomain: Alphabet) -> Self {
        Self { domain, codomain, pairs: BTreeSet::new() }
    }

    /// The graph of a function given on label indices.
    fn graph(domain: Alphabet, codomain: Alphabet, f: impl Fn(&Label) -> Label) -> Self {
        let pairs = domain
            .labels()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let j = codomain.position(&f(a)).expect("function lands in codomain");
                (i, j)
            })
            .collect();
        Self { domain, codomain, pairs }
    }

    pub fn identity(a: &Alphabet) -> Self {
        Self::graph(a.clone(), a.clone(), Label::clone)
    }

    /// `a ↦ (a, a)`.
    pub fn diagonal(a: &Alphabet) -> Self {
        Self::graph(a.clone(), a.product(a), |x| x.concat(x))
    }

    /// `(a, b) ↦ (b, a)`.
    pub fn twist(a: &Alphabet, b: &Alphabet) -> Self {
        let n = a.arity();
        Self::graph(a.product(b), b.product(a), |x| {
            let (u, v) = x.split_at(n).expect("product label splits");
            v.concat(&u)
        })
    }

    /// `{(eps, (a, a))}` from the one-point alphabet.
    pub fn eta(a: &Alphabet) -> Self {
        Self::diagonal(a).precompose_unit()
    }

    /// Removes an `eps` component at `position`: from `A` with `eps` inserted
    /// there, onto `A`.
    pub fn drop_eps(a: &Alphabet, position: usize) -> Result<Self, AlgebraError> {
        if position > a.arity() {
            return Err(AlgebraError::EpsPosition { position, arity: a.arity() });
        }
        let widened =
            Alphabet::new(a.labels().iter().map(|l| l.insert(position, IDLE)).collect())
                .expect("inserting a fixed component keeps labels distinct");
        let pairs = (0..a.len()).map(|i| (i, i));
        Ok(Self::from_indices(widened, a.clone(), pairs))
    }

    // Δ_A with the one-point alphabet as domain: every codomain label the
    // diagonal hits is related to eps.
    fn precompose_unit(self) -> Self {
        let pairs = self.pairs.iter().map(|&(_, j)| (0, j)).collect();
        Self { domain: Alphabet::unit(), codomain: self.codomain, pairs }
    }

    pub fn opposite(&self) -> Self {
        Self {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            pairs: self.pairs.iter().map(|&(i, j)| (j, i)).collect(),
        }
    }

    pub fn domain(&self) -> &Alphabet {
        &self.domain
    }

    pub fn codomain(&self) -> &Alphabet {
        &self.codomain
    }

    pub fn contains(&self, a: &Label, b: &Label) -> bool {
        match (self.domain.position(a), self.codomain.position(b)) {
            (Some(i), Some(j)) => self.pairs.contains(&(i, j)),
            _ => false,
        }
    }

    pub fn contains_indices(&self, i: usize, j: usize) -> bool {
        self.pairs.contains(&(i, j))
    }

    pub fn index_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Label, &Label)> {
        self.pairs
            .iter()
            .map(|&(i, j)| (&self.domain.labels()[i], &self.codomain.labels()[j]))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Toggles membership of the index pair `(i, j)`.
    pub fn toggled(&self, i: usize, j: usize) -> Self {
        let mut out = self.clone();
        if !out.pairs.remove(&(i, j)) {
            out.pairs.insert((i, j));
        }
        out
    }
}

/// The one-dimensional automaton of a relation: `[1]` on related pairs,
/// `[0]` elsewhere, single basis element `*`.
pub fn from_relation(rel: &Relation) -> CAutomaton {
    let (n, m) = (rel.domain.len(), rel.codomain.len());
    let mut family = vec![ComplexMatrix::scalar(ZERO); n * m];
    for (i, j) in rel.index_pairs() {
        family[i * m + j] = ComplexMatrix::scalar(ONE);
    }
    CAutomaton::from_family(
        rel.domain.clone(),
        rel.codomain.clone(),
        1,
        family,
        Some(vec!["*".to_string()]),
    )
}

/// The named relation constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstantKind {
    Identity,
    Diagonal,
    Codiagonal,
    Twist,
    Eta,
    Epsilon,
    /// Removes an `eps` component at the given position.
    DropEps(usize),
    /// Inserts an `eps` component at the given position.
    InsertEps(usize),
}

impl fmt::Display for ConstantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstantKind::Identity => f.write_str("id"),
            ConstantKind::Diagonal => f.write_str("diag"),
            ConstantKind::Codiagonal => f.write_str("codiag"),
            ConstantKind::Twist => f.write_str("twist"),
            ConstantKind::Eta => f.write_str("eta"),
            ConstantKind::Epsilon => f.write_str("eps"),
            ConstantKind::DropEps(_) => f.write_str("drop_eps"),
            ConstantKind::InsertEps(_) => f.write_str("ins_eps"),
        }
    }
}

pub fn constant_relation(
    kind: ConstantKind,
    a: &Alphabet,
    b: Option<&Alphabet>,
) -> Result<Relation, AlgebraError> {
    Ok(match kind {
        ConstantKind::Identity => Relation::identity(a),
        ConstantKind::Diagonal => Relation::diagonal(a),
        ConstantKind::Codiagonal => Relation::diagonal(a).opposite(),
        ConstantKind::Twist => {
            let b = b.ok_or(AlgebraError::MissingSecondAlphabet(kind))?;
            Relation::twist(a, b)
        }
        ConstantKind::Eta => Relation::eta(a),
        ConstantKind::Epsilon => Relation::eta(a).opposite(),
        ConstantKind::DropEps(k) => Relation::drop_eps(a, k)?,
        ConstantKind::InsertEps(k) => Relation::drop_eps(a, k)?.opposite(),
    })
}

pub fn constant(
    kind: ConstantKind,
    a: &Alphabet,
    b: Option<&Alphabet>,
) -> Result<CAutomaton, AlgebraError> {
    constant_relation(kind, a, b).map(|r| from_relation(&r))
}

/// Series composite of two relation automata; entry `(a, c)` counts the
/// witnesses `b` with `a ρ b` and `b σ c`.
pub fn relation_series_count(rho: &Relation, sigma: &Relation) -> Result<CAutomaton, AlgebraError> {
    series(&from_relation(rho), &from_relation(sigma))
}

/// Both sides of the two Frobenius equations
/// `(Δ ⊗ 1) ∘ (1 ⊗ ∇) = ∇ ∘ Δ = (1 ⊗ Δ) ∘ (∇ ⊗ 1)`.
#[derive(Debug, Clone)]
pub struct FrobeniusSides {
    pub lhs: CAutomaton,
    pub mirrored: CAutomaton,
    pub rhs: CAutomaton,
}

impl FrobeniusSides {
    /// Builds the three composites from explicit diagonal and codiagonal
    /// automata on `a`.
    pub fn build(
        a: &Alphabet,
        diagonal: &CAutomaton,
        codiagonal: &CAutomaton,
    ) -> Result<Self, AlgebraError> {
        let id = from_relation(&Relation::identity(a));
        let lhs = series(&parallel(diagonal, &id), &parallel(&id, codiagonal))?;
        let mirrored = series(&parallel(&id, diagonal), &parallel(codiagonal, &id))?;
        let rhs = series(codiagonal, diagonal)?;
        Ok(Self { lhs, mirrored, rhs })
    }

    pub fn standard(a: &Alphabet) -> Self {
        let delta = from_relation(&Relation::diagonal(a));
        let nabla = from_relation(&Relation::diagonal(a).opposite());
        Self::build(a, &delta, &nabla).expect("standard constants compose")
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.lhs.equals(&self.rhs, tol) && self.mirrored.equals(&self.rhs, tol)
    }
}

/// Checks the Frobenius equations for `Δ_A`, `∇_A` under strict equality.
pub fn check_frobenius(a: &Alphabet, tol: f64) -> bool {
    FrobeniusSides::standard(a).holds(tol)
}

/// Alphabet `{0, 1, …, n-1}`.
pub fn numbered_alphabet(n: usize) -> Alphabet {
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    Alphabet::atoms(&names).expect("distinct numbers")
}

/// Entry of a one-dimensional automaton at label indices.
pub fn scalar_entry(q: &CAutomaton, i: usize, j: usize) -> Scalar {
    q.transition_at(i, j).get(0, 0)
}
