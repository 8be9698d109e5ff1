use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{constant, from_relation, parallel, series, AlgebraError, Relation};
use crate::automaton::{Alphabet, AlphabetError, AutomatonError, CAutomaton};
use crate::linalg::{ComplexMatrix, LinalgError};

use super::ast::{AlphabetExpr, AutomatonLit, Decl, Expr, Program, Span, TransitionBody};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalErrorKind {
    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("`{name}` is {found}, expected {expected}")]
    WrongKind { name: String, expected: &'static str, found: &'static str },

    #[error("unknown basis name `{0}`")]
    UnknownBasisName(String),

    #[error("edge transitions need a `basis` declaration")]
    EdgesWithoutBasis,

    #[error(transparent)]
    Alphabet(#[from] AlphabetError),

    #[error(transparent)]
    Automaton(#[from] AutomatonError),

    #[error(transparent)]
    Algebra(#[from] AlgebraError),

    #[error(transparent)]
    Matrix(#[from] LinalgError),
}

/// An evaluation failure, located at the offending source span.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalError {
    pub span: Span,
    pub kind: Box<EvalErrorKind>,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.span.start.line, self.span.start.col, self.kind)
    }
}

impl std::error::Error for EvalError {}

trait At<T> {
    fn at(self, span: Span) -> Result<T, EvalError>;
}

impl<T, E: Into<EvalErrorKind>> At<T> for Result<T, E> {
    fn at(self, span: Span) -> Result<T, EvalError> {
        self.map_err(|e| EvalError { span, kind: Box::new(e.into()) })
    }
}

/// The value bound to a declared name.
#[derive(Debug, Clone)]
pub enum Value {
    Alphabet(Alphabet),
    Automaton(Arc<CAutomaton>),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Alphabet(_) => "an alphabet",
            Value::Automaton(_) => "an automaton",
        }
    }
}

/// Evaluates declarations on demand, caching each name's value.
pub struct Evaluator<'p> {
    program: &'p Program,
    values: HashMap<String, Value>,
}

impl<'p> Evaluator<'p> {
    pub fn new(program: &'p Program) -> Self {
        Self { program, values: HashMap::new() }
    }

    pub fn value(&mut self, name: &str) -> Result<Value, EvalError> {
        self.lookup(name, Span::default())
    }

    pub fn automaton(&mut self, name: &str) -> Result<Arc<CAutomaton>, EvalError> {
        self.automaton_ref(name, Span::default())
    }

    pub fn alphabet(&mut self, name: &str) -> Result<Alphabet, EvalError> {
        self.alphabet_ref(name, Span::default())
    }

    /// Evaluates every declaration in order.
    pub fn all(&mut self) -> Result<Vec<(String, Value)>, EvalError> {
        let program = self.program;
        program.names().map(|n| Ok((n.to_string(), self.value(n)?))).collect()
    }

    fn lookup(&mut self, name: &str, use_site: Span) -> Result<Value, EvalError> {
        if let Some(v) = self.values.get(name) {
            return Ok(v.clone());
        }
        let program = self.program;
        let decl = program
            .get(name)
            .ok_or_else(|| EvalError { span: use_site, kind: Box::new(EvalErrorKind::UnknownName(name.into())) })?;
        let value = match decl {
            Decl::Alphabet { expr, .. } => Value::Alphabet(self.eval_alphabet(expr)?),
            Decl::Automaton { lit, .. } => Value::Automaton(Arc::new(self.eval_lit(lit)?)),
            Decl::Let { expr, .. } => Value::Automaton(Arc::new(self.eval_expr(expr)?)),
        };
        self.values.insert(name.to_string(), value.clone());
        Ok(value)
    }

    fn automaton_ref(&mut self, name: &str, span: Span) -> Result<Arc<CAutomaton>, EvalError> {
        match self.lookup(name, span)? {
            Value::Automaton(a) => Ok(a),
            other => Err(wrong_kind(name, "an automaton", &other, span)),
        }
    }

    fn alphabet_ref(&mut self, name: &str, span: Span) -> Result<Alphabet, EvalError> {
        match self.lookup(name, span)? {
            Value::Alphabet(a) => Ok(a),
            other => Err(wrong_kind(name, "an alphabet", &other, span)),
        }
    }

    pub fn eval_alphabet(&mut self, a: &AlphabetExpr) -> Result<Alphabet, EvalError> {
        match a {
            AlphabetExpr::Ref { name, span } => self.alphabet_ref(name, *span),
            AlphabetExpr::Set { labels, span } => Alphabet::new(labels.clone()).at(*span),
            AlphabetExpr::Product(parts) => {
                let mut acc = self.eval_alphabet(&parts[0])?;
                for p in &parts[1..] {
                    acc = acc.product(&self.eval_alphabet(p)?);
                }
                Ok(acc)
            }
        }
    }

    pub fn eval_expr(&mut self, e: &Expr) -> Result<CAutomaton, EvalError> {
        match e {
            Expr::Ref { name, span } => Ok((*self.automaton_ref(name, *span)?).clone()),
            Expr::Parallel(l, r, _) => {
                let (l, r) = (self.eval_expr(l)?, self.eval_expr(r)?);
                Ok(parallel(&l, &r))
            }
            Expr::Series(l, r, span) => {
                let (l, r) = (self.eval_expr(l)?, self.eval_expr(r)?);
                series(&l, &r).at(*span)
            }
            Expr::Const { kind, args, span } => {
                let a = self.eval_alphabet(&args[0])?;
                let b = args.get(1).map(|x| self.eval_alphabet(x)).transpose()?;
                constant(*kind, &a, b.as_ref()).at(*span)
            }
            Expr::Rel { domain, codomain, pairs, span } => {
                let (d, c) = (self.eval_alphabet(domain)?, self.eval_alphabet(codomain)?);
                Relation::new(d, c, pairs.iter().cloned()).map(|r| from_relation(&r)).at(*span)
            }
            Expr::Lit(lit) => self.eval_lit(lit),
        }
    }

    fn eval_lit(&mut self, lit: &AutomatonLit) -> Result<CAutomaton, EvalError> {
        let left = self.eval_alphabet(&lit.left)?;
        let right = self.eval_alphabet(&lit.right)?;
        if let Some(names) = &lit.basis {
            if names.len() != lit.dim {
                let e = AutomatonError::BasisLength { found: names.len(), dim: lit.dim };
                return Err(EvalError { span: lit.span, kind: Box::new(e.into()) });
            }
        }
        let mut entries = Vec::with_capacity(lit.transitions.len());
        for t in &lit.transitions {
            let m = match &t.body {
                TransitionBody::Matrix(rows) => ComplexMatrix::from_rows(rows.clone()).at(t.span)?,
                TransitionBody::Edges(edges) => {
                    let basis = lit.basis.as_ref().ok_or(EvalErrorKind::EdgesWithoutBasis).at(t.span)?;
                    let index = |n: &str| {
                        basis
                            .iter()
                            .position(|b| b == n)
                            .ok_or_else(|| EvalErrorKind::UnknownBasisName(n.to_string()))
                            .at(t.span)
                    };
                    let mut ones = Vec::with_capacity(edges.len());
                    for (from, to) in edges {
                        // Column is the source state.
                        ones.push((index(to)?, index(from)?));
                    }
                    ComplexMatrix::indicator(lit.dim, &ones)
                }
            };
            entries.push((t.left.clone(), t.right.clone(), m));
        }
        match CAutomaton::new(left, right, lit.dim, entries, lit.basis.clone()) {
            Ok(a) => Ok(a),
            Err(e) => {
                let span = offending_transition(lit, &e).unwrap_or(lit.span);
                Err(EvalError { span, kind: Box::new(e.into()) })
            }
        }
    }
}

/// Points a construction error at the transition it concerns, if any.
fn offending_transition(lit: &AutomatonLit, e: &AutomatonError) -> Option<Span> {
    let (a, b) = match e {
        AutomatonError::UnknownLabel { a, b, .. }
        | AutomatonError::WrongShape { a, b, .. }
        | AutomatonError::DuplicateKey { a, b } => (a, b),
        _ => return None,
    };
    let mut hits = lit.transitions.iter().filter(|t| &t.left == a && &t.right == b);
    let first = hits.next()?.span;
    Some(if matches!(e, AutomatonError::DuplicateKey { .. }) { hits.next().map_or(first, |t| t.span) } else { first })
}

fn wrong_kind(name: &str, expected: &'static str, found: &Value, span: Span) -> EvalError {
    EvalError {
        span,
        kind: Box::new(EvalErrorKind::WrongKind { name: name.to_string(), expected, found: found.kind() }),
    }
}
