use crate::algebra::ConstantKind;
use crate::automaton::Label;
use crate::linalg::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
    pub offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: Pos,
    pub end: Pos,
}

impl Span {
    pub fn new(start: Pos, end: Pos) -> Self {
        Self { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span { start: self.start, end: other.end }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlphabetExpr {
    Ref { name: String, span: Span },
    Set { labels: Vec<Label>, span: Span },
    Product(Vec<AlphabetExpr>),
}

impl AlphabetExpr {
    pub fn span(&self) -> Span {
        match self {
            AlphabetExpr::Ref { span, .. } | AlphabetExpr::Set { span, .. } => *span,
            AlphabetExpr::Product(parts) => {
                let first = parts.first().map(Self::span).unwrap_or_default();
                let last = parts.last().map(Self::span).unwrap_or_default();
                first.to(last)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TransitionBody {
    Matrix(Vec<Vec<Scalar>>),
    /// 0/1 matrix given by `source -> target` basis names.
    Edges(Vec<(String, String)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionDecl {
    pub left: Label,
    pub right: Label,
    pub body: TransitionBody,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutomatonLit {
    pub left: AlphabetExpr,
    pub right: AlphabetExpr,
    pub dim: usize,
    pub basis: Option<Vec<String>>,
    pub transitions: Vec<TransitionDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Ref { name: String, span: Span },
    Parallel(Box<Expr>, Box<Expr>, Span),
    Series(Box<Expr>, Box<Expr>, Span),
    Const { kind: ConstantKind, args: Vec<AlphabetExpr>, span: Span },
    Rel { domain: AlphabetExpr, codomain: AlphabetExpr, pairs: Vec<(Label, Label)>, span: Span },
    Lit(Box<AutomatonLit>),
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Ref { span, .. }
            | Expr::Parallel(_, _, span)
            | Expr::Series(_, _, span)
            | Expr::Const { span, .. }
            | Expr::Rel { span, .. } => *span,
            Expr::Lit(lit) => lit.span,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decl {
    Alphabet { name: String, expr: AlphabetExpr, span: Span },
    Automaton { name: String, lit: AutomatonLit, span: Span },
    Let { name: String, expr: Expr, span: Span },
}

impl Decl {
    pub fn name(&self) -> &str {
        match self {
            Decl::Alphabet { name, .. } | Decl::Automaton { name, .. } | Decl::Let { name, .. } => name,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Decl::Alphabet { span, .. } | Decl::Automaton { span, .. } | Decl::Let { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub decls: Vec<Decl>,
}

impl Program {
    pub fn get(&self, name: &str) -> Option<&Decl> {
        self.decls.iter().find(|d| d.name() == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.decls.iter().map(Decl::name)
    }

    /// Copy with every span reset, for structural comparison.
    pub fn without_spans(&self) -> Program {
        let mut p = self.clone();
        for d in &mut p.decls {
            match d {
                Decl::Alphabet { expr, span, .. } => {
                    *span = Span::default();
                    clear_alphabet(expr);
                }
                Decl::Automaton { lit, span, .. } => {
                    *span = Span::default();
                    clear_lit(lit);
                }
                Decl::Let { expr, span, .. } => {
                    *span = Span::default();
                    clear_expr(expr);
                }
            }
        }
        p
    }
}

fn clear_alphabet(a: &mut AlphabetExpr) {
    match a {
        AlphabetExpr::Ref { span, .. } | AlphabetExpr::Set { span, .. } => *span = Span::default(),
        AlphabetExpr::Product(parts) => parts.iter_mut().for_each(clear_alphabet),
    }
}

fn clear_lit(lit: &mut AutomatonLit) {
    lit.span = Span::default();
    clear_alphabet(&mut lit.left);
    clear_alphabet(&mut lit.right);
    for t in &mut lit.transitions {
        t.span = Span::default();
    }
}

fn clear_expr(e: &mut Expr) {
    match e {
        Expr::Ref { span, .. } => *span = Span::default(),
        Expr::Parallel(l, r, span) | Expr::Series(l, r, span) => {
            *span = Span::default();
            clear_expr(l);
            clear_expr(r);
        }
        Expr::Const { args, span, .. } => {
            *span = Span::default();
            args.iter_mut().for_each(clear_alphabet);
        }
        Expr::Rel { domain, codomain, span, .. } => {
            *span = Span::default();
            clear_alphabet(domain);
            clear_alphabet(codomain);
        }
        Expr::Lit(lit) => clear_lit(lit),
    }
}
