use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::algebra::ConstantKind;
use crate::automaton::Label;
use crate::linalg::Scalar;

use super::ast::{
    AlphabetExpr, AutomatonLit, Decl, Expr, Pos, Program, Span, TransitionBody, TransitionDecl,
};
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

/// Words that cannot be used as declaration names.
pub(crate) const RESERVED: &[&str] = &[
    "alphabet", "automaton", "let", "id", "diag", "codiag", "twist", "eta", "eps", "drop_eps",
    "ins_eps", "rel", "isqrt2", "i",
];

type PResult<T> = Result<T, ParseError>;

/// Parses a whole program and checks that every name is declared exactly
/// once, before it is used.
pub fn parse(src: &str) -> Result<Program, ParseError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, i: 0 };
    let mut decls = Vec::new();
    let mut declared: HashMap<String, usize> = HashMap::new();
    while !p.at(&Tok::Eof) {
        let (decl, name_pos) = p.decl()?;
        if declared.insert(decl.name().to_string(), decls.len()).is_some() {
            return Err(ParseError::new(name_pos, format!("duplicate declaration of `{}`", decl.name())));
        }
        decls.push(decl);
    }
    check_references(&decls, &declared)?;
    Ok(Program { decls })
}

/// Parses a standalone expression whose free names must be declared in
/// `program`. `;` is always series here.
pub fn parse_expr(src: &str, program: &Program) -> Result<Expr, ParseError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, i: 0 };
    let expr = p.expr_inner()?;
    if !p.at(&Tok::Eof) {
        return Err(p.error("end of expression"));
    }
    let mut refs = Vec::new();
    expr_refs(&expr, &mut refs);
    for (name, span) in refs {
        if program.get(name).is_none() {
            return Err(ParseError::new(span.start, format!("unknown name `{name}`")));
        }
    }
    Ok(expr)
}

fn check_references(decls: &[Decl], declared: &HashMap<String, usize>) -> PResult<()> {
    for (k, decl) in decls.iter().enumerate() {
        let mut refs = Vec::new();
        match decl {
            Decl::Alphabet { expr, .. } => alphabet_refs(expr, &mut refs),
            Decl::Automaton { lit, .. } => lit_refs(lit, &mut refs),
            Decl::Let { expr, .. } => expr_refs(expr, &mut refs),
        }
        for (name, span) in refs {
            match declared.get(name) {
                Some(&j) if j < k => {}
                Some(_) => {
                    return Err(ParseError::new(span.start, format!("`{name}` is used before its declaration")))
                }
                None => return Err(ParseError::new(span.start, format!("unknown name `{name}`"))),
            }
        }
    }
    Ok(())
}

fn alphabet_refs<'a>(a: &'a AlphabetExpr, out: &mut Vec<(&'a str, Span)>) {
    match a {
        AlphabetExpr::Ref { name, span } => out.push((name, *span)),
        AlphabetExpr::Set { .. } => {}
        AlphabetExpr::Product(parts) => parts.iter().for_each(|x| alphabet_refs(x, out)),
    }
}

fn lit_refs<'a>(lit: &'a AutomatonLit, out: &mut Vec<(&'a str, Span)>) {
    alphabet_refs(&lit.left, out);
    alphabet_refs(&lit.right, out);
}

fn expr_refs<'a>(e: &'a Expr, out: &mut Vec<(&'a str, Span)>) {
    match e {
        Expr::Ref { name, span } => out.push((name, *span)),
        Expr::Parallel(l, r, _) | Expr::Series(l, r, _) => {
            expr_refs(l, out);
            expr_refs(r, out);
        }
        Expr::Const { args, .. } => args.iter().for_each(|a| alphabet_refs(a, out)),
        Expr::Rel { domain, codomain, .. } => {
            alphabet_refs(domain, out);
            alphabet_refs(codomain, out);
        }
        Expr::Lit(lit) => lit_refs(lit, out),
    }
}

struct Parser {
    tokens: Vec<Token>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.tokens.len() - 1);
        &self.tokens[j].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.i].pos
    }

    /// End of the most recently consumed token.
    fn last_end(&self) -> Pos {
        self.tokens[self.i.saturating_sub(1)].end
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek() == tok
    }

    fn at_word(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn bump(&mut self) -> &Token {
        let t = &self.tokens[self.i];
        if self.i + 1 < self.tokens.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.at(tok) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::new(self.pos(), format!("expected {expected}, found {}", self.peek()))
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(&tok.to_string()))
        }
    }

    fn expect_word(&mut self, word: &str) -> PResult<()> {
        if self.at_word(word) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("`{word}`")))
        }
    }

    fn span_from(&self, start: Pos) -> Span {
        Span::new(start, self.last_end())
    }

    fn decl_name(&mut self) -> PResult<(String, Pos)> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) if RESERVED.contains(&s.as_str()) => {
                Err(ParseError::new(pos, format!("`{s}` is reserved and cannot be declared")))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok((s, pos))
            }
            _ => Err(self.error("a name")),
        }
    }

    fn decl(&mut self) -> PResult<(Decl, Pos)> {
        let start = self.pos();
        let (decl, name_pos) = if self.at_word("alphabet") {
            self.bump();
            let (name, name_pos) = self.decl_name()?;
            self.expect(Tok::Eq)?;
            let expr = self.alphabet()?;
            (Decl::Alphabet { name, expr, span: self.span_from(start) }, name_pos)
        } else if self.at_word("automaton") {
            self.bump();
            let (name, name_pos) = self.decl_name()?;
            let lit = self.automaton_body(start)?;
            (Decl::Automaton { name, lit, span: self.span_from(start) }, name_pos)
        } else if self.at_word("let") {
            self.bump();
            let (name, name_pos) = self.decl_name()?;
            self.expect(Tok::Eq)?;
            let expr = self.expr()?;
            (Decl::Let { name, expr, span: self.span_from(start) }, name_pos)
        } else {
            return Err(self.error("`alphabet`, `automaton` or `let`"));
        };
        self.eat(&Tok::Semi);
        if !self.at(&Tok::Eof) && !self.at_decl_start() {
            return Err(self.error("`;` or a new declaration"));
        }
        Ok((decl, name_pos))
    }

    fn at_decl_start(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) if s == "alphabet" || s == "let" => true,
            Tok::Ident(s) if s == "automaton" => matches!(self.peek_at(1), Tok::Ident(_)),
            _ => false,
        }
    }

    // alph := atom ("*" atom)*
    fn alphabet(&mut self) -> PResult<AlphabetExpr> {
        let mut parts = vec![self.alphabet_atom()?];
        while self.eat(&Tok::Star) {
            parts.push(self.alphabet_atom()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one part") } else { AlphabetExpr::Product(parts) })
    }

    fn alphabet_atom(&mut self) -> PResult<AlphabetExpr> {
        let start = self.pos();
        match self.peek().clone() {
            Tok::Ident(name) if !RESERVED.contains(&name.as_str()) => {
                self.bump();
                Ok(AlphabetExpr::Ref { name, span: self.span_from(start) })
            }
            Tok::LBrace => {
                self.bump();
                let mut labels = vec![self.label()?];
                while self.eat(&Tok::Comma) {
                    labels.push(self.label()?);
                }
                self.expect(Tok::RBrace)?;
                Ok(AlphabetExpr::Set { labels, span: self.span_from(start) })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.alphabet()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            _ => Err(self.error("an alphabet")),
        }
    }

    /// A name, a digit string, or a parenthesised tuple; nested tuples flatten.
    fn label(&mut self) -> PResult<Label> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Label::atom(s))
            }
            Tok::Number { text, imag: false } if text.bytes().all(|b| b.is_ascii_digit()) => {
                self.bump();
                Ok(Label::atom(text))
            }
            Tok::LParen => {
                self.bump();
                let mut label = self.label()?;
                while self.eat(&Tok::Comma) {
                    label = label.concat(&self.label()?);
                }
                self.expect(Tok::RParen)?;
                Ok(label)
            }
            _ => Err(self.error("a label")),
        }
    }

    fn basis_name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            Tok::Number { text, imag: false } if text.bytes().all(|b| b.is_ascii_digit()) => {
                self.bump();
                Ok(text)
            }
            _ => Err(self.error("a basis name")),
        }
    }

    fn integer(&mut self, what: &str) -> PResult<usize> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Number { text, imag: false } if text.bytes().all(|b| b.is_ascii_digit()) => {
                self.bump();
                text.parse().map_err(|_| ParseError::new(pos, format!("{what} `{text}` is too large")))
            }
            _ => Err(self.error(what)),
        }
    }

    // `: alph -> alph { dim N; [basis {..};] t(l, r) = body; ... }`
    fn automaton_body(&mut self, start: Pos) -> PResult<AutomatonLit> {
        self.expect(Tok::Colon)?;
        let left = self.alphabet()?;
        self.expect(Tok::Arrow)?;
        let right = self.alphabet()?;
        self.expect(Tok::LBrace)?;
        self.expect_word("dim")?;
        let dim = self.integer("a dimension")?;
        self.expect(Tok::Semi)?;
        let mut basis = None;
        if self.at_word("basis") {
            self.bump();
            self.expect(Tok::LBrace)?;
            let mut names = vec![self.basis_name()?];
            while self.eat(&Tok::Comma) {
                names.push(self.basis_name()?);
            }
            self.expect(Tok::RBrace)?;
            self.expect(Tok::Semi)?;
            basis = Some(names);
        }
        let mut transitions = Vec::new();
        while !self.eat(&Tok::RBrace) {
            transitions.push(self.transition()?);
            if !self.eat(&Tok::Semi) && !self.at(&Tok::RBrace) {
                return Err(self.error("`;` or `}`"));
            }
        }
        Ok(AutomatonLit { left, right, dim, basis, transitions, span: self.span_from(start) })
    }

    fn transition(&mut self) -> PResult<TransitionDecl> {
        let start = self.pos();
        if !self.at_word("t") {
            return Err(self.error("`t(left, right) = ...` or `}`"));
        }
        self.bump();
        self.expect(Tok::LParen)?;
        let left = self.label()?;
        self.expect(Tok::Comma)?;
        let right = self.label()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::Eq)?;
        let body = match self.peek() {
            Tok::LBracket => TransitionBody::Matrix(self.matrix()?),
            Tok::LBrace => TransitionBody::Edges(self.edges()?),
            _ => return Err(self.error("a matrix `[[...]]` or edges `{x -> y}`")),
        };
        Ok(TransitionDecl { left, right, body, span: self.span_from(start) })
    }

    fn matrix(&mut self) -> PResult<Vec<Vec<Scalar>>> {
        self.expect(Tok::LBracket)?;
        let mut rows = vec![self.matrix_row()?];
        while self.eat(&Tok::Comma) {
            rows.push(self.matrix_row()?);
        }
        self.expect(Tok::RBracket)?;
        Ok(rows)
    }

    fn matrix_row(&mut self) -> PResult<Vec<Scalar>> {
        self.expect(Tok::LBracket)?;
        let mut row = vec![self.scalar()?];
        while self.eat(&Tok::Comma) {
            row.push(self.scalar()?);
        }
        self.expect(Tok::RBracket)?;
        Ok(row)
    }

    fn edges(&mut self) -> PResult<Vec<(String, String)>> {
        self.expect(Tok::LBrace)?;
        let mut edges = Vec::new();
        if self.eat(&Tok::RBrace) {
            return Ok(edges);
        }
        loop {
            let from = self.basis_name()?;
            self.expect(Tok::Arrow)?;
            let to = self.basis_name()?;
            edges.push((from, to));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(edges)
    }

    // scalar := ["-"|"+"] term (("+"|"-") term)*
    fn scalar(&mut self) -> PResult<Scalar> {
        let start = self.pos();
        let negate = if self.eat(&Tok::Minus) {
            true
        } else {
            self.eat(&Tok::Plus);
            false
        };
        let first = self.scalar_term()?;
        let mut acc = if negate { -first } else { first };
        loop {
            if self.eat(&Tok::Plus) {
                acc += self.scalar_term()?;
            } else if self.eat(&Tok::Minus) {
                acc -= self.scalar_term()?;
            } else {
                break;
            }
        }
        if !(acc.re.is_finite() && acc.im.is_finite()) {
            return Err(ParseError::new(start, "number out of range"));
        }
        Ok(acc)
    }

    fn scalar_term(&mut self) -> PResult<Scalar> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Number { text, imag } => {
                self.bump();
                let v: f64 =
                    text.parse().map_err(|_| ParseError::new(pos, format!("malformed number `{text}`")))?;
                Ok(if imag { Scalar::new(0.0, v) } else { Scalar::new(v, 0.0) })
            }
            Tok::Ident(s) if s == "isqrt2" => {
                self.bump();
                if self.at_word("i") {
                    self.bump();
                    Ok(Scalar::new(0.0, FRAC_1_SQRT_2))
                } else {
                    Ok(Scalar::new(FRAC_1_SQRT_2, 0.0))
                }
            }
            Tok::Ident(s) if s == "i" => {
                self.bump();
                Ok(Scalar::new(0.0, 1.0))
            }
            _ => Err(self.error("a number")),
        }
    }

    // expr := par (";" par)*, where a `;` directly before a declaration
    // keyword or the end of input terminates the declaration instead.
    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.parallel()?;
        while self.at(&Tok::Semi) && !self.semi_ends_decl() {
            self.bump();
            let rhs = self.parallel()?;
            let span = lhs.span().to(rhs.span());
            lhs = Expr::Series(Box::new(lhs), Box::new(rhs), span);
        }
        Ok(lhs)
    }

    fn semi_ends_decl(&self) -> bool {
        match self.peek_at(1) {
            Tok::Eof => true,
            Tok::Ident(s) if s == "alphabet" || s == "let" => true,
            Tok::Ident(s) if s == "automaton" => matches!(self.peek_at(2), Tok::Ident(_)),
            _ => false,
        }
    }

    fn parallel(&mut self) -> PResult<Expr> {
        let mut lhs = self.factor()?;
        while self.eat(&Tok::Star) {
            let rhs = self.factor()?;
            let span = lhs.span().to(rhs.span());
            lhs = Expr::Parallel(Box::new(lhs), Box::new(rhs), span);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> PResult<Expr> {
        let start = self.pos();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.expr_inner()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(word) => {
                let call = matches!(self.peek_at(1), Tok::LParen);
                match word.as_str() {
                    "automaton" if matches!(self.peek_at(1), Tok::Colon) => {
                        self.bump();
                        Ok(Expr::Lit(Box::new(self.automaton_body(start)?)))
                    }
                    "rel" if call => self.relation(start),
                    "id" | "diag" | "codiag" | "eta" | "eps" | "twist" | "drop_eps" | "ins_eps"
                        if call =>
                    {
                        self.constant(&word, start)
                    }
                    w if RESERVED.contains(&w) => Err(self.error("an automaton expression")),
                    _ => {
                        self.bump();
                        Ok(Expr::Ref { name: word, span: self.span_from(start) })
                    }
                }
            }
            _ => Err(self.error("an automaton expression")),
        }
    }

    /// Expression inside parentheses, where `;` is always series.
    fn expr_inner(&mut self) -> PResult<Expr> {
        let mut lhs = self.parallel()?;
        while self.eat(&Tok::Semi) {
            let rhs = self.parallel()?;
            let span = lhs.span().to(rhs.span());
            lhs = Expr::Series(Box::new(lhs), Box::new(rhs), span);
        }
        Ok(lhs)
    }

    fn constant(&mut self, word: &str, start: Pos) -> PResult<Expr> {
        self.bump();
        self.expect(Tok::LParen)?;
        let first = self.alphabet()?;
        let (kind, args) = match word {
            "id" => (ConstantKind::Identity, vec![first]),
            "diag" => (ConstantKind::Diagonal, vec![first]),
            "codiag" => (ConstantKind::Codiagonal, vec![first]),
            "eta" => (ConstantKind::Eta, vec![first]),
            "eps" => (ConstantKind::Epsilon, vec![first]),
            "twist" => {
                self.expect(Tok::Comma)?;
                let second = self.alphabet()?;
                (ConstantKind::Twist, vec![first, second])
            }
            "drop_eps" | "ins_eps" => {
                self.expect(Tok::Comma)?;
                let k = self.integer("a component position")?;
                let kind =
                    if word == "drop_eps" { ConstantKind::DropEps(k) } else { ConstantKind::InsertEps(k) };
                (kind, vec![first])
            }
            _ => unreachable!("constant keywords are matched by the caller"),
        };
        self.expect(Tok::RParen)?;
        Ok(Expr::Const { kind, args, span: self.span_from(start) })
    }

    // rel(A, B) { a -> b, ... }
    fn relation(&mut self, start: Pos) -> PResult<Expr> {
        self.bump();
        self.expect(Tok::LParen)?;
        let domain = self.alphabet()?;
        self.expect(Tok::Comma)?;
        let codomain = self.alphabet()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::LBrace)?;
        let mut pairs = Vec::new();
        if !self.at(&Tok::RBrace) {
            loop {
                let a = self.label()?;
                self.expect(Tok::Arrow)?;
                let b = self.label()?;
                pairs.push((a, b));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(Expr::Rel { domain, codomain, pairs, span: self.span_from(start) })
    }
}
