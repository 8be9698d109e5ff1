//! Source rendering. Printing a parsed program and parsing it again gives
//! the same syntax tree up to spans.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::{self, Write as _};

use crate::algebra::ConstantKind;
use crate::automaton::Label;
use crate::linalg::Scalar;

use super::ast::{AlphabetExpr, AutomatonLit, Decl, Expr, Program, TransitionBody};

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decl::Alphabet { name, expr, .. } => write!(f, "alphabet {name} = {expr}"),
            Decl::Automaton { name, lit, .. } => {
                write!(f, "automaton {name} ")?;
                write_lit(f, lit, "")
            }
            Decl::Let { name, expr, .. } => write!(f, "let {name} = {expr}"),
        }
    }
}

fn label(l: &Label) -> String {
    match l.components() {
        [atom] => atom.clone(),
        parts => format!("({})", parts.join(", ")),
    }
}

impl fmt::Display for AlphabetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphabetExpr::Ref { name, .. } => f.write_str(name),
            AlphabetExpr::Set { labels, .. } => {
                let items: Vec<String> = labels.iter().map(label).collect();
                write!(f, "{{{}}}", items.join(", "))
            }
            AlphabetExpr::Product(parts) => {
                for (k, p) in parts.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" * ")?;
                    }
                    if matches!(p, AlphabetExpr::Product(_)) {
                        write!(f, "({p})")?;
                    } else {
                        write!(f, "{p}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

fn write_lit(f: &mut fmt::Formatter<'_>, lit: &AutomatonLit, indent: &str) -> fmt::Result {
    writeln!(f, ": {} -> {} {{", lit.left, lit.right)?;
    writeln!(f, "{indent}    dim {};", lit.dim)?;
    if let Some(names) = &lit.basis {
        writeln!(f, "{indent}    basis {{{}}};", names.join(", "))?;
    }
    for t in &lit.transitions {
        write!(f, "{indent}    t({}, {}) = ", label(&t.left), label(&t.right))?;
        match &t.body {
            TransitionBody::Matrix(rows) => {
                let rows: Vec<String> = rows
                    .iter()
                    .map(|r| format!("[{}]", r.iter().map(|z| scalar(*z)).collect::<Vec<_>>().join(", ")))
                    .collect();
                write!(f, "[{}]", rows.join(", "))?;
            }
            TransitionBody::Edges(edges) => {
                let items: Vec<String> = edges.iter().map(|(a, b)| format!("{a} -> {b}")).collect();
                write!(f, "{{{}}}", items.join(", "))?;
            }
        }
        writeln!(f, ";")?;
    }
    write!(f, "{indent}}}")
}

/// Renders a scalar in the source syntax: `1.0`, `-0.5i`, `isqrt2`,
/// `0.5-2.0i`.
pub(crate) fn scalar(z: Scalar) -> String {
    fn magnitude(x: f64) -> String {
        if x == FRAC_1_SQRT_2 {
            "isqrt2".to_string()
        } else {
            format!("{x:?}")
        }
    }
    fn imag(y: f64) -> String {
        let m = magnitude(y.abs());
        if m == "isqrt2" {
            "isqrt2 i".to_string()
        } else {
            format!("{m}i")
        }
    }
    let (re, im) = (z.re, z.im);
    if im == 0.0 {
        let sign = if re.is_sign_negative() { "-" } else { "" };
        return format!("{sign}{}", magnitude(re.abs()));
    }
    let sign = if im < 0.0 { "-" } else { "" };
    if re == 0.0 && !re.is_sign_negative() {
        return format!("{sign}{}", imag(im));
    }
    let mut out = String::new();
    let re_sign = if re.is_sign_negative() { "-" } else { "" };
    let _ = write!(out, "{re_sign}{}", magnitude(re.abs()));
    out.push(if im < 0.0 { '-' } else { '+' });
    out.push_str(&imag(im));
    out
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Series(..) => 1,
        Expr::Parallel(..) => 2,
        _ => 3,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Ref { name, .. } => f.write_str(name),
            Expr::Parallel(l, r, _) | Expr::Series(l, r, _) => {
                let p = precedence(self);
                let op = if p == 1 { " ; " } else { " * " };
                write_operand(f, l, precedence(l) < p)?;
                f.write_str(op)?;
                // Both operators are left-associative.
                write_operand(f, r, precedence(r) <= p)
            }
            Expr::Const { kind, args, .. } => {
                let args: Vec<String> = args.iter().map(ToString::to_string).collect();
                match kind {
                    ConstantKind::DropEps(k) | ConstantKind::InsertEps(k) => {
                        write!(f, "{kind}({}, {k})", args.join(", "))
                    }
                    _ => write!(f, "{kind}({})", args.join(", ")),
                }
            }
            Expr::Rel { domain, codomain, pairs, .. } => {
                let items: Vec<String> =
                    pairs.iter().map(|(a, b)| format!("{} -> {}", label(a), label(b))).collect();
                write!(f, "rel({domain}, {codomain}) {{{}}}", items.join(", "))
            }
            Expr::Lit(lit) => {
                f.write_str("automaton ")?;
                write_lit(f, lit, "")
            }
        }
    }
}
