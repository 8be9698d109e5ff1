use std::f64::consts::FRAC_1_SQRT_2;

use cqa::algebra::ConstantKind;
use cqa::dsl::ast::{AlphabetExpr, AutomatonLit, Decl, Expr, TransitionBody, TransitionDecl};
use cqa::dsl::{evaluate, load, parse, EvalErrorKind, Evaluator, Program, Span, Value};
use cqa::teleport::{build_component, entangling_block};
use cqa::{build_tp, Component, CorrectionSign, Label, Scalar};
use proptest::prelude::*;

fn program(name: &str) -> String {
    std::fs::read_to_string(format!("{}/programs/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn teleport_program_matches_the_built_components() {
    let p = parse(&program("teleport.cqa")).unwrap();
    let mut ev = Evaluator::new(&p);
    for c in Component::ALL {
        let built = build_component(c, CorrectionSign::AsPrinted);
        let from_source = ev.automaton(c.name()).unwrap();
        assert!(from_source.equals(&built, 0.0), "{}", c.name());
        assert_eq!(from_source.basis_names(), built.basis_names(), "{}", c.name());
    }
    assert!(ev.automaton("Entangle").unwrap().equals(&entangling_block(), 0.0));
    assert!(ev.automaton("TP").unwrap().equals(&build_tp(CorrectionSign::AsPrinted), 0.0));
}

#[test]
fn frobenius_program() {
    let p = parse(&program("frobenius.cqa")).unwrap();
    let mut ev = Evaluator::new(&p);
    let mid = ev.automaton("Mid").unwrap();
    assert!(ev.automaton("Lhs").unwrap().equals(&mid, 0.0));
    assert!(ev.automaton("Rhs").unwrap().equals(&mid, 0.0));
    assert!(ev.automaton("Snake").unwrap().equals(&ev.automaton("Id").unwrap(), 0.0));
}

#[test]
fn every_declaration_evaluates() {
    for file in ["teleport.cqa", "frobenius.cqa"] {
        let p = parse(&program(file)).unwrap();
        let values = Evaluator::new(&p).all().unwrap();
        assert_eq!(values.len(), p.decls.len());
        let alphabets = values.iter().filter(|(_, v)| matches!(v, Value::Alphabet(_))).count();
        assert!(alphabets >= 1, "{file}");
    }
}

#[test]
fn printed_programs_parse_back() {
    for file in ["teleport.cqa", "frobenius.cqa"] {
        let p = parse(&program(file)).unwrap();
        let again = parse(&p.to_string()).unwrap();
        assert_eq!(again.without_spans(), p.without_spans(), "{file}");
    }
}

#[test]
fn load_reports_positions() {
    let err = load("alphabet A = {eps}\nlet X = id(A) ; ;", "X").unwrap_err();
    assert!(err.starts_with("2:17:"), "{err}");
    let err = load("alphabet A = {eps}\nalphabet B = {a}\nlet X = id(A) ; id(B)", "X").unwrap_err();
    assert!(err.starts_with("3:9:") && err.contains("interface mismatch"), "{err}");
    let err = load("alphabet A = {eps}", "Missing").unwrap_err();
    assert!(err.contains("unknown name `Missing`"), "{err}");
}

#[test]
fn evaluation_errors_point_at_the_transition() {
    let src = "automaton P : {eps} -> {eps} {\n    dim 2;\n    t(eps, eps) = [[1, 0], [0, 1]];\n    t(eps, eps) = [[0, 1], [1, 0]];\n}";
    let e = evaluate(&parse(src).unwrap(), "P").unwrap_err();
    assert!(matches!(*e.kind, EvalErrorKind::Automaton(_)));
    assert_eq!((e.span.start.line, e.span.start.col), (4, 5));

    let src = "automaton P : {eps} -> {eps} { dim 2; t(eps, eps) = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]; }";
    let e = evaluate(&parse(src).unwrap(), "P").unwrap_err();
    assert!(e.to_string().contains("expected 2x2"), "{e}");
}

#[test]
fn comments_and_whitespace_are_insignificant() {
    let a = parse("alphabet A={eps,a}let X=id(A)*id(A);id(A*A)").unwrap();
    let b = parse("# header\nalphabet A = { eps , a }   # trailing\n\nlet X =\n  id(A) * id(A)\n  ; id(A * A)\n").unwrap();
    assert_eq!(a.without_spans(), b.without_spans());
}

// Random syntax trees for the print/parse round trip.

fn span() -> Span {
    Span::default()
}

fn atom_name() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["eps", "a", "b1", "00", "11", "x_y", "not", "m0"]).prop_map(String::from)
}

fn label() -> impl Strategy<Value = Label> {
    prop::collection::vec(atom_name(), 1..=3).prop_map(Label::tuple)
}

fn alphabet_expr() -> impl Strategy<Value = AlphabetExpr> {
    let leaf = prop_oneof![
        Just(AlphabetExpr::Ref { name: "A".into(), span: span() }),
        prop::collection::vec(label(), 1..4).prop_map(|labels| AlphabetExpr::Set { labels, span: span() }),
    ];
    leaf.prop_recursive(2, 6, 3, |inner| prop::collection::vec(inner, 2..=3).prop_map(AlphabetExpr::Product))
}

fn real() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(0.0),
        Just(1.0),
        Just(-1.0),
        Just(FRAC_1_SQRT_2),
        Just(-FRAC_1_SQRT_2),
        Just(5e-324),
        Just(1.7976931348623157e308),
        -1e6f64..1e6,
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
    ]
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (real(), real()).prop_map(|(re, im)| Scalar::new(re, im))
}

fn basis_name() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["u", "v", "x1", "y2", "0", "10"]).prop_map(String::from)
}

fn transition() -> impl Strategy<Value = TransitionDecl> {
    let body = prop_oneof![
        (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(scalar(), c), r).prop_map(TransitionBody::Matrix)
        }),
        prop::collection::vec((basis_name(), basis_name()), 0..3).prop_map(TransitionBody::Edges),
    ];
    (label(), label(), body).prop_map(|(left, right, body)| TransitionDecl { left, right, body, span: span() })
}

fn literal() -> impl Strategy<Value = AutomatonLit> {
    (
        alphabet_expr(),
        alphabet_expr(),
        1usize..5,
        prop::option::of(prop::collection::vec(basis_name(), 1..4)),
        prop::collection::vec(transition(), 0..3),
    )
        .prop_map(|(left, right, dim, basis, transitions)| AutomatonLit {
            left,
            right,
            dim,
            basis,
            transitions,
            span: span(),
        })
}

fn constant() -> impl Strategy<Value = Expr> {
    let kind = prop_oneof![
        Just(ConstantKind::Identity),
        Just(ConstantKind::Diagonal),
        Just(ConstantKind::Codiagonal),
        Just(ConstantKind::Eta),
        Just(ConstantKind::Epsilon),
        Just(ConstantKind::Twist),
        (0usize..3).prop_map(ConstantKind::DropEps),
        (0usize..3).prop_map(ConstantKind::InsertEps),
    ];
    (kind, alphabet_expr(), alphabet_expr()).prop_map(|(kind, a, b)| {
        let args = if kind == ConstantKind::Twist { vec![a, b] } else { vec![a] };
        Expr::Const { kind, args, span: span() }
    })
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        3 => Just(Expr::Ref { name: "P".into(), span: span() }),
        3 => constant(),
        1 => (alphabet_expr(), alphabet_expr(), prop::collection::vec((label(), label()), 0..3)).prop_map(
            |(domain, codomain, pairs)| Expr::Rel { domain, codomain, pairs, span: span() }
        ),
        1 => literal().prop_map(|l| Expr::Lit(Box::new(l))),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::Parallel(Box::new(l), Box::new(r), span())),
            (inner.clone(), inner).prop_map(|(l, r)| Expr::Series(Box::new(l), Box::new(r), span())),
        ]
    })
}

fn random_program() -> impl Strategy<Value = Program> {
    (alphabet_expr(), literal(), prop::collection::vec(expr(), 1..4)).prop_map(|(a, lit, exprs)| {
        let a = match a {
            // `A` may not refer to itself.
            AlphabetExpr::Ref { .. } => AlphabetExpr::Set { labels: vec![Label::idle()], span: span() },
            other if mentions_a(&other) => AlphabetExpr::Set { labels: vec![Label::idle()], span: span() },
            other => other,
        };
        let mut decls = vec![
            Decl::Alphabet { name: "A".into(), expr: a, span: span() },
            Decl::Automaton { name: "P".into(), lit, span: span() },
        ];
        for (k, expr) in exprs.into_iter().enumerate() {
            decls.push(Decl::Let { name: format!("X{k}"), expr, span: span() });
        }
        Program { decls }
    })
}

fn mentions_a(a: &AlphabetExpr) -> bool {
    match a {
        AlphabetExpr::Ref { .. } => true,
        AlphabetExpr::Set { .. } => false,
        AlphabetExpr::Product(parts) => parts.iter().any(mentions_a),
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, ..ProptestConfig::default() })]

    #[test]
    fn print_then_parse_is_the_identity(p in random_program()) {
        let text = p.to_string();
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back.without_spans(), p);
    }

    #[test]
    fn arbitrary_text_never_panics(src in "[a-z0-9{}()\\[\\],;:=*+\\-> \n#.]{0,80}") {
        if let Ok(p) = parse(&src) {
            let _ = Evaluator::new(&p).all();
        }
    }
}
