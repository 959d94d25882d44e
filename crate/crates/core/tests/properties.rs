mod common;

use common::{arb_term, arb_type};
use pqd_core::front::{
    parse_program, parse_term, parse_type, pretty_program, pretty_term, pretty_type,
};
use pqd_core::shape::{shape_term, shape_type};
use pqd_core::syntax::{
    alpha_eq, alpha_eq_type, idx_add, idx_mul, is_parameter_term, is_parameter_type, Declaration,
    Index, Span, Term, TermKind, Type,
};
use proptest::prelude::*;

fn arb_index() -> impl Strategy<Value = Index> {
    prop::sample::select(vec![Index::Zero, Index::One, Index::Omega])
}

fn spans_within(t: &Term, out: &mut Vec<Span>) {
    out.push(t.span);
    let mut visit = |s: &Term| spans_within(s, out);
    match &*t.kind {
        TermKind::Unit | TermKind::Var(_) | TermKind::Label(_) | TermKind::Boxed(_) => {}
        TermKind::Const(_, args) => args.iter().for_each(visit),
        TermKind::Lam(_, m)
        | TermKind::LamPrime(_, m)
        | TermKind::Lift(m)
        | TermKind::Force(m)
        | TermKind::ForcePrime(m)
        | TermKind::Box(_, m) => visit(m),
        TermKind::App(a, b)
        | TermKind::AppPrime(a, b)
        | TermKind::Pair(a, b)
        | TermKind::Apply(a, b)
        | TermKind::ApplyPrime(a, b)
        | TermKind::LetPair(_, _, a, b) => {
            visit(a);
            visit(b);
        }
        TermKind::Case(s, bs) => {
            visit(s);
            bs.iter().for_each(|b| visit(&b.body));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn term_round_trip(t in arb_term()) {
        let text = pretty_term(&t);
        let back = parse_term(&text, true).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert!(alpha_eq(&t, &back), "{} reparsed as {}", text, pretty_term(&back));
    }

    #[test]
    fn type_round_trip(a in arb_type()) {
        let text = pretty_type(&a);
        let back = parse_type(&text, true).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert!(alpha_eq_type(&a, &back), "{} reparsed as {}", text, pretty_type(&back));
    }

    #[test]
    fn program_round_trip(t in arb_term(), a in arb_type()) {
        let decls = vec![Declaration {
            name: "f".into(),
            ty: Some(a),
            body: t,
            span: Span::default(),
            ty_span: Span::default(),
        }];
        let text = pretty_program(&decls);
        let back = pqd_core::front::parse_program_internal(&text)
            .map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
        prop_assert_eq!(back.len(), 1);
        prop_assert!(alpha_eq(&decls[0].body, &back[0].body));
        prop_assert!(alpha_eq_type(decls[0].ty.as_ref().unwrap(), back[0].ty.as_ref().unwrap()));
    }

    #[test]
    fn parsed_spans_lie_in_the_source(t in arb_term()) {
        let text = format!("f =\n  {}\n", pretty_term(&t));
        let lines = text.lines().count() as u32;
        let decls = pqd_core::front::parse_program_internal(&text).unwrap();
        let mut spans = Vec::new();
        spans_within(&decls[0].body, &mut spans);
        for s in spans {
            prop_assert!(!s.is_dummy());
            prop_assert!(s.start.line >= 1 && s.end.line <= lines);
            prop_assert!(s.start.offset <= s.end.offset && s.end.offset <= text.len());
        }
    }

    #[test]
    fn shape_is_idempotent(t in arb_term(), a in arb_type()) {
        let st = shape_term(&t);
        prop_assert!(alpha_eq(&shape_term(&st), &st));
        prop_assert!(is_parameter_term(&st));
        let sa = shape_type(&a);
        prop_assert!(alpha_eq_type(&shape_type(&sa), &sa));
        prop_assert!(is_parameter_type(&sa));
    }

    #[test]
    fn shape_fixes_parameter_items(t in arb_term(), a in arb_type()) {
        if is_parameter_term(&t) {
            prop_assert!(alpha_eq(&shape_term(&t), &t));
        }
        if is_parameter_type(&a) {
            prop_assert!(alpha_eq_type(&shape_type(&a), &a));
        }
    }

    #[test]
    fn index_laws(a in arb_index(), b in arb_index(), c in arb_index()) {
        prop_assert_eq!(idx_add(a, b), idx_add(b, a));
        prop_assert_eq!(idx_mul(a, b), idx_mul(b, a));
        prop_assert_eq!(idx_add(idx_add(a, b), c), idx_add(a, idx_add(b, c)));
        prop_assert_eq!(idx_mul(idx_mul(a, b), c), idx_mul(a, idx_mul(b, c)));
        prop_assert_eq!(idx_mul(a, idx_add(b, c)), idx_add(idx_mul(a, b), idx_mul(a, c)));
        prop_assert_eq!(idx_add(Index::Zero, a), a);
        prop_assert_eq!(idx_mul(Index::One, a), a);
        prop_assert_eq!(idx_mul(Index::Zero, a), Index::Zero);
    }
}

#[test]
fn pretty_output_of_the_corpus_reparses() {
    for (name, src) in common::corpus("ok") {
        let decls = parse_program(&src).unwrap();
        let text = pretty_program(&decls);
        let back = parse_program(&text).unwrap_or_else(|e| panic!("{name}: {}", e.render(&name)));
        assert_eq!(decls.len(), back.len(), "{name}");
        for (a, b) in decls.iter().zip(&back) {
            assert!(alpha_eq(&a.body, &b.body), "{name}: {}", a.name);
        }
    }
}

#[test]
fn parameter_types_are_fixed_by_shape() {
    let t: Type = parse_type("!((x : List Qubit) -o Vec Qubit (toNat x))", false).unwrap();
    assert!(alpha_eq_type(&shape_type(&t), &t));
}
