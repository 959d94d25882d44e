//! Generators and corpus access shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use pqd_core::circuit::{gate_circuit, GateKind, Label, LabelSupply};
use pqd_core::syntax::{Branch, Constant, Term, Type};
use proptest::prelude::*;

pub fn corpus_dir(kind: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(kind)
}

/// `(file name, source)` for every `.pqd` file under `corpus/<kind>`, sorted.
pub fn corpus(kind: &str) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(corpus_dir(kind))
        .expect("corpus directory")
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "pqd"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let src = std::fs::read_to_string(&p).expect("readable corpus file");
            (name, src)
        })
        .collect();
    out.sort();
    out
}

fn arb_name() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["x", "y", "z", "n", "q", "f", "xs"]).prop_map(String::from)
}

fn arb_binder() -> impl Strategy<Value = String> {
    prop_oneof![4 => arb_name(), 1 => Just("_".to_string())]
}

fn arb_gate() -> impl Strategy<Value = GateKind> {
    prop::sample::select(GateKind::ALL.to_vec())
}

fn arb_label() -> impl Strategy<Value = Label> {
    (0u32..6, any::<bool>()).prop_map(|(i, q)| if q { Label::qubit(i) } else { Label::bit(i) })
}

pub fn arb_simple_type() -> impl Strategy<Value = Type> {
    let leaf = prop_oneof![Just(Type::Qubit), Just(Type::Bit), Just(Type::Unit)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Type::pair(a, b)),
            (inner, 0usize..4).prop_map(|(a, n)| Type::vec(a, Term::nat(n))),
        ]
    })
}

/// Small parameter terms of the kind that appear inside types.
pub fn arb_index_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0usize..5).prop_map(Term::nat),
        arb_name().prop_map(|x| Term::var(&x)),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::succ),
            prop::collection::vec(Just(Term::unit()), 0..3)
                .prop_map(|xs| Term::to_nat(Term::list(xs))),
            (inner.clone(), inner).prop_map(|(f, a)| Term::app_prime(f, a)),
        ]
    })
}

pub fn arb_type() -> impl Strategy<Value = Type> {
    let leaf = prop_oneof![
        Just(Type::Qubit),
        Just(Type::Bit),
        Just(Type::Unit),
        Just(Type::Nat),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Type::list),
            inner.clone().prop_map(Type::bang),
            (inner.clone(), arb_index_term()).prop_map(|(a, r)| Type::vec(a, r)),
            (arb_binder(), inner.clone(), inner.clone()).prop_map(|(x, a, b)| Type::pi(&x, a, b)),
            (arb_binder(), inner.clone(), inner.clone())
                .prop_map(|(x, a, b)| Type::tensor(&x, a, b)),
            (arb_binder(), inner.clone(), inner).prop_map(|(x, a, b)| Type::arrow(&x, a, b)),
            (arb_simple_type(), arb_simple_type()).prop_map(|(s, u)| Type::circ(s, u)),
        ]
    })
}

fn boxed_gate(g: GateKind) -> Term {
    Term::boxed(gate_circuit(g, &mut LabelSupply::new()))
}

pub fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::unit()),
        arb_name().prop_map(|x| Term::var(&x)),
        arb_label().prop_map(Term::label),
        (0usize..4).prop_map(Term::nat),
        arb_gate().prop_map(Term::gate),
        arb_gate().prop_map(boxed_gate),
        Just(Term::nil()),
        Just(Term::vnil()),
    ];
    leaf.prop_recursive(5, 48, 3, |inner| {
        let t = || inner.clone();
        prop_oneof![
            (arb_binder(), t()).prop_map(|(x, m)| Term::lam(&x, m)),
            (t(), t()).prop_map(|(f, a)| Term::app(f, a)),
            t().prop_map(Term::lift),
            t().prop_map(Term::force),
            t().prop_map(Term::force_prime),
            (t(), t()).prop_map(|(a, b)| Term::pair(a, b)),
            (arb_binder(), arb_binder(), t(), t())
                .prop_map(|(x, y, n, m)| Term::let_pair(&x, &y, n, m)),
            (arb_binder(), t()).prop_map(|(x, m)| Term::lam_prime(&x, m)),
            (t(), t()).prop_map(|(f, a)| Term::app_prime(f, a)),
            (arb_simple_type(), t()).prop_map(|(s, m)| Term::boxt(s, m)),
            (t(), t()).prop_map(|(c, s)| Term::apply(c, s)),
            (t(), t()).prop_map(|(c, s)| Term::apply_prime(c, s)),
            t().prop_map(Term::succ),
            t().prop_map(Term::to_nat),
            (t(), t()).prop_map(|(h, r)| Term::cons(h, r)),
            (t(), t()).prop_map(|(h, r)| Term::vcons(h, r)),
            (t(), arb_binder(), t(), t()).prop_map(|(s, x, z, b)| Term::case(
                s,
                vec![
                    Branch {
                        con: Constant::Zero,
                        binders: vec![],
                        body: z
                    },
                    Branch {
                        con: Constant::Succ,
                        binders: vec![x.as_str().into()],
                        body: b
                    },
                ]
            )),
            (t(), arb_binder(), arb_binder(), t(), t()).prop_map(|(s, x, y, z, b)| Term::case(
                s,
                vec![
                    Branch {
                        con: Constant::Nil,
                        binders: vec![],
                        body: z
                    },
                    Branch {
                        con: Constant::Cons,
                        binders: vec![x.as_str().into(), y.as_str().into()],
                        body: b
                    },
                ]
            )),
        ]
    })
}
