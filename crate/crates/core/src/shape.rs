//! The shape operation: erases state content, mapping types to parameter
//! types and terms to parameter terms. It is a meta-operation like
//! substitution, not a term former.

use std::rc::Rc;

use crate::syntax::{
    is_parameter_term, is_parameter_type, Binding, Branch, Context, Term, TermKind, Type,
};

pub fn shape_type(ty: &Type) -> Type {
    if is_parameter_type(ty) {
        return ty.clone();
    }
    match ty {
        Type::Qubit | Type::Bit => Type::Unit,
        Type::Pi(x, a, b) | Type::Arrow(x, a, b) => {
            Type::Arrow(x.clone(), Rc::new(shape_type(a)), Rc::new(shape_type(b)))
        }
        Type::Tensor(x, a, b) => {
            Type::Tensor(x.clone(), Rc::new(shape_type(a)), Rc::new(shape_type(b)))
        }
        Type::List(a) => Type::List(Rc::new(shape_type(a))),
        Type::Vec(a, r) => Type::Vec(Rc::new(shape_type(a)), r.clone()),
        Type::Unit | Type::Nat | Type::Bang(_) | Type::Circ(..) => ty.clone(),
    }
}

pub fn shape_term(t: &Term) -> Term {
    if is_parameter_term(t) {
        return t.clone();
    }
    let kind = match &*t.kind {
        TermKind::Label(_) => TermKind::Unit,
        TermKind::Lam(x, m) | TermKind::LamPrime(x, m) => {
            TermKind::LamPrime(x.clone(), shape_term(m))
        }
        TermKind::App(m, n) | TermKind::AppPrime(m, n) => {
            TermKind::AppPrime(shape_term(m), shape_term(n))
        }
        TermKind::Force(m) | TermKind::ForcePrime(m) => TermKind::ForcePrime(shape_term(m)),
        TermKind::Apply(m, n) | TermKind::ApplyPrime(m, n) => {
            TermKind::ApplyPrime(shape_term(m), shape_term(n))
        }
        TermKind::Pair(m, n) => TermKind::Pair(shape_term(m), shape_term(n)),
        TermKind::LetPair(x, y, n, m) => {
            TermKind::LetPair(x.clone(), y.clone(), shape_term(n), shape_term(m))
        }
        TermKind::Const(c, args) => TermKind::Const(*c, args.iter().map(shape_term).collect()),
        TermKind::Box(s, m) => TermKind::Box(s.clone(), shape_term(m)),
        TermKind::Case(s, branches) => TermKind::Case(
            shape_term(s),
            branches
                .iter()
                .map(|b| Branch {
                    con: b.con,
                    binders: b.binders.clone(),
                    body: shape_term(&b.body),
                })
                .collect(),
        ),
        TermKind::Unit | TermKind::Var(_) | TermKind::Lift(_) | TermKind::Boxed(_) => {
            return t.clone()
        }
    };
    Term::new(kind, t.span)
}

/// Shapes every type in the context; indices are kept.
pub fn shape_ctx(g: &Context) -> Context {
    Context {
        bindings: g
            .iter()
            .map(|b| Binding {
                binder: b.binder.clone(),
                index: b.index,
                ty: shape_type(&b.ty),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{GateKind, Label};
    use crate::syntax::{alpha_eq, alpha_eq_type, Index};

    #[test]
    fn shape_of_types() {
        assert!(alpha_eq_type(&shape_type(&Type::Qubit), &Type::Unit));
        assert!(alpha_eq_type(&shape_type(&Type::Bit), &Type::Unit));
        assert!(alpha_eq_type(
            &shape_type(&Type::list(Type::Qubit)),
            &Type::list(Type::Unit)
        ));
        let bang = Type::bang(Type::lolli(Type::Qubit, Type::Qubit));
        assert!(alpha_eq_type(&shape_type(&bang), &bang));
        let conv = Type::pi(
            "x",
            Type::list(Type::Qubit),
            Type::vec(Type::Qubit, Term::to_nat(Term::var("x"))),
        );
        let expect = Type::arrow(
            "x",
            Type::list(Type::Unit),
            Type::vec(Type::Unit, Term::to_nat(Term::var("x"))),
        );
        assert!(alpha_eq_type(&shape_type(&conv), &expect));
    }

    #[test]
    fn shape_of_terms() {
        let l = Term::label(Label::qubit(7));
        assert!(alpha_eq(&shape_term(&l), &Term::unit()));
        let lifted = Term::lift(Term::apply(
            Term::gate(GateKind::H),
            Term::label(Label::qubit(0)),
        ));
        assert!(alpha_eq(&shape_term(&lifted), &lifted));
        assert!(alpha_eq(
            &shape_term(&Term::force(Term::var("x"))),
            &Term::force_prime(Term::var("x"))
        ));
        let lam = Term::lam("x", Term::apply(Term::gate(GateKind::H), Term::var("x")));
        let expect = Term::lam_prime(
            "x",
            Term::apply_prime(Term::gate(GateKind::H), Term::var("x")),
        );
        assert!(alpha_eq(&shape_term(&lam), &expect));
    }

    #[test]
    fn shape_of_contexts() {
        let g = Context::new().with_var("x", Index::One, Type::Qubit);
        let s = shape_ctx(&g);
        assert_eq!(s.bindings[0].index, Index::One);
        assert!(alpha_eq_type(&s.bindings[0].ty, &Type::Unit));
        let g = Context::new().with_var("x", Index::Omega, Type::bang(Type::Nat));
        assert!(alpha_eq_type(
            &shape_ctx(&g).bindings[0].ty,
            &Type::bang(Type::Nat)
        ));
        assert!(shape_ctx(&Context::new()).is_empty());
    }
}
