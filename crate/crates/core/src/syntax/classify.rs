use super::ast::{Term, TermKind, Type};
use super::subst::occurs_free_type;

/// Parameter types: `Unit | Nat | !A | Circ(S, U) | List P | Vec P R |
/// (x : P1) * P2 | (x : P1) -> P2`.
pub fn is_parameter_type(ty: &Type) -> bool {
    match ty {
        Type::Unit | Type::Nat | Type::Bang(_) | Type::Circ(..) => true,
        Type::List(p) | Type::Vec(p, _) => is_parameter_type(p),
        Type::Tensor(_, a, b) | Type::Arrow(_, a, b) => {
            is_parameter_type(a) && is_parameter_type(b)
        }
        Type::Qubit | Type::Bit | Type::Pi(..) => false,
    }
}

/// Simple types: `Unit | Qubit | Bit | S1 * S2 | Vec S R`. Tensors must be
/// non-dependent.
pub fn is_simple_type(ty: &Type) -> bool {
    match ty {
        Type::Unit | Type::Qubit | Type::Bit => true,
        Type::Tensor(x, a, b) => !occurs_free_type(x, b) && is_simple_type(a) && is_simple_type(b),
        Type::Vec(s, _) => is_simple_type(s),
        _ => false,
    }
}

/// Parameter terms: the state-free fragment that may appear inside types.
pub fn is_parameter_term(t: &Term) -> bool {
    match &*t.kind {
        TermKind::Unit | TermKind::Var(_) | TermKind::Lift(_) | TermKind::Boxed(_) => true,
        TermKind::Label(_)
        | TermKind::Lam(..)
        | TermKind::App(..)
        | TermKind::Force(_)
        | TermKind::Apply(..) => false,
        TermKind::Const(_, args) => args.iter().all(is_parameter_term),
        TermKind::LamPrime(_, r) | TermKind::ForcePrime(r) | TermKind::Box(_, r) => {
            is_parameter_term(r)
        }
        TermKind::AppPrime(a, b) | TermKind::Pair(a, b) | TermKind::ApplyPrime(a, b) => {
            is_parameter_term(a) && is_parameter_term(b)
        }
        TermKind::LetPair(_, _, n, m) => is_parameter_term(n) && is_parameter_term(m),
        TermKind::Case(s, branches) => {
            is_parameter_term(s) && branches.iter().all(|b| is_parameter_term(&b.body))
        }
    }
}

/// Values: variables, labels, abstractions, lifted terms, boxed circuits,
/// and pairs or saturated constructor applications of values.
pub fn is_value(t: &Term) -> bool {
    match &*t.kind {
        TermKind::Unit
        | TermKind::Var(_)
        | TermKind::Label(_)
        | TermKind::Lam(..)
        | TermKind::LamPrime(..)
        | TermKind::Lift(_)
        | TermKind::Boxed(_) => true,
        TermKind::Pair(a, b) => is_value(a) && is_value(b),
        TermKind::Const(c, args) => {
            c.is_constructor() && args.len() == c.arity() && args.iter().all(is_value)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Label;

    #[test]
    fn parameter_types() {
        assert!(is_parameter_type(&Type::bang(Type::lolli(
            Type::Qubit,
            Type::Qubit
        ))));
        assert!(!is_parameter_type(&Type::Qubit));
        assert!(!is_parameter_type(&Type::list(Type::Qubit)));
        assert!(is_parameter_type(&Type::list(Type::Unit)));
        assert!(is_parameter_type(&Type::circ(Type::Qubit, Type::Bit)));
        assert!(!is_parameter_type(&Type::lolli(Type::Unit, Type::Unit)));
    }

    #[test]
    fn simple_types() {
        assert!(is_simple_type(&Type::pair(Type::Qubit, Type::Qubit)));
        assert!(is_simple_type(&Type::vec(Type::Qubit, Term::nat(1))));
        assert!(!is_simple_type(&Type::list(Type::Qubit)));
        assert!(!is_simple_type(&Type::tensor(
            "n",
            Type::Nat,
            Type::vec(Type::Qubit, Term::var("n"))
        )));
    }

    #[test]
    fn parameter_terms() {
        assert!(is_parameter_term(&Term::to_nat(Term::var("x"))));
        assert!(!is_parameter_term(&Term::label(Label::qubit(0))));
        assert!(is_parameter_term(&Term::lift(Term::label(Label::qubit(0)))));
        assert!(!is_parameter_term(&Term::app(
            Term::var("f"),
            Term::var("x")
        )));
        assert!(is_parameter_term(&Term::app_prime(
            Term::var("f"),
            Term::var("x")
        )));
    }

    #[test]
    fn values() {
        assert!(is_value(&Term::nat(2)));
        assert!(is_value(&Term::pair(Term::unit(), Term::var("x"))));
        assert!(!is_value(&Term::to_nat(Term::nil())));
        assert!(!is_value(&Term::constant(
            super::super::Constant::Succ,
            vec![]
        )));
    }
}
