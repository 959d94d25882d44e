use std::fmt::Write;

use crate::circuit::{BoxedCircuit, Label, Sort};
use crate::syntax::{occurs_free_type, Constant, Declaration, Term, TermKind, Type, ANON};

fn label(l: &Label) -> String {
    match l.sort {
        Sort::Qubit => format!("ℓ{}", l.id),
        Sort::Bit => format!("ℓb{}", l.id),
    }
}

fn labels(ls: &[Label]) -> String {
    ls.iter().map(label).collect::<Vec<_>>().join(", ")
}

pub fn pretty_type(ty: &Type) -> String {
    let mut s = String::new();
    ty_top(&mut s, ty);
    s
}

fn dependent(x: &str, body: &Type) -> bool {
    x != ANON && occurs_free_type(x, body)
}

fn ty_top(s: &mut String, ty: &Type) {
    match ty {
        Type::Pi(x, a, b) | Type::Arrow(x, a, b) => {
            let arrow = if matches!(ty, Type::Pi(..)) {
                "-o"
            } else {
                "->"
            };
            if dependent(x, b) {
                let _ = write!(s, "({x} : ");
                ty_top(s, a);
                s.push_str(") ");
            } else {
                ty_tensor(s, a);
                s.push(' ');
            }
            s.push_str(arrow);
            s.push(' ');
            ty_top(s, b);
        }
        _ => ty_tensor(s, ty),
    }
}

fn ty_tensor(s: &mut String, ty: &Type) {
    match ty {
        Type::Tensor(x, a, b) => {
            if dependent(x, b) {
                let _ = write!(s, "({x} : ");
                ty_top(s, a);
                s.push(')');
            } else {
                ty_app(s, a);
            }
            s.push_str(" * ");
            ty_tensor(s, b);
        }
        Type::Pi(..) | Type::Arrow(..) => {
            s.push('(');
            ty_top(s, ty);
            s.push(')');
        }
        _ => ty_app(s, ty),
    }
}

fn ty_app(s: &mut String, ty: &Type) {
    match ty {
        Type::List(a) => {
            s.push_str("List ");
            ty_atom(s, a);
        }
        Type::Vec(a, r) => {
            s.push_str("Vec ");
            ty_atom(s, a);
            s.push(' ');
            term_atom(s, r);
        }
        _ => ty_atom(s, ty),
    }
}

fn ty_atom(s: &mut String, ty: &Type) {
    match ty {
        Type::Qubit => s.push_str("Qubit"),
        Type::Bit => s.push_str("Bit"),
        Type::Unit => s.push_str("Unit"),
        Type::Nat => s.push_str("Nat"),
        Type::Bang(a) => {
            s.push('!');
            ty_atom(s, a);
        }
        Type::Circ(a, b) => {
            s.push_str("Circ(");
            ty_top(s, a);
            s.push_str(", ");
            ty_top(s, b);
            s.push(')');
        }
        _ => {
            s.push('(');
            ty_top(s, ty);
            s.push(')');
        }
    }
}

/// Renders a term in concrete syntax. Internal forms use their internal
/// spellings (`\'`, `@`, `force'`, `apply'`, labels, `#circ`).
pub fn pretty_term(t: &Term) -> String {
    let mut s = String::new();
    term_top(&mut s, t);
    s
}

fn term_top(s: &mut String, t: &Term) {
    match &*t.kind {
        TermKind::Lam(..) | TermKind::LamPrime(..) => {
            let prime = matches!(&*t.kind, TermKind::LamPrime(..));
            s.push_str(if prime { "\\'" } else { "\\" });
            let mut xs: Vec<&str> = Vec::new();
            let mut cur = t;
            while let (TermKind::Lam(x, b), false) | (TermKind::LamPrime(x, b), true) =
                (&*cur.kind, prime)
            {
                xs.push(x);
                cur = b;
            }
            s.push_str(&xs.join(" "));
            s.push_str(" -> ");
            term_top(s, cur);
        }
        TermKind::LetPair(x, y, n, m) => {
            let _ = write!(s, "let ({x}, {y}) = ");
            term_top(s, n);
            s.push_str(" in ");
            term_top(s, m);
        }
        TermKind::Case(scrutinee, branches) => {
            s.push_str("case ");
            term_top(s, scrutinee);
            s.push_str(" of { ");
            for (i, b) in branches.iter().enumerate() {
                if i > 0 {
                    s.push_str(" ; ");
                }
                s.push_str(b.con.name());
                for x in &b.binders {
                    s.push(' ');
                    s.push_str(x);
                }
                s.push_str(" -> ");
                term_top(s, &b.body);
            }
            s.push_str(" }");
        }
        _ => term_at(s, t),
    }
}

fn term_at(s: &mut String, t: &Term) {
    match &*t.kind {
        TermKind::AppPrime(f, a) => {
            term_at(s, f);
            s.push_str(" @ ");
            if matches!(&*a.kind, TermKind::AppPrime(..)) {
                term_paren(s, a);
            } else {
                term_app(s, a);
            }
        }
        _ => term_app(s, t),
    }
}

fn term_paren(s: &mut String, t: &Term) {
    s.push('(');
    term_top(s, t);
    s.push(')');
}

fn is_list_literal(t: &Term) -> Option<Vec<&Term>> {
    let mut items = Vec::new();
    let mut cur = t;
    loop {
        match &*cur.kind {
            TermKind::Const(Constant::Nil, args) if args.is_empty() => return Some(items),
            TermKind::Const(Constant::Cons, args) if args.len() == 2 => {
                items.push(&args[0]);
                cur = &args[1];
            }
            _ => return None,
        }
    }
}

fn term_app(s: &mut String, t: &Term) {
    match &*t.kind {
        TermKind::App(f, a) => {
            match &*f.kind {
                TermKind::App(..)
                | TermKind::Force(_)
                | TermKind::ForcePrime(_)
                | TermKind::Lift(_)
                | TermKind::Box(..) => term_app(s, f),
                TermKind::Const(..) => term_paren(s, f),
                _ => term_atom(s, f),
            }
            s.push(' ');
            term_atom(s, a);
        }
        TermKind::Const(c, args) if !args.is_empty() => {
            if t.as_numeral().is_some() || is_list_literal(t).is_some() {
                return term_atom(s, t);
            }
            s.push_str(c.name());
            for a in args {
                s.push(' ');
                term_atom(s, a);
            }
        }
        TermKind::Lift(m) => {
            s.push_str("lift ");
            term_atom(s, m);
        }
        TermKind::Force(m) => {
            s.push_str("force ");
            term_atom(s, m);
        }
        TermKind::ForcePrime(m) => {
            s.push_str("force' ");
            term_atom(s, m);
        }
        TermKind::Box(ty, m) => {
            s.push_str("box[");
            ty_top(s, ty);
            s.push_str("] ");
            term_atom(s, m);
        }
        _ => term_atom(s, t),
    }
}

fn term_atom(s: &mut String, t: &Term) {
    if let Some(n) = t.as_numeral() {
        let _ = write!(s, "{n}");
        return;
    }
    if let Some(items) = is_list_literal(t) {
        s.push('[');
        for (i, h) in items.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            term_top(s, h);
        }
        s.push(']');
        return;
    }
    match &*t.kind {
        TermKind::Unit => s.push_str("unit"),
        TermKind::Var(x) => s.push_str(x),
        TermKind::Label(l) => s.push_str(&label(l)),
        TermKind::Const(c, args) if args.is_empty() => s.push_str(c.name()),
        TermKind::Pair(a, b) => {
            s.push('(');
            term_top(s, a);
            let mut cur = b;
            while let TermKind::Pair(a2, b2) = &*cur.kind {
                s.push_str(", ");
                term_top(s, a2);
                cur = b2;
            }
            s.push_str(", ");
            term_top(s, cur);
            s.push(')');
        }
        TermKind::Apply(m, n) | TermKind::ApplyPrime(m, n) => {
            let prime = matches!(&*t.kind, TermKind::ApplyPrime(..));
            s.push_str(if prime { "apply'(" } else { "apply(" });
            term_top(s, m);
            s.push_str(", ");
            term_top(s, n);
            s.push(')');
        }
        TermKind::Boxed(b) => boxed(s, b),
        _ => term_paren(s, t),
    }
}

fn boxed(s: &mut String, b: &BoxedCircuit) {
    s.push_str("#circ(");
    term_top(s, &b.input);
    s.push_str(" ; [");
    for (i, g) in b.circuit.gates.iter().enumerate() {
        if i > 0 {
            s.push_str("; ");
        }
        s.push_str(g.kind.name());
        if !g.inputs.is_empty() {
            s.push(' ');
            s.push_str(&labels(&g.inputs));
        }
        s.push_str(" ->");
        if !g.outputs.is_empty() {
            s.push(' ');
            s.push_str(&labels(&g.outputs));
        }
    }
    s.push_str("] ; ");
    term_top(s, &b.output);
    s.push(')');
}

/// `name : type` followed by `name = body`, each on its own line.
pub fn pretty_decl(d: &Declaration) -> String {
    let mut s = String::new();
    if let Some(ty) = &d.ty {
        let _ = writeln!(s, "{} : {}", d.name, pretty_type(ty));
    }
    let _ = writeln!(s, "{} = {}", d.name, pretty_term(&d.body));
    s
}

pub fn pretty_program(decls: &[Declaration]) -> String {
    decls.iter().map(pretty_decl).collect::<Vec<_>>().join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;
    use crate::front::{parse_term, parse_type};
    use crate::syntax::{alpha_eq, alpha_eq_type};

    #[test]
    fn types() {
        let conv = Type::bang(Type::pi(
            "x",
            Type::list(Type::Qubit),
            Type::vec(Type::Qubit, Term::to_nat(Term::var("x"))),
        ));
        assert_eq!(
            pretty_type(&conv),
            "!((x : List Qubit) -o Vec Qubit (toNat x))"
        );
        assert_eq!(
            pretty_type(&Type::pi("x", Type::Qubit, Type::Qubit)),
            "Qubit -o Qubit"
        );
        assert_eq!(
            pretty_type(&Type::circ(Type::pair(Type::Qubit, Type::Qubit), Type::Bit)),
            "Circ(Qubit * Qubit, Bit)"
        );
        assert_eq!(
            pretty_type(&Type::lolli(
                Type::lolli(Type::Unit, Type::Unit),
                Type::Unit
            )),
            "(Unit -o Unit) -o Unit"
        );
    }

    #[test]
    fn terms() {
        assert_eq!(pretty_term(&Term::force_prime(Term::var("x"))), "force' x");
        assert_eq!(pretty_term(&Term::nat(3)), "3");
        assert_eq!(
            pretty_term(&Term::list(vec![Term::unit(), Term::unit()])),
            "[unit, unit]"
        );
        let t = Term::app(Term::force(Term::var("conv")), Term::var("ys"));
        assert_eq!(pretty_term(&t), "force conv ys");
        let t = Term::force(Term::app(Term::var("conv"), Term::var("ys")));
        assert_eq!(pretty_term(&t), "force (conv ys)");
        let t = Term::lam(
            "x",
            Term::lam("y", Term::pair(Term::var("x"), Term::var("y"))),
        );
        assert_eq!(pretty_term(&t), "\\x y -> (x, y)");
        let t = Term::apply(Term::gate(GateKind::H), Term::label(Label::qubit(0)));
        assert_eq!(pretty_term(&t), "apply(H, ℓ0)");
        let t = Term::app(Term::constant(Constant::Succ, vec![]), Term::var("x"));
        assert_eq!(pretty_term(&t), "(Succ) x");
    }

    #[test]
    fn round_trips() {
        for src in [
            "\\x -> x",
            "case n of { Zero -> v ; Succ m -> VCons (apply(H, q)) (hs m qs) }",
            "let (a, b) = apply(CNOT, (a, b)) in (b, a)",
            "box[Vec Qubit n] \\v -> force hs n v",
            "force' add @ n @ (force' f @ m)",
            "#circ((ℓ0, ℓ1) ; [CNOT ℓ0, ℓ1 -> ℓ2, ℓ3; Meas ℓ2 -> ℓb4] ; (ℓb4, ℓ3))",
            "f (\\x -> x) (let (a, b) = p in a)",
        ] {
            let t = parse_term(src, true).unwrap();
            let printed = pretty_term(&t);
            let back = parse_term(&printed, true).unwrap();
            assert!(alpha_eq(&t, &back), "{src} => {printed}");
        }
        for src in [
            "(n : Nat) -o Vec Qubit n -o Vec Qubit n",
            "(n : Nat) * Vec Bit n",
            "!(Circ(Qubit, Qubit)) -> Nat",
            "(Qubit * Qubit) * Qubit -o Unit",
        ] {
            let t = parse_type(src, true).unwrap();
            let printed = pretty_type(&t);
            let back = parse_type(&printed, true).unwrap();
            assert!(alpha_eq_type(&t, &back), "{src} => {printed}");
        }
    }
}
