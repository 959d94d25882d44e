//! Free names, capture-avoiding substitution and alpha-equivalence.
//!
//! Binders are plain names. When substitution would capture a free variable
//! of the replacement, the binder is renamed to the first `stem<k>` that is
//! free in neither the body nor the replacement, which keeps the result a
//! deterministic function of its inputs.

use std::collections::BTreeSet;
use std::rc::Rc;

use super::ast::{name, Branch, Name, Term, TermKind, Type};
use crate::circuit::Label;

#[derive(Default, Debug, Clone, PartialEq, Eq)]
pub struct FreeNames {
    pub vars: BTreeSet<Name>,
    pub labels: BTreeSet<Label>,
}

/// Free variables and free labels of a term. Labels inside boxed circuits
/// are internal to the circuit and are not reported.
pub fn free_names(t: &Term) -> FreeNames {
    let mut out = FreeNames::default();
    collect_term(t, &mut Vec::new(), &mut out);
    out
}

pub fn free_names_type(ty: &Type) -> FreeNames {
    let mut out = FreeNames::default();
    collect_type(ty, &mut Vec::new(), &mut out);
    out
}

pub fn free_vars(t: &Term) -> BTreeSet<Name> {
    free_names(t).vars
}

pub fn free_vars_type(ty: &Type) -> BTreeSet<Name> {
    free_names_type(ty).vars
}

pub fn occurs_free(x: &str, t: &Term) -> bool {
    free_vars(t).iter().any(|v| &**v == x)
}

pub fn occurs_free_type(x: &str, ty: &Type) -> bool {
    free_vars_type(ty).iter().any(|v| &**v == x)
}

fn collect_term(t: &Term, bound: &mut Vec<Name>, out: &mut FreeNames) {
    match &*t.kind {
        TermKind::Unit | TermKind::Boxed(_) => {}
        TermKind::Var(x) => {
            if !bound.contains(x) {
                out.vars.insert(x.clone());
            }
        }
        TermKind::Label(l) => {
            out.labels.insert(*l);
        }
        TermKind::Const(_, args) => args.iter().for_each(|a| collect_term(a, bound, out)),
        TermKind::Lam(x, b) | TermKind::LamPrime(x, b) => {
            bound.push(x.clone());
            collect_term(b, bound, out);
            bound.pop();
        }
        TermKind::App(a, b)
        | TermKind::Pair(a, b)
        | TermKind::AppPrime(a, b)
        | TermKind::Apply(a, b)
        | TermKind::ApplyPrime(a, b) => {
            collect_term(a, bound, out);
            collect_term(b, bound, out);
        }
        TermKind::Lift(m) | TermKind::Force(m) | TermKind::ForcePrime(m) => {
            collect_term(m, bound, out)
        }
        TermKind::LetPair(x, y, n, m) => {
            collect_term(n, bound, out);
            bound.push(x.clone());
            bound.push(y.clone());
            collect_term(m, bound, out);
            bound.truncate(bound.len() - 2);
        }
        TermKind::Box(s, m) => {
            collect_type(s, bound, out);
            collect_term(m, bound, out);
        }
        TermKind::Case(s, branches) => {
            collect_term(s, bound, out);
            for br in branches {
                let depth = bound.len();
                bound.extend(br.binders.iter().cloned());
                collect_term(&br.body, bound, out);
                bound.truncate(depth);
            }
        }
    }
}

fn collect_type(ty: &Type, bound: &mut Vec<Name>, out: &mut FreeNames) {
    match ty {
        Type::Qubit | Type::Bit | Type::Unit | Type::Nat => {}
        Type::List(a) | Type::Bang(a) => collect_type(a, bound, out),
        Type::Vec(a, r) => {
            collect_type(a, bound, out);
            collect_term(r, bound, out);
        }
        Type::Pi(x, a, b) | Type::Tensor(x, a, b) | Type::Arrow(x, a, b) => {
            collect_type(a, bound, out);
            bound.push(x.clone());
            collect_type(b, bound, out);
            bound.pop();
        }
        Type::Circ(a, b) => {
            collect_type(a, bound, out);
            collect_type(b, bound, out);
        }
    }
}

/// First name `stem<k>` (k = 1, 2, ...) not contained in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<Name>) -> Name {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '\'');
    let stem = if stem.is_empty() || stem == "_" {
        "v"
    } else {
        stem
    };
    (1..)
        .map(|k| format!("{stem}{k}"))
        .find(|cand| !avoid.iter().any(|a| &**a == cand.as_str()))
        .map(|s| name(&s))
        .expect("unbounded candidate supply")
}

struct Subst<'a> {
    x: &'a str,
    r: &'a Term,
    r_fv: BTreeSet<Name>,
}

/// `[r/x]t`, capture-avoiding.
pub fn subst(t: &Term, x: &str, r: &Term) -> Term {
    let s = Subst {
        x,
        r,
        r_fv: free_vars(r),
    };
    s.term(t)
}

/// `[r/x]ty`, capture-avoiding.
pub fn subst_type(ty: &Type, x: &str, r: &Term) -> Type {
    let s = Subst {
        x,
        r,
        r_fv: free_vars(r),
    };
    s.ty(ty)
}

/// Renames the free variable `from` to `to`.
pub fn rename(t: &Term, from: &str, to: &str) -> Term {
    subst(t, from, &Term::var(to))
}

pub fn rename_type(ty: &Type, from: &str, to: &str) -> Type {
    subst_type(ty, from, &Term::var(to))
}

impl Subst<'_> {
    /// Prepares a binder for descent: returns the (possibly renamed) binder
    /// and body, or `None` if the binder shadows the substituted variable
    /// or the variable does not occur.
    fn binder(&self, y: &Name, body_fv: &BTreeSet<Name>) -> Option<(Name, Option<Name>)> {
        if &**y == self.x || !body_fv.iter().any(|v| &**v == self.x) {
            return None;
        }
        if self.r_fv.contains(y) {
            let mut avoid = self.r_fv.clone();
            avoid.extend(body_fv.iter().cloned());
            avoid.insert(name(self.x));
            let fresh = fresh_name(y, &avoid);
            Some((fresh.clone(), Some(fresh)))
        } else {
            Some((y.clone(), None))
        }
    }

    fn under(&self, y: &Name, body: &Term) -> (Name, Term) {
        match self.binder(y, &free_vars(body)) {
            None => (y.clone(), body.clone()),
            Some((y2, renamed)) => {
                let body = match renamed {
                    Some(fresh) => rename(body, y, &fresh),
                    None => body.clone(),
                };
                (y2, self.term(&body))
            }
        }
    }

    fn under_type(&self, y: &Name, body: &Type) -> (Name, Type) {
        match self.binder(y, &free_vars_type(body)) {
            None => (y.clone(), body.clone()),
            Some((y2, renamed)) => {
                let body = match renamed {
                    Some(fresh) => rename_type(body, y, &fresh),
                    None => body.clone(),
                };
                (y2, self.ty(&body))
            }
        }
    }

    /// Descends under several binders at once (let-pairs, case branches).
    fn under_many(&self, ys: &[Name], body: &Term) -> (Vec<Name>, Term) {
        if ys.iter().any(|y| &**y == self.x) || !occurs_free(self.x, body) {
            return (ys.to_vec(), body.clone());
        }
        let mut avoid = self.r_fv.clone();
        avoid.extend(free_vars(body));
        avoid.insert(name(self.x));
        avoid.extend(ys.iter().cloned());
        let mut body = body.clone();
        let mut out = Vec::with_capacity(ys.len());
        for y in ys {
            if self.r_fv.contains(y) {
                let fresh = fresh_name(y, &avoid);
                avoid.insert(fresh.clone());
                body = rename(&body, y, &fresh);
                out.push(fresh);
            } else {
                out.push(y.clone());
            }
        }
        (out, self.term(&body))
    }

    fn term(&self, t: &Term) -> Term {
        let kind = match &*t.kind {
            TermKind::Var(y) if &**y == self.x => {
                return if self.r.span.is_dummy() {
                    self.r.clone().at(t.span)
                } else {
                    self.r.clone()
                };
            }
            TermKind::Unit | TermKind::Var(_) | TermKind::Label(_) | TermKind::Boxed(_) => {
                return t.clone()
            }
            TermKind::Const(c, args) => {
                TermKind::Const(*c, args.iter().map(|a| self.term(a)).collect())
            }
            TermKind::Lam(y, b) => {
                let (y, b) = self.under(y, b);
                TermKind::Lam(y, b)
            }
            TermKind::LamPrime(y, b) => {
                let (y, b) = self.under(y, b);
                TermKind::LamPrime(y, b)
            }
            TermKind::App(a, b) => TermKind::App(self.term(a), self.term(b)),
            TermKind::AppPrime(a, b) => TermKind::AppPrime(self.term(a), self.term(b)),
            TermKind::Pair(a, b) => TermKind::Pair(self.term(a), self.term(b)),
            TermKind::Apply(a, b) => TermKind::Apply(self.term(a), self.term(b)),
            TermKind::ApplyPrime(a, b) => TermKind::ApplyPrime(self.term(a), self.term(b)),
            TermKind::Lift(m) => TermKind::Lift(self.term(m)),
            TermKind::Force(m) => TermKind::Force(self.term(m)),
            TermKind::ForcePrime(m) => TermKind::ForcePrime(self.term(m)),
            TermKind::LetPair(a, b, n, m) => {
                let n = self.term(n);
                let (ys, m) = self.under_many(&[a.clone(), b.clone()], m);
                TermKind::LetPair(ys[0].clone(), ys[1].clone(), n, m)
            }
            TermKind::Box(s, m) => TermKind::Box(self.ty(s), self.term(m)),
            TermKind::Case(s, branches) => TermKind::Case(
                self.term(s),
                branches
                    .iter()
                    .map(|br| {
                        let (binders, body) = self.under_many(&br.binders, &br.body);
                        Branch {
                            con: br.con,
                            binders,
                            body,
                        }
                    })
                    .collect(),
            ),
        };
        Term::new(kind, t.span)
    }

    fn ty(&self, ty: &Type) -> Type {
        match ty {
            Type::Qubit | Type::Bit | Type::Unit | Type::Nat => ty.clone(),
            Type::List(a) => Type::List(Rc::new(self.ty(a))),
            Type::Bang(a) => Type::Bang(Rc::new(self.ty(a))),
            Type::Vec(a, r) => Type::Vec(Rc::new(self.ty(a)), self.term(r)),
            Type::Circ(a, b) => Type::Circ(Rc::new(self.ty(a)), Rc::new(self.ty(b))),
            Type::Pi(y, a, b) => {
                let (y, b) = self.under_type(y, b);
                Type::Pi(y, Rc::new(self.ty(a)), Rc::new(b))
            }
            Type::Tensor(y, a, b) => {
                let (y, b) = self.under_type(y, b);
                Type::Tensor(y, Rc::new(self.ty(a)), Rc::new(b))
            }
            Type::Arrow(y, a, b) => {
                let (y, b) = self.under_type(y, b);
                Type::Arrow(y, Rc::new(self.ty(a)), Rc::new(b))
            }
        }
    }
}

#[derive(Default)]
struct AlphaEnv {
    left: Vec<Name>,
    right: Vec<Name>,
}

impl AlphaEnv {
    fn push(&mut self, x: &Name, y: &Name) {
        self.left.push(x.clone());
        self.right.push(y.clone());
    }

    fn pop(&mut self, n: usize) {
        self.left.truncate(self.left.len() - n);
        self.right.truncate(self.right.len() - n);
    }

    fn vars(&self, x: &Name, y: &Name) -> bool {
        let i = self.left.iter().rposition(|v| v == x);
        let j = self.right.iter().rposition(|v| v == y);
        match (i, j) {
            (None, None) => x == y,
            (Some(i), Some(j)) => i == j,
            _ => false,
        }
    }

    fn terms(&mut self, a: &Term, b: &Term) -> bool {
        use TermKind as K;
        match (&*a.kind, &*b.kind) {
            (K::Unit, K::Unit) => true,
            (K::Var(x), K::Var(y)) => self.vars(x, y),
            (K::Label(l), K::Label(m)) => l == m,
            (K::Const(c, xs), K::Const(d, ys)) => {
                c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.terms(x, y))
            }
            (K::Lam(x, m), K::Lam(y, n)) | (K::LamPrime(x, m), K::LamPrime(y, n)) => {
                self.push(x, y);
                let r = self.terms(m, n);
                self.pop(1);
                r
            }
            (K::App(a1, a2), K::App(b1, b2))
            | (K::Pair(a1, a2), K::Pair(b1, b2))
            | (K::AppPrime(a1, a2), K::AppPrime(b1, b2))
            | (K::Apply(a1, a2), K::Apply(b1, b2))
            | (K::ApplyPrime(a1, a2), K::ApplyPrime(b1, b2)) => {
                self.terms(a1, b1) && self.terms(a2, b2)
            }
            (K::Lift(m), K::Lift(n))
            | (K::Force(m), K::Force(n))
            | (K::ForcePrime(m), K::ForcePrime(n)) => self.terms(m, n),
            (K::LetPair(x1, y1, n1, m1), K::LetPair(x2, y2, n2, m2)) => {
                if !self.terms(n1, n2) {
                    return false;
                }
                self.push(x1, x2);
                self.push(y1, y2);
                let r = self.terms(m1, m2);
                self.pop(2);
                r
            }
            (K::Box(s, m), K::Box(u, n)) => self.types(s, u) && self.terms(m, n),
            (K::Boxed(c), K::Boxed(d)) => c.equiv(d),
            (K::Case(s1, bs1), K::Case(s2, bs2)) => {
                self.terms(s1, s2)
                    && bs1.len() == bs2.len()
                    && bs1.iter().zip(bs2).all(|(p, q)| {
                        if p.con != q.con || p.binders.len() != q.binders.len() {
                            return false;
                        }
                        for (x, y) in p.binders.iter().zip(&q.binders) {
                            self.push(x, y);
                        }
                        let r = self.terms(&p.body, &q.body);
                        self.pop(p.binders.len());
                        r
                    })
            }
            _ => false,
        }
    }

    fn types(&mut self, a: &Type, b: &Type) -> bool {
        match (a, b) {
            (Type::Qubit, Type::Qubit)
            | (Type::Bit, Type::Bit)
            | (Type::Unit, Type::Unit)
            | (Type::Nat, Type::Nat) => true,
            (Type::List(x), Type::List(y)) | (Type::Bang(x), Type::Bang(y)) => self.types(x, y),
            (Type::Vec(x, r), Type::Vec(y, s)) => self.types(x, y) && self.terms(r, s),
            (Type::Circ(x1, x2), Type::Circ(y1, y2)) => self.types(x1, y1) && self.types(x2, y2),
            (Type::Pi(x, a1, b1), Type::Pi(y, a2, b2))
            | (Type::Tensor(x, a1, b1), Type::Tensor(y, a2, b2))
            | (Type::Arrow(x, a1, b1), Type::Arrow(y, a2, b2)) => {
                if !self.types(a1, a2) {
                    return false;
                }
                self.push(x, y);
                let r = self.types(b1, b2);
                self.pop(1);
                r
            }
            _ => false,
        }
    }
}

/// Equality up to consistent renaming of bound variables. Labels compare
/// by identity; boxed circuits compare up to relabeling of their wires.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    AlphaEnv::default().terms(a, b)
}

pub fn alpha_eq_type(a: &Type, b: &Type) -> bool {
    AlphaEnv::default().types(a, b)
}
