use std::cell::RefCell;
use std::collections::BTreeSet;
use std::rc::Rc;

use super::{Env, TypeError, TypeErrorKind as K, UsageReport};
use crate::circuit::{BoxedCircuit, Circuit, LabelSupply, Sort};
use crate::eval::{subst_many, Evaluator};
use crate::front::{pretty_term, pretty_type};
use crate::shape::{shape_ctx, shape_term, shape_type};
use crate::syntax::{
    alpha_eq_type, free_names, free_vars, free_vars_type, fresh_name, is_parameter_term,
    is_parameter_type, is_simple_type, occurs_free_type, rename, rename_type, subst_type, Binder,
    Binding, Branch, Constant, Context, Index, Name, Span, Term, TermKind, Type, ANON,
};

const NORM_FUEL: u64 = 200_000;
const STACK_RED_ZONE: usize = 128 * 1024;
const STACK_GROWTH: usize = 4 * 1024 * 1024;

type R<T> = Result<T, TypeError>;

/// A typing judgment `Γ ⊢ M : A` met while checking, with the indices of
/// `Γ` set to what `M` actually consumes.
#[derive(Clone, Debug)]
pub struct Judgment {
    pub ctx: Context,
    pub term: Term,
    pub ty: Type,
}

/// Bidirectional checker. With `insert` set it also elaborates, inserting
/// `lift` and `force` where the surface program leaves them implicit;
/// otherwise every term must already be fully annotated.
pub struct Checker<'e> {
    env: &'e Env,
    insert: bool,
    norm_fuel: u64,
    recorder: Option<RefCell<Vec<Judgment>>>,
}

fn fail<T>(kind: K, span: Span, msg: impl Into<String>) -> R<T> {
    Err(TypeError::new(kind, span, msg))
}

fn show(t: &Term) -> String {
    let s = pretty_term(t);
    if s.chars().count() > 60 {
        let cut: String = s.chars().take(57).collect();
        format!("{cut}...")
    } else {
        s
    }
}

fn ty(t: &Type) -> String {
    pretty_type(t)
}

fn local_index(t: &Type) -> Index {
    if is_parameter_type(t) {
        Index::Omega
    } else {
        Index::One
    }
}

fn binder_ty<'a>(g: &'a Context, b: &Binder) -> Option<&'a Type> {
    g.lookup(b).map(|x| &x.ty)
}

fn refine_ctx(g: &Context, v: &str, pat: &Term) -> Context {
    Context {
        bindings: g
            .iter()
            .map(|b| Binding {
                binder: b.binder.clone(),
                index: b.index,
                ty: subst_type(&b.ty, v, pat),
            })
            .collect(),
    }
}

/// Terms that can never have a `!` type and are lifted when checked
/// against one.
fn needs_lift(m: &Term) -> bool {
    matches!(
        &*m.kind,
        TermKind::Lam(..)
            | TermKind::LamPrime(..)
            | TermKind::Pair(..)
            | TermKind::Unit
            | TermKind::Const(..)
            | TermKind::Box(..)
            | TermKind::Apply(..)
            | TermKind::ApplyPrime(..)
            | TermKind::Label(_)
            | TermKind::Boxed(_)
    )
}

fn iface_type(t: &Term) -> Option<Type> {
    match &*t.kind {
        TermKind::Unit => Some(Type::Unit),
        TermKind::Label(l) => Some(l.sort.to_type()),
        TermKind::Pair(a, b) => Some(Type::pair(iface_type(a)?, iface_type(b)?)),
        TermKind::Const(Constant::VCons, args) if args.len() == 2 => {
            let h = iface_type(&args[0])?;
            match iface_type(&args[1])? {
                Type::Vec(e, n) if alpha_eq_type(&e, &h) => Some(Type::vec(h, Term::succ(n))),
                _ => None,
            }
        }
        _ => None,
    }
}

fn vec_tail_nil(t: &Term) -> bool {
    matches!(&*t.kind, TermKind::Const(Constant::VNil, args) if args.is_empty())
}

impl<'e> Checker<'e> {
    /// A checker for fully annotated terms.
    pub fn new(env: &'e Env) -> Checker<'e> {
        Checker {
            env,
            insert: false,
            norm_fuel: NORM_FUEL,
            recorder: None,
        }
    }

    /// A checker that elaborates surface terms.
    pub fn elaborating(env: &'e Env) -> Checker<'e> {
        Checker {
            insert: true,
            ..Checker::new(env)
        }
    }

    /// Records the judgment checked for the body of every abstraction.
    pub fn recording(mut self) -> Checker<'e> {
        self.recorder = Some(RefCell::new(Vec::new()));
        self
    }

    pub fn with_norm_fuel(mut self, fuel: u64) -> Checker<'e> {
        self.norm_fuel = fuel;
        self
    }

    pub fn judgments(&self) -> Vec<Judgment> {
        self.recorder
            .as_ref()
            .map(|r| r.borrow().clone())
            .unwrap_or_default()
    }

    pub fn is_elaborating(&self) -> bool {
        self.insert
    }

    fn secondary(&self) -> Checker<'e> {
        Checker {
            env: self.env,
            insert: false,
            norm_fuel: self.norm_fuel,
            recorder: None,
        }
    }

    fn record(&self, g: &Context, u: &UsageReport, term: &Term, t: &Type) {
        if let Some(r) = &self.recorder {
            let ctx = Context {
                bindings: g
                    .iter()
                    .map(|b| Binding {
                        binder: b.binder.clone(),
                        index: if is_parameter_type(&b.ty) {
                            Index::Omega
                        } else {
                            u.get(&b.binder)
                        },
                        ty: b.ty.clone(),
                    })
                    .collect(),
            };
            r.borrow_mut().push(Judgment {
                ctx,
                term: term.clone(),
                ty: t.clone(),
            });
        }
    }

    // ---- public entry points ----

    pub fn wf_context(&self, g: &Context) -> R<()> {
        let mut prefix = Context::new();
        let mut seen = BTreeSet::new();
        for b in g.iter() {
            let at = Span::default();
            if !seen.insert(b.binder.clone()) {
                return fail(
                    K::KindMismatch,
                    at,
                    format!("context binds `{}` more than once", b.binder),
                );
            }
            if b.index == Index::Omega && !is_parameter_type(&b.ty) {
                return fail(
                    K::LinearityViolation,
                    at,
                    format!(
                        "`{}` has index ω but its type {} is not a parameter type",
                        b.binder,
                        ty(&b.ty)
                    ),
                );
            }
            if let Binder::Label(l) = &b.binder {
                let ok = matches!(
                    (&b.ty, l.sort),
                    (Type::Qubit, Sort::Qubit) | (Type::Bit, Sort::Bit)
                );
                if !ok {
                    return fail(
                        K::KindMismatch,
                        at,
                        format!("label `{}` cannot have type {}", b.binder, ty(&b.ty)),
                    );
                }
            }
            self.kind(&shape_ctx(&prefix), &b.ty, at)?;
            prefix.bindings.push(b.clone());
        }
        Ok(())
    }

    pub fn kind_check(&self, phi: &Context, a: &Type) -> R<()> {
        if !phi.is_parameter_context() {
            return fail(
                K::NotParameterContext,
                Span::default(),
                "kinding requires a parameter context",
            );
        }
        self.kind(phi, a, Span::default()).map(|_| ())
    }

    /// Kind-checks a type and returns it with its embedded terms elaborated.
    pub fn elaborate_type(&self, phi: &Context, a: &Type, at: Span) -> R<Type> {
        self.kind(phi, a, at)
    }

    pub fn type_infer(&self, g: &Context, m: &Term) -> R<(Type, UsageReport)> {
        self.wf_context(g)?;
        let (_, t, u) = self.infer(g, m)?;
        self.compare_usage(g, &u, m.span)?;
        Ok((t, u))
    }

    pub fn type_check(&self, g: &Context, m: &Term, a: &Type) -> R<UsageReport> {
        self.wf_context(g)?;
        let a = self.kind(&shape_ctx(g), a, m.span)?;
        let (_, u) = self.check(g, m, &a)?;
        self.compare_usage(g, &u, m.span)?;
        Ok(u)
    }

    pub fn elaborate(&self, g: &Context, m: &Term, expected: Option<&Type>) -> R<Term> {
        self.wf_context(g)?;
        let (t, u) = match expected {
            Some(a) => {
                let a = self.kind(&shape_ctx(g), a, m.span)?;
                self.check(g, m, &a)?
            }
            None => {
                let (t, _, u) = self.infer(g, m)?;
                (t, u)
            }
        };
        self.compare_usage(g, &u, m.span)?;
        Ok(t)
    }

    /// Infers and elaborates without comparing usage to annotations.
    pub fn infer_term(&self, g: &Context, m: &Term) -> R<(Term, Type, UsageReport)> {
        self.infer(g, m)
    }

    pub fn check_term(&self, g: &Context, m: &Term, a: &Type) -> R<(Term, UsageReport)> {
        self.check(g, m, a)
    }

    fn compare_usage(&self, g: &Context, u: &UsageReport, at: Span) -> R<()> {
        for b in g.iter() {
            if is_parameter_type(&b.ty) {
                continue;
            }
            let used = u.get(&b.binder);
            if used == b.index {
                continue;
            }
            let msg = match (b.index, used) {
                (Index::One, Index::Zero) => format!(
                    "`{}` has linear type {} and index 1 but is never used",
                    b.binder,
                    ty(&b.ty)
                ),
                (Index::Zero, _) => format!("`{}` has index 0 but is used", b.binder),
                _ => format!(
                    "`{}` has linear type {} but is used more than once",
                    b.binder,
                    ty(&b.ty)
                ),
            };
            return fail(K::LinearityViolation, at, msg);
        }
        Ok(())
    }

    // ---- conversion ----

    fn evaluator(&self, g: &Context) -> Evaluator<'e> {
        let mut ev = Evaluator::with_fuel(self.env.globals(), LabelSupply::new(), self.norm_fuel);
        ev.set_opaque(g.var_names().cloned());
        ev
    }

    /// Evaluates every term embedded in `a`; evaluation failures leave the
    /// type as it is.
    pub fn normalize_type(&self, g: &Context, a: &Type) -> Type {
        self.evaluator(g)
            .normalize_type(a)
            .unwrap_or_else(|_| a.clone())
    }

    fn normalize_term(&self, g: &Context, t: &Term) -> Term {
        self.evaluator(g)
            .eval(Circuit::default(), t)
            .map(|(_, v)| v)
            .unwrap_or_else(|_| t.clone())
    }

    pub fn type_eq(&self, g: &Context, a: &Type, b: &Type) -> bool {
        alpha_eq_type(a, b) || alpha_eq_type(&self.normalize_type(g, a), &self.normalize_type(g, b))
    }

    // ---- usage bookkeeping ----

    fn add(&self, g: &Context, mut u1: UsageReport, u2: &UsageReport, at: Span) -> R<UsageReport> {
        for (b, k) in u2.iter() {
            let sum = u1.get(b) + *k;
            if sum == Index::Omega {
                if let Some(t) = binder_ty(g, b) {
                    if !is_parameter_type(t) {
                        return fail(
                            K::LinearityViolation,
                            at,
                            format!("`{b}` has linear type {} but is used more than once", ty(t)),
                        );
                    }
                }
            }
            u1.set(b.clone(), sum);
        }
        Ok(u1)
    }

    fn require_param(&self, g: &Context, u: &UsageReport, at: Span, what: &str) -> R<()> {
        for (b, k) in u.iter() {
            if k.is_zero() {
                continue;
            }
            if let Some(t) = binder_ty(g, b) {
                if !is_parameter_type(t) {
                    return fail(
                        K::NotParameterContext,
                        at,
                        format!(
                            "{what} may only use parameter variables, but `{b}` has linear type {}",
                            ty(t)
                        ),
                    );
                }
            }
        }
        Ok(())
    }

    /// Removes a local binder from the usage; linear binders must have been
    /// used exactly once.
    fn close(&self, u: &mut UsageReport, x: &Name, t: &Type, shown: &str, at: Span) -> R<()> {
        let k = u.remove(&Binder::Var(x.clone()));
        if is_parameter_type(t) || k == Index::One {
            return Ok(());
        }
        let how = if k.is_zero() {
            "never used"
        } else {
            "used more than once"
        };
        fail(
            K::LinearityViolation,
            at,
            format!(
                "`{shown}` has linear type {} and must be used exactly once, but it is {how}",
                ty(t)
            ),
        )
    }

    // ---- binders ----

    fn scope_names(&self, g: &Context) -> BTreeSet<Name> {
        let mut s: BTreeSet<Name> = g.var_names().cloned().collect();
        s.extend(self.env.names().cloned());
        s
    }

    /// Chooses a name for a binder entering `g`, renaming it in `body` when
    /// it would shadow something in scope or clash with `clash`.
    fn intro(
        &self,
        g: &Context,
        x: &Name,
        body: &Term,
        clash: &BTreeSet<Name>,
        avoid: &BTreeSet<Name>,
    ) -> (Name, Term) {
        let mut scope = self.scope_names(g);
        if &**x != ANON && !scope.contains(x) && !clash.contains(x) {
            return (x.clone(), body.clone());
        }
        scope.extend(clash.iter().cloned());
        scope.extend(avoid.iter().cloned());
        scope.extend(free_vars(body));
        scope.insert(x.clone());
        let x2 = fresh_name(x, &scope);
        let body2 = rename(body, x, &x2);
        (x2, body2)
    }

    fn intro_many(
        &self,
        g: &Context,
        xs: &[Name],
        body: &Term,
        clash: &BTreeSet<Name>,
    ) -> (Vec<Name>, Term) {
        let mut clash = clash.clone();
        let avoid: BTreeSet<Name> = xs.iter().cloned().collect();
        let mut body = body.clone();
        let mut out = vec![Name::from(""); xs.len()];
        for i in (0..xs.len()).rev() {
            let shadowed = xs[i + 1..].contains(&xs[i]);
            let (x2, b2) = if shadowed {
                let mut scope = self.scope_names(g);
                scope.extend(clash.iter().cloned());
                scope.extend(avoid.iter().cloned());
                scope.extend(free_vars(&body));
                (fresh_name(&xs[i], &scope), body.clone())
            } else {
                self.intro(g, &xs[i], &body, &clash, &avoid)
            };
            clash.insert(x2.clone());
            body = b2;
            out[i] = x2;
        }
        (out, body)
    }

    fn intro_type(&self, g: &Context, x: &Name, body: &Type) -> (Name, Type) {
        let scope = self.scope_names(g);
        if &**x == ANON || !scope.contains(x) {
            return (x.clone(), body.clone());
        }
        let mut avoid = scope;
        avoid.extend(free_vars_type(body));
        let x2 = fresh_name(x, &avoid);
        let b2 = rename_type(body, x, &x2);
        (x2, b2)
    }

    fn local_var(&self, g: &Context, t: &Term) -> Option<Name> {
        match &*t.kind {
            TermKind::Var(v) if g.lookup_var(v).is_some() => Some(v.clone()),
            _ => None,
        }
    }

    // ---- kinding ----

    fn kind(&self, phi: &Context, a: &Type, at: Span) -> R<Type> {
        Ok(match a {
            Type::Qubit | Type::Bit | Type::Unit | Type::Nat => a.clone(),
            Type::List(e) => Type::List(Rc::new(self.kind(phi, e, at)?)),
            Type::Bang(e) => Type::Bang(Rc::new(self.kind(phi, e, at)?)),
            Type::Vec(e, r) => {
                let e2 = self.kind(phi, e, at)?;
                let r2 = self.type_level_term(phi, r, at)?;
                Type::Vec(Rc::new(e2), r2)
            }
            Type::Pi(x, d, c) | Type::Tensor(x, d, c) => {
                let d2 = self.kind(phi, d, at)?;
                let (x2, c2) = self.intro_type(phi, x, c);
                let mut phi2 = phi.clone();
                if &*x2 != ANON {
                    phi2.push(Binder::Var(x2.clone()), Index::Omega, shape_type(&d2));
                }
                let c3 = self.kind(&phi2, &c2, at)?;
                match a {
                    Type::Pi(..) => Type::Pi(x2, Rc::new(d2), Rc::new(c3)),
                    _ => Type::Tensor(x2, Rc::new(d2), Rc::new(c3)),
                }
            }
            Type::Arrow(x, d, c) => {
                let d2 = self.kind(phi, d, at)?;
                if !is_parameter_type(&d2) {
                    return fail(
                        K::KindMismatch,
                        at,
                        format!(
                            "the domain of `->` must be a parameter type, but {} is not; use `-o`",
                            ty(&d2)
                        ),
                    );
                }
                let (x2, c2) = self.intro_type(phi, x, c);
                let mut phi2 = phi.clone();
                if &*x2 != ANON {
                    phi2.push(Binder::Var(x2.clone()), Index::Omega, d2.clone());
                }
                let c3 = self.kind(&phi2, &c2, at)?;
                if !is_parameter_type(&c3) {
                    return fail(
                        K::KindMismatch,
                        at,
                        format!(
                            "the codomain of `->` must be a parameter type, but {} is not",
                            ty(&c3)
                        ),
                    );
                }
                Type::Arrow(x2, Rc::new(d2), Rc::new(c3))
            }
            Type::Circ(s, u) => {
                let s2 = self.kind(phi, s, at)?;
                let u2 = self.kind(phi, u, at)?;
                for (what, t) in [("input", &s2), ("output", &u2)] {
                    if !is_simple_type(t) {
                        return fail(
                            K::NotSimpleType,
                            at,
                            format!("the {what} type {} of `Circ` is not a simple type", ty(t)),
                        );
                    }
                }
                Type::Circ(Rc::new(s2), Rc::new(u2))
            }
        })
    }

    /// Checks a term embedded in a type against `Nat`. When elaborating,
    /// the elaborated term is replaced by its shape, which is a parameter
    /// term of the same type.
    fn type_level_term(&self, phi: &Context, r: &Term, at: Span) -> R<Term> {
        let span = if r.span.is_dummy() { at } else { r.span };
        if !free_names(r).labels.is_empty() {
            return fail(
                K::NotParameterTerm,
                span,
                format!(
                    "`{}` mentions a wire label; only parameter terms may appear in types",
                    show(r)
                ),
            );
        }
        if self.insert {
            let (r1, _) = self.check(phi, r, &Type::Nat)?;
            let r2 = shape_term(&r1);
            self.secondary().check(phi, &r2, &Type::Nat)?;
            Ok(r2)
        } else {
            if !is_parameter_term(r) {
                return fail(
                    K::NotParameterTerm,
                    span,
                    format!(
                        "`{}` is not a parameter term; only parameter terms may appear in types",
                        show(r)
                    ),
                );
            }
            let (r1, u) = self.check(phi, r, &Type::Nat)?;
            self.require_param(phi, &u, span, "a type")?;
            Ok(r1)
        }
    }

    // ---- typing ----

    fn arity(&self, m: &Term, c: Constant, args: &[Term]) -> R<()> {
        if args.len() == c.arity() {
            return Ok(());
        }
        fail(
            K::ArityMismatch,
            m.span,
            format!(
                "`{}` expects {} argument{} but was given {}",
                c.name(),
                c.arity(),
                if c.arity() == 1 { "" } else { "s" },
                args.len()
            ),
        )
    }

    fn infer(&self, g: &Context, m: &Term) -> R<(Term, Type, UsageReport)> {
        stacker::maybe_grow(STACK_RED_ZONE, STACK_GROWTH, || self.infer_inner(g, m))
    }

    fn check(&self, g: &Context, m: &Term, a: &Type) -> R<(Term, UsageReport)> {
        stacker::maybe_grow(STACK_RED_ZONE, STACK_GROWTH, || self.check_inner(g, m, a))
    }

    fn infer_inner(&self, g: &Context, m: &Term) -> R<(Term, Type, UsageReport)> {
        let at = m.span;
        let mk = |k: TermKind| Term::new(k, at);
        match &*m.kind {
            TermKind::Unit => Ok((m.clone(), Type::Unit, UsageReport::new())),
            TermKind::Var(x) => {
                if let Some(b) = g.lookup_var(x) {
                    Ok((
                        m.clone(),
                        b.ty.clone(),
                        UsageReport::single(b.binder.clone()),
                    ))
                } else if let Some(t) = self.env.lookup(x) {
                    Ok((m.clone(), t.clone(), UsageReport::new()))
                } else {
                    fail(K::UnboundName, at, format!("`{x}` is not in scope"))
                }
            }
            TermKind::Label(l) => {
                let b = Binder::Label(*l);
                if g.lookup(&b).is_some() {
                    Ok((m.clone(), l.sort.to_type(), UsageReport::single(b)))
                } else {
                    fail(K::UnboundName, at, format!("label `{b}` is not in scope"))
                }
            }
            TermKind::Const(c, args) => self.infer_const(g, m, *c, args),
            TermKind::Lam(..) | TermKind::LamPrime(..) => fail(
                K::TypeMismatch,
                at,
                "cannot infer the type of a function; use it where its type is known",
            ),
            TermKind::App(f, a) => self.infer_app(g, m, f, a),
            TermKind::AppPrime(f, a) => {
                let (f2, tf, uf) = self.infer(g, f)?;
                let (x, d, c) = match &tf {
                    Type::Arrow(x, d, c) => (x, d, c),
                    _ => return fail(
                        K::TypeMismatch,
                        f.span,
                        format!(
                            "`@` expects a function of type (x : P) -> P', but `{}` has type {}",
                            show(f),
                            ty(&tf)
                        ),
                    ),
                };
                let (a2, ua) = self.check(g, a, d)?;
                let u = self.add(g, uf, &ua, at)?;
                self.require_param(g, &u, at, "`@`")?;
                if !is_parameter_term(&f2) || !is_parameter_term(&a2) {
                    return fail(
                        K::NotParameterTerm,
                        at,
                        "the operands of `@` must be parameter terms",
                    );
                }
                let t = subst_type(c, x, &a2);
                Ok((mk(TermKind::AppPrime(f2, a2)), t, u))
            }
            TermKind::Lift(b) => {
                let (b2, t, u) = self.infer(g, b)?;
                self.require_param(g, &u, at, "`lift`")?;
                Ok((mk(TermKind::Lift(b2)), Type::bang(t), u))
            }
            TermKind::Force(b) | TermKind::ForcePrime(b) => {
                let prime = matches!(&*m.kind, TermKind::ForcePrime(_));
                let (b2, t, u) = self.infer(g, b)?;
                let inner = match &t {
                    Type::Bang(a) => (**a).clone(),
                    _ => {
                        return fail(
                            K::TypeMismatch,
                            at,
                            format!(
                                "`{}` expects a term of type !A, but `{}` has type {}",
                                if prime { "force'" } else { "force" },
                                show(b),
                                ty(&t)
                            ),
                        )
                    }
                };
                if prime {
                    self.require_param(g, &u, at, "`force'`")?;
                    Ok((mk(TermKind::ForcePrime(b2)), shape_type(&inner), u))
                } else {
                    Ok((mk(TermKind::Force(b2)), inner, u))
                }
            }
            TermKind::Pair(a, b) => {
                let (a2, ta, ua) = self.infer(g, a)?;
                let (b2, tb, ub) = self.infer(g, b)?;
                let u = self.add(g, ua, &ub, at)?;
                Ok((mk(TermKind::Pair(a2, b2)), Type::pair(ta, tb), u))
            }
            TermKind::LetPair(x, y, n, body) => self.let_pair(g, m, x, y, n, body, None),
            TermKind::Box(s, body) => self.infer_box(g, m, s, body),
            TermKind::Apply(c, a) => {
                let (c2, tc, uc) = self.infer(g, c)?;
                let (s, u) = match &tc {
                    Type::Circ(s, u) => (s, u),
                    _ => return fail(
                        K::TypeMismatch,
                        c.span,
                        format!(
                            "`apply` expects a circuit of type Circ(S, U), but `{}` has type {}",
                            show(c),
                            ty(&tc)
                        ),
                    ),
                };
                let (a2, ua) = self.check(g, a, s)?;
                let total = self.add(g, uc, &ua, at)?;
                Ok((mk(TermKind::Apply(c2, a2)), (**u).clone(), total))
            }
            TermKind::ApplyPrime(c, a) => {
                let (c2, tc, uc) = self.infer(g, c)?;
                let (s, u) = match &tc {
                    Type::Circ(s, u) => (s, u),
                    _ => return fail(
                        K::TypeMismatch,
                        c.span,
                        format!(
                            "`apply'` expects a circuit of type Circ(S, U), but `{}` has type {}",
                            show(c),
                            ty(&tc)
                        ),
                    ),
                };
                let (a2, ua) = self.check(g, a, &shape_type(s))?;
                let total = self.add(g, uc, &ua, at)?;
                self.require_param(g, &total, at, "`apply'`")?;
                Ok((mk(TermKind::ApplyPrime(c2, a2)), shape_type(u), total))
            }
            TermKind::Boxed(b) => {
                self.validate_boxed(b, at)?;
                match (iface_type(&b.input), iface_type(&b.output)) {
                    (Some(s), Some(u)) => Ok((m.clone(), Type::circ(s, u), UsageReport::new())),
                    _ => fail(
                        K::TypeMismatch,
                        at,
                        "cannot infer the interface types of this boxed circuit",
                    ),
                }
            }
            TermKind::Case(s, bs) => self.case(g, m, s, bs, None),
        }
    }

    fn infer_const(
        &self,
        g: &Context,
        m: &Term,
        c: Constant,
        args: &[Term],
    ) -> R<(Term, Type, UsageReport)> {
        self.arity(m, c, args)?;
        let at = m.span;
        let mk = |args: Vec<Term>| Term::new(TermKind::Const(c, args), at);
        match c {
            Constant::Zero => Ok((m.clone(), Type::Nat, UsageReport::new())),
            Constant::Succ => {
                let (a, u) = self.check(g, &args[0], &Type::Nat)?;
                Ok((mk(vec![a]), Type::Nat, u))
            }
            Constant::ToNat => {
                let (a, u) = self.check(g, &args[0], &Type::list(Type::Unit))?;
                Ok((mk(vec![a]), Type::Nat, u))
            }
            Constant::Nil | Constant::VNil => fail(
                K::TypeMismatch,
                at,
                format!(
                    "cannot infer the element type of `{}`; use it where its type is known",
                    c.name()
                ),
            ),
            Constant::Cons => {
                let (h, th, uh) = self.infer(g, &args[0])?;
                let (t, ut) = self.check(g, &args[1], &Type::list(th.clone()))?;
                let u = self.add(g, uh, &ut, at)?;
                Ok((mk(vec![h, t]), Type::list(th), u))
            }
            Constant::VCons => {
                let (h, th, uh) = self.infer(g, &args[0])?;
                let (t, len, ut) = if vec_tail_nil(&args[1]) {
                    (args[1].clone(), Term::zero(), UsageReport::new())
                } else {
                    let (t, tt, ut) = self.infer(g, &args[1])?;
                    match &tt {
                        Type::Vec(e, n) if self.type_eq(g, e, &th) => (t, n.clone(), ut),
                        _ => {
                            return fail(
                                K::TypeMismatch,
                                args[1].span,
                                format!(
                                    "expected a vector of {}, but `{}` has type {}",
                                    ty(&th),
                                    show(&args[1]),
                                    ty(&tt)
                                ),
                            )
                        }
                    }
                };
                let u = self.add(g, uh, &ut, at)?;
                Ok((mk(vec![h, t]), Type::vec(th, Term::succ(len)), u))
            }
            Constant::Gate(k) => Ok((m.clone(), k.circ_type(), UsageReport::new())),
        }
    }

    fn infer_app(&self, g: &Context, m: &Term, f: &Term, a: &Term) -> R<(Term, Type, UsageReport)> {
        let at = m.span;
        let (mut f2, mut tf, uf) = self.infer(g, f)?;
        if self.insert {
            if let Type::Bang(inner) = &tf {
                if matches!(&**inner, Type::Pi(..) | Type::Arrow(..)) {
                    f2 = Term::new(TermKind::Force(f2), f.span);
                    tf = (**inner).clone();
                }
            }
        }
        match &tf {
            Type::Pi(x, d, c) => {
                let (a2, ua) = self.check(g, a, d)?;
                let u = self.add(g, uf, &ua, at)?;
                let t = subst_type(c, x, &shape_term(&a2));
                Ok((Term::new(TermKind::App(f2, a2), at), t, u))
            }
            Type::Arrow(x, d, c) if self.insert => {
                let (a2, ua) = self.check(g, a, d)?;
                let u = self.add(g, uf, &ua, at)?;
                self.require_param(g, &u, at, "an application of a `->` function")?;
                let (f3, a3) = (shape_term(&f2), shape_term(&a2));
                let t = subst_type(c, x, &a3);
                Ok((Term::new(TermKind::AppPrime(f3, a3), at), t, u))
            }
            Type::Arrow(..) => fail(
                K::TypeMismatch,
                at,
                format!(
                    "`{}` has type {} and must be applied with `@`",
                    show(f),
                    ty(&tf)
                ),
            ),
            Type::Bang(_) => fail(
                K::TypeMismatch,
                at,
                format!(
                    "`{}` has type {}; force it before applying it",
                    show(f),
                    ty(&tf)
                ),
            ),
            _ => fail(
                K::TypeMismatch,
                at,
                format!("`{}` is not a function; it has type {}", show(f), ty(&tf)),
            ),
        }
    }

    fn check_inner(&self, g: &Context, m: &Term, a: &Type) -> R<(Term, UsageReport)> {
        let at = m.span;
        let mk = |k: TermKind| Term::new(k, at);
        if let TermKind::Const(c, args) = &*m.kind {
            self.arity(m, *c, args)?;
        }
        if self.insert {
            if let Type::Bang(inner) = a {
                if needs_lift(m) {
                    let (m2, u) = self.check(g, m, inner)?;
                    self.require_param(g, &u, at, &format!("a term of type {}", ty(a)))?;
                    return Ok((mk(TermKind::Lift(m2)), u));
                }
            }
        }
        match (&*m.kind, a) {
            (TermKind::Lam(x, b), Type::Pi(y, d, c)) => self.check_lam(g, m, x, b, y, d, c, false),
            (TermKind::Lam(x, b), Type::Arrow(y, d, c)) if self.insert => {
                self.check_lam(g, m, x, b, y, d, c, true)
            }
            (TermKind::LamPrime(x, b), Type::Arrow(y, d, c)) => {
                self.check_lam(g, m, x, b, y, d, c, true)
            }
            (TermKind::Lam(..) | TermKind::LamPrime(..), _) => fail(
                K::TypeMismatch,
                at,
                format!("expected a term of type {}, but found a function", ty(a)),
            ),
            (TermKind::Lift(b), Type::Bang(inner)) => {
                let (b2, u) = self.check(g, b, inner)?;
                self.require_param(g, &u, at, "`lift`")?;
                Ok((mk(TermKind::Lift(b2)), u))
            }
            (TermKind::Pair(p, q), Type::Tensor(y, d, c)) => {
                let (p2, up) = self.check(g, p, d)?;
                let cq = subst_type(c, y, &shape_term(&p2));
                let (q2, uq) = self.check(g, q, &cq)?;
                let u = self.add(g, up, &uq, at)?;
                Ok((mk(TermKind::Pair(p2, q2)), u))
            }
            (TermKind::LetPair(x, y, n, body), _) => {
                let (t, _, u) = self.let_pair(g, m, x, y, n, body, Some(a))?;
                Ok((t, u))
            }
            (TermKind::Case(s, bs), _) => {
                let (t, _, u) = self.case(g, m, s, bs, Some(a))?;
                Ok((t, u))
            }
            (
                TermKind::Const(
                    c @ (Constant::Nil | Constant::Cons | Constant::VNil | Constant::VCons),
                    args,
                ),
                _,
            ) => self.check_const(g, m, *c, args, a),
            (TermKind::Box(s, body), Type::Circ(s0, u0)) => {
                let s2 = self.box_annotation(g, s, at)?;
                if !self.type_eq(g, &s2, s0) {
                    return fail(
                        K::TypeMismatch,
                        at,
                        format!(
                            "expected a circuit with input type {}, but `box` is annotated with {}",
                            ty(s0),
                            ty(&s2)
                        ),
                    );
                }
                let want = Type::bang(Type::lolli(s2.clone(), (**u0).clone()));
                let (b2, u) = self.check(g, body, &want)?;
                Ok((mk(TermKind::Box(s2, b2)), u))
            }
            (TermKind::Boxed(b), Type::Circ(s0, u0)) => {
                self.validate_boxed(b, at)?;
                if self.check_iface(g, &b.input, s0) && self.check_iface(g, &b.output, u0) {
                    Ok((m.clone(), UsageReport::new()))
                } else {
                    fail(
                        K::TypeMismatch,
                        at,
                        format!("boxed circuit does not have type {}", ty(a)),
                    )
                }
            }
            _ => self.fallback(g, m, a),
        }
    }

    fn fallback(&self, g: &Context, m: &Term, a: &Type) -> R<(Term, UsageReport)> {
        let at = m.span;
        let (m2, t, u) = self.infer(g, m)?;
        if self.type_eq(g, &t, a) {
            return Ok((m2, u));
        }
        if self.insert {
            if let Type::Bang(inner) = &t {
                if self.type_eq(g, inner, a) {
                    return Ok((Term::new(TermKind::Force(m2), at), u));
                }
            }
            if let Type::Bang(inner) = a {
                if self.type_eq(g, &t, inner) {
                    self.require_param(g, &u, at, &format!("a term of type {}", ty(a)))?;
                    return Ok((Term::new(TermKind::Lift(m2), at), u));
                }
            }
        }
        fail(
            K::TypeMismatch,
            at,
            format!(
                "expected type {}, but `{}` has type {}",
                ty(a),
                show(m),
                ty(&t)
            ),
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn check_lam(
        &self,
        g: &Context,
        m: &Term,
        x: &Name,
        b: &Term,
        y: &Name,
        d: &Type,
        c: &Type,
        prime: bool,
    ) -> R<(Term, UsageReport)> {
        let at = m.span;
        let mut clash = free_vars_type(c);
        clash.remove(y);
        let (x2, b2) = self.intro(g, x, b, &clash, &BTreeSet::new());
        let cod = if &**y == ANON {
            c.clone()
        } else {
            rename_type(c, y, &x2)
        };
        let mut g2 = g.clone();
        g2.push(Binder::Var(x2.clone()), local_index(d), d.clone());
        let (body, mut u) = self.check(&g2, &b2, &cod)?;
        self.record(&g2, &u, &body, &cod);
        self.close(&mut u, &x2, d, x, at)?;
        if !prime {
            return Ok((Term::new(TermKind::Lam(x2, body), at), u));
        }
        self.require_param(g, &u, at, "a `->` function")?;
        let body = if self.insert { shape_term(&body) } else { body };
        if !is_parameter_term(&body) {
            return fail(
                K::NotParameterTerm,
                at,
                format!(
                    "the body of `\\'` must be a parameter term, but `{}` is not",
                    show(&body)
                ),
            );
        }
        Ok((Term::new(TermKind::LamPrime(x2, body), at), u))
    }

    fn check_const(
        &self,
        g: &Context,
        m: &Term,
        c: Constant,
        args: &[Term],
        a: &Type,
    ) -> R<(Term, UsageReport)> {
        let at = m.span;
        let mk = |args: Vec<Term>| Term::new(TermKind::Const(c, args), at);
        let an = self.normalize_type(g, a);
        match (c, &an) {
            (Constant::Nil, Type::List(_)) => Ok((m.clone(), UsageReport::new())),
            (Constant::Cons, Type::List(e)) => {
                let (h, uh) = self.check(g, &args[0], e)?;
                let (t, ut) = self.check(g, &args[1], a)?;
                let u = self.add(g, uh, &ut, at)?;
                Ok((mk(vec![h, t]), u))
            }
            (Constant::VNil, Type::Vec(_, n)) => {
                if n.as_numeral() == Some(0) {
                    Ok((m.clone(), UsageReport::new()))
                } else {
                    fail(
                        K::TypeMismatch,
                        at,
                        format!(
                            "`VNil` has length 0, but a vector of length {} is expected",
                            show(n)
                        ),
                    )
                }
            }
            (Constant::VCons, Type::Vec(e, n)) => {
                let pred = match &*n.kind {
                    TermKind::Const(Constant::Succ, ps) if ps.len() == 1 => ps[0].clone(),
                    _ => {
                        return fail(
                            K::TypeMismatch,
                            at,
                            format!(
                                "`VCons` builds a non-empty vector, but a vector of length {} is expected",
                                show(n)
                            ),
                        )
                    }
                };
                let (h, uh) = self.check(g, &args[0], e)?;
                let (t, ut) = self.check(g, &args[1], &Type::Vec(e.clone(), pred))?;
                let u = self.add(g, uh, &ut, at)?;
                Ok((mk(vec![h, t]), u))
            }
            _ => self.fallback(g, m, a),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn let_pair(
        &self,
        g: &Context,
        m: &Term,
        x: &Name,
        y: &Name,
        n: &Term,
        body: &Term,
        expected: Option<&Type>,
    ) -> R<(Term, Type, UsageReport)> {
        let at = m.span;
        let (n2, tn, un) = self.infer(g, n)?;
        let (z, ta, tb) = match &tn {
            Type::Tensor(z, a, b) => (z.clone(), (**a).clone(), (**b).clone()),
            _ => {
                return fail(
                    K::TypeMismatch,
                    n.span,
                    format!(
                        "`let ({x}, {y}) = ...` expects a pair, but `{}` has type {}",
                        show(n),
                        ty(&tn)
                    ),
                )
            }
        };
        let mut clash = free_vars_type(&tb);
        if let Some(e) = expected {
            clash.extend(free_vars_type(e));
        }
        let (names, body2) = self.intro_many(g, &[x.clone(), y.clone()], body, &clash);
        let (x2, y2) = (names[0].clone(), names[1].clone());
        let tb2 = if &*z == ANON {
            tb
        } else {
            rename_type(&tb, &z, &x2)
        };
        let pat = Term::new(
            TermKind::Pair(Term::var(&x2).at(at), Term::var(&y2).at(at)),
            at,
        );
        let refine = self.local_var(g, n);
        let mut g2 = match &refine {
            Some(v) => refine_ctx(g, v, &pat),
            None => g.clone(),
        };
        g2.push(Binder::Var(x2.clone()), local_index(&ta), ta.clone());
        g2.push(Binder::Var(y2.clone()), local_index(&tb2), tb2.clone());
        let expected2 = expected.map(|e| match &refine {
            Some(v) => subst_type(e, v, &pat),
            None => e.clone(),
        });
        let (body3, tbody, mut ub) = match &expected2 {
            Some(e) => {
                let (b, u) = self.check(&g2, &body2, e)?;
                (b, e.clone(), u)
            }
            None => self.infer(&g2, &body2)?,
        };
        self.close(&mut ub, &y2, &tb2, y, at)?;
        self.close(&mut ub, &x2, &ta, x, at)?;
        let result = match expected {
            Some(e) => e.clone(),
            None => self.escape(&g2, &tbody, &[x2.clone(), y2.clone()], at, "`let`")?,
        };
        let u = self.add(g, un, &ub, at)?;
        Ok((
            Term::new(TermKind::LetPair(x2, y2, n2, body3), at),
            result,
            u,
        ))
    }

    /// The type of a body must not mention the variables bound around it;
    /// normalization may eliminate such mentions.
    fn escape(&self, g: &Context, t: &Type, bound: &[Name], at: Span, what: &str) -> R<Type> {
        let mentions = |t: &Type| bound.iter().any(|x| occurs_free_type(x, t));
        if !mentions(t) {
            return Ok(t.clone());
        }
        let t2 = self.normalize_type(g, t);
        if !mentions(&t2) {
            return Ok(t2);
        }
        fail(
            K::TypeMismatch,
            at,
            format!(
                "the type {} of this {what} depends on variables bound inside it",
                ty(&t2)
            ),
        )
    }

    fn case(
        &self,
        g: &Context,
        m: &Term,
        s: &Term,
        bs: &[Branch],
        expected: Option<&Type>,
    ) -> R<(Term, Type, UsageReport)> {
        let at = m.span;
        let (s2, ts, us) = self.infer(g, s)?;
        let ts = self.normalize_type(g, &ts);
        let family: Vec<(Constant, Vec<Type>)> = match &ts {
            Type::Nat => vec![(Constant::Zero, vec![]), (Constant::Succ, vec![Type::Nat])],
            Type::List(e) => vec![
                (Constant::Nil, vec![]),
                (Constant::Cons, vec![(**e).clone(), ts.clone()]),
            ],
            Type::Vec(e, n) => match &*n.kind {
                TermKind::Const(Constant::Zero, _) => vec![(Constant::VNil, vec![])],
                TermKind::Const(Constant::Succ, ps) if ps.len() == 1 => vec![(
                    Constant::VCons,
                    vec![(**e).clone(), Type::Vec(e.clone(), ps[0].clone())],
                )],
                _ => {
                    return fail(
                        K::TypeMismatch,
                        s.span,
                        format!(
                            "cannot case on a vector of length `{}`, which is not known to be zero or a successor; case on the length first",
                            show(n)
                        ),
                    )
                }
            },
            _ => {
                return fail(
                    K::TypeMismatch,
                    s.span,
                    format!("cannot case on `{}` of type {}; only Nat, List and Vec values can be examined", show(s), ty(&ts)),
                )
            }
        };
        let mut seen = Vec::new();
        for b in bs {
            let fields = match family.iter().find(|(c, _)| *c == b.con) {
                Some((_, f)) => f,
                None => {
                    let msg = if matches!(b.con, Constant::VNil | Constant::VCons)
                        && matches!(ts, Type::Vec(..))
                    {
                        format!(
                            "the branch for `{}` is impossible at type {}",
                            b.con.name(),
                            ty(&ts)
                        )
                    } else {
                        format!(
                            "constructor `{}` does not build values of type {}",
                            b.con.name(),
                            ty(&ts)
                        )
                    };
                    return fail(K::TypeMismatch, at, msg);
                }
            };
            if b.binders.len() != fields.len() {
                return fail(
                    K::ArityMismatch,
                    at,
                    format!(
                        "pattern `{}` binds {} variable{} but {} were given",
                        b.con.name(),
                        fields.len(),
                        if fields.len() == 1 { "" } else { "s" },
                        b.binders.len()
                    ),
                );
            }
            if seen.contains(&b.con) {
                return fail(
                    K::TypeMismatch,
                    at,
                    format!("duplicate branch for `{}`", b.con.name()),
                );
            }
            seen.push(b.con);
        }
        for (c, _) in &family {
            if !seen.contains(c) {
                return fail(
                    K::TypeMismatch,
                    at,
                    format!("missing branch for `{}`", c.name()),
                );
            }
        }
        if let Some(r) = self.known_case(g, m, &s2, &us, bs, expected)? {
            return Ok(r);
        }
        let refine = self.local_var(g, s);
        let mut results: Vec<(Branch, Type, UsageReport)> = Vec::new();
        for b in bs {
            let fields = &family
                .iter()
                .find(|(c, _)| *c == b.con)
                .expect("validated")
                .1;
            let mut clash = BTreeSet::new();
            if let Some(e) = expected {
                clash.extend(free_vars_type(e));
            }
            for f in fields {
                clash.extend(free_vars_type(f));
            }
            let (names, body) = self.intro_many(g, &b.binders, &b.body, &clash);
            let pat = Term::new(
                TermKind::Const(b.con, names.iter().map(|x| Term::var(x).at(at)).collect()),
                at,
            );
            let mut gb = match &refine {
                Some(v) => refine_ctx(g, v, &pat),
                None => g.clone(),
            };
            for (x, f) in names.iter().zip(fields) {
                gb.push(Binder::Var(x.clone()), local_index(f), f.clone());
            }
            let eb = expected.map(|e| match &refine {
                Some(v) => subst_type(e, v, &pat),
                None => e.clone(),
            });
            let (body2, tb, mut ub) = match &eb {
                Some(e) => {
                    let (t, u) = self.check(&gb, &body, e)?;
                    (t, e.clone(), u)
                }
                None => self.infer(&gb, &body)?,
            };
            for ((x, f), shown) in names.iter().zip(fields).zip(&b.binders).rev() {
                self.close(&mut ub, x, f, shown, at)?;
            }
            let tb = match expected {
                Some(_) => tb,
                None => self.escape(&gb, &tb, &names, at, "`case` branch")?,
            };
            results.push((
                Branch {
                    con: b.con,
                    binders: names,
                    body: body2,
                },
                tb,
                ub,
            ));
        }
        let mut keys = BTreeSet::new();
        for (_, _, u) in &results {
            keys.extend(u.iter().map(|(b, _)| b.clone()));
        }
        let mut joined = UsageReport::new();
        for key in keys {
            let ks: Vec<Index> = results.iter().map(|(_, _, u)| u.get(&key)).collect();
            let linear = binder_ty(g, &key).is_some_and(|t| !is_parameter_type(t));
            if linear && ks.iter().any(|k| *k != ks[0]) {
                return fail(
                    K::LinearityViolation,
                    at,
                    format!("the branches of this `case` use `{key}` differently; every branch must consume the same linear variables"),
                );
            }
            joined.set(key, ks.into_iter().fold(Index::Zero, Index::join));
        }
        let result_ty = match expected {
            Some(e) => e.clone(),
            None => {
                let t0 = results[0].1.clone();
                for (_, t, _) in &results[1..] {
                    if !self.type_eq(g, &t0, t) {
                        return fail(
                            K::TypeMismatch,
                            at,
                            format!(
                                "the branches of this `case` have different types {} and {}",
                                ty(&t0),
                                ty(t)
                            ),
                        );
                    }
                }
                t0
            }
        };
        let total = self.add(g, us, &joined, at)?;
        let branches = results.into_iter().map(|(b, _, _)| b).collect();
        Ok((
            Term::new(TermKind::Case(s2, branches), at),
            result_ty,
            total,
        ))
    }

    /// A parameter scrutinee whose normal form is a constructor selects its
    /// branch statically: only that branch is checked, with the
    /// constructor's arguments in place of its binders. The others are
    /// unreachable and kept as written.
    fn known_case(
        &self,
        g: &Context,
        m: &Term,
        s2: &Term,
        us: &UsageReport,
        bs: &[Branch],
        expected: Option<&Type>,
    ) -> R<Option<(Term, Type, UsageReport)>> {
        if !is_parameter_term(s2) || !free_names(s2).labels.is_empty() {
            return Ok(None);
        }
        let (_, ts, _) = self.secondary().infer(g, s2)?;
        if !is_parameter_type(&ts) {
            return Ok(None);
        }
        let v = self.normalize_term(g, s2);
        let (c, args) = match &*v.kind {
            TermKind::Const(c, args) if c.is_constructor() && args.len() == c.arity() => (*c, args),
            _ => return Ok(None),
        };
        let Some(i) = bs.iter().position(|b| b.con == c) else {
            return Ok(None);
        };
        let body = subst_many(&bs[i].body, &bs[i].binders, args);
        let (body2, t, u) = match expected {
            Some(e) => {
                let (b, u) = self.check(g, &body, e)?;
                (b, e.clone(), u)
            }
            None => self.infer(g, &body)?,
        };
        let mut branches = bs.to_vec();
        branches[i].body = body2;
        let total = self.add(g, us.clone(), &u, m.span)?;
        Ok(Some((
            Term::new(TermKind::Case(s2.clone(), branches), m.span),
            t,
            total,
        )))
    }

    fn box_annotation(&self, g: &Context, s: &Type, at: Span) -> R<Type> {
        let s2 = self.kind(&shape_ctx(g), s, at)?;
        if !is_simple_type(&s2) {
            return fail(
                K::NotSimpleType,
                at,
                format!("`box` needs a simple type, but {} is not simple", ty(&s2)),
            );
        }
        Ok(s2)
    }

    fn infer_box(
        &self,
        g: &Context,
        m: &Term,
        s: &Type,
        body: &Term,
    ) -> R<(Term, Type, UsageReport)> {
        let at = m.span;
        let s2 = self.box_annotation(g, s, at)?;
        let lam = match &*body.kind {
            TermKind::Lift(inner) if matches!(&*inner.kind, TermKind::Lam(..)) => Some(inner),
            TermKind::Lam(..) if self.insert => Some(body),
            _ => None,
        };
        if let Some(l) = lam {
            let (x, b) = match &*l.kind {
                TermKind::Lam(x, b) => (x, b),
                _ => unreachable!("matched a lambda"),
            };
            let (x2, b2) = self.intro(g, x, b, &free_vars_type(&s2), &BTreeSet::new());
            let mut g2 = g.clone();
            g2.push(Binder::Var(x2.clone()), local_index(&s2), s2.clone());
            let (b3, tu, mut u) = self.infer(&g2, &b2)?;
            self.record(&g2, &u, &b3, &tu);
            self.close(&mut u, &x2, &s2, x, at)?;
            let tu = self.escape(
                &g2,
                &tu,
                std::slice::from_ref(&x2),
                at,
                "boxed function's output",
            )?;
            if !is_simple_type(&tu) {
                return fail(
                    K::NotSimpleType,
                    at,
                    format!("`box` needs a function with a simple output type, but the output has type {}", ty(&tu)),
                );
            }
            self.require_param(g, &u, at, "a boxed function")?;
            let lam2 = Term::new(TermKind::Lam(x2, b3), l.span);
            let lifted = Term::new(TermKind::Lift(lam2), body.span);
            return Ok((
                Term::new(TermKind::Box(s2.clone(), lifted), at),
                Type::circ(s2, tu),
                u,
            ));
        }
        let (mut b2, mut tb, u) = self.infer(g, body)?;
        if self.insert && matches!(tb, Type::Pi(..)) {
            self.require_param(g, &u, at, "a boxed function")?;
            b2 = Term::new(TermKind::Lift(b2), body.span);
            tb = Type::bang(tb);
        }
        let (x, d, c) = match &tb {
            Type::Bang(inner) => match &**inner {
                Type::Pi(x, d, c) => (x.clone(), (**d).clone(), (**c).clone()),
                _ => return self.box_mismatch(body, &tb),
            },
            _ => return self.box_mismatch(body, &tb),
        };
        if !self.type_eq(g, &d, &s2) {
            return fail(
                K::TypeMismatch,
                at,
                format!(
                    "`box[{}]` expects a function from {}, but `{}` takes {}",
                    ty(&s2),
                    ty(&s2),
                    show(body),
                    ty(&d)
                ),
            );
        }
        let c = if &*x == ANON {
            c
        } else {
            let mut g2 = g.clone();
            g2.push(Binder::Var(x.clone()), Index::Omega, shape_type(&d));
            self.escape(
                &g2,
                &c,
                std::slice::from_ref(&x),
                at,
                "boxed function's output",
            )?
        };
        if !is_simple_type(&c) {
            return fail(
                K::NotSimpleType,
                at,
                format!(
                    "`box` needs a function with a simple output type, but the output has type {}",
                    ty(&c)
                ),
            );
        }
        Ok((
            Term::new(TermKind::Box(s2.clone(), b2), at),
            Type::circ(s2, c),
            u,
        ))
    }

    fn box_mismatch<T>(&self, body: &Term, t: &Type) -> R<T> {
        fail(
            K::TypeMismatch,
            body.span,
            format!(
                "`box` expects a term of type !(S -o U), but `{}` has type {}",
                show(body),
                ty(t)
            ),
        )
    }

    fn validate_boxed(&self, b: &BoxedCircuit, at: Span) -> R<()> {
        b.validate().map_err(|e| {
            TypeError::new(K::TypeMismatch, at, format!("malformed boxed circuit: {e}"))
        })
    }

    fn check_iface(&self, g: &Context, t: &Term, a: &Type) -> bool {
        let a = self.normalize_type(g, a);
        match (&*t.kind, &a) {
            (TermKind::Unit, Type::Unit) => true,
            (TermKind::Label(l), Type::Qubit) => l.sort == Sort::Qubit,
            (TermKind::Label(l), Type::Bit) => l.sort == Sort::Bit,
            (TermKind::Pair(p, q), Type::Tensor(x, d, c)) => {
                !occurs_free_type(x, c) && self.check_iface(g, p, d) && self.check_iface(g, q, c)
            }
            (TermKind::Const(Constant::VNil, args), Type::Vec(_, n)) => {
                args.is_empty() && self.normalize_term(g, n).as_numeral() == Some(0)
            }
            (TermKind::Const(Constant::VCons, args), Type::Vec(e, n)) if args.len() == 2 => {
                match &*self.normalize_term(g, n).kind {
                    TermKind::Const(Constant::Succ, ps) if ps.len() == 1 => {
                        self.check_iface(g, &args[0], e)
                            && self.check_iface(g, &args[1], &Type::Vec(e.clone(), ps[0].clone()))
                    }
                    _ => false,
                }
            }
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Label;
    use crate::front::{parse_program, parse_term, parse_type};

    fn t(s: &str) -> Term {
        parse_term(s, true).unwrap()
    }

    fn tyx(s: &str) -> Type {
        parse_type(s, true).unwrap()
    }

    fn kind_of<T: std::fmt::Debug>(r: R<T>) -> K {
        r.unwrap_err().kind
    }

    #[test]
    fn well_formed_contexts() {
        let env = Env::new();
        let c = Checker::new(&env);
        assert!(c
            .wf_context(&Context::new().with_var("x", Index::One, Type::Qubit))
            .is_ok());
        let bad = Context::new().with_var("x", Index::Omega, Type::Qubit);
        assert_eq!(kind_of(c.wf_context(&bad)), K::LinearityViolation);
        let dep = Context::new()
            .with_var("n", Index::Omega, Type::Nat)
            .with_var("q", Index::One, tyx("Vec Qubit n"));
        assert!(c.wf_context(&dep).is_ok());
        let dup = Context::new()
            .with_var("n", Index::Omega, Type::Nat)
            .with_var("n", Index::Omega, Type::Nat);
        assert_eq!(kind_of(c.wf_context(&dup)), K::KindMismatch);
    }

    #[test]
    fn kinding() {
        let env = Env::new();
        let c = Checker::new(&env);
        let empty = Context::new();
        assert!(c
            .kind_check(&empty, &tyx("(x : List Qubit) -o Vec Qubit (toNat x)"))
            .is_ok());
        assert!(c.kind_check(&empty, &tyx("!Qubit")).is_ok());
        let labelled = Type::vec(Type::Qubit, Term::label(Label::qubit(0)));
        assert_eq!(
            kind_of(c.kind_check(&empty, &labelled)),
            K::NotParameterTerm
        );
        assert_eq!(
            kind_of(c.kind_check(&empty, &tyx("Qubit -> Nat"))),
            K::KindMismatch
        );
        assert_eq!(
            kind_of(c.kind_check(&empty, &tyx("Circ(List Qubit, Qubit)"))),
            K::NotSimpleType
        );
        assert_eq!(
            kind_of(c.kind_check(&empty, &tyx("Vec Qubit n"))),
            K::UnboundName
        );
        let linear = Context::new().with_var("q", Index::One, Type::Qubit);
        assert_eq!(
            kind_of(c.kind_check(&linear, &Type::Unit)),
            K::NotParameterContext
        );
    }

    #[test]
    fn conv_checks_at_its_declared_type() {
        let src = "conv : !((x : List Qubit) -o Vec Qubit (toNat x))\n\
                   conv = \\x -> case x of { Nil -> VNil ; Cons q qs -> VCons q (conv qs) }\n";
        let p =
            super::super::check_program(&parse_program(src).unwrap(), Default::default()).unwrap();
        assert_eq!(
            pretty_type(&p.decls[0].ty),
            "!((x : List Qubit) -o Vec Qubit (toNat x))"
        );
    }

    #[test]
    fn pair_duplication_is_linear_error() {
        let env = Env::new();
        let c = Checker::new(&env);
        let r = c.type_check(
            &Context::new(),
            &t("\\x -> (x, x)"),
            &tyx("Qubit -o Qubit * Qubit"),
        );
        assert_eq!(kind_of(r), K::LinearityViolation);
    }

    #[test]
    fn unbox_checks() {
        let env = Env::new();
        let c = Checker::new(&env);
        let ty = tyx("Circ(Qubit * Bit, Bit) -o !(Qubit * Bit -o Bit)");
        let u = c
            .type_check(&Context::new(), &t("\\c -> lift (\\s -> apply(c, s))"), &ty)
            .unwrap();
        assert_eq!(u, UsageReport::new());
    }

    #[test]
    fn boxed_circuit_infers_gate_type() {
        let env = Env::new();
        let c = Checker::new(&env);
        let (ty, u) = c
            .type_infer(&Context::new(), &t("#circ(ℓ0 ; [H ℓ0 -> ℓ1] ; ℓ1)"))
            .unwrap();
        assert_eq!(pretty_type(&ty), "Circ(Qubit, Qubit)");
        assert_eq!(u, UsageReport::new());
    }

    #[test]
    fn check_mode_examples() {
        let env = Env::new();
        let c = Checker::new(&env).recording();
        assert_eq!(
            c.type_check(&Context::new(), &Term::unit(), &Type::Unit)
                .unwrap(),
            UsageReport::new()
        );
        c.type_check(&Context::new(), &t("\\x -> x"), &tyx("Qubit -o Qubit"))
            .unwrap();
        let j = c.judgments();
        assert_eq!(j.len(), 1);
        assert_eq!(j[0].ctx.lookup_var("x").unwrap().index, Index::One);
        let l0 = Label::qubit(0);
        let g = Context::new().with_label(l0, Index::One);
        let r = c.type_check(&g, &Term::lift(Term::label(l0)), &tyx("!Qubit"));
        assert_eq!(kind_of(r), K::NotParameterContext);
    }

    #[test]
    fn usage_must_match_annotations() {
        let env = Env::new();
        let c = Checker::new(&env);
        let g = Context::new().with_var("q", Index::One, Type::Qubit);
        assert_eq!(
            kind_of(c.type_infer(&g, &Term::unit())),
            K::LinearityViolation
        );
        let (_, u) = c.type_infer(&g, &t("q")).unwrap();
        assert_eq!(u.get_var("q"), Index::One);
        let p = Context::new().with_var("n", Index::Omega, Type::Nat);
        let (_, u) = c.type_infer(&p, &t("(n, n)")).unwrap();
        assert_eq!(u.get_var("n"), Index::Omega);
    }

    #[test]
    fn conversion() {
        let env = Env::new();
        let c = Checker::new(&env);
        let e = Context::new();
        assert!(c.type_eq(
            &e,
            &tyx("Vec Qubit (toNat (Cons unit Nil))"),
            &tyx("Vec Qubit (Succ Zero)")
        ));
        assert!(!c.type_eq(&e, &Type::Qubit, &Type::Bit));
        let n = Context::new().with_var("n", Index::Omega, Type::Nat);
        assert!(c.type_eq(&n, &tyx("Vec Qubit n"), &tyx("Vec Qubit n")));
        assert!(!c.type_eq(&e, &tyx("List Unit"), &Type::Nat));
    }

    #[test]
    fn elaboration_inserts_lift_and_force() {
        let env = Env::new();
        let c = Checker::elaborating(&env);
        let e = Context::new();
        let m = c
            .elaborate(&e, &t("\\x -> x"), Some(&tyx("!(Qubit -o Qubit)")))
            .unwrap();
        assert_eq!(pretty_term(&m), "lift (\\x -> x)");
        let g = Context::new()
            .with_var(
                "conv",
                Index::Omega,
                tyx("!((x : List Qubit) -o Vec Qubit (toNat x))"),
            )
            .with_var("ys", Index::One, tyx("List Qubit"));
        let m = c.elaborate(&g, &t("conv ys"), None).unwrap();
        assert_eq!(pretty_term(&m), "force conv ys");
        let m = c.elaborate(&e, &Term::unit(), Some(&Type::Unit)).unwrap();
        assert_eq!(pretty_term(&m), "unit");
    }

    #[test]
    fn vector_case_needs_known_length() {
        let env = Env::new();
        let c = Checker::elaborating(&env);
        let g = Context::new()
            .with_var("n", Index::Omega, Type::Nat)
            .with_var("v", Index::One, tyx("Vec Qubit n"));
        let r = c.elaborate(&g, &t("case v of { VCons q qs -> q }"), Some(&Type::Qubit));
        assert_eq!(kind_of(r), K::TypeMismatch);
        let g3 = Context::new().with_var("v", Index::One, tyx("Vec Qubit 1"));
        let r = c.elaborate(&g3, &t("case v of { VNil -> unit }"), Some(&Type::Unit));
        assert_eq!(kind_of(r), K::TypeMismatch);
    }

    #[test]
    fn shadowed_binders_resolve_to_the_innermost() {
        let env = Env::new();
        let c = Checker::new(&env);
        let g = Context::new().with_var("p", Index::One, tyx("Nat * Qubit"));
        let (ty, _) = c.type_infer(&g, &t("let (x, x) = p in x")).unwrap();
        assert!(matches!(ty, Type::Qubit));
    }

    #[test]
    fn known_scrutinee_selects_its_branch() {
        let env = Env::new();
        let c = Checker::new(&env);
        let g = Context::new().with_var("v", Index::One, tyx("Vec Qubit 2"));
        let m = t("case 2 of { Zero -> v ; Succ k -> case v of { VCons q qs -> VCons q qs } }");
        assert!(c.type_check(&g, &m, &tyx("Vec Qubit 2")).is_ok());
    }
}
