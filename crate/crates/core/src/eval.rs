//! Big-step call-by-value evaluation of configurations `(C, M)`.
//!
//! Evaluation is defined on open terms because the type checker normalizes
//! the parameter terms embedded in types. A term whose head is a free
//! variable evaluates to itself with its evaluable parts reduced.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use thiserror::Error;

use crate::circuit::{
    append, gate_circuit, gen, identity_circuit, BoxedCircuit, Circuit, CircuitError, LabelSupply,
};
use crate::front::pretty_term;
use crate::shape::shape_term;
use crate::syntax::{
    free_vars, free_vars_type, fresh_name, is_parameter_term, name, rename, subst, Branch,
    Constant, Name, Term, TermKind, Type,
};

pub const DEFAULT_FUEL: u64 = 1_000_000;

const STACK_RED_ZONE: usize = 128 * 1024;
const STACK_GROWTH: usize = 4 * 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("evaluation is stuck at `{0}`")]
    StuckTerm(String),
    #[error("parameter evaluation changed the circuit")]
    CircuitMutated,
    #[error("`{0}` is not a parameter term")]
    NotParameterTerm(String),
    #[error("evaluation exceeded its budget of {0} steps")]
    ResourceExhausted(u64),
    #[error("program has no `main` declaration")]
    NoMain,
    #[error("box annotation `{0}` is not closed after evaluation")]
    OpenBoxType(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Elaborated bodies of top-level declarations, looked up by name when a
/// free variable is evaluated.
#[derive(Clone, Debug, Default)]
pub struct Globals {
    defs: HashMap<Name, Term>,
}

impl Globals {
    pub fn new() -> Globals {
        Globals::default()
    }

    pub fn insert(&mut self, x: Name, body: Term) {
        self.defs.insert(x, body);
    }

    pub fn get(&self, x: &str) -> Option<&Term> {
        self.defs.get(x)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.defs.contains_key(x)
    }
}

/// A circuit under construction paired with the term that drives it.
#[derive(Clone, Debug)]
pub struct Configuration {
    pub circuit: Circuit,
    pub term: Term,
    pub supply: LabelSupply,
}

impl Configuration {
    pub fn new(circuit: Circuit, term: Term, supply: LabelSupply) -> Configuration {
        Configuration {
            circuit,
            term,
            supply,
        }
    }
}

pub struct Evaluator<'g> {
    globals: &'g Globals,
    pub supply: LabelSupply,
    fuel: u64,
    budget: u64,
    opaque: Vec<Name>,
}

fn stuck(t: &Term) -> EvalError {
    EvalError::StuckTerm(pretty_term(t))
}

impl<'g> Evaluator<'g> {
    pub fn new(globals: &'g Globals, supply: LabelSupply) -> Evaluator<'g> {
        Evaluator::with_fuel(globals, supply, DEFAULT_FUEL)
    }

    pub fn with_fuel(globals: &'g Globals, supply: LabelSupply, fuel: u64) -> Evaluator<'g> {
        Evaluator {
            globals,
            supply,
            fuel,
            budget: fuel,
            opaque: Vec::new(),
        }
    }

    /// Names that must be treated as free variables even when a global of
    /// the same name exists.
    pub fn set_opaque(&mut self, names: impl IntoIterator<Item = Name>) {
        self.opaque = names.into_iter().collect();
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        if self.fuel == 0 {
            return Err(EvalError::ResourceExhausted(self.budget));
        }
        self.fuel -= 1;
        Ok(())
    }

    fn global(&self, x: &str) -> Option<Term> {
        if self.opaque.iter().any(|o| &**o == x) {
            return None;
        }
        self.globals.get(x).cloned()
    }

    /// Heads that are stuck on a free variable.
    fn is_neutral(&self, t: &Term) -> bool {
        match &*t.kind {
            TermKind::Var(x) => self.global(x).is_none(),
            TermKind::App(f, _)
            | TermKind::AppPrime(f, _)
            | TermKind::Apply(f, _)
            | TermKind::ApplyPrime(f, _)
            | TermKind::Force(f)
            | TermKind::ForcePrime(f)
            | TermKind::Box(_, f)
            | TermKind::LetPair(_, _, f, _)
            | TermKind::Case(f, _) => self.is_neutral(f),
            TermKind::Const(Constant::ToNat, args) => args.len() == 1 && self.is_neutral(&args[0]),
            _ => false,
        }
    }

    pub fn eval_config(&mut self, cfg: Configuration) -> Result<Configuration, EvalError> {
        self.supply = cfg.supply;
        let (circuit, term) = self.eval(cfg.circuit, &cfg.term)?;
        Ok(Configuration {
            circuit,
            term,
            supply: self.supply.clone(),
        })
    }

    /// Evaluates a parameter term and checks that the circuit is unchanged.
    pub fn eval_param(&mut self, circuit: Circuit, t: &Term) -> Result<(Circuit, Term), EvalError> {
        if !is_parameter_term(t) {
            return Err(EvalError::NotParameterTerm(pretty_term(t)));
        }
        let before = circuit.clone();
        let (after, v) = self.eval(circuit, t)?;
        if after != before {
            return Err(EvalError::CircuitMutated);
        }
        Ok((after, v))
    }

    pub fn eval(&mut self, c: Circuit, t: &Term) -> Result<(Circuit, Term), EvalError> {
        stacker::maybe_grow(STACK_RED_ZONE, STACK_GROWTH, || self.step(c, t))
    }

    fn step(&mut self, c: Circuit, t: &Term) -> Result<(Circuit, Term), EvalError> {
        self.tick()?;
        match &*t.kind {
            TermKind::Unit
            | TermKind::Label(_)
            | TermKind::Lam(..)
            | TermKind::LamPrime(..)
            | TermKind::Lift(_)
            | TermKind::Boxed(_) => Ok((c, t.clone())),
            TermKind::Var(x) => match self.global(x) {
                Some(body) => self.eval(c, &body),
                None => Ok((c, t.clone())),
            },
            TermKind::Pair(a, b) => {
                let (c, va) = self.eval(c, a)?;
                let (c, vb) = self.eval(c, b)?;
                Ok((c, Term::new(TermKind::Pair(va, vb), t.span)))
            }
            TermKind::App(m, n) => {
                let (c, f) = self.eval(c, m)?;
                let (c, v) = self.eval(c, n)?;
                match &*f.kind {
                    TermKind::Lam(x, body) => self.eval(c, &subst(body, x, &v)),
                    _ if self.is_neutral(&f) => Ok((c, Term::new(TermKind::App(f, v), t.span))),
                    _ => Err(stuck(t)),
                }
            }
            TermKind::AppPrime(m, n) => {
                let (c, f) = self.eval(c, m)?;
                let (c, v) = self.eval(c, n)?;
                match &*f.kind {
                    TermKind::LamPrime(x, body) => self.eval(c, &subst(body, x, &v)),
                    _ if self.is_neutral(&f) => {
                        Ok((c, Term::new(TermKind::AppPrime(f, v), t.span)))
                    }
                    _ => Err(stuck(t)),
                }
            }
            TermKind::Force(m) => {
                let (c, v) = self.eval(c, m)?;
                match &*v.kind {
                    TermKind::Lift(body) => self.eval(c, body),
                    _ if self.is_neutral(&v) => Ok((c, Term::new(TermKind::Force(v), t.span))),
                    _ => Err(stuck(t)),
                }
            }
            TermKind::ForcePrime(r) => {
                let before = c.clone();
                let (c, v) = self.eval(c, r)?;
                match &*v.kind {
                    TermKind::Lift(body) => {
                        if c != before {
                            return Err(EvalError::CircuitMutated);
                        }
                        self.eval(c, &shape_term(body))
                    }
                    _ if self.is_neutral(&v) => Ok((c, Term::new(TermKind::ForcePrime(v), t.span))),
                    _ => Err(stuck(t)),
                }
            }
            TermKind::LetPair(x, y, n, m) => {
                let (c, v) = self.eval(c, n)?;
                match &*v.kind {
                    TermKind::Pair(v1, v2) => {
                        let body =
                            subst_many(m, &[x.clone(), y.clone()], &[v1.clone(), v2.clone()]);
                        self.eval(c, &body)
                    }
                    _ if self.is_neutral(&v) => Ok((
                        c,
                        Term::new(
                            TermKind::LetPair(x.clone(), y.clone(), v, m.clone()),
                            t.span,
                        ),
                    )),
                    _ => Err(stuck(t)),
                }
            }
            TermKind::Box(s, m) => {
                let (c, v) = self.eval(c, m)?;
                match &*v.kind {
                    TermKind::Lift(body) => {
                        let boxed = self.box_circuit(s, body)?;
                        Ok((c, Term::new(TermKind::Boxed(Rc::new(boxed)), t.span)))
                    }
                    _ if self.is_neutral(&v) => {
                        Ok((c, Term::new(TermKind::Box(s.clone(), v), t.span)))
                    }
                    _ => Err(stuck(t)),
                }
            }
            TermKind::Apply(m, n) => {
                let (c, f) = self.eval(c, m)?;
                let (c, a) = self.eval(c, n)?;
                match &*f.kind {
                    TermKind::Boxed(b) => {
                        let (c, out) = append(&c, &a, b, &mut self.supply)?;
                        Ok((c, out))
                    }
                    _ if self.is_neutral(&f) => Ok((c, Term::new(TermKind::Apply(f, a), t.span))),
                    _ => Err(stuck(t)),
                }
            }
            TermKind::ApplyPrime(m, n) => {
                let (c, f) = self.eval(c, m)?;
                let (c, a) = self.eval(c, n)?;
                match &*f.kind {
                    TermKind::Boxed(b) => Ok((c, shape_term(&b.output))),
                    _ if self.is_neutral(&f) => {
                        Ok((c, Term::new(TermKind::ApplyPrime(f, a), t.span)))
                    }
                    _ => Err(stuck(t)),
                }
            }
            TermKind::Const(k, args) => {
                let mut c = c;
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    let (c2, v) = self.eval(c, a)?;
                    c = c2;
                    vals.push(v);
                }
                if vals.len() != k.arity() {
                    return Err(stuck(t));
                }
                match k {
                    Constant::Gate(g) => {
                        let boxed = gate_circuit(*g, &mut self.supply);
                        Ok((c, Term::new(TermKind::Boxed(Rc::new(boxed)), t.span)))
                    }
                    Constant::ToNat => {
                        let n = self.nat_of(&vals[0])?;
                        Ok((c, n))
                    }
                    _ => Ok((c, Term::new(TermKind::Const(*k, vals), t.span))),
                }
            }
            TermKind::Case(s, branches) => {
                let (c, v) = self.eval(c, s)?;
                match &*v.kind {
                    TermKind::Const(k, args) if k.is_constructor() => {
                        let br = branches
                            .iter()
                            .find(|b| b.con == *k && b.binders.len() == args.len())
                            .ok_or_else(|| stuck(t))?;
                        let body = subst_many(&br.body, &br.binders, args);
                        self.eval(c, &body)
                    }
                    _ if self.is_neutral(&v) => {
                        Ok((c, Term::new(TermKind::Case(v, branches.clone()), t.span)))
                    }
                    _ => Err(stuck(t)),
                }
            }
        }
    }

    fn nat_of(&mut self, list: &Term) -> Result<Term, EvalError> {
        self.tick()?;
        match &*list.kind {
            TermKind::Const(Constant::Nil, args) if args.is_empty() => Ok(Term::zero()),
            TermKind::Const(Constant::Cons, args) if args.len() == 2 => {
                Ok(Term::succ(self.nat_of(&args[1])?))
            }
            _ if self.is_neutral(list) => Ok(Term::to_nat(list.clone())),
            _ => Err(stuck(&Term::to_nat(list.clone()))),
        }
    }

    /// `box_S (lift M')`: instantiate the annotation, generate a fresh
    /// interface and run `M' a` against the identity circuit on it.
    fn box_circuit(&mut self, s: &Type, body: &Term) -> Result<BoxedCircuit, EvalError> {
        let s = self.normalize_type(s)?;
        if !free_vars_type(&s).is_empty() {
            return Err(EvalError::OpenBoxType(crate::front::pretty_type(&s)));
        }
        let a = gen(&s, &mut self.supply)?;
        let (d, b) = self.eval(identity_circuit(&a), &Term::app(body.clone(), a.clone()))?;
        Ok(BoxedCircuit {
            input: a,
            circuit: d,
            output: b,
        })
    }

    /// Evaluates every term embedded in a type against a throwaway
    /// identity circuit.
    pub fn normalize_type(&mut self, ty: &Type) -> Result<Type, EvalError> {
        Ok(match ty {
            Type::Qubit | Type::Bit | Type::Unit | Type::Nat => ty.clone(),
            Type::List(a) => Type::List(Rc::new(self.normalize_type(a)?)),
            Type::Bang(a) => Type::Bang(Rc::new(self.normalize_type(a)?)),
            Type::Circ(a, b) => Type::Circ(
                Rc::new(self.normalize_type(a)?),
                Rc::new(self.normalize_type(b)?),
            ),
            Type::Vec(a, r) => {
                let (_, v) = self.eval(Circuit::default(), r)?;
                Type::Vec(Rc::new(self.normalize_type(a)?), v)
            }
            Type::Pi(x, a, b) | Type::Tensor(x, a, b) | Type::Arrow(x, a, b) => {
                let a = Rc::new(self.normalize_type(a)?);
                self.opaque.push(x.clone());
                let b = self.normalize_type(b);
                self.opaque.pop();
                let b = Rc::new(b?);
                match ty {
                    Type::Pi(..) => Type::Pi(x.clone(), a, b),
                    Type::Tensor(..) => Type::Tensor(x.clone(), a, b),
                    _ => Type::Arrow(x.clone(), a, b),
                }
            }
        })
    }
}

/// Simultaneous substitution of values for binders. Binders that occur
/// free in any replacement are renamed first so that the sequential
/// substitutions cannot interfere.
pub fn subst_many(body: &Term, binders: &[Name], values: &[Term]) -> Term {
    let mut fv: BTreeSet<Name> = BTreeSet::new();
    for v in values {
        fv.extend(free_vars(v));
    }
    let mut body = body.clone();
    let mut names: Vec<Name> = binders.to_vec();
    if names.iter().any(|x| fv.contains(x)) {
        let mut avoid = fv.clone();
        avoid.extend(free_vars(&body));
        avoid.extend(names.iter().cloned());
        for x in names.iter_mut() {
            if fv.contains(x) {
                let fresh = fresh_name(x, &avoid);
                avoid.insert(fresh.clone());
                body = rename(&body, x, &fresh);
                *x = fresh;
            }
        }
    }
    for (x, v) in names.iter().zip(values) {
        body = subst(&body, x, v);
    }
    body
}

/// Evaluates a closed configuration with no globals in scope.
pub fn eval(cfg: Configuration) -> Result<Configuration, EvalError> {
    let globals = Globals::new();
    let mut ev = Evaluator::new(&globals, LabelSupply::new());
    ev.eval_config(cfg)
}

/// Outcome of running `main`.
#[derive(Clone, Debug)]
pub struct MainResult {
    pub config: Configuration,
    pub boxed: Option<BoxedCircuit>,
}

/// Evaluates `main` in the empty circuit with a fresh label supply.
pub fn run_main(globals: &Globals, fuel: u64) -> Result<MainResult, EvalError> {
    let main = globals.get("main").ok_or(EvalError::NoMain)?.clone();
    let mut ev = Evaluator::with_fuel(globals, LabelSupply::new(), fuel);
    let config = ev.eval_config(Configuration::new(
        Circuit::default(),
        main,
        LabelSupply::new(),
    ))?;
    let boxed = match &*config.term.kind {
        TermKind::Boxed(b) => Some((**b).clone()),
        _ => None,
    };
    Ok(MainResult { config, boxed })
}

/// `name` helper for callers building global tables by hand.
pub fn global_name(s: &str) -> Name {
    name(s)
}

#[allow(dead_code)]
fn branch_names(b: &Branch) -> Vec<Name> {
    b.binders.clone()
}
