use std::fmt;
use std::rc::Rc;

use crate::circuit::{BoxedCircuit, GateKind, Label};

pub type Name = Rc<str>;

/// Binder name used for non-dependent function and tensor types.
pub const ANON: &str = "_";

pub fn name(s: &str) -> Name {
    Rc::from(s)
}

/// A position in a source file. Lines and columns are 1-based; a line of 0
/// marks a synthesized node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub offset: usize,
    pub line: u32,
    pub col: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: Pos,
    pub end: Pos,
}

impl Span {
    pub fn new(start: Pos, end: Pos) -> Span {
        Span { start, end }
    }

    pub fn is_dummy(&self) -> bool {
        self.start.line == 0
    }

    /// Smallest span covering both; dummy spans are ignored.
    pub fn to(self, other: Span) -> Span {
        if self.is_dummy() {
            return other;
        }
        if other.is_dummy() {
            return self;
        }
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start.line, self.start.col)
    }
}

#[derive(Clone, Debug)]
pub enum Type {
    Qubit,
    Bit,
    Unit,
    Nat,
    List(Rc<Type>),
    /// Length-indexed vector; the length must be a parameter term.
    Vec(Rc<Type>, Term),
    Bang(Rc<Type>),
    /// Linear dependent function type `(x : A) -o B`.
    Pi(Name, Rc<Type>, Rc<Type>),
    /// Dependent tensor `(x : A) * B`.
    Tensor(Name, Rc<Type>, Rc<Type>),
    /// Intuitionistic dependent function type `(x : P) -> P'` over parameter types.
    Arrow(Name, Rc<Type>, Rc<Type>),
    Circ(Rc<Type>, Rc<Type>),
}

impl Type {
    pub fn list(elem: Type) -> Type {
        Type::List(Rc::new(elem))
    }

    pub fn vec(elem: Type, len: Term) -> Type {
        Type::Vec(Rc::new(elem), len)
    }

    pub fn bang(inner: Type) -> Type {
        Type::Bang(Rc::new(inner))
    }

    pub fn pi(binder: &str, dom: Type, cod: Type) -> Type {
        Type::Pi(name(binder), Rc::new(dom), Rc::new(cod))
    }

    pub fn lolli(dom: Type, cod: Type) -> Type {
        Type::pi(ANON, dom, cod)
    }

    pub fn tensor(binder: &str, left: Type, right: Type) -> Type {
        Type::Tensor(name(binder), Rc::new(left), Rc::new(right))
    }

    pub fn pair(left: Type, right: Type) -> Type {
        Type::tensor(ANON, left, right)
    }

    pub fn arrow(binder: &str, dom: Type, cod: Type) -> Type {
        Type::Arrow(name(binder), Rc::new(dom), Rc::new(cod))
    }

    pub fn circ(input: Type, output: Type) -> Type {
        Type::Circ(Rc::new(input), Rc::new(output))
    }
}

/// Built-in constants. Constructors and `toNat` are applied to their
/// arguments through [`TermKind::Const`]; gates take no arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constant {
    Zero,
    Succ,
    Nil,
    Cons,
    VNil,
    VCons,
    ToNat,
    Gate(GateKind),
}

impl Constant {
    pub fn arity(self) -> usize {
        match self {
            Constant::Zero | Constant::Nil | Constant::VNil | Constant::Gate(_) => 0,
            Constant::Succ | Constant::ToNat => 1,
            Constant::Cons | Constant::VCons => 2,
        }
    }

    pub fn is_constructor(self) -> bool {
        !matches!(self, Constant::ToNat | Constant::Gate(_))
    }

    pub fn name(self) -> &'static str {
        match self {
            Constant::Zero => "Zero",
            Constant::Succ => "Succ",
            Constant::Nil => "Nil",
            Constant::Cons => "Cons",
            Constant::VNil => "VNil",
            Constant::VCons => "VCons",
            Constant::ToNat => "toNat",
            Constant::Gate(g) => g.name(),
        }
    }

    pub fn from_name(s: &str) -> Option<Constant> {
        Some(match s {
            "Zero" => Constant::Zero,
            "Succ" => Constant::Succ,
            "Nil" => Constant::Nil,
            "Cons" => Constant::Cons,
            "VNil" => Constant::VNil,
            "VCons" => Constant::VCons,
            "toNat" => Constant::ToNat,
            other => Constant::Gate(GateKind::from_name(other)?),
        })
    }
}

/// One alternative of a `case`: a constructor applied to distinct binders.
#[derive(Clone, Debug)]
pub struct Branch {
    pub con: Constant,
    pub binders: Vec<Name>,
    pub body: Term,
}

#[derive(Clone, Debug)]
pub enum TermKind {
    Unit,
    Var(Name),
    Label(Label),
    Const(Constant, Vec<Term>),
    Lam(Name, Term),
    App(Term, Term),
    Lift(Term),
    Force(Term),
    ForcePrime(Term),
    Pair(Term, Term),
    LetPair(Name, Name, Term, Term),
    LamPrime(Name, Term),
    AppPrime(Term, Term),
    Box(Type, Term),
    Apply(Term, Term),
    ApplyPrime(Term, Term),
    Boxed(Rc<BoxedCircuit>),
    Case(Term, Vec<Branch>),
}

/// A term together with the source region it came from. Cloning is cheap.
#[derive(Clone)]
pub struct Term {
    pub kind: Rc<TermKind>,
    pub span: Span,
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.kind, f)
    }
}

impl Term {
    pub fn new(kind: TermKind, span: Span) -> Term {
        Term {
            kind: Rc::new(kind),
            span,
        }
    }

    pub fn mk(kind: TermKind) -> Term {
        Term::new(kind, Span::default())
    }

    /// Same node with a different span.
    pub fn at(mut self, span: Span) -> Term {
        self.span = span;
        self
    }

    pub fn unit() -> Term {
        Term::mk(TermKind::Unit)
    }

    pub fn var(x: &str) -> Term {
        Term::mk(TermKind::Var(name(x)))
    }

    pub fn label(l: Label) -> Term {
        Term::mk(TermKind::Label(l))
    }

    pub fn constant(c: Constant, args: Vec<Term>) -> Term {
        Term::mk(TermKind::Const(c, args))
    }

    pub fn gate(g: GateKind) -> Term {
        Term::constant(Constant::Gate(g), vec![])
    }

    pub fn lam(x: &str, body: Term) -> Term {
        Term::mk(TermKind::Lam(name(x), body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::mk(TermKind::App(f, a))
    }

    pub fn lift(m: Term) -> Term {
        Term::mk(TermKind::Lift(m))
    }

    pub fn force(m: Term) -> Term {
        Term::mk(TermKind::Force(m))
    }

    pub fn force_prime(m: Term) -> Term {
        Term::mk(TermKind::ForcePrime(m))
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::mk(TermKind::Pair(a, b))
    }

    pub fn let_pair(x: &str, y: &str, scrutinee: Term, body: Term) -> Term {
        Term::mk(TermKind::LetPair(name(x), name(y), scrutinee, body))
    }

    pub fn lam_prime(x: &str, body: Term) -> Term {
        Term::mk(TermKind::LamPrime(name(x), body))
    }

    pub fn app_prime(f: Term, a: Term) -> Term {
        Term::mk(TermKind::AppPrime(f, a))
    }

    pub fn boxt(s: Type, m: Term) -> Term {
        Term::mk(TermKind::Box(s, m))
    }

    pub fn apply(c: Term, s: Term) -> Term {
        Term::mk(TermKind::Apply(c, s))
    }

    pub fn apply_prime(c: Term, s: Term) -> Term {
        Term::mk(TermKind::ApplyPrime(c, s))
    }

    pub fn boxed(b: BoxedCircuit) -> Term {
        Term::mk(TermKind::Boxed(Rc::new(b)))
    }

    pub fn case(scrutinee: Term, branches: Vec<Branch>) -> Term {
        Term::mk(TermKind::Case(scrutinee, branches))
    }

    pub fn zero() -> Term {
        Term::constant(Constant::Zero, vec![])
    }

    pub fn succ(n: Term) -> Term {
        Term::constant(Constant::Succ, vec![n])
    }

    pub fn nat(n: usize) -> Term {
        (0..n).fold(Term::zero(), |acc, _| Term::succ(acc))
    }

    pub fn nil() -> Term {
        Term::constant(Constant::Nil, vec![])
    }

    pub fn cons(h: Term, t: Term) -> Term {
        Term::constant(Constant::Cons, vec![h, t])
    }

    pub fn list(items: Vec<Term>) -> Term {
        items
            .into_iter()
            .rev()
            .fold(Term::nil(), |acc, h| Term::cons(h, acc))
    }

    pub fn vnil() -> Term {
        Term::constant(Constant::VNil, vec![])
    }

    pub fn vcons(h: Term, t: Term) -> Term {
        Term::constant(Constant::VCons, vec![h, t])
    }

    pub fn vector(items: Vec<Term>) -> Term {
        items
            .into_iter()
            .rev()
            .fold(Term::vnil(), |acc, h| Term::vcons(h, acc))
    }

    pub fn to_nat(l: Term) -> Term {
        Term::constant(Constant::ToNat, vec![l])
    }

    pub fn as_var(&self) -> Option<&Name> {
        match &*self.kind {
            TermKind::Var(x) => Some(x),
            _ => None,
        }
    }

    /// Reads a closed numeral `Succ (... Zero)`.
    pub fn as_numeral(&self) -> Option<usize> {
        let mut n = 0;
        let mut t = self;
        loop {
            match &*t.kind {
                TermKind::Const(Constant::Zero, args) if args.is_empty() => return Some(n),
                TermKind::Const(Constant::Succ, args) if args.len() == 1 => {
                    n += 1;
                    t = &args[0];
                }
                _ => return None,
            }
        }
    }
}

/// Top-level declaration `name : ty` / `name = body`.
#[derive(Clone, Debug)]
pub struct Declaration {
    pub name: Name,
    pub ty: Option<Type>,
    pub body: Term,
    pub span: Span,
    pub ty_span: Span,
}
