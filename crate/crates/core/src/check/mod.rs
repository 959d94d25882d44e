//! Kinding, typing with usage indices, type conversion and elaboration.

mod checker;
mod program;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::eval::Globals;
use crate::syntax::{Binder, Context, Index, Name, Span, Term, Type};

pub use checker::{Checker, Judgment};
pub use program::{check_program, CheckOptions, CheckedDecl, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TypeErrorKind {
    LinearityViolation,
    UnboundName,
    KindMismatch,
    TypeMismatch,
    NotParameterContext,
    NotSimpleType,
    NotParameterTerm,
    ArityMismatch,
}

impl TypeErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            TypeErrorKind::LinearityViolation => "LinearityViolation",
            TypeErrorKind::UnboundName => "UnboundName",
            TypeErrorKind::KindMismatch => "KindMismatch",
            TypeErrorKind::TypeMismatch => "TypeMismatch",
            TypeErrorKind::NotParameterContext => "NotParameterContext",
            TypeErrorKind::NotSimpleType => "NotSimpleType",
            TypeErrorKind::NotParameterTerm => "NotParameterTerm",
            TypeErrorKind::ArityMismatch => "ArityMismatch",
        }
    }
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub span: Span,
    pub message: String,
}

impl TypeError {
    pub fn new(kind: TypeErrorKind, span: Span, message: impl Into<String>) -> TypeError {
        TypeError {
            kind,
            span,
            message: message.into(),
        }
    }

    /// `file:line:col: Kind: message`
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{}: {}: {}", self.span, self.kind, self.message)
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.span, self.kind, self.message)
    }
}

impl std::error::Error for TypeError {}

/// How many times a term consumes each binder of its context. Binders
/// that do not appear are used zero times.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UsageReport {
    uses: BTreeMap<Binder, Index>,
}

impl UsageReport {
    pub fn new() -> UsageReport {
        UsageReport::default()
    }

    pub fn single(b: Binder) -> UsageReport {
        let mut u = UsageReport::new();
        u.uses.insert(b, Index::One);
        u
    }

    pub fn get(&self, b: &Binder) -> Index {
        self.uses.get(b).copied().unwrap_or(Index::Zero)
    }

    pub fn get_var(&self, x: &str) -> Index {
        self.uses
            .iter()
            .find(|(b, _)| matches!(b, Binder::Var(v) if &**v == x))
            .map_or(Index::Zero, |(_, k)| *k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Binder, &Index)> {
        self.uses.iter()
    }

    pub fn set(&mut self, b: Binder, k: Index) {
        if k.is_zero() {
            self.uses.remove(&b);
        } else {
            self.uses.insert(b, k);
        }
    }

    pub fn remove(&mut self, b: &Binder) -> Index {
        self.uses.remove(b).unwrap_or(Index::Zero)
    }
}

/// Types and elaborated bodies of the top-level declarations in scope.
#[derive(Clone, Debug, Default)]
pub struct Env {
    types: HashMap<Name, Type>,
    order: Vec<Name>,
    bodies: Globals,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn declare(&mut self, x: Name, ty: Type) {
        if !self.types.contains_key(&x) {
            self.order.push(x.clone());
        }
        self.types.insert(x, ty);
    }

    pub fn define(&mut self, x: Name, body: Term) {
        self.bodies.insert(x, body);
    }

    pub fn lookup(&self, x: &str) -> Option<&Type> {
        self.types.get(x)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.types.contains_key(x)
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.order.iter()
    }

    pub fn globals(&self) -> &Globals {
        &self.bodies
    }
}

/// `Γ ⊢`: every type kinds in the shape of the preceding bindings, names
/// are distinct and ω only annotates parameter types.
pub fn wf_context(g: &Context) -> Result<(), TypeError> {
    let env = Env::new();
    Checker::new(&env).wf_context(g)
}

/// `Φ ⊢ A : *`.
pub fn kind_check(phi: &Context, a: &Type) -> Result<(), TypeError> {
    let env = Env::new();
    Checker::new(&env).kind_check(phi, a)
}

/// Infers the type of a fully annotated term together with its usage.
pub fn type_infer(g: &Context, m: &Term) -> Result<(Type, UsageReport), TypeError> {
    let env = Env::new();
    Checker::new(&env).type_infer(g, m)
}

pub fn type_check(g: &Context, m: &Term, a: &Type) -> Result<UsageReport, TypeError> {
    let env = Env::new();
    Checker::new(&env).type_check(g, m, a)
}

/// Type conversion: equality after normalizing the embedded terms.
pub fn type_eq(phi: &Context, a: &Type, b: &Type) -> bool {
    let env = Env::new();
    Checker::new(&env).type_eq(phi, a, b)
}

/// Inserts `lift` and `force` into a surface term.
pub fn elaborate(g: &Context, m: &Term, expected: Option<&Type>) -> Result<Term, TypeError> {
    let env = Env::new();
    Checker::elaborating(&env).elaborate(g, m, expected)
}
