use std::fmt;

use thiserror::Error;

use super::ast::{name, Name, Type};
use super::classify::is_parameter_type;
use super::index::{idx_add, idx_mul, Index};
use super::subst::alpha_eq_type;
use crate::circuit::Label;

/// What a context entry binds: a term variable or a wire label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Binder {
    Var(Name),
    Label(Label),
}

impl fmt::Display for Binder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binder::Var(x) => f.write_str(x),
            Binder::Label(l) => write!(f, "ℓ{}", l.id),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Binding {
    pub binder: Binder,
    pub index: Index,
    pub ty: Type,
}

/// An ordered sequence of bindings `x :k A`.
#[derive(Clone, Debug, Default)]
pub struct Context {
    pub bindings: Vec<Binding>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("contexts bind different names or types")]
    MismatchedContexts,
    #[error("`{0}` would receive index ω but its type is not a parameter type")]
    LinearityViolation(String),
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn with_var(mut self, x: &str, index: Index, ty: Type) -> Context {
        self.push(Binder::Var(name(x)), index, ty);
        self
    }

    pub fn with_label(mut self, l: Label, index: Index) -> Context {
        self.push(Binder::Label(l), index, l.sort.to_type());
        self
    }

    pub fn push(&mut self, binder: Binder, index: Index, ty: Type) {
        self.bindings.push(Binding { binder, index, ty });
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Binding> {
        self.bindings.iter()
    }

    pub fn lookup(&self, binder: &Binder) -> Option<&Binding> {
        self.bindings.iter().rev().find(|b| &b.binder == binder)
    }

    pub fn lookup_var(&self, x: &str) -> Option<&Binding> {
        self.bindings
            .iter()
            .rev()
            .find(|b| matches!(&b.binder, Binder::Var(v) if &**v == x))
    }

    pub fn var_names(&self) -> impl Iterator<Item = &Name> {
        self.bindings.iter().filter_map(|b| match &b.binder {
            Binder::Var(x) => Some(x),
            Binder::Label(_) => None,
        })
    }

    /// Every binding of a non-parameter type has index 0.
    pub fn is_parameter_context(&self) -> bool {
        self.bindings
            .iter()
            .all(|b| b.index.is_zero() || is_parameter_type(&b.ty))
    }

    /// Same bindings with every index multiplied by 0.
    pub fn zeroed(&self) -> Context {
        ctx_scale(Index::Zero, self).expect("scaling by zero never produces ω")
    }
}

fn check_omega(b: &Binding) -> Result<(), ContextError> {
    if b.index == Index::Omega && !is_parameter_type(&b.ty) {
        return Err(ContextError::LinearityViolation(b.binder.to_string()));
    }
    Ok(())
}

/// Pointwise sum of two contexts over the same names and types.
pub fn ctx_add(g1: &Context, g2: &Context) -> Result<Context, ContextError> {
    if g1.len() != g2.len() {
        return Err(ContextError::MismatchedContexts);
    }
    let mut out = Context::new();
    for (a, b) in g1.iter().zip(g2.iter()) {
        if a.binder != b.binder || !alpha_eq_type(&a.ty, &b.ty) {
            return Err(ContextError::MismatchedContexts);
        }
        let binding = Binding {
            binder: a.binder.clone(),
            index: idx_add(a.index, b.index),
            ty: a.ty.clone(),
        };
        check_omega(&binding)?;
        out.bindings.push(binding);
    }
    Ok(out)
}

/// Pointwise scaling `kΓ`.
pub fn ctx_scale(k: Index, g: &Context) -> Result<Context, ContextError> {
    let mut out = Context::new();
    for b in g.iter() {
        let binding = Binding {
            binder: b.binder.clone(),
            index: idx_mul(k, b.index),
            ty: b.ty.clone(),
        };
        check_omega(&binding)?;
        out.bindings.push(binding);
    }
    Ok(out)
}
