//! Abstract syntax shared by every phase: types, terms, usage indices,
//! contexts, substitution and the syntactic classes of the calculus.

mod ast;
mod classify;
mod context;
mod index;
mod subst;

pub use ast::{name, Branch, Constant, Declaration, Name, Pos, Span, Term, TermKind, Type, ANON};
pub use classify::{is_parameter_term, is_parameter_type, is_simple_type, is_value};
pub use context::{ctx_add, ctx_scale, Binder, Binding, Context, ContextError};
pub use index::{idx_add, idx_mul, Index};
pub use subst::{
    alpha_eq, alpha_eq_type, free_names, free_names_type, free_vars, free_vars_type, fresh_name,
    occurs_free, occurs_free_type, rename, rename_type, subst, subst_type, FreeNames,
};
