use super::{Checker, Env, TypeError, TypeErrorKind as K};
use crate::eval::Globals;
use crate::front::pretty_type;
use crate::syntax::{is_parameter_type, Context, Declaration, Name, Span, Term, Type};

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    /// Insert `lift` and `force`; off means the source is fully annotated.
    pub elaborate: bool,
}

impl Default for CheckOptions {
    fn default() -> CheckOptions {
        CheckOptions { elaborate: true }
    }
}

#[derive(Clone, Debug)]
pub struct CheckedDecl {
    pub name: Name,
    pub ty: Type,
    pub body: Term,
    pub span: Span,
}

/// A checked program. Bodies are elaborated and each passes the checker
/// with insertion disabled.
#[derive(Clone, Debug)]
pub struct Program {
    pub decls: Vec<CheckedDecl>,
    pub env: Env,
}

impl Program {
    pub fn globals(&self) -> &Globals {
        self.env.globals()
    }

    pub fn get(&self, name: &str) -> Option<&CheckedDecl> {
        self.decls.iter().find(|d| &*d.name == name)
    }
}

/// Checks declarations in order. A declaration sees itself and everything
/// before it; its type must be a parameter type.
pub fn check_program(decls: &[Declaration], opts: CheckOptions) -> Result<Program, TypeError> {
    let mut env = Env::new();
    let mut out = Vec::new();
    let empty = Context::new();
    for d in decls {
        if env.contains(&d.name) {
            return Err(TypeError::new(
                K::TypeMismatch,
                d.span,
                format!("`{}` is declared more than once", d.name),
            ));
        }
        let (ty, body) = match &d.ty {
            Some(t) => {
                let at = if d.ty_span.is_dummy() {
                    d.span
                } else {
                    d.ty_span
                };
                let ty = checker(&env, opts).elaborate_type(&empty, t, at)?;
                if !is_parameter_type(&ty) {
                    return Err(TypeError::new(
                        K::LinearityViolation,
                        at,
                        format!(
                            "top-level `{}` has type {}, which is not a parameter type; wrap it in `!`",
                            d.name,
                            pretty_type(&ty)
                        ),
                    ));
                }
                env.declare(d.name.clone(), ty.clone());
                let (body, _) = checker(&env, opts).check_term(&empty, &d.body, &ty)?;
                (ty, body)
            }
            None => {
                let (body, ty, _) = checker(&env, opts).infer_term(&empty, &d.body)?;
                if !is_parameter_type(&ty) {
                    return Err(TypeError::new(
                        K::LinearityViolation,
                        d.span,
                        format!(
                            "top-level `{}` has type {}, which is not a parameter type",
                            d.name,
                            pretty_type(&ty)
                        ),
                    ));
                }
                env.declare(d.name.clone(), ty.clone());
                (ty, body)
            }
        };
        if opts.elaborate {
            Checker::new(&env)
                .check_term(&empty, &body, &ty)
                .map_err(|e| {
                    TypeError::new(
                        e.kind,
                        e.span,
                        format!("elaborated `{}` does not re-check: {}", d.name, e.message),
                    )
                })?;
        }
        env.define(d.name.clone(), body.clone());
        out.push(CheckedDecl {
            name: d.name.clone(),
            ty,
            body,
            span: d.span,
        });
    }
    Ok(Program { decls: out, env })
}

fn checker(env: &Env, opts: CheckOptions) -> Checker<'_> {
    if opts.elaborate {
        Checker::elaborating(env)
    } else {
        Checker::new(env)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front::{parse_program, parse_program_internal};

    fn run(src: &str) -> Result<Program, TypeError> {
        check_program(&parse_program(src).unwrap(), CheckOptions::default())
    }

    #[test]
    fn empty_program() {
        assert!(run("").unwrap().decls.is_empty());
    }

    #[test]
    fn top_level_types_are_parameter_types() {
        let e = run("f : Qubit -o Qubit\nf = \\q -> q\n").unwrap_err();
        assert_eq!(e.kind, K::LinearityViolation);
        assert_eq!((e.span.start.line, e.span.start.col), (1, 5));
    }

    #[test]
    fn duplicate_declarations() {
        let e = run("a : Nat\na = 1\na : Nat\na = 2\n").unwrap_err();
        assert_eq!(e.kind, K::TypeMismatch);
    }

    #[test]
    fn later_declarations_see_earlier_ones() {
        let p = run("one : Nat\none = 1\ntwo : Nat\ntwo = Succ one\n").unwrap();
        assert_eq!(p.decls.len(), 2);
        assert!(run("two : Nat\ntwo = Succ one\none : Nat\none = 1\n").is_err());
    }

    #[test]
    fn unannotated_declarations_are_inferred() {
        let p = run("three = 3\n").unwrap();
        assert!(matches!(p.decls[0].ty, Type::Nat));
    }

    #[test]
    fn fully_annotated_input_without_elaboration() {
        let src = "id : !(Qubit -o Qubit)\nid = lift (\\q -> q)\n\
                   main : Circ(Qubit, Qubit)\nmain = box[Qubit] (lift (\\q -> (force id) q))\n";
        let decls = parse_program_internal(src).unwrap();
        assert!(check_program(&decls, CheckOptions { elaborate: false }).is_ok());
        let implicit = "id : !(Qubit -o Qubit)\nid = \\q -> q\n";
        let decls = parse_program_internal(implicit).unwrap();
        assert!(check_program(&decls, CheckOptions { elaborate: false }).is_err());
    }
}
