use std::rc::Rc;

use crate::circuit::{interface_labels, BoxedCircuit, Circuit, Gate, GateKind, Label};
use crate::syntax::{
    name, Branch, Constant, Declaration, Name, Pos, Span, Term, TermKind, Type, ANON,
};

use super::lexer::{lex, Tok, Token};
use super::ParseError;

/// Largest numeral literal accepted; numerals unfold into unary terms.
const MAX_NUMERAL: u64 = 100_000;

const KEYWORDS: &[&str] = &[
    "let", "in", "case", "of", "box", "apply", "apply'", "lift", "force", "force'", "unit",
];

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    allow_internal: bool,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    pub fn new(src: &str, allow_internal: bool) -> PResult<Parser> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            allow_internal,
        })
    }

    fn from_tokens(toks: Vec<Token>, allow_internal: bool) -> Parser {
        Parser {
            toks,
            pos: 0,
            allow_internal,
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_end(&self) -> Pos {
        if self.pos == 0 {
            self.toks[0].span.start
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn from(&self, start: Span) -> Span {
        Span::new(start.start, self.prev_end())
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, what: &str) -> PResult<T> {
        Err(ParseError {
            span: self.span(),
            message: format!("expected {what}, found {}", self.peek().describe()),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<Span> {
        if self.peek() == &t {
            Ok(self.advance().span)
        } else {
            self.error(&t.describe())
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.is_kw(kw) {
            self.advance();
            Ok(())
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    fn internal(&self, what: &str) -> PResult<()> {
        if self.allow_internal {
            Ok(())
        } else {
            Err(ParseError {
                span: self.span(),
                message: format!("{what} is internal syntax and cannot appear in source programs"),
            })
        }
    }

    fn binder(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(s)
                if !KEYWORDS.contains(&s.as_str()) && Constant::from_name(&s).is_none() =>
            {
                self.advance();
                Ok(name(&s))
            }
            _ => self.error("a variable name"),
        }
    }

    pub fn at_eof(&self) -> bool {
        self.peek() == &Tok::Eof
    }

    pub fn expect_eof(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    // ---- types ----

    pub fn ty(&mut self) -> PResult<Type> {
        if let Some((x, dom)) = self.try_binder_group()? {
            return match self.peek() {
                Tok::Lolli => {
                    self.advance();
                    Ok(Type::Pi(x, Rc::new(dom), Rc::new(self.ty()?)))
                }
                Tok::Arrow => {
                    self.advance();
                    Ok(Type::Arrow(x, Rc::new(dom), Rc::new(self.ty()?)))
                }
                Tok::Star => {
                    self.advance();
                    let right = self.tensor_ty()?;
                    let t = Type::Tensor(x, Rc::new(dom), Rc::new(right));
                    self.ty_tail(t)
                }
                _ => self.error("`-o`, `->` or `*` after a binder"),
            };
        }
        let left = self.tensor_ty()?;
        self.ty_tail(left)
    }

    fn ty_tail(&mut self, left: Type) -> PResult<Type> {
        match self.peek() {
            Tok::Lolli => {
                self.advance();
                Ok(Type::Pi(name(ANON), Rc::new(left), Rc::new(self.ty()?)))
            }
            Tok::Arrow => {
                self.advance();
                Ok(Type::Arrow(name(ANON), Rc::new(left), Rc::new(self.ty()?)))
            }
            _ => Ok(left),
        }
    }

    /// `(x : A)` at the start of a dependent type.
    fn try_binder_group(&mut self) -> PResult<Option<(Name, Type)>> {
        if self.peek() == &Tok::LParen
            && matches!(self.peek_at(1), Tok::Ident(_))
            && self.peek_at(2) == &Tok::Colon
        {
            self.advance();
            let x = self.binder()?;
            self.expect(Tok::Colon)?;
            let dom = self.ty()?;
            self.expect(Tok::RParen)?;
            Ok(Some((x, dom)))
        } else {
            Ok(None)
        }
    }

    fn tensor_ty(&mut self) -> PResult<Type> {
        if let Some((x, dom)) = self.try_binder_group()? {
            self.expect(Tok::Star)?;
            let right = self.tensor_ty()?;
            return Ok(Type::Tensor(x, Rc::new(dom), Rc::new(right)));
        }
        let left = self.app_ty()?;
        if self.eat(&Tok::Star) {
            let right = self.tensor_ty()?;
            return Ok(Type::Tensor(name(ANON), Rc::new(left), Rc::new(right)));
        }
        Ok(left)
    }

    fn app_ty(&mut self) -> PResult<Type> {
        if self.is_kw("List") {
            self.advance();
            return Ok(Type::list(self.atom_ty()?));
        }
        if self.is_kw("Vec") {
            self.advance();
            let elem = self.atom_ty()?;
            let len = self.atom()?;
            return Ok(Type::vec(elem, len));
        }
        self.atom_ty()
    }

    fn atom_ty(&mut self) -> PResult<Type> {
        match self.peek().clone() {
            Tok::Bang => {
                self.advance();
                Ok(Type::bang(self.atom_ty()?))
            }
            Tok::LParen => {
                self.advance();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(s) => {
                let t = match s.as_str() {
                    "Qubit" => Type::Qubit,
                    "Bit" => Type::Bit,
                    "Unit" => Type::Unit,
                    "Nat" => Type::Nat,
                    "Circ" => {
                        self.advance();
                        self.expect(Tok::LParen)?;
                        let a = self.ty()?;
                        self.expect(Tok::Comma)?;
                        let b = self.ty()?;
                        self.expect(Tok::RParen)?;
                        return Ok(Type::circ(a, b));
                    }
                    "List" | "Vec" => return self.error("a parenthesized type"),
                    _ => return self.error("a type"),
                };
                self.advance();
                Ok(t)
            }
            _ => self.error("a type"),
        }
    }

    // ---- terms ----

    pub fn term(&mut self) -> PResult<Term> {
        match self.peek() {
            Tok::Backslash | Tok::BackslashPrime => self.lambda(),
            Tok::Ident(s) if s == "let" => self.let_pair(),
            Tok::Ident(s) if s == "case" => self.case(),
            _ => self.at_term(),
        }
    }

    fn lambda(&mut self) -> PResult<Term> {
        let start = self.span();
        let prime = self.peek() == &Tok::BackslashPrime;
        if prime {
            self.internal("`\\'`")?;
        }
        self.advance();
        let mut xs = vec![self.binder()?];
        while matches!(self.peek(), Tok::Ident(_)) {
            xs.push(self.binder()?);
        }
        self.expect(Tok::Arrow)?;
        let mut body = self.term()?;
        let span = self.from(start);
        for x in xs.into_iter().rev() {
            let kind = if prime {
                TermKind::LamPrime(x, body)
            } else {
                TermKind::Lam(x, body)
            };
            body = Term::new(kind, span);
        }
        Ok(body)
    }

    fn let_pair(&mut self) -> PResult<Term> {
        let start = self.span();
        self.expect_kw("let")?;
        self.expect(Tok::LParen)?;
        let x = self.binder()?;
        self.expect(Tok::Comma)?;
        let y = self.binder()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::Eq)?;
        let n = self.term()?;
        self.expect_kw("in")?;
        let m = self.term()?;
        Ok(Term::new(TermKind::LetPair(x, y, n, m), self.from(start)))
    }

    fn case(&mut self) -> PResult<Term> {
        let start = self.span();
        self.expect_kw("case")?;
        let scrutinee = self.term()?;
        self.expect_kw("of")?;
        self.expect(Tok::LBrace)?;
        let mut branches = Vec::new();
        loop {
            if self.peek() == &Tok::RBrace {
                break;
            }
            branches.push(self.branch()?);
            if !self.eat(&Tok::Semi) {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        if branches.is_empty() {
            return Err(ParseError {
                span: self.from(start),
                message: "case expression needs at least one branch".to_string(),
            });
        }
        Ok(Term::new(
            TermKind::Case(scrutinee, branches),
            self.from(start),
        ))
    }

    fn branch(&mut self) -> PResult<Branch> {
        let con = match self.peek() {
            Tok::Ident(s) => match Constant::from_name(s) {
                Some(c) if c.is_constructor() => c,
                _ => return self.error("a constructor pattern"),
            },
            _ => return self.error("a constructor pattern"),
        };
        self.advance();
        let mut binders = Vec::new();
        while matches!(self.peek(), Tok::Ident(_)) {
            binders.push(self.binder()?);
        }
        self.expect(Tok::Arrow)?;
        let body = self.term()?;
        Ok(Branch { con, binders, body })
    }

    /// Left-associative `@` chains; internal only.
    fn at_term(&mut self) -> PResult<Term> {
        let start = self.span();
        let mut t = self.app()?;
        while self.peek() == &Tok::At {
            self.internal("`@`")?;
            self.advance();
            let r = self.app()?;
            t = Term::new(TermKind::AppPrime(t, r), self.from(start));
        }
        Ok(t)
    }

    fn starts_arg(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !matches!(s.as_str(), "in" | "of"),
            Tok::Num(_)
            | Tok::Label(_)
            | Tok::LParen
            | Tok::LBrack
            | Tok::HashCirc
            | Tok::Backslash
            | Tok::BackslashPrime => true,
            _ => false,
        }
    }

    /// An argument: an atom, or a trailing lambda, `let` or `case`.
    fn arg(&mut self) -> PResult<Term> {
        match self.peek() {
            Tok::Backslash | Tok::BackslashPrime => self.lambda(),
            Tok::Ident(s) if s == "let" => self.let_pair(),
            Tok::Ident(s) if s == "case" => self.case(),
            _ => self.atom(),
        }
    }

    fn trailing(&self) -> bool {
        matches!(self.peek(), Tok::Backslash | Tok::BackslashPrime)
            || self.is_kw("let")
            || self.is_kw("case")
    }

    fn app(&mut self) -> PResult<Term> {
        let start = self.span();
        if let Tok::Ident(s) = self.peek().clone() {
            if let Some(c) = Constant::from_name(&s) {
                self.advance();
                let mut args = Vec::new();
                while self.starts_arg() {
                    let trailing = self.trailing();
                    args.push(self.arg()?);
                    if trailing {
                        break;
                    }
                }
                return Ok(Term::new(TermKind::Const(c, args), self.from(start)));
            }
        }
        let mut head = self.head()?;
        while self.starts_arg() {
            let trailing = self.trailing();
            let a = self.arg()?;
            head = Term::new(TermKind::App(head, a), self.from(start));
            if trailing {
                break;
            }
        }
        Ok(head)
    }

    /// Application heads, including the prefix forms that take one argument.
    fn head(&mut self) -> PResult<Term> {
        let start = self.span();
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return self.atom(),
        };
        let kind = match kw.as_str() {
            "lift" => {
                self.advance();
                TermKind::Lift(self.arg()?)
            }
            "force" => {
                self.advance();
                TermKind::Force(self.arg()?)
            }
            "force'" => {
                self.internal("`force'`")?;
                self.advance();
                TermKind::ForcePrime(self.arg()?)
            }
            "box" => {
                self.advance();
                self.expect(Tok::LBrack)?;
                let s = self.ty()?;
                self.expect(Tok::RBrack)?;
                TermKind::Box(s, self.arg()?)
            }
            _ => return self.atom(),
        };
        Ok(Term::new(kind, self.from(start)))
    }

    pub fn atom(&mut self) -> PResult<Term> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Num(n) => {
                self.advance();
                if n > MAX_NUMERAL {
                    return Err(ParseError {
                        span: start,
                        message: format!("numeral {n} exceeds the limit of {MAX_NUMERAL}"),
                    });
                }
                Ok(spanned_nat(n as usize, start))
            }
            Tok::Label(l) => {
                self.internal("a wire label")?;
                self.advance();
                Ok(Term::new(TermKind::Label(l), start))
            }
            Tok::HashCirc => {
                self.internal("a boxed circuit")?;
                self.advance();
                self.boxed_circuit(start)
            }
            Tok::LParen => {
                self.advance();
                let mut items = vec![self.term()?];
                while self.eat(&Tok::Comma) {
                    items.push(self.term()?);
                }
                self.expect(Tok::RParen)?;
                let span = self.from(start);
                let mut t = items.pop().expect("at least one item");
                while let Some(h) = items.pop() {
                    let s = h.span.to(t.span);
                    t = Term::new(TermKind::Pair(h, t), s);
                }
                Ok(t.at(span))
            }
            Tok::LBrack => {
                self.advance();
                let mut items = Vec::new();
                if self.peek() != &Tok::RBrack {
                    items.push(self.term()?);
                    while self.eat(&Tok::Comma) {
                        items.push(self.term()?);
                    }
                }
                self.expect(Tok::RBrack)?;
                let span = self.from(start);
                let mut t = Term::new(TermKind::Const(Constant::Nil, vec![]), span);
                for h in items.into_iter().rev() {
                    t = Term::new(TermKind::Const(Constant::Cons, vec![h, t]), span);
                }
                Ok(t)
            }
            Tok::Ident(s) => match s.as_str() {
                "unit" => {
                    self.advance();
                    Ok(Term::new(TermKind::Unit, start))
                }
                "apply" | "apply'" => {
                    let prime = s == "apply'";
                    if prime {
                        self.internal("`apply'`")?;
                    }
                    self.advance();
                    self.expect(Tok::LParen)?;
                    let m = self.term()?;
                    self.expect(Tok::Comma)?;
                    let n = self.term()?;
                    self.expect(Tok::RParen)?;
                    let kind = if prime {
                        TermKind::ApplyPrime(m, n)
                    } else {
                        TermKind::Apply(m, n)
                    };
                    Ok(Term::new(kind, self.from(start)))
                }
                "lift" | "force" | "force'" | "box" => {
                    let t = self.head()?;
                    Ok(t)
                }
                _ if KEYWORDS.contains(&s.as_str()) => self.error("a term"),
                _ => {
                    self.advance();
                    match Constant::from_name(&s) {
                        Some(c) => Ok(Term::new(TermKind::Const(c, vec![]), start)),
                        None => Ok(Term::new(TermKind::Var(name(&s)), start)),
                    }
                }
            },
            _ => self.error("a term"),
        }
    }

    /// `#circ(a ; [G ins -> outs ; ...] ; b)`
    fn boxed_circuit(&mut self, start: Span) -> PResult<Term> {
        self.expect(Tok::LParen)?;
        let input = self.term()?;
        self.expect(Tok::Semi)?;
        self.expect(Tok::LBrack)?;
        let mut gates = Vec::new();
        if self.peek() != &Tok::RBrack {
            gates.push(self.gate()?);
            while self.eat(&Tok::Semi) {
                gates.push(self.gate()?);
            }
        }
        self.expect(Tok::RBrack)?;
        self.expect(Tok::Semi)?;
        let output = self.term()?;
        self.expect(Tok::RParen)?;
        let span = self.from(start);
        let bad = |what: &str| ParseError {
            span,
            message: format!("{what} interface of a boxed circuit must be a simple term"),
        };
        let inputs = interface_labels(&input).ok_or_else(|| bad("input"))?;
        let outputs = interface_labels(&output).ok_or_else(|| bad("output"))?;
        let b = BoxedCircuit {
            input,
            circuit: Circuit {
                inputs,
                outputs,
                gates,
            },
            output,
        };
        Ok(Term::new(TermKind::Boxed(Rc::new(b)), span))
    }

    fn gate(&mut self) -> PResult<Gate> {
        let kind = match self.peek() {
            Tok::Ident(s) => match GateKind::from_name(s) {
                Some(g) => g,
                None => return self.error("a gate name"),
            },
            _ => return self.error("a gate name"),
        };
        self.advance();
        let inputs = self.labels()?;
        self.expect(Tok::Arrow)?;
        let outputs = self.labels()?;
        Ok(Gate {
            kind,
            inputs,
            outputs,
        })
    }

    fn labels(&mut self) -> PResult<Vec<Label>> {
        let mut out = Vec::new();
        if let Tok::Label(l) = self.peek().clone() {
            self.advance();
            out.push(l);
            while self.eat(&Tok::Comma) {
                match self.peek().clone() {
                    Tok::Label(l) => {
                        self.advance();
                        out.push(l);
                    }
                    _ => return self.error("a wire label"),
                }
            }
        }
        Ok(out)
    }

    // ---- declarations ----

    fn program(self) -> PResult<Vec<Declaration>> {
        let allow = self.allow_internal;
        let eof = self.toks.last().expect("eof").clone();
        let mut groups: Vec<Vec<Token>> = Vec::new();
        for t in self.toks {
            if t.tok == Tok::Eof {
                break;
            }
            if t.span.start.col == 1 || groups.is_empty() {
                groups.push(Vec::new());
            }
            groups.last_mut().expect("group").push(t);
        }
        let mut decls: Vec<Declaration> = Vec::new();
        let mut pending: Option<(Name, Type, Span, Span)> = None;
        let ends: Vec<Span> = groups
            .iter()
            .skip(1)
            .map(|g| Span::new(g[0].span.start, g[0].span.start))
            .chain(std::iter::once(eof.span))
            .collect();
        for (mut g, end) in groups.into_iter().zip(ends) {
            g.push(Token {
                tok: Tok::Eof,
                span: end,
            });
            let mut p = Parser::from_tokens(g, allow);
            let start = p.span();
            let x = p.binder()?;
            match p.peek() {
                Tok::Colon => {
                    if let Some((y, _, _, span)) = &pending {
                        return Err(ParseError {
                            span: *span,
                            message: format!("type signature for `{y}` has no definition"),
                        });
                    }
                    p.advance();
                    let ty_start = p.span();
                    let ty = p.ty()?;
                    p.expect_eof()?;
                    pending = Some((x, ty, p.from(ty_start), p.from(start)));
                }
                Tok::Eq => {
                    p.advance();
                    let body = p.term()?;
                    p.expect_eof()?;
                    let span = p.from(start);
                    let (ty, ty_span, sig_span) = match pending.take() {
                        Some((y, ty, t, s)) if y == x => (Some(ty), t, s),
                        Some((y, _, _, s)) => {
                            return Err(ParseError {
                                span: s,
                                message: format!(
                                    "type signature for `{y}` is followed by a definition of `{x}`"
                                ),
                            })
                        }
                        None => (None, span, span),
                    };
                    decls.push(Declaration {
                        name: x,
                        ty,
                        body,
                        span: sig_span.to(span),
                        ty_span,
                    });
                }
                _ => return p.error("`:` or `=`"),
            }
        }
        if let Some((y, _, _, span)) = pending {
            return Err(ParseError {
                span,
                message: format!("type signature for `{y}` has no definition"),
            });
        }
        Ok(decls)
    }
}

fn spanned_nat(n: usize, span: Span) -> Term {
    let mut t = Term::new(TermKind::Const(Constant::Zero, vec![]), span);
    for _ in 0..n {
        t = Term::new(TermKind::Const(Constant::Succ, vec![t]), span);
    }
    t
}

/// Parses a surface program: a sequence of declarations, each starting
/// in column 1.
pub fn parse_program(src: &str) -> Result<Vec<Declaration>, ParseError> {
    Parser::new(src, false)?.program()
}

/// Like [`parse_program`] but also accepts internal term formers.
pub fn parse_program_internal(src: &str) -> Result<Vec<Declaration>, ParseError> {
    Parser::new(src, true)?.program()
}

/// Parses a single term. Internal syntax is accepted when `allow_internal`.
pub fn parse_term(src: &str, allow_internal: bool) -> Result<Term, ParseError> {
    let mut p = Parser::new(src, allow_internal)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_type(src: &str, allow_internal: bool) -> Result<Type, ParseError> {
    let mut p = Parser::new(src, allow_internal)?;
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_eq, alpha_eq_type};

    #[test]
    fn conv_program() {
        let src = "conv : !((x : List Qubit) -o Vec Qubit (toNat x))\n\
                   conv = lift (\\x -> case x of\n  { Nil -> VNil\n  ; Cons y ys -> VCons y (force conv ys) })\n";
        let ds = parse_program(src).unwrap();
        assert_eq!(ds.len(), 1);
        let expect_ty = Type::bang(Type::pi(
            "x",
            Type::list(Type::Qubit),
            Type::vec(Type::Qubit, Term::to_nat(Term::var("x"))),
        ));
        assert!(alpha_eq_type(ds[0].ty.as_ref().unwrap(), &expect_ty));
        match &*ds[0].body.kind {
            TermKind::Lift(l) => match &*l.kind {
                TermKind::Lam(_, b) => match &*b.kind {
                    TermKind::Case(_, bs) => assert_eq!(bs.len(), 2),
                    other => panic!("{other:?}"),
                },
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn numerals_desugar() {
        let ds = parse_program("f : !Nat\nf = lift 3").unwrap();
        assert!(alpha_eq(&ds[0].body, &Term::lift(Term::nat(3))));
    }

    #[test]
    fn dangling_lambda_is_an_error() {
        let e = parse_program("f = \\x ->").unwrap_err();
        assert!(e.message.contains("end of input"), "{}", e.message);
        assert_eq!((e.span.start.line, e.span.start.col), (1, 10));
    }

    #[test]
    fn application_and_force() {
        let t = parse_term("force conv ys", false).unwrap();
        let expect = Term::app(Term::force(Term::var("conv")), Term::var("ys"));
        assert!(alpha_eq(&t, &expect));
        let t = parse_term("f x (g y)", false).unwrap();
        let expect = Term::app(
            Term::app(Term::var("f"), Term::var("x")),
            Term::app(Term::var("g"), Term::var("y")),
        );
        assert!(alpha_eq(&t, &expect));
    }

    #[test]
    fn tuples_lists_and_trailing_lambda() {
        let t = parse_term("(a, b, c)", false).unwrap();
        let expect = Term::pair(Term::var("a"), Term::pair(Term::var("b"), Term::var("c")));
        assert!(alpha_eq(&t, &expect));
        let t = parse_term("[unit, unit]", false).unwrap();
        assert!(alpha_eq(&t, &Term::list(vec![Term::unit(), Term::unit()])));
        let t = parse_term("box[Qubit] \\q -> apply(H, q)", false).unwrap();
        let expect = Term::boxt(
            Type::Qubit,
            Term::lam("q", Term::apply(Term::gate(GateKind::H), Term::var("q"))),
        );
        assert!(alpha_eq(&t, &expect));
    }

    #[test]
    fn type_precedence() {
        let t = parse_type("Qubit * Qubit -o Qubit -o Bit", false).unwrap();
        let expect = Type::lolli(
            Type::pair(Type::Qubit, Type::Qubit),
            Type::lolli(Type::Qubit, Type::Bit),
        );
        assert!(alpha_eq_type(&t, &expect));
        let t = parse_type("!Nat -> Nat", false).unwrap();
        let expect = Type::arrow(ANON, Type::bang(Type::Nat), Type::Nat);
        assert!(alpha_eq_type(&t, &expect));
        let t = parse_type("(n : Nat) * Vec Qubit n", false).unwrap();
        let expect = Type::tensor("n", Type::Nat, Type::vec(Type::Qubit, Term::var("n")));
        assert!(alpha_eq_type(&t, &expect));
    }

    #[test]
    fn internal_forms_are_gated() {
        assert!(parse_term("force' x", false).is_err());
        assert!(parse_term("\\' x -> x", false).is_err());
        assert!(parse_term("f @ x", false).is_err());
        assert!(parse_term("ℓ0", false).is_err());
        let t = parse_term("force' f @ x @ y", true).unwrap();
        let expect = Term::app_prime(
            Term::app_prime(Term::force_prime(Term::var("f")), Term::var("x")),
            Term::var("y"),
        );
        assert!(alpha_eq(&t, &expect));
        let t = parse_term("#circ(ℓ0 ; [H ℓ0 -> ℓ1] ; ℓ1)", true).unwrap();
        match &*t.kind {
            TermKind::Boxed(b) => {
                assert_eq!(b.circuit.gates.len(), 1);
                b.validate().unwrap();
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn declarations_split_on_column_one() {
        let src = "-- header\nid : !(Qubit -o Qubit)\nid = \\q ->\n  q\n\nmain = box[Qubit] id\r\n";
        let ds = parse_program(src).unwrap();
        assert_eq!(ds.len(), 2);
        assert!(ds[1].ty.is_none());
        assert_eq!(ds[1].span.start.line, 6);
    }

    #[test]
    fn signature_without_definition() {
        assert!(parse_program("f : Nat\ng = 1").is_err());
        assert!(parse_program("f : Nat").is_err());
    }

    #[test]
    fn constants_take_their_spine() {
        let t = parse_term("VCons y (f ys)", false).unwrap();
        let expect = Term::vcons(Term::var("y"), Term::app(Term::var("f"), Term::var("ys")));
        assert!(alpha_eq(&t, &expect));
        let t = parse_term("f Zero", false).unwrap();
        assert!(alpha_eq(&t, &Term::app(Term::var("f"), Term::zero())));
    }
}
