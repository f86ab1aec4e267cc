//! Lexer and recursive-descent parser for the formula/term grammar.
//!
//! ```text
//! formula := imp
//! imp     := disj ("->" imp)?                    right-associative
//! disj    := conj ("|" conj)*
//! conj    := neg ("&" neg)*
//! neg     := "!" neg | quant
//! quant   := ("forall" | "exists") IDENT (":" IDENT)? "." imp
//!          | atom
//! atom    := "T" | "F" | "(" formula ")" | term "=" term
//! term    := IDENT ("(" term ("," term)* ")")?
//! ```
//!
//! `!p` is sugar for `p -> F`. A quantifier's body extends as far right as
//! possible. The binder sort annotation may be omitted only when the signature
//! has exactly one sort. An identifier that names an arity-0 function symbol
//! is a constant; otherwise it must be a context or binder variable.

use std::fmt;

use super::{Context, Formula, Signature, SyntaxError, Term, Var};

/// Which kind of syntax to parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntaxKind {
    Term,
    Formula,
}

/// Result of [`parse`]: either kind of syntax tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parsed {
    Term(Term),
    Formula(Formula),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Forall,
    Exists,
    Top,
    Bot,
    LPar,
    RPar,
    Comma,
    Dot,
    Colon,
    Equals,
    Amp,
    Pipe,
    Arrow,
    Bang,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Forall => write!(f, "`forall`"),
            Tok::Exists => write!(f, "`exists`"),
            Tok::Top => write!(f, "`T`"),
            Tok::Bot => write!(f, "`F`"),
            Tok::LPar => write!(f, "`(`"),
            Tok::RPar => write!(f, "`)`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Equals => write!(f, "`=`"),
            Tok::Amp => write!(f, "`&`"),
            Tok::Pipe => write!(f, "`|`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Bang => write!(f, "`!`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                toks.push((Tok::LPar, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RPar, i));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            '.' => {
                toks.push((Tok::Dot, i));
                i += 1;
            }
            ':' => {
                toks.push((Tok::Colon, i));
                i += 1;
            }
            '=' => {
                toks.push((Tok::Equals, i));
                i += 1;
            }
            '&' => {
                toks.push((Tok::Amp, i));
                i += 1;
            }
            '|' => {
                toks.push((Tok::Pipe, i));
                i += 1;
            }
            '!' => {
                toks.push((Tok::Bang, i));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::Arrow, i));
                    i += 2;
                } else {
                    return Err(SyntaxError::Lex {
                        pos: i,
                        msg: "expected `->`".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let word = &text[start..i];
                let tok = match word {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "T" => Tok::Top,
                    "F" => Tok::Bot,
                    _ => Tok::Ident(word.to_string()),
                };
                toks.push((tok, start));
            }
            other => {
                return Err(SyntaxError::Lex {
                    pos: i,
                    msg: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    toks.push((Tok::Eof, bytes.len()));
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    sig: &'a Signature,
    ctx: &'a Context,
    /// Binder variables in scope, innermost last; shadows the context.
    bound: Vec<Var>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(SyntaxError::Parse {
                pos: self.here(),
                expected: what.into(),
                found: self.peek().to_string(),
            })
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        self.imp()
    }

    fn imp(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.disj()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.imp()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disj(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.conj()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.conj()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.neg()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.neg()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn neg(&mut self) -> Result<Formula, SyntaxError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            let inner = self.neg()?;
            Ok(Formula::not(inner))
        } else {
            self.quant()
        }
    }

    fn quant(&mut self) -> Result<Formula, SyntaxError> {
        let is_forall = match self.peek() {
            Tok::Forall => true,
            Tok::Exists => false,
            _ => return self.atom(),
        };
        self.bump();
        let pos = self.here();
        let name = match self.bump() {
            Tok::Ident(s) => s,
            other => {
                return Err(SyntaxError::Parse {
                    pos,
                    expected: "binder variable".into(),
                    found: other.to_string(),
                });
            }
        };
        let sort = if *self.peek() == Tok::Colon {
            self.bump();
            let spos = self.here();
            match self.bump() {
                Tok::Ident(s) => {
                    if !self.sig.has_sort(&s) {
                        return Err(SyntaxError::UnknownSort(s));
                    }
                    s
                }
                other => {
                    return Err(SyntaxError::Parse {
                        pos: spos,
                        expected: "sort name".into(),
                        found: other.to_string(),
                    });
                }
            }
        } else {
            match self.sig.single_sort() {
                Some(s) => s.to_string(),
                None => return Err(SyntaxError::BinderNeedsSort(name)),
            }
        };
        self.expect(&Tok::Dot, "`.` after binder")?;
        let v = Var::new(name, sort);
        self.bound.push(v.clone());
        let body = self.imp();
        self.bound.pop();
        let body = body?;
        Ok(if is_forall {
            Formula::forall(v, body)
        } else {
            Formula::exists(v, body)
        })
    }

    fn atom(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Tok::Top => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Bot => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::LPar => {
                self.bump();
                let inner = self.formula()?;
                self.expect(&Tok::RPar, "`)`")?;
                Ok(inner)
            }
            _ => {
                let s = self.term()?;
                self.expect(&Tok::Equals, "`=` after term")?;
                let t = self.term()?;
                let s_sort = self.sig.term_sort(&s)?;
                let t_sort = self.sig.term_sort(&t)?;
                if s_sort != t_sort {
                    return Err(SyntaxError::SortMismatch {
                        place: " in equality".into(),
                        expected: s_sort,
                        got: t_sort,
                    });
                }
                Ok(Formula::Eq(s_sort, s, t))
            }
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let pos = self.here();
        let name = match self.bump() {
            Tok::Ident(s) => s,
            other => {
                return Err(SyntaxError::Parse {
                    pos,
                    expected: "term".into(),
                    found: other.to_string(),
                });
            }
        };
        if *self.peek() == Tok::LPar {
            self.bump();
            let mut args = Vec::new();
            if *self.peek() != Tok::RPar {
                loop {
                    args.push(self.term()?);
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect(&Tok::RPar, "`)`")?;
            let decl = self
                .sig
                .func(&name)
                .ok_or_else(|| SyntaxError::UnknownSymbol(name.clone()))?;
            if decl.arity.len() != args.len() {
                return Err(SyntaxError::ArityMismatch {
                    symbol: name,
                    expected: decl.arity.len(),
                    got: args.len(),
                });
            }
            for (i, (arg, want)) in args.iter().zip(&decl.arity).enumerate() {
                let got = self.sig.term_sort(arg)?;
                if got != *want {
                    return Err(SyntaxError::SortMismatch {
                        place: format!(" in argument {} of `{}`", i + 1, name),
                        expected: want.clone(),
                        got,
                    });
                }
            }
            return Ok(Term::app(name, args));
        }
        // Bare identifier: innermost binder, then context variable, then
        // arity-0 function symbol.
        if let Some(v) = self.bound.iter().rev().find(|v| v.name == name) {
            return Ok(Term::Var(v.clone()));
        }
        if let Some(v) = self.ctx.lookup(&name) {
            return Ok(Term::Var(v.clone()));
        }
        if let Some(decl) = self.sig.func(&name) {
            if decl.arity.is_empty() {
                return Ok(Term::app(name, vec![]));
            }
            return Err(SyntaxError::ArityMismatch {
                symbol: name,
                expected: decl.arity.len(),
                got: 0,
            });
        }
        Err(SyntaxError::UnboundVar(name))
    }
}

/// Parses a formula over the given signature and context.
pub fn parse_formula(
    text: &str,
    sig: &Signature,
    ctx: &Context,
) -> Result<Formula, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        sig,
        ctx,
        bound: Vec::new(),
    };
    let phi = p.formula()?;
    p.expect(&Tok::Eof, "end of input")?;
    Ok(phi)
}

/// Parses a term over the given signature and context.
pub fn parse_term(text: &str, sig: &Signature, ctx: &Context) -> Result<Term, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        sig,
        ctx,
        bound: Vec::new(),
    };
    let t = p.term()?;
    p.expect(&Tok::Eof, "end of input")?;
    Ok(t)
}

/// Parses either kind of syntax, selected by `kind`.
pub fn parse(
    text: &str,
    sig: &Signature,
    kind: SyntaxKind,
    ctx: &Context,
) -> Result<Parsed, SyntaxError> {
    match kind {
        SyntaxKind::Term => parse_term(text, sig, ctx).map(Parsed::Term),
        SyntaxKind::Formula => parse_formula(text, sig, ctx).map(Parsed::Formula),
    }
}
