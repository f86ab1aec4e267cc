//! Multi-sorted first-order syntax: signatures, terms, formulas, free/bound
//! variables, capture-avoiding substitution, α-equivalence, and canonicalization
//! into positional contexts.
//!
//! Variable names are plain strings, with three reserved families used by the
//! kernel itself:
//!
//! * `x1, x2, …` — positional free variables of a canonical context;
//! * `b1, b2, …` — canonical bound variables (`bd` at binder nesting depth `d`);
//! * `v1, v2, …` — scratch variables generated while freshening bound variables.
//!
//! Fresh names always take the lowest unused index, so every operation here is
//! deterministic.

mod parse;

pub use parse::{parse, parse_formula, parse_term, Parsed, SyntaxKind};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Errors produced by parsing, validation, and substitution.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("lex error at byte {pos}: {msg}")]
    Lex { pos: usize, msg: String },
    #[error("parse error at byte {pos}: expected {expected}, found {found}")]
    Parse {
        pos: usize,
        expected: String,
        found: String,
    },
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("symbol `{symbol}` expects {expected} argument(s), got {got}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("sort mismatch{place}: expected `{expected}`, got `{got}`")]
    SortMismatch {
        place: String,
        expected: String,
        got: String,
    },
    #[error("variable `{0}` is not in the context")]
    UnboundVar(String),
    #[error("binder variable `{0}` needs a sort annotation: the signature has more than one sort")]
    BinderNeedsSort(String),
    #[error("substitution shape mismatch: {0}")]
    SubstShape(String),
}

/// A typed declaration of one function symbol: argument sorts and result sort.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuncDecl {
    pub arity: Vec<String>,
    pub codomain: String,
}

/// A multi-sorted algebraic signature: sort names plus typed function symbols.
///
/// Sort names are pairwise distinct and every sort mentioned by a symbol is
/// declared; both are checked by [`Signature::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    sorts: Vec<String>,
    functions: BTreeMap<String, FuncDecl>,
}

impl Signature {
    pub fn new(
        sorts: Vec<String>,
        functions: Vec<(String, FuncDecl)>,
    ) -> Result<Self, SyntaxError> {
        let mut seen = BTreeSet::new();
        for s in &sorts {
            if !seen.insert(s.clone()) {
                return Err(SyntaxError::Duplicate(s.clone()));
            }
        }
        let mut map = BTreeMap::new();
        for (name, decl) in functions {
            for s in decl.arity.iter().chain([&decl.codomain]) {
                if !seen.contains(s) {
                    return Err(SyntaxError::UnknownSort(s.clone()));
                }
            }
            if map.insert(name.clone(), decl).is_some() {
                return Err(SyntaxError::Duplicate(name));
            }
        }
        Ok(Signature {
            sorts,
            functions: map,
        })
    }

    pub fn sorts(&self) -> &[String] {
        &self.sorts
    }

    pub fn has_sort(&self, name: &str) -> bool {
        self.sorts.iter().any(|s| s == name)
    }

    /// The unique sort, if the signature has exactly one.
    pub fn single_sort(&self) -> Option<&str> {
        match self.sorts.as_slice() {
            [s] => Some(s),
            _ => None,
        }
    }

    pub fn func(&self, name: &str) -> Option<&FuncDecl> {
        self.functions.get(name)
    }

    /// Function symbols in deterministic (sorted) order.
    pub fn functions(&self) -> impl Iterator<Item = (&String, &FuncDecl)> {
        self.functions.iter()
    }

    /// The sort of a term, checking arities and argument sorts along the way.
    pub fn term_sort(&self, t: &Term) -> Result<String, SyntaxError> {
        match t {
            Term::Var(v) => {
                if !self.has_sort(&v.sort) {
                    return Err(SyntaxError::UnknownSort(v.sort.clone()));
                }
                Ok(v.sort.clone())
            }
            Term::App { symbol, args } => {
                let decl = self
                    .func(symbol)
                    .ok_or_else(|| SyntaxError::UnknownSymbol(symbol.clone()))?;
                if decl.arity.len() != args.len() {
                    return Err(SyntaxError::ArityMismatch {
                        symbol: symbol.clone(),
                        expected: decl.arity.len(),
                        got: args.len(),
                    });
                }
                for (i, (arg, want)) in args.iter().zip(&decl.arity).enumerate() {
                    let got = self.term_sort(arg)?;
                    if got != *want {
                        return Err(SyntaxError::SortMismatch {
                            place: format!(" in argument {} of `{}`", i + 1, symbol),
                            expected: want.clone(),
                            got,
                        });
                    }
                }
                Ok(decl.codomain.clone())
            }
        }
    }

    /// Checks well-sortedness of every subterm and equality operand.
    pub fn validate_formula(&self, phi: &Formula) -> Result<(), SyntaxError> {
        match phi {
            Formula::Eq(sort, s, t) => {
                for side in [s, t] {
                    let got = self.term_sort(side)?;
                    if got != *sort {
                        return Err(SyntaxError::SortMismatch {
                            place: " in equality operand".into(),
                            expected: sort.clone(),
                            got,
                        });
                    }
                }
                Ok(())
            }
            Formula::Top | Formula::Bot => Ok(()),
            Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) => {
                self.validate_formula(p)?;
                self.validate_formula(q)
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                if !self.has_sort(&v.sort) {
                    return Err(SyntaxError::UnknownSort(v.sort.clone()));
                }
                self.validate_formula(body)
            }
        }
    }
}

/// A typed variable. Two variables are the same iff name and sort agree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: String,
    pub sort: String,
}

impl Var {
    pub fn new(name: impl Into<String>, sort: impl Into<String>) -> Self {
        Var {
            name: name.into(),
            sort: sort.into(),
        }
    }

    /// The canonical `i`-th positional context variable (1-based).
    pub fn positional(i: usize, sort: impl Into<String>) -> Self {
        Var::new(format!("x{i}"), sort)
    }

    /// The canonical bound variable for binder nesting depth `d` (1-based).
    pub fn bound(d: usize, sort: impl Into<String>) -> Self {
        Var::new(format!("b{d}"), sort)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// A first-order term: a variable or a function symbol applied to arguments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    App { symbol: String, args: Vec<Term> },
}

impl Term {
    pub fn var(name: impl Into<String>, sort: impl Into<String>) -> Self {
        Term::Var(Var::new(name, sort))
    }

    pub fn app(symbol: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App {
            symbol: symbol.into(),
            args,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App { symbol, args } => {
                if args.is_empty() {
                    write!(f, "{symbol}")
                } else {
                    write!(f, "{symbol}(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")
                }
            }
        }
    }
}

/// A first-order formula over equality, the propositional connectives, and
/// typed quantifiers. Negation is not a constructor: `!p` parses as `p -> F`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    /// `s = t`, with both operands of the stated sort.
    Eq(String, Term, Term),
    Top,
    Bot,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
}

impl Formula {
    pub fn and(p: Formula, q: Formula) -> Self {
        Formula::And(Box::new(p), Box::new(q))
    }
    pub fn or(p: Formula, q: Formula) -> Self {
        Formula::Or(Box::new(p), Box::new(q))
    }
    pub fn implies(p: Formula, q: Formula) -> Self {
        Formula::Implies(Box::new(p), Box::new(q))
    }
    /// `!p`, i.e. `p -> F`.
    #[allow(clippy::should_implement_trait)]
    pub fn not(p: Formula) -> Self {
        Formula::implies(p, Formula::Bot)
    }
    pub fn forall(v: Var, body: Formula) -> Self {
        Formula::Forall(v, Box::new(body))
    }
    pub fn exists(v: Var, body: Formula) -> Self {
        Formula::Exists(v, Box::new(body))
    }

    /// Connective nesting depth; atoms are 0, quantifiers are transparent.
    pub fn connective_depth(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::Top | Formula::Bot => 0,
            Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) => {
                1 + p.connective_depth().max(q.connective_depth())
            }
            Formula::Forall(_, p) | Formula::Exists(_, p) => p.connective_depth(),
        }
    }

    /// Quantifier nesting depth; connectives are transparent.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::Top | Formula::Bot => 0,
            Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) => {
                p.quantifier_depth().max(q.quantifier_depth())
            }
            Formula::Forall(_, p) | Formula::Exists(_, p) => 1 + p.quantifier_depth(),
        }
    }
}

impl fmt::Display for Formula {
    /// Prints in the parser's grammar, so printing then re-parsing round-trips
    /// (binders always carry their sort annotation).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Precedence climbing: quantifiers (0, maximal scope), -> (1, right
        // assoc), | (2), & (3), atoms (4).
        fn go(phi: &Formula, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let mine = match phi {
                Formula::Implies(..) => 1,
                Formula::Or(..) => 2,
                Formula::And(..) => 3,
                Formula::Forall(..) | Formula::Exists(..) => 0,
                _ => 4,
            };
            let need_paren = mine < prec;
            if need_paren {
                write!(f, "(")?;
            }
            match phi {
                Formula::Eq(_, s, t) => write!(f, "{s} = {t}")?,
                Formula::Top => write!(f, "T")?,
                Formula::Bot => write!(f, "F")?,
                Formula::And(p, q) => {
                    go(p, 3, f)?;
                    write!(f, " & ")?;
                    go(q, 4, f)?;
                }
                Formula::Or(p, q) => {
                    go(p, 2, f)?;
                    write!(f, " | ")?;
                    go(q, 3, f)?;
                }
                Formula::Implies(p, q) => {
                    go(p, 2, f)?;
                    write!(f, " -> ")?;
                    go(q, 1, f)?;
                }
                Formula::Forall(v, p) => {
                    write!(f, "forall {}:{}. ", v.name, v.sort)?;
                    go(p, 0, f)?;
                }
                Formula::Exists(v, p) => {
                    write!(f, "exists {}:{}. ", v.name, v.sort)?;
                    go(p, 0, f)?;
                }
            }
            if need_paren {
                write!(f, ")")?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}

/// An ordered list of distinct typed variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context(Vec<Var>);

impl Context {
    pub fn new(vars: Vec<Var>) -> Result<Self, SyntaxError> {
        let mut seen = BTreeSet::new();
        for v in &vars {
            if !seen.insert(v.name.clone()) {
                return Err(SyntaxError::Duplicate(v.name.clone()));
            }
        }
        Ok(Context(vars))
    }

    /// The canonical positional context `x1:A1, …, xn:An`.
    pub fn positional(sorts: &[String]) -> Self {
        Context(
            sorts
                .iter()
                .enumerate()
                .map(|(i, s)| Var::positional(i + 1, s.clone()))
                .collect(),
        )
    }

    pub fn vars(&self) -> &[Var] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sorts(&self) -> Vec<String> {
        self.0.iter().map(|v| v.sort.clone()).collect()
    }

    pub fn lookup(&self, name: &str) -> Option<&Var> {
        self.0.iter().find(|v| v.name == name)
    }

    pub fn position(&self, v: &Var) -> Option<usize> {
        self.0.iter().position(|w| w == v)
    }
}

/// Free variables of a term.
pub fn term_free_vars(t: &Term) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    collect_term_vars(t, &mut out);
    out
}

fn collect_term_vars(t: &Term, out: &mut BTreeSet<Var>) {
    match t {
        Term::Var(v) => {
            out.insert(v.clone());
        }
        Term::App { args, .. } => {
            for a in args {
                collect_term_vars(a, out);
            }
        }
    }
}

/// Free variables of a formula: `FV(Qv. p) = FV(p) \ {v}`.
pub fn free_vars(phi: &Formula) -> BTreeSet<Var> {
    match phi {
        Formula::Eq(_, s, t) => {
            let mut out = term_free_vars(s);
            out.extend(term_free_vars(t));
            out
        }
        Formula::Top | Formula::Bot => BTreeSet::new(),
        Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) => {
            let mut out = free_vars(p);
            out.extend(free_vars(q));
            out
        }
        Formula::Forall(v, p) | Formula::Exists(v, p) => {
            let mut out = free_vars(p);
            out.remove(v);
            out
        }
    }
}

/// Bound variables of a formula: `BV(Qv. p) = BV(p) ∪ {v}`.
pub fn bound_vars(phi: &Formula) -> BTreeSet<Var> {
    match phi {
        Formula::Eq(..) | Formula::Top | Formula::Bot => BTreeSet::new(),
        Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) => {
            let mut out = bound_vars(p);
            out.extend(bound_vars(q));
            out
        }
        Formula::Forall(v, p) | Formula::Exists(v, p) => {
            let mut out = bound_vars(p);
            out.insert(v.clone());
            out
        }
    }
}

/// Every variable occurring in the formula, free or bound, plus binder names.
pub fn all_vars(phi: &Formula) -> BTreeSet<Var> {
    let mut out = free_vars(phi);
    out.extend(bound_vars(phi));
    out
}

fn all_names(phi: &Formula) -> BTreeSet<String> {
    all_vars(phi).into_iter().map(|v| v.name).collect()
}

/// The lowest-index name `prefix{k}` (k ≥ 1) not present in `used`.
pub fn fresh_name(prefix: &str, used: &BTreeSet<String>) -> String {
    for k in 1.. {
        let cand = format!("{prefix}{k}");
        if !used.contains(&cand) {
            return cand;
        }
    }
    unreachable!()
}

/// Literal (capture-unaware) parallel substitution on a term.
pub fn subst_term(t: &Term, map: &BTreeMap<Var, Term>) -> Term {
    match t {
        Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::App { symbol, args } => Term::App {
            symbol: symbol.clone(),
            args: args.iter().map(|a| subst_term(a, map)).collect(),
        },
    }
}

/// Parallel substitution `t[xs := us]` on a term, with shape/sort checks.
pub fn subst_term_checked(
    sig: &Signature,
    t: &Term,
    xs: &[Var],
    us: &[Term],
) -> Result<Term, SyntaxError> {
    let map = subst_map(sig, xs, us)?;
    Ok(subst_term(t, &map))
}

fn subst_map(
    sig: &Signature,
    xs: &[Var],
    us: &[Term],
) -> Result<BTreeMap<Var, Term>, SyntaxError> {
    if xs.len() != us.len() {
        return Err(SyntaxError::SubstShape(format!(
            "{} variables but {} terms",
            xs.len(),
            us.len()
        )));
    }
    let mut map = BTreeMap::new();
    for (x, u) in xs.iter().zip(us) {
        let got = sig.term_sort(u)?;
        if got != x.sort {
            return Err(SyntaxError::SortMismatch {
                place: format!(" substituting for `{}`", x.name),
                expected: x.sort.clone(),
                got,
            });
        }
        if map.insert(x.clone(), u.clone()).is_some() {
            return Err(SyntaxError::SubstShape(format!(
                "variable `{}` repeated",
                x.name
            )));
        }
    }
    Ok(map)
}

/// Capture-avoiding substitution `phi[xs := us]` on a formula α-class.
///
/// Picks a representative whose bound variables avoid both the substituted
/// variables and the free variables of the replacement terms, then substitutes
/// literally; the binder clause drops shadowed variables from the map.
pub fn subst_formula(
    sig: &Signature,
    phi: &Formula,
    xs: &[Var],
    us: &[Term],
) -> Result<Formula, SyntaxError> {
    let map = subst_map(sig, xs, us)?;
    let mut avoid: BTreeSet<String> = xs.iter().map(|v| v.name.clone()).collect();
    for u in us {
        avoid.extend(term_free_vars(u).into_iter().map(|v| v.name));
    }
    let rep = freshen_bound(phi, &avoid);
    Ok(subst_formula_literal(&rep, &map))
}

fn subst_formula_literal(phi: &Formula, map: &BTreeMap<Var, Term>) -> Formula {
    match phi {
        Formula::Eq(sort, s, t) => {
            Formula::Eq(sort.clone(), subst_term(s, map), subst_term(t, map))
        }
        Formula::Top => Formula::Top,
        Formula::Bot => Formula::Bot,
        Formula::And(p, q) => Formula::and(
            subst_formula_literal(p, map),
            subst_formula_literal(q, map),
        ),
        Formula::Or(p, q) => Formula::or(
            subst_formula_literal(p, map),
            subst_formula_literal(q, map),
        ),
        Formula::Implies(p, q) => Formula::implies(
            subst_formula_literal(p, map),
            subst_formula_literal(q, map),
        ),
        Formula::Forall(v, p) | Formula::Exists(v, p) => {
            let mut inner = map.clone();
            inner.remove(v);
            let body = subst_formula_literal(p, &inner);
            match phi {
                Formula::Forall(..) => Formula::forall(v.clone(), body),
                _ => Formula::exists(v.clone(), body),
            }
        }
    }
}

/// An α-variant of `phi` whose bound variables avoid the given names.
///
/// Offending binders are renamed to scratch variables `v{k}`, lowest unused
/// index first. Used to pick substitution representatives and by tests of the
/// freshness property.
pub fn freshen_bound(phi: &Formula, avoid: &BTreeSet<String>) -> Formula {
    let mut used: BTreeSet<String> = avoid.clone();
    used.extend(all_names(phi));
    let mut env: Vec<(Var, Var)> = Vec::new();
    freshen_rec(phi, avoid, &mut used, &mut env)
}

fn freshen_rec(
    phi: &Formula,
    avoid: &BTreeSet<String>,
    used: &mut BTreeSet<String>,
    env: &mut Vec<(Var, Var)>,
) -> Formula {
    match phi {
        Formula::Eq(sort, s, t) => Formula::Eq(
            sort.clone(),
            rename_term_env(s, env),
            rename_term_env(t, env),
        ),
        Formula::Top => Formula::Top,
        Formula::Bot => Formula::Bot,
        Formula::And(p, q) => Formula::and(
            freshen_rec(p, avoid, used, env),
            freshen_rec(q, avoid, used, env),
        ),
        Formula::Or(p, q) => Formula::or(
            freshen_rec(p, avoid, used, env),
            freshen_rec(q, avoid, used, env),
        ),
        Formula::Implies(p, q) => Formula::implies(
            freshen_rec(p, avoid, used, env),
            freshen_rec(q, avoid, used, env),
        ),
        Formula::Forall(v, p) | Formula::Exists(v, p) => {
            let fresh = if avoid.contains(&v.name) {
                let name = fresh_name("v", used);
                used.insert(name.clone());
                Var::new(name, v.sort.clone())
            } else {
                v.clone()
            };
            env.push((v.clone(), fresh.clone()));
            let body = freshen_rec(p, avoid, used, env);
            env.pop();
            match phi {
                Formula::Forall(..) => Formula::forall(fresh, body),
                _ => Formula::exists(fresh, body),
            }
        }
    }
}

fn rename_term_env(t: &Term, env: &[(Var, Var)]) -> Term {
    match t {
        Term::Var(v) => {
            // Innermost binding wins; free occurrences pass through.
            for (old, new) in env.iter().rev() {
                if old == v {
                    return Term::Var(new.clone());
                }
            }
            t.clone()
        }
        Term::App { symbol, args } => Term::App {
            symbol: symbol.clone(),
            args: args.iter().map(|a| rename_term_env(a, env)).collect(),
        },
    }
}

/// Replaces free occurrences of `x` by `u`, stopping at binders that rebind
/// `x`. The caller guarantees `u` is fresh, so no capture can occur.
fn rename_free(phi: &Formula, x: &Var, u: &Var) -> Formula {
    match phi {
        Formula::Eq(sort, s, t) => {
            let map = BTreeMap::from([(x.clone(), Term::Var(u.clone()))]);
            Formula::Eq(sort.clone(), subst_term(s, &map), subst_term(t, &map))
        }
        Formula::Top => Formula::Top,
        Formula::Bot => Formula::Bot,
        Formula::And(p, q) => Formula::and(rename_free(p, x, u), rename_free(q, x, u)),
        Formula::Or(p, q) => Formula::or(rename_free(p, x, u), rename_free(q, x, u)),
        Formula::Implies(p, q) => {
            Formula::implies(rename_free(p, x, u), rename_free(q, x, u))
        }
        Formula::Forall(v, p) | Formula::Exists(v, p) => {
            let body = if v == x {
                (**p).clone()
            } else {
                rename_free(p, x, u)
            };
            match phi {
                Formula::Forall(..) => Formula::forall(v.clone(), body),
                _ => Formula::exists(v.clone(), body),
            }
        }
    }
}

/// α-equivalence: atomic formulas compare literally; binders compare after
/// renaming both bound variables to a shared fresh one.
pub fn alpha_eq(phi: &Formula, psi: &Formula) -> bool {
    match (phi, psi) {
        (Formula::Eq(s1, a1, b1), Formula::Eq(s2, a2, b2)) => {
            s1 == s2 && a1 == a2 && b1 == b2
        }
        (Formula::Top, Formula::Top) | (Formula::Bot, Formula::Bot) => true,
        (Formula::And(p1, q1), Formula::And(p2, q2))
        | (Formula::Or(p1, q1), Formula::Or(p2, q2))
        | (Formula::Implies(p1, q1), Formula::Implies(p2, q2)) => {
            alpha_eq(p1, p2) && alpha_eq(q1, q2)
        }
        (Formula::Forall(x, p), Formula::Forall(y, q))
        | (Formula::Exists(x, p), Formula::Exists(y, q)) => {
            if x.sort != y.sort {
                return false;
            }
            let mut used: BTreeSet<String> = all_names(p);
            used.extend(all_names(q));
            used.insert(x.name.clone());
            used.insert(y.name.clone());
            let u = Var::new(fresh_name("v", &used), x.sort.clone());
            alpha_eq(&rename_free(p, x, &u), &rename_free(q, y, &u))
        }
        _ => false,
    }
}

/// Canonicalizes a formula over a context: free variables become positional
/// (`x1..xn`, by context order) and bound variables become `b{d}` where `d` is
/// the binder nesting depth. Two inputs canonicalize identically iff they are
/// equal up to renaming of free variables and α-equivalence.
pub fn canonicalize(phi: &Formula, ctx: &Context) -> Result<Formula, SyntaxError> {
    for v in free_vars(phi) {
        if ctx.position(&v).is_none() {
            return Err(SyntaxError::UnboundVar(v.name));
        }
    }
    let mut env: Vec<(Var, Var)> = Vec::new();
    Ok(canon_rec(phi, ctx, &mut env, 1))
}

fn canon_rec(phi: &Formula, ctx: &Context, env: &mut Vec<(Var, Var)>, depth: usize) -> Formula {
    match phi {
        Formula::Eq(sort, s, t) => Formula::Eq(
            sort.clone(),
            canon_term(s, ctx, env),
            canon_term(t, ctx, env),
        ),
        Formula::Top => Formula::Top,
        Formula::Bot => Formula::Bot,
        Formula::And(p, q) => Formula::and(
            canon_rec(p, ctx, env, depth),
            canon_rec(q, ctx, env, depth),
        ),
        Formula::Or(p, q) => Formula::or(
            canon_rec(p, ctx, env, depth),
            canon_rec(q, ctx, env, depth),
        ),
        Formula::Implies(p, q) => Formula::implies(
            canon_rec(p, ctx, env, depth),
            canon_rec(q, ctx, env, depth),
        ),
        Formula::Forall(v, p) | Formula::Exists(v, p) => {
            let new = Var::bound(depth, v.sort.clone());
            env.push((v.clone(), new.clone()));
            let body = canon_rec(p, ctx, env, depth + 1);
            env.pop();
            match phi {
                Formula::Forall(..) => Formula::forall(new, body),
                _ => Formula::exists(new, body),
            }
        }
    }
}

fn canon_term(t: &Term, ctx: &Context, env: &[(Var, Var)]) -> Term {
    match t {
        Term::Var(v) => {
            for (old, new) in env.iter().rev() {
                if old == v {
                    return Term::Var(new.clone());
                }
            }
            let pos = ctx
                .position(v)
                .expect("free variable checked against context");
            Term::Var(Var::positional(pos + 1, v.sort.clone()))
        }
        Term::App { symbol, args } => Term::App {
            symbol: symbol.clone(),
            args: args.iter().map(|a| canon_term(a, ctx, env)).collect(),
        },
    }
}

/// True iff the formula is already in canonical form over the positional
/// context of the given sorts.
pub fn is_canonical(phi: &Formula, sorts: &[String]) -> bool {
    let ctx = Context::positional(sorts);
    canonicalize(phi, &ctx).map(|c| c == *phi).unwrap_or(false)
}

/// Opens the outer binder of a canonical `Forall`/`Exists` over the positional
/// context of `sorts`: the bound variable becomes position `n+1` and the body
/// is re-canonicalized over the extended context. Returns the extended sort
/// list and the body.
pub fn open_binder(phi: &Formula, sorts: &[String]) -> Option<(Vec<String>, Formula)> {
    let (v, body) = match phi {
        Formula::Forall(v, p) | Formula::Exists(v, p) => (v, p),
        _ => return None,
    };
    let mut extended = sorts.to_vec();
    extended.push(v.sort.clone());
    let opened = rename_free(body, v, &Var::positional(extended.len(), v.sort.clone()));
    let ctx = Context::positional(&extended);
    let canon = canonicalize(&opened, &ctx).expect("opened body is closed over extended context");
    Some((extended, canon))
}

/// The quantifier introduced by [`close_binder`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// Closes the last positional variable of `sorts` under a quantifier — the
/// inverse of [`open_binder`]. `phi` must be canonical over the positional
/// context of `sorts`; the result is canonical over `sorts` minus its last
/// entry.
pub fn close_binder(
    q: Quantifier,
    phi: &Formula,
    sorts: &[String],
) -> Result<Formula, SyntaxError> {
    let n = sorts.len();
    if n == 0 {
        return Err(SyntaxError::SubstShape(
            "close_binder needs a non-empty context".into(),
        ));
    }
    let last = Var::positional(n, sorts[n - 1].clone());
    let used: BTreeSet<String> = all_vars(phi).into_iter().map(|v| v.name).collect();
    let v = Var::new(fresh_name("v", &used), last.sort.clone());
    let body = rename_free(phi, &last, &v);
    let wrapped = match q {
        Quantifier::Forall => Formula::forall(v, body),
        Quantifier::Exists => Formula::exists(v, body),
    };
    canonicalize(&wrapped, &Context::positional(&sorts[..n - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig1() -> Signature {
        // One sort A, a binary f, a unary g, and a constant c.
        Signature::new(
            vec!["A".into()],
            vec![
                (
                    "f".into(),
                    FuncDecl {
                        arity: vec!["A".into(), "A".into()],
                        codomain: "A".into(),
                    },
                ),
                (
                    "g".into(),
                    FuncDecl {
                        arity: vec!["A".into()],
                        codomain: "A".into(),
                    },
                ),
                (
                    "c".into(),
                    FuncDecl {
                        arity: vec![],
                        codomain: "A".into(),
                    },
                ),
            ],
        )
        .unwrap()
    }

    fn va(n: &str) -> Var {
        Var::new(n, "A")
    }

    fn tv(n: &str) -> Term {
        Term::var(n, "A")
    }

    fn eq(s: Term, t: Term) -> Formula {
        Formula::Eq("A".into(), s, t)
    }

    #[test]
    fn signature_rejects_bad_decls() {
        assert!(matches!(
            Signature::new(vec!["A".into(), "A".into()], vec![]),
            Err(SyntaxError::Duplicate(_))
        ));
        assert!(matches!(
            Signature::new(
                vec!["A".into()],
                vec![(
                    "f".into(),
                    FuncDecl {
                        arity: vec!["B".into()],
                        codomain: "A".into()
                    }
                )]
            ),
            Err(SyntaxError::UnknownSort(_))
        ));
    }

    #[test]
    fn free_vars_of_quantified_equality() {
        // FV(forall y. y = z) = {z}
        let phi = Formula::forall(va("y"), eq(tv("y"), tv("z")));
        let fv = free_vars(&phi);
        assert_eq!(fv, BTreeSet::from([va("z")]));
    }

    #[test]
    fn free_vars_trivia() {
        assert!(free_vars(&Formula::Top).is_empty());
        let t = Term::app("f", vec![tv("x"), tv("y")]);
        assert_eq!(term_free_vars(&t), BTreeSet::from([va("x"), va("y")]));
    }

    #[test]
    fn bound_vars_collects_binders() {
        let phi = Formula::forall(va("y"), Formula::exists(va("w"), eq(tv("y"), tv("w"))));
        assert_eq!(bound_vars(&phi), BTreeSet::from([va("y"), va("w")]));
    }

    #[test]
    fn subst_no_capture_needed() {
        // (forall y. y = z)[z := x]  =  forall y. y = x
        let sig = sig1();
        let phi = Formula::forall(va("y"), eq(tv("y"), tv("z")));
        let got = subst_formula(&sig, &phi, &[va("z")], &[tv("x")]).unwrap();
        let want = Formula::forall(va("y"), eq(tv("y"), tv("x")));
        assert_eq!(got, want);
    }

    #[test]
    fn subst_identity() {
        let sig = sig1();
        let t = Term::app("f", vec![tv("x"), Term::app("g", vec![tv("y")])]);
        let got = subst_term_checked(&sig, &t, &[va("x"), va("y")], &[tv("x"), tv("y")]).unwrap();
        assert_eq!(got, t);
    }

    #[test]
    fn subst_renames_to_avoid_capture() {
        // (forall y. y = z)[z := y]: the bound y must be renamed; the result is
        // forall w. w = y up to α (hand-derived by applying the class
        // substitution with a fresh w).
        let sig = sig1();
        let phi = Formula::forall(va("y"), eq(tv("y"), tv("z")));
        let got = subst_formula(&sig, &phi, &[va("z")], &[tv("y")]).unwrap();
        let want = Formula::forall(va("w"), eq(tv("w"), tv("y")));
        assert!(alpha_eq(&got, &want), "got {got}");
        // And the naive literal result would have been capture: check we did
        // not produce forall y. y = y.
        assert!(!alpha_eq(
            &got,
            &Formula::forall(va("y"), eq(tv("y"), tv("y")))
        ));
    }

    #[test]
    fn alpha_eq_examples() {
        // forall x (x=c) ~ forall y (y=c)
        let c = Term::app("c", vec![]);
        let p1 = Formula::forall(va("x"), eq(tv("x"), c.clone()));
        let p2 = Formula::forall(va("y"), eq(tv("y"), c.clone()));
        assert!(alpha_eq(&p1, &p2));
        // (x=y) vs (y=x): atomic equality is literal
        assert!(!alpha_eq(&eq(tv("x"), tv("y")), &eq(tv("y"), tv("x"))));
        // forall x exists y (x=y) ~ forall u exists v (u=v): unfold twice
        let q1 = Formula::forall(
            va("x"),
            Formula::exists(va("y"), eq(tv("x"), tv("y"))),
        );
        let q2 = Formula::forall(
            va("u"),
            Formula::exists(va("v"), eq(tv("u"), tv("v"))),
        );
        assert!(alpha_eq(&q1, &q2));
    }

    #[test]
    fn alpha_eq_distinguishes_binder_use() {
        let p1 = Formula::forall(va("x"), eq(tv("x"), tv("x")));
        let p2 = Formula::forall(va("y"), eq(tv("y"), tv("z")));
        assert!(!alpha_eq(&p1, &p2));
    }

    #[test]
    fn canonicalize_single_renaming() {
        // forall y (y=z), ctx (z)  ->  forall b1 (b1 = x1)
        let ctx = Context::new(vec![va("z")]).unwrap();
        let phi = Formula::forall(va("y"), eq(tv("y"), tv("z")));
        let got = canonicalize(&phi, &ctx).unwrap();
        let want = Formula::forall(
            Var::bound(1, "A"),
            eq(
                Term::Var(Var::bound(1, "A")),
                Term::Var(Var::positional(1, "A")),
            ),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn canonicalize_positions_and_nesting() {
        // exists y (y=z) & (z=z), ctx (w, z)  ->  exists b1 (b1=x2) & (x2=x2)
        let ctx = Context::new(vec![va("w"), va("z")]).unwrap();
        let phi = Formula::and(
            Formula::exists(va("y"), eq(tv("y"), tv("z"))),
            eq(tv("z"), tv("z")),
        );
        let got = canonicalize(&phi, &ctx).unwrap();
        let x2 = Term::Var(Var::positional(2, "A"));
        let b1 = Var::bound(1, "A");
        let want = Formula::and(
            Formula::exists(b1.clone(), eq(Term::Var(b1), x2.clone())),
            eq(x2.clone(), x2.clone()),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn canonicalize_alpha_variants_agree() {
        let ctx = Context::new(vec![va("z")]).unwrap();
        let p1 = Formula::forall(va("y"), eq(tv("y"), tv("z")));
        let p2 = Formula::forall(va("u"), eq(tv("u"), tv("z")));
        assert_eq!(
            canonicalize(&p1, &ctx).unwrap(),
            canonicalize(&p2, &ctx).unwrap()
        );
    }

    #[test]
    fn canonicalize_rejects_unbound() {
        let ctx = Context::new(vec![va("w")]).unwrap();
        let phi = eq(tv("z"), tv("z"));
        assert!(matches!(
            canonicalize(&phi, &ctx),
            Err(SyntaxError::UnboundVar(_))
        ));
    }

    #[test]
    fn canonicalize_is_idempotent_and_capture_safe() {
        // Context (x2, x1): the positional renaming swaps the two names.
        let ctx = Context::new(vec![va("x2"), va("x1")]).unwrap();
        let phi = eq(tv("x1"), tv("x2"));
        let got = canonicalize(&phi, &ctx).unwrap();
        assert_eq!(
            got,
            eq(
                Term::Var(Var::positional(2, "A")),
                Term::Var(Var::positional(1, "A"))
            )
        );
        // A formula binding a name that also appears in the reserved family.
        let tricky = Formula::forall(va("x1"), eq(tv("x1"), tv("z")));
        let ctx2 = Context::new(vec![va("z")]).unwrap();
        let got2 = canonicalize(&tricky, &ctx2).unwrap();
        let b1 = Var::bound(1, "A");
        assert_eq!(
            got2,
            Formula::forall(
                b1.clone(),
                eq(Term::Var(b1), Term::Var(Var::positional(1, "A")))
            )
        );
        let again = canonicalize(&got2, &Context::positional(&["A".into()])).unwrap();
        assert_eq!(again, got2);
    }

    #[test]
    fn open_binder_shifts_depths() {
        // forall b1 forall b2 (b2 = b1) over () opens to forall b1 (b1 = x1) over (A).
        let inner = Formula::forall(
            Var::bound(2, "A"),
            eq(
                Term::Var(Var::bound(2, "A")),
                Term::Var(Var::bound(1, "A")),
            ),
        );
        let phi = Formula::forall(Var::bound(1, "A"), inner);
        assert!(is_canonical(&phi, &[]));
        let (sorts, body) = open_binder(&phi, &[]).unwrap();
        assert_eq!(sorts, vec!["A".to_string()]);
        let b1 = Var::bound(1, "A");
        let want = Formula::forall(
            b1.clone(),
            eq(Term::Var(b1), Term::Var(Var::positional(1, "A"))),
        );
        assert_eq!(body, want);
    }

    #[test]
    fn freshness_representative_exists() {
        let phi = Formula::forall(va("y"), Formula::exists(va("w"), eq(tv("y"), tv("w"))));
        let avoid = BTreeSet::from(["y".to_string(), "w".to_string()]);
        let psi = freshen_bound(&phi, &avoid);
        assert!(alpha_eq(&phi, &psi));
        let bv: BTreeSet<String> = bound_vars(&psi).into_iter().map(|v| v.name).collect();
        assert!(bv.is_disjoint(&avoid));
    }
}
