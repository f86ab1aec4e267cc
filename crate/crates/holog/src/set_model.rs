//! Finite-set backend: formulas denote families of finite proof sets over
//! tuples of carrier elements, and truth is non-emptiness.
//!
//! Proof tokens are canonical nested tags, so evaluated deductions are
//! ordinary finite maps with decidable extensional equality — the relation
//! suite compares them literally. Reindexing reads the fiber at the
//! transformed point without re-tagging, which makes the fibration split on
//! the nose. The classical [`tarski_truth`] evaluator is written
//! independently of the proof-set interpreter so the two can be played
//! against each other.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::{interpret_formula, Model, ModelError};
use crate::syntax::{Context, Formula, Signature, Term, Var};
use crate::term_cat::{CtxObject, TermMorphism};

/// A finite interpretation of a signature: named carrier elements per sort
/// and a total function table per symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetStructure {
    /// Sort name → element names (distinct, order fixes element indices).
    pub carriers: BTreeMap<String, Vec<String>>,
    /// Symbol name → map from argument index tuples to result index.
    pub funcs: BTreeMap<String, BTreeMap<Vec<usize>, usize>>,
}

impl SetStructure {
    /// Validates carriers and tables against the signature.
    pub fn new(
        sig: &Signature,
        carriers: BTreeMap<String, Vec<String>>,
        funcs: BTreeMap<String, BTreeMap<Vec<usize>, usize>>,
    ) -> Result<Self, ModelError> {
        for sort in sig.sorts() {
            let elems = carriers
                .get(sort)
                .ok_or_else(|| ModelError::Shape(format!("no carrier for sort `{sort}`")))?;
            let distinct: BTreeSet<&String> = elems.iter().collect();
            if distinct.len() != elems.len() {
                return Err(ModelError::Shape(format!(
                    "carrier of `{sort}` has duplicate element names"
                )));
            }
        }
        let st = SetStructure { carriers, funcs };
        for (name, decl) in sig.functions() {
            let table = st
                .funcs
                .get(name)
                .ok_or_else(|| ModelError::Shape(format!("no table for symbol `{name}`")))?;
            let arg_sizes: Vec<usize> =
                decl.arity.iter().map(|s| st.carrier_size(s)).collect();
            let expected = crate::gen::all_points(&arg_sizes);
            if table.len() != expected.len() {
                return Err(ModelError::Shape(format!(
                    "table for `{name}` has {} rows, expected {}",
                    table.len(),
                    expected.len()
                )));
            }
            let out_size = st.carrier_size(&decl.codomain);
            for args in &expected {
                match table.get(args) {
                    Some(&v) if v < out_size => {}
                    Some(&v) => {
                        return Err(ModelError::Shape(format!(
                            "table for `{name}` maps {args:?} to out-of-range {v}"
                        )))
                    }
                    None => {
                        return Err(ModelError::Shape(format!(
                            "table for `{name}` is missing row {args:?}"
                        )))
                    }
                }
            }
        }
        Ok(st)
    }

    /// A structure with every carrier `{e0, …, e(n-1)}` and tables given by a
    /// closure; convenient for generated suites.
    pub fn build(
        sig: &Signature,
        sizes: &BTreeMap<String, usize>,
        mut table: impl FnMut(&str, &[usize]) -> usize,
    ) -> Result<Self, ModelError> {
        let carriers: BTreeMap<String, Vec<String>> = sig
            .sorts()
            .iter()
            .map(|s| {
                let n = *sizes.get(s).unwrap_or(&1);
                (s.clone(), (0..n).map(|i| format!("e{i}")).collect())
            })
            .collect();
        let mut funcs = BTreeMap::new();
        for (name, decl) in sig.functions() {
            let arg_sizes: Vec<usize> = decl
                .arity
                .iter()
                .map(|s| carriers[s].len())
                .collect();
            let mut t = BTreeMap::new();
            for args in crate::gen::all_points(&arg_sizes) {
                let v = table(name, &args);
                t.insert(args, v);
            }
            funcs.insert(name.clone(), t);
        }
        SetStructure::new(sig, carriers, funcs)
    }

    pub fn carrier_size(&self, sort: &str) -> usize {
        self.carriers.get(sort).map(|v| v.len()).unwrap_or(0)
    }

    /// Evaluates a term over the positional context of `sorts` at `env`.
    pub fn eval_term(&self, t: &Term, env: &[usize]) -> Result<usize, ModelError> {
        match t {
            Term::Var(v) => {
                let i: usize = v
                    .name
                    .strip_prefix('x')
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| {
                        ModelError::Shape(format!(
                            "non-positional variable `{}` in evaluation",
                            v.name
                        ))
                    })?;
                env.get(i - 1).copied().ok_or_else(|| {
                    ModelError::Shape(format!("point too short for `{}`", v.name))
                })
            }
            Term::App { symbol, args } => {
                let vals: Result<Vec<usize>, _> =
                    args.iter().map(|a| self.eval_term(a, env)).collect();
                let table = self.funcs.get(symbol).ok_or_else(|| {
                    ModelError::Shape(format!("no table for symbol `{symbol}`"))
                })?;
                table.get(&vals?).copied().ok_or_else(|| {
                    ModelError::Shape(format!("table for `{symbol}` missing a row"))
                })
            }
        }
    }
}

/// A canonical proof token. `Table` is keyed by the position of the argument
/// token in the sorted domain fiber; `Sections` holds one token per element
/// of the quantified carrier, in element order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Token {
    Unit,
    Refl,
    Pair(Box<Token>, Box<Token>),
    Left(Box<Token>),
    Right(Box<Token>),
    Table(Vec<Token>),
    Sections(Vec<Token>),
    Choice(usize, Box<Token>),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Unit => write!(f, "*"),
            Token::Refl => write!(f, "refl"),
            Token::Pair(a, b) => write!(f, "({a}, {b})"),
            Token::Left(a) => write!(f, "left {a}"),
            Token::Right(a) => write!(f, "right {a}"),
            Token::Table(ts) => {
                write!(f, "fun[")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, "]")
            }
            Token::Sections(ts) => {
                write!(f, "all[")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, "]")
            }
            Token::Choice(i, t) => write!(f, "at {i}: {t}"),
        }
    }
}

/// A predicate: one finite token set per base point of the context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetPred {
    pub ctx: CtxObject,
    pub fibers: BTreeMap<Vec<usize>, BTreeSet<Token>>,
}

impl SetPred {
    pub fn fiber(&self, point: &[usize]) -> Result<&BTreeSet<Token>, ModelError> {
        self.fibers
            .get(point)
            .ok_or_else(|| ModelError::Shape(format!("no fiber at {point:?}")))
    }

    /// Total number of tokens across all fibers.
    pub fn total_size(&self) -> usize {
        self.fibers.values().map(|s| s.len()).sum()
    }
}

/// A fiberwise map of proof tokens between two predicates over one context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetMor {
    pub dom: SetPred,
    pub cod: SetPred,
    pub maps: BTreeMap<Vec<usize>, BTreeMap<Token, Token>>,
}

/// The finite-set backend: a structure plus a fiber-size guard.
pub struct SetModel<'a> {
    pub sig: &'a Signature,
    pub structure: &'a SetStructure,
    pub max_fiber: usize,
}

pub const DEFAULT_MAX_FIBER: usize = 10_000;

impl<'a> SetModel<'a> {
    pub fn new(sig: &'a Signature, structure: &'a SetStructure) -> Self {
        SetModel {
            sig,
            structure,
            max_fiber: DEFAULT_MAX_FIBER,
        }
    }

    pub fn with_max_fiber(mut self, max_fiber: usize) -> Self {
        self.max_fiber = max_fiber;
        self
    }

    fn points(&self, ctx: &CtxObject) -> Vec<Vec<usize>> {
        let sizes: Vec<usize> = ctx
            .sorts()
            .iter()
            .map(|s| self.structure.carrier_size(s))
            .collect();
        crate::gen::all_points(&sizes)
    }

    fn guard(&self, what: &str, size: usize) -> Result<(), ModelError> {
        if size > self.max_fiber {
            return Err(ModelError::Overflow {
                what: what.to_string(),
                size,
                bound: self.max_fiber,
            });
        }
        Ok(())
    }

    fn zip_ctx(
        &self,
        p: &SetPred,
        q: &SetPred,
        what: &str,
    ) -> Result<(), ModelError> {
        if p.ctx != q.ctx {
            return Err(ModelError::Shape(format!(
                "{what}: contexts {} and {} differ",
                p.ctx, q.ctx
            )));
        }
        Ok(())
    }

    fn map_point(
        &self,
        t: &TermMorphism,
        point: &[usize],
    ) -> Result<Vec<usize>, ModelError> {
        t.terms()
            .iter()
            .map(|term| self.structure.eval_term(term, point))
            .collect()
    }

    /// Pointwise morphism construction over a shared context.
    fn mor_by<F>(&self, dom: &SetPred, cod: &SetPred, mut f: F) -> Result<SetMor, ModelError>
    where
        F: FnMut(&[usize], &Token) -> Result<Token, ModelError>,
    {
        let mut maps = BTreeMap::new();
        for (pt, fiber) in &dom.fibers {
            let mut map = BTreeMap::new();
            let cod_fiber = cod.fiber(pt)?;
            for tok in fiber {
                let out = f(pt, tok)?;
                if !cod_fiber.contains(&out) {
                    return Err(ModelError::Shape(format!(
                        "image token {out} not in codomain fiber at {pt:?}"
                    )));
                }
                map.insert(tok.clone(), out);
            }
            maps.insert(pt.clone(), map);
        }
        Ok(SetMor {
            dom: dom.clone(),
            cod: cod.clone(),
            maps,
        })
    }
}

impl<'a> Model for SetModel<'a> {
    type Pred = SetPred;
    type ProofMor = SetMor;

    fn base_sizes(&self, ctx: &CtxObject) -> Result<Vec<usize>, ModelError> {
        Ok(ctx
            .sorts()
            .iter()
            .map(|s| self.structure.carrier_size(s))
            .collect())
    }

    fn top(&self, ctx: &CtxObject) -> Result<SetPred, ModelError> {
        let fibers = self
            .points(ctx)
            .into_iter()
            .map(|pt| (pt, BTreeSet::from([Token::Unit])))
            .collect();
        Ok(SetPred {
            ctx: ctx.clone(),
            fibers,
        })
    }

    fn bot(&self, ctx: &CtxObject) -> Result<SetPred, ModelError> {
        let fibers = self
            .points(ctx)
            .into_iter()
            .map(|pt| (pt, BTreeSet::new()))
            .collect();
        Ok(SetPred {
            ctx: ctx.clone(),
            fibers,
        })
    }

    fn and(&self, p: &SetPred, q: &SetPred) -> Result<SetPred, ModelError> {
        self.zip_ctx(p, q, "and")?;
        let mut fibers = BTreeMap::new();
        for (pt, pf) in &p.fibers {
            let qf = q.fiber(pt)?;
            self.guard("conjunction fiber", pf.len().saturating_mul(qf.len()))?;
            let mut set = BTreeSet::new();
            for a in pf {
                for b in qf {
                    set.insert(Token::Pair(Box::new(a.clone()), Box::new(b.clone())));
                }
            }
            fibers.insert(pt.clone(), set);
        }
        Ok(SetPred {
            ctx: p.ctx.clone(),
            fibers,
        })
    }

    fn or(&self, p: &SetPred, q: &SetPred) -> Result<SetPred, ModelError> {
        self.zip_ctx(p, q, "or")?;
        let mut fibers = BTreeMap::new();
        for (pt, pf) in &p.fibers {
            let qf = q.fiber(pt)?;
            let mut set = BTreeSet::new();
            for a in pf {
                set.insert(Token::Left(Box::new(a.clone())));
            }
            for b in qf {
                set.insert(Token::Right(Box::new(b.clone())));
            }
            fibers.insert(pt.clone(), set);
        }
        Ok(SetPred {
            ctx: p.ctx.clone(),
            fibers,
        })
    }

    fn implies(&self, p: &SetPred, q: &SetPred) -> Result<SetPred, ModelError> {
        self.zip_ctx(p, q, "implies")?;
        let mut fibers = BTreeMap::new();
        for (pt, pf) in &p.fibers {
            let qf = q.fiber(pt)?;
            let size = qf.len().checked_pow(pf.len() as u32).unwrap_or(usize::MAX);
            self.guard("function-set fiber", size)?;
            // All tables: one codomain token per (sorted) domain token.
            let mut tables: Vec<Vec<Token>> = vec![Vec::new()];
            for _ in 0..pf.len() {
                let mut next = Vec::new();
                for t in &tables {
                    for b in qf {
                        let mut t2 = t.clone();
                        t2.push(b.clone());
                        next.push(t2);
                    }
                }
                tables = next;
            }
            let set: BTreeSet<Token> = tables.into_iter().map(Token::Table).collect();
            fibers.insert(pt.clone(), set);
        }
        Ok(SetPred {
            ctx: p.ctx.clone(),
            fibers,
        })
    }

    fn eq(&self, sort: &str) -> Result<SetPred, ModelError> {
        let ctx = CtxObject::new(vec![sort.to_string(), sort.to_string()]);
        let fibers = self
            .points(&ctx)
            .into_iter()
            .map(|pt| {
                let set = if pt[0] == pt[1] {
                    BTreeSet::from([Token::Refl])
                } else {
                    BTreeSet::new()
                };
                (pt, set)
            })
            .collect();
        Ok(SetPred { ctx, fibers })
    }

    fn reindex(&self, t: &TermMorphism, p: &SetPred) -> Result<SetPred, ModelError> {
        if *t.cod() != p.ctx {
            return Err(ModelError::Shape(format!(
                "reindex: morphism into {} applied to predicate over {}",
                t.cod(),
                p.ctx
            )));
        }
        let mut fibers = BTreeMap::new();
        for pt in self.points(t.dom()) {
            let image = self.map_point(t, &pt)?;
            fibers.insert(pt, p.fiber(&image)?.clone());
        }
        Ok(SetPred {
            ctx: t.dom().clone(),
            fibers,
        })
    }

    fn exists_last(&self, p: &SetPred) -> Result<SetPred, ModelError> {
        let base = require_extended(&p.ctx, "exists_last")?;
        let n = self.structure.carrier_size(&p.ctx.sorts()[p.ctx.len() - 1]);
        let mut fibers = BTreeMap::new();
        for pt in self.points(&base) {
            let mut set = BTreeSet::new();
            for b in 0..n {
                let mut ext_pt = pt.clone();
                ext_pt.push(b);
                for tok in p.fiber(&ext_pt)? {
                    set.insert(Token::Choice(b, Box::new(tok.clone())));
                }
            }
            fibers.insert(pt, set);
        }
        Ok(SetPred { ctx: base, fibers })
    }

    fn forall_last(&self, p: &SetPred) -> Result<SetPred, ModelError> {
        let base = require_extended(&p.ctx, "forall_last")?;
        let n = self.structure.carrier_size(&p.ctx.sorts()[p.ctx.len() - 1]);
        let mut fibers = BTreeMap::new();
        for pt in self.points(&base) {
            let mut size: usize = 1;
            let mut parts: Vec<&BTreeSet<Token>> = Vec::new();
            for b in 0..n {
                let mut ext_pt = pt.clone();
                ext_pt.push(b);
                let f = p.fiber(&ext_pt)?;
                size = size.saturating_mul(f.len());
                parts.push(f);
            }
            self.guard("section fiber", size)?;
            let mut combos: Vec<Vec<Token>> = vec![Vec::new()];
            for f in parts {
                let mut next = Vec::new();
                for c in &combos {
                    for tok in f {
                        let mut c2 = c.clone();
                        c2.push(tok.clone());
                        next.push(c2);
                    }
                }
                combos = next;
            }
            let set: BTreeSet<Token> = combos.into_iter().map(Token::Sections).collect();
            fibers.insert(pt, set);
        }
        Ok(SetPred { ctx: base, fibers })
    }

    fn id(&self, p: &SetPred) -> Result<SetMor, ModelError> {
        self.mor_by(p, p, |_, tok| Ok(tok.clone()))
    }

    fn compose(&self, g: &SetMor, f: &SetMor) -> Result<SetMor, ModelError> {
        if f.cod != g.dom {
            return Err(ModelError::Shape(
                "compose: codomain/domain mismatch".into(),
            ));
        }
        self.mor_by(&f.dom, &g.cod, |pt, tok| {
            let mid = f.maps[pt][tok].clone();
            Ok(g.maps[pt][&mid].clone())
        })
    }

    fn reindex_mor(&self, t: &TermMorphism, f: &SetMor) -> Result<SetMor, ModelError> {
        let dom = self.reindex(t, &f.dom)?;
        let cod = self.reindex(t, &f.cod)?;
        self.mor_by(&dom, &cod, |pt, tok| {
            let image = self.map_point(t, pt)?;
            Ok(f.maps[&image][tok].clone())
        })
    }

    fn bang(&self, p: &SetPred) -> Result<SetMor, ModelError> {
        let top = self.top(&p.ctx)?;
        self.mor_by(p, &top, |_, _| Ok(Token::Unit))
    }

    fn absurd(&self, p: &SetPred) -> Result<SetMor, ModelError> {
        let bot = self.bot(&p.ctx)?;
        self.mor_by(&bot, p, |_, _| unreachable!("empty domain"))
    }

    fn proj1(&self, p: &SetPred, q: &SetPred) -> Result<SetMor, ModelError> {
        let pq = self.and(p, q)?;
        self.mor_by(&pq, p, |_, tok| match tok {
            Token::Pair(a, _) => Ok((**a).clone()),
            other => Err(ModelError::Shape(format!("proj1 of non-pair {other}"))),
        })
    }

    fn proj2(&self, p: &SetPred, q: &SetPred) -> Result<SetMor, ModelError> {
        let pq = self.and(p, q)?;
        self.mor_by(&pq, q, |_, tok| match tok {
            Token::Pair(_, b) => Ok((**b).clone()),
            other => Err(ModelError::Shape(format!("proj2 of non-pair {other}"))),
        })
    }

    fn pair(&self, f: &SetMor, g: &SetMor) -> Result<SetMor, ModelError> {
        if f.dom != g.dom {
            return Err(ModelError::Shape("pair: domain mismatch".into()));
        }
        let cod = self.and(&f.cod, &g.cod)?;
        self.mor_by(&f.dom, &cod, |pt, tok| {
            Ok(Token::Pair(
                Box::new(f.maps[pt][tok].clone()),
                Box::new(g.maps[pt][tok].clone()),
            ))
        })
    }

    fn inj1(&self, p: &SetPred, q: &SetPred) -> Result<SetMor, ModelError> {
        let pq = self.or(p, q)?;
        self.mor_by(p, &pq, |_, tok| Ok(Token::Left(Box::new(tok.clone()))))
    }

    fn inj2(&self, p: &SetPred, q: &SetPred) -> Result<SetMor, ModelError> {
        let pq = self.or(p, q)?;
        self.mor_by(q, &pq, |_, tok| Ok(Token::Right(Box::new(tok.clone()))))
    }

    fn case(&self, f: &SetMor, g: &SetMor) -> Result<SetMor, ModelError> {
        if f.cod != g.cod {
            return Err(ModelError::Shape("case: codomain mismatch".into()));
        }
        let dom = self.or(&f.dom, &g.dom)?;
        self.mor_by(&dom, &f.cod, |pt, tok| match tok {
            Token::Left(a) => Ok(f.maps[pt][a].clone()),
            Token::Right(b) => Ok(g.maps[pt][b].clone()),
            other => Err(ModelError::Shape(format!("case of non-tagged {other}"))),
        })
    }

    fn eval_mor(&self, p: &SetPred, q: &SetPred) -> Result<SetMor, ModelError> {
        let imp = self.implies(p, q)?;
        let dom = self.and(&imp, p)?;
        self.mor_by(&dom, q, |pt, tok| match tok {
            Token::Pair(table, arg) => {
                let idx = p
                    .fiber(pt)?
                    .iter()
                    .position(|t| t == &**arg)
                    .ok_or_else(|| {
                        ModelError::Shape("eval: argument not in domain fiber".into())
                    })?;
                match &**table {
                    Token::Table(outs) => Ok(outs[idx].clone()),
                    other => Err(ModelError::Shape(format!("eval of non-table {other}"))),
                }
            }
            other => Err(ModelError::Shape(format!("eval of non-pair {other}"))),
        })
    }

    fn curry(&self, f: &SetMor, p: &SetPred, q: &SetPred) -> Result<SetMor, ModelError> {
        let cod = self.implies(q, &f.cod)?;
        self.mor_by(p, &cod, |pt, tok| {
            let mut outs = Vec::new();
            for y in q.fiber(pt)? {
                let arg = Token::Pair(Box::new(tok.clone()), Box::new(y.clone()));
                outs.push(
                    f.maps
                        .get(pt)
                        .and_then(|m| m.get(&arg))
                        .cloned()
                        .ok_or_else(|| {
                            ModelError::Shape("curry: missing pair in domain".into())
                        })?,
                );
            }
            Ok(Token::Table(outs))
        })
    }

    fn forall_counit(&self, p: &SetPred) -> Result<SetMor, ModelError> {
        let ext = p.ctx.clone();
        let pi = TermMorphism::pi_last(&ext)?;
        let dom = self.reindex(&pi, &self.forall_last(p)?)?;
        self.mor_by(&dom, p, |pt, tok| match tok {
            Token::Sections(v) => Ok(v[pt[pt.len() - 1]].clone()),
            other => Err(ModelError::Shape(format!(
                "forall counit of non-section {other}"
            ))),
        })
    }

    fn lambda(&self, f: &SetMor, s: &SetPred, p: &SetPred) -> Result<SetMor, ModelError> {
        let n = self
            .structure
            .carrier_size(&p.ctx.sorts()[p.ctx.len() - 1]);
        let cod = self.forall_last(p)?;
        self.mor_by(s, &cod, |pt, tok| {
            let mut v = Vec::new();
            for b in 0..n {
                let mut ext_pt = pt.to_vec();
                ext_pt.push(b);
                v.push(
                    f.maps
                        .get(&ext_pt)
                        .and_then(|m| m.get(tok))
                        .cloned()
                        .ok_or_else(|| {
                            ModelError::Shape("lambda: token missing upstairs".into())
                        })?,
                );
            }
            Ok(Token::Sections(v))
        })
    }

    fn exists_unit(&self, p: &SetPred) -> Result<SetMor, ModelError> {
        let ext = p.ctx.clone();
        let pi = TermMorphism::pi_last(&ext)?;
        let cod = self.reindex(&pi, &self.exists_last(p)?)?;
        self.mor_by(p, &cod, |pt, tok| {
            Ok(Token::Choice(pt[pt.len() - 1], Box::new(tok.clone())))
        })
    }

    fn mu(&self, f: &SetMor, p: &SetPred, s: &SetPred) -> Result<SetMor, ModelError> {
        let dom = self.exists_last(p)?;
        self.mor_by(&dom, s, |pt, tok| match tok {
            Token::Choice(b, inner) => {
                let mut ext_pt = pt.to_vec();
                ext_pt.push(*b);
                f.maps
                    .get(&ext_pt)
                    .and_then(|m| m.get(inner))
                    .cloned()
                    .ok_or_else(|| ModelError::Shape("mu: token missing upstairs".into()))
            }
            other => Err(ModelError::Shape(format!("mu of non-choice {other}"))),
        })
    }

    fn refl(&self, sort: &str) -> Result<SetMor, ModelError> {
        let ctx = CtxObject::new(vec![sort.to_string()]);
        let dom = self.top(&ctx)?;
        let diag = TermMorphism::diagonal(sort);
        let cod = self.reindex(&diag, &self.eq(sort)?)?;
        self.mor_by(&dom, &cod, |_, _| Ok(Token::Refl))
    }

    fn xi(&self, f: &SetMor, target: &SetPred) -> Result<SetMor, ModelError> {
        if target.ctx.len() != 2 {
            return Err(ModelError::Shape(
                "xi target must live over a two-slot context".into(),
            ));
        }
        let sort = target.ctx.sorts()[0].clone();
        let dom = self.eq(&sort)?;
        self.mor_by(&dom, target, |pt, tok| match tok {
            // The equality fiber is inhabited only on the diagonal, where the
            // target fiber coincides with f's codomain fiber at (b).
            Token::Refl => f
                .maps
                .get(&pt[..1])
                .and_then(|m| m.get(&Token::Unit))
                .cloned()
                .ok_or_else(|| ModelError::Shape("xi: missing unit image".into())),
            other => Err(ModelError::Shape(format!("xi of non-refl {other}"))),
        })
    }

    fn inhabited(&self, p: &SetPred, point: &[usize]) -> Result<bool, ModelError> {
        Ok(!p.fiber(point)?.is_empty())
    }

    fn pred_equiv(&self, p: &SetPred, q: &SetPred) -> Result<bool, ModelError> {
        self.zip_ctx(p, q, "pred_equiv")?;
        for (pt, pf) in &p.fibers {
            if pf.len() != q.fiber(pt)?.len() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn require_extended(ctx: &CtxObject, what: &str) -> Result<CtxObject, ModelError> {
    if ctx.is_empty() {
        return Err(ModelError::Shape(format!(
            "{what} needs a non-empty context"
        )));
    }
    Ok(ctx.drop_last())
}

/// The proof-set interpretation of a canonical formula — the backend's
/// [`interpret_formula`] exposed directly.
pub fn lauchli(
    sig: &Signature,
    structure: &SetStructure,
    ctx: &CtxObject,
    phi: &Formula,
) -> Result<SetPred, ModelError> {
    let m = SetModel::new(sig, structure);
    interpret_formula(&m, sig, ctx, phi)
}

/// Classical satisfaction, written as a direct recursive evaluator
/// independent of the proof-set semantics. `env` assigns carrier indices to
/// the context's variables; quantifiers range over whole carriers.
pub fn tarski_truth(
    sig: &Signature,
    structure: &SetStructure,
    phi: &Formula,
    ctx: &Context,
    env: &[usize],
) -> Result<bool, ModelError> {
    if env.len() != ctx.len() {
        return Err(ModelError::Shape(format!(
            "environment of length {} for context of length {}",
            env.len(),
            ctx.len()
        )));
    }
    sig.validate_formula(phi)?;
    let mut assignment: BTreeMap<Var, usize> = ctx
        .vars()
        .iter()
        .cloned()
        .zip(env.iter().copied())
        .collect();
    truth_rec(structure, phi, &mut assignment)
}

fn term_value(
    structure: &SetStructure,
    t: &Term,
    env: &BTreeMap<Var, usize>,
) -> Result<usize, ModelError> {
    match t {
        Term::Var(v) => env.get(v).copied().ok_or_else(|| {
            ModelError::Shape(format!("variable `{}` unassigned", v.name))
        }),
        Term::App { symbol, args } => {
            let vals: Result<Vec<usize>, _> = args
                .iter()
                .map(|a| term_value(structure, a, env))
                .collect();
            structure
                .funcs
                .get(symbol)
                .and_then(|t| t.get(&vals.clone().ok()?))
                .copied()
                .ok_or_else(|| {
                    ModelError::Shape(format!("no table row for `{symbol}`"))
                })
        }
    }
}

fn truth_rec(
    structure: &SetStructure,
    phi: &Formula,
    env: &mut BTreeMap<Var, usize>,
) -> Result<bool, ModelError> {
    Ok(match phi {
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Eq(_, s, t) => {
            term_value(structure, s, env)? == term_value(structure, t, env)?
        }
        Formula::And(p, q) => {
            truth_rec(structure, p, env)? && truth_rec(structure, q, env)?
        }
        Formula::Or(p, q) => {
            truth_rec(structure, p, env)? || truth_rec(structure, q, env)?
        }
        Formula::Implies(p, q) => {
            !truth_rec(structure, p, env)? || truth_rec(structure, q, env)?
        }
        Formula::Forall(v, body) => {
            let saved = env.get(v).copied();
            let mut all = true;
            for e in 0..structure.carrier_size(&v.sort) {
                env.insert(v.clone(), e);
                if !truth_rec(structure, body, env)? {
                    all = false;
                    break;
                }
            }
            restore(env, v, saved);
            all
        }
        Formula::Exists(v, body) => {
            let saved = env.get(v).copied();
            let mut any = false;
            for e in 0..structure.carrier_size(&v.sort) {
                env.insert(v.clone(), e);
                if truth_rec(structure, body, env)? {
                    any = true;
                    break;
                }
            }
            restore(env, v, saved);
            any
        }
    })
}

fn restore(env: &mut BTreeMap<Var, usize>, v: &Var, saved: Option<usize>) {
    match saved {
        Some(x) => {
            env.insert(v.clone(), x);
        }
        None => {
            env.remove(v);
        }
    }
}

/// Fiberwise-cardinality comparison of two predicates whose bases are related
/// by per-sort bijections of carrier indices (the observable shadow of a
/// predicate isomorphism over a structure isomorphism).
pub fn iso_check(
    p: &SetPred,
    q: &SetPred,
    bijections: &BTreeMap<String, Vec<usize>>,
) -> Result<bool, ModelError> {
    if p.ctx != q.ctx {
        return Err(ModelError::Shape(format!(
            "iso_check: contexts {} and {} differ",
            p.ctx, q.ctx
        )));
    }
    for (pt, pf) in &p.fibers {
        let image: Result<Vec<usize>, ModelError> = pt
            .iter()
            .zip(p.ctx.sorts())
            .map(|(&i, sort)| {
                bijections
                    .get(sort)
                    .and_then(|b| b.get(i).copied())
                    .ok_or_else(|| {
                        ModelError::Shape(format!(
                            "iso_check: no bijection entry for `{sort}` index {i}"
                        ))
                    })
            })
            .collect();
        if pf.len() != q.fiber(&image?)?.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Total hom-set size between two predicates over one context: the product
/// over base points of (|cod fiber| ^ |dom fiber|). Used to check adjunction
/// cardinalities.
pub fn hom_count(dom: &SetPred, cod: &SetPred) -> Result<u128, ModelError> {
    if dom.ctx != cod.ctx {
        return Err(ModelError::Shape("hom_count: context mismatch".into()));
    }
    let mut total: u128 = 1;
    for (pt, df) in &dom.fibers {
        let c = cod.fiber(pt)?.len() as u128;
        total = total.saturating_mul(c.saturating_pow(df.len() as u32));
    }
    Ok(total)
}

/// Every structure for `sig` with carrier sizes drawn from `sizes_per_sort`
/// (the same size list for each sort) and all possible function tables.
/// Exponential; intended for tiny signatures only.
pub fn all_structures(sig: &Signature, sizes: &[usize]) -> Vec<SetStructure> {
    let sorts = sig.sorts().to_vec();
    let mut size_choices: Vec<BTreeMap<String, usize>> = vec![BTreeMap::new()];
    for sort in &sorts {
        let mut next = Vec::new();
        for choice in &size_choices {
            for &n in sizes {
                let mut c2 = choice.clone();
                c2.insert(sort.clone(), n);
                next.push(c2);
            }
        }
        size_choices = next;
    }
    let mut out = Vec::new();
    for sizes in size_choices {
        // Enumerate all table combinations symbol by symbol.
        let mut partials: Vec<BTreeMap<String, BTreeMap<Vec<usize>, usize>>> =
            vec![BTreeMap::new()];
        for (name, decl) in sig.functions() {
            let arg_sizes: Vec<usize> = decl.arity.iter().map(|s| sizes[s]).collect();
            let rows = crate::gen::all_points(&arg_sizes);
            let out_size = sizes[&decl.codomain];
            if out_size == 0 && !rows.is_empty() {
                // No total function exists unless the domain is empty too.
                if rows.iter().any(|r| r.iter().all(|_| true)) && !rows.is_empty() {
                    // Domain non-empty (it always has at least the empty row
                    // when arity is 0); skip this size assignment for this
                    // symbol unless every argument carrier is empty.
                    let dom_empty = arg_sizes.contains(&0);
                    if !dom_empty {
                        partials.clear();
                        break;
                    }
                }
            }
            let mut tables: Vec<BTreeMap<Vec<usize>, usize>> = vec![BTreeMap::new()];
            for row in &rows {
                let mut next = Vec::new();
                for t in &tables {
                    for v in 0..out_size {
                        let mut t2 = t.clone();
                        t2.insert(row.clone(), v);
                        next.push(t2);
                    }
                }
                tables = next;
                if tables.is_empty() {
                    break;
                }
            }
            let mut next_partials = Vec::new();
            for p in &partials {
                for t in &tables {
                    let mut p2 = p.clone();
                    p2.insert(name.clone(), t.clone());
                    next_partials.push(p2);
                }
            }
            partials = next_partials;
        }
        for funcs in partials {
            let carriers: BTreeMap<String, Vec<String>> = sorts
                .iter()
                .map(|s| {
                    (
                        s.clone(),
                        (0..sizes[s]).map(|i| format!("e{i}")).collect(),
                    )
                })
                .collect();
            if let Ok(st) = SetStructure::new(sig, carriers, funcs) {
                out.push(st);
            }
        }
    }
    out
}
