//! The free finite-product category of terms over a signature.
//!
//! Objects are sort sequences; a morphism `A⃗ → B⃗` is a tuple of terms over
//! the canonical positional context `x1:A1, …, xn:An`, one term per codomain
//! slot. Storing morphisms only in positional form makes "equality up to
//! renaming" plain structural equality. Composition is substitution, chosen
//! products are sequence concatenation, and the projections are the variable
//! terms `x_i`.
//!
//! [`interpret_morphism`] evaluates a term morphism in any category with
//! chosen finite products (the [`FpCategory`] contract), sending projections
//! to projections and each function symbol to its chosen interpretation; this
//! is the freeness functor, and its functor laws are covered by tests.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::{
    canonicalize, subst_formula, subst_term, term_free_vars, Context, Formula, Signature,
    SyntaxError, Term, Var,
};

/// Errors from morphism construction and composition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// An object of the term category: a finite sequence of sort names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CtxObject(pub Vec<String>);

impl CtxObject {
    pub fn new(sorts: Vec<String>) -> Self {
        CtxObject(sorts)
    }

    pub fn empty() -> Self {
        CtxObject(Vec::new())
    }

    pub fn sorts(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The canonical positional context `x1:A1, …, xn:An` for this object.
    pub fn positional_context(&self) -> Context {
        Context::positional(&self.0)
    }

    /// The object with the last sort removed. Panics on the empty object.
    pub fn drop_last(&self) -> CtxObject {
        assert!(!self.is_empty(), "drop_last on empty context object");
        CtxObject(self.0[..self.len() - 1].to_vec())
    }

    /// Concatenation: the chosen product of the two objects.
    pub fn concat(&self, other: &CtxObject) -> CtxObject {
        let mut sorts = self.0.clone();
        sorts.extend(other.0.iter().cloned());
        CtxObject(sorts)
    }
}

impl fmt::Display for CtxObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.join(", "))
    }
}

/// A morphism of the term category, stored canonically: `terms[i]` is the
/// `i`-th component, a term over the positional context of `dom` whose sort is
/// the `i`-th sort of `cod`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermMorphism {
    dom: CtxObject,
    cod: CtxObject,
    terms: Vec<Term>,
}

impl TermMorphism {
    /// Validates sorts and free variables and builds the morphism.
    pub fn new(
        sig: &Signature,
        dom: CtxObject,
        cod: CtxObject,
        terms: Vec<Term>,
    ) -> Result<Self, CatError> {
        if terms.len() != cod.len() {
            return Err(CatError::Shape(format!(
                "{} component terms for codomain of length {}",
                terms.len(),
                cod.len()
            )));
        }
        let ctx = dom.positional_context();
        for (i, (t, want)) in terms.iter().zip(cod.sorts()).enumerate() {
            let got = sig.term_sort(t)?;
            if got != *want {
                return Err(CatError::Syntax(SyntaxError::SortMismatch {
                    place: format!(" in component {}", i + 1),
                    expected: want.clone(),
                    got,
                }));
            }
            for v in term_free_vars(t) {
                if ctx.position(&v).is_none() {
                    return Err(CatError::Syntax(SyntaxError::UnboundVar(v.name)));
                }
            }
        }
        Ok(TermMorphism { dom, cod, terms })
    }

    pub fn dom(&self) -> &CtxObject {
        &self.dom
    }

    pub fn cod(&self) -> &CtxObject {
        &self.cod
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Identity on `obj`: the tuple of all positional variables.
    pub fn identity(obj: &CtxObject) -> Self {
        let terms = obj
            .sorts()
            .iter()
            .enumerate()
            .map(|(i, s)| Term::Var(Var::positional(i + 1, s.clone())))
            .collect();
        TermMorphism {
            dom: obj.clone(),
            cod: obj.clone(),
            terms,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.dom == self.cod && *self == Self::identity(&self.dom)
    }

    /// The `i`-th product projection `A⃗ → ⟨A_i⟩` (1-based), given by `x_i`.
    pub fn projection(obj: &CtxObject, i: usize) -> Result<Self, CatError> {
        if i == 0 || i > obj.len() {
            return Err(CatError::Shape(format!(
                "projection index {i} out of range for {obj}"
            )));
        }
        let sort = obj.sorts()[i - 1].clone();
        Ok(TermMorphism {
            dom: obj.clone(),
            cod: CtxObject(vec![sort.clone()]),
            terms: vec![Term::Var(Var::positional(i, sort))],
        })
    }

    /// The projection `A⃗ → A⃗∖last` dropping the last slot: `⟨x1, …, x_{n-1}⟩`.
    pub fn pi_last(obj: &CtxObject) -> Result<Self, CatError> {
        if obj.is_empty() {
            return Err(CatError::Shape(
                "pi_last needs a non-empty context object".into(),
            ));
        }
        let cod = obj.drop_last();
        let terms = cod
            .sorts()
            .iter()
            .enumerate()
            .map(|(i, s)| Term::Var(Var::positional(i + 1, s.clone())))
            .collect();
        Ok(TermMorphism {
            dom: obj.clone(),
            cod,
            terms,
        })
    }

    /// The diagonal `⟨B⟩ → ⟨B,B⟩`, given by `⟨x1, x1⟩`.
    pub fn diagonal(sort: &str) -> Self {
        let x1 = Term::Var(Var::positional(1, sort.to_string()));
        TermMorphism {
            dom: CtxObject(vec![sort.to_string()]),
            cod: CtxObject(vec![sort.to_string(), sort.to_string()]),
            terms: vec![x1.clone(), x1],
        }
    }

    /// Composition `g ∘ f : A⃗ → C⃗` for `f : A⃗ → B⃗`, `g : B⃗ → C⃗`, by
    /// substituting `f`'s components for `g`'s positional variables.
    pub fn compose(sig: &Signature, g: &Self, f: &Self) -> Result<Self, CatError> {
        if f.cod != g.dom {
            return Err(CatError::Shape(format!(
                "cannot compose: codomain {} does not match domain {}",
                f.cod, g.dom
            )));
        }
        let mut map = BTreeMap::new();
        for (i, (s, t)) in g.dom.sorts().iter().zip(&f.terms).enumerate() {
            map.insert(Var::positional(i + 1, s.clone()), t.clone());
        }
        let terms = g.terms.iter().map(|t| subst_term(t, &map)).collect();
        let _ = sig; // sorts already validated on construction
        Ok(TermMorphism {
            dom: f.dom.clone(),
            cod: g.cod.clone(),
            terms,
        })
    }

    /// Tupling `⟨f1, …, fk⟩ : dom → cod(f1)⋯cod(fk)` of morphisms sharing a
    /// domain. The empty tuple is the unique morphism to the empty object.
    pub fn tuple(dom: &CtxObject, parts: &[TermMorphism]) -> Result<Self, CatError> {
        let mut cod = CtxObject::empty();
        let mut terms = Vec::new();
        for p in parts {
            if p.dom != *dom {
                return Err(CatError::Shape(format!(
                    "tuple component has domain {}, expected {}",
                    p.dom, dom
                )));
            }
            cod = cod.concat(&p.cod);
            terms.extend(p.terms.iter().cloned());
        }
        Ok(TermMorphism {
            dom: dom.clone(),
            cod,
            terms,
        })
    }

    /// `f × id : A⃗ ⧺ E⃗ → B⃗ ⧺ E⃗` for `f : A⃗ → B⃗`: the components of `f`
    /// unchanged, followed by the shifted projections of the extra slots.
    pub fn cross_id(&self, extra: &[String]) -> Self {
        let dom = self.dom.concat(&CtxObject(extra.to_vec()));
        let cod = self.cod.concat(&CtxObject(extra.to_vec()));
        let mut terms = self.terms.clone();
        for (k, s) in extra.iter().enumerate() {
            terms.push(Term::Var(Var::positional(self.dom.len() + k + 1, s.clone())));
        }
        TermMorphism { dom, cod, terms }
    }

    /// `⟨id, t⟩ : A⃗ → A⃗ ⧺ ⟨B⟩` for a term `t` of sort `B` over the
    /// positional context of `A⃗`; instantiates a last-slot binder.
    pub fn extend_with_term(
        sig: &Signature,
        obj: &CtxObject,
        t: Term,
    ) -> Result<Self, CatError> {
        let sort = sig.term_sort(&t)?;
        let ctx = obj.positional_context();
        for v in term_free_vars(&t) {
            if ctx.position(&v).is_none() {
                return Err(CatError::Syntax(SyntaxError::UnboundVar(v.name)));
            }
        }
        let id = Self::identity(obj);
        let mut terms = id.terms;
        terms.push(t);
        Ok(TermMorphism {
            dom: obj.clone(),
            cod: obj.concat(&CtxObject(vec![sort])),
            terms,
        })
    }
}

impl fmt::Display for TermMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "] : {} -> {}", self.dom, self.cod)
    }
}

/// Reindexes a canonical formula along a term morphism: `t*φ = φ[x⃗ := t⃗]`,
/// re-canonicalized over the morphism's domain. This is the split cleavage
/// action on predicate syntax: `reindex_formula(φ, id) = φ` and reindexing
/// along a composite factors through the parts.
pub fn reindex_formula(
    sig: &Signature,
    phi: &Formula,
    t: &TermMorphism,
) -> Result<Formula, CatError> {
    let xs: Vec<Var> = t
        .cod()
        .sorts()
        .iter()
        .enumerate()
        .map(|(i, s)| Var::positional(i + 1, s.clone()))
        .collect();
    let substituted = subst_formula(sig, phi, &xs, t.terms())?;
    Ok(canonicalize(&substituted, &t.dom().positional_context())?)
}

/// A category with chosen finite products, the target contract of the
/// freeness functor. Implementations must make one-fold products trivial:
/// `product([o]) = o`, `projection([o], 1) = identity(o)`, and
/// `tuple(d, [f]) = f`.
pub trait FpCategory {
    type Obj: Clone + PartialEq + fmt::Debug;
    type Mor: Clone + PartialEq + fmt::Debug;

    fn product(&self, parts: &[Self::Obj]) -> Self::Obj;
    fn identity(&self, obj: &Self::Obj) -> Self::Mor;
    /// `g ∘ f`.
    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Self::Mor;
    /// The `i`-th chosen projection out of `product(parts)` (1-based).
    fn projection(&self, parts: &[Self::Obj], i: usize) -> Self::Mor;
    /// `⟨f1, …, fk⟩` out of `dom`; the empty tuple targets the terminal object.
    fn tuple(&self, dom: &Self::Obj, parts: &[Self::Mor]) -> Self::Mor;
}

/// An interpretation of a signature in a finite-product category: a carrier
/// object per sort and a morphism per function symbol (out of the product of
/// its argument carriers).
#[derive(Debug, Clone, PartialEq)]
pub struct BaseInterpretation<O, M> {
    pub sorts: BTreeMap<String, O>,
    pub funcs: BTreeMap<String, M>,
}

impl<O: Clone, M: Clone> BaseInterpretation<O, M> {
    pub fn sort_obj(&self, sort: &str) -> &O {
        self.sorts
            .get(sort)
            .unwrap_or_else(|| panic!("sort `{sort}` not interpreted"))
    }

    pub fn func_mor(&self, symbol: &str) -> &M {
        self.funcs
            .get(symbol)
            .unwrap_or_else(|| panic!("symbol `{symbol}` not interpreted"))
    }

    /// The chosen product of the carriers of a context object.
    pub fn obj<C>(&self, cat: &C, ctx: &CtxObject) -> O
    where
        C: FpCategory<Obj = O, Mor = M>,
    {
        let parts: Vec<O> = ctx.sorts().iter().map(|s| self.sort_obj(s).clone()).collect();
        cat.product(&parts)
    }
}

/// Evaluates a term morphism under an interpretation: positional variables
/// become the chosen projections and each function symbol becomes its chosen
/// morphism; the result is the tuple of the component evaluations.
pub fn interpret_morphism<C: FpCategory>(
    cat: &C,
    interp: &BaseInterpretation<C::Obj, C::Mor>,
    m: &TermMorphism,
) -> C::Mor {
    let dom_parts: Vec<C::Obj> = m
        .dom()
        .sorts()
        .iter()
        .map(|s| interp.sort_obj(s).clone())
        .collect();
    let dom_obj = cat.product(&dom_parts);
    let parts: Vec<C::Mor> = m
        .terms()
        .iter()
        .map(|t| interpret_term(cat, interp, &dom_parts, &dom_obj, t))
        .collect();
    cat.tuple(&dom_obj, &parts)
}

fn interpret_term<C: FpCategory>(
    cat: &C,
    interp: &BaseInterpretation<C::Obj, C::Mor>,
    dom_parts: &[C::Obj],
    dom_obj: &C::Obj,
    t: &Term,
) -> C::Mor {
    match t {
        Term::Var(v) => {
            let i: usize = v.name[1..]
                .parse()
                .expect("canonical positional variable");
            cat.projection(dom_parts, i)
        }
        Term::App { symbol, args } => {
            let arg_mors: Vec<C::Mor> = args
                .iter()
                .map(|a| interpret_term(cat, interp, dom_parts, dom_obj, a))
                .collect();
            let tupled = cat.tuple(dom_obj, &arg_mors);
            cat.compose(interp.func_mor(symbol), &tupled)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::FuncDecl;

    fn sig_ab() -> Signature {
        // Sorts A, B; g : B -> A; f : A, A -> A.
        Signature::new(
            vec!["A".into(), "B".into()],
            vec![
                (
                    "g".into(),
                    FuncDecl {
                        arity: vec!["B".into()],
                        codomain: "A".into(),
                    },
                ),
                (
                    "f".into(),
                    FuncDecl {
                        arity: vec!["A".into(), "A".into()],
                        codomain: "A".into(),
                    },
                ),
            ],
        )
        .unwrap()
    }

    fn obj(sorts: &[&str]) -> CtxObject {
        CtxObject(sorts.iter().map(|s| s.to_string()).collect())
    }

    fn xa(i: usize) -> Term {
        Term::Var(Var::positional(i, "A"))
    }

    #[test]
    fn compose_swaps_arguments() {
        // f(x1,x2) : (A,A) -> (A)  after  swap (x2,x1) : (A,A) -> (A,A)
        let sig = sig_ab();
        let aa = obj(&["A", "A"]);
        let fm = TermMorphism::new(
            &sig,
            aa.clone(),
            obj(&["A"]),
            vec![Term::app("f", vec![xa(1), xa(2)])],
        )
        .unwrap();
        let swap = TermMorphism::new(&sig, aa.clone(), aa.clone(), vec![xa(2), xa(1)]).unwrap();
        let got = TermMorphism::compose(&sig, &fm, &swap).unwrap();
        let want = TermMorphism::new(
            &sig,
            aa,
            obj(&["A"]),
            vec![Term::app("f", vec![xa(2), xa(1)])],
        )
        .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn identity_laws() {
        let sig = sig_ab();
        let ab = obj(&["A", "B"]);
        let t = TermMorphism::new(
            &sig,
            obj(&["B"]),
            ab.clone(),
            vec![
                Term::app("g", vec![Term::Var(Var::positional(1, "B"))]),
                Term::Var(Var::positional(1, "B")),
            ],
        )
        .unwrap();
        let id_dom = TermMorphism::identity(&obj(&["B"]));
        let id_cod = TermMorphism::identity(&ab);
        assert_eq!(TermMorphism::compose(&sig, &t, &id_dom).unwrap(), t);
        assert_eq!(TermMorphism::compose(&sig, &id_cod, &t).unwrap(), t);
    }

    #[test]
    fn compose_projection_with_pair() {
        // x1 : (A,B) -> (A)  after  <g(y1), y1> : (B) -> (A,B)  =  g(y1)
        let sig = sig_ab();
        let proj = TermMorphism::projection(&obj(&["A", "B"]), 1).unwrap();
        let pair = TermMorphism::new(
            &sig,
            obj(&["B"]),
            obj(&["A", "B"]),
            vec![
                Term::app("g", vec![Term::Var(Var::positional(1, "B"))]),
                Term::Var(Var::positional(1, "B")),
            ],
        )
        .unwrap();
        let got = TermMorphism::compose(&sig, &proj, &pair).unwrap();
        let want = TermMorphism::new(
            &sig,
            obj(&["B"]),
            obj(&["A"]),
            vec![Term::app("g", vec![Term::Var(Var::positional(1, "B"))])],
        )
        .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn projection_is_variable() {
        let p = TermMorphism::projection(&obj(&["A", "B"]), 2).unwrap();
        assert_eq!(p.terms(), &[Term::Var(Var::positional(2, "B"))]);
        assert!(TermMorphism::projection(&obj(&["A"]), 2).is_err());
    }

    #[test]
    fn empty_tuple_is_terminal() {
        let t = TermMorphism::tuple(&obj(&["A"]), &[]).unwrap();
        assert_eq!(t.cod(), &CtxObject::empty());
        assert!(t.terms().is_empty());
    }

    #[test]
    fn tuple_beta_law() {
        let sig = sig_ab();
        let aa = obj(&["A", "A"]);
        let swap = TermMorphism::new(&sig, aa.clone(), aa.clone(), vec![xa(2), xa(1)]).unwrap();
        let p1 = TermMorphism::projection(&aa, 1).unwrap();
        let got = TermMorphism::compose(&sig, &p1, &swap).unwrap();
        assert_eq!(got.terms(), &[xa(2)]);
    }

    #[test]
    fn associativity_on_sample() {
        let sig = sig_ab();
        let a = obj(&["A"]);
        let aa = obj(&["A", "A"]);
        let dup = TermMorphism::new(&sig, a.clone(), aa.clone(), vec![xa(1), xa(1)]).unwrap();
        let fm = TermMorphism::new(
            &sig,
            aa.clone(),
            a.clone(),
            vec![Term::app("f", vec![xa(1), xa(2)])],
        )
        .unwrap();
        let lhs = TermMorphism::compose(
            &sig,
            &TermMorphism::compose(&sig, &fm, &dup).unwrap(),
            &fm,
        )
        .unwrap();
        let rhs = TermMorphism::compose(
            &sig,
            &fm,
            &TermMorphism::compose(&sig, &dup, &fm).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn cross_id_and_extend() {
        let sig = sig_ab();
        let t = TermMorphism::new(
            &sig,
            obj(&["B"]),
            obj(&["A"]),
            vec![Term::app("g", vec![Term::Var(Var::positional(1, "B"))])],
        )
        .unwrap();
        let crossed = t.cross_id(&["B".into()]);
        assert_eq!(crossed.dom(), &obj(&["B", "B"]));
        assert_eq!(crossed.cod(), &obj(&["A", "B"]));
        assert_eq!(
            crossed.terms()[1],
            Term::Var(Var::positional(2, "B"))
        );

        let ext = TermMorphism::extend_with_term(
            &sig,
            &obj(&["B"]),
            Term::app("g", vec![Term::Var(Var::positional(1, "B"))]),
        )
        .unwrap();
        assert_eq!(ext.cod(), &obj(&["B", "A"]));
    }

    #[test]
    fn reindex_formula_is_split() {
        let sig = sig_ab();
        let a = obj(&["A"]);
        let aa = obj(&["A", "A"]);
        // Eq over (A,A): x1 = x2
        let eq = Formula::Eq("A".into(), xa(1), xa(2));
        let diag = TermMorphism::diagonal("A");
        let got = reindex_formula(&sig, &eq, &diag).unwrap();
        assert_eq!(got, Formula::Eq("A".into(), xa(1), xa(1)));
        // Identity reindexing is the identity on canonical formulas.
        let id = TermMorphism::identity(&aa);
        assert_eq!(reindex_formula(&sig, &eq, &id).unwrap(), eq);
        // Composite reindexing factors: (ts)* = s* then t*.
        let dup = TermMorphism::new(&sig, a.clone(), aa.clone(), vec![xa(1), xa(1)]).unwrap();
        let swap = TermMorphism::new(&sig, aa.clone(), aa.clone(), vec![xa(2), xa(1)]).unwrap();
        let comp = TermMorphism::compose(&sig, &swap, &dup).unwrap();
        let step = reindex_formula(&sig, &eq, &swap).unwrap();
        let two_steps = reindex_formula(&sig, &step, &dup).unwrap();
        assert_eq!(reindex_formula(&sig, &eq, &comp).unwrap(), two_steps);
    }

    // A tiny finite-set category used as the freeness-functor target: objects
    // are set sizes, morphisms are total function tables on 0..n. Written
    // independently of the set-model backend so it can serve as its oracle.
    struct FinSets;

    #[derive(Debug, Clone, PartialEq)]
    struct SetObj(usize);

    #[derive(Debug, Clone, PartialEq)]
    struct SetFn {
        dom: usize,
        cod: usize,
        table: Vec<usize>,
    }

    impl FpCategory for FinSets {
        type Obj = SetObj;
        type Mor = SetFn;

        fn product(&self, parts: &[SetObj]) -> SetObj {
            SetObj(parts.iter().map(|o| o.0).product())
        }

        fn identity(&self, obj: &SetObj) -> SetFn {
            SetFn {
                dom: obj.0,
                cod: obj.0,
                table: (0..obj.0).collect(),
            }
        }

        fn compose(&self, g: &SetFn, f: &SetFn) -> SetFn {
            assert_eq!(f.cod, g.dom);
            SetFn {
                dom: f.dom,
                cod: g.cod,
                table: f.table.iter().map(|&x| g.table[x]).collect(),
            }
        }

        fn projection(&self, parts: &[SetObj], i: usize) -> SetFn {
            let total: usize = parts.iter().map(|o| o.0).product();
            let after: usize = parts[i..].iter().map(|o| o.0).product();
            let size = parts[i - 1].0;
            let table = (0..total).map(|x| (x / after) % size).collect();
            SetFn {
                dom: total,
                cod: size,
                table,
            }
        }

        fn tuple(&self, dom: &SetObj, parts: &[SetFn]) -> SetFn {
            let cod: usize = parts.iter().map(|p| p.cod).product();
            let table = (0..dom.0)
                .map(|x| {
                    let mut idx = 0;
                    for p in parts {
                        idx = idx * p.cod + p.table[x];
                    }
                    idx
                })
                .collect();
            SetFn {
                dom: dom.0,
                cod,
                table,
            }
        }
    }

    fn bool_interp() -> BaseInterpretation<SetObj, SetFn> {
        // A = {0,1}; g = negation (on sort-B slot reused as A for simplicity);
        // here we use a one-sort view: both A and B map to {0,1}, g = NOT,
        // f = AND.
        BaseInterpretation {
            sorts: BTreeMap::from([
                ("A".to_string(), SetObj(2)),
                ("B".to_string(), SetObj(2)),
            ]),
            funcs: BTreeMap::from([
                (
                    "g".to_string(),
                    SetFn {
                        dom: 2,
                        cod: 2,
                        table: vec![1, 0],
                    },
                ),
                (
                    "f".to_string(),
                    SetFn {
                        dom: 4,
                        cod: 2,
                        // AND over row-major pairs (0,0),(0,1),(1,0),(1,1)
                        table: vec![0, 0, 0, 1],
                    },
                ),
            ]),
        }
    }

    #[test]
    fn interpret_projection_is_projection() {
        let sig = sig_ab();
        let _ = &sig;
        let cat = FinSets;
        let interp = bool_interp();
        let p = TermMorphism::projection(&obj(&["A", "B"]), 2).unwrap();
        let got = interpret_morphism(&cat, &interp, &p);
        assert_eq!(got, cat.projection(&[SetObj(2), SetObj(2)], 2));
    }

    #[test]
    fn interpret_generator_is_chosen_morphism() {
        let cat = FinSets;
        let interp = bool_interp();
        let sig = sig_ab();
        let m = TermMorphism::new(
            &sig,
            obj(&["A", "A"]),
            obj(&["A"]),
            vec![Term::app("f", vec![xa(1), xa(2)])],
        )
        .unwrap();
        let got = interpret_morphism(&cat, &interp, &m);
        assert_eq!(&got, interp.func_mor("f"));
    }

    #[test]
    fn interpret_composite_term_pointwise() {
        // f(g(x1), x1) over A = {0,1}, g = NOT, f = AND: a |-> AND(NOT a, a),
        // which is constantly 0 (checked by enumerating both inputs).
        let cat = FinSets;
        let interp = bool_interp();
        let sig = Signature::new(
            vec!["A".into()],
            vec![
                (
                    "g".into(),
                    FuncDecl {
                        arity: vec!["A".into()],
                        codomain: "A".into(),
                    },
                ),
                (
                    "f".into(),
                    FuncDecl {
                        arity: vec!["A".into(), "A".into()],
                        codomain: "A".into(),
                    },
                ),
            ],
        )
        .unwrap();
        let m = TermMorphism::new(
            &sig,
            obj(&["A"]),
            obj(&["A"]),
            vec![Term::app(
                "f",
                vec![Term::app("g", vec![xa(1)]), xa(1)],
            )],
        )
        .unwrap();
        let got = interpret_morphism(&cat, &interp, &m);
        assert_eq!(
            got,
            SetFn {
                dom: 2,
                cod: 2,
                table: vec![0, 0]
            }
        );
    }

    #[test]
    fn interpretation_is_functorial_on_samples() {
        let cat = FinSets;
        let interp = bool_interp();
        let sig = sig_ab();
        let aa = obj(&["A", "A"]);
        let swap = TermMorphism::new(&sig, aa.clone(), aa.clone(), vec![xa(2), xa(1)]).unwrap();
        let fm = TermMorphism::new(
            &sig,
            aa.clone(),
            obj(&["A"]),
            vec![Term::app("f", vec![xa(1), xa(2)])],
        )
        .unwrap();
        let comp = TermMorphism::compose(&sig, &fm, &swap).unwrap();
        let lhs = interpret_morphism(&cat, &interp, &comp);
        let rhs = cat.compose(
            &interpret_morphism(&cat, &interp, &fm),
            &interpret_morphism(&cat, &interp, &swap),
        );
        assert_eq!(lhs, rhs);
        let id = TermMorphism::identity(&aa);
        assert_eq!(
            interpret_morphism(&cat, &interp, &id),
            cat.identity(&cat.product(&[SetObj(2), SetObj(2)]))
        );
    }
}
