//! Deduction terms: the proof language of the predicate fibration over the
//! term category.
//!
//! A [`Deduction`] denotes a morphism between canonical formulas in a common
//! context; [`typecheck`] computes its unique [`Sequent`]. The constructor set
//! is deliberately small — identities, composition, reindexing along a term
//! morphism, finite products and coproducts, exponentials, the unit/counit
//! pair for each quantifier (binding the last context slot only), and the
//! reflexivity/elimination pair for equality. Everything else (weakening,
//! exchange, the familiar natural-deduction rules) is derived in
//! [`derived`] by expansion into this core.
//!
//! Equality of deductions is not decided syntactically; the equational theory
//! is exercised semantically through [`relations`], whose instance pairs are
//! checked for equal evaluations by the model backends.

pub mod relations;

use std::fmt;

use thiserror::Error;

use crate::syntax::{
    close_binder, is_canonical, Formula, Quantifier, Signature, SyntaxError,
};
use crate::term_cat::{reindex_formula, CatError, CtxObject, TermMorphism};

/// Errors from deduction typechecking.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("type error at {node}: expected {expected}, got {got}")]
    Mismatch {
        node: &'static str,
        expected: String,
        got: String,
    },
    #[error("type error at {node}: {msg}")]
    Malformed { node: &'static str, msg: String },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Cat(#[from] CatError),
}

/// A proof term. Leaves carry their context and component formulas (stored
/// canonically); composite nodes infer both from their children. `g ∘ f` is
/// written `Comp(g, f)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Deduction {
    /// `1_P : P → P`.
    Id { ctx: CtxObject, p: Formula },
    /// `g ∘ f : P → R` from `f : P → Q` and `g : Q → R`.
    Comp(Box<Deduction>, Box<Deduction>),
    /// `t*f : t*P → t*Q` over `dom(t)` from `f : P → Q` over `cod(t)`.
    Reindex(TermMorphism, Box<Deduction>),
    /// `!_P : P → ⊤`.
    Bang { ctx: CtxObject, p: Formula },
    /// `ex_P : ⊥ → P`.
    Absurd { ctx: CtxObject, p: Formula },
    /// `π : P∧Q → P`.
    Proj1 { ctx: CtxObject, p: Formula, q: Formula },
    /// `π′ : P∧Q → Q`.
    Proj2 { ctx: CtxObject, p: Formula, q: Formula },
    /// `⟨f, g⟩ : P → Q∧R` from `f : P → Q` and `g : P → R`.
    Pair(Box<Deduction>, Box<Deduction>),
    /// `κ : P → P∨Q`.
    Inj1 { ctx: CtxObject, p: Formula, q: Formula },
    /// `κ′ : Q → P∨Q`.
    Inj2 { ctx: CtxObject, p: Formula, q: Formula },
    /// `[f, g] : P∨Q → R` from `f : P → R` and `g : Q → R`.
    Case(Box<Deduction>, Box<Deduction>),
    /// `ε : (P⇒Q)∧P → Q`.
    Eval { ctx: CtxObject, p: Formula, q: Formula },
    /// `f~ : P → (Q⇒R)` from `f : P∧Q → R` (the premise must be a literal
    /// conjunction).
    Curry(Box<Deduction>),
    /// `ε∀ : π*∀P → P` over the extended context `ctx`; `∀` closes the last
    /// slot and `π*` is weakening, so the premise is `∀P` verbatim.
    ForallCounit { ctx: CtxObject, p: Formula },
    /// `λf : S → ∀P` over `ctx∖last` from `f : π*S → P` over `ctx` (the
    /// premise of `f` must not mention the last context slot).
    Lambda(Box<Deduction>),
    /// `η∃ : P → π*∃P` over the extended context `ctx`.
    ExistsUnit { ctx: CtxObject, p: Formula },
    /// `μf : ∃P → S` over `ctx∖last` from `f : P → π*S` over `ctx` (the
    /// conclusion of `f` must not mention the last context slot).
    Mu(Box<Deduction>),
    /// `r : ⊤ → Δ*Eq` over `(B)`, the reflexivity witness `x1 = x1`.
    Refl(String),
    /// `ξf : Eq → T` over `(B, B)` from `f : ⊤ → Δ*T` over `(B)`. The target
    /// `T` is explicit because `Δ*` is not injective on formulas.
    Xi(Box<Deduction>, Formula),
}

/// The type of a deduction: premise and conclusion in a common context, all
/// formulas canonical over the context's positional variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequent {
    pub context: CtxObject,
    pub premise: Formula,
    pub conclusion: Formula,
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} : {} |- {}",
            self.context, self.premise, self.conclusion
        )
    }
}

impl Deduction {
    /// Constructor name, for error messages and reports.
    pub fn node_name(&self) -> &'static str {
        match self {
            Deduction::Id { .. } => "id",
            Deduction::Comp(..) => "comp",
            Deduction::Reindex(..) => "reindex",
            Deduction::Bang { .. } => "bang",
            Deduction::Absurd { .. } => "absurd",
            Deduction::Proj1 { .. } => "proj1",
            Deduction::Proj2 { .. } => "proj2",
            Deduction::Pair(..) => "pair",
            Deduction::Inj1 { .. } => "inj1",
            Deduction::Inj2 { .. } => "inj2",
            Deduction::Case(..) => "case",
            Deduction::Eval { .. } => "eval",
            Deduction::Curry(..) => "curry",
            Deduction::ForallCounit { .. } => "forall_counit",
            Deduction::Lambda(..) => "lambda",
            Deduction::ExistsUnit { .. } => "exists_unit",
            Deduction::Mu(..) => "mu",
            Deduction::Refl(..) => "refl",
            Deduction::Xi(..) => "xi",
        }
    }

    /// Number of constructor nodes, a rough size measure for generators.
    pub fn size(&self) -> usize {
        match self {
            Deduction::Comp(a, b) | Deduction::Pair(a, b) | Deduction::Case(a, b) => {
                1 + a.size() + b.size()
            }
            Deduction::Reindex(_, f)
            | Deduction::Curry(f)
            | Deduction::Lambda(f)
            | Deduction::Mu(f)
            | Deduction::Xi(f, _) => 1 + f.size(),
            _ => 1,
        }
    }
}

fn check_formula(
    sig: &Signature,
    node: &'static str,
    ctx: &CtxObject,
    phi: &Formula,
) -> Result<(), ProofError> {
    sig.validate_formula(phi)?;
    if !is_canonical(phi, ctx.sorts()) {
        return Err(ProofError::Malformed {
            node,
            msg: format!("formula `{phi}` is not canonical over {ctx}"),
        });
    }
    Ok(())
}

fn require_nonempty(node: &'static str, ctx: &CtxObject) -> Result<(), ProofError> {
    if ctx.is_empty() {
        return Err(ProofError::Malformed {
            node,
            msg: "context must be non-empty to bind its last slot".into(),
        });
    }
    Ok(())
}

fn same_context(
    node: &'static str,
    a: &Sequent,
    b: &Sequent,
) -> Result<(), ProofError> {
    if a.context != b.context {
        return Err(ProofError::Mismatch {
            node,
            expected: a.context.to_string(),
            got: b.context.to_string(),
        });
    }
    Ok(())
}

/// Computes the unique sequent of a deduction, or a type error naming the
/// offending node with the expected and actual formulas.
pub fn typecheck(sig: &Signature, d: &Deduction) -> Result<Sequent, ProofError> {
    match d {
        Deduction::Id { ctx, p } => {
            check_formula(sig, "id", ctx, p)?;
            Ok(Sequent {
                context: ctx.clone(),
                premise: p.clone(),
                conclusion: p.clone(),
            })
        }
        Deduction::Comp(g, f) => {
            let sf = typecheck(sig, f)?;
            let sg = typecheck(sig, g)?;
            same_context("comp", &sf, &sg)?;
            if sf.conclusion != sg.premise {
                return Err(ProofError::Mismatch {
                    node: "comp",
                    expected: sg.premise.to_string(),
                    got: sf.conclusion.to_string(),
                });
            }
            Ok(Sequent {
                context: sf.context,
                premise: sf.premise,
                conclusion: sg.conclusion,
            })
        }
        Deduction::Reindex(t, f) => {
            let sf = typecheck(sig, f)?;
            if *t.cod() != sf.context {
                return Err(ProofError::Mismatch {
                    node: "reindex",
                    expected: sf.context.to_string(),
                    got: t.cod().to_string(),
                });
            }
            Ok(Sequent {
                context: t.dom().clone(),
                premise: reindex_formula(sig, &sf.premise, t)?,
                conclusion: reindex_formula(sig, &sf.conclusion, t)?,
            })
        }
        Deduction::Bang { ctx, p } => {
            check_formula(sig, "bang", ctx, p)?;
            Ok(Sequent {
                context: ctx.clone(),
                premise: p.clone(),
                conclusion: Formula::Top,
            })
        }
        Deduction::Absurd { ctx, p } => {
            check_formula(sig, "absurd", ctx, p)?;
            Ok(Sequent {
                context: ctx.clone(),
                premise: Formula::Bot,
                conclusion: p.clone(),
            })
        }
        Deduction::Proj1 { ctx, p, q } => {
            check_formula(sig, "proj1", ctx, p)?;
            check_formula(sig, "proj1", ctx, q)?;
            Ok(Sequent {
                context: ctx.clone(),
                premise: Formula::and(p.clone(), q.clone()),
                conclusion: p.clone(),
            })
        }
        Deduction::Proj2 { ctx, p, q } => {
            check_formula(sig, "proj2", ctx, p)?;
            check_formula(sig, "proj2", ctx, q)?;
            Ok(Sequent {
                context: ctx.clone(),
                premise: Formula::and(p.clone(), q.clone()),
                conclusion: q.clone(),
            })
        }
        Deduction::Pair(f, g) => {
            let sf = typecheck(sig, f)?;
            let sg = typecheck(sig, g)?;
            same_context("pair", &sf, &sg)?;
            if sf.premise != sg.premise {
                return Err(ProofError::Mismatch {
                    node: "pair",
                    expected: sf.premise.to_string(),
                    got: sg.premise.to_string(),
                });
            }
            Ok(Sequent {
                context: sf.context,
                premise: sf.premise,
                conclusion: Formula::and(sf.conclusion, sg.conclusion),
            })
        }
        Deduction::Inj1 { ctx, p, q } => {
            check_formula(sig, "inj1", ctx, p)?;
            check_formula(sig, "inj1", ctx, q)?;
            Ok(Sequent {
                context: ctx.clone(),
                premise: p.clone(),
                conclusion: Formula::or(p.clone(), q.clone()),
            })
        }
        Deduction::Inj2 { ctx, p, q } => {
            check_formula(sig, "inj2", ctx, p)?;
            check_formula(sig, "inj2", ctx, q)?;
            Ok(Sequent {
                context: ctx.clone(),
                premise: q.clone(),
                conclusion: Formula::or(p.clone(), q.clone()),
            })
        }
        Deduction::Case(f, g) => {
            let sf = typecheck(sig, f)?;
            let sg = typecheck(sig, g)?;
            same_context("case", &sf, &sg)?;
            if sf.conclusion != sg.conclusion {
                return Err(ProofError::Mismatch {
                    node: "case",
                    expected: sf.conclusion.to_string(),
                    got: sg.conclusion.to_string(),
                });
            }
            Ok(Sequent {
                context: sf.context,
                premise: Formula::or(sf.premise, sg.premise),
                conclusion: sf.conclusion,
            })
        }
        Deduction::Eval { ctx, p, q } => {
            check_formula(sig, "eval", ctx, p)?;
            check_formula(sig, "eval", ctx, q)?;
            Ok(Sequent {
                context: ctx.clone(),
                premise: Formula::and(
                    Formula::implies(p.clone(), q.clone()),
                    p.clone(),
                ),
                conclusion: q.clone(),
            })
        }
        Deduction::Curry(f) => {
            let sf = typecheck(sig, f)?;
            let (p, q) = match &sf.premise {
                Formula::And(p, q) => ((**p).clone(), (**q).clone()),
                other => {
                    return Err(ProofError::Mismatch {
                        node: "curry",
                        expected: "a conjunction premise".into(),
                        got: other.to_string(),
                    })
                }
            };
            Ok(Sequent {
                context: sf.context,
                premise: p,
                conclusion: Formula::implies(q, sf.conclusion),
            })
        }
        Deduction::ForallCounit { ctx, p } => {
            require_nonempty("forall_counit", ctx)?;
            check_formula(sig, "forall_counit", ctx, p)?;
            let closed = close_binder(Quantifier::Forall, p, ctx.sorts())?;
            Ok(Sequent {
                context: ctx.clone(),
                premise: closed,
                conclusion: p.clone(),
            })
        }
        Deduction::Lambda(f) => {
            let sf = typecheck(sig, f)?;
            require_nonempty("lambda", &sf.context)?;
            let n = sf.context.len();
            if !is_canonical(&sf.premise, &sf.context.sorts()[..n - 1]) {
                return Err(ProofError::Mismatch {
                    node: "lambda",
                    expected: "a premise not mentioning the last context slot".into(),
                    got: sf.premise.to_string(),
                });
            }
            let closed = close_binder(Quantifier::Forall, &sf.conclusion, sf.context.sorts())?;
            Ok(Sequent {
                context: sf.context.drop_last(),
                premise: sf.premise,
                conclusion: closed,
            })
        }
        Deduction::ExistsUnit { ctx, p } => {
            require_nonempty("exists_unit", ctx)?;
            check_formula(sig, "exists_unit", ctx, p)?;
            let closed = close_binder(Quantifier::Exists, p, ctx.sorts())?;
            Ok(Sequent {
                context: ctx.clone(),
                premise: p.clone(),
                conclusion: closed,
            })
        }
        Deduction::Mu(f) => {
            let sf = typecheck(sig, f)?;
            require_nonempty("mu", &sf.context)?;
            let n = sf.context.len();
            if !is_canonical(&sf.conclusion, &sf.context.sorts()[..n - 1]) {
                return Err(ProofError::Mismatch {
                    node: "mu",
                    expected: "a conclusion not mentioning the last context slot".into(),
                    got: sf.conclusion.to_string(),
                });
            }
            let closed = close_binder(Quantifier::Exists, &sf.premise, sf.context.sorts())?;
            Ok(Sequent {
                context: sf.context.drop_last(),
                premise: closed,
                conclusion: sf.conclusion,
            })
        }
        Deduction::Refl(sort) => {
            if !sig.has_sort(sort) {
                return Err(ProofError::Syntax(SyntaxError::UnknownSort(sort.clone())));
            }
            let ctx = CtxObject::new(vec![sort.clone()]);
            let x1 = crate::syntax::Term::Var(crate::syntax::Var::positional(1, sort.clone()));
            Ok(Sequent {
                context: ctx,
                premise: Formula::Top,
                conclusion: Formula::Eq(sort.clone(), x1.clone(), x1),
            })
        }
        Deduction::Xi(f, target) => {
            let sf = typecheck(sig, f)?;
            if sf.context.len() != 1 {
                return Err(ProofError::Malformed {
                    node: "xi",
                    msg: format!(
                        "inner deduction must live over a one-sort context, got {}",
                        sf.context
                    ),
                });
            }
            if sf.premise != Formula::Top {
                return Err(ProofError::Mismatch {
                    node: "xi",
                    expected: "T".into(),
                    got: sf.premise.to_string(),
                });
            }
            let sort = sf.context.sorts()[0].clone();
            let ctx2 = CtxObject::new(vec![sort.clone(), sort.clone()]);
            check_formula(sig, "xi", &ctx2, target)?;
            let diag = TermMorphism::diagonal(&sort);
            let pulled = reindex_formula(sig, target, &diag)?;
            if pulled != sf.conclusion {
                return Err(ProofError::Mismatch {
                    node: "xi",
                    expected: pulled.to_string(),
                    got: sf.conclusion.to_string(),
                });
            }
            let x1 = crate::syntax::Term::Var(crate::syntax::Var::positional(1, sort.clone()));
            let x2 = crate::syntax::Term::Var(crate::syntax::Var::positional(2, sort.clone()));
            Ok(Sequent {
                context: ctx2,
                premise: Formula::Eq(sort, x1, x2),
                conclusion: target.clone(),
            })
        }
    }
}

/// Derived proof-term builders: each expands into the core constructors, so
/// nothing here enlarges the trusted typechecker.
pub mod derived {
    use super::*;
    use crate::syntax::Term;

    /// Weakening: reinterprets `d` over its context extended by one sort, by
    /// reindexing along the projection that drops the new slot.
    pub fn weaken_last(
        sig: &Signature,
        d: Deduction,
        sort: &str,
    ) -> Result<Deduction, ProofError> {
        let s = typecheck(sig, &d)?;
        let ext = s.context.concat(&CtxObject::new(vec![sort.to_string()]));
        let pi = TermMorphism::pi_last(&ext)?;
        Ok(Deduction::Reindex(pi, Box::new(d)))
    }

    /// Exchange: reindexes `d` along the permutation sending slot `i` of the
    /// result context to slot `perm[i]` of `d`'s context.
    pub fn exchange(
        sig: &Signature,
        d: Deduction,
        perm: &[usize],
    ) -> Result<Deduction, ProofError> {
        let s = typecheck(sig, &d)?;
        if perm.len() != s.context.len() {
            return Err(ProofError::Malformed {
                node: "exchange",
                msg: format!(
                    "permutation of length {} for context {}",
                    perm.len(),
                    s.context
                ),
            });
        }
        let sorts = s.context.sorts();
        let dom_sorts: Vec<String> = perm.iter().map(|&j| sorts[j - 1].clone()).collect();
        // dom slot i carries what was cod slot perm[i]; the morphism's k-th
        // component must pick, for cod slot k, the dom slot holding it.
        let dom = CtxObject::new(dom_sorts);
        let mut terms = vec![Term::Var(crate::syntax::Var::positional(1, "?")); sorts.len()];
        for (i, &j) in perm.iter().enumerate() {
            terms[j - 1] = Term::Var(crate::syntax::Var::positional(i + 1, sorts[j - 1].clone()));
        }
        let t = TermMorphism::new(sig, dom, s.context.clone(), terms)?;
        Ok(Deduction::Reindex(t, Box::new(d)))
    }

    /// Modus ponens: from `f : S → (P⇒Q)` and `g : S → P`, the composite
    /// `ε ∘ ⟨f, g⟩ : S → Q`.
    pub fn modus_ponens(
        sig: &Signature,
        f: Deduction,
        g: Deduction,
    ) -> Result<Deduction, ProofError> {
        let sf = typecheck(sig, &f)?;
        let (p, q) = match &sf.conclusion {
            Formula::Implies(p, q) => ((**p).clone(), (**q).clone()),
            other => {
                return Err(ProofError::Mismatch {
                    node: "modus_ponens",
                    expected: "an implication conclusion".into(),
                    got: other.to_string(),
                })
            }
        };
        let eval = Deduction::Eval {
            ctx: sf.context,
            p,
            q,
        };
        Ok(Deduction::Comp(
            Box::new(eval),
            Box::new(Deduction::Pair(Box::new(f), Box::new(g))),
        ))
    }

    /// Universal elimination: from `d : S → ∀P` over `E⃗` and a term `t` over
    /// `E⃗`, the composite `⟨id,t⟩*(ε∀) ∘ d : S → P[last := t]`.
    pub fn forall_elim(
        sig: &Signature,
        d: Deduction,
        t: Term,
    ) -> Result<Deduction, ProofError> {
        let s = typecheck(sig, &d)?;
        let opened = crate::syntax::open_binder(&s.conclusion, s.context.sorts());
        let (ext_sorts, body) = match (&s.conclusion, opened) {
            (Formula::Forall(..), Some(pair)) => pair,
            _ => {
                return Err(ProofError::Mismatch {
                    node: "forall_elim",
                    expected: "a universally quantified conclusion".into(),
                    got: s.conclusion.to_string(),
                })
            }
        };
        let counit = Deduction::ForallCounit {
            ctx: CtxObject::new(ext_sorts),
            p: body,
        };
        let inst = TermMorphism::extend_with_term(sig, &s.context, t)?;
        Ok(Deduction::Comp(
            Box::new(Deduction::Reindex(inst, Box::new(counit))),
            Box::new(d),
        ))
    }

    /// Existential introduction: for `p` canonical over `E⃗ ⧺ ⟨B⟩` and a term
    /// `t` of sort `B` over `E⃗`, the reindexed unit `⟨id,t⟩*(η∃) : P[last :=
    /// t] → ∃P`.
    pub fn exists_intro(
        sig: &Signature,
        ctx: &CtxObject,
        p: Formula,
        t: Term,
    ) -> Result<Deduction, ProofError> {
        let sort = sig.term_sort(&t)?;
        let ext = ctx.concat(&CtxObject::new(vec![sort]));
        let unit = Deduction::ExistsUnit { ctx: ext, p };
        let inst = TermMorphism::extend_with_term(sig, ctx, t)?;
        Ok(Deduction::Reindex(inst, Box::new(unit)))
    }

    /// Implication introduction under a premise: from `f : S∧P → Q`, the
    /// curried `f~ : S → (P⇒Q)`.
    pub fn implies_intro(f: Deduction) -> Deduction {
        Deduction::Curry(Box::new(f))
    }

    /// Equality elimination, Leibniz style: from a target `T` over `(B,B)`
    /// and a proof `f : ⊤ → Δ*T` over `(B)`, the deduction `ξf : Eq → T`.
    pub fn eq_elim(f: Deduction, target: Formula) -> Deduction {
        Deduction::Xi(Box::new(f), target)
    }

    /// The conjunction of two parallel-acting deductions: for `x : P → P′`
    /// and `y : Q → Q′` over one context, `⟨x∘π, y∘π′⟩ : P∧Q → P′∧Q′`.
    pub fn par_and(
        sig: &Signature,
        x: Deduction,
        y: Deduction,
    ) -> Result<Deduction, ProofError> {
        let sx = typecheck(sig, &x)?;
        let sy = typecheck(sig, &y)?;
        same_context("par_and", &sx, &sy)?;
        let proj1 = Deduction::Proj1 {
            ctx: sx.context.clone(),
            p: sx.premise.clone(),
            q: sy.premise.clone(),
        };
        let proj2 = Deduction::Proj2 {
            ctx: sx.context.clone(),
            p: sx.premise.clone(),
            q: sy.premise.clone(),
        };
        Ok(Deduction::Pair(
            Box::new(Deduction::Comp(Box::new(x), Box::new(proj1))),
            Box::new(Deduction::Comp(Box::new(y), Box::new(proj2))),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{canonicalize, parse_formula, FuncDecl, Term, Var};

    /// Parses and canonicalizes over the positional context of `c`.
    fn pf(sig: &Signature, text: &str, c: &CtxObject) -> Formula {
        let ctx = c.positional_context();
        canonicalize(&parse_formula(text, sig, &ctx).unwrap(), &ctx).unwrap()
    }

    fn sig1() -> Signature {
        Signature::new(
            vec!["A".into()],
            vec![
                (
                    "c".into(),
                    FuncDecl {
                        arity: vec![],
                        codomain: "A".into(),
                    },
                ),
                (
                    "f".into(),
                    FuncDecl {
                        arity: vec!["A".into()],
                        codomain: "A".into(),
                    },
                ),
            ],
        )
        .unwrap()
    }

    fn ctx(sorts: &[&str]) -> CtxObject {
        CtxObject::new(sorts.iter().map(|s| s.to_string()).collect())
    }

    fn xa(i: usize) -> Term {
        Term::Var(Var::positional(i, "A"))
    }

    fn eqf(i: usize, j: usize) -> Formula {
        Formula::Eq("A".into(), xa(i), xa(j))
    }

    #[test]
    fn proj1_sequent() {
        let sig = sig1();
        let d = Deduction::Proj1 {
            ctx: ctx(&["A"]),
            p: eqf(1, 1),
            q: Formula::Top,
        };
        let s = typecheck(&sig, &d).unwrap();
        assert_eq!(s.premise, Formula::and(eqf(1, 1), Formula::Top));
        assert_eq!(s.conclusion, eqf(1, 1));
    }

    #[test]
    fn lambda_closes_last_slot() {
        // f = id on (x1 = x2) over (A, A); premise mentions the last slot, so
        // lambda must be rejected; with a weakened premise it must close the
        // conclusion over the last slot.
        let sig = sig1();
        let e2 = ctx(&["A", "A"]);
        let bad = Deduction::Lambda(Box::new(Deduction::Id {
            ctx: e2.clone(),
            p: eqf(1, 2),
        }));
        assert!(typecheck(&sig, &bad).is_err());

        let f = Deduction::Bang {
            ctx: e2.clone(),
            p: eqf(1, 1),
        };
        let lam = Deduction::Lambda(Box::new(f));
        let s = typecheck(&sig, &lam).unwrap();
        assert_eq!(s.context, ctx(&["A"]));
        assert_eq!(s.premise, eqf(1, 1));
        assert_eq!(
            s.conclusion,
            pf(&sig, "forall y. T", &s.context)
        );
    }

    #[test]
    fn forall_counit_premise_is_closed_formula() {
        let sig = sig1();
        let d = Deduction::ForallCounit {
            ctx: ctx(&["A", "A"]),
            p: eqf(1, 2),
        };
        let s = typecheck(&sig, &d).unwrap();
        let ctx1 = ctx(&["A"]);
        assert_eq!(
            s.premise,
            pf(&sig, "forall y. x1 = y", &ctx1)
        );
        assert_eq!(s.conclusion, eqf(1, 2));
    }

    #[test]
    fn exists_unit_and_mu() {
        let sig = sig1();
        let e2 = ctx(&["A", "A"]);
        let unit = Deduction::ExistsUnit {
            ctx: e2.clone(),
            p: eqf(1, 2),
        };
        let s = typecheck(&sig, &unit).unwrap();
        assert_eq!(
            s.conclusion,
            pf(&sig, "exists y. x1 = y", &ctx(&["A"]))
        );
        // mu of a bang: from (x1=x2) -> T over (A,A), get exists y.(x1=y) -> T.
        let mu = Deduction::Mu(Box::new(Deduction::Bang {
            ctx: e2,
            p: eqf(1, 2),
        }));
        let sm = typecheck(&sig, &mu).unwrap();
        assert_eq!(sm.context, ctx(&["A"]));
        assert_eq!(sm.conclusion, Formula::Top);
    }

    #[test]
    fn refl_and_xi() {
        let sig = sig1();
        let r = Deduction::Refl("A".into());
        let s = typecheck(&sig, &r).unwrap();
        assert_eq!(s.premise, Formula::Top);
        assert_eq!(s.conclusion, eqf(1, 1));

        // Symmetry of equality: target T = (x2 = x1) over (A,A); the inner
        // proof must land in Delta*T = (x1 = x1).
        let sym = Deduction::Xi(Box::new(r.clone()), eqf(2, 1));
        let ss = typecheck(&sig, &sym).unwrap();
        assert_eq!(ss.premise, eqf(1, 2));
        assert_eq!(ss.conclusion, eqf(2, 1));

        // Mismatched target: Delta*(x2 = f(x1)) = (x1 = f(x1)) != (x1 = x1).
        let bad = Deduction::Xi(
            Box::new(r),
            Formula::Eq("A".into(), xa(2), Term::app("f", vec![xa(1)])),
        );
        assert!(matches!(
            typecheck(&sig, &bad),
            Err(ProofError::Mismatch { node: "xi", .. })
        ));
    }

    #[test]
    fn xi_rejects_non_top_premise() {
        let sig = sig1();
        let inner = Deduction::Id {
            ctx: ctx(&["A"]),
            p: eqf(1, 1),
        };
        let bad = Deduction::Xi(Box::new(inner), eqf(1, 2));
        assert!(matches!(
            typecheck(&sig, &bad),
            Err(ProofError::Mismatch { node: "xi", .. })
        ));
    }

    #[test]
    fn reindex_computes_by_substitution() {
        let sig = sig1();
        // d = proj1 on (x1=x2) ∧ T over (A,A); reindex along the diagonal.
        let d = Deduction::Proj1 {
            ctx: ctx(&["A", "A"]),
            p: eqf(1, 2),
            q: Formula::Top,
        };
        let diag = TermMorphism::diagonal("A");
        let s = typecheck(&sig, &Deduction::Reindex(diag, Box::new(d))).unwrap();
        assert_eq!(s.context, ctx(&["A"]));
        assert_eq!(s.premise, Formula::and(eqf(1, 1), Formula::Top));
        assert_eq!(s.conclusion, eqf(1, 1));
    }

    #[test]
    fn reindex_stable_under_composition() {
        let sig = sig1();
        let aa = ctx(&["A", "A"]);
        let d = Deduction::Proj1 {
            ctx: aa.clone(),
            p: eqf(1, 2),
            q: eqf(2, 2),
        };
        let swap =
            TermMorphism::new(&sig, aa.clone(), aa.clone(), vec![xa(2), xa(1)]).unwrap();
        let dup = TermMorphism::new(
            &sig,
            ctx(&["A"]),
            aa.clone(),
            vec![xa(1), xa(1)],
        )
        .unwrap();
        let two_step = Deduction::Reindex(
            dup.clone(),
            Box::new(Deduction::Reindex(swap.clone(), Box::new(d.clone()))),
        );
        let composite = TermMorphism::compose(&sig, &swap, &dup).unwrap();
        let one_step = Deduction::Reindex(composite, Box::new(d));
        assert_eq!(
            typecheck(&sig, &two_step).unwrap(),
            typecheck(&sig, &one_step).unwrap()
        );
    }

    #[test]
    fn comp_mismatch_reports_formulas() {
        let sig = sig1();
        let a = ctx(&["A"]);
        let f = Deduction::Bang {
            ctx: a.clone(),
            p: eqf(1, 1),
        };
        let g = Deduction::Id {
            ctx: a,
            p: Formula::Bot,
        };
        let err = typecheck(&sig, &Deduction::Comp(Box::new(g), Box::new(f))).unwrap_err();
        match err {
            ProofError::Mismatch { node, expected, got } => {
                assert_eq!(node, "comp");
                assert_eq!(expected, "F");
                assert_eq!(got, "T");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn curry_needs_conjunction() {
        let sig = sig1();
        let f = Deduction::Id {
            ctx: ctx(&["A"]),
            p: Formula::Top,
        };
        assert!(typecheck(&sig, &Deduction::Curry(Box::new(f))).is_err());
    }

    #[test]
    fn derived_forall_elim_instantiates() {
        let sig = sig1();
        // From id : ∀y(x1=y) → ∀y(x1=y) over (A), eliminate with t = f(x1).
        let ctx1 = ctx(&["A"]);
        let phi = pf(&sig, "forall y. x1 = y", &ctx1);
        let d = Deduction::Id {
            ctx: ctx1,
            p: phi,
        };
        let elim =
            derived::forall_elim(&sig, d, Term::app("f", vec![xa(1)])).unwrap();
        let s = typecheck(&sig, &elim).unwrap();
        assert_eq!(
            s.conclusion,
            Formula::Eq("A".into(), xa(1), Term::app("f", vec![xa(1)]))
        );
    }

    #[test]
    fn derived_exists_intro_instantiates() {
        let sig = sig1();
        let d = derived::exists_intro(
            &sig,
            &ctx(&["A"]),
            eqf(1, 2),
            Term::app("f", vec![xa(1)]),
        )
        .unwrap();
        let s = typecheck(&sig, &d).unwrap();
        assert_eq!(
            s.premise,
            Formula::Eq("A".into(), xa(1), Term::app("f", vec![xa(1)]))
        );
        assert_eq!(
            s.conclusion,
            pf(&sig, "exists y. x1 = y", &ctx(&["A"]))
        );
    }

    #[test]
    fn derived_exchange_permutes_context() {
        let sig = Signature::new(
            vec!["A".into(), "B".into()],
            vec![(
                "h".into(),
                FuncDecl {
                    arity: vec!["A".into()],
                    codomain: "B".into(),
                },
            )],
        )
        .unwrap();
        // d over (A,B): premise (x2 = h(x1)); exchange to (B,A).
        let phi = Formula::Eq(
            "B".into(),
            Term::Var(Var::positional(2, "B")),
            Term::app("h", vec![Term::Var(Var::positional(1, "A"))]),
        );
        let d = Deduction::Id {
            ctx: ctx(&["A", "B"]),
            p: phi,
        };
        let ex = derived::exchange(&sig, d, &[2, 1]).unwrap();
        let s = typecheck(&sig, &ex).unwrap();
        assert_eq!(s.context, ctx(&["B", "A"]));
        assert_eq!(
            s.premise,
            Formula::Eq(
                "B".into(),
                Term::Var(Var::positional(1, "B")),
                Term::app("h", vec![Term::Var(Var::positional(2, "A"))]),
            )
        );
    }

    #[test]
    fn derived_modus_ponens() {
        let sig = sig1();
        let a = ctx(&["A"]);
        let p = eqf(1, 1);
        // f : T -> (P => P) by currying proj2; g : T -> P by xi-free route:
        // here simply pair with refl-derived witness is overkill; use
        // curry(proj2): T ∧ P -> P gives T -> (P => P).
        let f = Deduction::Curry(Box::new(Deduction::Proj2 {
            ctx: a.clone(),
            p: Formula::Top,
            q: p.clone(),
        }));
        let g = Deduction::Comp(
            Box::new(Deduction::Refl("A".into())),
            Box::new(Deduction::Id {
                ctx: a.clone(),
                p: Formula::Top,
            }),
        );
        let mp = derived::modus_ponens(&sig, f, g).unwrap();
        let s = typecheck(&sig, &mp).unwrap();
        assert_eq!(s.premise, Formula::Top);
        assert_eq!(s.conclusion, p);
    }
}
