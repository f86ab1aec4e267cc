//! The abstract contract a semantics backend must satisfy, and the generic
//! interpreters built on it.
//!
//! A backend provides predicates over context objects, a strict (split)
//! reindexing action along term morphisms, fiberwise propositional structure,
//! quantification along the projection that drops the last context slot, and
//! an equality predicate per sort — together with a morphism layer mirroring
//! every [`Deduction`] constructor. On top of that contract live
//! [`interpret_formula`] (by structural recursion on canonical formulas;
//! binders are opened so the bound variable is always the last slot) and
//! [`evaluate`] (structural recursion on deductions). The split laws make the
//! equational theory of deductions hold by literal equality of evaluated
//! morphisms, which is what the relation suite asserts.

use thiserror::Error;

use crate::proof::{typecheck, Deduction, ProofError};
use crate::syntax::{open_binder, Formula, Signature, SyntaxError};
use crate::term_cat::{CatError, CtxObject, TermMorphism};

/// Errors surfaced by backends and the generic interpreters.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("fiber size guard: {what} would have {size} elements (bound {bound})")]
    Overflow {
        what: String,
        size: usize,
        bound: usize,
    },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Cat(#[from] CatError),
    #[error(transparent)]
    Proof(#[from] ProofError),
}

/// The backend contract: a split fibration of predicates with fiberwise
/// bicartesian closed structure, adjoints to weakening along the last context
/// slot, and equality objects.
///
/// Laws (exercised by the test suites, not encoded in types): reindexing is
/// strict (`reindex(id, P) = P`, `reindex(s, reindex(t, P)) = reindex(t∘s,
/// P)`) and the morphism layer satisfies the equational theory of deductions
/// by literal equality.
pub trait Model {
    /// A predicate over some context object, carrying its base.
    type Pred: Clone + PartialEq + std::fmt::Debug;
    /// A vertical morphism between predicates over a shared context.
    type ProofMor: Clone + PartialEq + std::fmt::Debug;

    /// Per-slot number of base points for a context (carrier size or number
    /// of groupoid objects); the base product is their cartesian product.
    fn base_sizes(&self, ctx: &CtxObject) -> Result<Vec<usize>, ModelError>;

    // Predicate layer.
    fn top(&self, ctx: &CtxObject) -> Result<Self::Pred, ModelError>;
    fn bot(&self, ctx: &CtxObject) -> Result<Self::Pred, ModelError>;
    fn and(&self, p: &Self::Pred, q: &Self::Pred) -> Result<Self::Pred, ModelError>;
    fn or(&self, p: &Self::Pred, q: &Self::Pred) -> Result<Self::Pred, ModelError>;
    fn implies(&self, p: &Self::Pred, q: &Self::Pred) -> Result<Self::Pred, ModelError>;
    /// The equality predicate of a sort, over the two-slot context `(B, B)`.
    fn eq(&self, sort: &str) -> Result<Self::Pred, ModelError>;
    /// Split reindexing: the fiber of `reindex(t, P)` at a point is the fiber
    /// of `P` at the image point, on the nose.
    fn reindex(&self, t: &TermMorphism, p: &Self::Pred) -> Result<Self::Pred, ModelError>;
    /// Existential quantification along the projection dropping the last
    /// context slot.
    fn exists_last(&self, p: &Self::Pred) -> Result<Self::Pred, ModelError>;
    /// Universal quantification along the same projection.
    fn forall_last(&self, p: &Self::Pred) -> Result<Self::Pred, ModelError>;

    // Morphism layer, one operation per deduction constructor.
    fn id(&self, p: &Self::Pred) -> Result<Self::ProofMor, ModelError>;
    fn compose(
        &self,
        g: &Self::ProofMor,
        f: &Self::ProofMor,
    ) -> Result<Self::ProofMor, ModelError>;
    fn reindex_mor(
        &self,
        t: &TermMorphism,
        f: &Self::ProofMor,
    ) -> Result<Self::ProofMor, ModelError>;
    fn bang(&self, p: &Self::Pred) -> Result<Self::ProofMor, ModelError>;
    fn absurd(&self, p: &Self::Pred) -> Result<Self::ProofMor, ModelError>;
    fn proj1(&self, p: &Self::Pred, q: &Self::Pred) -> Result<Self::ProofMor, ModelError>;
    fn proj2(&self, p: &Self::Pred, q: &Self::Pred) -> Result<Self::ProofMor, ModelError>;
    fn pair(
        &self,
        f: &Self::ProofMor,
        g: &Self::ProofMor,
    ) -> Result<Self::ProofMor, ModelError>;
    fn inj1(&self, p: &Self::Pred, q: &Self::Pred) -> Result<Self::ProofMor, ModelError>;
    fn inj2(&self, p: &Self::Pred, q: &Self::Pred) -> Result<Self::ProofMor, ModelError>;
    fn case(
        &self,
        f: &Self::ProofMor,
        g: &Self::ProofMor,
    ) -> Result<Self::ProofMor, ModelError>;
    /// The evaluation morphism `(P⇒Q)∧P → Q`.
    fn eval_mor(&self, p: &Self::Pred, q: &Self::Pred) -> Result<Self::ProofMor, ModelError>;
    /// Transpose of `f : P∧Q → R` to `P → (Q⇒R)`; `p`/`q` are the premise
    /// components (not recoverable from `f` alone in every backend).
    fn curry(
        &self,
        f: &Self::ProofMor,
        p: &Self::Pred,
        q: &Self::Pred,
    ) -> Result<Self::ProofMor, ModelError>;
    /// The counit `π*∀P → P` over the extended context of `p`.
    fn forall_counit(&self, p: &Self::Pred) -> Result<Self::ProofMor, ModelError>;
    /// Transpose of `f : π*S → P` to `S → ∀P`; `s` is over the base context,
    /// `p` over the extended one.
    fn lambda(
        &self,
        f: &Self::ProofMor,
        s: &Self::Pred,
        p: &Self::Pred,
    ) -> Result<Self::ProofMor, ModelError>;
    /// The unit `P → π*∃P` over the extended context of `p`.
    fn exists_unit(&self, p: &Self::Pred) -> Result<Self::ProofMor, ModelError>;
    /// Transpose of `f : P → π*S` to `∃P → S`.
    fn mu(
        &self,
        f: &Self::ProofMor,
        p: &Self::Pred,
        s: &Self::Pred,
    ) -> Result<Self::ProofMor, ModelError>;
    /// The reflexivity morphism `⊤ → Δ*Eq` over the one-slot context of the
    /// sort.
    fn refl(&self, sort: &str) -> Result<Self::ProofMor, ModelError>;
    /// Equality elimination: from `f : ⊤ → Δ*T` over `(B)`, the morphism
    /// `Eq → T` over `(B, B)`; `target` is the interpretation of `T`.
    fn xi(
        &self,
        f: &Self::ProofMor,
        target: &Self::Pred,
    ) -> Result<Self::ProofMor, ModelError>;

    // Queries.
    /// Is the fiber at the given base point non-empty?
    fn inhabited(&self, p: &Self::Pred, point: &[usize]) -> Result<bool, ModelError>;
    /// Backend-appropriate sameness of predicate fibers: fiberwise bijection
    /// for proof sets, fiberwise equivalence for groupoids.
    fn pred_equiv(&self, p: &Self::Pred, q: &Self::Pred) -> Result<bool, ModelError>;
}

/// Interprets a canonical formula over a context object as a backend
/// predicate. Quantifier bodies are opened so that the bound variable is the
/// last slot of the extended context; no other variable plumbing is needed.
pub fn interpret_formula<M: Model>(
    m: &M,
    sig: &Signature,
    ctx: &CtxObject,
    phi: &Formula,
) -> Result<M::Pred, ModelError> {
    match phi {
        Formula::Top => m.top(ctx),
        Formula::Bot => m.bot(ctx),
        Formula::And(p, q) => {
            let ip = interpret_formula(m, sig, ctx, p)?;
            let iq = interpret_formula(m, sig, ctx, q)?;
            m.and(&ip, &iq)
        }
        Formula::Or(p, q) => {
            let ip = interpret_formula(m, sig, ctx, p)?;
            let iq = interpret_formula(m, sig, ctx, q)?;
            m.or(&ip, &iq)
        }
        Formula::Implies(p, q) => {
            let ip = interpret_formula(m, sig, ctx, p)?;
            let iq = interpret_formula(m, sig, ctx, q)?;
            m.implies(&ip, &iq)
        }
        Formula::Eq(sort, s, t) => {
            let pair = TermMorphism::new(
                sig,
                ctx.clone(),
                CtxObject::new(vec![sort.clone(), sort.clone()]),
                vec![s.clone(), t.clone()],
            )?;
            m.reindex(&pair, &m.eq(sort)?)
        }
        Formula::Forall(..) | Formula::Exists(..) => {
            let (ext, body) = open_binder(phi, ctx.sorts()).ok_or_else(|| {
                ModelError::Shape("open_binder on a non-quantifier".into())
            })?;
            let inner = interpret_formula(m, sig, &CtxObject::new(ext), &body)?;
            match phi {
                Formula::Forall(..) => m.forall_last(&inner),
                _ => m.exists_last(&inner),
            }
        }
    }
}

/// Evaluates a typechecked deduction to a backend morphism between the
/// interpretations of its premise and conclusion.
pub fn evaluate<M: Model>(
    m: &M,
    sig: &Signature,
    d: &Deduction,
) -> Result<M::ProofMor, ModelError> {
    let interp = |ctx: &CtxObject, phi: &Formula| interpret_formula(m, sig, ctx, phi);
    match d {
        Deduction::Id { ctx, p } => m.id(&interp(ctx, p)?),
        Deduction::Comp(g, f) => {
            let ef = evaluate(m, sig, f)?;
            let eg = evaluate(m, sig, g)?;
            m.compose(&eg, &ef)
        }
        Deduction::Reindex(t, f) => m.reindex_mor(t, &evaluate(m, sig, f)?),
        Deduction::Bang { ctx, p } => m.bang(&interp(ctx, p)?),
        Deduction::Absurd { ctx, p } => m.absurd(&interp(ctx, p)?),
        Deduction::Proj1 { ctx, p, q } => m.proj1(&interp(ctx, p)?, &interp(ctx, q)?),
        Deduction::Proj2 { ctx, p, q } => m.proj2(&interp(ctx, p)?, &interp(ctx, q)?),
        Deduction::Pair(f, g) => {
            let ef = evaluate(m, sig, f)?;
            let eg = evaluate(m, sig, g)?;
            m.pair(&ef, &eg)
        }
        Deduction::Inj1 { ctx, p, q } => m.inj1(&interp(ctx, p)?, &interp(ctx, q)?),
        Deduction::Inj2 { ctx, p, q } => m.inj2(&interp(ctx, p)?, &interp(ctx, q)?),
        Deduction::Case(f, g) => {
            let ef = evaluate(m, sig, f)?;
            let eg = evaluate(m, sig, g)?;
            m.case(&ef, &eg)
        }
        Deduction::Eval { ctx, p, q } => m.eval_mor(&interp(ctx, p)?, &interp(ctx, q)?),
        Deduction::Curry(f) => {
            let s = typecheck(sig, f)?;
            let (p, q) = match &s.premise {
                Formula::And(p, q) => (interp(&s.context, p)?, interp(&s.context, q)?),
                _ => unreachable!("typecheck accepted curry"),
            };
            m.curry(&evaluate(m, sig, f)?, &p, &q)
        }
        Deduction::ForallCounit { ctx, p } => m.forall_counit(&interp(ctx, p)?),
        Deduction::Lambda(f) => {
            let s = typecheck(sig, f)?;
            let base = s.context.drop_last();
            let sp = interp(&base, &s.premise)?;
            let pp = interp(&s.context, &s.conclusion)?;
            m.lambda(&evaluate(m, sig, f)?, &sp, &pp)
        }
        Deduction::ExistsUnit { ctx, p } => m.exists_unit(&interp(ctx, p)?),
        Deduction::Mu(f) => {
            let s = typecheck(sig, f)?;
            let base = s.context.drop_last();
            let pp = interp(&s.context, &s.premise)?;
            let sp = interp(&base, &s.conclusion)?;
            m.mu(&evaluate(m, sig, f)?, &pp, &sp)
        }
        Deduction::Refl(sort) => m.refl(sort),
        Deduction::Xi(f, target) => {
            let s = typecheck(sig, d)?;
            let tp = interp(&s.context, target)?;
            m.xi(&evaluate(m, sig, f)?, &tp)
        }
    }
}

/// All base points of a context, in lexicographic order.
pub fn enumerate_points<M: Model>(
    m: &M,
    ctx: &CtxObject,
) -> Result<Vec<Vec<usize>>, ModelError> {
    Ok(crate::gen::all_points(&m.base_sizes(ctx)?))
}

/// Checks Frobenius reciprocity `∃(P ∧ π*Q) ≅ (∃P) ∧ Q` for `p` over the
/// extended context `ext` and `q` over `ext` minus its last slot.
pub fn check_frobenius<M: Model>(
    m: &M,
    ext: &CtxObject,
    p: &M::Pred,
    q: &M::Pred,
) -> Result<bool, ModelError> {
    let pi = TermMorphism::pi_last(ext)?;
    let lhs = m.exists_last(&m.and(p, &m.reindex(&pi, q)?)?)?;
    let rhs = m.and(&m.exists_last(p)?, q)?;
    m.pred_equiv(&lhs, &rhs)
}

/// Checks the Beck–Chevalley condition for both quantifiers along `t × id`:
/// `t*(∃P) ≅ ∃((t×id)*P)` and `t*(∀P) ≅ ∀((t×id)*P)`, for `p` over `cod(t)`
/// extended by `last_sort`.
pub fn check_beck_chevalley<M: Model>(
    m: &M,
    t: &TermMorphism,
    last_sort: &str,
    p: &M::Pred,
) -> Result<(bool, bool), ModelError> {
    let cross = t.cross_id(&[last_sort.to_string()]);
    let pulled = m.reindex(&cross, p)?;
    let ex = m.pred_equiv(
        &m.reindex(t, &m.exists_last(p)?)?,
        &m.exists_last(&pulled)?,
    )?;
    let fa = m.pred_equiv(
        &m.reindex(t, &m.forall_last(p)?)?,
        &m.forall_last(&pulled)?,
    )?;
    Ok((ex, fa))
}

/// Soundness observable: a typechecked deduction transports inhabitation of
/// the premise to the conclusion at every base point.
pub fn check_monotone<M: Model>(
    m: &M,
    sig: &Signature,
    d: &Deduction,
) -> Result<bool, ModelError> {
    let s = typecheck(sig, d)?;
    let prem = interpret_formula(m, sig, &s.context, &s.premise)?;
    let concl = interpret_formula(m, sig, &s.context, &s.conclusion)?;
    for pt in enumerate_points(m, &s.context)? {
        if m.inhabited(&prem, &pt)? && !m.inhabited(&concl, &pt)? {
            return Ok(false);
        }
    }
    Ok(true)
}
