//! Generators for the basic relation families of the deduction calculus.
//!
//! Each equation in the equational theory of deductions is witnessed here by
//! a builder that produces randomized instance pairs `(lhs, rhs)`: two
//! syntactically distinct deductions that the theory identifies. The pairs
//! always typecheck with identical sequents; the backends then evaluate both
//! sides and compare for literal equality (every backend is split, so the
//! equations hold on the nose, not merely up to isomorphism).

use std::fmt;

use rand::Rng as _;
use serde::Serialize;

use crate::gen::{
    grow_backward, grow_forward, random_ctx, random_formula, random_sort,
    random_term_morphism, GenBounds, Rng,
};
use crate::syntax::{close_binder, Formula, Quantifier, Signature, Term, Var};
use crate::term_cat::{reindex_formula, CtxObject, TermMorphism};

use super::Deduction;

/// The seven families of basic relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum RelationFamily {
    Category,
    Fibration,
    ProductsCoproducts,
    Exponentials,
    QuantifierAdjoints,
    Equality,
    Stability,
}

impl RelationFamily {
    pub const ALL: [RelationFamily; 7] = [
        RelationFamily::Category,
        RelationFamily::Fibration,
        RelationFamily::ProductsCoproducts,
        RelationFamily::Exponentials,
        RelationFamily::QuantifierAdjoints,
        RelationFamily::Equality,
        RelationFamily::Stability,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RelationFamily::Category => "category",
            RelationFamily::Fibration => "fibration",
            RelationFamily::ProductsCoproducts => "products-coproducts",
            RelationFamily::Exponentials => "exponentials",
            RelationFamily::QuantifierAdjoints => "quantifier-adjoints",
            RelationFamily::Equality => "equality",
            RelationFamily::Stability => "stability",
        }
    }
}

impl fmt::Display for RelationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One instantiated basic relation: two deductions the theory identifies.
#[derive(Debug, Clone)]
pub struct RelationInstance {
    pub family: RelationFamily,
    pub equation: &'static str,
    pub lhs: Deduction,
    pub rhs: Deduction,
}

fn bx(d: Deduction) -> Box<Deduction> {
    Box::new(d)
}

fn comp(g: Deduction, f: Deduction) -> Deduction {
    Deduction::Comp(bx(g), bx(f))
}

/// `x ∧ y` on deductions sharing the premise `p ∧ q`: the literal expansion
/// `⟨x∘π, y∘π′⟩` used by the exponential equations.
fn par_and_literal(
    ctx: &CtxObject,
    p: &Formula,
    q: &Formula,
    x: Deduction,
    y: Deduction,
) -> Deduction {
    let proj1 = Deduction::Proj1 {
        ctx: ctx.clone(),
        p: p.clone(),
        q: q.clone(),
    };
    let proj2 = Deduction::Proj2 {
        ctx: ctx.clone(),
        p: p.clone(),
        q: q.clone(),
    };
    Deduction::Pair(bx(comp(x, proj1)), bx(comp(y, proj2)))
}

struct Ctx<'a> {
    sig: &'a Signature,
    bounds: &'a GenBounds,
}

impl<'a> Ctx<'a> {
    fn formula(&self, rng: &mut Rng, sorts: &[String]) -> Formula {
        random_formula(
            self.sig,
            rng,
            sorts,
            self.bounds.connective_depth,
            self.bounds.quantifier_depth,
            self.bounds.term_depth,
        )
    }

    fn fwd(&self, rng: &mut Rng, ctx: &CtxObject, premise: &Formula) -> Deduction {
        grow_forward(self.sig, rng, ctx, premise, self.bounds.deduction_steps)
    }

    fn bwd(&self, rng: &mut Rng, ctx: &CtxObject, conclusion: &Formula) -> Deduction {
        grow_backward(self.sig, rng, ctx, conclusion, self.bounds.deduction_steps)
    }

    /// A random context extended by one more slot, for the quantifier rules.
    fn extended_ctx(&self, rng: &mut Rng) -> CtxObject {
        let base = random_ctx(self.sig, rng, self.bounds.ctx_len);
        base.concat(&CtxObject::new(vec![random_sort(self.sig, rng)]))
    }

    /// A composable chain `f : P → Q`, `g : Q → R` over a shared context.
    fn chain2(&self, rng: &mut Rng, ctx: &CtxObject) -> (Deduction, Deduction) {
        let p = self.formula(rng, ctx.sorts());
        let f = self.fwd(rng, ctx, &p);
        let q = crate::gen::conclusion_of(self.sig, &f);
        let g = self.fwd(rng, ctx, &q);
        (f, g)
    }
}

/// Replaces a random subset of the free occurrences of `x1` by `x2`; every
/// result pulls back to the input along the diagonal. Canonical formulas
/// never rebind positional variables, so the traversal is literal.
fn random_diagonal_lift(rng: &mut Rng, phi: &Formula, sort: &str) -> Formula {
    fn lift_term(rng: &mut Rng, t: &Term, x1: &Var, x2: &Var) -> Term {
        match t {
            Term::Var(v) if v == x1 && rng.gen_bool(0.5) => Term::Var(x2.clone()),
            Term::Var(_) => t.clone(),
            Term::App { symbol, args } => Term::App {
                symbol: symbol.clone(),
                args: args.iter().map(|a| lift_term(rng, a, x1, x2)).collect(),
            },
        }
    }
    fn lift(rng: &mut Rng, phi: &Formula, x1: &Var, x2: &Var) -> Formula {
        match phi {
            Formula::Eq(s, a, b) => Formula::Eq(
                s.clone(),
                lift_term(rng, a, x1, x2),
                lift_term(rng, b, x1, x2),
            ),
            Formula::Top => Formula::Top,
            Formula::Bot => Formula::Bot,
            Formula::And(p, q) => {
                Formula::and(lift(rng, p, x1, x2), lift(rng, q, x1, x2))
            }
            Formula::Or(p, q) => {
                Formula::or(lift(rng, p, x1, x2), lift(rng, q, x1, x2))
            }
            Formula::Implies(p, q) => {
                Formula::implies(lift(rng, p, x1, x2), lift(rng, q, x1, x2))
            }
            Formula::Forall(v, p) => {
                Formula::forall(v.clone(), lift(rng, p, x1, x2))
            }
            Formula::Exists(v, p) => {
                Formula::exists(v.clone(), lift(rng, p, x1, x2))
            }
        }
    }
    let x1 = Var::positional(1, sort);
    let x2 = Var::positional(2, sort);
    lift(rng, phi, &x1, &x2)
}

fn instance(
    family: RelationFamily,
    equation: &'static str,
    lhs: Deduction,
    rhs: Deduction,
) -> RelationInstance {
    RelationInstance {
        family,
        equation,
        lhs,
        rhs,
    }
}

fn category_instances(c: &Ctx, rng: &mut Rng, out: &mut Vec<RelationInstance>) {
    use RelationFamily::Category as F;
    let ctx = random_ctx(c.sig, rng, c.bounds.ctx_len);
    let p = c.formula(rng, ctx.sorts());
    let f = c.fwd(rng, &ctx, &p);
    let q = crate::gen::conclusion_of(c.sig, &f);
    out.push(instance(
        F,
        "f∘1 = f",
        comp(
            f.clone(),
            Deduction::Id {
                ctx: ctx.clone(),
                p: p.clone(),
            },
        ),
        f.clone(),
    ));
    out.push(instance(
        F,
        "1∘f = f",
        comp(
            Deduction::Id {
                ctx: ctx.clone(),
                p: q.clone(),
            },
            f.clone(),
        ),
        f.clone(),
    ));
    let g = c.fwd(rng, &ctx, &q);
    let r = crate::gen::conclusion_of(c.sig, &g);
    let h = c.fwd(rng, &ctx, &r);
    out.push(instance(
        F,
        "(h∘g)∘f = h∘(g∘f)",
        comp(comp(h.clone(), g.clone()), f.clone()),
        comp(h, comp(g, f)),
    ));
}

fn fibration_instances(c: &Ctx, rng: &mut Rng, out: &mut Vec<RelationInstance>) {
    use RelationFamily::Fibration as F;
    let cod = random_ctx(c.sig, rng, c.bounds.ctx_len);
    let dom = random_ctx(c.sig, rng, c.bounds.ctx_len);
    let t = match random_term_morphism(c.sig, rng, &dom, &cod, c.bounds.term_depth) {
        Some(t) => t,
        None => TermMorphism::identity(&cod),
    };
    let (f, g) = c.chain2(rng, &cod);
    let p = crate::gen::premise_of(c.sig, &f);

    out.push(instance(
        F,
        "t*1 = 1",
        Deduction::Reindex(
            t.clone(),
            bx(Deduction::Id {
                ctx: cod.clone(),
                p: p.clone(),
            }),
        ),
        Deduction::Id {
            ctx: t.dom().clone(),
            p: reindex_formula(c.sig, &p, &t).unwrap(),
        },
    ));
    out.push(instance(
        F,
        "t*(g∘f) = t*g∘t*f",
        Deduction::Reindex(t.clone(), bx(comp(g.clone(), f.clone()))),
        comp(
            Deduction::Reindex(t.clone(), bx(g.clone())),
            Deduction::Reindex(t.clone(), bx(f.clone())),
        ),
    ));
    out.push(instance(
        F,
        "id* f = f",
        Deduction::Reindex(TermMorphism::identity(&cod), bx(f.clone())),
        f.clone(),
    ));
    let mid = random_ctx(c.sig, rng, c.bounds.ctx_len);
    let s = match random_term_morphism(c.sig, rng, &mid, t.dom(), c.bounds.term_depth) {
        Some(s) => s,
        None => TermMorphism::identity(t.dom()),
    };
    let ts = TermMorphism::compose(c.sig, &t, &s).unwrap();
    out.push(instance(
        F,
        "s*t*f = (ts)*f",
        Deduction::Reindex(s, bx(Deduction::Reindex(t, bx(f.clone())))),
        Deduction::Reindex(ts, bx(f)),
    ));
}

fn product_instances(c: &Ctx, rng: &mut Rng, out: &mut Vec<RelationInstance>) {
    use RelationFamily::ProductsCoproducts as F;
    let ctx = random_ctx(c.sig, rng, c.bounds.ctx_len);

    // Terminal: any f : P → ⊤ equals !_P.
    let p0 = c.formula(rng, ctx.sorts());
    let f0 = c.fwd(rng, &ctx, &p0);
    let q0 = crate::gen::conclusion_of(c.sig, &f0);
    let to_top = comp(
        Deduction::Bang {
            ctx: ctx.clone(),
            p: q0,
        },
        f0,
    );
    out.push(instance(
        F,
        "f = !",
        to_top,
        Deduction::Bang {
            ctx: ctx.clone(),
            p: p0,
        },
    ));

    // Initial: any f : ⊥ → Q equals the canonical ex-falso.
    let from_bot = if rng.gen_bool(0.5) {
        c.fwd(rng, &ctx, &Formula::Bot)
    } else {
        let mid = c.formula(rng, ctx.sorts());
        comp(
            c.fwd(rng, &ctx, &mid),
            Deduction::Absurd {
                ctx: ctx.clone(),
                p: mid.clone(),
            },
        )
    };
    let q1 = crate::gen::conclusion_of(c.sig, &from_bot);
    out.push(instance(
        F,
        "f = ex",
        from_bot,
        Deduction::Absurd {
            ctx: ctx.clone(),
            p: q1,
        },
    ));

    // Pairing β and η.
    let p = c.formula(rng, ctx.sorts());
    let f = c.fwd(rng, &ctx, &p);
    let g = c.fwd(rng, &ctx, &p);
    let q = crate::gen::conclusion_of(c.sig, &f);
    let r = crate::gen::conclusion_of(c.sig, &g);
    out.push(instance(
        F,
        "π∘⟨f,g⟩ = f",
        comp(
            Deduction::Proj1 {
                ctx: ctx.clone(),
                p: q.clone(),
                q: r.clone(),
            },
            Deduction::Pair(bx(f.clone()), bx(g.clone())),
        ),
        f.clone(),
    ));
    out.push(instance(
        F,
        "π′∘⟨f,g⟩ = g",
        comp(
            Deduction::Proj2 {
                ctx: ctx.clone(),
                p: q.clone(),
                q: r.clone(),
            },
            Deduction::Pair(bx(f.clone()), bx(g.clone())),
        ),
        g.clone(),
    ));
    let qr = Formula::and(q.clone(), r.clone());
    let h = c.bwd(rng, &ctx, &qr);
    out.push(instance(
        F,
        "⟨π∘h,π′∘h⟩ = h",
        Deduction::Pair(
            bx(comp(
                Deduction::Proj1 {
                    ctx: ctx.clone(),
                    p: q.clone(),
                    q: r.clone(),
                },
                h.clone(),
            )),
            bx(comp(
                Deduction::Proj2 {
                    ctx: ctx.clone(),
                    p: q.clone(),
                    q: r.clone(),
                },
                h.clone(),
            )),
        ),
        h,
    ));

    // Case β and η.
    let target = c.formula(rng, ctx.sorts());
    let cf = c.bwd(rng, &ctx, &target);
    let cg = c.bwd(rng, &ctx, &target);
    let cp = crate::gen::premise_of(c.sig, &cf);
    let cq = crate::gen::premise_of(c.sig, &cg);
    out.push(instance(
        F,
        "[f,g]∘κ = f",
        comp(
            Deduction::Case(bx(cf.clone()), bx(cg.clone())),
            Deduction::Inj1 {
                ctx: ctx.clone(),
                p: cp.clone(),
                q: cq.clone(),
            },
        ),
        cf.clone(),
    ));
    out.push(instance(
        F,
        "[f,g]∘κ′ = g",
        comp(
            Deduction::Case(bx(cf.clone()), bx(cg.clone())),
            Deduction::Inj2 {
                ctx: ctx.clone(),
                p: cp.clone(),
                q: cq.clone(),
            },
        ),
        cg.clone(),
    ));
    let pq = Formula::or(cp.clone(), cq.clone());
    let hh = c.fwd(rng, &ctx, &pq);
    out.push(instance(
        F,
        "[h∘κ,h∘κ′] = h",
        Deduction::Case(
            bx(comp(
                hh.clone(),
                Deduction::Inj1 {
                    ctx: ctx.clone(),
                    p: cp.clone(),
                    q: cq.clone(),
                },
            )),
            bx(comp(
                hh.clone(),
                Deduction::Inj2 {
                    ctx: ctx.clone(),
                    p: cp,
                    q: cq,
                },
            )),
        ),
        hh,
    ));
}

fn exponential_instances(c: &Ctx, rng: &mut Rng, out: &mut Vec<RelationInstance>) {
    use RelationFamily::Exponentials as F;
    let ctx = random_ctx(c.sig, rng, c.bounds.ctx_len);

    // β: ε∘(f~ ∧ 1) = f  for f : P∧Q → R.
    let p = c.formula(rng, ctx.sorts());
    let q = c.formula(rng, ctx.sorts());
    let pq = Formula::and(p.clone(), q.clone());
    let f = c.fwd(rng, &ctx, &pq);
    let r = crate::gen::conclusion_of(c.sig, &f);
    let idq = Deduction::Id {
        ctx: ctx.clone(),
        p: q.clone(),
    };
    let lhs = comp(
        Deduction::Eval {
            ctx: ctx.clone(),
            p: q.clone(),
            q: r.clone(),
        },
        par_and_literal(&ctx, &p, &q, Deduction::Curry(bx(f.clone())), idq),
    );
    out.push(instance(F, "ε∘(f~∧1) = f", lhs, f));

    // η: (ε∘(h ∧ 1))~ = h  for h : P → (Q⇒R).
    let q2 = c.formula(rng, ctx.sorts());
    let r2 = c.formula(rng, ctx.sorts());
    let imp = Formula::implies(q2.clone(), r2.clone());
    let h = c.bwd(rng, &ctx, &imp);
    let hp = crate::gen::premise_of(c.sig, &h);
    let idq2 = Deduction::Id {
        ctx: ctx.clone(),
        p: q2.clone(),
    };
    let inner = comp(
        Deduction::Eval {
            ctx: ctx.clone(),
            p: q2.clone(),
            q: r2.clone(),
        },
        par_and_literal(&ctx, &hp, &q2, h.clone(), idq2),
    );
    out.push(instance(F, "(ε∘(h∧1))~ = h", Deduction::Curry(bx(inner)), h));
}

fn quantifier_instances(c: &Ctx, rng: &mut Rng, out: &mut Vec<RelationInstance>) {
    use RelationFamily::QuantifierAdjoints as F;
    let ext = c.extended_ctx(rng);
    let base_sorts = &ext.sorts()[..ext.len() - 1];
    let pi = TermMorphism::pi_last(&ext).unwrap();

    // ∀ β: ε∀ ∘ π*(λf) = f  for f : π*S → P over the extended context.
    let s = c.formula(rng, base_sorts);
    let f = c.fwd(rng, &ext, &s);
    let p = crate::gen::conclusion_of(c.sig, &f);
    out.push(instance(
        F,
        "ε∀∘π*(λf) = f",
        comp(
            Deduction::ForallCounit {
                ctx: ext.clone(),
                p: p.clone(),
            },
            Deduction::Reindex(pi.clone(), bx(Deduction::Lambda(bx(f.clone())))),
        ),
        f,
    ));

    // ∀ η: λ(ε∀ ∘ π*h) = h  for h : S → ∀P.
    let p2 = c.formula(rng, ext.sorts());
    let all_p2 = close_binder(Quantifier::Forall, &p2, ext.sorts()).unwrap();
    let h = c.bwd(rng, &ext.drop_last(), &all_p2);
    out.push(instance(
        F,
        "λ(ε∀∘π*h) = h",
        Deduction::Lambda(bx(comp(
            Deduction::ForallCounit {
                ctx: ext.clone(),
                p: p2,
            },
            Deduction::Reindex(pi.clone(), bx(h.clone())),
        ))),
        h,
    ));

    // ∃ β: π*(μf) ∘ η∃ = f  for f : P → π*S.
    let p3 = c.formula(rng, ext.sorts());
    let f3 = {
        let grown = c.fwd(rng, &ext, &p3);
        let concl = crate::gen::conclusion_of(c.sig, &grown);
        if crate::syntax::is_canonical(&concl, base_sorts) {
            grown
        } else {
            // Force a last-slot-free conclusion by ending at ⊤.
            comp(
                Deduction::Bang {
                    ctx: ext.clone(),
                    p: concl,
                },
                grown,
            )
        }
    };
    out.push(instance(
        F,
        "π*(μf)∘η∃ = f",
        comp(
            Deduction::Reindex(pi.clone(), bx(Deduction::Mu(bx(f3.clone())))),
            Deduction::ExistsUnit {
                ctx: ext.clone(),
                p: p3.clone(),
            },
        ),
        f3,
    ));

    // ∃ η: μ(π*h ∘ η∃) = h  for h : ∃P → S.
    let p4 = c.formula(rng, ext.sorts());
    let ex_p4 = close_binder(Quantifier::Exists, &p4, ext.sorts()).unwrap();
    let h4 = c.fwd(rng, &ext.drop_last(), &ex_p4);
    out.push(instance(
        F,
        "μ(π*h∘η∃) = h",
        Deduction::Mu(bx(comp(
            Deduction::Reindex(pi, bx(h4.clone())),
            Deduction::ExistsUnit {
                ctx: ext,
                p: p4,
            },
        ))),
        h4,
    ));
}

fn equality_instances(c: &Ctx, rng: &mut Rng, out: &mut Vec<RelationInstance>) {
    use RelationFamily::Equality as F;
    let sort = random_sort(c.sig, rng);
    let ctx1 = CtxObject::new(vec![sort.clone()]);
    let ctx2 = CtxObject::new(vec![sort.clone(), sort.clone()]);
    let diag = TermMorphism::diagonal(&sort);

    // β: Δ*(ξf) ∘ r = f  for f : ⊤ → Δ*T over (B); T is any diagonal lift of
    // the conclusion.
    let f = c.fwd(rng, &ctx1, &Formula::Top);
    let concl = crate::gen::conclusion_of(c.sig, &f);
    let target = random_diagonal_lift(rng, &concl, &sort);
    debug_assert_eq!(
        reindex_formula(c.sig, &target, &diag).unwrap(),
        concl,
        "diagonal lift must pull back to the conclusion"
    );
    out.push(instance(
        F,
        "Δ*(ξf)∘r = f",
        comp(
            Deduction::Reindex(
                diag.clone(),
                bx(Deduction::Xi(bx(f.clone()), target)),
            ),
            Deduction::Refl(sort.clone()),
        ),
        f,
    ));

    // η: ξ(Δ*h ∘ r) = h  for h : Eq → T over (B,B).
    let x1 = Term::Var(Var::positional(1, sort.clone()));
    let x2 = Term::Var(Var::positional(2, sort.clone()));
    let eq = Formula::Eq(sort.clone(), x1, x2);
    let h = c.fwd(rng, &ctx2, &eq);
    let t = crate::gen::conclusion_of(c.sig, &h);
    out.push(instance(
        F,
        "ξ(Δ*h∘r) = h",
        Deduction::Xi(
            bx(comp(
                Deduction::Reindex(diag, bx(h.clone())),
                Deduction::Refl(sort),
            )),
            t,
        ),
        h,
    ));
}

fn stability_instances(c: &Ctx, rng: &mut Rng, out: &mut Vec<RelationInstance>) {
    use RelationFamily::Stability as F;
    let cod = random_ctx(c.sig, rng, c.bounds.ctx_len);
    let dom = random_ctx(c.sig, rng, c.bounds.ctx_len);
    let t = match random_term_morphism(c.sig, rng, &dom, &cod, c.bounds.term_depth) {
        Some(t) => t,
        None => TermMorphism::identity(&cod),
    };
    let p = c.formula(rng, cod.sorts());
    let q = c.formula(rng, cod.sorts());
    let tp = reindex_formula(c.sig, &p, &t).unwrap();
    let tq = reindex_formula(c.sig, &q, &t).unwrap();

    let leaves: [(&'static str, Deduction, Deduction); 5] = [
        (
            "t*π = π",
            Deduction::Proj1 {
                ctx: cod.clone(),
                p: p.clone(),
                q: q.clone(),
            },
            Deduction::Proj1 {
                ctx: t.dom().clone(),
                p: tp.clone(),
                q: tq.clone(),
            },
        ),
        (
            "t*π′ = π′",
            Deduction::Proj2 {
                ctx: cod.clone(),
                p: p.clone(),
                q: q.clone(),
            },
            Deduction::Proj2 {
                ctx: t.dom().clone(),
                p: tp.clone(),
                q: tq.clone(),
            },
        ),
        (
            "t*κ = κ",
            Deduction::Inj1 {
                ctx: cod.clone(),
                p: p.clone(),
                q: q.clone(),
            },
            Deduction::Inj1 {
                ctx: t.dom().clone(),
                p: tp.clone(),
                q: tq.clone(),
            },
        ),
        (
            "t*κ′ = κ′",
            Deduction::Inj2 {
                ctx: cod.clone(),
                p: p.clone(),
                q: q.clone(),
            },
            Deduction::Inj2 {
                ctx: t.dom().clone(),
                p: tp.clone(),
                q: tq.clone(),
            },
        ),
        (
            "t*ε = ε",
            Deduction::Eval {
                ctx: cod.clone(),
                p: p.clone(),
                q: q.clone(),
            },
            Deduction::Eval {
                ctx: t.dom().clone(),
                p: tp.clone(),
                q: tq.clone(),
            },
        ),
    ];
    for (eqn, over_cod, over_dom) in leaves {
        out.push(instance(
            F,
            eqn,
            Deduction::Reindex(t.clone(), bx(over_cod)),
            over_dom,
        ));
    }

    // Quantifier units along u × id, u : B⃗ → C⃗, P over C⃗ extended by one.
    let c_base = random_ctx(c.sig, rng, c.bounds.ctx_len);
    let b_base = random_ctx(c.sig, rng, c.bounds.ctx_len);
    let u = match random_term_morphism(c.sig, rng, &b_base, &c_base, c.bounds.term_depth) {
        Some(u) => u,
        None => TermMorphism::identity(&c_base),
    };
    let last = random_sort(c.sig, rng);
    let cross = u.cross_id(std::slice::from_ref(&last));
    let ext_cod = c_base.concat(&CtxObject::new(vec![last.clone()]));
    let p_ext = c.formula(rng, ext_cod.sorts());
    let p_pulled = reindex_formula(c.sig, &p_ext, &cross).unwrap();
    out.push(instance(
        F,
        "(u×id)*ε∀ = ε∀",
        Deduction::Reindex(
            cross.clone(),
            bx(Deduction::ForallCounit {
                ctx: ext_cod.clone(),
                p: p_ext.clone(),
            }),
        ),
        Deduction::ForallCounit {
            ctx: cross.dom().clone(),
            p: p_pulled.clone(),
        },
    ));
    out.push(instance(
        F,
        "(u×id)*η∃ = η∃",
        Deduction::Reindex(
            cross.clone(),
            bx(Deduction::ExistsUnit {
                ctx: ext_cod,
                p: p_ext,
            }),
        ),
        Deduction::ExistsUnit {
            ctx: cross.dom().clone(),
            p: p_pulled,
        },
    ));
}

/// Generates randomized instance pairs of every basic relation, `rounds`
/// rounds per family (each round emits one instance per equation of the
/// family). Deterministic in the seed.
pub fn basic_relation_instances(
    sig: &Signature,
    seed: u64,
    rounds: usize,
    bounds: &GenBounds,
) -> Vec<RelationInstance> {
    let mut rng = crate::gen::rng_from_seed(seed);
    let c = Ctx { sig, bounds };
    let mut out = Vec::new();
    for _ in 0..rounds {
        category_instances(&c, &mut rng, &mut out);
        fibration_instances(&c, &mut rng, &mut out);
        product_instances(&c, &mut rng, &mut out);
        exponential_instances(&c, &mut rng, &mut out);
        quantifier_instances(&c, &mut rng, &mut out);
        equality_instances(&c, &mut rng, &mut out);
        stability_instances(&c, &mut rng, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::test_signature;
    use crate::proof::typecheck;

    #[test]
    fn instances_typecheck_with_identical_sequents() {
        let sig = test_signature();
        let bounds = GenBounds::default();
        let instances = basic_relation_instances(&sig, 11, 4, &bounds);
        assert_eq!(instances.len(), 4 * 30);
        for inst in &instances {
            let sl = typecheck(&sig, &inst.lhs).unwrap_or_else(|e| {
                panic!("lhs of {} `{}` fails: {e}", inst.family, inst.equation)
            });
            let sr = typecheck(&sig, &inst.rhs).unwrap_or_else(|e| {
                panic!("rhs of {} `{}` fails: {e}", inst.family, inst.equation)
            });
            assert_eq!(
                sl, sr,
                "sequent mismatch for {} `{}`",
                inst.family, inst.equation
            );
        }
    }

    #[test]
    fn every_family_and_equation_appears() {
        let sig = test_signature();
        let instances =
            basic_relation_instances(&sig, 5, 1, &GenBounds::default());
        let eqns: std::collections::BTreeSet<&str> =
            instances.iter().map(|i| i.equation).collect();
        assert_eq!(eqns.len(), 30, "got {eqns:?}");
        for fam in RelationFamily::ALL {
            assert!(instances.iter().any(|i| i.family == fam));
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let sig = test_signature();
        let a = basic_relation_instances(&sig, 9, 2, &GenBounds::default());
        let b = basic_relation_instances(&sig, 9, 2, &GenBounds::default());
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.lhs, y.lhs);
            assert_eq!(x.rhs, y.rhs);
        }
    }
}
