//! Seeded random generation of syntax: terms, canonical formulas, term
//! morphisms, and deductions grown from a fixed premise or toward a fixed
//! conclusion. Everything is deterministic given the seed; the test suites
//! and the command-line `relations` command both build on these.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::proof::Deduction;
use crate::syntax::{
    close_binder, open_binder, Context, Formula, FuncDecl, Quantifier, Signature, Term, Var,
};
use crate::term_cat::{CtxObject, TermMorphism};

/// The pseudorandom generator used everywhere; stable across platforms.
pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Size bounds for generated syntax.
#[derive(Debug, Clone)]
pub struct GenBounds {
    /// Maximum context length for randomly chosen contexts.
    pub ctx_len: usize,
    /// Maximum nesting depth of generated terms.
    pub term_depth: usize,
    /// Maximum connective depth of generated formulas.
    pub connective_depth: usize,
    /// Maximum quantifier depth of generated formulas.
    pub quantifier_depth: usize,
    /// Number of growth steps for generated deductions.
    pub deduction_steps: usize,
}

impl Default for GenBounds {
    fn default() -> Self {
        GenBounds {
            ctx_len: 2,
            term_depth: 2,
            connective_depth: 2,
            quantifier_depth: 1,
            deduction_steps: 3,
        }
    }
}

/// A small two-sort signature in which every sort is reachable from every
/// context (there is a constant of sort `A` and a map into sort `B`), so
/// random term morphisms always exist. Used by the generator-heavy suites.
pub fn test_signature() -> Signature {
    Signature::new(
        vec!["A".into(), "B".into()],
        vec![
            (
                "a".into(),
                FuncDecl {
                    arity: vec![],
                    codomain: "A".into(),
                },
            ),
            (
                "h".into(),
                FuncDecl {
                    arity: vec!["A".into()],
                    codomain: "B".into(),
                },
            ),
            (
                "m".into(),
                FuncDecl {
                    arity: vec!["A".into(), "B".into()],
                    codomain: "A".into(),
                },
            ),
            (
                "e".into(),
                FuncDecl {
                    arity: vec!["B".into()],
                    codomain: "B".into(),
                },
            ),
        ],
    )
    .unwrap()
}

/// A one-sort signature with a constant and a unary and binary symbol;
/// convenient for single-carrier suites.
pub fn test_signature_one_sort() -> Signature {
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
            (
                "p".into(),
                FuncDecl {
                    arity: vec!["A".into(), "A".into()],
                    codomain: "A".into(),
                },
            ),
        ],
    )
    .unwrap()
}

pub fn random_sort(sig: &Signature, rng: &mut Rng) -> String {
    sig.sorts().choose(rng).unwrap().clone()
}

pub fn random_ctx(sig: &Signature, rng: &mut Rng, max_len: usize) -> CtxObject {
    let len = rng.gen_range(0..=max_len);
    CtxObject::new((0..len).map(|_| random_sort(sig, rng)).collect())
}

fn positional_vars(sorts: &[String]) -> Vec<Var> {
    sorts
        .iter()
        .enumerate()
        .map(|(i, s)| Var::positional(i + 1, s.clone()))
        .collect()
}

/// A random term of the given sort over the positional context of `sorts`,
/// with nesting depth at most `depth`. `None` when the sort is unreachable.
pub fn random_term(
    sig: &Signature,
    rng: &mut Rng,
    sorts: &[String],
    sort: &str,
    depth: usize,
) -> Option<Term> {
    let vars: Vec<Var> = positional_vars(sorts)
        .into_iter()
        .filter(|v| v.sort == sort)
        .collect();
    let mut symbols: Vec<(String, FuncDecl)> = sig
        .functions()
        .filter(|(_, d)| d.codomain == sort && (depth > 0 || d.arity.is_empty()))
        .map(|(n, d)| (n.clone(), d.clone()))
        .collect();
    symbols.shuffle(rng);

    // Prefer leaves at low depth; otherwise mix.
    let try_vars_first = vars.is_empty() || depth == 0 || rng.gen_bool(0.4);
    let var_pick = |rng: &mut Rng| vars.choose(rng).map(|v| Term::Var(v.clone()));
    if try_vars_first {
        if let Some(t) = var_pick(rng) {
            return Some(t);
        }
    }
    'symbols: for (name, decl) in &symbols {
        let mut args = Vec::new();
        for arg_sort in &decl.arity {
            match random_term(sig, rng, sorts, arg_sort, depth.saturating_sub(1)) {
                Some(t) => args.push(t),
                None => continue 'symbols,
            }
        }
        return Some(Term::app(name.clone(), args));
    }
    var_pick(rng)
}

/// A random canonical formula over the positional context of `sorts`, within
/// the given connective and quantifier depth budgets.
pub fn random_formula(
    sig: &Signature,
    rng: &mut Rng,
    sorts: &[String],
    connective_depth: usize,
    quantifier_depth: usize,
    term_depth: usize,
) -> Formula {
    let atom = |rng: &mut Rng| {
        for _ in 0..4 {
            let sort = random_sort(sig, rng);
            if let (Some(s), Some(t)) = (
                random_term(sig, rng, sorts, &sort, term_depth),
                random_term(sig, rng, sorts, &sort, term_depth),
            ) {
                return Formula::Eq(sort, s, t);
            }
        }
        if rng.gen_bool(0.5) {
            Formula::Top
        } else {
            Formula::Bot
        }
    };
    let mut options: Vec<u8> = vec![0]; // 0 = atom
    if connective_depth > 0 {
        options.extend([1, 1, 2, 3]); // and, or, implies (and twice: keep ∧ common)
    }
    if quantifier_depth > 0 {
        options.extend([4, 5]);
    }
    match *options.choose(rng).unwrap() {
        0 => match rng.gen_range(0..5) {
            0 => Formula::Top,
            1 => Formula::Bot,
            _ => atom(rng),
        },
        k @ 1..=3 => {
            let p = random_formula(
                sig,
                rng,
                sorts,
                connective_depth - 1,
                quantifier_depth,
                term_depth,
            );
            let q = random_formula(
                sig,
                rng,
                sorts,
                connective_depth - 1,
                quantifier_depth,
                term_depth,
            );
            match k {
                1 => Formula::and(p, q),
                2 => Formula::or(p, q),
                _ => Formula::implies(p, q),
            }
        }
        k => {
            let sort = random_sort(sig, rng);
            let mut extended = sorts.to_vec();
            extended.push(sort);
            let body = random_formula(
                sig,
                rng,
                &extended,
                connective_depth,
                quantifier_depth - 1,
                term_depth,
            );
            let q = if k == 4 {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            };
            close_binder(q, &body, &extended).expect("generated body is canonical")
        }
    }
}

/// A random closed canonical formula (empty context).
pub fn random_closed_formula(
    sig: &Signature,
    rng: &mut Rng,
    connective_depth: usize,
    quantifier_depth: usize,
    term_depth: usize,
) -> Formula {
    random_formula(
        sig,
        rng,
        &[],
        connective_depth,
        quantifier_depth,
        term_depth,
    )
}

/// A random term morphism between the two given objects; `None` when some
/// codomain sort is unreachable from the domain context.
pub fn random_term_morphism(
    sig: &Signature,
    rng: &mut Rng,
    dom: &CtxObject,
    cod: &CtxObject,
    term_depth: usize,
) -> Option<TermMorphism> {
    let terms: Option<Vec<Term>> = cod
        .sorts()
        .iter()
        .map(|s| random_term(sig, rng, dom.sorts(), s, term_depth))
        .collect();
    TermMorphism::new(sig, dom.clone(), cod.clone(), terms?).ok()
}

/// A random term morphism out of `dom` into a random codomain.
pub fn random_morphism_from(
    sig: &Signature,
    rng: &mut Rng,
    dom: &CtxObject,
    bounds: &GenBounds,
) -> TermMorphism {
    for _ in 0..8 {
        let cod = random_ctx(sig, rng, bounds.ctx_len);
        if let Some(t) = random_term_morphism(sig, rng, dom, &cod, bounds.term_depth) {
            return t;
        }
    }
    TermMorphism::tuple(dom, &[]).unwrap()
}

fn small_formula(sig: &Signature, rng: &mut Rng, sorts: &[String]) -> Formula {
    random_formula(sig, rng, sorts, 1, 0, 1)
}

/// Grows a random deduction with the given premise: starts at the identity
/// and repeatedly post-composes applicable steps, so the premise never
/// changes while the conclusion wanders.
pub fn grow_forward(
    sig: &Signature,
    rng: &mut Rng,
    ctx: &CtxObject,
    premise: &Formula,
    steps: usize,
) -> Deduction {
    let mut cur = Deduction::Id {
        ctx: ctx.clone(),
        p: premise.clone(),
    };
    let mut conclusion = premise.clone();
    for step in 0..steps {
        // Applicable post-composition steps from the current conclusion.
        let mut opts: Vec<u8> = vec![0, 1, 1, 2]; // bang, inj1/inj2, pair
        if matches!(conclusion, Formula::And(..)) {
            opts.extend([3, 3]);
        }
        if let Formula::And(l, r) = &conclusion {
            if let Formula::Implies(p, _) = &**l {
                if **r == **p {
                    opts.extend([4, 4]);
                }
            }
        }
        if !ctx.is_empty() {
            opts.push(5);
        }
        if matches!(conclusion, Formula::Forall(..)) {
            opts.extend([6, 6]);
        }
        match *opts.choose(rng).unwrap() {
            0 => {
                cur = Deduction::Comp(
                    Box::new(Deduction::Bang {
                        ctx: ctx.clone(),
                        p: conclusion.clone(),
                    }),
                    Box::new(cur),
                );
                conclusion = Formula::Top;
            }
            1 => {
                let side = small_formula(sig, rng, ctx.sorts());
                let (inj, next) = if rng.gen_bool(0.5) {
                    (
                        Deduction::Inj1 {
                            ctx: ctx.clone(),
                            p: conclusion.clone(),
                            q: side.clone(),
                        },
                        Formula::or(conclusion.clone(), side),
                    )
                } else {
                    (
                        Deduction::Inj2 {
                            ctx: ctx.clone(),
                            p: side.clone(),
                            q: conclusion.clone(),
                        },
                        Formula::or(side, conclusion.clone()),
                    )
                };
                cur = Deduction::Comp(Box::new(inj), Box::new(cur));
                conclusion = next;
            }
            2 => {
                let sibling = grow_forward(sig, rng, ctx, premise, (steps - step) / 2);
                let sib_concl = conclusion_of(sig, &sibling);
                cur = Deduction::Pair(Box::new(cur), Box::new(sibling));
                conclusion = Formula::and(conclusion.clone(), sib_concl);
            }
            3 => {
                let (l, r) = match &conclusion {
                    Formula::And(l, r) => ((**l).clone(), (**r).clone()),
                    _ => unreachable!(),
                };
                let first = rng.gen_bool(0.5);
                let proj = if first {
                    Deduction::Proj1 {
                        ctx: ctx.clone(),
                        p: l.clone(),
                        q: r.clone(),
                    }
                } else {
                    Deduction::Proj2 {
                        ctx: ctx.clone(),
                        p: l.clone(),
                        q: r.clone(),
                    }
                };
                cur = Deduction::Comp(Box::new(proj), Box::new(cur));
                conclusion = if first { l } else { r };
            }
            4 => {
                let (p, q) = match &conclusion {
                    Formula::And(l, _) => match &**l {
                        Formula::Implies(p, q) => ((**p).clone(), (**q).clone()),
                        _ => unreachable!(),
                    },
                    _ => unreachable!(),
                };
                cur = Deduction::Comp(
                    Box::new(Deduction::Eval {
                        ctx: ctx.clone(),
                        p,
                        q: q.clone(),
                    }),
                    Box::new(cur),
                );
                conclusion = q;
            }
            5 => {
                let closed =
                    close_binder(Quantifier::Exists, &conclusion, ctx.sorts()).unwrap();
                cur = Deduction::Comp(
                    Box::new(Deduction::ExistsUnit {
                        ctx: ctx.clone(),
                        p: conclusion.clone(),
                    }),
                    Box::new(cur),
                );
                conclusion = closed;
            }
            _ => {
                let (ext, body) = open_binder(&conclusion, ctx.sorts()).unwrap();
                let bound_sort = ext.last().unwrap().clone();
                if let Some(t) =
                    random_term(sig, rng, ctx.sorts(), &bound_sort, 1)
                {
                    let counit = Deduction::ForallCounit {
                        ctx: CtxObject::new(ext),
                        p: body,
                    };
                    let inst =
                        TermMorphism::extend_with_term(sig, ctx, t).unwrap();
                    let elim = Deduction::Reindex(inst.clone(), Box::new(counit));
                    conclusion = conclusion_of(sig, &elim);
                    cur = Deduction::Comp(Box::new(elim), Box::new(cur));
                }
            }
        }
    }
    cur
}

/// Grows a random deduction with the given conclusion: starts at the identity
/// and repeatedly pre-composes applicable steps, so the conclusion never
/// changes while the premise wanders.
pub fn grow_backward(
    sig: &Signature,
    rng: &mut Rng,
    ctx: &CtxObject,
    conclusion: &Formula,
    steps: usize,
) -> Deduction {
    let mut cur = Deduction::Id {
        ctx: ctx.clone(),
        p: conclusion.clone(),
    };
    let mut premise = conclusion.clone();
    for step in 0..steps {
        let mut opts: Vec<u8> = vec![0, 0, 1, 2, 3]; // proj-steps, absurd, case
        if !ctx.is_empty() {
            opts.push(4);
        }
        if premise == Formula::Bot {
            // Anything maps out of ⊥; stop growing to keep instances varied.
            break;
        }
        match *opts.choose(rng).unwrap() {
            0 => {
                let side = small_formula(sig, rng, ctx.sorts());
                let first = rng.gen_bool(0.5);
                let (proj, next) = if first {
                    (
                        Deduction::Proj1 {
                            ctx: ctx.clone(),
                            p: premise.clone(),
                            q: side.clone(),
                        },
                        Formula::and(premise.clone(), side),
                    )
                } else {
                    (
                        Deduction::Proj2 {
                            ctx: ctx.clone(),
                            p: side.clone(),
                            q: premise.clone(),
                        },
                        Formula::and(side, premise.clone()),
                    )
                };
                cur = Deduction::Comp(Box::new(cur), Box::new(proj));
                premise = next;
            }
            1 => {
                cur = Deduction::Comp(
                    Box::new(cur),
                    Box::new(Deduction::Absurd {
                        ctx: ctx.clone(),
                        p: premise.clone(),
                    }),
                );
                premise = Formula::Bot;
            }
            2 => {
                // Case keeps the shared conclusion and disjoins the premises.
                let sibling = grow_backward(sig, rng, ctx, conclusion, (steps - step) / 2);
                let sib_prem = premise_of(sig, &sibling);
                cur = Deduction::Case(Box::new(cur), Box::new(sibling));
                premise = Formula::or(premise.clone(), sib_prem);
            }
            3 => {
                let p = small_formula(sig, rng, ctx.sorts());
                let ev = Deduction::Eval {
                    ctx: ctx.clone(),
                    p: p.clone(),
                    q: premise.clone(),
                };
                cur = Deduction::Comp(Box::new(cur), Box::new(ev));
                premise = Formula::and(
                    Formula::implies(p.clone(), premise.clone()),
                    p,
                );
            }
            _ => {
                let counit = Deduction::ForallCounit {
                    ctx: ctx.clone(),
                    p: premise.clone(),
                };
                let closed =
                    close_binder(Quantifier::Forall, &premise, ctx.sorts()).unwrap();
                cur = Deduction::Comp(Box::new(cur), Box::new(counit));
                premise = closed;
            }
        }
    }
    cur
}

/// The conclusion a deduction typechecks to; panics on ill-typed input, so
/// only for generator-internal use on constructions that are correct by
/// shape.
pub fn conclusion_of(sig: &Signature, d: &Deduction) -> Formula {
    crate::proof::typecheck(sig, d)
        .expect("generated deduction typechecks")
        .conclusion
}

/// The premise a deduction typechecks to; same caveats as [`conclusion_of`].
pub fn premise_of(sig: &Signature, d: &Deduction) -> Formula {
    crate::proof::typecheck(sig, d)
        .expect("generated deduction typechecks")
        .premise
}

/// Evaluation environments: every assignment of carrier indices to a context,
/// given per-slot carrier sizes.
pub fn all_points(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        let mut next = Vec::with_capacity(out.len() * n);
        for p in &out {
            for i in 0..n {
                let mut q = p.clone();
                q.push(i);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// All terms of the given sort over the positional context of `sorts`, up to
/// the given depth. Used by exhaustive suites.
pub fn all_terms(
    sig: &Signature,
    sorts: &[String],
    sort: &str,
    depth: usize,
) -> Vec<Term> {
    let mut out: Vec<Term> = positional_vars(sorts)
        .into_iter()
        .filter(|v| v.sort == sort)
        .map(Term::Var)
        .collect();
    if depth == 0 {
        out.extend(
            sig.functions()
                .filter(|(_, d)| d.codomain == sort && d.arity.is_empty())
                .map(|(n, _)| Term::app(n.clone(), vec![])),
        );
        return out;
    }
    for (name, decl) in sig.functions() {
        if decl.codomain != sort {
            continue;
        }
        let mut arg_choices: Vec<Vec<Term>> = Vec::new();
        for s in &decl.arity {
            arg_choices.push(all_terms(sig, sorts, s, depth - 1));
        }
        let mut combos: Vec<Vec<Term>> = vec![Vec::new()];
        for choices in &arg_choices {
            let mut next = Vec::new();
            for c in &combos {
                for t in choices {
                    let mut c2 = c.clone();
                    c2.push(t.clone());
                    next.push(c2);
                }
            }
            combos = next;
        }
        out.extend(combos.into_iter().map(|args| Term::app(name.clone(), args)));
    }
    out.sort();
    out.dedup();
    out
}

/// Convenience: the positional [`Context`] of a sort list.
pub fn positional_context(sorts: &[String]) -> Context {
    Context::positional(sorts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::typecheck;
    use crate::syntax::is_canonical;

    #[test]
    fn random_formulas_are_canonical() {
        let sig = test_signature();
        let mut rng = rng_from_seed(1);
        for _ in 0..200 {
            let ctx = random_ctx(&sig, &mut rng, 3);
            let phi = random_formula(&sig, &mut rng, ctx.sorts(), 3, 2, 2);
            assert!(is_canonical(&phi, ctx.sorts()), "{phi} over {ctx}");
            sig.validate_formula(&phi).unwrap();
        }
    }

    #[test]
    fn random_morphisms_typecheck() {
        let sig = test_signature();
        let mut rng = rng_from_seed(2);
        for _ in 0..100 {
            let dom = random_ctx(&sig, &mut rng, 3);
            let t = random_morphism_from(&sig, &mut rng, &dom, &GenBounds::default());
            assert_eq!(t.dom(), &dom);
        }
    }

    #[test]
    fn grown_deductions_typecheck_with_fixed_ends() {
        let sig = test_signature();
        let mut rng = rng_from_seed(3);
        for _ in 0..100 {
            let ctx = random_ctx(&sig, &mut rng, 2);
            let phi = random_formula(&sig, &mut rng, ctx.sorts(), 2, 1, 2);
            let fwd = grow_forward(&sig, &mut rng, &ctx, &phi, 4);
            let s = typecheck(&sig, &fwd).unwrap();
            assert_eq!(s.premise, phi);
            assert_eq!(s.context, ctx);

            let bwd = grow_backward(&sig, &mut rng, &ctx, &phi, 4);
            let s = typecheck(&sig, &bwd).unwrap();
            assert_eq!(s.conclusion, phi);
            assert_eq!(s.context, ctx);
        }
    }

    #[test]
    fn all_terms_enumerates_depth_zero() {
        let sig = test_signature();
        // Over context (A): depth-0 terms of sort A are x1 and the constant.
        let ts = all_terms(&sig, &["A".into()], "A", 0);
        assert_eq!(ts.len(), 2);
    }

    #[test]
    fn all_points_cartesian() {
        assert_eq!(all_points(&[2, 3]).len(), 6);
        assert_eq!(all_points(&[]), vec![Vec::<usize>::new()]);
    }
}
