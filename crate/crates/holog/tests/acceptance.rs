//! The kernel's top-level behavioral guarantees, one integration test per
//! guarantee. Each test ends with a one-line verdict (visible with
//! `--nocapture`); the harness's own per-test line carries the same
//! pass/fail signal.
//!
//! The guarantees, in order:
//! 1. the substitution and alpha-equivalence laws of the syntax layer;
//! 2. category laws and the product universal property of the context
//!    category, exhaustively over a bounded morphism universe;
//! 3. the generated proof relations evaluate to equal morphisms in both
//!    backends;
//! 4. proof-set non-emptiness in the set backend coincides with classical
//!    truth, exhaustively over a bounded formula class;
//! 5.–8. the groupoid reading of concrete sentences (contractibility,
//!    connectedness, double-negation shifts, pointwise equality of maps)
//!    matches direct combinatorial computation;
//! 9. homotopy-equivalent structures satisfy the same sentences;
//! 10. Frobenius reciprocity and Beck–Chevalley at scale.

use std::collections::{BTreeMap, BTreeSet};

use holog::gen::{self, rng_from_seed, test_signature, test_signature_one_sort, GenBounds};
use holog::groupoid::{
    all_functors, groupoid_equivalent, natural_isos, FinGroupoid, GroupoidModel,
    GroupoidStructure, PlainFunctor, SymbolFunctor,
};
use holog::invariance::{equivalence_suite, invariance_report};
use holog::model::{
    check_beck_chevalley, check_frobenius, evaluate, interpret_formula, Model, ModelError,
};
use holog::proof::relations::{basic_relation_instances, RelationFamily};
use holog::proof::{derived, typecheck, Deduction};
use holog::set_model::{all_structures, lauchli, tarski_truth, SetModel, SetStructure};
use holog::syntax::{
    alpha_eq, bound_vars, canonicalize, close_binder, free_vars, freshen_bound, parse_formula,
    subst_term, Context, Formula, FuncDecl, Quantifier, Signature, Term, Var,
};
use holog::term_cat::{reindex_formula, CtxObject, TermMorphism};

/// Parses and canonicalizes a formula over the positional context of `sorts`.
fn parse_in(sig: &Signature, sorts: &[String], text: &str) -> Formula {
    let ctx = Context::positional(sorts);
    let raw = parse_formula(text, sig, &ctx).unwrap();
    canonicalize(&raw, &ctx).unwrap()
}

/// A signature with one sort and no function symbols, for sentences about
/// bare carriers.
fn sort_only_sig() -> Signature {
    Signature::new(vec!["A".into()], vec![]).unwrap()
}

/// Interprets a single groupoid carrier for [`sort_only_sig`].
fn bare_carrier(sig: &Signature, g: FinGroupoid) -> GroupoidStructure {
    GroupoidStructure::build(
        sig,
        BTreeMap::from([("A".to_string(), g)]),
        |_, _| 0,
        |_, _| 0,
    )
    .unwrap()
}

/// Whether a closed formula has a non-empty fiber in a groupoid structure.
fn grpd_inhabited(sig: &Signature, st: &GroupoidStructure, phi: &Formula) -> bool {
    let m = GroupoidModel::new(sig, st);
    let p = interpret_formula(&m, sig, &CtxObject::empty(), phi).unwrap();
    m.inhabited(&p, &[]).unwrap()
}

/// Two-sort set structure with the canonical mixing tables; carriers of
/// sizes `a` and `b`.
fn two_sort_set(sizes: (usize, usize)) -> (Signature, SetStructure) {
    let sig = test_signature();
    let (a, b) = sizes;
    let st = SetStructure::build(
        &sig,
        &BTreeMap::from([("A".to_string(), a), ("B".to_string(), b)]),
        |name, args| match name {
            "a" => 0,
            "h" => args[0] % b,
            "m" => (args[0] + args[1]) % a,
            _ => (args[0] + 1) % b,
        },
    )
    .unwrap();
    (sig, st)
}

/// Two-sort groupoid structure with non-discrete carriers: `A` is a
/// one-object order-two symmetry, `B` adds a rigid second component, and
/// the symbols mix the symmetries.
fn two_sort_grpd() -> (Signature, GroupoidStructure) {
    let sig = test_signature();
    let a = FinGroupoid::cyclic_group(2);
    let b = FinGroupoid::disjoint_union(&FinGroupoid::cyclic_group(2), &FinGroupoid::discrete(1));
    let st = GroupoidStructure::build(
        &sig,
        BTreeMap::from([("A".to_string(), a), ("B".to_string(), b)]),
        |name, _| match name {
            "e" => 1,
            _ => 0,
        },
        |name, t| match name {
            "a" => 0,
            "h" => t[0],
            "m" => (t[0] + usize::from(t[1] == 1)) % 2,
            _ => 2,
        },
    )
    .unwrap();
    (sig, st)
}

/// One-sort structures for the theorem-evaluation checks: a three-element
/// set and the order-two symmetry as a one-object groupoid.
fn one_sort_models() -> (Signature, SetStructure, GroupoidStructure) {
    let sig = test_signature_one_sort();
    let set = SetStructure::build(
        &sig,
        &BTreeMap::from([("A".to_string(), 3usize)]),
        |name, args| match name {
            "c" => 1,
            "f" => (args[0] + 1) % 3,
            _ => (args[0] * args[1]) % 3,
        },
    )
    .unwrap();
    let grp = GroupoidStructure::build(
        &sig,
        BTreeMap::from([("A".to_string(), FinGroupoid::cyclic_group(2))]),
        |_, _| 0,
        |name, t| match name {
            "c" => 0,
            "f" => t[0],
            _ => (t[0] + t[1]) % 2,
        },
    )
    .unwrap();
    (sig, set, grp)
}

// ---------------------------------------------------------------------------
// 1. Substitution and alpha-equivalence laws.
// ---------------------------------------------------------------------------

#[test]
fn substitution_and_alpha_equivalence_laws_hold() {
    let sig = test_signature();
    let mut rng = rng_from_seed(101);
    const N: usize = 1000;

    // The equivalence-relation properties, preservation of free variables,
    // freshness, and classification of alpha-classes by canonical forms.
    let avoid1: BTreeSet<String> = ["b1", "b2", "b3"].map(String::from).into();
    let avoid2: BTreeSet<String> = ["v1", "v2"].map(String::from).into();
    for _ in 0..N {
        let ctx = gen::random_ctx(&sig, &mut rng, 3);
        let sorts = ctx.sorts().to_vec();
        let phi = gen::random_formula(&sig, &mut rng, &sorts, 4, 2, 2);
        let psi1 = freshen_bound(&phi, &avoid1);
        let psi2 = freshen_bound(&psi1, &avoid2);
        assert!(alpha_eq(&phi, &phi), "reflexivity broken for {phi}");
        assert!(
            alpha_eq(&phi, &psi1) && alpha_eq(&psi1, &phi),
            "renaming {phi} to {psi1} left the alpha-class"
        );
        assert!(
            alpha_eq(&psi1, &psi2) && alpha_eq(&phi, &psi2),
            "transitivity broken between {phi} and {psi2}"
        );
        assert_eq!(free_vars(&phi), free_vars(&psi1), "free variables moved");
        for v in bound_vars(&psi1) {
            assert!(!avoid1.contains(&v.name), "binder {} not avoided", v.name);
        }
        let positional = Context::positional(&sorts);
        assert_eq!(
            canonicalize(&psi2, &positional).unwrap(),
            phi,
            "alpha-variants canonicalized apart"
        );
    }

    // Substitution is functorial: composites and identities.
    for _ in 0..N {
        let x = gen::random_ctx(&sig, &mut rng, 3);
        let y = gen::random_ctx(&sig, &mut rng, 3);
        let z = gen::random_ctx(&sig, &mut rng, 3);
        let phi = gen::random_formula(&sig, &mut rng, x.sorts(), 4, 2, 2);
        let t1 = gen::random_term_morphism(&sig, &mut rng, &y, &x, 2).unwrap();
        let t2 = gen::random_term_morphism(&sig, &mut rng, &z, &y, 2).unwrap();
        let stepwise =
            reindex_formula(&sig, &reindex_formula(&sig, &phi, &t1).unwrap(), &t2).unwrap();
        let joined = TermMorphism::compose(&sig, &t1, &t2).unwrap();
        assert_eq!(
            stepwise,
            reindex_formula(&sig, &phi, &joined).unwrap(),
            "substitution along {t1:?} then {t2:?} differs from the composite"
        );
        assert_eq!(
            reindex_formula(&sig, &phi, &TermMorphism::identity(&x)).unwrap(),
            phi,
            "identity substitution moved {phi}"
        );
    }

    // Substitution commutes with every formula-forming operation.
    for _ in 0..N {
        let x = gen::random_ctx(&sig, &mut rng, 3);
        let z = gen::random_ctx(&sig, &mut rng, 2);
        let t = gen::random_term_morphism(&sig, &mut rng, &z, &x, 2).unwrap();
        let re = |f: &Formula| reindex_formula(&sig, f, &t).unwrap();
        let p = gen::random_formula(&sig, &mut rng, x.sorts(), 3, 1, 2);
        let q = gen::random_formula(&sig, &mut rng, x.sorts(), 3, 1, 2);
        assert_eq!(re(&Formula::Top), Formula::Top);
        assert_eq!(re(&Formula::Bot), Formula::Bot);
        assert_eq!(
            re(&Formula::and(p.clone(), q.clone())),
            Formula::and(re(&p), re(&q))
        );
        assert_eq!(
            re(&Formula::or(p.clone(), q.clone())),
            Formula::or(re(&p), re(&q))
        );
        assert_eq!(
            re(&Formula::implies(p.clone(), q.clone())),
            Formula::implies(re(&p), re(&q))
        );

        let s = gen::random_term(&sig, &mut rng, x.sorts(), "A", 2).unwrap();
        let u = gen::random_term(&sig, &mut rng, x.sorts(), "A", 2).unwrap();
        let map: BTreeMap<Var, Term> = x
            .sorts()
            .iter()
            .enumerate()
            .map(|(i, srt)| (Var::positional(i + 1, srt.clone()), t.terms()[i].clone()))
            .collect();
        assert_eq!(
            re(&Formula::Eq("A".into(), s.clone(), u.clone())),
            Formula::Eq("A".into(), subst_term(&s, &map), subst_term(&u, &map)),
            "substitution into an equality is not componentwise"
        );

        for sort in ["A", "B"] {
            let mut ext = x.sorts().to_vec();
            ext.push(sort.to_string());
            let body = gen::random_formula(&sig, &mut rng, &ext, 2, 1, 1);
            let crossed = t.cross_id(&[sort.to_string()]);
            let mut zext = z.sorts().to_vec();
            zext.push(sort.to_string());
            for quant in [Quantifier::Forall, Quantifier::Exists] {
                let closed = close_binder(quant, &body, &ext).unwrap();
                let pushed =
                    close_binder(quant, &reindex_formula(&sig, &body, &crossed).unwrap(), &zext)
                        .unwrap();
                assert_eq!(
                    re(&closed),
                    pushed,
                    "substitution does not commute with the binder on {body}"
                );
            }
        }
    }

    println!("acceptance: substitution/alpha-equivalence laws, {N} randomized instances per law: pass");
}

// ---------------------------------------------------------------------------
// 2. Category laws and products of the context category, exhaustively.
// ---------------------------------------------------------------------------

/// Cartesian product of per-slot choices.
fn slot_tuples<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for c in choices {
        let mut next = Vec::new();
        for partial in &out {
            for x in c {
                let mut ext = partial.clone();
                ext.push(x.clone());
                next.push(ext);
            }
        }
        out = next;
    }
    out
}

#[test]
fn context_category_laws_and_products_hold_exhaustively() {
    // Two sorts and exactly two function symbols, one of them mixed-arity.
    let sig = Signature::new(
        vec!["A".into(), "B".into()],
        vec![
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
        ],
    )
    .unwrap();

    // Every context of length <= 2 and every morphism whose component terms
    // have depth <= 2.
    let mut objects = vec![CtxObject::empty()];
    for s in ["A", "B"] {
        objects.push(CtxObject::new(vec![s.into()]));
    }
    for s in ["A", "B"] {
        for t in ["A", "B"] {
            objects.push(CtxObject::new(vec![s.into(), t.into()]));
        }
    }
    let mut hom: BTreeMap<(usize, usize), Vec<TermMorphism>> = BTreeMap::new();
    for (i, dom) in objects.iter().enumerate() {
        for (j, cod) in objects.iter().enumerate() {
            let per_slot: Vec<Vec<Term>> = cod
                .sorts()
                .iter()
                .map(|s| gen::all_terms(&sig, dom.sorts(), s, 2))
                .collect();
            let morphisms = slot_tuples(&per_slot)
                .into_iter()
                .map(|ts| TermMorphism::new(&sig, dom.clone(), cod.clone(), ts).unwrap())
                .collect();
            hom.insert((i, j), morphisms);
        }
    }
    let total: usize = hom.values().map(Vec::len).sum();
    assert!(total >= 200, "only {total} morphisms in the universe");

    // Terminal object: exactly one morphism into the empty context, and it
    // is the empty tuple.
    for (i, x) in objects.iter().enumerate() {
        assert_eq!(hom[&(i, 0)].len(), 1);
        assert_eq!(hom[&(i, 0)][0], TermMorphism::tuple(x, &[]).unwrap());
    }

    // Unit laws for every morphism.
    for (i, x) in objects.iter().enumerate() {
        let id_dom = TermMorphism::identity(x);
        assert!(hom[&(i, i)].contains(&id_dom), "identity missing at {x}");
        for (j, y) in objects.iter().enumerate() {
            let id_cod = TermMorphism::identity(y);
            for f in &hom[&(i, j)] {
                assert_eq!(TermMorphism::compose(&sig, &id_cod, f).unwrap(), *f);
                assert_eq!(TermMorphism::compose(&sig, f, &id_dom).unwrap(), *f);
            }
        }
    }

    // Associativity over every composable triple in the universe.
    let mut triples = 0usize;
    for i in 0..objects.len() {
        for j in 0..objects.len() {
            for f in &hom[&(i, j)] {
                for k in 0..objects.len() {
                    for g in &hom[&(j, k)] {
                        let gf = TermMorphism::compose(&sig, g, f).unwrap();
                        for l in 0..objects.len() {
                            for h in &hom[&(k, l)] {
                                let hg = TermMorphism::compose(&sig, h, g).unwrap();
                                assert_eq!(
                                    TermMorphism::compose(&sig, &hg, f).unwrap(),
                                    TermMorphism::compose(&sig, h, &gf).unwrap(),
                                    "associativity broken at {f:?}; {g:?}; {h:?}"
                                );
                                triples += 1;
                            }
                        }
                    }
                }
            }
        }
    }

    // Product universal property: pairing laws and uniqueness, for every
    // product that stays inside the object universe.
    let position = |o: &CtxObject| objects.iter().position(|p| p == o).unwrap();
    let mut pairings = 0usize;
    for x in &objects {
        for y in &objects {
            if x.len() + y.len() > 2 {
                continue;
            }
            let prod = x.concat(y);
            let projection = |lo: usize, hi: usize, cod: &CtxObject| {
                let terms: Vec<Term> = (lo..hi)
                    .map(|i| Term::Var(Var::positional(i + 1, prod.sorts()[i].clone())))
                    .collect();
                TermMorphism::new(&sig, prod.clone(), cod.clone(), terms).unwrap()
            };
            let proj_x = projection(0, x.len(), x);
            let proj_y = projection(x.len(), prod.len(), y);
            let (xi, yi, pi) = (position(x), position(y), position(&prod));
            for (ci, c) in objects.iter().enumerate() {
                for f in &hom[&(ci, xi)] {
                    for g in &hom[&(ci, yi)] {
                        let paired = TermMorphism::tuple(c, &[f.clone(), g.clone()]).unwrap();
                        assert_eq!(TermMorphism::compose(&sig, &proj_x, &paired).unwrap(), *f);
                        assert_eq!(TermMorphism::compose(&sig, &proj_y, &paired).unwrap(), *g);
                        pairings += 1;
                    }
                }
                for h in &hom[&(ci, pi)] {
                    let components = [
                        TermMorphism::compose(&sig, &proj_x, h).unwrap(),
                        TermMorphism::compose(&sig, &proj_y, h).unwrap(),
                    ];
                    assert_eq!(
                        TermMorphism::tuple(c, &components).unwrap(),
                        *h,
                        "pairing is not unique at {h:?}"
                    );
                }
            }
        }
    }

    println!(
        "acceptance: context category laws ({total} morphisms, {triples} triples) and product \
         property ({pairings} pairings): pass"
    );
}

// ---------------------------------------------------------------------------
// 3. Relation families evaluate equally in both backends.
// ---------------------------------------------------------------------------

#[test]
fn relation_families_evaluate_equally_in_both_backends() {
    let (sig, set_st) = two_sort_set((3, 2));
    let (_, grpd_st) = two_sort_grpd();
    let set = SetModel::new(&sig, &set_st).with_max_fiber(200_000);
    let grpd = GroupoidModel::new(&sig, &grpd_st).with_max_fiber(600);
    let instances = basic_relation_instances(&sig, 2025, 30, &GenBounds::default());

    let mut set_counts: BTreeMap<RelationFamily, usize> = BTreeMap::new();
    let mut grpd_counts: BTreeMap<RelationFamily, usize> = BTreeMap::new();
    for inst in &instances {
        match (
            evaluate(&set, &sig, &inst.lhs),
            evaluate(&set, &sig, &inst.rhs),
        ) {
            (Ok(l), Ok(r)) => {
                assert_eq!(l, r, "set backend broke {}", inst.equation);
                *set_counts.entry(inst.family).or_default() += 1;
            }
            (Err(ModelError::Overflow { .. }), _) | (_, Err(ModelError::Overflow { .. })) => {}
            (Err(e), _) | (_, Err(e)) => panic!("set evaluation of {} failed: {e}", inst.equation),
        }
        match (
            evaluate(&grpd, &sig, &inst.lhs),
            evaluate(&grpd, &sig, &inst.rhs),
        ) {
            (Ok(l), Ok(r)) => {
                assert_eq!(l, r, "groupoid backend broke {}", inst.equation);
                *grpd_counts.entry(inst.family).or_default() += 1;
            }
            (Err(ModelError::Overflow { .. }), _) | (_, Err(ModelError::Overflow { .. })) => {}
            (Err(e), _) | (_, Err(e)) => {
                panic!("groupoid evaluation of {} failed: {e}", inst.equation)
            }
        }
    }
    for family in RelationFamily::ALL {
        let s = set_counts.get(&family).copied().unwrap_or(0);
        let g = grpd_counts.get(&family).copied().unwrap_or(0);
        assert!(s >= 20, "only {s} set instances for {family}");
        assert!(g >= 20, "only {g} groupoid instances for {family}");
    }
    let s: usize = set_counts.values().sum();
    let g: usize = grpd_counts.values().sum();
    println!("acceptance: relation families equal in both backends ({s} set / {g} groupoid instances): pass");
}

// ---------------------------------------------------------------------------
// 4. Proof-set non-emptiness coincides with classical truth, exhaustively.
// ---------------------------------------------------------------------------

/// All canonical closed formulas with exactly `nodes` connective/quantifier
/// nodes over a context of `k` copies of the single sort, with at most
/// `2 - k` further binders and atom terms of depth <= 1.
fn formulas_exactly(
    sig: &Signature,
    k: usize,
    nodes: usize,
    memo: &mut BTreeMap<(usize, usize), Vec<Formula>>,
) -> Vec<Formula> {
    if let Some(v) = memo.get(&(k, nodes)) {
        return v.clone();
    }
    let sorts: Vec<String> = vec!["A".to_string(); k];
    let mut out: BTreeSet<Formula> = BTreeSet::new();
    if nodes == 0 {
        out.insert(Formula::Top);
        out.insert(Formula::Bot);
        let terms = gen::all_terms(sig, &sorts, "A", 1);
        for s in &terms {
            for t in &terms {
                out.insert(Formula::Eq("A".into(), s.clone(), t.clone()));
            }
        }
    } else {
        for split in 0..nodes {
            let lefts = formulas_exactly(sig, k, split, memo);
            let rights = formulas_exactly(sig, k, nodes - 1 - split, memo);
            for p in &lefts {
                for q in &rights {
                    out.insert(Formula::and(p.clone(), q.clone()));
                    out.insert(Formula::or(p.clone(), q.clone()));
                    out.insert(Formula::implies(p.clone(), q.clone()));
                }
            }
        }
        if k < 2 {
            let mut ext = sorts.clone();
            ext.push("A".to_string());
            for body in formulas_exactly(sig, k + 1, nodes - 1, memo) {
                out.insert(close_binder(Quantifier::Forall, &body, &ext).unwrap());
                out.insert(close_binder(Quantifier::Exists, &body, &ext).unwrap());
            }
        }
    }
    let v: Vec<Formula> = out.into_iter().collect();
    memo.insert((k, nodes), v.clone());
    v
}

#[test]
fn proof_set_nonemptiness_matches_classical_truth_exhaustively() {
    // One sort, one binary symbol.
    let sig = Signature::new(
        vec!["A".into()],
        vec![(
            "p".into(),
            FuncDecl {
                arity: vec!["A".into(), "A".into()],
                codomain: "A".into(),
            },
        )],
    )
    .unwrap();

    let mut memo = BTreeMap::new();
    let mut pool: Vec<Formula> = Vec::new();
    for nodes in 0..=3 {
        pool.extend(formulas_exactly(&sig, 0, nodes, &mut memo));
    }
    for phi in &pool {
        assert!(phi.connective_depth() <= 3 && phi.quantifier_depth() <= 2);
    }
    assert!(pool.len() >= 40_000, "pool has only {} formulas", pool.len());

    let structures = all_structures(&sig, &[0, 1, 2]);
    assert_eq!(structures.len(), 18, "2^(2*2) tables of size 2 plus the two smaller carriers");

    let ctx = Context::positional(&[]);
    let empty = CtxObject::empty();
    let mut checks = 0usize;
    for st in &structures {
        for phi in &pool {
            let truth = tarski_truth(&sig, st, phi, &ctx, &[]).unwrap();
            let proofs = lauchli(&sig, st, &empty, phi).unwrap();
            assert_eq!(
                truth,
                !proofs.fiber(&[]).unwrap().is_empty(),
                "classical truth and proof sets disagree on {phi}"
            );
            checks += 1;
        }
    }
    println!(
        "acceptance: proof-set non-emptiness = classical truth on {} formulas x {} structures \
         ({checks} checks): pass",
        pool.len(),
        structures.len()
    );
}

// ---------------------------------------------------------------------------
// 5. The contractibility sentence separates carriers.
// ---------------------------------------------------------------------------

#[test]
fn contractibility_sentence_separates_carriers() {
    let sig = sort_only_sig();
    let phi = parse_in(&sig, &[], "exists x:A. forall y:A. x = y");
    let cases: Vec<(FinGroupoid, bool, &str)> = vec![
        (FinGroupoid::discrete(1), true, "terminal"),
        (FinGroupoid::indiscrete(2), true, "indiscrete pair"),
        (FinGroupoid::discrete(2), false, "discrete pair"),
        (FinGroupoid::cyclic_group(2), false, "one-object order-two symmetry"),
    ];
    for (g, expect, name) in cases {
        let st = bare_carrier(&sig, g);
        assert_eq!(
            grpd_inhabited(&sig, &st, &phi),
            expect,
            "contractibility verdict wrong on {name}"
        );
    }
    println!("acceptance: contractibility sentence separates the four carriers: pass");
}

// ---------------------------------------------------------------------------
// 6. The double-negated variant tracks connectedness.
// ---------------------------------------------------------------------------

#[test]
fn weak_contractibility_tracks_connectedness() {
    let sig = sort_only_sig();
    let phi = parse_in(&sig, &[], "exists x:A. forall y:A. !!(x = y)");
    let z2 = FinGroupoid::cyclic_group(2);
    let cases: Vec<(FinGroupoid, &str)> = vec![
        (FinGroupoid::discrete(0), "empty"),
        (FinGroupoid::discrete(1), "terminal"),
        (FinGroupoid::discrete(2), "discrete pair"),
        (FinGroupoid::indiscrete(2), "indiscrete pair"),
        (FinGroupoid::indiscrete(3), "indiscrete triple"),
        (z2.clone(), "one-object order-two symmetry"),
        (FinGroupoid::cyclic_group(3), "one-object order-three symmetry"),
        (FinGroupoid::product(&FinGroupoid::indiscrete(2), &z2), "connected two-object symmetry"),
        (FinGroupoid::disjoint_union(&z2, &FinGroupoid::discrete(1)), "symmetry plus point"),
    ];
    assert!(cases.len() >= 6);
    for (g, name) in cases {
        let connected_nonempty = g.components().len() == 1;
        let st = bare_carrier(&sig, g);
        assert_eq!(
            grpd_inhabited(&sig, &st, &phi),
            connected_nonempty,
            "connectedness verdict wrong on {name}"
        );
    }
    println!("acceptance: double-negated contractibility = non-empty and connected, 9 carriers: pass");
}

// ---------------------------------------------------------------------------
// 7. Double-negation shift fails where unprovable; proved sentences hold.
// ---------------------------------------------------------------------------

#[test]
fn double_negation_shift_fails_on_symmetry_but_theorems_hold() {
    // On the one-object order-two symmetry, weak contractibility holds but
    // contractibility does not, so the connecting implication has an empty
    // fiber.
    let bare = sort_only_sig();
    let z2 = bare_carrier(&bare, FinGroupoid::cyclic_group(2));
    let shift = parse_in(
        &bare,
        &[],
        "(exists x:A. forall y:A. !!(x = y)) -> (exists x:A. forall y:A. x = y)",
    );
    assert!(
        !grpd_inhabited(&bare, &z2, &shift),
        "the double-negation shift should have an empty fiber on the symmetry carrier"
    );

    // Closed theorems with explicit deduction terms evaluate in both
    // backends, and their conclusions are inhabited.
    let (sig, set_st, grp_st) = one_sort_models();
    let ctx_a = CtxObject::new(vec!["A".into()]);
    let phi = parse_in(&sig, &[], "exists x:A. forall y:A. !!(x = y)");
    let psi = parse_in(&sig, &[], "exists x:A. forall y:A. x = y");
    let sorts_a: [String; 1] = ["A".to_string()];
    let x_eq_c = parse_in(&sig, &sorts_a, "x1 = c");
    let x_eq_x = parse_in(&sig, &sorts_a, "x1 = x1");

    let const_c = TermMorphism::new(
        &sig,
        CtxObject::empty(),
        ctx_a.clone(),
        vec![Term::app("c", vec![])],
    )
    .unwrap();
    let refl_at_c = Deduction::Reindex(const_c, Box::new(Deduction::Refl("A".into())));

    let both = Formula::and(phi.clone(), psi.clone());
    let split = Deduction::Proj2 {
        ctx: CtxObject::empty(),
        p: Formula::Top,
        q: both.clone(),
    };
    let swap = Deduction::Curry(Box::new(Deduction::Pair(
        Box::new(Deduction::Comp(
            Box::new(Deduction::Proj2 {
                ctx: CtxObject::empty(),
                p: phi.clone(),
                q: psi.clone(),
            }),
            Box::new(split.clone()),
        )),
        Box::new(Deduction::Comp(
            Box::new(Deduction::Proj1 {
                ctx: CtxObject::empty(),
                p: phi.clone(),
                q: psi.clone(),
            }),
            Box::new(split),
        )),
    )));

    let witness_c = Deduction::Comp(
        Box::new(derived::exists_intro(&sig, &CtxObject::empty(), x_eq_c, Term::app("c", vec![])).unwrap()),
        Box::new(refl_at_c.clone()),
    );

    let negated = Formula::not(x_eq_x.clone());
    let stable_refl = Deduction::Lambda(Box::new(Deduction::Curry(Box::new(Deduction::Comp(
        Box::new(Deduction::Eval {
            ctx: ctx_a.clone(),
            p: x_eq_x.clone(),
            q: Formula::Bot,
        }),
        Box::new(Deduction::Pair(
            Box::new(Deduction::Proj2 {
                ctx: ctx_a.clone(),
                p: Formula::Top,
                q: negated.clone(),
            }),
            Box::new(Deduction::Comp(
                Box::new(Deduction::Refl("A".into())),
                Box::new(Deduction::Bang {
                    ctx: ctx_a.clone(),
                    p: Formula::and(Formula::Top, negated),
                }),
            )),
        )),
    )))));

    let theorems: Vec<(&str, Deduction)> = vec![
        ("constant self-equality", refl_at_c),
        ("universal self-equality", Deduction::Lambda(Box::new(Deduction::Refl("A".into())))),
        (
            "self-implication",
            Deduction::Curry(Box::new(Deduction::Proj2 {
                ctx: CtxObject::empty(),
                p: Formula::Top,
                q: phi.clone(),
            })),
        ),
        ("conjunction symmetry", swap),
        ("existential witness", witness_c),
        ("stability of self-equality", stable_refl),
    ];

    let set = SetModel::new(&sig, &set_st);
    let grpd = GroupoidModel::new(&sig, &grp_st);
    for (name, d) in &theorems {
        let seq = typecheck(&sig, d).unwrap();
        assert_eq!(seq.premise, Formula::Top, "{name} is not a theorem from truth");
        assert!(seq.context.is_empty(), "{name} is not closed");
        evaluate(&set, &sig, d).unwrap();
        evaluate(&grpd, &sig, d).unwrap();
        let in_set = interpret_formula(&set, &sig, &seq.context, &seq.conclusion).unwrap();
        assert!(
            set.inhabited(&in_set, &[]).unwrap(),
            "{name} has an empty proof set"
        );
        let in_grpd = interpret_formula(&grpd, &sig, &seq.context, &seq.conclusion).unwrap();
        assert!(
            grpd.inhabited(&in_grpd, &[]).unwrap(),
            "{name} has an empty fiber groupoid"
        );
    }
    println!(
        "acceptance: double-negation shift uninhabited on the symmetry carrier; {} proved \
         sentences inhabited in both backends: pass",
        theorems.len()
    );
}

// ---------------------------------------------------------------------------
// 8. Pointwise-equality sentences match natural-transformation search.
// ---------------------------------------------------------------------------

/// Wraps a plain functor as the interpretation of a unary symbol.
fn unary_symbol(p: &FinGroupoid, f: &PlainFunctor) -> SymbolFunctor {
    SymbolFunctor {
        obj_map: (0..p.n_objects()).map(|o| (vec![o], f.obj_map[o])).collect(),
        mor_map: (0..p.n_mors()).map(|m| (vec![m], f.mor_map[m])).collect(),
    }
}

/// Small groupoids with at most two objects and hom-sets of at most four
/// morphisms.
fn small_carriers() -> Vec<FinGroupoid> {
    let z2 = FinGroupoid::cyclic_group(2);
    let list = vec![
        FinGroupoid::discrete(1),
        FinGroupoid::discrete(2),
        FinGroupoid::indiscrete(2),
        z2.clone(),
        FinGroupoid::cyclic_group(4),
        FinGroupoid::product(&FinGroupoid::indiscrete(2), &z2),
        FinGroupoid::disjoint_union(&z2, &FinGroupoid::discrete(1)),
    ];
    for g in &list {
        assert!(g.n_objects() <= 2);
        for a in 0..g.n_objects() {
            for b in 0..g.n_objects() {
                assert!(g.hom(a, b).len() <= 4);
            }
        }
    }
    list
}

#[test]
fn pointwise_equality_sentences_match_natural_transformation_search() {
    let carriers = small_carriers();

    // One sentence comparing two parallel symbols.
    let sig = Signature::new(
        vec!["A".into(), "B".into()],
        vec![
            (
                "f".into(),
                FuncDecl {
                    arity: vec!["A".into()],
                    codomain: "B".into(),
                },
            ),
            (
                "g".into(),
                FuncDecl {
                    arity: vec!["A".into()],
                    codomain: "B".into(),
                },
            ),
        ],
    )
    .unwrap();
    let agree = parse_in(&sig, &[], "forall x:A. f(x) = g(x)");
    let mut pairs = 0usize;
    for p in &carriers {
        for q in &carriers {
            let functors = all_functors(p, q, 100_000).unwrap();
            for ff in &functors {
                for gg in &functors {
                    let st = GroupoidStructure::new(
                        &sig,
                        BTreeMap::from([("A".to_string(), p.clone()), ("B".to_string(), q.clone())]),
                        BTreeMap::from([
                            ("f".to_string(), unary_symbol(p, ff)),
                            ("g".to_string(), unary_symbol(p, gg)),
                        ]),
                    )
                    .unwrap();
                    assert_eq!(
                        grpd_inhabited(&sig, &st, &agree),
                        !natural_isos(p, q, ff, gg).is_empty(),
                        "pointwise-equality fiber disagrees with the component search"
                    );
                    pairs += 1;
                }
            }
        }
    }

    // Two symbols in opposite directions: the equivalence sentence.
    let sig2 = Signature::new(
        vec!["A".into(), "B".into()],
        vec![
            (
                "f".into(),
                FuncDecl {
                    arity: vec!["A".into()],
                    codomain: "B".into(),
                },
            ),
            (
                "h".into(),
                FuncDecl {
                    arity: vec!["B".into()],
                    codomain: "A".into(),
                },
            ),
        ],
    )
    .unwrap();
    let inverse_pair =
        parse_in(&sig2, &[], "(forall x:A. h(f(x)) = x) & (forall y:B. f(h(y)) = y)");
    let mut pair_count = 0usize;
    for p in &carriers {
        for q in &carriers {
            let forward = all_functors(p, q, 100_000).unwrap();
            let backward = all_functors(q, p, 100_000).unwrap();
            let mut some_pair_works = false;
            for ff in &forward {
                for hh in &backward {
                    let st = GroupoidStructure::new(
                        &sig2,
                        BTreeMap::from([("A".to_string(), p.clone()), ("B".to_string(), q.clone())]),
                        BTreeMap::from([
                            ("f".to_string(), unary_symbol(p, ff)),
                            ("h".to_string(), unary_symbol(q, hh)),
                        ]),
                    )
                    .unwrap();
                    let round_p = ff.then(hh);
                    let round_q = hh.then(ff);
                    let witnessed = !natural_isos(p, p, &round_p, &PlainFunctor::identity(p))
                        .is_empty()
                        && !natural_isos(q, q, &round_q, &PlainFunctor::identity(q)).is_empty();
                    assert_eq!(
                        grpd_inhabited(&sig2, &st, &inverse_pair),
                        witnessed,
                        "equivalence sentence disagrees with the component search"
                    );
                    some_pair_works |= witnessed;
                    pair_count += 1;
                }
            }
            assert_eq!(
                some_pair_works,
                groupoid_equivalent(p, q).is_some(),
                "existence of an inverse pair disagrees with the equivalence decision"
            );
        }
    }

    println!(
        "acceptance: pointwise-equality vs component search ({pairs} parallel pairs, \
         {pair_count} inverse pairs): pass"
    );
}

// ---------------------------------------------------------------------------
// 9. Homotopy-equivalent structures satisfy the same sentences.
// ---------------------------------------------------------------------------

#[test]
fn equivalent_structures_satisfy_the_same_sentences() {
    let (sig, set_base, grpd_base) = one_sort_models();
    let max_fiber = 4_000;

    // A deterministic family of equivalences out of the symmetry carrier.
    let suite = equivalence_suite(&sig, &grpd_base, 2024, 10, 3).unwrap();
    assert!(suite.len() >= 10);

    // A fixed pool of closed sentences, kept if every structure in the
    // suite can evaluate them within the fiber bound.
    let empty = CtxObject::empty();
    let mut rng = rng_from_seed(909);
    let mut pool: Vec<Formula> = Vec::new();
    let mut seen: BTreeSet<Formula> = BTreeSet::new();
    while pool.len() < 50 && seen.len() < 5_000 {
        let phi = gen::random_closed_formula(&sig, &mut rng, 3, 2, 1);
        if !seen.insert(phi.clone()) {
            continue;
        }
        let evaluable = suite.iter().all(|(target, _)| {
            let m = GroupoidModel::new(&sig, target).with_max_fiber(max_fiber);
            interpret_formula(&m, &sig, &empty, &phi).is_ok()
        });
        if evaluable {
            pool.push(phi);
        }
    }
    assert!(pool.len() >= 50, "pool has only {} sentences", pool.len());

    for (i, (target, equivalence)) in suite.iter().enumerate() {
        for phi in &pool {
            let report = invariance_report(
                &sig,
                &grpd_base,
                target,
                equivalence,
                &empty,
                phi,
                max_fiber,
            )
            .unwrap();
            assert!(
                report.all_true(),
                "fibers differ for {phi} across equivalence {i}"
            );
        }
    }

    // Set backend: every carrier relabeling preserves proof sets.
    fn one_sort_table(name: &str, args: &[usize]) -> usize {
        match name {
            "c" => 1,
            "f" => (args[0] + 1) % 3,
            _ => (args[0] * args[1]) % 3,
        }
    }
    let sizes = BTreeMap::from([("A".to_string(), 3usize)]);
    let set_model = SetModel::new(&sig, &set_base);
    let mut rng2 = rng_from_seed(910);
    let mut set_pool: Vec<Formula> = Vec::new();
    let mut seen2: BTreeSet<Formula> = BTreeSet::new();
    while set_pool.len() < 50 && seen2.len() < 5_000 {
        let phi = gen::random_closed_formula(&sig, &mut rng2, 3, 2, 1);
        if !seen2.insert(phi.clone()) {
            continue;
        }
        if interpret_formula(&set_model, &sig, &empty, &phi).is_ok() {
            set_pool.push(phi);
        }
    }
    assert!(set_pool.len() >= 50);

    let permutations: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for perm in &permutations {
        let mut inverse = [0usize; 3];
        for (i, &pi) in perm.iter().enumerate() {
            inverse[pi] = i;
        }
        let relabeled = SetStructure::build(&sig, &sizes, |name, args| {
            let back: Vec<usize> = args.iter().map(|&a| inverse[a]).collect();
            perm[one_sort_table(name, &back)]
        })
        .unwrap();
        let relabeled_model = SetModel::new(&sig, &relabeled);
        for phi in &set_pool {
            let original = interpret_formula(&set_model, &sig, &empty, phi).unwrap();
            let moved = interpret_formula(&relabeled_model, &sig, &empty, phi).unwrap();
            assert_eq!(
                original.fiber(&[]).unwrap().len(),
                moved.fiber(&[]).unwrap().len(),
                "relabeling by {perm:?} changed the proof set of {phi}"
            );
        }
    }

    println!(
        "acceptance: {} equivalences x {} sentences invariant; {} relabelings x {} sentences \
         preserve proof sets: pass",
        suite.len(),
        pool.len(),
        permutations.len(),
        set_pool.len()
    );
}

// ---------------------------------------------------------------------------
// 10. Frobenius reciprocity and Beck–Chevalley at scale.
// ---------------------------------------------------------------------------

#[test]
fn frobenius_and_beck_chevalley_hold_broadly() {
    // Set backend: every attempted pair must hold.
    let (sig, set_st) = two_sort_set((2, 3));
    let set = SetModel::new(&sig, &set_st);
    let mut rng = rng_from_seed(404);
    let mut set_frobenius = 0usize;
    let mut set_beck = 0usize;
    while set_frobenius < 200 || set_beck < 200 {
        let ext = CtxObject::new(vec!["A".into(), "B".into()]);
        let base = ext.drop_last();
        let p_f = gen::random_formula(&sig, &mut rng, ext.sorts(), 2, 0, 1);
        let q_f = gen::random_formula(&sig, &mut rng, base.sorts(), 2, 0, 1);
        let p = interpret_formula(&set, &sig, &ext, &p_f).unwrap();
        let q = interpret_formula(&set, &sig, &base, &q_f).unwrap();
        assert!(
            check_frobenius(&set, &ext, &p, &q).unwrap(),
            "frobenius failed in the set backend for {p_f} / {q_f}"
        );
        set_frobenius += 1;

        let dom = gen::random_ctx(&sig, &mut rng, 2);
        let t = gen::random_morphism_from(&sig, &mut rng, &dom, &GenBounds::default());
        let ext_t = t.cod().concat(&CtxObject::new(vec!["B".into()]));
        let r_f = gen::random_formula(&sig, &mut rng, ext_t.sorts(), 2, 0, 1);
        let r = interpret_formula(&set, &sig, &ext_t, &r_f).unwrap();
        let (ex, fa) = check_beck_chevalley(&set, &t, "B", &r).unwrap();
        assert!(
            ex && fa,
            "beck-chevalley failed in the set backend along {t:?} on {r_f}"
        );
        set_beck += 1;
    }

    // Groupoid backend: oversized fibers are skipped, everything else must
    // hold; keep going until enough pairs were actually checked.
    let (gsig, grpd_st) = two_sort_grpd();
    let grpd = GroupoidModel::new(&gsig, &grpd_st).with_max_fiber(600);
    let mut rng = rng_from_seed(405);
    let mut grpd_frobenius = 0usize;
    let mut grpd_beck = 0usize;
    let mut attempts = 0usize;
    while (grpd_frobenius < 200 || grpd_beck < 200) && attempts < 5_000 {
        attempts += 1;
        let ext = CtxObject::new(vec!["A".into(), "B".into()]);
        let base = ext.drop_last();
        let p_f = gen::random_formula(&gsig, &mut rng, ext.sorts(), 2, 0, 1);
        let q_f = gen::random_formula(&gsig, &mut rng, base.sorts(), 2, 0, 1);
        let frobenius = interpret_formula(&grpd, &gsig, &ext, &p_f).and_then(|p| {
            let q = interpret_formula(&grpd, &gsig, &base, &q_f)?;
            check_frobenius(&grpd, &ext, &p, &q)
        });
        match frobenius {
            Ok(ok) => {
                assert!(ok, "frobenius failed in the groupoid backend for {p_f} / {q_f}");
                grpd_frobenius += 1;
            }
            Err(ModelError::Overflow { .. }) => {}
            Err(e) => panic!("frobenius setup failed: {e}"),
        }

        let dom = gen::random_ctx(&gsig, &mut rng, 2);
        let t = gen::random_morphism_from(&gsig, &mut rng, &dom, &GenBounds::default());
        let ext_t = t.cod().concat(&CtxObject::new(vec!["B".into()]));
        let r_f = gen::random_formula(&gsig, &mut rng, ext_t.sorts(), 2, 0, 1);
        let beck = interpret_formula(&grpd, &gsig, &ext_t, &r_f)
            .and_then(|r| check_beck_chevalley(&grpd, &t, "B", &r));
        match beck {
            Ok((ex, fa)) => {
                assert!(
                    ex && fa,
                    "beck-chevalley failed in the groupoid backend along {t:?} on {r_f}"
                );
                grpd_beck += 1;
            }
            Err(ModelError::Overflow { .. }) => {}
            Err(e) => panic!("beck-chevalley setup failed: {e}"),
        }
    }
    assert!(
        grpd_frobenius >= 200 && grpd_beck >= 200,
        "only {grpd_frobenius} frobenius / {grpd_beck} beck-chevalley groupoid pairs checked"
    );

    println!(
        "acceptance: frobenius + beck-chevalley on {set_frobenius}+{set_beck} set and \
         {grpd_frobenius}+{grpd_beck} groupoid pairs: pass"
    );
}
