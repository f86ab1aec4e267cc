//! Comparisons between groupoid-valued structures: a functor per sort plus an
//! invertible cell per function symbol filling each operation square up to
//! naturality, equivalence witnesses carrying quasi-inverses, and a fiberwise
//! checker that a formula's interpretations in two equivalent structures are
//! equivalent groupoids over matched base points.
//!
//! Also here: generators that manufacture equivalences out of a given
//! structure — carrier relabelings (strictly commuting squares) and object
//! inflations (each object replaced by interchangeable copies, operations
//! landing in twisted copies) — and composition of equivalences, which
//! together produce test suites of genuinely non-isomorphic equivalent
//! structures.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::gen::{rng_from_seed, Rng};
use crate::groupoid::{
    all_functors, groupoid_equivalent, natural_isos, tuples, FinGroupoid, GroupoidModel,
    GroupoidStructure, PlainFunctor, SymbolFunctor,
};
use crate::model::{interpret_formula, ModelError};
use crate::syntax::{Formula, Signature};
use crate::term_cat::CtxObject;

/// Comparison data from a structure `M` to a structure `N` over a shared
/// signature: a carrier functor per sort, and for each function symbol a
/// chosen morphism per argument tuple connecting the two ways around the
/// operation square. In a groupoid every such cell is invertible, so the law
/// to check is naturality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomotopyHomomorphism {
    /// Sort name → functor from `M`'s carrier to `N`'s carrier.
    pub sorts: BTreeMap<String, PlainFunctor>,
    /// Symbol name → square filler: for `f : A₁×⋯×Aₙ → B` and each object
    /// tuple `a` of `M`'s argument carriers, a morphism of `N`'s `B`-carrier
    /// from the functor image of `M`'s operation at `a` to `N`'s operation
    /// at the image of `a`.
    pub cells: BTreeMap<String, BTreeMap<Vec<usize>, usize>>,
}

impl HomotopyHomomorphism {
    /// The identity comparison `M → M`: identity functors, identity cells.
    pub fn identity(sig: &Signature, m: &GroupoidStructure) -> Self {
        let sorts = sig
            .sorts()
            .iter()
            .map(|s| (s.clone(), PlainFunctor::identity(&m.carriers[s])))
            .collect();
        let mut cells = BTreeMap::new();
        for (name, decl) in sig.functions() {
            let target = &m.carriers[&decl.codomain];
            let comp = m.funcs[name]
                .obj_map
                .iter()
                .map(|(t, &o)| (t.clone(), target.identity(o)))
                .collect();
            cells.insert(name.clone(), comp);
        }
        HomotopyHomomorphism { sorts, cells }
    }

    /// Image of a context point under the per-sort object maps.
    pub fn map_point(
        &self,
        ctx: &CtxObject,
        point: &[usize],
    ) -> Result<Vec<usize>, ModelError> {
        ctx.sorts()
            .iter()
            .zip(point)
            .map(|(s, &i)| {
                self.sorts
                    .get(s)
                    .and_then(|f| f.obj_map.get(i).copied())
                    .ok_or_else(|| {
                        ModelError::Shape(format!(
                            "no functor entry for sort `{s}` object {i}"
                        ))
                    })
            })
            .collect()
    }
}

/// A comparison whose per-sort functors are equivalences, witnessed by
/// quasi-inverse functors and invertible round-trip transformations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomotopyEquivalence {
    pub map: HomotopyHomomorphism,
    /// Sort name → quasi-inverse functor from `N`'s carrier back to `M`'s.
    pub inverses: BTreeMap<String, PlainFunctor>,
    /// Sort name → components in `M`'s carrier of a natural isomorphism from
    /// the identity to inverse∘forward, indexed by objects.
    pub unit: BTreeMap<String, Vec<usize>>,
    /// Sort name → components in `N`'s carrier of a natural isomorphism from
    /// forward∘inverse to the identity, indexed by objects.
    pub counit: BTreeMap<String, Vec<usize>>,
}

impl HomotopyEquivalence {
    /// The identity equivalence `M → M`.
    pub fn identity(sig: &Signature, m: &GroupoidStructure) -> Self {
        let ids = |st: &GroupoidStructure| -> BTreeMap<String, Vec<usize>> {
            sig.sorts()
                .iter()
                .map(|s| {
                    let g = &st.carriers[s];
                    (s.clone(), (0..g.n_objects()).map(|x| g.identity(x)).collect())
                })
                .collect()
        };
        HomotopyEquivalence {
            map: HomotopyHomomorphism::identity(sig, m),
            inverses: sig
                .sorts()
                .iter()
                .map(|s| (s.clone(), PlainFunctor::identity(&m.carriers[s])))
                .collect(),
            unit: ids(m),
            counit: ids(m),
        }
    }
}

/// Checks that `comps` is a natural transformation `f ⇒ g` between functors
/// `p → q`, reporting the first failing component or square.
fn check_natural(
    p: &FinGroupoid,
    q: &FinGroupoid,
    f: &PlainFunctor,
    g: &PlainFunctor,
    comps: &[usize],
    what: &str,
) -> Result<(), ModelError> {
    if comps.len() != p.n_objects() {
        return Err(ModelError::Shape(format!(
            "{what}: {} components for {} objects",
            comps.len(),
            p.n_objects()
        )));
    }
    for (x, &c) in comps.iter().enumerate() {
        if c >= q.n_mors() || q.src(c) != f.obj_map[x] || q.tgt(c) != g.obj_map[x] {
            return Err(ModelError::Shape(format!(
                "{what}: component at object {x} has wrong endpoints"
            )));
        }
    }
    for u in 0..p.n_mors() {
        if q.compose(comps[p.tgt(u)], f.mor_map[u])
            != q.compose(g.mor_map[u], comps[p.src(u)])
        {
            return Err(ModelError::Shape(format!(
                "{what}: naturality fails at morphism {u}"
            )));
        }
    }
    Ok(())
}

/// Checks every law of the comparison data, reporting the first failure:
/// per-sort functor laws, then totality, endpoints, and every naturality
/// square of each symbol's cells.
pub fn check_homotopy_homomorphism(
    sig: &Signature,
    m: &GroupoidStructure,
    n: &GroupoidStructure,
    h: &HomotopyHomomorphism,
) -> Result<(), ModelError> {
    for sort in sig.sorts() {
        let f = h.sorts.get(sort).ok_or_else(|| {
            ModelError::Shape(format!("no functor for sort `{sort}`"))
        })?;
        f.validate(&m.carriers[sort], &n.carriers[sort])
            .map_err(|e| ModelError::Shape(format!("sort `{sort}`: {e}")))?;
    }
    for (name, decl) in sig.functions() {
        let comps = h.cells.get(name).ok_or_else(|| {
            ModelError::Shape(format!("no cells for symbol `{name}`"))
        })?;
        let m_args: Vec<&FinGroupoid> =
            decl.arity.iter().map(|s| &m.carriers[s]).collect();
        let target = &n.carriers[&decl.codomain];
        let fwd_out = &h.sorts[&decl.codomain];
        let mf = &m.funcs[name];
        let nf = &n.funcs[name];
        let err =
            |msg: String| Err(ModelError::Shape(format!("symbol `{name}`: {msg}")));

        let obj_dims: Vec<usize> = m_args.iter().map(|g| g.n_objects()).collect();
        let obj_tuples = tuples(&obj_dims);
        if comps.len() != obj_tuples.len() {
            return err("cells are not total".into());
        }
        for t in &obj_tuples {
            let c = match comps.get(t) {
                Some(&c) => c,
                None => return err(format!("no cell at {t:?}")),
            };
            let src = fwd_out.obj_map[mf.obj_map[t]];
            let image: Vec<usize> = t
                .iter()
                .zip(&decl.arity)
                .map(|(&o, s)| h.sorts[s].obj_map[o])
                .collect();
            let tgt = nf.obj_map[&image];
            if c >= target.n_mors() || target.src(c) != src || target.tgt(c) != tgt {
                return err(format!("cell at {t:?} has wrong endpoints"));
            }
        }
        let mor_dims: Vec<usize> = m_args.iter().map(|g| g.n_mors()).collect();
        for u in tuples(&mor_dims) {
            let s: Vec<usize> =
                u.iter().zip(&m_args).map(|(&x, g)| g.src(x)).collect();
            let t: Vec<usize> =
                u.iter().zip(&m_args).map(|(&x, g)| g.tgt(x)).collect();
            let image: Vec<usize> = u
                .iter()
                .zip(&decl.arity)
                .map(|(&x, sort)| h.sorts[sort].mor_map[x])
                .collect();
            let lhs = target.compose(comps[&t], fwd_out.mor_map[mf.mor_map[&u]]);
            let rhs = target.compose(nf.mor_map[&image], comps[&s]);
            if lhs != rhs {
                return err(format!("square fails at morphism tuple {u:?}"));
            }
        }
    }
    Ok(())
}

/// True iff all of the comparison data's laws hold.
pub fn verify_homotopy_homomorphism(
    sig: &Signature,
    m: &GroupoidStructure,
    n: &GroupoidStructure,
    h: &HomotopyHomomorphism,
) -> bool {
    check_homotopy_homomorphism(sig, m, n, h).is_ok()
}

/// Checks the underlying comparison plus the quasi-inverse data: each
/// inverse functor's laws and the naturality of both round-trip
/// transformations.
pub fn check_homotopy_equivalence(
    sig: &Signature,
    m: &GroupoidStructure,
    n: &GroupoidStructure,
    e: &HomotopyEquivalence,
) -> Result<(), ModelError> {
    check_homotopy_homomorphism(sig, m, n, &e.map)?;
    for sort in sig.sorts() {
        let mg = &m.carriers[sort];
        let ng = &n.carriers[sort];
        let fwd = &e.map.sorts[sort];
        let bwd = e.inverses.get(sort).ok_or_else(|| {
            ModelError::Shape(format!("no quasi-inverse for sort `{sort}`"))
        })?;
        bwd.validate(ng, mg)
            .map_err(|err| ModelError::Shape(format!("sort `{sort}` inverse: {err}")))?;
        let unit = e.unit.get(sort).ok_or_else(|| {
            ModelError::Shape(format!("no unit components for sort `{sort}`"))
        })?;
        check_natural(
            mg,
            mg,
            &PlainFunctor::identity(mg),
            &fwd.then(bwd),
            unit,
            &format!("sort `{sort}` unit"),
        )?;
        let counit = e.counit.get(sort).ok_or_else(|| {
            ModelError::Shape(format!("no counit components for sort `{sort}`"))
        })?;
        check_natural(
            ng,
            ng,
            &bwd.then(fwd),
            &PlainFunctor::identity(ng),
            counit,
            &format!("sort `{sort}` counit"),
        )?;
    }
    Ok(())
}

/// True iff the equivalence data's laws all hold.
pub fn verify_homotopy_equivalence(
    sig: &Signature,
    m: &GroupoidStructure,
    n: &GroupoidStructure,
    e: &HomotopyEquivalence,
) -> bool {
    check_homotopy_equivalence(sig, m, n, e).is_ok()
}

/// Upgrades a comparison map to an equivalence by brute-force search: per
/// sort, tries every functor back from `n`'s carrier (at most `max_functors`
/// of them) until one admits natural isomorphisms `id ⇒ inverse∘forward` and
/// `forward∘inverse ⇒ id`. Returns `None` when some sort has no
/// quasi-inverse — the map is then not an equivalence. The forward map
/// itself is validated first.
pub fn complete_equivalence(
    sig: &Signature,
    m: &GroupoidStructure,
    n: &GroupoidStructure,
    map: &HomotopyHomomorphism,
    max_functors: usize,
) -> Result<Option<HomotopyEquivalence>, ModelError> {
    check_homotopy_homomorphism(sig, m, n, map)?;
    let mut inverses = BTreeMap::new();
    let mut unit = BTreeMap::new();
    let mut counit = BTreeMap::new();
    for sort in sig.sorts() {
        let mg = &m.carriers[sort];
        let ng = &n.carriers[sort];
        let fwd = &map.sorts[sort];
        let mut found = false;
        for bwd in all_functors(ng, mg, max_functors)? {
            let units = natural_isos(mg, mg, &PlainFunctor::identity(mg), &fwd.then(&bwd));
            let Some(u) = units.into_iter().next() else {
                continue;
            };
            let counits = natural_isos(ng, ng, &bwd.then(fwd), &PlainFunctor::identity(ng));
            let Some(c) = counits.into_iter().next() else {
                continue;
            };
            unit.insert(sort.clone(), u);
            counit.insert(sort.clone(), c);
            inverses.insert(sort.clone(), bwd);
            found = true;
            break;
        }
        if !found {
            return Ok(None);
        }
    }
    Ok(Some(HomotopyEquivalence {
        map: map.clone(),
        inverses,
        unit,
        counit,
    }))
}

/// Verdict for one base point: the point in the first structure's context
/// product, its image under the per-sort functors, and whether the fibers of
/// the two interpretations over these points are equivalent groupoids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointVerdict {
    pub point: Vec<usize>,
    pub image: Vec<usize>,
    pub equivalent: bool,
}

/// Per-base-point comparison of a formula's interpretations in two
/// structures related by an equivalence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvarianceReport {
    pub ctx: CtxObject,
    pub verdicts: Vec<PointVerdict>,
}

impl InvarianceReport {
    /// True when every base point's fibers came out equivalent.
    pub fn all_true(&self) -> bool {
        self.verdicts.iter().all(|v| v.equivalent)
    }
}

/// Interprets `phi` over `ctx` in both structures and compares fibers over
/// matched base points: the fiber over each point `a` of the first structure
/// against the fiber over the functor image of `a` in the second. The
/// equivalence data is re-checked first; size-guard overflows propagate.
pub fn invariance_report(
    sig: &Signature,
    m: &GroupoidStructure,
    n: &GroupoidStructure,
    e: &HomotopyEquivalence,
    ctx: &CtxObject,
    phi: &Formula,
    max_fiber: usize,
) -> Result<InvarianceReport, ModelError> {
    check_homotopy_equivalence(sig, m, n, e)?;
    let pm = interpret_formula(
        &GroupoidModel::new(sig, m).with_max_fiber(max_fiber),
        sig,
        ctx,
        phi,
    )?;
    let pn = interpret_formula(
        &GroupoidModel::new(sig, n).with_max_fiber(max_fiber),
        sig,
        ctx,
        phi,
    )?;
    let mut verdicts = Vec::new();
    for (point, fiber) in &pm.fibers {
        let image = e.map.map_point(ctx, point)?;
        let other = pn.fiber(&image)?;
        verdicts.push(PointVerdict {
            point: point.clone(),
            image,
            equivalent: groupoid_equivalent(fiber, other).is_some(),
        });
    }
    Ok(InvarianceReport {
        ctx: ctx.clone(),
        verdicts,
    })
}

/// A groupoid with each object replaced by interchangeable copies, plus the
/// bookkeeping to address the copies: `include` embeds the original on the
/// 0th copies, `retract` collapses all copies back, and the two compose to
/// the identity on the original.
#[derive(Debug, Clone)]
pub struct Inflation {
    pub fat: FinGroupoid,
    pub include: PlainFunctor,
    pub retract: PlainFunctor,
    obj_index: BTreeMap<(usize, usize), usize>,
    obj_decode: Vec<(usize, usize)>,
    mor_index: BTreeMap<(usize, usize, usize), usize>,
    mult: Vec<usize>,
}

impl Inflation {
    /// Global index of copy `i` of base object `x`.
    pub fn object(&self, x: usize, copy: usize) -> usize {
        self.obj_index[&(x, copy)]
    }

    /// `(base object, copy)` behind a fattened object.
    pub fn decode_object(&self, o: usize) -> (usize, usize) {
        self.obj_decode[o]
    }

    /// The morphism over base morphism `u` from copy `i` of its source to
    /// copy `j` of its target.
    pub fn morphism(&self, u: usize, i: usize, j: usize) -> usize {
        self.mor_index[&(u, i, j)]
    }

    /// Number of copies of base object `x`.
    pub fn copies(&self, x: usize) -> usize {
        self.mult[x]
    }
}

/// Replaces each object `x` of `g` by `mult[x] ≥ 1` interchangeable copies;
/// morphisms between copies correspond exactly to the morphisms between the
/// originals, so the result is equivalent to `g` but not isomorphic once any
/// multiplicity exceeds one.
pub fn inflate_groupoid(
    g: &FinGroupoid,
    mult: &[usize],
) -> Result<Inflation, ModelError> {
    if mult.len() != g.n_objects() || mult.contains(&0) {
        return Err(ModelError::Shape(
            "inflation multiplicities must be positive and one per object".into(),
        ));
    }
    let mut obj_index = BTreeMap::new();
    let mut obj_decode = Vec::new();
    for (x, &k) in mult.iter().enumerate() {
        for i in 0..k {
            obj_index.insert((x, i), obj_decode.len());
            obj_decode.push((x, i));
        }
    }
    let mut mors = Vec::new();
    let mut mor_index = BTreeMap::new();
    for u in 0..g.n_mors() {
        let (s, t) = (g.src(u), g.tgt(u));
        for i in 0..mult[s] {
            for j in 0..mult[t] {
                mor_index.insert((u, i, j), mors.len());
                mors.push((obj_index[&(s, i)], obj_index[&(t, j)]));
            }
        }
    }
    let mut compose = BTreeMap::new();
    for (&(v, j2, k), &sec) in &mor_index {
        for (&(u, i, j), &fst) in &mor_index {
            if g.tgt(u) == g.src(v) && j == j2 {
                compose.insert((sec, fst), mor_index[&(g.compose(v, u), i, k)]);
            }
        }
    }
    let mut identities = vec![0usize; obj_decode.len()];
    for (&(x, i), &o) in &obj_index {
        identities[o] = mor_index[&(g.identity(x), i, i)];
    }
    let mut inverses = vec![0usize; mors.len()];
    for (&(u, i, j), &idx) in &mor_index {
        inverses[idx] = mor_index[&(g.inverse(u), j, i)];
    }
    let fat = FinGroupoid::from_parts(obj_decode.len(), mors, compose, identities, inverses)?;
    let include = PlainFunctor {
        obj_map: (0..g.n_objects()).map(|x| obj_index[&(x, 0)]).collect(),
        mor_map: (0..g.n_mors()).map(|u| mor_index[&(u, 0, 0)]).collect(),
    };
    let mut retract_obj = vec![0usize; obj_decode.len()];
    for (o, &(x, _)) in obj_decode.iter().enumerate() {
        retract_obj[o] = x;
    }
    let mut retract_mor = vec![0usize; fat.n_mors()];
    for (&(u, _, _), &idx) in &mor_index {
        retract_mor[idx] = u;
    }
    Ok(Inflation {
        fat,
        include,
        retract: PlainFunctor {
            obj_map: retract_obj,
            mor_map: retract_mor,
        },
        obj_index,
        obj_decode,
        mor_index,
        mult: mult.to_vec(),
    })
}

/// Fattens every carrier of `m` by the given per-sort multiplicities and
/// installs each operation on chosen copies: `choice(symbol, fat argument
/// tuple, k)` picks the copy (reduced modulo `k`) that the result lands in.
/// Returns the fattened structure together with the equivalence whose
/// forward functors are the copy-0 inclusions; its cells connect copy 0 to
/// the chosen copies, so they are non-identity whenever the choices are.
pub fn inflation_equivalence(
    sig: &Signature,
    m: &GroupoidStructure,
    mults: &BTreeMap<String, Vec<usize>>,
    mut choice: impl FnMut(&str, &[usize], usize) -> usize,
) -> Result<(GroupoidStructure, HomotopyEquivalence), ModelError> {
    let mut inflations: BTreeMap<String, Inflation> = BTreeMap::new();
    for sort in sig.sorts() {
        let mult = mults.get(sort).ok_or_else(|| {
            ModelError::Shape(format!("no multiplicities for sort `{sort}`"))
        })?;
        inflations.insert(sort.clone(), inflate_groupoid(&m.carriers[sort], mult)?);
    }
    let carriers: BTreeMap<String, FinGroupoid> = inflations
        .iter()
        .map(|(s, i)| (s.clone(), i.fat.clone()))
        .collect();

    let mut funcs = BTreeMap::new();
    let mut cells = BTreeMap::new();
    for (name, decl) in sig.functions() {
        let arg_infl: Vec<&Inflation> =
            decl.arity.iter().map(|s| &inflations[s]).collect();
        let tgt_infl = &inflations[&decl.codomain];
        let base_tgt = &m.carriers[&decl.codomain];
        let sf = &m.funcs[name];

        let obj_dims: Vec<usize> =
            arg_infl.iter().map(|i| i.fat.n_objects()).collect();
        let mut obj_map = BTreeMap::new();
        let mut copy_at: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for t in tuples(&obj_dims) {
            let base: Vec<usize> = t
                .iter()
                .zip(&arg_infl)
                .map(|(&o, i)| i.decode_object(o).0)
                .collect();
            let out = sf.obj_map[&base];
            let k = tgt_infl.copies(out);
            let c = choice(name, &t, k) % k;
            copy_at.insert(t.clone(), c);
            obj_map.insert(t, tgt_infl.object(out, c));
        }
        let mor_dims: Vec<usize> = arg_infl.iter().map(|i| i.fat.n_mors()).collect();
        let mut mor_map = BTreeMap::new();
        for u in tuples(&mor_dims) {
            let s: Vec<usize> = u
                .iter()
                .zip(&arg_infl)
                .map(|(&x, i)| i.fat.src(x))
                .collect();
            let t: Vec<usize> = u
                .iter()
                .zip(&arg_infl)
                .map(|(&x, i)| i.fat.tgt(x))
                .collect();
            let base_u: Vec<usize> = u
                .iter()
                .zip(&arg_infl)
                .map(|(&x, i)| i.retract.mor_map[x])
                .collect();
            mor_map.insert(
                u,
                tgt_infl.morphism(sf.mor_map[&base_u], copy_at[&s], copy_at[&t]),
            );
        }
        funcs.insert(name.clone(), SymbolFunctor { obj_map, mor_map });

        // Cells: over each original argument tuple, the canonical morphism
        // from copy 0 of the base result to the chosen copy.
        let mut comp = BTreeMap::new();
        for (a, &out) in &sf.obj_map {
            let fat_tuple: Vec<usize> = a
                .iter()
                .zip(&arg_infl)
                .map(|(&o, i)| i.object(o, 0))
                .collect();
            comp.insert(
                a.clone(),
                tgt_infl.morphism(base_tgt.identity(out), 0, copy_at[&fat_tuple]),
            );
        }
        cells.insert(name.clone(), comp);
    }
    let n = GroupoidStructure::new(sig, carriers, funcs)?;

    let unit = sig
        .sorts()
        .iter()
        .map(|s| {
            let g = &m.carriers[s];
            (s.clone(), (0..g.n_objects()).map(|x| g.identity(x)).collect())
        })
        .collect();
    let counit = sig
        .sorts()
        .iter()
        .map(|s| {
            let infl = &inflations[s];
            let g = &m.carriers[s];
            let comps = (0..infl.fat.n_objects())
                .map(|o| {
                    let (x, i) = infl.decode_object(o);
                    infl.morphism(g.identity(x), 0, i)
                })
                .collect();
            (s.clone(), comps)
        })
        .collect();
    let eq = HomotopyEquivalence {
        map: HomotopyHomomorphism {
            sorts: inflations
                .iter()
                .map(|(s, i)| (s.clone(), i.include.clone()))
                .collect(),
            cells,
        },
        inverses: inflations
            .iter()
            .map(|(s, i)| (s.clone(), i.retract.clone()))
            .collect(),
        unit,
        counit,
    };
    Ok((n, eq))
}

/// Renames the objects and morphisms of every carrier by random permutations
/// and conjugates the operations to match. The forward functors are
/// isomorphisms and every operation square commutes strictly, so all cells
/// and round-trip components are identities.
pub fn relabeling_equivalence(
    sig: &Signature,
    m: &GroupoidStructure,
    rng: &mut Rng,
) -> Result<(GroupoidStructure, HomotopyEquivalence), ModelError> {
    let mut carriers = BTreeMap::new();
    let mut fwd: BTreeMap<String, PlainFunctor> = BTreeMap::new();
    let mut bwd: BTreeMap<String, PlainFunctor> = BTreeMap::new();
    for sort in sig.sorts() {
        let g = &m.carriers[sort];
        let mut obj_perm: Vec<usize> = (0..g.n_objects()).collect();
        obj_perm.shuffle(rng);
        let mut mor_perm: Vec<usize> = (0..g.n_mors()).collect();
        mor_perm.shuffle(rng);
        let mut mors = vec![(0usize, 0usize); g.n_mors()];
        for u in 0..g.n_mors() {
            mors[mor_perm[u]] = (obj_perm[g.src(u)], obj_perm[g.tgt(u)]);
        }
        let mut compose = BTreeMap::new();
        for x in 0..g.n_mors() {
            for y in 0..g.n_mors() {
                if g.tgt(y) == g.src(x) {
                    compose.insert((mor_perm[x], mor_perm[y]), mor_perm[g.compose(x, y)]);
                }
            }
        }
        let mut identities = vec![0usize; g.n_objects()];
        for a in 0..g.n_objects() {
            identities[obj_perm[a]] = mor_perm[g.identity(a)];
        }
        let mut inverses = vec![0usize; g.n_mors()];
        for u in 0..g.n_mors() {
            inverses[mor_perm[u]] = mor_perm[g.inverse(u)];
        }
        let relabeled =
            FinGroupoid::from_parts(g.n_objects(), mors, compose, identities, inverses)?;
        carriers.insert(sort.clone(), relabeled);
        let mut inv_obj = vec![0usize; obj_perm.len()];
        for (a, &b) in obj_perm.iter().enumerate() {
            inv_obj[b] = a;
        }
        let mut inv_mor = vec![0usize; mor_perm.len()];
        for (u, &v) in mor_perm.iter().enumerate() {
            inv_mor[v] = u;
        }
        fwd.insert(
            sort.clone(),
            PlainFunctor {
                obj_map: obj_perm,
                mor_map: mor_perm,
            },
        );
        bwd.insert(
            sort.clone(),
            PlainFunctor {
                obj_map: inv_obj,
                mor_map: inv_mor,
            },
        );
    }
    let mut funcs = BTreeMap::new();
    let mut cells = BTreeMap::new();
    for (name, decl) in sig.functions() {
        let sf = &m.funcs[name];
        let out = &fwd[&decl.codomain];
        let obj_map = sf
            .obj_map
            .iter()
            .map(|(t, &v)| {
                let mapped: Vec<usize> = t
                    .iter()
                    .zip(&decl.arity)
                    .map(|(&o, s)| fwd[s].obj_map[o])
                    .collect();
                (mapped, out.obj_map[v])
            })
            .collect();
        let mor_map = sf
            .mor_map
            .iter()
            .map(|(t, &v)| {
                let mapped: Vec<usize> = t
                    .iter()
                    .zip(&decl.arity)
                    .map(|(&u, s)| fwd[s].mor_map[u])
                    .collect();
                (mapped, out.mor_map[v])
            })
            .collect();
        funcs.insert(name.clone(), SymbolFunctor { obj_map, mor_map });
        let comp = sf
            .obj_map
            .iter()
            .map(|(t, &v)| {
                (t.clone(), carriers[&decl.codomain].identity(out.obj_map[v]))
            })
            .collect();
        cells.insert(name.clone(), comp);
    }
    let n = GroupoidStructure::new(sig, carriers, funcs)?;
    let unit = sig
        .sorts()
        .iter()
        .map(|s| {
            let g = &m.carriers[s];
            (s.clone(), (0..g.n_objects()).map(|x| g.identity(x)).collect())
        })
        .collect();
    let counit = sig
        .sorts()
        .iter()
        .map(|s| {
            let g = &n.carriers[s];
            (s.clone(), (0..g.n_objects()).map(|x| g.identity(x)).collect())
        })
        .collect();
    Ok((
        n,
        HomotopyEquivalence {
            map: HomotopyHomomorphism { sorts: fwd, cells },
            inverses: bwd,
            unit,
            counit,
        },
    ))
}

/// Composes equivalences `M → Mid` and `Mid → N` into one `M → N`; `m` and
/// `n` are the outer structures (the middle one is not needed).
pub fn compose_equivalences(
    sig: &Signature,
    m: &GroupoidStructure,
    n: &GroupoidStructure,
    first: &HomotopyEquivalence,
    second: &HomotopyEquivalence,
) -> Result<HomotopyEquivalence, ModelError> {
    let mut sorts = BTreeMap::new();
    let mut inverses = BTreeMap::new();
    let mut unit = BTreeMap::new();
    let mut counit = BTreeMap::new();
    for sort in sig.sorts() {
        let f1 = &first.map.sorts[sort];
        let f2 = &second.map.sorts[sort];
        let b1 = &first.inverses[sort];
        let b2 = &second.inverses[sort];
        sorts.insert(sort.clone(), f1.then(f2));
        inverses.insert(sort.clone(), b2.then(b1));
        let mg = &m.carriers[sort];
        let u: Vec<usize> = (0..mg.n_objects())
            .map(|x| {
                mg.compose(
                    b1.mor_map[second.unit[sort][f1.obj_map[x]]],
                    first.unit[sort][x],
                )
            })
            .collect();
        unit.insert(sort.clone(), u);
        let ng = &n.carriers[sort];
        let c: Vec<usize> = (0..ng.n_objects())
            .map(|y| {
                ng.compose(
                    second.counit[sort][y],
                    f2.mor_map[first.counit[sort][b2.obj_map[y]]],
                )
            })
            .collect();
        counit.insert(sort.clone(), c);
    }
    let mut cells = BTreeMap::new();
    for (name, decl) in sig.functions() {
        let target = &n.carriers[&decl.codomain];
        let f2_out = &second.map.sorts[&decl.codomain];
        let c2 = &second.map.cells[name];
        let comp = first.map.cells[name]
            .iter()
            .map(|(a, &cell1)| {
                let image: Vec<usize> = a
                    .iter()
                    .zip(&decl.arity)
                    .map(|(&o, s)| first.map.sorts[s].obj_map[o])
                    .collect();
                (a.clone(), target.compose(c2[&image], f2_out.mor_map[cell1]))
            })
            .collect();
        cells.insert(name.clone(), comp);
    }
    Ok(HomotopyEquivalence {
        map: HomotopyHomomorphism { sorts, cells },
        inverses,
        unit,
        counit,
    })
}

/// Random per-sort multiplicities, each vector of 1s occasionally bumped,
/// keeping every fattened carrier within `max_objects` objects.
fn random_mults(
    sig: &Signature,
    m: &GroupoidStructure,
    max_objects: usize,
    rng: &mut Rng,
) -> BTreeMap<String, Vec<usize>> {
    sig.sorts()
        .iter()
        .map(|s| {
            let n = m.carriers[s].n_objects();
            let mut mult = vec![1usize; n];
            let mut total = n;
            if n > 0 {
                while total < max_objects && rng.gen_bool(0.6) {
                    mult[rng.gen_range(0..n)] += 1;
                    total += 1;
                }
            }
            (s.clone(), mult)
        })
        .collect()
}

/// A deterministic suite of equivalences out of `base`: the identity first,
/// then a rotation of carrier relabelings, copy inflations with random copy
/// choices, and inflations composed with relabelings. Every generated
/// carrier stays within `max_objects` objects.
pub fn equivalence_suite(
    sig: &Signature,
    base: &GroupoidStructure,
    seed: u64,
    count: usize,
    max_objects: usize,
) -> Result<Vec<(GroupoidStructure, HomotopyEquivalence)>, ModelError> {
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::new();
    if count > 0 {
        out.push((base.clone(), HomotopyEquivalence::identity(sig, base)));
    }
    while out.len() < count {
        let entry = match out.len() % 3 {
            1 => relabeling_equivalence(sig, base, &mut rng)?,
            2 => {
                let mults = random_mults(sig, base, max_objects, &mut rng);
                inflation_equivalence(sig, base, &mults, |_, _, k| {
                    rng.gen_range(0..k)
                })?
            }
            _ => {
                let mults = random_mults(sig, base, max_objects, &mut rng);
                let (mid, e1) = inflation_equivalence(sig, base, &mults, |_, _, k| {
                    rng.gen_range(0..k)
                })?;
                let (n, e2) = relabeling_equivalence(sig, &mid, &mut rng)?;
                let e = compose_equivalences(sig, base, &n, &e1, &e2)?;
                (n, e)
            }
        };
        out.push(entry);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::test_signature_one_sort;
    use crate::model::Model;
    use crate::syntax::{FuncDecl, Term, Var};

    /// One sort `A` carried by B(Z/2); `c` is the point, `f` the identity,
    /// `p` the group multiplication.
    fn z2_structure() -> (Signature, GroupoidStructure) {
        let sig = test_signature_one_sort();
        let carriers = BTreeMap::from([("A".to_string(), FinGroupoid::cyclic_group(2))]);
        let st = GroupoidStructure::build(
            &sig,
            carriers,
            |_, _| 0,
            |name, t| match name {
                "c" => 0,
                "f" => t[0],
                _ => (t[0] + t[1]) % 2,
            },
        )
        .unwrap();
        (sig, st)
    }

    fn contractible_sentence() -> Formula {
        let x = Var::new("x", "A");
        let y = Var::new("y", "A");
        Formula::exists(
            x.clone(),
            Formula::forall(
                y.clone(),
                Formula::Eq("A".to_string(), Term::Var(x), Term::Var(y)),
            ),
        )
    }

    #[test]
    fn identity_data_checks_out() {
        let (sig, st) = z2_structure();
        let e = HomotopyEquivalence::identity(&sig, &st);
        assert!(verify_homotopy_homomorphism(&sig, &st, &st, &e.map));
        assert!(verify_homotopy_equivalence(&sig, &st, &st, &e));
        let report = invariance_report(
            &sig,
            &st,
            &st,
            &e,
            &CtxObject::empty(),
            &contractible_sentence(),
            2_000,
        )
        .unwrap();
        assert!(report.all_true());
        assert_eq!(report.verdicts.len(), 1);
        assert_eq!(report.verdicts[0].point, report.verdicts[0].image);
    }

    #[test]
    fn broken_cell_endpoints_are_located() {
        let sig = Signature::new(
            vec!["A".to_string()],
            vec![(
                "c".to_string(),
                FuncDecl {
                    arity: vec![],
                    codomain: "A".to_string(),
                },
            )],
        )
        .unwrap();
        let carriers = BTreeMap::from([("A".to_string(), FinGroupoid::discrete(2))]);
        let st = GroupoidStructure::build(&sig, carriers, |_, _| 0, |_, _| 0).unwrap();
        let mut h = HomotopyHomomorphism::identity(&sig, &st);
        // Point the constant's cell at the wrong object.
        *h.cells.get_mut("c").unwrap().get_mut(&vec![]).unwrap() = 1;
        let err = check_homotopy_homomorphism(&sig, &st, &st, &h).unwrap_err();
        assert!(err.to_string().contains("`c`"), "got: {err}");
        assert!(err.to_string().contains("endpoints"), "got: {err}");
    }

    /// The symmetric group on three letters as a one-object groupoid.
    fn s3() -> FinGroupoid {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let index = |p: &[usize; 3]| perms.iter().position(|q| q == p).unwrap();
        let mut compose = BTreeMap::new();
        for (gi, g) in perms.iter().enumerate() {
            for (fi, f) in perms.iter().enumerate() {
                let gf = [g[f[0]], g[f[1]], g[f[2]]];
                compose.insert((gi, fi), index(&gf));
            }
        }
        FinGroupoid::new(1, vec![(0, 0); 6], compose).unwrap()
    }

    #[test]
    fn non_natural_cell_is_rejected() {
        let sig = Signature::new(
            vec!["A".to_string()],
            vec![(
                "f".to_string(),
                FuncDecl {
                    arity: vec!["A".to_string()],
                    codomain: "A".to_string(),
                },
            )],
        )
        .unwrap();
        let carriers = BTreeMap::from([("A".to_string(), s3())]);
        let st =
            GroupoidStructure::build(&sig, carriers, |_, _| 0, |_, t| t[0]).unwrap();
        let mut h = HomotopyHomomorphism::identity(&sig, &st);
        // A transposition is not central in S3, so using it as the cell
        // breaks some naturality square even though its endpoints are fine.
        *h.cells.get_mut("f").unwrap().get_mut(&vec![0]).unwrap() = 1;
        let err = check_homotopy_homomorphism(&sig, &st, &st, &h).unwrap_err();
        assert!(err.to_string().contains("square fails"), "got: {err}");
        // A central element would be fine; in B(Z/2) every cell choice is.
        let (sig2, st2) = z2_structure();
        let mut h2 = HomotopyHomomorphism::identity(&sig2, &st2);
        *h2.cells.get_mut("f").unwrap().get_mut(&vec![0]).unwrap() = 1;
        assert!(verify_homotopy_homomorphism(&sig2, &st2, &st2, &h2));
    }

    #[test]
    fn terminal_vs_indiscrete_equivalence() {
        let sig = Signature::new(
            vec!["A".to_string()],
            vec![(
                "f".to_string(),
                FuncDecl {
                    arity: vec!["A".to_string()],
                    codomain: "A".to_string(),
                },
            )],
        )
        .unwrap();
        let m = GroupoidStructure::build(
            &sig,
            BTreeMap::from([("A".to_string(), FinGroupoid::discrete(1))]),
            |_, _| 0,
            |_, _| 0,
        )
        .unwrap();
        let ind = FinGroupoid::indiscrete(2);
        let n = GroupoidStructure::build(
            &sig,
            BTreeMap::from([("A".to_string(), ind.clone())]),
            |_, t| t[0],
            |_, t| t[0],
        )
        .unwrap();
        // Include the point at object 0; every cell and counit component is
        // forced since homs in the indiscrete groupoid are singletons.
        let fwd = PlainFunctor {
            obj_map: vec![0],
            mor_map: vec![ind.identity(0)],
        };
        let bwd = PlainFunctor {
            obj_map: vec![0, 0],
            mor_map: (0..ind.n_mors()).map(|_| 0).collect(),
        };
        let e = HomotopyEquivalence {
            map: HomotopyHomomorphism {
                sorts: BTreeMap::from([("A".to_string(), fwd)]),
                cells: BTreeMap::from([(
                    "f".to_string(),
                    BTreeMap::from([(vec![0], ind.identity(0))]),
                )]),
            },
            inverses: BTreeMap::from([("A".to_string(), bwd)]),
            unit: BTreeMap::from([("A".to_string(), vec![0])]),
            counit: BTreeMap::from([(
                "A".to_string(),
                (0..2).map(|y| ind.hom(0, y)[0]).collect(),
            )]),
        };
        assert!(verify_homotopy_equivalence(&sig, &m, &n, &e));
        // Both carriers are contractible, so the uniqueness sentence holds on
        // each side and its closed fibers are equivalent.
        let report = invariance_report(
            &sig,
            &m,
            &n,
            &e,
            &CtxObject::empty(),
            &contractible_sentence(),
            2_000,
        )
        .unwrap();
        assert!(report.all_true());
        let gm = GroupoidModel::new(&sig, &m);
        let pm = interpret_formula(&gm, &sig, &CtxObject::empty(), &contractible_sentence())
            .unwrap();
        assert!(gm.inhabited(&pm, &[]).unwrap());
        let gn = GroupoidModel::new(&sig, &n);
        let pn = interpret_formula(&gn, &sig, &CtxObject::empty(), &contractible_sentence())
            .unwrap();
        assert!(gn.inhabited(&pn, &[]).unwrap());
    }

    #[test]
    fn quasi_inverse_search_completes_a_forward_map() {
        let sig = Signature::new(
            vec!["A".to_string()],
            vec![(
                "f".to_string(),
                FuncDecl {
                    arity: vec!["A".to_string()],
                    codomain: "A".to_string(),
                },
            )],
        )
        .unwrap();
        let m = GroupoidStructure::build(
            &sig,
            BTreeMap::from([("A".to_string(), FinGroupoid::discrete(1))]),
            |_, _| 0,
            |_, _| 0,
        )
        .unwrap();
        let ind = FinGroupoid::indiscrete(2);
        let n = GroupoidStructure::build(
            &sig,
            BTreeMap::from([("A".to_string(), ind.clone())]),
            |_, t| t[0],
            |_, t| t[0],
        )
        .unwrap();
        let include = HomotopyHomomorphism {
            sorts: BTreeMap::from([(
                "A".to_string(),
                PlainFunctor {
                    obj_map: vec![0],
                    mor_map: vec![ind.identity(0)],
                },
            )]),
            cells: BTreeMap::from([(
                "f".to_string(),
                BTreeMap::from([(vec![0], ind.identity(0))]),
            )]),
        };
        let e = complete_equivalence(&sig, &m, &n, &include, 10_000)
            .unwrap()
            .expect("the inclusion of a point into the indiscrete pair is an equivalence");
        assert!(verify_homotopy_equivalence(&sig, &m, &n, &e));

        // Against a two-component discrete target the same inclusion has no
        // quasi-inverse: nothing connects the second component back.
        let disc = GroupoidStructure::build(
            &sig,
            BTreeMap::from([("A".to_string(), FinGroupoid::discrete(2))]),
            |_, t| t[0],
            |_, t| t[0],
        )
        .unwrap();
        let include = HomotopyHomomorphism {
            sorts: BTreeMap::from([(
                "A".to_string(),
                PlainFunctor {
                    obj_map: vec![0],
                    mor_map: vec![0],
                },
            )]),
            cells: BTreeMap::from([("f".to_string(), BTreeMap::from([(vec![0], 0)]))]),
        };
        assert!(complete_equivalence(&sig, &m, &disc, &include, 10_000)
            .unwrap()
            .is_none());
    }

    #[test]
    fn inflation_is_a_checked_equivalence() {
        let (sig, st) = z2_structure();
        let mults = BTreeMap::from([("A".to_string(), vec![3usize])]);
        let mut toggle = 0usize;
        let (n, e) = inflation_equivalence(&sig, &st, &mults, |_, _, k| {
            toggle += 1;
            toggle % k
        })
        .unwrap();
        assert_eq!(n.carriers["A"].n_objects(), 3);
        check_homotopy_equivalence(&sig, &st, &n, &e).unwrap();
        // Copies were twisted, so at least one operation cell is not an
        // identity.
        let non_identity = e
            .map
            .cells
            .values()
            .flat_map(|m| m.values())
            .any(|&c| !n.carriers["A"].is_identity(c));
        assert!(non_identity);
        let report = invariance_report(
            &sig,
            &st,
            &n,
            &e,
            &CtxObject::empty(),
            &contractible_sentence(),
            4_000,
        )
        .unwrap();
        assert!(report.all_true());
    }

    #[test]
    fn relabeling_is_a_checked_equivalence() {
        let sig = test_signature_one_sort();
        let union = FinGroupoid::disjoint_union(
            &FinGroupoid::cyclic_group(2),
            &FinGroupoid::discrete(1),
        );
        let st = GroupoidStructure::build(
            &sig,
            BTreeMap::from([("A".to_string(), union)]),
            |name, t| match name {
                "c" => 1,
                _ => t[0],
            },
            |name, t| match name {
                "c" => 2,
                _ => t[0],
            },
        )
        .unwrap();
        let mut rng = rng_from_seed(11);
        let (n, e) = relabeling_equivalence(&sig, &st, &mut rng).unwrap();
        check_homotopy_equivalence(&sig, &st, &n, &e).unwrap();
        // All cells of a relabeling are identities.
        for (name, comp) in &e.map.cells {
            let target = &n.carriers[&sig.func(name).unwrap().codomain];
            assert!(comp.values().all(|&c| target.is_identity(c)));
        }
    }

    #[test]
    fn composition_of_equivalences_checks_out() {
        let (sig, st) = z2_structure();
        let mults = BTreeMap::from([("A".to_string(), vec![2usize])]);
        let mut rng = rng_from_seed(5);
        let (mid, e1) =
            inflation_equivalence(&sig, &st, &mults, |_, t, k| (t.len() + 1) % k)
                .unwrap();
        let (n, e2) = relabeling_equivalence(&sig, &mid, &mut rng).unwrap();
        let e = compose_equivalences(&sig, &st, &n, &e1, &e2).unwrap();
        check_homotopy_equivalence(&sig, &st, &n, &e).unwrap();
    }

    #[test]
    fn suite_entries_all_verify() {
        let (sig, st) = z2_structure();
        let suite = equivalence_suite(&sig, &st, 23, 7, 3).unwrap();
        assert_eq!(suite.len(), 7);
        for (n, e) in &suite {
            assert!(n.carriers.values().all(|g| g.n_objects() <= 3));
            check_homotopy_equivalence(&sig, &st, n, e).unwrap();
        }
        // Determinism: the same seed reproduces the same suite.
        let again = equivalence_suite(&sig, &st, 23, 7, 3).unwrap();
        assert_eq!(
            suite.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
            again.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn inflated_groupoid_shape() {
        let g = FinGroupoid::cyclic_group(2);
        let infl = inflate_groupoid(&g, &[2]).unwrap();
        // Two copies of one object, each hom-set a Z/2 torsor: 8 morphisms.
        assert_eq!(infl.fat.n_objects(), 2);
        assert_eq!(infl.fat.n_mors(), 8);
        infl.fat.validate().unwrap();
        infl.include.validate(&g, &infl.fat).unwrap();
        infl.retract.validate(&infl.fat, &g).unwrap();
        assert!(infl.include.then(&infl.retract).is_identity());
        assert!(groupoid_equivalent(&g, &infl.fat).is_some());
        assert!(inflate_groupoid(&g, &[0]).is_err());
        assert!(inflate_groupoid(&g, &[1, 1]).is_err());
    }
}
