//! The groupoid-valued semantics backend: carriers are finite groupoids,
//! function symbols act functorially, and a predicate over a context is a
//! strictly split family — a fiber groupoid per base object tuple together
//! with a transport functor per base morphism tuple. Vertical morphisms are
//! pseudonatural: a component functor per base point plus an invertible
//! coherence cell per base morphism, satisfying unit, cocycle, and
//! naturality laws.
//!
//! Connectives are computed fiberwise through the constructions in the
//! fiber layer; quantifiers along the last context slot are the total
//! groupoid (existential) and the groupoid of coherent sections (universal);
//! equality is the family of hom-sets with transport by conjugation.
//!
//! Every structural operation fixes one canonical choice of coherence
//! cells, and with those choices all but one of the deduction relations
//! hold by literal equality of the underlying data. The exception is the
//! eliminator half of the equality laws, which holds up to an invertible
//! modification; morphism equality therefore identifies two pseudonatural
//! morphisms when such a modification exists, which is decidable here by a
//! finite search.

use std::collections::BTreeMap;

use crate::model::{Model, ModelError};
use crate::set_model::SetStructure;
use crate::syntax::{Signature, Term};
use crate::term_cat::{CtxObject, TermMorphism};

use super::carrier::{groupoid_equivalent, natural_isos, FinGroupoid, PlainFunctor};
use super::fiber::{
    CoproductFiber, FunctorFiber, GrothFiber, ProductFiber, Section, SectionsFiber, Tag,
};

/// Default cap on fiberwise enumeration (functor fibers and section fibers).
pub const DEFAULT_MAX_FIBER: usize = 2_000;

/// Enumerates index tuples below the given dimensions, in lexicographic
/// order. Zero dimensions yield the single empty tuple; a zero entry yields
/// nothing.
pub(crate) fn tuples(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if dims.contains(&0) {
        return out;
    }
    let mut cur = vec![0usize; dims.len()];
    loop {
        out.push(cur.clone());
        let mut i = dims.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < dims[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// The functorial action of one function symbol: argument object tuples to
/// objects and argument morphism tuples to morphisms of the result carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolFunctor {
    pub obj_map: BTreeMap<Vec<usize>, usize>,
    pub mor_map: BTreeMap<Vec<usize>, usize>,
}

/// An interpretation of a signature: a finite groupoid per sort and a
/// functor per function symbol out of the product of its argument carriers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupoidStructure {
    pub carriers: BTreeMap<String, FinGroupoid>,
    pub funcs: BTreeMap<String, SymbolFunctor>,
}

impl GroupoidStructure {
    /// Validates carriers and symbol actions against the signature: totality
    /// on tuples, endpoint compatibility, and the functor laws.
    pub fn new(
        sig: &Signature,
        carriers: BTreeMap<String, FinGroupoid>,
        funcs: BTreeMap<String, SymbolFunctor>,
    ) -> Result<Self, ModelError> {
        for sort in sig.sorts() {
            let g = carriers
                .get(sort)
                .ok_or_else(|| ModelError::Shape(format!("no carrier for sort `{sort}`")))?;
            g.validate()?;
        }
        if carriers.len() != sig.sorts().len() {
            return Err(ModelError::Shape("carrier for an undeclared sort".into()));
        }
        for (name, _) in sig.functions() {
            if !funcs.contains_key(name) {
                return Err(ModelError::Shape(format!("no action for symbol `{name}`")));
            }
        }
        for name in funcs.keys() {
            if sig.func(name).is_none() {
                return Err(ModelError::Shape(format!(
                    "action for undeclared symbol `{name}`"
                )));
            }
        }
        let st = GroupoidStructure { carriers, funcs };
        for (name, decl) in sig.functions() {
            st.validate_symbol(name, &decl.arity, &decl.codomain)?;
        }
        Ok(st)
    }

    fn validate_symbol(
        &self,
        name: &str,
        arity: &[String],
        codomain: &str,
    ) -> Result<(), ModelError> {
        let args: Vec<&FinGroupoid> = arity.iter().map(|s| &self.carriers[s]).collect();
        let target = &self.carriers[codomain];
        let sf = &self.funcs[name];
        let obj_dims: Vec<usize> = args.iter().map(|g| g.n_objects()).collect();
        let mor_dims: Vec<usize> = args.iter().map(|g| g.n_mors()).collect();
        let err = |msg: String| Err(ModelError::Shape(format!("symbol `{name}`: {msg}")));
        let obj_tuples = tuples(&obj_dims);
        if sf.obj_map.len() != obj_tuples.len() {
            return err("object action is not total".into());
        }
        for ot in &obj_tuples {
            match sf.obj_map.get(ot) {
                Some(&o) if o < target.n_objects() => {}
                _ => return err(format!("object action broken at {ot:?}")),
            }
        }
        let mor_tuples = tuples(&mor_dims);
        if sf.mor_map.len() != mor_tuples.len() {
            return err("morphism action is not total".into());
        }
        for mt in &mor_tuples {
            let m = match sf.mor_map.get(mt) {
                Some(&m) if m < target.n_mors() => m,
                _ => return err(format!("morphism action broken at {mt:?}")),
            };
            let st: Vec<usize> = mt.iter().zip(&args).map(|(&u, g)| g.src(u)).collect();
            let tt: Vec<usize> = mt.iter().zip(&args).map(|(&u, g)| g.tgt(u)).collect();
            if target.src(m) != sf.obj_map[&st] || target.tgt(m) != sf.obj_map[&tt] {
                return err(format!("morphism action endpoints wrong at {mt:?}"));
            }
        }
        for ot in &obj_tuples {
            let idt: Vec<usize> = ot.iter().zip(&args).map(|(&o, g)| g.identity(o)).collect();
            if sf.mor_map[&idt] != target.identity(sf.obj_map[ot]) {
                return err(format!("identities not preserved at {ot:?}"));
            }
        }
        for gt in &mor_tuples {
            for ft in &mor_tuples {
                let composable = ft
                    .iter()
                    .zip(gt)
                    .zip(&args)
                    .all(|((&f, &g), gr)| gr.tgt(f) == gr.src(g));
                if composable {
                    let ct: Vec<usize> = gt
                        .iter()
                        .zip(ft)
                        .zip(&args)
                        .map(|((&g, &f), gr)| gr.compose(g, f))
                        .collect();
                    if sf.mor_map[&ct] != target.compose(sf.mor_map[gt], sf.mor_map[ft]) {
                        return err(format!("composition not preserved at {gt:?} ∘ {ft:?}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Builds a structure from closures giving the object and morphism
    /// action of each symbol on index tuples, then validates it.
    pub fn build(
        sig: &Signature,
        carriers: BTreeMap<String, FinGroupoid>,
        obj_fn: impl Fn(&str, &[usize]) -> usize,
        mor_fn: impl Fn(&str, &[usize]) -> usize,
    ) -> Result<Self, ModelError> {
        let mut funcs = BTreeMap::new();
        for (name, decl) in sig.functions() {
            let args: Vec<&FinGroupoid> = decl
                .arity
                .iter()
                .map(|s| {
                    carriers
                        .get(s)
                        .ok_or_else(|| ModelError::Shape(format!("no carrier for sort `{s}`")))
                })
                .collect::<Result<_, _>>()?;
            let obj_dims: Vec<usize> = args.iter().map(|g| g.n_objects()).collect();
            let mor_dims: Vec<usize> = args.iter().map(|g| g.n_mors()).collect();
            let obj_map = tuples(&obj_dims)
                .into_iter()
                .map(|t| {
                    let v = obj_fn(name, &t);
                    (t, v)
                })
                .collect();
            let mor_map = tuples(&mor_dims)
                .into_iter()
                .map(|t| {
                    let v = mor_fn(name, &t);
                    (t, v)
                })
                .collect();
            funcs.insert(name.clone(), SymbolFunctor { obj_map, mor_map });
        }
        GroupoidStructure::new(sig, carriers, funcs)
    }

    /// Views a set-valued structure as a structure on discrete groupoids.
    pub fn from_sets(sig: &Signature, st: &SetStructure) -> Result<Self, ModelError> {
        let carriers: BTreeMap<String, FinGroupoid> = st
            .carriers
            .iter()
            .map(|(s, elems)| (s.clone(), FinGroupoid::discrete(elems.len())))
            .collect();
        // In a discrete groupoid morphism indices coincide with object
        // indices, so the set-level table serves as both actions.
        GroupoidStructure::build(
            sig,
            carriers,
            |name, t| st.funcs[name][&t.to_vec()],
            |name, t| st.funcs[name][&t.to_vec()],
        )
    }

    pub fn carrier(&self, sort: &str) -> Option<&FinGroupoid> {
        self.carriers.get(sort)
    }

    /// Evaluates a term on an object tuple of the positional context.
    pub fn eval_term_obj(&self, t: &Term, env: &[usize]) -> Result<usize, ModelError> {
        self.eval_term(t, env, |sf| &sf.obj_map)
    }

    /// Evaluates a term on a morphism tuple of the positional context.
    pub fn eval_term_mor(&self, t: &Term, env: &[usize]) -> Result<usize, ModelError> {
        self.eval_term(t, env, |sf| &sf.mor_map)
    }

    fn eval_term(
        &self,
        t: &Term,
        env: &[usize],
        table: impl Fn(&SymbolFunctor) -> &BTreeMap<Vec<usize>, usize> + Copy,
    ) -> Result<usize, ModelError> {
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
                let vals: Result<Vec<usize>, _> = args
                    .iter()
                    .map(|a| self.eval_term(a, env, table))
                    .collect();
                let sf = self.funcs.get(symbol).ok_or_else(|| {
                    ModelError::Shape(format!("no action for symbol `{symbol}`"))
                })?;
                table(sf).get(&vals?).copied().ok_or_else(|| {
                    ModelError::Shape(format!("action for `{symbol}` missing a tuple"))
                })
            }
        }
    }
}

/// One transport functor of a family, together with the base object tuples
/// it connects (so that morphisms can be checked without the structure).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transport {
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    pub fun: PlainFunctor,
}

/// A strictly split family of groupoids over the base product of a context:
/// a fiber per base object tuple and a transport per base morphism tuple.
/// Families are compared by literal equality of this data, which is what
/// makes reindexing split on the nose.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GPred {
    pub ctx: CtxObject,
    pub fibers: BTreeMap<Vec<usize>, FinGroupoid>,
    pub transports: BTreeMap<Vec<usize>, Transport>,
}

impl GPred {
    pub fn fiber(&self, point: &[usize]) -> Result<&FinGroupoid, ModelError> {
        self.fibers.get(point).ok_or_else(|| {
            ModelError::Shape(format!("no fiber at base point {point:?}"))
        })
    }

    pub fn transport(&self, mt: &[usize]) -> Result<&Transport, ModelError> {
        self.transports.get(mt).ok_or_else(|| {
            ModelError::Shape(format!("no transport at base morphism tuple {mt:?}"))
        })
    }

    /// Total number of fiber objects across all base points.
    pub fn total_size(&self) -> usize {
        self.fibers.values().map(|g| g.n_objects()).sum()
    }
}

/// A pseudonatural morphism between families over the same context: a
/// component functor per base point and, per base morphism tuple `g`, a
/// vector of coherence cells indexed by the objects of the source fiber at
/// `src(g)`. The cell at `x` is a morphism of the target fiber at `tgt(g)`
/// from `cod.T_g(comp_src(x))` to `comp_tgt(dom.T_g(x))`.
///
/// Equality identifies morphisms that differ by an invertible modification;
/// see [`modification_exists`].
#[derive(Debug, Clone)]
pub struct GrpdMor {
    pub dom: GPred,
    pub cod: GPred,
    pub comps: BTreeMap<Vec<usize>, PlainFunctor>,
    pub cells: BTreeMap<Vec<usize>, Vec<usize>>,
}

impl PartialEq for GrpdMor {
    fn eq(&self, other: &Self) -> bool {
        self.dom == other.dom
            && self.cod == other.cod
            && modification_exists(self, other)
    }
}

impl Eq for GrpdMor {}

impl GrpdMor {
    /// Literal equality of the underlying data, bypassing the up-to-
    /// modification identification.
    pub fn strictly_equal(&self, other: &Self) -> bool {
        self.dom == other.dom
            && self.cod == other.cod
            && self.comps == other.comps
            && self.cells == other.cells
    }
}

/// Decides whether two pseudonatural morphisms with equal endpoints differ
/// by an invertible modification: a natural isomorphism `m_b : α_b ⇒ β_b`
/// per base point such that for every base morphism tuple `g : b → b'` and
/// every source fiber object `x`,
/// `m_{b'}(T^dom_g x) ∘ c^α_g(x) = c^β_g(x) ∘ T^cod_g(m_b(x))`.
pub fn modification_exists(a: &GrpdMor, b: &GrpdMor) -> bool {
    if a.dom != b.dom || a.cod != b.cod {
        return false;
    }
    if a.comps.keys().ne(b.comps.keys()) || a.cells.keys().ne(b.cells.keys()) {
        return false;
    }
    // Identical data: the identity modification works.
    if a.comps == b.comps && a.cells == b.cells {
        return true;
    }
    let points: Vec<&Vec<usize>> = a.comps.keys().collect();
    let mut candidates: Vec<Vec<Vec<usize>>> = Vec::with_capacity(points.len());
    for pt in &points {
        let df = &a.dom.fibers[*pt];
        let cf = &a.cod.fibers[*pt];
        let isos = natural_isos(df, cf, &a.comps[*pt], &b.comps[*pt]);
        if isos.is_empty() {
            return false;
        }
        candidates.push(isos);
    }
    let index_of: BTreeMap<&Vec<usize>, usize> =
        points.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    // Backtracking over per-point candidates, checking each base morphism
    // tuple as soon as both its endpoints are assigned.
    fn rec(
        a: &GrpdMor,
        b: &GrpdMor,
        points: &[&Vec<usize>],
        index_of: &BTreeMap<&Vec<usize>, usize>,
        candidates: &[Vec<Vec<usize>>],
        chosen: &mut Vec<usize>,
    ) -> bool {
        let i = chosen.len();
        if i == points.len() {
            return true;
        }
        'cand: for (ci, m) in candidates[i].iter().enumerate() {
            chosen.push(ci);
            for (g, t) in &a.dom.transports {
                let (si, ti) = (index_of[&t.src], index_of[&t.tgt]);
                if si.max(ti) != i {
                    continue;
                }
                let m_src = &candidates[si][chosen[si]];
                let m_tgt = &candidates[ti][chosen[ti]];
                let cod_t = &a.cod.transports[g];
                let cf_tgt = &a.cod.fibers[&t.tgt];
                let df_src = &a.dom.fibers[&t.src];
                for x in 0..df_src.n_objects() {
                    let lhs = cf_tgt.compose(m_tgt[t.fun.obj_map[x]], a.cells[g][x]);
                    let rhs = cf_tgt.compose(b.cells[g][x], cod_t.fun.mor_map[m_src[x]]);
                    if lhs != rhs {
                        chosen.pop();
                        continue 'cand;
                    }
                }
                let _ = m;
            }
            if rec(a, b, points, index_of, candidates, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    rec(a, b, &points, &index_of, &candidates, &mut Vec::new())
}

/// Per-slot carrier references for a context.
fn slot_carriers<'s>(
    st: &'s GroupoidStructure,
    ctx: &CtxObject,
) -> Result<Vec<&'s FinGroupoid>, ModelError> {
    ctx.sorts()
        .iter()
        .map(|s| {
            st.carrier(s)
                .ok_or_else(|| ModelError::Shape(format!("no carrier for sort `{s}`")))
        })
        .collect()
}

fn mt_src(slots: &[&FinGroupoid], mt: &[usize]) -> Vec<usize> {
    mt.iter().zip(slots).map(|(&u, g)| g.src(u)).collect()
}

fn mt_tgt(slots: &[&FinGroupoid], mt: &[usize]) -> Vec<usize> {
    mt.iter().zip(slots).map(|(&u, g)| g.tgt(u)).collect()
}

fn ot_id(slots: &[&FinGroupoid], ot: &[usize]) -> Vec<usize> {
    ot.iter().zip(slots).map(|(&o, g)| g.identity(o)).collect()
}

fn mt_inverse(slots: &[&FinGroupoid], mt: &[usize]) -> Vec<usize> {
    mt.iter().zip(slots).map(|(&u, g)| g.inverse(u)).collect()
}

fn mt_compose(slots: &[&FinGroupoid], g: &[usize], f: &[usize]) -> Vec<usize> {
    g.iter()
        .zip(f)
        .zip(slots)
        .map(|((&a, &b), gr)| gr.compose(a, b))
        .collect()
}

fn mt_composable(slots: &[&FinGroupoid], g: &[usize], f: &[usize]) -> bool {
    g.iter()
        .zip(f)
        .zip(slots)
        .all(|((&a, &b), gr)| gr.tgt(b) == gr.src(a))
}

/// Checks that a family is a strictly split functor: exhaustive keys,
/// correct endpoints, identity transports at identity tuples, and
/// composition of transports on the nose.
pub fn validate_family(st: &GroupoidStructure, p: &GPred) -> Result<(), ModelError> {
    let slots = slot_carriers(st, &p.ctx)?;
    let obj_dims: Vec<usize> = slots.iter().map(|g| g.n_objects()).collect();
    let mor_dims: Vec<usize> = slots.iter().map(|g| g.n_mors()).collect();
    let points = tuples(&obj_dims);
    let mts = tuples(&mor_dims);
    let err = |msg: String| Err(ModelError::Shape(msg));
    if p.fibers.len() != points.len() || !points.iter().all(|pt| p.fibers.contains_key(pt)) {
        return err("fiber keys do not match the base points".into());
    }
    if p.transports.len() != mts.len() || !mts.iter().all(|mt| p.transports.contains_key(mt))
    {
        return err("transport keys do not match the base morphism tuples".into());
    }
    for g in p.fibers.values() {
        g.validate()?;
    }
    for (mt, t) in &p.transports {
        if t.src != mt_src(&slots, mt) || t.tgt != mt_tgt(&slots, mt) {
            return err(format!("transport endpoints wrong at {mt:?}"));
        }
        t.fun.validate(&p.fibers[&t.src], &p.fibers[&t.tgt]).map_err(|e| {
            ModelError::Shape(format!("transport at {mt:?} is not a functor: {e}"))
        })?;
    }
    for pt in &points {
        let idt = ot_id(&slots, pt);
        if !p.transports[&idt].fun.is_identity() {
            return err(format!("transport at identity tuple of {pt:?} is not identity"));
        }
    }
    for gt in &mts {
        for ft in &mts {
            if mt_composable(&slots, gt, ft) {
                let ct = mt_compose(&slots, gt, ft);
                let lhs = &p.transports[&ct].fun;
                let rhs = p.transports[ft].fun.then(&p.transports[gt].fun);
                if *lhs != rhs {
                    return err(format!("transports do not compose at {gt:?} ∘ {ft:?}"));
                }
            }
        }
    }
    Ok(())
}

/// Checks the pseudonaturality laws of a morphism: component functors
/// between the right fibers, cells with the right endpoints, identity cells
/// at identity tuples, the cocycle law, and naturality of each cell.
pub fn validate_pseudonatural(st: &GroupoidStructure, m: &GrpdMor) -> Result<(), ModelError> {
    if m.dom.ctx != m.cod.ctx {
        return Err(ModelError::Shape("morphism endpoints over different contexts".into()));
    }
    let slots = slot_carriers(st, &m.dom.ctx)?;
    let err = |msg: String| Err(ModelError::Shape(msg));
    if m.comps.keys().ne(m.dom.fibers.keys()) {
        return err("component keys do not match the base points".into());
    }
    if m.cells.keys().ne(m.dom.transports.keys()) {
        return err("cell keys do not match the base morphism tuples".into());
    }
    for (pt, f) in &m.comps {
        f.validate(&m.dom.fibers[pt], &m.cod.fibers[pt]).map_err(|e| {
            ModelError::Shape(format!("component at {pt:?} is not a functor: {e}"))
        })?;
    }
    for (g, cell) in &m.cells {
        let t = m.dom.transport(g)?;
        let ct = m.cod.transport(g)?;
        let df_src = &m.dom.fibers[&t.src];
        let cf_tgt = &m.cod.fibers[&t.tgt];
        if cell.len() != df_src.n_objects() {
            return err(format!("cell vector at {g:?} has the wrong length"));
        }
        for (x, &c) in cell.iter().enumerate() {
            if c >= cf_tgt.n_mors()
                || cf_tgt.src(c) != ct.fun.obj_map[m.comps[&t.src].obj_map[x]]
                || cf_tgt.tgt(c) != m.comps[&t.tgt].obj_map[t.fun.obj_map[x]]
            {
                return err(format!("cell endpoints wrong at {g:?}, object {x}"));
            }
        }
        // Naturality of the cell in the fiber direction.
        let df = &m.dom.fibers[&t.src];
        for xi in 0..df.n_mors() {
            let (x, y) = (df.src(xi), df.tgt(xi));
            let lhs = cf_tgt.compose(cell[y], ct.fun.mor_map[m.comps[&t.src].mor_map[xi]]);
            let rhs =
                cf_tgt.compose(m.comps[&t.tgt].mor_map[t.fun.mor_map[xi]], cell[x]);
            if lhs != rhs {
                return err(format!("cell at {g:?} not natural at fiber morphism {xi}"));
            }
        }
    }
    // Identity cells at identity tuples.
    for (pt, fib) in &m.dom.fibers {
        let idt = ot_id(&slots, pt);
        let cell = &m.cells[&idt];
        for &c in cell.iter().take(fib.n_objects()) {
            if !m.cod.fibers[pt].is_identity(c) {
                return err(format!("cell at identity tuple of {pt:?} is not identity"));
            }
        }
    }
    // Cocycle: c_{g∘f}(x) = c_g(T^dom_f x) ∘ T^cod_g(c_f(x)).
    for (gt, tg) in &m.dom.transports {
        for (ft, tf) in &m.dom.transports {
            if !mt_composable(&slots, gt, ft) {
                continue;
            }
            let ct = mt_compose(&slots, gt, ft);
            let cf_tgt = &m.cod.fibers[&tg.tgt];
            let cg = &m.cod.transports[gt];
            for x in 0..m.dom.fibers[&tf.src].n_objects() {
                let lhs = m.cells[&ct][x];
                let rhs = cf_tgt.compose(
                    m.cells[gt][tf.fun.obj_map[x]],
                    cg.fun.mor_map[m.cells[ft][x]],
                );
                if lhs != rhs {
                    return err(format!("cocycle fails at {gt:?} ∘ {ft:?}, object {x}"));
                }
            }
        }
    }
    Ok(())
}

/// Identity cells for a transport-strict morphism: the cell at `g`, `x` is
/// the identity on `cod.T_g(comp(x))`. Valid only when the components
/// commute with transport on the nose.
fn strict_cells(
    dom: &GPred,
    cod: &GPred,
    comps: &BTreeMap<Vec<usize>, PlainFunctor>,
) -> BTreeMap<Vec<usize>, Vec<usize>> {
    dom.transports
        .iter()
        .map(|(mt, t)| {
            let ct = &cod.transports[mt];
            let cf = &cod.fibers[&t.tgt];
            let cells = (0..dom.fibers[&t.src].n_objects())
                .map(|x| cf.identity(ct.fun.obj_map[comps[&t.src].obj_map[x]]))
                .collect();
            (mt.clone(), cells)
        })
        .collect()
}

/// The groupoid-valued backend over one structure.
pub struct GroupoidModel<'a> {
    pub sig: &'a Signature,
    pub structure: &'a GroupoidStructure,
    pub max_fiber: usize,
}

impl<'a> GroupoidModel<'a> {
    pub fn new(sig: &'a Signature, structure: &'a GroupoidStructure) -> Self {
        GroupoidModel {
            sig,
            structure,
            max_fiber: DEFAULT_MAX_FIBER,
        }
    }

    pub fn with_max_fiber(mut self, max_fiber: usize) -> Self {
        self.max_fiber = max_fiber;
        self
    }

    fn carrier(&self, sort: &str) -> Result<&'a FinGroupoid, ModelError> {
        self.structure
            .carrier(sort)
            .ok_or_else(|| ModelError::Shape(format!("no carrier for sort `{sort}`")))
    }

    fn slots(&self, ctx: &CtxObject) -> Result<Vec<&'a FinGroupoid>, ModelError> {
        ctx.sorts().iter().map(|s| self.carrier(s)).collect()
    }

    fn points(&self, ctx: &CtxObject) -> Result<Vec<Vec<usize>>, ModelError> {
        let dims: Vec<usize> = self.slots(ctx)?.iter().map(|g| g.n_objects()).collect();
        Ok(tuples(&dims))
    }

    fn mtuples(&self, ctx: &CtxObject) -> Result<Vec<Vec<usize>>, ModelError> {
        let dims: Vec<usize> = self.slots(ctx)?.iter().map(|g| g.n_mors()).collect();
        Ok(tuples(&dims))
    }

    /// The constant family with every fiber the given groupoid and every
    /// transport the identity.
    fn constant_family(&self, ctx: &CtxObject, fib: FinGroupoid) -> Result<GPred, ModelError> {
        let slots = self.slots(ctx)?;
        let fibers = self
            .points(ctx)?
            .into_iter()
            .map(|pt| (pt, fib.clone()))
            .collect();
        let id = PlainFunctor::identity(&fib);
        let transports = self
            .mtuples(ctx)?
            .into_iter()
            .map(|mt| {
                let t = Transport {
                    src: mt_src(&slots, &mt),
                    tgt: mt_tgt(&slots, &mt),
                    fun: id.clone(),
                };
                (mt, t)
            })
            .collect();
        Ok(GPred {
            ctx: ctx.clone(),
            fibers,
            transports,
        })
    }

    fn same_ctx(&self, p: &GPred, q: &GPred) -> Result<(), ModelError> {
        if p.ctx != q.ctx {
            return Err(ModelError::Shape(format!(
                "contexts differ: {:?} vs {:?}",
                p.ctx, q.ctx
            )));
        }
        Ok(())
    }

    /// Per-point product fibers of two families over a shared context. A
    /// size pre-check keeps every constructed fiber within `max_fiber` in
    /// both objects and morphisms, so downstream table constructions stay
    /// quadratic in the bound.
    fn product_fibers(
        &self,
        p: &GPred,
        q: &GPred,
    ) -> Result<BTreeMap<Vec<usize>, ProductFiber>, ModelError> {
        self.same_ctx(p, q)?;
        let mut out = BTreeMap::new();
        for (pt, pf) in &p.fibers {
            let qf = &q.fibers[pt];
            let objs = pf.n_objects().saturating_mul(qf.n_objects());
            let mors = pf.n_mors().saturating_mul(qf.n_mors());
            if objs.max(mors) > self.max_fiber {
                return Err(ModelError::Overflow {
                    what: "product fiber".into(),
                    size: objs.max(mors),
                    bound: self.max_fiber,
                });
            }
            out.insert(pt.clone(), ProductFiber::build(pf, qf));
        }
        Ok(out)
    }

    fn coproduct_fibers(
        &self,
        p: &GPred,
        q: &GPred,
    ) -> Result<BTreeMap<Vec<usize>, CoproductFiber>, ModelError> {
        self.same_ctx(p, q)?;
        let mut out = BTreeMap::new();
        for (pt, pf) in &p.fibers {
            let qf = &q.fibers[pt];
            let objs = pf.n_objects() + qf.n_objects();
            let mors = pf.n_mors() + qf.n_mors();
            if objs.max(mors) > self.max_fiber {
                return Err(ModelError::Overflow {
                    what: "coproduct fiber".into(),
                    size: objs.max(mors),
                    bound: self.max_fiber,
                });
            }
            out.insert(pt.clone(), CoproductFiber::build(pf, qf));
        }
        Ok(out)
    }

    fn functor_fibers(
        &self,
        p: &GPred,
        q: &GPred,
    ) -> Result<BTreeMap<Vec<usize>, FunctorFiber>, ModelError> {
        self.same_ctx(p, q)?;
        p.fibers
            .iter()
            .map(|(pt, pf)| {
                FunctorFiber::build(pf, &q.fibers[pt], self.max_fiber)
                    .map(|ff| (pt.clone(), ff))
            })
            .collect()
    }

    /// Splits the context of a family over at least one slot into the short
    /// base and the carrier of the last slot.
    fn split_last(&self, p: &GPred) -> Result<(CtxObject, &'a FinGroupoid), ModelError> {
        if p.ctx.is_empty() {
            return Err(ModelError::Shape(
                "quantification requires a non-empty context".into(),
            ));
        }
        let last = self.carrier(p.ctx.sorts().last().unwrap())?;
        Ok((p.ctx.drop_last(), last))
    }

    /// Per-short-point total groupoids of a family over an extended context.
    fn groth_fibers(
        &self,
        p: &GPred,
    ) -> Result<(CtxObject, BTreeMap<Vec<usize>, GrothFiber>), ModelError> {
        let (short, last) = self.split_last(p)?;
        let short_slots = self.slots(&short)?;
        let mut out = BTreeMap::new();
        for pt in self.points(&short)? {
            let idt = ot_id(&short_slots, &pt);
            let gf = GrothFiber::build(
                last,
                |b| {
                    let mut key = pt.clone();
                    key.push(b);
                    &p.fibers[&key]
                },
                |g| {
                    let mut key = idt.clone();
                    key.push(g);
                    &p.transports[&key].fun
                },
                self.max_fiber,
            )?;
            out.insert(pt, gf);
        }
        Ok((short, out))
    }

    /// Per-short-point section groupoids of a family over an extended
    /// context.
    fn section_fibers(
        &self,
        p: &GPred,
    ) -> Result<(CtxObject, BTreeMap<Vec<usize>, SectionsFiber>), ModelError> {
        let (short, last) = self.split_last(p)?;
        let short_slots = self.slots(&short)?;
        let mut out = BTreeMap::new();
        for pt in self.points(&short)? {
            let idt = ot_id(&short_slots, &pt);
            let sf = SectionsFiber::build(
                last,
                |b| {
                    let mut key = pt.clone();
                    key.push(b);
                    &p.fibers[&key]
                },
                |g| {
                    let mut key = idt.clone();
                    key.push(g);
                    &p.transports[&key].fun
                },
                self.max_fiber,
            )?;
            out.insert(pt, sf);
        }
        Ok((short, out))
    }

    /// Transport of `p` along the tuple that extends `u` by the identity at
    /// the given last-slot object.
    fn prefix_transport<'b>(
        &self,
        p: &'b GPred,
        u: &[usize],
        last: &FinGroupoid,
        b: usize,
    ) -> Result<&'b PlainFunctor, ModelError> {
        let mut key = u.to_vec();
        key.push(last.identity(b));
        Ok(&p.transport(&key)?.fun)
    }
}

impl Model for GroupoidModel<'_> {
    type Pred = GPred;
    type ProofMor = GrpdMor;

    fn base_sizes(&self, ctx: &CtxObject) -> Result<Vec<usize>, ModelError> {
        Ok(self.slots(ctx)?.iter().map(|g| g.n_objects()).collect())
    }

    fn top(&self, ctx: &CtxObject) -> Result<GPred, ModelError> {
        self.constant_family(ctx, FinGroupoid::discrete(1))
    }

    fn bot(&self, ctx: &CtxObject) -> Result<GPred, ModelError> {
        self.constant_family(ctx, FinGroupoid::discrete(0))
    }

    fn and(&self, p: &GPred, q: &GPred) -> Result<GPred, ModelError> {
        let prods = self.product_fibers(p, q)?;
        let mut transports = BTreeMap::new();
        for (mt, tp) in &p.transports {
            let tq = &q.transports[mt];
            let src = &prods[&tp.src];
            let tgt = &prods[&tp.tgt];
            let obj_map = (0..src.gpd.n_objects())
                .map(|o| {
                    let (i, j) = src.obj_parts(o);
                    tgt.obj(tp.fun.obj_map[i], tq.fun.obj_map[j])
                })
                .collect();
            let mor_map = (0..src.gpd.n_mors())
                .map(|m| {
                    let (u, v) = src.mor_parts(m);
                    tgt.mor(tp.fun.mor_map[u], tq.fun.mor_map[v])
                })
                .collect();
            transports.insert(
                mt.clone(),
                Transport {
                    src: tp.src.clone(),
                    tgt: tp.tgt.clone(),
                    fun: PlainFunctor { obj_map, mor_map },
                },
            );
        }
        Ok(GPred {
            ctx: p.ctx.clone(),
            fibers: prods.into_iter().map(|(pt, f)| (pt, f.gpd)).collect(),
            transports,
        })
    }

    fn or(&self, p: &GPred, q: &GPred) -> Result<GPred, ModelError> {
        let cops = self.coproduct_fibers(p, q)?;
        let mut transports = BTreeMap::new();
        for (mt, tp) in &p.transports {
            let tq = &q.transports[mt];
            let src = &cops[&tp.src];
            let tgt = &cops[&tp.tgt];
            let obj_map = (0..src.gpd.n_objects())
                .map(|o| match src.decode_obj(o) {
                    Tag::Left(i) => tgt.left_obj(tp.fun.obj_map[i]),
                    Tag::Right(j) => tgt.right_obj(tq.fun.obj_map[j]),
                })
                .collect();
            let mor_map = (0..src.gpd.n_mors())
                .map(|m| match src.decode_mor(m) {
                    Tag::Left(u) => tgt.left_mor(tp.fun.mor_map[u]),
                    Tag::Right(v) => tgt.right_mor(tq.fun.mor_map[v]),
                })
                .collect();
            transports.insert(
                mt.clone(),
                Transport {
                    src: tp.src.clone(),
                    tgt: tp.tgt.clone(),
                    fun: PlainFunctor { obj_map, mor_map },
                },
            );
        }
        Ok(GPred {
            ctx: p.ctx.clone(),
            fibers: cops.into_iter().map(|(pt, f)| (pt, f.gpd)).collect(),
            transports,
        })
    }

    fn implies(&self, p: &GPred, q: &GPred) -> Result<GPred, ModelError> {
        let ffs = self.functor_fibers(p, q)?;
        let slots = self.slots(&p.ctx)?;
        let mut transports = BTreeMap::new();
        for (mt, tp) in &p.transports {
            let tq = &q.transports[mt];
            let tp_inv = &p.transports[&mt_inverse(&slots, mt)].fun;
            let src = &ffs[&tp.src];
            let tgt = &ffs[&tp.tgt];
            // Conjugation: F ↦ T^q ∘ F ∘ (T^p)⁻¹ on functors and
            // componentwise on natural isomorphisms.
            let conj = |f: &PlainFunctor| PlainFunctor {
                obj_map: (0..tp_inv.obj_map.len())
                    .map(|y| tq.fun.obj_map[f.obj_map[tp_inv.obj_map[y]]])
                    .collect(),
                mor_map: (0..tp_inv.mor_map.len())
                    .map(|v| tq.fun.mor_map[f.mor_map[tp_inv.mor_map[v]]])
                    .collect(),
            };
            let obj_map: Vec<usize> = src
                .functors
                .iter()
                .map(|f| {
                    tgt.functor_index(&conj(f)).ok_or_else(|| {
                        ModelError::Shape("conjugated functor missing from fiber".into())
                    })
                })
                .collect::<Result<_, _>>()?;
            let mor_map: Vec<usize> = src
                .nats
                .iter()
                .map(|(from, to, comps)| {
                    let new: Vec<usize> = (0..tp_inv.obj_map.len())
                        .map(|y| tq.fun.mor_map[comps[tp_inv.obj_map[y]]])
                        .collect();
                    tgt.nat_index(obj_map[*from], obj_map[*to], &new)
                        .ok_or_else(|| {
                            ModelError::Shape(
                                "conjugated natural isomorphism missing from fiber".into(),
                            )
                        })
                })
                .collect::<Result<_, _>>()?;
            transports.insert(
                mt.clone(),
                Transport {
                    src: tp.src.clone(),
                    tgt: tp.tgt.clone(),
                    fun: PlainFunctor { obj_map, mor_map },
                },
            );
        }
        Ok(GPred {
            ctx: p.ctx.clone(),
            fibers: ffs.into_iter().map(|(pt, f)| (pt, f.gpd)).collect(),
            transports,
        })
    }

    fn eq(&self, sort: &str) -> Result<GPred, ModelError> {
        let car = self.carrier(sort)?;
        let ctx = CtxObject::new(vec![sort.to_string(), sort.to_string()]);
        let mut fibers = BTreeMap::new();
        for a in 0..car.n_objects() {
            for b in 0..car.n_objects() {
                fibers.insert(
                    vec![a, b],
                    FinGroupoid::discrete(car.hom(a, b).len()),
                );
            }
        }
        let mut transports = BTreeMap::new();
        for u in 0..car.n_mors() {
            for v in 0..car.n_mors() {
                let src = vec![car.src(u), car.src(v)];
                let tgt = vec![car.tgt(u), car.tgt(v)];
                let hs = car.hom(src[0], src[1]);
                let ht = car.hom(tgt[0], tgt[1]);
                // p ↦ v ∘ p ∘ u⁻¹, as positions in the ascending hom lists.
                let map: Vec<usize> = hs
                    .iter()
                    .map(|&p| {
                        let img = car.compose(v, car.compose(p, car.inverse(u)));
                        ht.iter().position(|&x| x == img).unwrap()
                    })
                    .collect();
                transports.insert(
                    vec![u, v],
                    Transport {
                        src,
                        tgt,
                        fun: PlainFunctor {
                            obj_map: map.clone(),
                            mor_map: map,
                        },
                    },
                );
            }
        }
        Ok(GPred {
            ctx,
            fibers,
            transports,
        })
    }

    fn reindex(&self, t: &TermMorphism, p: &GPred) -> Result<GPred, ModelError> {
        if *t.cod() != p.ctx {
            return Err(ModelError::Shape(
                "reindexing morphism codomain does not match the family".into(),
            ));
        }
        let slots = self.slots(t.dom())?;
        let mut fibers = BTreeMap::new();
        for pt in self.points(t.dom())? {
            let image: Vec<usize> = t
                .terms()
                .iter()
                .map(|term| self.structure.eval_term_obj(term, &pt))
                .collect::<Result<_, _>>()?;
            fibers.insert(pt, p.fiber(&image)?.clone());
        }
        let mut transports = BTreeMap::new();
        for mt in self.mtuples(t.dom())? {
            let image: Vec<usize> = t
                .terms()
                .iter()
                .map(|term| self.structure.eval_term_mor(term, &mt))
                .collect::<Result<_, _>>()?;
            let tr = p.transport(&image)?;
            transports.insert(
                mt.clone(),
                Transport {
                    src: mt_src(&slots, &mt),
                    tgt: mt_tgt(&slots, &mt),
                    fun: tr.fun.clone(),
                },
            );
        }
        Ok(GPred {
            ctx: t.dom().clone(),
            fibers,
            transports,
        })
    }

    fn exists_last(&self, p: &GPred) -> Result<GPred, ModelError> {
        let (short, groths) = self.groth_fibers(p)?;
        let (_, last) = self.split_last(p)?;
        let slots = self.slots(&short)?;
        let mut transports = BTreeMap::new();
        for mt in self.mtuples(&short)? {
            let src_pt = mt_src(&slots, &mt);
            let tgt_pt = mt_tgt(&slots, &mt);
            let src = &groths[&src_pt];
            let tgt = &groths[&tgt_pt];
            let obj_map: Vec<usize> = src
                .objs
                .iter()
                .map(|&(b, x)| {
                    let tb = self.prefix_transport(p, &mt, last, b)?;
                    tgt.obj_index(b, tb.obj_map[x]).ok_or_else(|| {
                        ModelError::Shape("transported total object missing".into())
                    })
                })
                .collect::<Result<_, _>>()?;
            let mor_map: Vec<usize> = src
                .mors
                .iter()
                .map(|&(g, sg, phi)| {
                    let (b, x) = src.objs[sg];
                    let tb = self.prefix_transport(p, &mt, last, b)?;
                    let tgt_b = self.prefix_transport(p, &mt, last, last.tgt(g))?;
                    let new_src = tgt.obj_index(b, tb.obj_map[x]).ok_or_else(|| {
                        ModelError::Shape("transported total object missing".into())
                    })?;
                    tgt.mor_index(g, new_src, tgt_b.mor_map[phi]).ok_or_else(|| {
                        ModelError::Shape("transported total morphism missing".into())
                    })
                })
                .collect::<Result<_, _>>()?;
            transports.insert(
                mt,
                Transport {
                    src: src_pt,
                    tgt: tgt_pt,
                    fun: PlainFunctor { obj_map, mor_map },
                },
            );
        }
        Ok(GPred {
            ctx: short,
            fibers: groths.into_iter().map(|(pt, f)| (pt, f.gpd)).collect(),
            transports,
        })
    }

    fn forall_last(&self, p: &GPred) -> Result<GPred, ModelError> {
        let (short, secs) = self.section_fibers(p)?;
        let (_, last) = self.split_last(p)?;
        let slots = self.slots(&short)?;
        let mut transports = BTreeMap::new();
        for mt in self.mtuples(&short)? {
            let src_pt = mt_src(&slots, &mt);
            let tgt_pt = mt_tgt(&slots, &mt);
            let src = &secs[&src_pt];
            let tgt = &secs[&tgt_pt];
            let move_section = |s: &Section| -> Result<Section, ModelError> {
                let assign = s
                    .assign
                    .iter()
                    .enumerate()
                    .map(|(b, &x)| Ok(self.prefix_transport(p, &mt, last, b)?.obj_map[x]))
                    .collect::<Result<_, ModelError>>()?;
                let coh = s
                    .coh
                    .iter()
                    .enumerate()
                    .map(|(v, &c)| {
                        let tb = self.prefix_transport(p, &mt, last, last.tgt(v))?;
                        Ok(tb.mor_map[c])
                    })
                    .collect::<Result<_, ModelError>>()?;
                Ok(Section { assign, coh })
            };
            let obj_map: Vec<usize> = src
                .sections
                .iter()
                .map(|s| {
                    tgt.section_index(&move_section(s)?).ok_or_else(|| {
                        ModelError::Shape("transported section missing".into())
                    })
                })
                .collect::<Result<_, _>>()?;
            let mor_map: Vec<usize> = src
                .mors
                .iter()
                .map(|(from, to, comps)| {
                    let new: Vec<usize> = comps
                        .iter()
                        .enumerate()
                        .map(|(b, &c)| {
                            Ok(self.prefix_transport(p, &mt, last, b)?.mor_map[c])
                        })
                        .collect::<Result<_, ModelError>>()?;
                    tgt.mor_index(obj_map[*from], obj_map[*to], &new).ok_or_else(|| {
                        ModelError::Shape("transported section morphism missing".into())
                    })
                })
                .collect::<Result<_, _>>()?;
            transports.insert(
                mt,
                Transport {
                    src: src_pt,
                    tgt: tgt_pt,
                    fun: PlainFunctor { obj_map, mor_map },
                },
            );
        }
        Ok(GPred {
            ctx: short,
            fibers: secs.into_iter().map(|(pt, f)| (pt, f.gpd)).collect(),
            transports,
        })
    }

    fn id(&self, p: &GPred) -> Result<GrpdMor, ModelError> {
        let comps: BTreeMap<Vec<usize>, PlainFunctor> = p
            .fibers
            .iter()
            .map(|(pt, f)| (pt.clone(), PlainFunctor::identity(f)))
            .collect();
        let cells = strict_cells(p, p, &comps);
        Ok(GrpdMor {
            dom: p.clone(),
            cod: p.clone(),
            comps,
            cells,
        })
    }

    fn compose(&self, g: &GrpdMor, f: &GrpdMor) -> Result<GrpdMor, ModelError> {
        if f.cod != g.dom {
            return Err(ModelError::Shape(
                "composition endpoints do not match".into(),
            ));
        }
        let comps: BTreeMap<Vec<usize>, PlainFunctor> = f
            .comps
            .iter()
            .map(|(pt, ff)| (pt.clone(), ff.then(&g.comps[pt])))
            .collect();
        let cells = f
            .cells
            .iter()
            .map(|(mt, fc)| {
                let t = &f.dom.transports[mt];
                let rf = &g.cod.fibers[&t.tgt];
                let cell = (0..f.dom.fibers[&t.src].n_objects())
                    .map(|x| {
                        rf.compose(
                            g.comps[&t.tgt].mor_map[fc[x]],
                            g.cells[mt][f.comps[&t.src].obj_map[x]],
                        )
                    })
                    .collect();
                (mt.clone(), cell)
            })
            .collect();
        Ok(GrpdMor {
            dom: f.dom.clone(),
            cod: g.cod.clone(),
            comps,
            cells,
        })
    }

    fn reindex_mor(&self, t: &TermMorphism, f: &GrpdMor) -> Result<GrpdMor, ModelError> {
        let dom = self.reindex(t, &f.dom)?;
        let cod = self.reindex(t, &f.cod)?;
        let mut comps = BTreeMap::new();
        for pt in self.points(t.dom())? {
            let image: Vec<usize> = t
                .terms()
                .iter()
                .map(|term| self.structure.eval_term_obj(term, &pt))
                .collect::<Result<_, _>>()?;
            comps.insert(pt, f.comps[&image].clone());
        }
        let mut cells = BTreeMap::new();
        for mt in self.mtuples(t.dom())? {
            let image: Vec<usize> = t
                .terms()
                .iter()
                .map(|term| self.structure.eval_term_mor(term, &mt))
                .collect::<Result<_, _>>()?;
            cells.insert(mt, f.cells[&image].clone());
        }
        Ok(GrpdMor {
            dom,
            cod,
            comps,
            cells,
        })
    }

    fn bang(&self, p: &GPred) -> Result<GrpdMor, ModelError> {
        let cod = self.top(&p.ctx)?;
        let comps: BTreeMap<Vec<usize>, PlainFunctor> = p
            .fibers
            .iter()
            .map(|(pt, f)| {
                let fun = PlainFunctor {
                    obj_map: vec![0; f.n_objects()],
                    mor_map: vec![0; f.n_mors()],
                };
                (pt.clone(), fun)
            })
            .collect();
        let cells = strict_cells(p, &cod, &comps);
        Ok(GrpdMor {
            dom: p.clone(),
            cod,
            comps,
            cells,
        })
    }

    fn absurd(&self, p: &GPred) -> Result<GrpdMor, ModelError> {
        let dom = self.bot(&p.ctx)?;
        let comps: BTreeMap<Vec<usize>, PlainFunctor> = p
            .fibers
            .keys()
            .map(|pt| {
                (
                    pt.clone(),
                    PlainFunctor {
                        obj_map: vec![],
                        mor_map: vec![],
                    },
                )
            })
            .collect();
        let cells = strict_cells(&dom, p, &comps);
        Ok(GrpdMor {
            dom,
            cod: p.clone(),
            comps,
            cells,
        })
    }

    fn proj1(&self, p: &GPred, q: &GPred) -> Result<GrpdMor, ModelError> {
        let dom = self.and(p, q)?;
        let prods = self.product_fibers(p, q)?;
        let comps: BTreeMap<Vec<usize>, PlainFunctor> = prods
            .iter()
            .map(|(pt, pr)| {
                let fun = PlainFunctor {
                    obj_map: (0..pr.gpd.n_objects()).map(|o| pr.obj_parts(o).0).collect(),
                    mor_map: (0..pr.gpd.n_mors()).map(|m| pr.mor_parts(m).0).collect(),
                };
                (pt.clone(), fun)
            })
            .collect();
        let cells = strict_cells(&dom, p, &comps);
        Ok(GrpdMor {
            dom,
            cod: p.clone(),
            comps,
            cells,
        })
    }

    fn proj2(&self, p: &GPred, q: &GPred) -> Result<GrpdMor, ModelError> {
        let dom = self.and(p, q)?;
        let prods = self.product_fibers(p, q)?;
        let comps: BTreeMap<Vec<usize>, PlainFunctor> = prods
            .iter()
            .map(|(pt, pr)| {
                let fun = PlainFunctor {
                    obj_map: (0..pr.gpd.n_objects()).map(|o| pr.obj_parts(o).1).collect(),
                    mor_map: (0..pr.gpd.n_mors()).map(|m| pr.mor_parts(m).1).collect(),
                };
                (pt.clone(), fun)
            })
            .collect();
        let cells = strict_cells(&dom, q, &comps);
        Ok(GrpdMor {
            dom,
            cod: q.clone(),
            comps,
            cells,
        })
    }

    fn pair(&self, f: &GrpdMor, g: &GrpdMor) -> Result<GrpdMor, ModelError> {
        if f.dom != g.dom {
            return Err(ModelError::Shape("pairing with different domains".into()));
        }
        let cod = self.and(&f.cod, &g.cod)?;
        let prods = self.product_fibers(&f.cod, &g.cod)?;
        let comps: BTreeMap<Vec<usize>, PlainFunctor> = f
            .comps
            .iter()
            .map(|(pt, ff)| {
                let pr = &prods[pt];
                let gg = &g.comps[pt];
                let fun = PlainFunctor {
                    obj_map: (0..ff.obj_map.len())
                        .map(|x| pr.obj(ff.obj_map[x], gg.obj_map[x]))
                        .collect(),
                    mor_map: (0..ff.mor_map.len())
                        .map(|u| pr.mor(ff.mor_map[u], gg.mor_map[u]))
                        .collect(),
                };
                (pt.clone(), fun)
            })
            .collect();
        let cells = f
            .cells
            .iter()
            .map(|(mt, fc)| {
                let t = &f.dom.transports[mt];
                let pr = &prods[&t.tgt];
                let cell = (0..f.dom.fibers[&t.src].n_objects())
                    .map(|x| pr.mor(fc[x], g.cells[mt][x]))
                    .collect();
                (mt.clone(), cell)
            })
            .collect();
        Ok(GrpdMor {
            dom: f.dom.clone(),
            cod,
            comps,
            cells,
        })
    }

    fn inj1(&self, p: &GPred, q: &GPred) -> Result<GrpdMor, ModelError> {
        let cod = self.or(p, q)?;
        let cops = self.coproduct_fibers(p, q)?;
        let comps: BTreeMap<Vec<usize>, PlainFunctor> = p
            .fibers
            .iter()
            .map(|(pt, f)| {
                let co = &cops[pt];
                let fun = PlainFunctor {
                    obj_map: (0..f.n_objects()).map(|i| co.left_obj(i)).collect(),
                    mor_map: (0..f.n_mors()).map(|u| co.left_mor(u)).collect(),
                };
                (pt.clone(), fun)
            })
            .collect();
        let cells = strict_cells(p, &cod, &comps);
        Ok(GrpdMor {
            dom: p.clone(),
            cod,
            comps,
            cells,
        })
    }

    fn inj2(&self, p: &GPred, q: &GPred) -> Result<GrpdMor, ModelError> {
        let cod = self.or(p, q)?;
        let cops = self.coproduct_fibers(p, q)?;
        let comps: BTreeMap<Vec<usize>, PlainFunctor> = q
            .fibers
            .iter()
            .map(|(pt, f)| {
                let co = &cops[pt];
                let fun = PlainFunctor {
                    obj_map: (0..f.n_objects()).map(|j| co.right_obj(j)).collect(),
                    mor_map: (0..f.n_mors()).map(|v| co.right_mor(v)).collect(),
                };
                (pt.clone(), fun)
            })
            .collect();
        let cells = strict_cells(q, &cod, &comps);
        Ok(GrpdMor {
            dom: q.clone(),
            cod,
            comps,
            cells,
        })
    }

    fn case(&self, f: &GrpdMor, g: &GrpdMor) -> Result<GrpdMor, ModelError> {
        if f.cod != g.cod {
            return Err(ModelError::Shape("case with different codomains".into()));
        }
        let dom = self.or(&f.dom, &g.dom)?;
        let cops = self.coproduct_fibers(&f.dom, &g.dom)?;
        let comps: BTreeMap<Vec<usize>, PlainFunctor> = cops
            .iter()
            .map(|(pt, co)| {
                let ff = &f.comps[pt];
                let gg = &g.comps[pt];
                let fun = PlainFunctor {
                    obj_map: (0..co.gpd.n_objects())
                        .map(|o| match co.decode_obj(o) {
                            Tag::Left(i) => ff.obj_map[i],
                            Tag::Right(j) => gg.obj_map[j],
                        })
                        .collect(),
                    mor_map: (0..co.gpd.n_mors())
                        .map(|m| match co.decode_mor(m) {
                            Tag::Left(u) => ff.mor_map[u],
                            Tag::Right(v) => gg.mor_map[v],
                        })
                        .collect(),
                };
                (pt.clone(), fun)
            })
            .collect();
        let cells = dom
            .transports
            .iter()
            .map(|(mt, t)| {
                let co = &cops[&t.src];
                let cell = (0..co.gpd.n_objects())
                    .map(|o| match co.decode_obj(o) {
                        Tag::Left(i) => f.cells[mt][i],
                        Tag::Right(j) => g.cells[mt][j],
                    })
                    .collect();
                (mt.clone(), cell)
            })
            .collect();
        Ok(GrpdMor {
            dom,
            cod: f.cod.clone(),
            comps,
            cells,
        })
    }

    fn eval_mor(&self, p: &GPred, q: &GPred) -> Result<GrpdMor, ModelError> {
        let imp = self.implies(p, q)?;
        let dom = self.and(&imp, p)?;
        let ffs = self.functor_fibers(p, q)?;
        let comps: BTreeMap<Vec<usize>, PlainFunctor> = p
            .fibers
            .iter()
            .map(|(pt, pf)| {
                let ff = &ffs[pt];
                let qf = &q.fibers[pt];
                let pr = ProductFiber::build(&ff.gpd, pf);
                let fun = PlainFunctor {
                    obj_map: (0..pr.gpd.n_objects())
                        .map(|o| {
                            let (k, x) = pr.obj_parts(o);
                            ff.functors[k].obj_map[x]
                        })
                        .collect(),
                    mor_map: (0..pr.gpd.n_mors())
                        .map(|m| {
                            let (nk, xi) = pr.mor_parts(m);
                            let (_, to, comps) = &ff.nats[nk];
                            qf.compose(ff.functors[*to].mor_map[xi], comps[pf.src(xi)])
                        })
                        .collect(),
                };
                (pt.clone(), fun)
            })
            .collect();
        let cells = strict_cells(&dom, q, &comps);
        Ok(GrpdMor {
            dom,
            cod: q.clone(),
            comps,
            cells,
        })
    }

    fn curry(&self, f: &GrpdMor, p: &GPred, q: &GPred) -> Result<GrpdMor, ModelError> {
        // f : P∧Q → R becomes P → (Q⇒R).
        let r = &f.cod;
        let cod = self.implies(q, r)?;
        let ffs = self.functor_fibers(q, r)?;
        let prods = self.product_fibers(p, q)?;
        let slots = self.slots(&p.ctx)?;
        let mut comps: BTreeMap<Vec<usize>, PlainFunctor> = BTreeMap::new();
        for (pt, pf) in &p.fibers {
            let qf = &q.fibers[pt];
            let pr = &prods[pt];
            let ff = &ffs[pt];
            let fc = &f.comps[pt];
            let obj_map: Vec<usize> = (0..pf.n_objects())
                .map(|x| {
                    let cur = PlainFunctor {
                        obj_map: (0..qf.n_objects())
                            .map(|y| fc.obj_map[pr.obj(x, y)])
                            .collect(),
                        mor_map: (0..qf.n_mors())
                            .map(|v| fc.mor_map[pr.mor(pf.identity(x), v)])
                            .collect(),
                    };
                    ff.functor_index(&cur).ok_or_else(|| {
                        ModelError::Shape("curried functor missing from fiber".into())
                    })
                })
                .collect::<Result<_, _>>()?;
            let mor_map: Vec<usize> = (0..pf.n_mors())
                .map(|u| {
                    let nat: Vec<usize> = (0..qf.n_objects())
                        .map(|y| fc.mor_map[pr.mor(u, qf.identity(y))])
                        .collect();
                    ff.nat_index(obj_map[pf.src(u)], obj_map[pf.tgt(u)], &nat)
                        .ok_or_else(|| {
                            ModelError::Shape(
                                "curried natural isomorphism missing from fiber".into(),
                            )
                        })
                })
                .collect::<Result<_, _>>()?;
            comps.insert(pt.clone(), PlainFunctor { obj_map, mor_map });
        }
        let mut cells = BTreeMap::new();
        for (mt, t) in &p.transports {
            let tq_inv = &q.transports[&mt_inverse(&slots, mt)].fun;
            let ff_tgt = &ffs[&t.tgt];
            let pr_src = &prods[&t.src];
            let ct = &cod.transports[mt];
            let cell: Vec<usize> = (0..p.fibers[&t.src].n_objects())
                .map(|x| {
                    let from = ct.fun.obj_map[comps[&t.src].obj_map[x]];
                    let to = comps[&t.tgt].obj_map[t.fun.obj_map[x]];
                    let nat: Vec<usize> = (0..q.fibers[&t.tgt].n_objects())
                        .map(|y2| f.cells[mt][pr_src.obj(x, tq_inv.obj_map[y2])])
                        .collect();
                    ff_tgt.nat_index(from, to, &nat).ok_or_else(|| {
                        ModelError::Shape("curry coherence cell missing from fiber".into())
                    })
                })
                .collect::<Result<_, _>>()?;
            cells.insert(mt.clone(), cell);
        }
        Ok(GrpdMor {
            dom: p.clone(),
            cod,
            comps,
            cells,
        })
    }

    fn forall_counit(&self, p: &GPred) -> Result<GrpdMor, ModelError> {
        let all = self.forall_last(p)?;
        let (short, secs) = self.section_fibers(p)?;
        let (_, last) = self.split_last(p)?;
        let pi = TermMorphism::pi_last(&p.ctx)?;
        let dom = self.reindex(&pi, &all)?;
        let short_len = short.len();
        let mut comps: BTreeMap<Vec<usize>, PlainFunctor> = BTreeMap::new();
        for ext_pt in p.fibers.keys() {
            let (pt, b) = (ext_pt[..short_len].to_vec(), ext_pt[short_len]);
            let sf = &secs[&pt];
            let fun = PlainFunctor {
                obj_map: sf.sections.iter().map(|s| s.assign[b]).collect(),
                mor_map: sf.mors.iter().map(|(_, _, c)| c[b]).collect(),
            };
            comps.insert(ext_pt.clone(), fun);
        }
        let mut cells = BTreeMap::new();
        for (mt, t) in &dom.transports {
            let (u, v) = (&mt[..short_len], mt[short_len]);
            let src_pt = t.src[..short_len].to_vec();
            let sf = &secs[&src_pt];
            let tb = self.prefix_transport(p, u, last, last.tgt(v))?;
            let cell: Vec<usize> = sf.sections.iter().map(|s| tb.mor_map[s.coh[v]]).collect();
            cells.insert(mt.clone(), cell);
        }
        Ok(GrpdMor {
            dom,
            cod: p.clone(),
            comps,
            cells,
        })
    }

    fn lambda(&self, f: &GrpdMor, s: &GPred, p: &GPred) -> Result<GrpdMor, ModelError> {
        // f : π*S → P over the extended context becomes S → ∀P.
        let cod = self.forall_last(p)?;
        let (short, secs) = self.section_fibers(p)?;
        let (_, last) = self.split_last(p)?;
        let short_slots = self.slots(&short)?;
        let mut comps: BTreeMap<Vec<usize>, PlainFunctor> = BTreeMap::new();
        for (pt, sfib) in &s.fibers {
            let sf = &secs[pt];
            let idt = ot_id(&short_slots, pt);
            let obj_map: Vec<usize> = (0..sfib.n_objects())
                .map(|w| {
                    let assign: Vec<usize> = (0..last.n_objects())
                        .map(|b| {
                            let mut key = pt.clone();
                            key.push(b);
                            f.comps[&key].obj_map[w]
                        })
                        .collect();
                    let coh: Vec<usize> = (0..last.n_mors())
                        .map(|v| {
                            let mut key = idt.clone();
                            key.push(v);
                            f.cells[&key][w]
                        })
                        .collect();
                    sf.section_index(&Section { assign, coh }).ok_or_else(|| {
                        ModelError::Shape("lambda section missing from fiber".into())
                    })
                })
                .collect::<Result<_, _>>()?;
            let mor_map: Vec<usize> = (0..sfib.n_mors())
                .map(|w| {
                    let comps_vec: Vec<usize> = (0..last.n_objects())
                        .map(|b| {
                            let mut key = pt.clone();
                            key.push(b);
                            f.comps[&key].mor_map[w]
                        })
                        .collect();
                    sf.mor_index(obj_map[sfib.src(w)], obj_map[sfib.tgt(w)], &comps_vec)
                        .ok_or_else(|| {
                            ModelError::Shape(
                                "lambda section morphism missing from fiber".into(),
                            )
                        })
                })
                .collect::<Result<_, _>>()?;
            comps.insert(pt.clone(), PlainFunctor { obj_map, mor_map });
        }
        let mut cells = BTreeMap::new();
        for (u, t) in &s.transports {
            let sf_tgt = &secs[&t.tgt];
            let ct = &cod.transports[u];
            let cell: Vec<usize> = (0..s.fibers[&t.src].n_objects())
                .map(|w| {
                    let from = ct.fun.obj_map[comps[&t.src].obj_map[w]];
                    let to = comps[&t.tgt].obj_map[t.fun.obj_map[w]];
                    let comps_vec: Vec<usize> = (0..last.n_objects())
                        .map(|b| {
                            let mut key = u.clone();
                            key.push(last.identity(b));
                            f.cells[&key][w]
                        })
                        .collect();
                    sf_tgt.mor_index(from, to, &comps_vec).ok_or_else(|| {
                        ModelError::Shape("lambda coherence cell missing from fiber".into())
                    })
                })
                .collect::<Result<_, _>>()?;
            cells.insert(u.clone(), cell);
        }
        Ok(GrpdMor {
            dom: s.clone(),
            cod,
            comps,
            cells,
        })
    }

    fn exists_unit(&self, p: &GPred) -> Result<GrpdMor, ModelError> {
        let ex = self.exists_last(p)?;
        let (short, groths) = self.groth_fibers(p)?;
        let (_, last) = self.split_last(p)?;
        let pi = TermMorphism::pi_last(&p.ctx)?;
        let cod = self.reindex(&pi, &ex)?;
        let short_len = short.len();
        let mut comps: BTreeMap<Vec<usize>, PlainFunctor> = BTreeMap::new();
        for (ext_pt, fib) in &p.fibers {
            let (pt, b) = (ext_pt[..short_len].to_vec(), ext_pt[short_len]);
            let gf = &groths[&pt];
            let obj_map: Vec<usize> = (0..fib.n_objects())
                .map(|x| {
                    gf.obj_index(b, x).ok_or_else(|| {
                        ModelError::Shape("unit image object missing".into())
                    })
                })
                .collect::<Result<_, _>>()?;
            let mor_map: Vec<usize> = (0..fib.n_mors())
                .map(|xi| {
                    gf.mor_index(last.identity(b), obj_map[fib.src(xi)], xi)
                        .ok_or_else(|| {
                            ModelError::Shape("unit image morphism missing".into())
                        })
                })
                .collect::<Result<_, _>>()?;
            comps.insert(ext_pt.clone(), PlainFunctor { obj_map, mor_map });
        }
        let mut cells = BTreeMap::new();
        for (mt, t) in &p.transports {
            let (u, v) = (&mt[..short_len], mt[short_len]);
            let tgt_pt = t.tgt[..short_len].to_vec();
            let gf_tgt = &groths[&tgt_pt];
            let (b, b2) = (last.src(v), last.tgt(v));
            let tb = self.prefix_transport(p, u, last, b)?;
            let full = &t.fun;
            let src_fib = &p.fibers[&t.src];
            let tgt_fib = &p.fibers[&t.tgt];
            let cell: Vec<usize> = (0..src_fib.n_objects())
                .map(|x| {
                    let z = gf_tgt.obj_index(b, tb.obj_map[x]).ok_or_else(|| {
                        ModelError::Shape("unit cell source missing".into())
                    })?;
                    let _ = b2;
                    gf_tgt
                        .mor_index(v, z, tgt_fib.identity(full.obj_map[x]))
                        .ok_or_else(|| {
                            ModelError::Shape("unit coherence cell missing".into())
                        })
                })
                .collect::<Result<_, _>>()?;
            cells.insert(mt.clone(), cell);
        }
        Ok(GrpdMor {
            dom: p.clone(),
            cod,
            comps,
            cells,
        })
    }

    fn mu(&self, f: &GrpdMor, p: &GPred, s: &GPred) -> Result<GrpdMor, ModelError> {
        // f : P → π*S over the extended context becomes ∃P → S.
        let dom = self.exists_last(p)?;
        let (short, groths) = self.groth_fibers(p)?;
        let (_, last) = self.split_last(p)?;
        let short_slots = self.slots(&short)?;
        let mut comps: BTreeMap<Vec<usize>, PlainFunctor> = BTreeMap::new();
        for (pt, gf) in &groths {
            let sfib = &s.fibers[pt];
            let idt = ot_id(&short_slots, pt);
            let obj_map: Vec<usize> = gf
                .objs
                .iter()
                .map(|&(b, x)| {
                    let mut key = pt.clone();
                    key.push(b);
                    f.comps[&key].obj_map[x]
                })
                .collect();
            let mor_map: Vec<usize> = gf
                .mors
                .iter()
                .map(|&(g, sg, phi)| {
                    let (_, x) = gf.objs[sg];
                    let b2 = last.tgt(g);
                    let mut key2 = pt.clone();
                    key2.push(b2);
                    let mut gkey = idt.clone();
                    gkey.push(g);
                    sfib.compose(f.comps[&key2].mor_map[phi], f.cells[&gkey][x])
                })
                .collect();
            comps.insert(pt.clone(), PlainFunctor { obj_map, mor_map });
        }
        let mut cells = BTreeMap::new();
        for (u, t) in &s.transports {
            let gf_src = &groths[&t.src];
            let cell: Vec<usize> = gf_src
                .objs
                .iter()
                .map(|&(b, x)| {
                    let mut key = u.clone();
                    key.push(last.identity(b));
                    f.cells[&key][x]
                })
                .collect();
            cells.insert(u.clone(), cell);
        }
        Ok(GrpdMor {
            dom,
            cod: s.clone(),
            comps,
            cells,
        })
    }

    fn refl(&self, sort: &str) -> Result<GrpdMor, ModelError> {
        let car = self.carrier(sort)?;
        let ctx = CtxObject::new(vec![sort.to_string()]);
        let dom = self.top(&ctx)?;
        let eqp = self.eq(sort)?;
        let cod = self.reindex(&TermMorphism::diagonal(sort), &eqp)?;
        let comps: BTreeMap<Vec<usize>, PlainFunctor> = (0..car.n_objects())
            .map(|b| {
                let hl = car.hom(b, b);
                let pos = hl.iter().position(|&m| m == car.identity(b)).unwrap();
                (
                    vec![b],
                    PlainFunctor {
                        obj_map: vec![pos],
                        mor_map: vec![pos],
                    },
                )
            })
            .collect();
        let cells = strict_cells(&dom, &cod, &comps);
        Ok(GrpdMor {
            dom,
            cod,
            comps,
            cells,
        })
    }

    fn xi(&self, f: &GrpdMor, target: &GPred) -> Result<GrpdMor, ModelError> {
        // f : ⊤ → Δ*T over (B) becomes Eq → T over (B, B).
        if f.dom.ctx.len() != 1 {
            return Err(ModelError::Shape(
                "equality elimination premise must live over a one-slot context".into(),
            ));
        }
        let sort = f.dom.ctx.sorts()[0].clone();
        let car = self.carrier(&sort)?;
        let dom = self.eq(&sort)?;
        let mut comps: BTreeMap<Vec<usize>, PlainFunctor> = BTreeMap::new();
        for a in 0..car.n_objects() {
            for b in 0..car.n_objects() {
                let hl = car.hom(a, b);
                let tfib = &target.fibers[&vec![a, b]];
                let based = f.comps[&vec![a]].obj_map[0];
                let obj_map: Vec<usize> = hl
                    .iter()
                    .map(|&p| {
                        target.transports[&vec![car.identity(a), p]].fun.obj_map[based]
                    })
                    .collect();
                let mor_map: Vec<usize> =
                    obj_map.iter().map(|&o| tfib.identity(o)).collect();
                comps.insert(vec![a, b], PlainFunctor { obj_map, mor_map });
            }
        }
        let mut cells = BTreeMap::new();
        for (mt, t) in &dom.transports {
            let (g, g2) = (mt[0], mt[1]);
            let (a, b) = (t.src[0], t.src[1]);
            let c = car.tgt(g);
            let hl = car.hom(a, b);
            let cell: Vec<usize> = hl
                .iter()
                .map(|&p| {
                    let moved = car.compose(g2, car.compose(p, car.inverse(g)));
                    let fcell = f.cells[&vec![g]][0];
                    target.transports[&vec![car.identity(c), moved]].fun.mor_map[fcell]
                })
                .collect();
            cells.insert(mt.clone(), cell);
        }
        Ok(GrpdMor {
            dom,
            cod: target.clone(),
            comps,
            cells,
        })
    }

    fn inhabited(&self, p: &GPred, point: &[usize]) -> Result<bool, ModelError> {
        Ok(!p.fiber(point)?.is_empty())
    }

    fn pred_equiv(&self, p: &GPred, q: &GPred) -> Result<bool, ModelError> {
        self.same_ctx(p, q)?;
        for (pt, pf) in &p.fibers {
            if groupoid_equivalent(pf, &q.fibers[pt]).is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The hom-set family of a carrier over the two-slot context of a sort,
/// with transport by conjugation. Convenience wrapper used by tests and
/// diagnostics.
pub fn path_predicate(
    sig: &Signature,
    st: &GroupoidStructure,
    sort: &str,
) -> Result<GPred, ModelError> {
    GroupoidModel::new(sig, st).eq(sort)
}

/// Fiberwise functor groupoid of two families. Convenience wrapper.
pub fn fiber_exponential(
    sig: &Signature,
    st: &GroupoidStructure,
    p: &GPred,
    q: &GPred,
    max_fiber: usize,
) -> Result<GPred, ModelError> {
    GroupoidModel::new(sig, st).with_max_fiber(max_fiber).implies(p, q)
}

/// Total-groupoid quantification along the last slot. Convenience wrapper.
pub fn grothendieck_exists(
    sig: &Signature,
    st: &GroupoidStructure,
    p: &GPred,
) -> Result<GPred, ModelError> {
    GroupoidModel::new(sig, st).exists_last(p)
}

/// Coherent-section quantification along the last slot. Convenience
/// wrapper.
pub fn sections_forall(
    sig: &Signature,
    st: &GroupoidStructure,
    p: &GPred,
    max_fiber: usize,
) -> Result<GPred, ModelError> {
    GroupoidModel::new(sig, st).with_max_fiber(max_fiber).forall_last(p)
}
