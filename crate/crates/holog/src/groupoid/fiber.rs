//! Canonical fiberwise constructions on finite groupoids: binary products
//! and coproducts, functor groupoids, the Grothendieck total groupoid of a
//! family over a carrier, and the groupoid of coherent sections of such a
//! family. Each construction is deterministic — identical inputs yield
//! identical tables — which is what makes reindexing strictly split at the
//! family level.

use std::collections::BTreeMap;

use crate::model::ModelError;

use super::carrier::{all_functors, natural_isos, FinGroupoid, PlainFunctor};

/// Product of two fibers, with row-major encoding of objects and morphisms.
#[derive(Debug, Clone)]
pub struct ProductFiber {
    pub gpd: FinGroupoid,
    nq_obj: usize,
    nq_mor: usize,
}

impl ProductFiber {
    pub fn build(p: &FinGroupoid, q: &FinGroupoid) -> Self {
        ProductFiber {
            gpd: FinGroupoid::product(p, q),
            nq_obj: q.n_objects(),
            nq_mor: q.n_mors(),
        }
    }

    pub fn obj(&self, i: usize, j: usize) -> usize {
        i * self.nq_obj + j
    }

    pub fn obj_parts(&self, o: usize) -> (usize, usize) {
        (o / self.nq_obj, o % self.nq_obj)
    }

    pub fn mor(&self, u: usize, v: usize) -> usize {
        u * self.nq_mor + v
    }

    pub fn mor_parts(&self, m: usize) -> (usize, usize) {
        (m / self.nq_mor, m % self.nq_mor)
    }
}

/// Which summand a coproduct object or morphism came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Left(usize),
    Right(usize),
}

/// Disjoint union of two fibers; left part first.
#[derive(Debug, Clone)]
pub struct CoproductFiber {
    pub gpd: FinGroupoid,
    p_obj: usize,
    p_mor: usize,
}

impl CoproductFiber {
    pub fn build(p: &FinGroupoid, q: &FinGroupoid) -> Self {
        CoproductFiber {
            gpd: FinGroupoid::disjoint_union(p, q),
            p_obj: p.n_objects(),
            p_mor: p.n_mors(),
        }
    }

    pub fn left_obj(&self, i: usize) -> usize {
        i
    }

    pub fn right_obj(&self, j: usize) -> usize {
        self.p_obj + j
    }

    pub fn decode_obj(&self, o: usize) -> Tag {
        if o < self.p_obj {
            Tag::Left(o)
        } else {
            Tag::Right(o - self.p_obj)
        }
    }

    pub fn left_mor(&self, u: usize) -> usize {
        u
    }

    pub fn right_mor(&self, v: usize) -> usize {
        self.p_mor + v
    }

    pub fn decode_mor(&self, m: usize) -> Tag {
        if m < self.p_mor {
            Tag::Left(m)
        } else {
            Tag::Right(m - self.p_mor)
        }
    }
}

/// The groupoid of functors `p → q` with natural isomorphisms as morphisms.
#[derive(Debug, Clone)]
pub struct FunctorFiber {
    pub gpd: FinGroupoid,
    pub functors: Vec<PlainFunctor>,
    /// `(source functor, target functor, components per p-object)`.
    pub nats: Vec<(usize, usize, Vec<usize>)>,
    fun_index: BTreeMap<PlainFunctor, usize>,
    nat_index: BTreeMap<(usize, usize, Vec<usize>), usize>,
}

impl FunctorFiber {
    pub fn build(
        p: &FinGroupoid,
        q: &FinGroupoid,
        max: usize,
    ) -> Result<Self, ModelError> {
        let functors = all_functors(p, q, max)?;
        let mut nats = Vec::new();
        let mut mors = Vec::new();
        for (i, f) in functors.iter().enumerate() {
            for (j, g) in functors.iter().enumerate() {
                for comps in natural_isos(p, q, f, g) {
                    mors.push((i, j));
                    nats.push((i, j, comps));
                    if nats.len() > max {
                        return Err(ModelError::Overflow {
                            what: "natural isomorphism enumeration".into(),
                            size: nats.len(),
                            bound: max,
                        });
                    }
                }
            }
        }
        let nat_index: BTreeMap<(usize, usize, Vec<usize>), usize> = nats
            .iter()
            .enumerate()
            .map(|(k, n)| (n.clone(), k))
            .collect();
        let mut compose = BTreeMap::new();
        for (k2, (i2, _, c2)) in nats.iter().enumerate() {
            for (k1, (i1, j1, c1)) in nats.iter().enumerate() {
                if j1 == i2 {
                    let comps: Vec<usize> = c1
                        .iter()
                        .zip(c2)
                        .map(|(&a, &b)| q.compose(b, a))
                        .collect();
                    compose.insert((k2, k1), nat_index[&(*i1, nats[k2].1, comps)]);
                }
            }
        }
        let identities = functors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let comps: Vec<usize> =
                    f.obj_map.iter().map(|&o| q.identity(o)).collect();
                nat_index[&(i, i, comps)]
            })
            .collect();
        let inverses = nats
            .iter()
            .map(|(i, j, c)| {
                let comps: Vec<usize> = c.iter().map(|&m| q.inverse(m)).collect();
                nat_index[&(*j, *i, comps)]
            })
            .collect();
        let gpd =
            FinGroupoid::from_parts(functors.len(), mors, compose, identities, inverses)?;
        let fun_index = functors
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i))
            .collect();
        Ok(FunctorFiber {
            gpd,
            functors,
            nats,
            fun_index,
            nat_index,
        })
    }

    pub fn functor_index(&self, f: &PlainFunctor) -> Option<usize> {
        self.fun_index.get(f).copied()
    }

    pub fn nat_index(&self, from: usize, to: usize, comps: &[usize]) -> Option<usize> {
        self.nat_index
            .get(&(from, to, comps.to_vec()))
            .copied()
    }
}

/// The total groupoid of a family over a carrier: objects are pairs of a
/// carrier object and a fiber object; morphisms pair a carrier morphism `g`
/// with a fiber morphism out of the transported source.
#[derive(Debug, Clone)]
pub struct GrothFiber {
    pub gpd: FinGroupoid,
    /// Global object index → (carrier object, fiber object).
    pub objs: Vec<(usize, usize)>,
    /// Global morphism index → (carrier morphism g, global source object,
    /// fiber morphism transport(g)(x) → x′ in the fiber at tgt(g)).
    pub mors: Vec<(usize, usize, usize)>,
    obj_index: BTreeMap<(usize, usize), usize>,
    mor_index: BTreeMap<(usize, usize, usize), usize>,
}

impl GrothFiber {
    pub fn build<'a>(
        last: &FinGroupoid,
        fiber_at: impl Fn(usize) -> &'a FinGroupoid,
        transport: impl Fn(usize) -> &'a PlainFunctor,
        max: usize,
    ) -> Result<Self, ModelError> {
        let mut objs = Vec::new();
        let mut obj_index = BTreeMap::new();
        for b in 0..last.n_objects() {
            for x in 0..fiber_at(b).n_objects() {
                obj_index.insert((b, x), objs.len());
                objs.push((b, x));
            }
        }
        if objs.len() > max {
            return Err(ModelError::Overflow {
                what: "total groupoid objects".into(),
                size: objs.len(),
                bound: max,
            });
        }
        let mut mors = Vec::new();
        let mut mor_pairs = Vec::new();
        let mut mor_index = BTreeMap::new();
        for g in 0..last.n_mors() {
            let (b, b2) = (last.src(g), last.tgt(g));
            let t = transport(g);
            let fb2 = fiber_at(b2);
            for x in 0..fiber_at(b).n_objects() {
                let src = obj_index[&(b, x)];
                let tx = t.obj_map[x];
                for phi in 0..fb2.n_mors() {
                    if fb2.src(phi) == tx {
                        let tgt = obj_index[&(b2, fb2.tgt(phi))];
                        mor_index.insert((g, src, phi), mors.len());
                        mors.push((g, src, phi));
                        mor_pairs.push((src, tgt));
                        if mors.len() > max {
                            return Err(ModelError::Overflow {
                                what: "total groupoid morphisms".into(),
                                size: mors.len(),
                                bound: max,
                            });
                        }
                    }
                }
            }
        }
        let mut compose = BTreeMap::new();
        for (k2, &(g2, _, phi2)) in mors.iter().enumerate() {
            for (k1, &(g1, s1, phi1)) in mors.iter().enumerate() {
                if mor_pairs[k1].1 == mor_pairs[k2].0 {
                    let g = last.compose(g2, g1);
                    let fb = fiber_at(last.tgt(g2));
                    let phi = fb.compose(phi2, transport(g2).mor_map[phi1]);
                    compose.insert((k2, k1), mor_index[&(g, s1, phi)]);
                }
            }
        }
        let identities = objs
            .iter()
            .map(|&(b, x)| mor_index[&(last.identity(b), obj_index[&(b, x)], fiber_at(b).identity(x))])
            .collect();
        let inverses = mors
            .iter()
            .enumerate()
            .map(|(k, &(g, _, phi))| {
                let ginv = last.inverse(g);
                let fb2 = fiber_at(last.tgt(g));
                let psi = transport(ginv).mor_map[fb2.inverse(phi)];
                mor_index[&(ginv, mor_pairs[k].1, psi)]
            })
            .collect();
        let gpd =
            FinGroupoid::from_parts(objs.len(), mor_pairs, compose, identities, inverses)?;
        Ok(GrothFiber {
            gpd,
            objs,
            mors,
            obj_index,
            mor_index,
        })
    }

    pub fn obj_index(&self, b: usize, x: usize) -> Option<usize> {
        self.obj_index.get(&(b, x)).copied()
    }

    pub fn mor_index(&self, g: usize, src: usize, phi: usize) -> Option<usize> {
        self.mor_index.get(&(g, src, phi)).copied()
    }
}

/// A coherent section of a family over a carrier: a fiber object per carrier
/// object, plus a chosen connecting morphism per carrier morphism,
/// respecting identities and composition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Section {
    pub assign: Vec<usize>,
    pub coh: Vec<usize>,
}

/// The groupoid of coherent sections; morphisms are object-indexed families
/// of fiber morphisms compatible with the coherences.
#[derive(Debug, Clone)]
pub struct SectionsFiber {
    pub gpd: FinGroupoid,
    pub sections: Vec<Section>,
    /// `(source section, target section, components per carrier object)`.
    pub mors: Vec<(usize, usize, Vec<usize>)>,
    sec_index: BTreeMap<Section, usize>,
    mor_index: BTreeMap<(usize, usize, Vec<usize>), usize>,
}

impl SectionsFiber {
    pub fn build<'a>(
        last: &FinGroupoid,
        fiber_at: impl Fn(usize) -> &'a FinGroupoid + Copy,
        transport: impl Fn(usize) -> &'a PlainFunctor + Copy,
        max: usize,
    ) -> Result<Self, ModelError> {
        let mut space: usize = 1;
        for b in 0..last.n_objects() {
            space = space.saturating_mul(fiber_at(b).n_objects());
        }
        if space > max {
            return Err(ModelError::Overflow {
                what: "section enumeration".into(),
                size: space,
                bound: max,
            });
        }
        let mut sections = Vec::new();
        if space > 0 {
            let mut assign = vec![0usize; last.n_objects()];
            loop {
                complete_coherences(last, fiber_at, transport, &assign, &mut sections);
                if sections.len() > max {
                    return Err(ModelError::Overflow {
                        what: "section enumeration".into(),
                        size: sections.len(),
                        bound: max,
                    });
                }
                let mut i = last.n_objects();
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    assign[i] += 1;
                    if assign[i] < fiber_at(i).n_objects() {
                        break;
                    }
                    assign[i] = 0;
                }
                if assign.iter().all(|&a| a == 0) {
                    break;
                }
            }
        }
        let sec_index: BTreeMap<Section, usize> = sections
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();

        let mut mors = Vec::new();
        let mut mor_pairs = Vec::new();
        for (i, s) in sections.iter().enumerate() {
            for (j, s2) in sections.iter().enumerate() {
                for comps in
                    section_morphisms(last, fiber_at, transport, s, s2)
                {
                    mor_pairs.push((i, j));
                    mors.push((i, j, comps));
                    if mors.len() > max {
                        return Err(ModelError::Overflow {
                            what: "section morphism enumeration".into(),
                            size: mors.len(),
                            bound: max,
                        });
                    }
                }
            }
        }
        let mor_index: BTreeMap<(usize, usize, Vec<usize>), usize> = mors
            .iter()
            .enumerate()
            .map(|(k, m)| (m.clone(), k))
            .collect();
        let mut compose = BTreeMap::new();
        for (k2, (i2, j2, c2)) in mors.iter().enumerate() {
            for (k1, (i1, j1, c1)) in mors.iter().enumerate() {
                if j1 == i2 {
                    let comps: Vec<usize> = (0..last.n_objects())
                        .map(|b| fiber_at(b).compose(c2[b], c1[b]))
                        .collect();
                    compose.insert((k2, k1), mor_index[&(*i1, *j2, comps)]);
                }
            }
        }
        let identities = sections
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let comps: Vec<usize> = s
                    .assign
                    .iter()
                    .enumerate()
                    .map(|(b, &x)| fiber_at(b).identity(x))
                    .collect();
                mor_index[&(i, i, comps)]
            })
            .collect();
        let inverses = mors
            .iter()
            .map(|(i, j, c)| {
                let comps: Vec<usize> = c
                    .iter()
                    .enumerate()
                    .map(|(b, &m)| fiber_at(b).inverse(m))
                    .collect();
                mor_index[&(*j, *i, comps)]
            })
            .collect();
        let gpd =
            FinGroupoid::from_parts(sections.len(), mor_pairs, compose, identities, inverses)?;
        Ok(SectionsFiber {
            gpd,
            sections,
            mors,
            sec_index,
            mor_index,
        })
    }

    pub fn section_index(&self, s: &Section) -> Option<usize> {
        self.sec_index.get(s).copied()
    }

    pub fn mor_index(&self, from: usize, to: usize, comps: &[usize]) -> Option<usize> {
        self.mor_index.get(&(from, to, comps.to_vec())).copied()
    }
}

/// All coherence completions of an object assignment, appended to `out`.
fn complete_coherences<'a>(
    last: &FinGroupoid,
    fiber_at: impl Fn(usize) -> &'a FinGroupoid + Copy,
    transport: impl Fn(usize) -> &'a PlainFunctor + Copy,
    assign: &[usize],
    out: &mut Vec<Section>,
) {
    fn rec<'a>(
        last: &FinGroupoid,
        fiber_at: impl Fn(usize) -> &'a FinGroupoid + Copy,
        transport: impl Fn(usize) -> &'a PlainFunctor + Copy,
        assign: &[usize],
        coh: &mut Vec<usize>,
        out: &mut Vec<Section>,
    ) {
        let v = coh.len();
        if v == last.n_mors() {
            // Full unit/composition coherence sweep.
            for g in 0..last.n_mors() {
                for f in 0..last.n_mors() {
                    if last.tgt(f) == last.src(g) {
                        let c = last.compose(g, f);
                        let fb = fiber_at(last.tgt(g));
                        if coh[c] != fb.compose(coh[g], transport(g).mor_map[coh[f]]) {
                            return;
                        }
                    }
                }
            }
            out.push(Section {
                assign: assign.to_vec(),
                coh: coh.clone(),
            });
            return;
        }
        let (b, b2) = (last.src(v), last.tgt(v));
        let candidates = if last.is_identity(v) {
            vec![fiber_at(b).identity(assign[b])]
        } else {
            fiber_at(b2).hom(transport(v).obj_map[assign[b]], assign[b2])
        };
        'next: for c in candidates {
            coh.push(c);
            // Early pruning where the composite index is already assigned.
            let k = coh.len() - 1;
            for f in 0..k {
                if last.tgt(f) == last.src(k) {
                    let comp = last.compose(k, f);
                    if comp < coh.len() {
                        let fb = fiber_at(last.tgt(k));
                        if coh[comp] != fb.compose(c, transport(k).mor_map[coh[f]]) {
                            coh.pop();
                            continue 'next;
                        }
                    }
                }
                if last.tgt(k) == last.src(f) {
                    let comp = last.compose(f, k);
                    if comp < coh.len() {
                        let fb = fiber_at(last.tgt(f));
                        if coh[comp] != fb.compose(coh[f], transport(f).mor_map[c]) {
                            coh.pop();
                            continue 'next;
                        }
                    }
                }
            }
            rec(last, fiber_at, transport, assign, coh, out);
            coh.pop();
        }
    }
    rec(last, fiber_at, transport, assign, &mut Vec::new(), out);
}

/// All families `s → s2` compatible with both coherences.
fn section_morphisms<'a>(
    last: &FinGroupoid,
    fiber_at: impl Fn(usize) -> &'a FinGroupoid + Copy,
    transport: impl Fn(usize) -> &'a PlainFunctor + Copy,
    s: &Section,
    s2: &Section,
) -> Vec<Vec<usize>> {
    fn rec<'a>(
        last: &FinGroupoid,
        fiber_at: impl Fn(usize) -> &'a FinGroupoid + Copy,
        transport: impl Fn(usize) -> &'a PlainFunctor + Copy,
        s: &Section,
        s2: &Section,
        comps: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let b = comps.len();
        if b == last.n_objects() {
            out.push(comps.clone());
            return;
        }
        'next: for c in fiber_at(b).hom(s.assign[b], s2.assign[b]) {
            for v in 0..last.n_mors() {
                let (sb, tb) = (last.src(v), last.tgt(v));
                if sb.max(tb) == b {
                    let ms = if sb == b { c } else { comps[sb] };
                    let mt = if tb == b { c } else { comps[tb] };
                    let fb = fiber_at(tb);
                    if fb.compose(s2.coh[v], transport(v).mor_map[ms])
                        != fb.compose(mt, s.coh[v])
                    {
                        continue 'next;
                    }
                }
            }
            comps.push(c);
            rec(last, fiber_at, transport, s, s2, comps, out);
            comps.pop();
        }
    }
    let mut out = Vec::new();
    rec(last, fiber_at, transport, s, s2, &mut Vec::new(), &mut out);
    out
}
