//! Finite groupoids as explicit tables: globally indexed morphisms with a
//! composition table, identities, and inverses, all validated exhaustively on
//! construction. Also functors between them, brute-force natural-isomorphism
//! search, and equivalence checking via iso-class and automorphism-group
//! matching.

use std::collections::BTreeMap;

use crate::model::ModelError;

/// A finite groupoid. Objects are `0..n_objects`; morphisms are global
/// indices into `mors`, which records source and target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinGroupoid {
    n_objects: usize,
    mors: Vec<(usize, usize)>,
    /// `(g, f) ↦ g∘f`, defined exactly when `tgt(f) = src(g)`.
    compose: BTreeMap<(usize, usize), usize>,
    identities: Vec<usize>,
    inverses: Vec<usize>,
}

impl FinGroupoid {
    /// Builds and exhaustively validates a groupoid from a composition
    /// table, deriving identities and inverses.
    pub fn new(
        n_objects: usize,
        mors: Vec<(usize, usize)>,
        compose: BTreeMap<(usize, usize), usize>,
    ) -> Result<Self, ModelError> {
        let mut g = FinGroupoid {
            n_objects,
            mors,
            compose,
            identities: Vec::new(),
            inverses: Vec::new(),
        };
        g.check_shape()?;
        g.derive_identities()?;
        g.derive_inverses()?;
        g.check_associativity()?;
        Ok(g)
    }

    /// Internal constructor for groupoids assembled from already-validated
    /// parts; cheap shape and unit/inverse checks always run, and the
    /// associativity sweep runs when the table is small enough to afford it.
    pub(crate) fn from_parts(
        n_objects: usize,
        mors: Vec<(usize, usize)>,
        compose: BTreeMap<(usize, usize), usize>,
        identities: Vec<usize>,
        inverses: Vec<usize>,
    ) -> Result<Self, ModelError> {
        let g = FinGroupoid {
            n_objects,
            mors,
            compose,
            identities,
            inverses,
        };
        g.check_shape()?;
        g.check_units_and_inverses()?;
        if g.compose.len() <= 20_000 {
            g.check_associativity()?;
        }
        Ok(g)
    }

    fn check_shape(&self) -> Result<(), ModelError> {
        let m = self.mors.len();
        for &(s, t) in &self.mors {
            if s >= self.n_objects || t >= self.n_objects {
                return Err(ModelError::Shape(
                    "morphism endpoint out of range".into(),
                ));
            }
        }
        for (&(g, f), &c) in &self.compose {
            if g >= m || f >= m || c >= m {
                return Err(ModelError::Shape(
                    "composition table index out of range".into(),
                ));
            }
            if self.mors[f].1 != self.mors[g].0 {
                return Err(ModelError::Shape(
                    "composition table entry for non-composable pair".into(),
                ));
            }
            if self.mors[c] != (self.mors[f].0, self.mors[g].1) {
                return Err(ModelError::Shape(
                    "composite has wrong endpoints".into(),
                ));
            }
        }
        for g in 0..m {
            for f in 0..m {
                if self.mors[f].1 == self.mors[g].0
                    && !self.compose.contains_key(&(g, f))
                {
                    return Err(ModelError::Shape(format!(
                        "composition table missing entry for ({g}, {f})"
                    )));
                }
            }
        }
        Ok(())
    }

    fn derive_identities(&mut self) -> Result<(), ModelError> {
        let mut ids = Vec::with_capacity(self.n_objects);
        for a in 0..self.n_objects {
            let found = (0..self.mors.len()).find(|&e| {
                self.mors[e] == (a, a)
                    && (0..self.mors.len()).all(|f| {
                        (self.mors[f].1 != a || self.compose[&(e, f)] == f)
                            && (self.mors[f].0 != a || self.compose[&(f, e)] == f)
                    })
            });
            ids.push(found.ok_or_else(|| {
                ModelError::Shape(format!("no identity at object {a}"))
            })?);
        }
        self.identities = ids;
        Ok(())
    }

    fn derive_inverses(&mut self) -> Result<(), ModelError> {
        let mut invs = Vec::with_capacity(self.mors.len());
        for f in 0..self.mors.len() {
            let (s, t) = self.mors[f];
            let found = (0..self.mors.len()).find(|&g| {
                self.mors[g] == (t, s)
                    && self.compose[&(g, f)] == self.identities[s]
                    && self.compose[&(f, g)] == self.identities[t]
            });
            invs.push(found.ok_or_else(|| {
                ModelError::Shape(format!("morphism {f} has no inverse"))
            })?);
        }
        self.inverses = invs;
        Ok(())
    }

    fn check_units_and_inverses(&self) -> Result<(), ModelError> {
        if self.identities.len() != self.n_objects
            || self.inverses.len() != self.mors.len()
        {
            return Err(ModelError::Shape(
                "identity or inverse table has wrong length".into(),
            ));
        }
        for a in 0..self.n_objects {
            let e = self.identities[a];
            if self.mors[e] != (a, a) {
                return Err(ModelError::Shape(format!("bad identity at {a}")));
            }
        }
        for f in 0..self.mors.len() {
            let (s, t) = self.mors[f];
            if self.compose[&(self.identities[t], f)] != f
                || self.compose[&(f, self.identities[s])] != f
            {
                return Err(ModelError::Shape(format!("unit law fails at {f}")));
            }
            let g = self.inverses[f];
            if self.mors[g] != (t, s)
                || self.compose[&(g, f)] != self.identities[s]
                || self.compose[&(f, g)] != self.identities[t]
            {
                return Err(ModelError::Shape(format!(
                    "inverse law fails at {f}"
                )));
            }
        }
        Ok(())
    }

    fn check_associativity(&self) -> Result<(), ModelError> {
        for (&(g, f), &gf) in &self.compose {
            for h in 0..self.mors.len() {
                if self.mors[g].1 == self.mors[h].0 {
                    let hg = self.compose[&(h, g)];
                    if self.compose[&(h, gf)] != self.compose[&(hg, f)] {
                        return Err(ModelError::Shape(format!(
                            "associativity fails on ({h}, {g}, {f})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Runs every construction-time check again; used by tests on derived
    /// groupoids.
    pub fn validate(&self) -> Result<(), ModelError> {
        self.check_shape()?;
        self.check_units_and_inverses()?;
        self.check_associativity()
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_mors(&self) -> usize {
        self.mors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_objects == 0
    }

    pub fn src(&self, m: usize) -> usize {
        self.mors[m].0
    }

    pub fn tgt(&self, m: usize) -> usize {
        self.mors[m].1
    }

    /// `g ∘ f`; panics if the pair is not composable.
    pub fn compose(&self, g: usize, f: usize) -> usize {
        self.compose[&(g, f)]
    }

    pub fn identity(&self, a: usize) -> usize {
        self.identities[a]
    }

    pub fn inverse(&self, m: usize) -> usize {
        self.inverses[m]
    }

    pub fn is_identity(&self, m: usize) -> bool {
        self.identities[self.mors[m].0] == m && self.mors[m].0 == self.mors[m].1
    }

    /// Morphism indices from `a` to `b`, ascending.
    pub fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.mors.len())
            .filter(|&m| self.mors[m] == (a, b))
            .collect()
    }

    /// The discrete groupoid: `n` objects, only identities.
    pub fn discrete(n: usize) -> Self {
        let mors: Vec<(usize, usize)> = (0..n).map(|a| (a, a)).collect();
        let compose = (0..n).map(|a| ((a, a), a)).collect();
        FinGroupoid {
            n_objects: n,
            mors,
            compose,
            identities: (0..n).collect(),
            inverses: (0..n).collect(),
        }
    }

    /// The indiscrete (chaotic) groupoid: exactly one morphism between any
    /// two of the `n` objects.
    pub fn indiscrete(n: usize) -> Self {
        let mut mors = Vec::new();
        let mut index = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                index.insert((a, b), mors.len());
                mors.push((a, b));
            }
        }
        let mut compose = BTreeMap::new();
        for g in 0..mors.len() {
            for f in 0..mors.len() {
                if mors[f].1 == mors[g].0 {
                    compose.insert((g, f), index[&(mors[f].0, mors[g].1)]);
                }
            }
        }
        let identities = (0..n).map(|a| index[&(a, a)]).collect();
        let inverses = mors.iter().map(|&(a, b)| index[&(b, a)]).collect();
        FinGroupoid {
            n_objects: n,
            mors,
            compose,
            identities,
            inverses,
        }
    }

    /// The cyclic group of order `k` as a one-object groupoid; morphism `i`
    /// is the group element `i`.
    pub fn cyclic_group(k: usize) -> Self {
        assert!(k >= 1);
        let mors = vec![(0, 0); k];
        let mut compose = BTreeMap::new();
        for g in 0..k {
            for f in 0..k {
                compose.insert((g, f), (g + f) % k);
            }
        }
        FinGroupoid {
            n_objects: 1,
            mors,
            compose,
            identities: vec![0],
            inverses: (0..k).map(|i| (k - i) % k).collect(),
        }
    }

    /// Product groupoid: objects `a.n * b.n` (row-major), morphisms all
    /// pairs (row-major over morphism indices).
    pub fn product(a: &FinGroupoid, b: &FinGroupoid) -> Self {
        let obj = |x: usize, y: usize| x * b.n_objects + y;
        let mor = |u: usize, v: usize| u * b.mors.len() + v;
        let mut mors = Vec::new();
        for u in 0..a.mors.len() {
            for v in 0..b.mors.len() {
                mors.push((obj(a.src(u), b.src(v)), obj(a.tgt(u), b.tgt(v))));
            }
        }
        let mut compose = BTreeMap::new();
        for (&(g2, f2), &c2) in &a.compose {
            for (&(g1, f1), &c1) in &b.compose {
                compose.insert((mor(g2, g1), mor(f2, f1)), mor(c2, c1));
            }
        }
        let identities = (0..a.n_objects * b.n_objects)
            .map(|o| mor(a.identity(o / b.n_objects), b.identity(o % b.n_objects)))
            .collect();
        let inverses = (0..mors.len())
            .map(|m| mor(a.inverse(m / b.mors.len()), b.inverse(m % b.mors.len())))
            .collect();
        FinGroupoid {
            n_objects: a.n_objects * b.n_objects,
            mors,
            compose,
            identities,
            inverses,
        }
    }

    /// Disjoint union: `a`'s objects and morphisms first, then `b`'s.
    pub fn disjoint_union(a: &FinGroupoid, b: &FinGroupoid) -> Self {
        let mut mors = a.mors.clone();
        mors.extend(
            b.mors
                .iter()
                .map(|&(s, t)| (s + a.n_objects, t + a.n_objects)),
        );
        let ma = a.mors.len();
        let mut compose = a.compose.clone();
        for (&(g, f), &c) in &b.compose {
            compose.insert((g + ma, f + ma), c + ma);
        }
        let mut identities = a.identities.clone();
        identities.extend(b.identities.iter().map(|&e| e + ma));
        let mut inverses = a.inverses.clone();
        inverses.extend(b.inverses.iter().map(|&i| i + ma));
        FinGroupoid {
            n_objects: a.n_objects + b.n_objects,
            mors,
            compose,
            identities,
            inverses,
        }
    }

    /// Connected components (mutually isomorphic objects), each sorted
    /// ascending; components ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n_objects];
        let mut out = Vec::new();
        for start in 0..self.n_objects {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut queue = vec![start];
            while let Some(x) = queue.pop() {
                for m in 0..self.mors.len() {
                    let (s, t) = self.mors[m];
                    for y in [if s == x { Some(t) } else { None }, if t == x {
                        Some(s)
                    } else {
                        None
                    }]
                    .into_iter()
                    .flatten()
                    {
                        if !seen[y] {
                            seen[y] = true;
                            comp.push(y);
                            queue.push(y);
                        }
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// A chosen morphism `rep → x` for every `x` in the component of `rep`.
    fn paths_from(&self, rep: usize) -> BTreeMap<usize, usize> {
        let mut paths = BTreeMap::from([(rep, self.identity(rep))]);
        let mut queue = vec![rep];
        while let Some(x) = queue.pop() {
            for m in 0..self.mors.len() {
                let (s, t) = self.mors[m];
                if s == x && !paths.contains_key(&t) {
                    paths.insert(t, self.compose(m, paths[&x]));
                    queue.push(t);
                } else if t == x && !paths.contains_key(&s) {
                    paths.insert(s, self.compose(self.inverse(m), paths[&x]));
                    queue.push(s);
                }
            }
        }
        paths
    }

    /// Multiplication table of the automorphism group at `rep`: element `i`
    /// is `hom(rep, rep)[i]`, and `table[i][j]` is the index of their
    /// composite.
    fn aut_table(&self, rep: usize) -> Vec<Vec<usize>> {
        let aut = self.hom(rep, rep);
        let pos: BTreeMap<usize, usize> =
            aut.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        aut.iter()
            .map(|&g| aut.iter().map(|&f| pos[&self.compose(g, f)]).collect())
            .collect()
    }
}

/// A functor between finite groupoids, as explicit object and morphism maps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PlainFunctor {
    pub obj_map: Vec<usize>,
    pub mor_map: Vec<usize>,
}

impl PlainFunctor {
    pub fn identity(g: &FinGroupoid) -> Self {
        PlainFunctor {
            obj_map: (0..g.n_objects()).collect(),
            mor_map: (0..g.n_mors()).collect(),
        }
    }

    /// Checks the functor laws against explicit domain and codomain.
    pub fn validate(
        &self,
        dom: &FinGroupoid,
        cod: &FinGroupoid,
    ) -> Result<(), ModelError> {
        if self.obj_map.len() != dom.n_objects() || self.mor_map.len() != dom.n_mors()
        {
            return Err(ModelError::Shape("functor map lengths wrong".into()));
        }
        for &o in &self.obj_map {
            if o >= cod.n_objects() {
                return Err(ModelError::Shape("functor object out of range".into()));
            }
        }
        for m in 0..dom.n_mors() {
            let im = self.mor_map[m];
            if im >= cod.n_mors()
                || cod.src(im) != self.obj_map[dom.src(m)]
                || cod.tgt(im) != self.obj_map[dom.tgt(m)]
            {
                return Err(ModelError::Shape(format!(
                    "functor breaks endpoints at morphism {m}"
                )));
            }
        }
        for a in 0..dom.n_objects() {
            if self.mor_map[dom.identity(a)] != cod.identity(self.obj_map[a]) {
                return Err(ModelError::Shape(format!(
                    "functor breaks identity at object {a}"
                )));
            }
        }
        for g in 0..dom.n_mors() {
            for f in 0..dom.n_mors() {
                if dom.tgt(f) == dom.src(g)
                    && self.mor_map[dom.compose(g, f)]
                        != cod.compose(self.mor_map[g], self.mor_map[f])
                {
                    return Err(ModelError::Shape(format!(
                        "functor breaks composition at ({g}, {f})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &PlainFunctor) -> PlainFunctor {
        PlainFunctor {
            obj_map: self.obj_map.iter().map(|&o| other.obj_map[o]).collect(),
            mor_map: self.mor_map.iter().map(|&m| other.mor_map[m]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.obj_map.iter().enumerate().all(|(i, &o)| i == o)
            && self.mor_map.iter().enumerate().all(|(i, &m)| i == m)
    }
}

/// Every functor `p → q`, in a deterministic order, with `max` bounding both
/// the object-map search space and the number of results.
pub fn all_functors(
    p: &FinGroupoid,
    q: &FinGroupoid,
    max: usize,
) -> Result<Vec<PlainFunctor>, ModelError> {
    if p.n_objects() == 0 {
        return Ok(vec![PlainFunctor {
            obj_map: vec![],
            mor_map: vec![],
        }]);
    }
    if q.n_objects() == 0 {
        return Ok(vec![]);
    }
    let mut space: usize = 1;
    for _ in 0..p.n_objects() {
        space = space.saturating_mul(q.n_objects());
        if space > max {
            return Err(ModelError::Overflow {
                what: "functor enumeration".into(),
                size: space,
                bound: max,
            });
        }
    }
    let mut out = Vec::new();
    let mut obj_map = vec![0usize; p.n_objects()];
    loop {
        extend_functors(p, q, &obj_map, &mut out);
        if out.len() > max {
            return Err(ModelError::Overflow {
                what: "functor enumeration".into(),
                size: out.len(),
                bound: max,
            });
        }
        // Advance the object map odometer.
        let mut i = p.n_objects();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            obj_map[i] += 1;
            if obj_map[i] < q.n_objects() {
                break;
            }
            obj_map[i] = 0;
        }
    }
}

/// All completions of a fixed object map to a functor, appended to `out`.
fn extend_functors(
    p: &FinGroupoid,
    q: &FinGroupoid,
    obj_map: &[usize],
    out: &mut Vec<PlainFunctor>,
) {
    fn rec(
        p: &FinGroupoid,
        q: &FinGroupoid,
        obj_map: &[usize],
        mor_map: &mut Vec<usize>,
        out: &mut Vec<PlainFunctor>,
    ) {
        let k = mor_map.len();
        if k == p.n_mors() {
            // Full composition check; partial checks below only cover pairs
            // whose composite index is already assigned.
            for g in 0..p.n_mors() {
                for f in 0..p.n_mors() {
                    if p.tgt(f) == p.src(g)
                        && mor_map[p.compose(g, f)]
                            != q.compose(mor_map[g], mor_map[f])
                    {
                        return;
                    }
                }
            }
            out.push(PlainFunctor {
                obj_map: obj_map.to_vec(),
                mor_map: mor_map.clone(),
            });
            return;
        }
        let candidates = if p.is_identity(k) {
            vec![q.identity(obj_map[p.src(k)])]
        } else {
            q.hom(obj_map[p.src(k)], obj_map[p.tgt(k)])
        };
        'next: for c in candidates {
            for f in 0..k {
                if p.tgt(f) == p.src(k) {
                    let comp = p.compose(k, f);
                    if comp < k && mor_map[comp] != q.compose(c, mor_map[f]) {
                        continue 'next;
                    }
                }
                if p.tgt(k) == p.src(f) {
                    let comp = p.compose(f, k);
                    if comp < k && mor_map[comp] != q.compose(mor_map[f], c) {
                        continue 'next;
                    }
                }
            }
            mor_map.push(c);
            rec(p, q, obj_map, mor_map, out);
            mor_map.pop();
        }
    }
    rec(p, q, obj_map, &mut Vec::new(), out);
}

/// Every natural isomorphism `f ⇒ g` between functors `p → q`, as component
/// vectors indexed by the objects of `p`; deterministic order.
pub fn natural_isos(
    p: &FinGroupoid,
    q: &FinGroupoid,
    f: &PlainFunctor,
    g: &PlainFunctor,
) -> Vec<Vec<usize>> {
    fn rec(
        p: &FinGroupoid,
        q: &FinGroupoid,
        f: &PlainFunctor,
        g: &PlainFunctor,
        comps: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let i = comps.len();
        if i == p.n_objects() {
            out.push(comps.clone());
            return;
        }
        'next: for c in q.hom(f.obj_map[i], g.obj_map[i]) {
            // Check naturality squares for all morphisms between assigned
            // objects and i (including loops at i).
            for m in 0..p.n_mors() {
                let (s, t) = (p.src(m), p.tgt(m));
                if s.max(t) == i && s.min(t) <= i {
                    let cs = if s == i { c } else { comps[s] };
                    let ct = if t == i { c } else { comps[t] };
                    if q.compose(ct, f.mor_map[m]) != q.compose(g.mor_map[m], cs) {
                        continue 'next;
                    }
                }
            }
            comps.push(c);
            rec(p, q, f, g, comps, out);
            comps.pop();
        }
    }
    let mut out = Vec::new();
    rec(p, q, f, g, &mut Vec::new(), &mut out);
    out
}

/// Functors in both directions witnessing an equivalence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivWitness {
    pub fwd: PlainFunctor,
    pub bwd: PlainFunctor,
}

/// Decides equivalence of finite groupoids: iso classes (connected
/// components) must correspond under a bijection matching automorphism
/// groups up to group isomorphism. Returns witnessing functors when
/// equivalent.
pub fn groupoid_equivalent(g: &FinGroupoid, h: &FinGroupoid) -> Option<EquivWitness> {
    let gc = g.components();
    let hc = h.components();
    if gc.len() != hc.len() {
        return None;
    }
    // Match components by backtracking over group isomorphism of
    // automorphism groups.
    let g_tables: Vec<Vec<Vec<usize>>> = gc.iter().map(|c| g.aut_table(c[0])).collect();
    let h_tables: Vec<Vec<Vec<usize>>> = hc.iter().map(|c| h.aut_table(c[0])).collect();
    let mut used = vec![false; hc.len()];
    let mut matching: Vec<(usize, Vec<usize>)> = Vec::new();
    if !match_components(&g_tables, &h_tables, 0, &mut used, &mut matching) {
        return None;
    }

    // Each functor collapses a component onto the matched representative:
    // objects all go to the representative, and a morphism m: x→y goes to
    // the image of the automorphism p_y⁻¹∘m∘p_x under the group isomorphism.
    let build = |from: &FinGroupoid,
                 to: &FinGroupoid,
                 from_comps: &[Vec<usize>],
                 to_comps: &[Vec<usize>],
                 pairs: &[(usize, usize, Vec<usize>)]| {
        let mut obj_map = vec![0usize; from.n_objects()];
        let mut mor_map = vec![0usize; from.n_mors()];
        for (ci, cj, iso) in pairs {
            let rep_f = from_comps[*ci][0];
            let rep_t = to_comps[*cj][0];
            let aut_f = from.hom(rep_f, rep_f);
            let aut_t = to.hom(rep_t, rep_t);
            let pos_f: BTreeMap<usize, usize> =
                aut_f.iter().enumerate().map(|(i, &m)| (m, i)).collect();
            let paths = from.paths_from(rep_f);
            for &x in &from_comps[*ci] {
                obj_map[x] = rep_t;
            }
            for (m, slot) in mor_map.iter_mut().enumerate() {
                let (s, t) = (from.src(m), from.tgt(m));
                if from_comps[*ci].contains(&s) {
                    let loop_elem = from.compose(
                        from.inverse(paths[&t]),
                        from.compose(m, paths[&s]),
                    );
                    *slot = aut_t[iso[pos_f[&loop_elem]]];
                }
            }
        }
        PlainFunctor { obj_map, mor_map }
    };

    let fwd_pairs: Vec<(usize, usize, Vec<usize>)> = matching
        .iter()
        .enumerate()
        .map(|(i, (j, iso))| (i, *j, iso.clone()))
        .collect();
    let bwd_pairs: Vec<(usize, usize, Vec<usize>)> = matching
        .iter()
        .enumerate()
        .map(|(i, (j, iso))| {
            let mut inv = vec![0usize; iso.len()];
            for (a, &b) in iso.iter().enumerate() {
                inv[b] = a;
            }
            (*j, i, inv)
        })
        .collect();
    let fwd = build(g, h, &gc, &hc, &fwd_pairs);
    let bwd = build(h, g, &hc, &gc, &bwd_pairs);
    Some(EquivWitness { fwd, bwd })
}

fn match_components(
    g_tables: &[Vec<Vec<usize>>],
    h_tables: &[Vec<Vec<usize>>],
    i: usize,
    used: &mut Vec<bool>,
    matching: &mut Vec<(usize, Vec<usize>)>,
) -> bool {
    if i == g_tables.len() {
        return true;
    }
    for j in 0..h_tables.len() {
        if used[j] {
            continue;
        }
        if let Some(iso) = group_isomorphism(&g_tables[i], &h_tables[j]) {
            used[j] = true;
            matching.push((j, iso));
            if match_components(g_tables, h_tables, i + 1, used, matching) {
                return true;
            }
            matching.pop();
            used[j] = false;
        }
    }
    false
}

fn element_orders(table: &[Vec<usize>], id: usize) -> Vec<usize> {
    (0..table.len())
        .map(|x| {
            let mut acc = x;
            let mut n = 1;
            while acc != id {
                acc = table[x][acc];
                n += 1;
            }
            n
        })
        .collect()
}

/// Brute-force group isomorphism between multiplication tables, with
/// element-order pruning. Identity is located as the unique row fixing
/// everything.
pub fn group_isomorphism(a: &[Vec<usize>], b: &[Vec<usize>]) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    if a.is_empty() {
        return Some(vec![]);
    }
    let id_of = |t: &[Vec<usize>]| (0..t.len()).find(|&e| t[e] == (0..t.len()).collect::<Vec<_>>() && (0..t.len()).all(|x| t[x][e] == x));
    let ida = id_of(a)?;
    let idb = id_of(b)?;
    let orders_a = element_orders(a, ida);
    let orders_b = element_orders(b, idb);
    let mut sa = orders_a.clone();
    let mut sb = orders_b.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return None;
    }
    fn rec(
        a: &[Vec<usize>],
        b: &[Vec<usize>],
        orders_a: &[usize],
        orders_b: &[usize],
        map: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        i: usize,
    ) -> bool {
        if i == a.len() {
            return true;
        }
        if map[i].is_some() {
            return rec(a, b, orders_a, orders_b, map, used, i + 1);
        }
        'cand: for c in 0..b.len() {
            if used[c] || orders_a[i] != orders_b[c] {
                continue;
            }
            map[i] = Some(c);
            used[c] = true;
            // Consistency with all previously mapped pairs.
            for j in 0..a.len() {
                if let Some(mj) = map[j] {
                    for (x, y, mx, my) in [(i, j, c, mj), (j, i, mj, c)] {
                        let prod = a[x][y];
                        let target = b[mx][my];
                        match map[prod] {
                            Some(mp) if mp != target => {
                                map[i] = None;
                                used[c] = false;
                                continue 'cand;
                            }
                            Some(_) => {}
                            None => {
                                if used[target] {
                                    map[i] = None;
                                    used[c] = false;
                                    continue 'cand;
                                }
                            }
                        }
                    }
                }
            }
            if rec(a, b, orders_a, orders_b, map, used, i + 1) {
                return true;
            }
            map[i] = None;
            used[c] = false;
        }
        false
    }
    let mut map = vec![None; a.len()];
    let mut used = vec![false; b.len()];
    map[ida] = Some(idb);
    used[idb] = true;
    if rec(a, b, &orders_a, &orders_b, &mut map, &mut used, 0) {
        // Final full verification.
        let m: Vec<usize> = map.into_iter().map(Option::unwrap).collect();
        for x in 0..a.len() {
            for y in 0..a.len() {
                if m[a[x][y]] != b[m[x]][m[y]] {
                    return None;
                }
            }
        }
        Some(m)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_groupoids_validate() {
        for g in [
            FinGroupoid::discrete(0),
            FinGroupoid::discrete(3),
            FinGroupoid::indiscrete(3),
            FinGroupoid::cyclic_group(4),
            FinGroupoid::product(&FinGroupoid::indiscrete(2), &FinGroupoid::cyclic_group(2)),
            FinGroupoid::disjoint_union(
                &FinGroupoid::cyclic_group(3),
                &FinGroupoid::discrete(2),
            ),
        ] {
            g.validate().unwrap();
        }
    }

    #[test]
    fn constructor_rejects_broken_tables() {
        // Two objects, one non-identity arrow 0→1 with no inverse partner
        // still fails earlier: no identities at all.
        let r = FinGroupoid::new(1, vec![(0, 0), (0, 0)], {
            // "compose" making the second arrow not invertible: f∘f = f.
            BTreeMap::from([
                ((0, 0), 0),
                ((0, 1), 1),
                ((1, 0), 1),
                ((1, 1), 1),
            ])
        });
        assert!(r.is_err());
    }

    #[test]
    fn hom_and_inverse_bookkeeping() {
        let g = FinGroupoid::cyclic_group(3);
        assert_eq!(g.hom(0, 0), vec![0, 1, 2]);
        assert_eq!(g.inverse(1), 2);
        assert_eq!(g.compose(1, 2), 0);
        let ind = FinGroupoid::indiscrete(2);
        assert_eq!(ind.hom(0, 1).len(), 1);
        assert!(ind.is_identity(ind.identity(1)));
    }

    #[test]
    fn functor_enumeration_counts() {
        // Functors B(Z/2) → B(Z/2) are the two group endomorphisms.
        let z2 = FinGroupoid::cyclic_group(2);
        let fs = all_functors(&z2, &z2, 100).unwrap();
        assert_eq!(fs.len(), 2);
        // Functors discrete(2) → discrete(2): all four object maps.
        let d2 = FinGroupoid::discrete(2);
        assert_eq!(all_functors(&d2, &d2, 100).unwrap().len(), 4);
        // From the empty groupoid: exactly one (empty) functor.
        let empty = FinGroupoid::discrete(0);
        assert_eq!(all_functors(&empty, &z2, 100).unwrap().len(), 1);
        // Into the empty groupoid from a non-empty one: none.
        assert_eq!(all_functors(&z2, &empty, 100).unwrap().len(), 0);
        // B(Z/3) → B(Z/2): only the trivial homomorphism.
        let z3 = FinGroupoid::cyclic_group(3);
        assert_eq!(all_functors(&z3, &z2, 100).unwrap().len(), 1);
    }

    #[test]
    fn functor_enumeration_overflows() {
        let d = FinGroupoid::discrete(4);
        match all_functors(&d, &d, 100) {
            Err(ModelError::Overflow { size, .. }) => assert_eq!(size, 256),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn natural_iso_search() {
        let z2 = FinGroupoid::cyclic_group(2);
        let id = PlainFunctor::identity(&z2);
        // Z/2 is abelian, so both elements are natural id ⇒ id.
        assert_eq!(natural_isos(&z2, &z2, &id, &id).len(), 2);
        // Between the identity and the constant-at-identity endofunctor
        // (which kills σ), no natural iso exists: σ·c = c·e forces σ = e.
        let kill = PlainFunctor {
            obj_map: vec![0],
            mor_map: vec![0, 0],
        };
        kill.validate(&z2, &z2).unwrap();
        assert_eq!(natural_isos(&z2, &z2, &id, &kill).len(), 0);
        // Discrete codomain: natural isos exist only between equal functors.
        let d2 = FinGroupoid::discrete(2);
        let swap = PlainFunctor {
            obj_map: vec![1, 0],
            mor_map: vec![1, 0],
        };
        assert_eq!(natural_isos(&d2, &d2, &PlainFunctor::identity(&d2), &swap).len(), 0);
        assert_eq!(natural_isos(&d2, &d2, &swap, &swap).len(), 1);
    }

    #[test]
    fn equivalence_indiscrete_vs_terminal() {
        let ind = FinGroupoid::indiscrete(2);
        let pt = FinGroupoid::discrete(1);
        let w = groupoid_equivalent(&ind, &pt).expect("equivalent");
        w.fwd.validate(&ind, &pt).unwrap();
        w.bwd.validate(&pt, &ind).unwrap();
        // Round trips are naturally isomorphic to identities.
        let rt = w.fwd.then(&w.bwd);
        assert!(!natural_isos(&ind, &ind, &rt, &PlainFunctor::identity(&ind)).is_empty());
        let rt2 = w.bwd.then(&w.fwd);
        assert!(!natural_isos(&pt, &pt, &rt2, &PlainFunctor::identity(&pt)).is_empty());
    }

    #[test]
    fn equivalence_distinguishes_isotropy() {
        let z2 = FinGroupoid::cyclic_group(2);
        let pt = FinGroupoid::discrete(1);
        assert!(groupoid_equivalent(&z2, &pt).is_none());
        assert!(groupoid_equivalent(&z2, &z2).is_some());
        // Same component count, different groups.
        let z4 = FinGroupoid::cyclic_group(4);
        let klein = FinGroupoid::product(&z2, &z2);
        assert!(groupoid_equivalent(&z4, &klein).is_none());
        // Z/6 ≅ Z/2 × Z/3 as groups, hence equivalent as groupoids.
        let z6 = FinGroupoid::cyclic_group(6);
        let z2z3 = FinGroupoid::product(&z2, &FinGroupoid::cyclic_group(3));
        let w = groupoid_equivalent(&z6, &z2z3).expect("equivalent");
        w.fwd.validate(&z6, &z2z3).unwrap();
        w.bwd.validate(&z2z3, &z6).unwrap();
    }

    #[test]
    fn equivalence_respects_component_structure() {
        let z2 = FinGroupoid::cyclic_group(2);
        let pt = FinGroupoid::discrete(1);
        // (B(Z/2) ⊔ pt) vs (pt ⊔ B(Z/2)): equivalent, components permuted.
        let a = FinGroupoid::disjoint_union(&z2, &pt);
        let b = FinGroupoid::disjoint_union(&pt, &z2);
        let w = groupoid_equivalent(&a, &b).expect("equivalent");
        w.fwd.validate(&a, &b).unwrap();
        // (B(Z/2) ⊔ pt) vs (pt ⊔ pt): not equivalent.
        let c = FinGroupoid::disjoint_union(&pt, &pt);
        assert!(groupoid_equivalent(&a, &c).is_none());
        // Different component counts.
        assert!(groupoid_equivalent(&a, &pt).is_none());
        // An inflated point: indiscrete(3) ⊔ B(Z/2) vs pt ⊔ B(Z/2).
        let big = FinGroupoid::disjoint_union(&FinGroupoid::indiscrete(3), &z2);
        assert!(groupoid_equivalent(&big, &b).is_some());
    }

    #[test]
    fn group_isomorphism_search() {
        let table = |g: &FinGroupoid| g.aut_table(0);
        let z4 = table(&FinGroupoid::cyclic_group(4));
        let klein = table(&FinGroupoid::product(
            &FinGroupoid::cyclic_group(2),
            &FinGroupoid::cyclic_group(2),
        ));
        assert!(group_isomorphism(&z4, &klein).is_none());
        let z6 = table(&FinGroupoid::cyclic_group(6));
        let z2z3 = table(&FinGroupoid::product(
            &FinGroupoid::cyclic_group(2),
            &FinGroupoid::cyclic_group(3),
        ));
        let iso = group_isomorphism(&z6, &z2z3).expect("isomorphic");
        for x in 0..6 {
            for y in 0..6 {
                assert_eq!(iso[z6[x][y]], z2z3[iso[x]][iso[y]]);
            }
        }
    }

    #[test]
    fn components_and_paths() {
        let g = FinGroupoid::disjoint_union(
            &FinGroupoid::indiscrete(2),
            &FinGroupoid::cyclic_group(2),
        );
        assert_eq!(g.components(), vec![vec![0, 1], vec![2]]);
    }
}
