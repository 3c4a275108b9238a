//! Finite categories, set-valued diagrams, colimits via zigzag classes,
//! the confluence criterion, and connected-component decomposition.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::element::Element;
use crate::error::{Error, Result};
use crate::finset::{inverse_image, FinFun, FinSet};
use crate::functor::Endofunctor;
use crate::report::Report;

/// A finite category: numbered objects, morphisms with explicit source,
/// target and composition table. Laws are checked at construction.
#[derive(Clone, Debug)]
pub struct FinCat {
    name: String,
    n_objects: usize,
    src: Vec<usize>,
    dst: Vec<usize>,
    comp: Vec<Vec<Option<usize>>>, // comp[g][f] = g . f when dst(f) = src(g)
    ids: Vec<usize>,
}

impl FinCat {
    pub fn new(
        name: impl Into<String>,
        n_objects: usize,
        arrows: Vec<(usize, usize)>,
        ids: Vec<usize>,
        comp: Vec<Vec<Option<usize>>>,
    ) -> Result<Self> {
        let n = arrows.len();
        let cat = FinCat {
            name: name.into(),
            n_objects,
            src: arrows.iter().map(|a| a.0).collect(),
            dst: arrows.iter().map(|a| a.1).collect(),
            comp,
            ids,
        };
        if cat.ids.len() != n_objects {
            return Err(Error::InvalidSpec("one identity per object required".into()));
        }
        for (o, &i) in cat.ids.iter().enumerate() {
            if cat.src[i] != o || cat.dst[i] != o {
                return Err(Error::InvalidSpec("identity endpoints wrong".into()));
            }
        }
        for g in 0..n {
            for f in 0..n {
                let defined = cat.dst[f] == cat.src[g];
                match cat.comp[g][f] {
                    Some(h) => {
                        if !defined
                            || cat.src[h] != cat.src[f]
                            || cat.dst[h] != cat.dst[g]
                        {
                            return Err(Error::InvalidSpec(
                                "composition table inconsistent".into(),
                            ));
                        }
                    }
                    None => {
                        if defined {
                            return Err(Error::InvalidSpec(
                                "composition missing for composable pair".into(),
                            ));
                        }
                    }
                }
            }
        }
        // identity laws
        for f in 0..n {
            if cat.comp[f][cat.ids[cat.src[f]]] != Some(f)
                || cat.comp[cat.ids[cat.dst[f]]][f] != Some(f)
            {
                return Err(Error::InvalidSpec("identity law fails".into()));
            }
        }
        // associativity on the full table
        for f in 0..n {
            for g in 0..n {
                if cat.dst[f] != cat.src[g] {
                    continue;
                }
                for h in 0..n {
                    if cat.dst[g] != cat.src[h] {
                        continue;
                    }
                    let left = cat.comp[h][cat.comp[g][f].unwrap()];
                    let right = cat.comp[cat.comp[h][g].unwrap()][f];
                    if left != right {
                        return Err(Error::InvalidSpec("associativity fails".into()));
                    }
                }
            }
        }
        Ok(cat)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_morphisms(&self) -> usize {
        self.src.len()
    }

    pub fn src(&self, m: usize) -> usize {
        self.src[m]
    }

    pub fn dst(&self, m: usize) -> usize {
        self.dst[m]
    }

    pub fn id(&self, o: usize) -> usize {
        self.ids[o]
    }

    pub fn compose_mor(&self, g: usize, f: usize) -> Option<usize> {
        self.comp[g][f]
    }

    pub fn morphisms(&self) -> impl Iterator<Item = usize> {
        0..self.src.len()
    }

    pub fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        self.morphisms()
            .filter(|&m| self.src[m] == a && self.dst[m] == b)
            .collect()
    }

    /// Exhaustive check of the confluence condition: every pair of arrows
    /// out of a common object admits a commuting completion.
    pub fn is_confluent(&self) -> bool {
        self.first_nonconfluent_span().is_none()
    }

    /// A span witnessing non-confluence, if any.
    pub fn first_nonconfluent_span(&self) -> Option<(usize, usize)> {
        for a1 in self.morphisms() {
            for a2 in self.morphisms() {
                if self.src[a1] != self.src[a2] {
                    continue;
                }
                let mut completed = false;
                'search: for b1 in self.morphisms() {
                    if self.src[b1] != self.dst[a1] {
                        continue;
                    }
                    for b2 in self.morphisms() {
                        if self.src[b2] != self.dst[a2] || self.dst[b2] != self.dst[b1] {
                            continue;
                        }
                        if self.comp[b1][a1] == self.comp[b2][a2] {
                            completed = true;
                            break 'search;
                        }
                    }
                }
                if !completed {
                    return Some((a1, a2));
                }
            }
        }
        None
    }

    // ----- shape library -----

    pub fn discrete(n: usize) -> Self {
        let arrows = (0..n).map(|o| (o, o)).collect();
        let comp = (0..n)
            .map(|g| (0..n).map(|f| if f == g { Some(f) } else { None }).collect())
            .collect();
        FinCat::new(format!("discrete{n}"), n, arrows, (0..n).collect(), comp).unwrap()
    }

    /// The walking span `1 <- 0 -> 2`.
    pub fn span() -> Self {
        Self::from_poset_like("span", 3, &[(0, 1), (0, 2)])
    }

    /// The walking cospan `0 -> 2 <- 1`.
    pub fn cospan() -> Self {
        Self::from_poset_like("cospan", 3, &[(0, 2), (1, 2)])
    }

    /// The commuting square poset `2 x 2` (span completed by a cocone),
    /// used as the pushout shape.
    pub fn pushout_square() -> Self {
        Self::from_poset_like("square", 4, &[(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)])
    }

    /// The ordinal `0 -> 1 -> ... -> n-1` with all composites.
    pub fn chain(n: usize) -> Self {
        let mut rel = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                rel.push((i, j));
            }
        }
        Self::from_poset_like(format!("chain{n}"), n, &rel)
    }

    fn from_poset_like(name: impl Into<String>, n: usize, strict: &[(usize, usize)]) -> Self {
        // arrows: identities then the strict pairs (assumed transitively closed)
        let mut arrows: Vec<(usize, usize)> = (0..n).map(|o| (o, o)).collect();
        arrows.extend_from_slice(strict);
        let total = arrows.len();
        let ids: Vec<usize> = (0..n).collect();
        let find = |a: usize, b: usize| -> Option<usize> {
            arrows.iter().position(|&(s, d)| s == a && d == b)
        };
        let mut comp = vec![vec![None; total]; total];
        for (g, &(gs, gd)) in arrows.iter().enumerate() {
            for (f, &(fs, fd)) in arrows.iter().enumerate() {
                if fd == gs {
                    comp[g][f] = Some(
                        find(fs, gd).expect("poset relation must be transitively closed"),
                    );
                }
            }
        }
        FinCat::new(name, n, arrows, ids, comp).unwrap()
    }

    /// The walking parallel pair `0 => 1`.
    pub fn parallel_pair() -> Self {
        let arrows = vec![(0, 0), (1, 1), (0, 1), (0, 1)];
        let ids = vec![0, 1];
        let mut comp = vec![vec![None; 4]; 4];
        for g in 0..4 {
            for f in 0..4 {
                let (fs, fd) = arrows[f];
                let (gs, gd) = arrows[g];
                if fd != gs {
                    continue;
                }
                comp[g][f] = Some(if arrows[g] == (gs, gs) {
                    f
                } else if arrows[f] == (fs, fs) {
                    g
                } else {
                    unreachable!("no composable non-identity pairs")
                });
                let _ = (fs, gd);
            }
        }
        FinCat::new("parallel", 2, arrows, ids, comp).unwrap()
    }

    /// The one-object group `Z/n` as a category.
    pub fn cyclic_group(n: usize) -> Self {
        let arrows = vec![(0, 0); n];
        let ids = vec![0];
        let comp = (0..n)
            .map(|g| (0..n).map(|f| Some((g + f) % n)).collect())
            .collect();
        FinCat::new(format!("Z/{n}"), 1, arrows, ids, comp).unwrap()
    }

    /// The built-in shape library, covering both directions of the
    /// confluence criterion.
    pub fn shape_library() -> Vec<FinCat> {
        vec![
            FinCat::discrete(1),
            FinCat::discrete(2),
            FinCat::discrete(3),
            FinCat::span(),
            FinCat::cospan(),
            FinCat::parallel_pair(),
            FinCat::chain(2),
            FinCat::chain(3),
            FinCat::chain(4),
            FinCat::cyclic_group(2),
            FinCat::cyclic_group(3),
            FinCat::pushout_square(),
        ]
    }
}

/// A functor from a finite shape into finite sets; functoriality is checked
/// at construction.
#[derive(Clone, Debug)]
pub struct SetDiagram {
    shape: FinCat,
    objects: Vec<FinSet>,
    arrows: Vec<FinFun>,
}

impl SetDiagram {
    pub fn new(shape: FinCat, objects: Vec<FinSet>, arrows: Vec<FinFun>) -> Result<Self> {
        if objects.len() != shape.n_objects() || arrows.len() != shape.n_morphisms() {
            return Err(Error::ShapeMismatch("diagram data sizes".into()));
        }
        for m in shape.morphisms() {
            if arrows[m].dom() != &objects[shape.src(m)]
                || arrows[m].cod() != &objects[shape.dst(m)]
            {
                return Err(Error::ShapeMismatch(format!("arrow {m} endpoints")));
            }
        }
        for o in 0..shape.n_objects() {
            if !arrows[shape.id(o)].is_identity() {
                return Err(Error::InvalidSpec("diagram does not preserve identities".to_string()));
            }
        }
        for g in shape.morphisms() {
            for f in shape.morphisms() {
                if let Some(h) = shape.compose_mor(g, f) {
                    let gf = FinFun::compose(&arrows[g], &arrows[f]).expect("endpoints match");
                    if gf != arrows[h] {
                        return Err(Error::InvalidSpec(
                            "diagram does not preserve composition".into(),
                        ));
                    }
                }
            }
        }
        Ok(SetDiagram { shape, objects, arrows })
    }

    pub fn shape(&self) -> &FinCat {
        &self.shape
    }

    pub fn object(&self, o: usize) -> &FinSet {
        &self.objects[o]
    }

    pub fn arrow(&self, m: usize) -> &FinFun {
        &self.arrows[m]
    }

    /// The covariant representable `Hom(a, -)`, with morphisms encoded as
    /// atoms carrying their morphism id.
    pub fn representable(shape: &FinCat, a: usize) -> SetDiagram {
        let objects: Vec<FinSet> = (0..shape.n_objects())
            .map(|b| {
                FinSet::new(
                    shape
                        .hom(a, b)
                        .into_iter()
                        .map(|m| Element::atom(m as u32))
                        .collect(),
                )
            })
            .collect();
        let arrows: Vec<FinFun> = shape
            .morphisms()
            .map(|m| {
                FinFun::from_fn(
                    objects[shape.src(m)].clone(),
                    objects[shape.dst(m)].clone(),
                    |e| match e {
                        Element::Atom(f) => Element::atom(
                            shape.compose_mor(m, *f as usize).expect("composable") as u32,
                        ),
                        _ => unreachable!(),
                    },
                )
                .expect("representable arrow total")
            })
            .collect();
        SetDiagram::new(shape.clone(), objects, arrows).expect("representable is functorial")
    }

    fn node_count(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.objects.len() + 1);
        let mut acc = 0;
        for o in &self.objects {
            offsets.push(acc);
            acc += o.len();
        }
        offsets.push(acc);
        offsets
    }

    /// Colimit as zigzag classes: returns the colimit set (elements are
    /// `Cls` of the order-minimal `(object-index, element)` pair in each
    /// class) and the cocone components.
    pub fn colimit(&self) -> (FinSet, Vec<FinFun>) {
        let offsets = self.node_count();
        let total = *offsets.last().unwrap();
        let mut uf: Vec<usize> = (0..total).collect();
        fn find(uf: &mut Vec<usize>, i: usize) -> usize {
            let mut r = i;
            while uf[r] != r {
                r = uf[r];
            }
            let mut c = i;
            while uf[c] != r {
                let n = uf[c];
                uf[c] = r;
                c = n;
            }
            r
        }
        for m in self.shape.morphisms() {
            let (s, d) = (self.shape.src(m), self.shape.dst(m));
            for (xi, x) in self.objects[s].iter().enumerate() {
                let img = self.arrows[m].apply(x);
                let yi = self.objects[d].index_of(&img).expect("image in target");
                let a = find(&mut uf, offsets[s] + xi);
                let b = find(&mut uf, offsets[d] + yi);
                uf[a] = b;
            }
        }
        // minimal (object, element) pair per class
        let pair = |node: usize| -> Element {
            let o = match offsets.binary_search(&node) {
                Ok(i) => {
                    // offsets has a trailing total; an exact hit on object
                    // boundary means the node starts object i (skip empties)
                    let mut i = i;
                    while offsets[i + 1] == offsets[i] {
                        i += 1;
                    }
                    i
                }
                Err(i) => i - 1,
            };
            let xi = node - offsets[o];
            Element::tuple(vec![
                Element::atom(o as u32),
                self.objects[o].elem(xi).clone(),
            ])
        };
        let mut class_min: std::collections::HashMap<usize, Element> = Default::default();
        for node in 0..total {
            let root = find(&mut uf, node);
            let p = pair(node);
            class_min
                .entry(root)
                .and_modify(|cur| {
                    if p < *cur {
                        *cur = p.clone();
                    }
                })
                .or_insert(p);
        }
        let colim = FinSet::new(class_min.values().cloned().map(Element::cls).collect());
        let mut cocone = Vec::with_capacity(self.objects.len());
        for (o, obj) in self.objects.iter().enumerate() {
            let comp = FinFun::from_fn(obj.clone(), colim.clone(), |x| {
                let xi = obj.index_of(x).unwrap();
                let root = find(&mut uf.clone(), offsets[o] + xi);
                Element::cls(class_min[&root].clone())
            })
            .expect("cocone total");
            cocone.push(comp);
        }
        (colim, cocone)
    }

    /// Colimit computed by the length-1 zigzag criterion: `(I, x)` and
    /// `(J, y)` are identified only when some pair of arrows equalizes them
    /// directly. Agrees with the full closure exactly on confluent shapes.
    pub fn colimit_one_step_classes(&self) -> Vec<BTreeSet<(usize, usize)>> {
        let mut nodes: Vec<(usize, usize)> = Vec::new();
        for (o, obj) in self.objects.iter().enumerate() {
            for xi in 0..obj.len() {
                nodes.push((o, xi));
            }
        }
        let related = |&(o1, x1): &(usize, usize), &(o2, x2): &(usize, usize)| -> bool {
            for b1 in self.shape.hom_from(o1) {
                for b2 in self.shape.hom_from(o2) {
                    if self.shape.dst(b1) != self.shape.dst(b2) {
                        continue;
                    }
                    let i1 = self.arrows[b1].apply_idx(x1);
                    let i2 = self.arrows[b2].apply_idx(x2);
                    if i1 == i2 {
                        return true;
                    }
                }
            }
            false
        };
        let mut classes: Vec<BTreeSet<(usize, usize)>> = Vec::new();
        'outer: for n in &nodes {
            for c in classes.iter_mut() {
                if c.iter().any(|m| related(m, n)) {
                    c.insert(*n);
                    continue 'outer;
                }
            }
            let mut c = BTreeSet::new();
            c.insert(*n);
            classes.push(c);
        }
        classes
    }
}

impl FinCat {
    fn hom_from(&self, a: usize) -> Vec<usize> {
        self.morphisms().filter(|&m| self.src[m] == a).collect()
    }
}

/// Independent colimit oracle: closes the generated equivalence relation by
/// transitive closure over the full pair matrix (no union-find) and returns
/// the partition as sorted classes of `(object, element index)` nodes.
pub fn colimit_partition_oracle(d: &SetDiagram) -> Vec<BTreeSet<(usize, usize)>> {
    let mut nodes: Vec<(usize, usize)> = Vec::new();
    for (o, obj) in (0..d.shape().n_objects()).map(|o| (o, d.object(o))) {
        for xi in 0..obj.len() {
            nodes.push((o, xi));
        }
    }
    let idx = |n: &(usize, usize)| nodes.iter().position(|m| m == n).unwrap();
    let mut rel = vec![vec![false; nodes.len()]; nodes.len()];
    for (i, _) in nodes.iter().enumerate() {
        rel[i][i] = true;
    }
    for m in d.shape().morphisms() {
        let (s, t) = (d.shape().src(m), d.shape().dst(m));
        for xi in 0..d.object(s).len() {
            let yi = d.arrow(m).apply_idx(xi);
            let a = idx(&(s, xi));
            let b = idx(&(t, yi));
            rel[a][b] = true;
            rel[b][a] = true;
        }
    }
    // transitive closure
    let n = nodes.len();
    for k in 0..n {
        for i in 0..n {
            if rel[i][k] {
                for j in 0..n {
                    if rel[k][j] {
                        rel[i][j] = true;
                    }
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut classes: Vec<BTreeSet<(usize, usize)>> = Vec::new();
    for i in 0..n {
        if !seen[i] {
            let mut class = BTreeSet::new();
            for j in 0..n {
                if rel[i][j] {
                    seen[j] = true;
                    class.insert(nodes[j]);
                }
            }
            classes.push(class);
        }
    }
    classes.sort();
    classes
}

/// Convenience count used by tests.
pub fn colimit_class_count_oracle(d: &SetDiagram) -> usize {
    colimit_partition_oracle(d).len()
}

/// Confluence decided through the representable construction in the
/// commutation theorem's proof: for every span, the subfunctor of morphisms
/// admitting a completion must have colimit 1. Serves as an independent
/// oracle for `is_confluent`.
pub fn confluent_via_representables(shape: &FinCat) -> bool {
    for a1 in shape.morphisms() {
        for a2 in shape.morphisms() {
            if shape.src(a1) != shape.src(a2) {
                continue;
            }
            let (_phi0, nonempty) = completion_subfunctor(shape, a1, a2);
            if !nonempty {
                return false;
            }
        }
    }
    true
}

/// For a span `a1, a2` out of a common object, builds the subfunctor
/// `Phi_0` of `Hom(dst(a1), -)` consisting of morphisms `b1` such that some
/// `b2` completes the square, and reports whether it is nonempty anywhere
/// (equivalently, whether its colimit is 1 rather than 0).
pub fn completion_subfunctor(shape: &FinCat, a1: usize, a2: usize) -> (Vec<FinSet>, bool) {
    let i1 = shape.dst(a1);
    let i2 = shape.dst(a2);
    let mut out = Vec::new();
    let mut nonempty = false;
    for j in 0..shape.n_objects() {
        let mut elems = Vec::new();
        for b1 in shape.hom(i1, j) {
            let comp1 = shape.compose_mor(b1, a1).expect("composable");
            let completes = shape
                .hom(i2, j)
                .into_iter()
                .any(|b2| shape.compose_mor(b2, a2) == Some(comp1));
            if completes {
                elems.push(Element::atom(b1 as u32));
                nonempty = true;
            }
        }
        out.push(FinSet::new(elems));
    }
    (out, nonempty)
}

#[derive(Clone, Debug)]
pub struct CommutationParams {
    pub trials: usize,
    pub seed: u64,
    pub max_fiber: usize,
}

impl Default for CommutationParams {
    fn default() -> Self {
        CommutationParams { trials: 25, seed: crate::functor::DEFAULT_SEED, max_fiber: 4 }
    }
}

/// For a confluent shape, samples inverse-image squares of diagrams and
/// checks that colimits commute with them exactly. For a non-confluent
/// shape, runs the representable counterexample from the theorem's proof
/// and reports the witnessed failure.
pub fn check_colimit_commutes_with_inverse_images(
    shape: &FinCat,
    params: &CommutationParams,
) -> Report {
    let start = Instant::now();
    let mut report = Report::new(format!("colimit-commutation[{}]", shape.name()))
        .with_param("trials", params.trials)
        .with_param("seed", format!("{:#x}", params.seed));
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    if let Some((a1, a2)) = shape.first_nonconfluent_span() {
        // Representable counterexample: colim of a representable is 1, but
        // the completion subfunctor is empty along the failing span.
        report.record_case();
        let (phi0, nonempty) = completion_subfunctor(shape, a1, a2);
        let colim_phi0 = if nonempty { 1 } else { 0 };
        if colim_phi0 == 0 {
            report.fail(
                format!("span ({a1},{a2})"),
                format!(
                    "counterexample found: colim Phi_0 = 0 but the inverse image of colim Gamma_0 = 1 (Phi_0 sizes {:?})",
                    phi0.iter().map(FinSet::len).collect::<Vec<_>>()
                ),
            );
        } else {
            report.fail(
                format!("span ({a1},{a2})"),
                "span flagged non-confluent but completion subfunctor nonempty",
            );
        }
        report.elapsed = start.elapsed();
        return report;
    }

    for trial in 0..params.trials {
        report.record_case();
        // Gamma: coproduct of representables (always functorial).
        let n_parts = rng.gen_range(1..=3usize);
        let parts: Vec<usize> = (0..n_parts)
            .map(|_| rng.gen_range(0..shape.n_objects()))
            .collect();
        let gamma = coproduct_of_representables(shape, &parts);
        // Gamma_0: random subfunctor, generated by closing random seeds.
        let gamma0 = random_subfunctor(&gamma, &mut rng);
        // Phi and t : Phi -> Gamma via Yoneda choices.
        let m_parts = rng.gen_range(1..=3usize);
        let sources: Vec<usize> = (0..m_parts)
            .map(|_| rng.gen_range(0..shape.n_objects()))
            .collect();
        let phi = coproduct_of_representables(shape, &sources);
        let mut choices = Vec::new();
        let mut degenerate = false;
        for (k, &a) in sources.iter().enumerate() {
            let avail = gamma.object(a);
            if avail.is_empty() {
                degenerate = true;
                break;
            }
            let pick = avail.elem(rng.gen_range(0..avail.len())).clone();
            choices.push((k, a, pick));
        }
        if degenerate {
            continue;
        }
        let t_at = |o: usize, e: &Element| -> Element {
            let (label, inner) = e.expect_tag();
            let k: usize = label.parse().unwrap();
            let m = match inner {
                Element::Atom(m) => *m as usize,
                _ => unreachable!(),
            };
            let (_, _a, ref pick) = choices[k];
            let _ = o;
            gamma_action(&gamma, m, pick)
        };
        // Phi_0 = t^{-1}(Gamma_0), pointwise.
        let mut phi0_objs = Vec::new();
        for o in 0..shape.n_objects() {
            let sub = FinSet::new(
                phi.object(o)
                    .iter()
                    .filter(|e| gamma0[o].contains(&t_at(o, e)))
                    .cloned()
                    .collect(),
            );
            phi0_objs.push(sub);
        }
        // Compare: image of colim Phi_0 inside colim Phi vs inverse image of
        // colim Gamma_0 under colim t.
        let (colim_phi, cocone_phi) = phi.colimit();
        let (colim_gamma, cocone_gamma) = gamma.colimit();
        let classes_with_rep_in_phi0: BTreeSet<Element> = (0..shape.n_objects())
            .flat_map(|o| {
                phi0_objs[o]
                    .iter()
                    .map(|e| cocone_phi[o].apply(e))
                    .collect::<Vec<_>>()
            })
            .collect();
        let classes_in_gamma0: BTreeSet<Element> = (0..shape.n_objects())
            .flat_map(|o| {
                gamma0[o]
                    .iter()
                    .map(|e| cocone_gamma[o].apply(e))
                    .collect::<Vec<_>>()
            })
            .collect();
        // colim t on classes: induced by any representative.
        let mut preimage: BTreeSet<Element> = BTreeSet::new();
        for o in 0..shape.n_objects() {
            for e in phi.object(o).iter() {
                let class_phi = cocone_phi[o].apply(e);
                let class_gamma = cocone_gamma[o].apply(&t_at(o, e));
                if classes_in_gamma0.contains(&class_gamma) {
                    preimage.insert(class_phi);
                }
            }
        }
        if classes_with_rep_in_phi0 != preimage {
            report.fail(
                format!("trial {trial}"),
                format!(
                    "colim Phi_0 has {} classes but the inverse image has {}",
                    classes_with_rep_in_phi0.len(),
                    preimage.len()
                ),
            );
        }
        let _ = colim_phi;
        let _ = colim_gamma;
    }
    report.elapsed = start.elapsed();
    report
}

fn coproduct_of_representables(shape: &FinCat, sources: &[usize]) -> SetDiagram {
    let reps: Vec<SetDiagram> = sources
        .iter()
        .map(|&a| SetDiagram::representable(shape, a))
        .collect();
    let objects: Vec<FinSet> = (0..shape.n_objects())
        .map(|o| {
            FinSet::new(
                reps.iter()
                    .enumerate()
                    .flat_map(|(k, r)| {
                        r.object(o)
                            .iter()
                            .map(|e| Element::tag(k.to_string(), e.clone()))
                            .collect::<Vec<_>>()
                    })
                    .collect(),
            )
        })
        .collect();
    let arrows: Vec<FinFun> = shape
        .morphisms()
        .map(|m| {
            FinFun::from_fn(
                objects[shape.src(m)].clone(),
                objects[shape.dst(m)].clone(),
                |e| {
                    let (label, inner) = e.expect_tag();
                    let k: usize = label.parse().unwrap();
                    Element::tag(label, reps[k].arrow(m).apply(inner))
                },
            )
            .expect("coproduct arrow total")
        })
        .collect();
    SetDiagram::new(shape.clone(), objects, arrows).expect("coproduct of representables")
}

/// Applies the morphism action of a coproduct-of-representables diagram to
/// a single element (used to push Yoneda choices forward).
fn gamma_action(gamma: &SetDiagram, m: usize, e: &Element) -> Element {
    gamma.arrow(m).apply(e)
}

/// A random subfunctor: seed random elements, then close forward under all
/// arrows.
fn random_subfunctor(d: &SetDiagram, rng: &mut ChaCha8Rng) -> Vec<FinSet> {
    let n = d.shape().n_objects();
    let mut sub: Vec<BTreeSet<Element>> = vec![BTreeSet::new(); n];
    for o in 0..n {
        for e in d.object(o).iter() {
            if rng.gen_bool(0.4) {
                sub[o].insert(e.clone());
            }
        }
    }
    loop {
        let mut changed = false;
        for m in d.shape().morphisms() {
            let (s, t) = (d.shape().src(m), d.shape().dst(m));
            let images: Vec<Element> = sub[s].iter().map(|e| d.arrow(m).apply(e)).collect();
            for img in images {
                if sub[t].insert(img) {
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    sub.into_iter().map(|s| FinSet::new(s.into_iter().collect())).collect()
}

/// A connected component of a taut functor, cut out by a point of `F(1)`.
#[derive(Clone, Debug)]
pub struct Pi0Component {
    pub point: Element,
    pub functor: Endofunctor,
}

/// Decomposes a taut-verified functor into connected components indexed by
/// `F(1)`: each component is the inverse image of a point along
/// `F(X) -> F(1)`.
pub fn pi0(f: &Endofunctor) -> Result<Vec<Pi0Component>> {
    if !f.is_taut_verified() {
        return Err(Error::NotTautVerified(f.name().to_string()));
    }
    let one = FinSet::one();
    let f1 = f.at(&one);
    let mut out = Vec::new();
    for point in f1.iter() {
        let p = point.clone();
        let base = f.clone();
        let base2 = f.clone();
        let p2 = p.clone();
        let component = Endofunctor::new(
            format!("{}|{}", f.name(), p),
            move |x| {
                let tau = FinFun::to_terminal(x);
                let ftau = base.map(&tau);
                inverse_image(&ftau, &FinSet::singleton(p.clone())).expect("point in F1")
            },
            move |g| {
                let whole = base2.map(g);
                let fiber = |s: &FinSet| {
                    let tau = FinFun::to_terminal(s);
                    let ftau = base2.map(&tau);
                    inverse_image(&ftau, &FinSet::singleton(p2.clone())).expect("point in F1")
                };
                whole
                    .restrict(&fiber(g.dom()), &fiber(g.cod()))
                    .expect("components are subfunctors")
            },
        );
        out.push(Pi0Component { point: point.clone(), functor: component });
    }
    Ok(out)
}
