//! Explicit finite sets of elements and total maps between them.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::element::Element;
use crate::error::{Error, Result};

/// A finite set: a strictly increasing sequence of [`Element`]s.
///
/// Construction sorts and deduplicates, so two sets with the same members
/// are equal as values. Cloning is cheap (shared storage).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FinSet {
    elems: Arc<Vec<Element>>,
}

impl FinSet {
    pub fn new(mut elems: Vec<Element>) -> Self {
        elems.sort();
        elems.dedup();
        FinSet { elems: Arc::new(elems) }
    }

    pub fn empty() -> Self {
        FinSet::new(Vec::new())
    }

    pub fn singleton(e: Element) -> Self {
        FinSet::new(vec![e])
    }

    /// The canonical n-element set `{0, 1, .., n-1}`.
    pub fn atoms(n: usize) -> Self {
        FinSet::new((0..n as u32).map(Element::Atom).collect())
    }

    /// The canonical terminal object used throughout: `{*}`.
    pub fn one() -> Self {
        FinSet::singleton(Element::Star)
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.elems.binary_search(e).is_ok()
    }

    pub fn index_of(&self, e: &Element) -> Option<usize> {
        self.elems.binary_search(e).ok()
    }

    pub fn elem(&self, i: usize) -> &Element {
        &self.elems[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Element> {
        self.elems.iter()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elems
    }

    pub fn is_subset_of(&self, other: &FinSet) -> bool {
        self.iter().all(|e| other.contains(e))
    }

    pub fn union(&self, other: &FinSet) -> FinSet {
        let mut v: Vec<Element> = self.elems.as_ref().clone();
        v.extend(other.iter().cloned());
        FinSet::new(v)
    }

    pub fn difference(&self, other: &FinSet) -> FinSet {
        FinSet::new(self.iter().filter(|e| !other.contains(e)).cloned().collect())
    }

    pub fn insert(&self, e: Element) -> FinSet {
        let mut v: Vec<Element> = self.elems.as_ref().clone();
        v.push(e);
        FinSet::new(v)
    }

    /// All subsets, in the canonical order induced by bitmasks over the
    /// element order. Guarded to keep enumeration at desk scale.
    pub fn subsets(&self) -> Vec<FinSet> {
        assert!(self.len() <= 20, "subset enumeration limited to 20 elements");
        let n = self.len();
        (0..(1usize << n))
            .map(|mask| {
                FinSet::new(
                    (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| self.elem(i).clone())
                        .collect(),
                )
            })
            .collect()
    }

    pub fn proper_subsets(&self) -> Vec<FinSet> {
        let mut subs = self.subsets();
        subs.retain(|s| s.len() < self.len());
        subs
    }

    /// Cartesian product: all tuples with one component from each factor.
    pub fn tuples(factors: &[FinSet]) -> FinSet {
        let mut acc: Vec<Vec<Element>> = vec![Vec::new()];
        for f in factors {
            let mut next = Vec::with_capacity(acc.len() * f.len().max(1));
            for prefix in &acc {
                for e in f.iter() {
                    let mut t = prefix.clone();
                    t.push(e.clone());
                    next.push(t);
                }
            }
            acc = next;
        }
        FinSet::new(acc.into_iter().map(Element::Tuple).collect())
    }

    pub fn tagged(label: &str, inner: &FinSet) -> FinSet {
        FinSet::new(inner.iter().map(|e| Element::tag(label, e.clone())).collect())
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<Element> for FinSet {
    fn from_iter<T: IntoIterator<Item = Element>>(iter: T) -> Self {
        FinSet::new(iter.into_iter().collect())
    }
}

/// A total map between finite sets, stored as indices into the codomain.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FinFun {
    dom: FinSet,
    cod: FinSet,
    map: Vec<usize>,
}

impl FinFun {
    pub fn new(dom: FinSet, cod: FinSet, map: Vec<usize>) -> Result<Self> {
        if map.len() != dom.len() {
            return Err(Error::Precondition(format!(
                "map length {} does not match domain size {}",
                map.len(),
                dom.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&i| i >= cod.len()) {
            return Err(Error::Precondition(format!(
                "image index {bad} outside codomain of size {}",
                cod.len()
            )));
        }
        Ok(FinFun { dom, cod, map })
    }

    /// Builds a map from a pointwise rule; every image must lie in `cod`.
    pub fn from_fn(dom: FinSet, cod: FinSet, f: impl Fn(&Element) -> Element) -> Result<Self> {
        let mut map = Vec::with_capacity(dom.len());
        for e in dom.iter() {
            let img = f(e);
            match cod.index_of(&img) {
                Some(i) => map.push(i),
                None => {
                    return Err(Error::Precondition(format!(
                        "image {img} of {e} is not in the codomain"
                    )))
                }
            }
        }
        Ok(FinFun { dom, cod, map })
    }

    /// Builds a map from explicit (source, image) pairs covering the domain.
    pub fn from_pairs(dom: FinSet, cod: FinSet, pairs: Vec<(Element, Element)>) -> Result<Self> {
        let mut map = vec![usize::MAX; dom.len()];
        for (src, img) in pairs {
            let si = dom
                .index_of(&src)
                .ok_or_else(|| Error::Precondition(format!("{src} not in domain")))?;
            let ii = cod
                .index_of(&img)
                .ok_or_else(|| Error::Precondition(format!("{img} not in codomain")))?;
            map[si] = ii;
        }
        if map.iter().any(|&i| i == usize::MAX) {
            return Err(Error::Precondition("map not total".into()));
        }
        FinFun::new(dom, cod, map)
    }

    pub fn identity(set: &FinSet) -> Self {
        FinFun {
            dom: set.clone(),
            cod: set.clone(),
            map: (0..set.len()).collect(),
        }
    }

    pub fn inclusion(sub: &FinSet, sup: &FinSet) -> Result<Self> {
        let mut map = Vec::with_capacity(sub.len());
        for e in sub.iter() {
            match sup.index_of(e) {
                Some(i) => map.push(i),
                None => {
                    return Err(Error::Precondition(format!(
                        "{e} is not an element of the ambient set"
                    )))
                }
            }
        }
        Ok(FinFun { dom: sub.clone(), cod: sup.clone(), map })
    }

    pub fn to_terminal(dom: &FinSet) -> Self {
        FinFun {
            dom: dom.clone(),
            cod: FinSet::one(),
            map: vec![0; dom.len()],
        }
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    pub fn apply_idx(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn apply(&self, e: &Element) -> Element {
        let i = self
            .dom
            .index_of(e)
            .unwrap_or_else(|| panic!("{e} not in domain of map"));
        self.cod.elem(self.map[i]).clone()
    }

    pub fn graph(&self) -> impl Iterator<Item = (&Element, &Element)> {
        self.dom
            .iter()
            .enumerate()
            .map(move |(i, e)| (e, self.cod.elem(self.map[i])))
    }

    /// `after . before`; the codomain of `before` must equal the domain of
    /// `after` as finite sets.
    pub fn compose(after: &FinFun, before: &FinFun) -> Result<FinFun> {
        if before.cod != after.dom {
            return Err(Error::Precondition(
                "composition requires matching codomain/domain".into(),
            ));
        }
        Ok(FinFun {
            dom: before.dom.clone(),
            cod: after.cod.clone(),
            map: before.map.iter().map(|&i| after.map[i]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = HashSet::new();
        self.map.iter().all(|i| seen.insert(*i))
    }

    pub fn is_surjective(&self) -> bool {
        let seen: HashSet<usize> = self.map.iter().copied().collect();
        seen.len() == self.cod.len()
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    pub fn is_identity(&self) -> bool {
        self.dom == self.cod && self.map.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn image(&self) -> FinSet {
        FinSet::new(self.map.iter().map(|&i| self.cod.elem(i).clone()).collect())
    }

    pub fn inverse(&self) -> Result<FinFun> {
        if !self.is_bijective() {
            return Err(Error::Precondition("only bijections invert".into()));
        }
        let mut map = vec![0; self.cod.len()];
        for (i, &j) in self.map.iter().enumerate() {
            map[j] = i;
        }
        Ok(FinFun { dom: self.cod.clone(), cod: self.dom.clone(), map })
    }

    /// Restricts to given subsets of domain and codomain, checking that all
    /// images land where claimed.
    pub fn restrict(&self, sub_dom: &FinSet, sub_cod: &FinSet) -> Result<FinFun> {
        FinFun::from_fn(sub_dom.clone(), sub_cod.clone(), |e| self.apply(e))
    }
}

impl fmt::Display for FinFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (src, img)) in self.graph().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{src}->{img}")?;
        }
        write!(f, "}}")
    }
}

/// Factors `f` as a surjection onto its image followed by the inclusion.
pub fn image_factorize(f: &FinFun) -> (FinFun, FinFun) {
    let img = f.image();
    let epi = f.restrict(f.dom(), &img).expect("image computed from f");
    let mono = FinFun::inclusion(&img, f.cod()).expect("image inside codomain");
    (epi, mono)
}

/// `{ x in dom(f) | f(x) in sub }`, canonically ordered. The induced square
/// with the two inclusions is a pullback.
pub fn inverse_image(f: &FinFun, sub: &FinSet) -> Result<FinSet> {
    if !sub.is_subset_of(f.cod()) {
        return Err(Error::Precondition(
            "inverse image requires a subset of the codomain".into(),
        ));
    }
    Ok(FinSet::new(
        f.graph()
            .filter(|(_, img)| sub.contains(img))
            .map(|(src, _)| src.clone())
            .collect(),
    ))
}

/// All total maps from `dom` to `cod` (|cod|^|dom| of them).
pub fn all_functions(dom: &FinSet, cod: &FinSet) -> Vec<FinFun> {
    let n = dom.len();
    let k = cod.len();
    if n == 0 {
        return vec![FinFun { dom: dom.clone(), cod: cod.clone(), map: vec![] }];
    }
    if k == 0 {
        return vec![];
    }
    let total = k.checked_pow(n as u32).expect("function space too large");
    assert!(total <= 1 << 22, "function enumeration too large");
    let mut out = Vec::with_capacity(total);
    let mut counter = vec![0usize; n];
    loop {
        out.push(FinFun { dom: dom.clone(), cod: cod.clone(), map: counter.clone() });
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            counter[i] += 1;
            if counter[i] < k {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
    }
}

/// All injections from the canonical `n`-element set into `target`.
/// There are |X|(|X|-1)...(|X|-n+1) of them.
pub fn enumerate_monos(n: usize, target: &FinSet) -> Vec<FinFun> {
    let dom = FinSet::atoms(n);
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    fn rec(
        n: usize,
        target_len: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if chosen.len() == n {
            out.push(chosen.clone());
            return;
        }
        for i in 0..target_len {
            if !chosen.contains(&i) {
                chosen.push(i);
                rec(n, target_len, chosen, out);
                chosen.pop();
            }
        }
    }
    let mut maps = Vec::new();
    rec(n, target.len(), &mut chosen, &mut maps);
    for map in maps {
        out.push(FinFun { dom: dom.clone(), cod: target.clone(), map });
    }
    out
}

/// All surjections from the canonical `m`-element set onto the canonical
/// `n`-element set. There are n! * Stirling2(m, n) of them.
pub fn enumerate_surjections(m: usize, n: usize) -> Vec<FinFun> {
    let dom = FinSet::atoms(m);
    let cod = FinSet::atoms(n);
    all_functions(&dom, &cod)
        .into_iter()
        .filter(FinFun::is_surjective)
        .collect()
}

/// The least element of the form `*`, `*:*`, `*:*:*`, ... not occurring in
/// `x`. Adjoining it is how the successor and all pointed differences add
/// fresh points without ever colliding with existing structure.
pub fn fresh_point(x: &FinSet) -> Element {
    let mut p = Element::Star;
    while x.contains(&p) {
        p = Element::tag("*", p);
    }
    p
}

/// Adjoins `n` fresh points to `x` in sequence. Returns the extended set and
/// the points in the order they were added. Extending by `a` and then by `b`
/// points yields literally the same set (and points) as extending by `a + b`
/// at once, which is what makes iterated differences element-identical to
/// multi-pointed ones.
pub fn pointer_extension(x: &FinSet, n: usize) -> (FinSet, Vec<Element>) {
    let mut cur = x.clone();
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let p = fresh_point(&cur);
        cur = cur.insert(p.clone());
        points.push(p);
    }
    (cur, points)
}

/// Stirling numbers of the second kind, used as an independent oracle for
/// surjection counts.
pub fn stirling2(m: usize, n: usize) -> u64 {
    if n == 0 {
        return if m == 0 { 1 } else { 0 };
    }
    if n > m {
        return 0;
    }
    let mut row = vec![0u64; n + 1];
    row[0] = 1; // S(0, 0)
    for _i in 1..=m {
        let mut next = vec![0u64; n + 1];
        for j in 1..=n {
            next[j] = j as u64 * row[j] + row[j - 1];
        }
        row = next;
    }
    row[n]
}
