//! Permutation groups on `{0..n-1}` and their actions on finite sets,
//! with naive enumeration of orbits, stabilizers and subgroups.

use std::collections::{BTreeSet, HashSet};

use crate::element::Element;
use crate::error::{Error, Result};
use crate::finset::FinSet;

pub type Perm = Vec<usize>;

/// Practical ceiling for full group enumeration (8! = 40320 elements).
pub const MAX_DEGREE: usize = 8;
/// Full subgroup enumeration is only offered up to this degree.
pub const MAX_SUBGROUP_DEGREE: usize = 5;

pub fn perm_identity(n: usize) -> Perm {
    (0..n).collect()
}

/// `(g . h)(i) = g[h[i]]`.
pub fn perm_compose(g: &Perm, h: &Perm) -> Perm {
    h.iter().map(|&i| g[i]).collect()
}

pub fn perm_inverse(p: &Perm) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

pub fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur = perm_identity(n);
    fn heap(k: usize, cur: &mut Perm, out: &mut Vec<Perm>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            if k % 2 == 0 {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    heap(n, &mut cur, &mut out);
    out.sort();
    out.dedup();
    out
}

fn is_permutation(p: &Perm, n: usize) -> bool {
    p.len() == n && {
        let seen: HashSet<usize> = p.iter().copied().collect();
        seen.len() == n && p.iter().all(|&i| i < n)
    }
}

/// A subgroup of the symmetric group on `{0..degree-1}`, stored with its
/// full element list (breadth-first closure of the generators).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
}

impl PermGroup {
    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            generators: vec![],
            elements: vec![perm_identity(degree)],
        }
    }

    pub fn symmetric(degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::DegreeBound { degree, bound: MAX_DEGREE });
        }
        let mut generators = Vec::new();
        if degree >= 2 {
            let mut t = perm_identity(degree);
            t.swap(0, 1);
            generators.push(t);
            let cycle: Perm = (0..degree).map(|i| (i + 1) % degree).collect();
            generators.push(cycle);
        }
        Ok(PermGroup {
            degree,
            generators,
            elements: all_perms(degree),
        })
    }

    pub fn cyclic(degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::DegreeBound { degree, bound: MAX_DEGREE });
        }
        if degree == 0 {
            return Ok(PermGroup::trivial(0));
        }
        let cycle: Perm = (0..degree).map(|i| (i + 1) % degree).collect();
        PermGroup::from_generators(degree, vec![cycle])
    }

    pub fn from_generators(degree: usize, generators: Vec<Perm>) -> Result<Self> {
        Self::from_generators_bounded(degree, generators, MAX_DEGREE)
    }

    /// Breadth-first closure with an explicit degree ceiling, for callers
    /// that accept the cost beyond the default bound.
    pub fn from_generators_bounded(
        degree: usize,
        generators: Vec<Perm>,
        max_degree: usize,
    ) -> Result<Self> {
        if degree > max_degree {
            return Err(Error::DegreeBound { degree, bound: max_degree });
        }
        for g in &generators {
            if !is_permutation(g, degree) {
                return Err(Error::InvalidSpec(format!(
                    "{g:?} is not a permutation of 0..{degree}"
                )));
            }
        }
        let mut elements: BTreeSet<Perm> = BTreeSet::new();
        elements.insert(perm_identity(degree));
        let mut frontier: Vec<Perm> = vec![perm_identity(degree)];
        while let Some(p) = frontier.pop() {
            for g in &generators {
                let q = perm_compose(g, &p);
                if elements.insert(q.clone()) {
                    frontier.push(q);
                }
            }
        }
        Ok(PermGroup {
            degree,
            generators,
            elements: elements.into_iter().collect(),
        })
    }

    /// Builds a group from an explicit element list, validating closure.
    pub fn from_elements(degree: usize, elements: Vec<Perm>) -> Result<Self> {
        let mut sorted = elements;
        sorted.sort();
        sorted.dedup();
        let set: BTreeSet<Perm> = sorted.iter().cloned().collect();
        if !set.contains(&perm_identity(degree)) {
            return Err(Error::InvalidSpec("identity missing".into()));
        }
        for p in &sorted {
            if !is_permutation(p, degree) {
                return Err(Error::InvalidSpec(format!("{p:?} is not a permutation")));
            }
            if !set.contains(&perm_inverse(p)) {
                return Err(Error::InvalidSpec("not closed under inverses".into()));
            }
            for q in &sorted {
                if !set.contains(&perm_compose(p, q)) {
                    return Err(Error::InvalidSpec("not closed under composition".into()));
                }
            }
        }
        Ok(PermGroup { degree, generators: sorted.clone(), elements: sorted })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.elements.binary_search(p).ok()
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.elements.iter().all(|p| other.contains(p))
    }

    /// Every subgroup, by incremental closure. Exponential; capped at
    /// degree 5.
    pub fn all_subgroups(&self) -> Result<Vec<PermGroup>> {
        if self.degree > MAX_SUBGROUP_DEGREE {
            return Err(Error::DegreeBound {
                degree: self.degree,
                bound: MAX_SUBGROUP_DEGREE,
            });
        }
        let mut found: BTreeSet<Vec<Perm>> = BTreeSet::new();
        let trivial = PermGroup::trivial(self.degree);
        found.insert(trivial.elements.clone());
        let mut frontier = vec![trivial.elements.clone()];
        while let Some(sub) = frontier.pop() {
            for g in &self.elements {
                if sub.binary_search(g).is_ok() {
                    continue;
                }
                let mut gens: Vec<Perm> = sub.clone();
                gens.push(g.clone());
                let closed = PermGroup::from_generators(self.degree, gens)?;
                if closed.elements.iter().all(|p| self.contains(p))
                    && found.insert(closed.elements.clone())
                {
                    frontier.push(closed.elements.clone());
                }
            }
        }
        found
            .into_iter()
            .map(|els| PermGroup::from_elements(self.degree, els))
            .collect()
    }
}

/// A left action of a [`PermGroup`] on a finite carrier, tabulated at
/// construction and validated against the action axioms.
#[derive(Clone, Debug)]
pub struct GroupAction {
    group: PermGroup,
    carrier: FinSet,
    table: Vec<Vec<usize>>, // table[group element idx][carrier idx]
}

impl GroupAction {
    pub fn new(
        group: PermGroup,
        carrier: FinSet,
        act: impl Fn(&Perm, &Element) -> Element,
    ) -> Result<Self> {
        let mut table = Vec::with_capacity(group.order());
        for g in group.elements() {
            let mut row = Vec::with_capacity(carrier.len());
            for e in carrier.iter() {
                let img = act(g, e);
                let i = carrier.index_of(&img).ok_or_else(|| {
                    Error::InvalidSpec(format!("action image {img} leaves the carrier"))
                })?;
                row.push(i);
            }
            table.push(row);
        }
        let action = GroupAction { group, carrier, table };
        action.validate()?;
        Ok(action)
    }

    fn validate(&self) -> Result<()> {
        let id_idx = self
            .group
            .index_of(&perm_identity(self.group.degree()))
            .expect("identity in group");
        for (xi, &img) in self.table[id_idx].iter().enumerate() {
            if img != xi {
                return Err(Error::InvalidSpec("identity does not act trivially".into()));
            }
        }
        // act(g h, x) = act(g, act(h, x)); checking generators against all
        // elements suffices by induction on word length.
        for g in self.group.generators() {
            let gi = self.group.index_of(g).expect("generator in closure");
            for (hi, h) in self.group.elements().iter().enumerate() {
                let gh = perm_compose(g, h);
                let ghi = self.group.index_of(&gh).expect("closure");
                for xi in 0..self.carrier.len() {
                    if self.table[ghi][xi] != self.table[gi][self.table[hi][xi]] {
                        return Err(Error::InvalidSpec(
                            "action does not respect composition".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn carrier(&self) -> &FinSet {
        &self.carrier
    }

    pub fn act_idx(&self, gi: usize, xi: usize) -> usize {
        self.table[gi][xi]
    }

    pub fn act(&self, g: &Perm, e: &Element) -> Element {
        let gi = self.group.index_of(g).expect("group element");
        let xi = self.carrier.index_of(e).expect("carrier element");
        self.carrier.elem(self.table[gi][xi]).clone()
    }

    /// The minimum of the orbit of `e`; idempotent by construction.
    pub fn orbit_min(&self, e: &Element) -> Element {
        let xi = self.carrier.index_of(e).expect("carrier element");
        let best = (0..self.group.order())
            .map(|gi| self.table[gi][xi])
            .min()
            .expect("group nonempty");
        self.carrier.elem(best).clone()
    }

    /// Orbit partition, sorted by (minimal) representative.
    pub fn orbits(&self) -> Vec<(Element, FinSet)> {
        let n = self.carrier.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for xi in 0..n {
            if seen[xi] {
                continue;
            }
            let mut orbit: BTreeSet<usize> = BTreeSet::new();
            for gi in 0..self.group.order() {
                orbit.insert(self.table[gi][xi]);
            }
            for &o in &orbit {
                seen[o] = true;
            }
            let rep = self.carrier.elem(*orbit.iter().next().unwrap()).clone();
            let set = FinSet::new(orbit.iter().map(|&o| self.carrier.elem(o).clone()).collect());
            out.push((rep, set));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// The subgroup fixing `x`. Orbit-stabilizer is asserted on the way out.
    pub fn stabilizer(&self, x: &Element) -> Result<PermGroup> {
        let xi = self
            .carrier
            .index_of(x)
            .ok_or_else(|| Error::Precondition(format!("{x} not in the carrier")))?;
        let fixing: Vec<Perm> = self
            .group
            .elements()
            .iter()
            .enumerate()
            .filter(|(gi, _)| self.table[*gi][xi] == xi)
            .map(|(_, g)| g.clone())
            .collect();
        let stab = PermGroup::from_elements(self.group.degree(), fixing)?;
        let orbit_len = (0..self.group.order())
            .map(|gi| self.table[gi][xi])
            .collect::<BTreeSet<_>>()
            .len();
        assert_eq!(
            orbit_len * stab.order(),
            self.group.order(),
            "orbit-stabilizer violated"
        );
        Ok(stab)
    }
}

/// The standard action of a permutation on positions of a tuple:
/// `(t . g)[i] = t[g[i]]`.
pub fn permute_tuple(t: &[Element], g: &Perm) -> Vec<Element> {
    g.iter().map(|&i| t[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_group_orders() {
        for n in 0..=4 {
            let g = PermGroup::symmetric(n).unwrap();
            let fact: usize = (1..=n).product::<usize>().max(1);
            assert_eq!(g.order(), fact);
        }
        assert!(PermGroup::symmetric(9).is_err());
    }

    #[test]
    fn closure_divides_factorial() {
        let g = PermGroup::from_generators(4, vec![vec![1, 0, 3, 2]]).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(24 % g.order(), 0);
    }

    #[test]
    fn orbits_of_swap_on_pairs() {
        // S2 acting on pairs over {a, b}: three orbits.
        let base = FinSet::atoms(2);
        let pairs = FinSet::tuples(&[base.clone(), base]);
        let s2 = PermGroup::symmetric(2).unwrap();
        let action = GroupAction::new(s2, pairs, |g, e| {
            Element::Tuple(permute_tuple(e.expect_tuple(), g))
        })
        .unwrap();
        let orbits = action.orbits();
        assert_eq!(orbits.len(), 3);
        let sizes: Vec<usize> = orbits.iter().map(|(_, o)| o.len()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 4);
    }

    #[test]
    fn trivial_group_gives_singleton_orbits() {
        let carrier = FinSet::atoms(3);
        let action =
            GroupAction::new(PermGroup::trivial(2), carrier.clone(), |_, e| e.clone()).unwrap();
        assert_eq!(action.orbits().len(), 3);
    }

    #[test]
    fn full_group_on_singleton_carrier() {
        let carrier = FinSet::atoms(1);
        let s3 = PermGroup::symmetric(3).unwrap();
        let action = GroupAction::new(s3, carrier, |_, e| e.clone()).unwrap();
        assert_eq!(action.orbits().len(), 1);
    }

    #[test]
    fn stabilizers_on_subsets_of_two() {
        // S2 on subsets of {0,1}: stab({0}) trivial, stab(empty) = S2.
        let subs = FinSet::atoms(2).subsets();
        let carrier = FinSet::new(
            subs.iter()
                .map(|s| Element::Tuple(s.iter().cloned().collect()))
                .collect(),
        );
        let s2 = PermGroup::symmetric(2).unwrap();
        let action = GroupAction::new(s2, carrier, |g, e| {
            let items: Vec<Element> = e
                .expect_tuple()
                .iter()
                .map(|a| match a {
                    Element::Atom(i) => Element::atom(g[*i as usize] as u32),
                    _ => unreachable!(),
                })
                .collect();
            let s = FinSet::new(items);
            Element::Tuple(s.iter().cloned().collect())
        })
        .unwrap();
        let single = Element::Tuple(vec![Element::atom(0)]);
        assert_eq!(action.stabilizer(&single).unwrap().order(), 1);
        let empty = Element::Tuple(vec![]);
        assert_eq!(action.stabilizer(&empty).unwrap().order(), 2);
    }

    #[test]
    fn point_stabilizer_in_s3() {
        let carrier = FinSet::atoms(3);
        let s3 = PermGroup::symmetric(3).unwrap();
        let action = GroupAction::new(s3, carrier, |g, e| match e {
            Element::Atom(i) => Element::atom(g[*i as usize] as u32),
            _ => unreachable!(),
        })
        .unwrap();
        let stab = action.stabilizer(&Element::atom(0)).unwrap();
        assert_eq!(stab.order(), 2);
    }

    #[test]
    fn subgroup_enumeration_of_s3() {
        let s3 = PermGroup::symmetric(3).unwrap();
        let subs = s3.all_subgroups().unwrap();
        // trivial, three transpositions, A3, S3
        assert_eq!(subs.len(), 6);
        for s in &subs {
            assert_eq!(6 % s.order(), 0);
        }
    }
}
