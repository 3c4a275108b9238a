//! Finite sup-lattices: chains, products, the `n_*` lattices assigned to
//! positive integers, down-sets, and isomorphism search via
//! join-irreducibles.

use std::collections::BTreeMap;

use crate::element::Element;
use crate::error::{Error, Result};
use crate::finset::FinSet;
use crate::report::Report;

/// A finite lattice with all joins (a finite sup-lattice): carrier, order
/// relation, join table, bottom and top. Constructed from the order; the
/// join of every pair must exist.
#[derive(Clone, Debug)]
pub struct Lattice {
    name: String,
    carrier: FinSet,
    leq: Vec<Vec<bool>>,
    join: Vec<Vec<usize>>,
    bottom: usize,
    top: usize,
}

impl Lattice {
    pub fn from_leq(name: impl Into<String>, carrier: FinSet, leq: Vec<Vec<bool>>) -> Result<Self> {
        let n = carrier.len();
        if n == 0 {
            return Err(Error::InvalidSpec("a sup-lattice has a bottom; empty carrier".into()));
        }
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSpec("order table shape".into()));
        }
        // partial order laws
        for i in 0..n {
            if !leq[i][i] {
                return Err(Error::InvalidSpec("order not reflexive".into()));
            }
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(Error::InvalidSpec("order not antisymmetric".into()));
                }
                for k in 0..n {
                    if leq[i][j] && leq[j][k] && !leq[i][k] {
                        return Err(Error::InvalidSpec("order not transitive".into()));
                    }
                }
            }
        }
        // binary joins
        let mut join = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let ubs: Vec<usize> =
                    (0..n).filter(|&k| leq[i][k] && leq[j][k]).collect();
                let least = ubs
                    .iter()
                    .copied()
                    .find(|&k| ubs.iter().all(|&u| leq[k][u]));
                match least {
                    Some(k) => join[i][j] = k,
                    None => {
                        return Err(Error::InvalidSpec(format!(
                            "join of {} and {} does not exist",
                            carrier.elem(i),
                            carrier.elem(j)
                        )))
                    }
                }
            }
        }
        let bottom = (0..n)
            .find(|&b| (0..n).all(|k| leq[b][k]))
            .ok_or_else(|| Error::InvalidSpec("no bottom element".into()))?;
        let top = (0..n)
            .find(|&t| (0..n).all(|k| leq[k][t]))
            .ok_or_else(|| Error::InvalidSpec("no top element".into()))?;
        Ok(Lattice { name: name.into(), carrier, leq, join, bottom, top })
    }

    /// The `n`-element chain on atoms `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Result<Self> {
        let carrier = FinSet::atoms(n);
        let leq = (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect();
        Lattice::from_leq(format!("chain{n}"), carrier, leq)
    }

    /// Componentwise product; carrier elements are tuples even for a single
    /// factor, so regrouping between products stays uniform.
    pub fn product(name: impl Into<String>, factors: &[Lattice]) -> Result<Self> {
        let sets: Vec<FinSet> = factors.iter().map(|l| l.carrier.clone()).collect();
        let carrier = FinSet::tuples(&sets);
        let n = carrier.len();
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                let a = carrier.elem(i).expect_tuple();
                let b = carrier.elem(j).expect_tuple();
                leq[i][j] = factors.iter().enumerate().all(|(k, l)| {
                    l.leq_elems(&a[k], &b[k])
                })
            }
        }
        Lattice::from_leq(name, carrier, leq)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn carrier(&self) -> &FinSet {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bottom(&self) -> &Element {
        self.carrier.elem(self.bottom)
    }

    pub fn top(&self) -> &Element {
        self.carrier.elem(self.top)
    }

    pub fn leq_idx(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn leq_elems(&self, a: &Element, b: &Element) -> bool {
        let i = self.carrier.index_of(a).expect("lattice element");
        let j = self.carrier.index_of(b).expect("lattice element");
        self.leq[i][j]
    }

    pub fn join_idx(&self, i: usize, j: usize) -> usize {
        self.join[i][j]
    }

    pub fn join_elems(&self, a: &Element, b: &Element) -> Element {
        let i = self.carrier.index_of(a).expect("lattice element");
        let j = self.carrier.index_of(b).expect("lattice element");
        self.carrier.elem(self.join[i][j]).clone()
    }

    /// Join of arbitrarily many elements; the empty join is bottom.
    pub fn sup<'a>(&self, items: impl IntoIterator<Item = &'a Element>) -> Element {
        let mut acc = self.bottom;
        for e in items {
            let i = self.carrier.index_of(e).expect("lattice element");
            acc = self.join[acc][i];
        }
        self.carrier.elem(acc).clone()
    }

    /// The down-set of `l` as a sub-sup-lattice (carrier keeps the ambient
    /// element encoding; joins are inherited).
    pub fn down_set(&self, l: &Element) -> Lattice {
        let li = self.carrier.index_of(l).expect("lattice element");
        let carrier = FinSet::new(
            (0..self.len())
                .filter(|&k| self.leq[k][li])
                .map(|k| self.carrier.elem(k).clone())
                .collect(),
        );
        let n = carrier.len();
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                leq[i][j] = self.leq_elems(carrier.elem(i), carrier.elem(j));
            }
        }
        Lattice::from_leq(format!("{}[<={}]", self.name, l), carrier, leq)
            .expect("down-set inherits lattice structure")
    }

    /// Elements strictly above bottom.
    pub fn strictly_positive(&self) -> FinSet {
        FinSet::new(
            (0..self.len())
                .filter(|&k| k != self.bottom)
                .map(|k| self.carrier.elem(k).clone())
                .collect(),
        )
    }

    /// Join-irreducible elements: non-bottom elements that are not the join
    /// of two strictly smaller elements.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&k| {
                k != self.bottom
                    && !(0..self.len()).any(|i| {
                        (0..self.len()).any(|j| {
                            i != k && j != k && self.join[i][j] == k
                        })
                    })
            })
            .collect()
    }

    /// All lattice isomorphisms onto `other`, found by extending
    /// order-isomorphisms of the join-irreducible posets by joins. Any
    /// lattice iso restricts to such an order-iso and is recovered by the
    /// join extension, so the search is complete.
    pub fn isomorphisms(&self, other: &Lattice) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if self.len() != other.len() {
            return out;
        }
        let ji_a = self.join_irreducibles();
        let ji_b = other.join_irreducibles();
        if ji_a.len() != ji_b.len() {
            return out;
        }
        let mut assignment: Vec<Option<usize>> = vec![None; ji_a.len()];
        let mut used = vec![false; ji_b.len()];
        self.search_ji(other, &ji_a, &ji_b, 0, &mut assignment, &mut used, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn search_ji(
        &self,
        other: &Lattice,
        ji_a: &[usize],
        ji_b: &[usize],
        pos: usize,
        assignment: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if pos == ji_a.len() {
            if let Some(full) = self.extend_by_joins(other, ji_a, ji_b, assignment) {
                out.push(full);
            }
            return;
        }
        for cand in 0..ji_b.len() {
            if used[cand] {
                continue;
            }
            // order-compatibility with earlier choices
            let ok = (0..pos).all(|prev| {
                let (a1, a2) = (ji_a[prev], ji_a[pos]);
                let (b1, b2) = (ji_b[assignment[prev].unwrap()], ji_b[cand]);
                self.leq[a1][a2] == other.leq[b1][b2] && self.leq[a2][a1] == other.leq[b2][b1]
            });
            if !ok {
                continue;
            }
            assignment[pos] = Some(cand);
            used[cand] = true;
            self.search_ji(other, ji_a, ji_b, pos + 1, assignment, used, out);
            assignment[pos] = None;
            used[cand] = false;
        }
    }

    fn extend_by_joins(
        &self,
        other: &Lattice,
        ji_a: &[usize],
        ji_b: &[usize],
        assignment: &[Option<usize>],
    ) -> Option<Vec<usize>> {
        let mut full = vec![usize::MAX; self.len()];
        for a in 0..self.len() {
            let mut acc = other.bottom;
            for (pos, &j) in ji_a.iter().enumerate() {
                if self.leq[j][a] {
                    acc = other.join[acc][ji_b[assignment[pos].unwrap()]];
                }
            }
            full[a] = acc;
        }
        // must be a bijection preserving order both ways
        let mut seen = vec![false; other.len()];
        for &v in &full {
            if seen[v] {
                return None;
            }
            seen[v] = true;
        }
        for i in 0..self.len() {
            for j in 0..self.len() {
                if self.leq[i][j] != other.leq[full[i]][full[j]] {
                    return None;
                }
                if other.join[full[i]][full[j]] != full[self.join[i][j]] {
                    return None;
                }
            }
        }
        Some(full)
    }

    pub fn is_isomorphic_to(&self, other: &Lattice) -> bool {
        !self.isomorphisms(other).is_empty()
    }
}

const PRIMES: [u64; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

/// Number of primes up to and including `p`.
fn prime_index(p: u64) -> usize {
    PRIMES.iter().position(|&q| q == p).expect("prime in table") + 1
}

pub fn factorize(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for &p in &PRIMES {
        while n % p == 0 {
            out.push(p);
            n /= p;
        }
    }
    assert_eq!(n, 1, "prime factor out of table range");
    out
}

/// The sup-lattice `n_*`: the product, prime factors taken in increasing
/// order with multiplicity, of the chains `p_*` (the chain of primes up to
/// `p`, of length pi(p) + 1). Carrier elements are always tuples, so
/// `r_* x s_*` regroups into `(rs)_*` componentwise.
pub fn n_star(n: u64) -> Result<Lattice> {
    if n == 0 {
        return Err(Error::Precondition("n_* requires n >= 1".into()));
    }
    let factors: Vec<Lattice> = factorize(n)
        .into_iter()
        .map(|p| Lattice::chain(prime_index(p) + 1))
        .collect::<Result<_>>()?;
    Lattice::product(format!("{n}_*"), &factors)
}

/// Checks on every multiset of chain factors (each factor >= 2) with
/// product at most `max_size` that isomorphic products have equal factor
/// multisets.
pub fn lattice_iso_unique_factorization(max_size: usize) -> Result<Report> {
    let mut report = Report::new("unique-factorization").with_param("max_size", max_size);
    // enumerate multisets of integers >= 2 with product <= max_size
    let mut multisets: Vec<Vec<usize>> = Vec::new();
    fn rec(min: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for f in min..=left {
            cur.push(f);
            rec(f, left / f, cur, out);
            cur.pop();
        }
    }
    rec(2, max_size, &mut Vec::new(), &mut multisets);
    let lattices: Vec<(Vec<usize>, Lattice)> = multisets
        .iter()
        .map(|ms| {
            let factors: Vec<Lattice> =
                ms.iter().map(|&k| Lattice::chain(k).unwrap()).collect();
            (ms.clone(), Lattice::product(format!("{ms:?}"), &factors).unwrap())
        })
        .collect();
    for (i, (ms_a, a)) in lattices.iter().enumerate() {
        for (ms_b, b) in lattices.iter().skip(i + 1) {
            report.record_case();
            let iso = a.is_isomorphic_to(b);
            let same = ms_a == ms_b;
            if iso != same {
                report.fail(
                    format!("{ms_a:?} vs {ms_b:?}"),
                    format!("isomorphic = {iso} but multiset-equal = {same}"),
                );
            }
        }
    }
    Ok(report)
}

/// Parses `{"elems": [...], "leq": [[bool,...],...]}`-style data that has
/// already been decoded into counts and a relation. Elements are atoms.
pub fn lattice_from_table(name: &str, size: usize, leq: Vec<Vec<bool>>) -> Result<Lattice> {
    Lattice::from_leq(name, FinSet::atoms(size), leq)
}

/// The small library of lattices of size <= 4 used for exhaustive
/// transformation-representation checks: chains 1..4 and the diamond 2x2.
pub fn small_lattice_library() -> Vec<Lattice> {
    let mut out: Vec<Lattice> = (1..=4).map(|n| Lattice::chain(n).unwrap()).collect();
    let two = Lattice::chain(2).unwrap();
    out.push(Lattice::product("2x2", &[two.clone(), two]).unwrap());
    out
}

/// Multiset of chain lengths recoverable from a product-of-chains lattice;
/// used in tests as an independent invariant.
pub fn chain_factor_profile(l: &Lattice) -> BTreeMap<usize, usize> {
    let mut profile = BTreeMap::new();
    for ji in l.join_irreducibles() {
        // in a product of chains, each join-irreducible sits in exactly one
        // coordinate; its height determines the chain position
        let height = (0..l.len())
            .filter(|&k| l.leq_idx(k, ji))
            .count();
        *profile.entry(height).or_insert(0) += 1;
    }
    profile
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_joins() {
        let c = Lattice::chain(3).unwrap();
        assert_eq!(c.bottom(), &Element::atom(0));
        assert_eq!(c.top(), &Element::atom(2));
        assert_eq!(c.join_elems(&Element::atom(1), &Element::atom(2)), Element::atom(2));
        assert_eq!(c.sup([].iter().copied()), Element::atom(0));
    }

    #[test]
    fn n_star_shapes() {
        assert_eq!(n_star(1).unwrap().len(), 1);
        assert_eq!(n_star(2).unwrap().len(), 2);
        assert_eq!(n_star(3).unwrap().len(), 3);
        assert_eq!(n_star(5).unwrap().len(), 4);
        assert_eq!(n_star(6).unwrap().len(), 6);
        assert_eq!(n_star(12).unwrap().len(), 12);
        assert!(n_star(0).is_err());
    }

    #[test]
    fn six_star_is_product_of_two_and_three_star() {
        let six = n_star(6).unwrap();
        let prod = Lattice::product(
            "2x3",
            &[Lattice::chain(2).unwrap(), Lattice::chain(3).unwrap()],
        )
        .unwrap();
        assert!(six.is_isomorphic_to(&prod));
    }

    #[test]
    fn down_sets_of_chain() {
        let c = Lattice::chain(4).unwrap();
        for k in 0..4 {
            let d = c.down_set(&Element::atom(k));
            assert_eq!(d.len(), k as usize + 1);
            assert_eq!(d.top(), &Element::atom(k));
        }
    }

    #[test]
    fn iso_search_distinguishes_products() {
        let two = Lattice::chain(2).unwrap();
        let diamond = Lattice::product("2x2", &[two.clone(), two.clone()]).unwrap();
        let four = Lattice::chain(4).unwrap();
        assert!(!diamond.is_isomorphic_to(&four));
        let p23 = Lattice::product("2x3", &[two.clone(), Lattice::chain(3).unwrap()]).unwrap();
        let p32 = Lattice::product("3x2", &[Lattice::chain(3).unwrap(), two]).unwrap();
        assert!(p23.is_isomorphic_to(&p32));
        assert!(!p23.is_isomorphic_to(&diamond));
    }

    #[test]
    fn unique_factorization_up_to_36() {
        let r = lattice_iso_unique_factorization(36).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.cases > 100);
    }
}
