//! Finite species and their analytic functors, built as coends
//! `sum_n X^n (x)_{S_n} C_n` with explicit orbit canonicalization.

use crate::element::Element;
use crate::error::{Error, Result};
use crate::finset::{FinFun, FinSet};
use crate::functor::Endofunctor;
use crate::group::{perm_inverse, permute_tuple, GroupAction, Perm, PermGroup};

/// A species truncated at degree `N`: one left `S_n`-set per degree.
#[derive(Clone, Debug)]
pub struct SpeciesSpec {
    pub coeff: Vec<GroupAction>, // coeff[n] is an S_n-action
}

impl SpeciesSpec {
    pub fn new(coeff: Vec<GroupAction>) -> Result<Self> {
        for (n, action) in coeff.iter().enumerate() {
            if action.group().degree() != n
                || action.group().order() != PermGroup::symmetric(n)?.order()
            {
                return Err(Error::InvalidSpec(format!(
                    "coefficient {n} must carry a full S_{n} action"
                )));
            }
        }
        Ok(SpeciesSpec { coeff })
    }

    pub fn degree_bound(&self) -> usize {
        self.coeff.len().saturating_sub(1)
    }

    /// The species of `X^n`: the free coefficient `C_n = S_n` acting on
    /// itself by left multiplication, all other degrees empty.
    pub fn free_at(n: usize) -> Result<Self> {
        let mut coeff = Vec::new();
        for k in 0..=n {
            let sk = PermGroup::symmetric(k)?;
            if k < n {
                coeff.push(GroupAction::new(sk, FinSet::empty(), |_, e| e.clone())?);
            } else {
                let carrier = FinSet::new(
                    sk.elements()
                        .iter()
                        .map(|p| perm_element(p))
                        .collect(),
                );
                coeff.push(GroupAction::new(sk.clone(), carrier, move |g, e| {
                    let p = element_perm(e);
                    perm_element(&crate::group::perm_compose(g, &p))
                })?);
            }
        }
        SpeciesSpec::new(coeff)
    }

    /// The species of `X^n / G`: cosets `S_n/G` with left multiplication,
    /// all other degrees empty. `G = S_n` gives the divided power.
    pub fn cosets_at(n: usize, sub: &PermGroup) -> Result<Self> {
        let sn = PermGroup::symmetric(n)?;
        if !sub.is_subgroup_of(&sn) {
            return Err(Error::InvalidSpec("not a subgroup of S_n".into()));
        }
        let mut coeff = Vec::new();
        for k in 0..n {
            let sk = PermGroup::symmetric(k)?;
            coeff.push(GroupAction::new(sk, FinSet::empty(), |_, e| e.clone())?);
        }
        // coset of sigma: minimal element of sigma G
        let subc = sub.clone();
        let coset_min = move |p: &Perm| -> Element {
            perm_element(
                &subc
                    .elements()
                    .iter()
                    .map(|g| crate::group::perm_compose(p, g))
                    .min()
                    .unwrap(),
            )
        };
        let carrier = FinSet::new(sn.elements().iter().map(&coset_min).collect());
        let cm = coset_min.clone();
        coeff.push(GroupAction::new(sn.clone(), carrier, move |g, e| {
            let p = element_perm(e);
            cm(&crate::group::perm_compose(g, &p))
        })?);
        SpeciesSpec::new(coeff)
    }
}

pub fn perm_element(p: &Perm) -> Element {
    Element::Tuple(p.iter().map(|&i| Element::atom(i as u32)).collect())
}

fn element_perm(e: &Element) -> Perm {
    e.expect_tuple()
        .iter()
        .map(|a| match a {
            Element::Atom(i) => *i as usize,
            _ => unreachable!("permutation atoms"),
        })
        .collect()
}

/// Canonical representative of the orbit of the pair `(tuple, c)` under the
/// diagonal right action `(t, c) . sigma = (t . sigma, sigma^{-1} c)`.
pub fn pair_orbit_min(t: &[Element], c: &Element, action: &GroupAction) -> Element {
    let group = action.group();
    group
        .elements()
        .iter()
        .map(|sigma| {
            let ts = permute_tuple(t, sigma);
            let cs = action.act(&perm_inverse(sigma), c);
            Element::Tuple(vec![Element::Tuple(ts), cs])
        })
        .min()
        .expect("group nonempty")
}

/// The analytic functor of a species: elements of degree `n` are `Cls` of
/// the minimal `(tuple, coefficient)` pair under the diagonal `S_n` action,
/// tagged by the degree. Arrow maps act componentwise on the tuple and
/// re-canonicalize.
pub fn analytic_functor(spec: &SpeciesSpec) -> Endofunctor {
    let name = format!("analytic(N={})", spec.degree_bound());
    let coeff = spec.coeff.clone();
    let coeff2 = spec.coeff.clone();
    let obj = move |x: &FinSet| {
        let mut elems = Vec::new();
        for (n, action) in coeff.iter().enumerate() {
            let label = n.to_string();
            for t in FinSet::tuples(&vec![x.clone(); n]).iter() {
                for c in action.carrier().iter() {
                    elems.push(Element::tag(
                        &label,
                        Element::cls(pair_orbit_min(t.expect_tuple(), c, action)),
                    ));
                }
            }
        }
        FinSet::new(elems)
    };
    let obj2 = {
        let coeff = coeff2.clone();
        move |x: &FinSet| {
            let mut elems = Vec::new();
            for (n, action) in coeff.iter().enumerate() {
                let label = n.to_string();
                for t in FinSet::tuples(&vec![x.clone(); n]).iter() {
                    for c in action.carrier().iter() {
                        elems.push(Element::tag(
                            &label,
                            Element::cls(pair_orbit_min(t.expect_tuple(), c, action)),
                        ));
                    }
                }
            }
            FinSet::new(elems)
        }
    };
    Endofunctor::new(name, obj, move |f| {
        FinFun::from_fn(obj2(f.dom()), obj2(f.cod()), |el| {
            let (label, cls) = el.expect_tag();
            let n: usize = label.parse().unwrap();
            let pair = cls.expect_cls().expect_tuple();
            let t: Vec<Element> =
                pair[0].expect_tuple().iter().map(|c| f.apply(c)).collect();
            Element::tag(
                label,
                Element::cls(pair_orbit_min(&t, &pair[1], &coeff2[n])),
            )
        })
        .expect("analytic arrow total")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::CheckParams;

    #[test]
    fn free_coefficient_recovers_the_power() {
        // X^2 (x)_{S_2} S_2 at {a,b} has 4 elements
        let spec = SpeciesSpec::free_at(2).unwrap();
        let f = analytic_functor(&spec);
        for k in 0..=4 {
            assert_eq!(f.at(&FinSet::atoms(k)).len(), k * k);
        }
    }

    #[test]
    fn trivial_coefficient_recovers_divided_power() {
        let spec = SpeciesSpec::cosets_at(2, &PermGroup::symmetric(2).unwrap()).unwrap();
        let f = analytic_functor(&spec);
        assert_eq!(f.at(&FinSet::atoms(2)).len(), 3);
    }

    #[test]
    fn one_point_input_collapses_tuples() {
        let spec = SpeciesSpec::free_at(3).unwrap();
        let f = analytic_functor(&spec);
        assert_eq!(f.at(&FinSet::atoms(1)).len(), 1);
    }

    #[test]
    fn analytic_functors_pass_taut() {
        for spec in [
            SpeciesSpec::free_at(2).unwrap(),
            SpeciesSpec::cosets_at(3, &PermGroup::cyclic(3).unwrap()).unwrap(),
        ] {
            let f = analytic_functor(&spec);
            assert!(f.verify_taut(&CheckParams::default()).passed(), "{}", f.name());
        }
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let spec = SpeciesSpec::cosets_at(3, &PermGroup::cyclic(3).unwrap()).unwrap();
        let action = &spec.coeff[3];
        let x = FinSet::atoms(2);
        for t in FinSet::tuples(&vec![x.clone(); 3]).iter() {
            for c in action.carrier().iter() {
                let canon = pair_orbit_min(t.expect_tuple(), c, action);
                let pair = canon.expect_tuple();
                let again = pair_orbit_min(pair[0].expect_tuple(), &pair[1], action);
                assert_eq!(canon, again);
            }
        }
    }
}
