//! Polynomial and quotient-power functors, and tautness of polynomial
//! morphisms.

use crate::element::Element;
use crate::error::{Error, Result};
use crate::finset::{FinFun, FinSet};
use crate::functor::{Endofunctor, NatTransf};
use crate::group::PermGroup;

/// `P(X) = sum_i X^{e_i}` with finite cardinal exponents.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolySpec {
    pub exponents: Vec<usize>,
}

impl PolySpec {
    pub fn new(exponents: Vec<usize>) -> Self {
        PolySpec { exponents }
    }

    pub fn constant(c: usize) -> Self {
        PolySpec { exponents: vec![0; c] }
    }

    /// Grouped display, e.g. `X^0 + 3*X^1 + 3*X^2`.
    pub fn display(&self) -> String {
        if self.exponents.is_empty() {
            return "0".to_string();
        }
        let max = *self.exponents.iter().max().unwrap();
        let mut counts = vec![0usize; max + 1];
        for &e in &self.exponents {
            counts[e] += 1;
        }
        let mut parts = Vec::new();
        for (e, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let body = format!("X^{e}");
            parts.push(if c == 1 { body } else { format!("{c}*{body}") });
        }
        parts.join(" + ")
    }

    pub fn count_at(&self, k: usize) -> u64 {
        self.exponents.iter().map(|&e| (k as u64).pow(e as u32)).sum()
    }
}

/// Elements are `Tag(i, tuple)`: the summand index and an exponent-length
/// tuple over `X`.
pub fn poly_functor(spec: &PolySpec) -> Endofunctor {
    let name = spec.display();
    let exps = spec.exponents.clone();
    let exps2 = spec.exponents.clone();
    Endofunctor::new(
        name,
        move |x| {
            let mut elems = Vec::new();
            for (i, &e) in exps.iter().enumerate() {
                let label = i.to_string();
                let tuples = FinSet::tuples(&vec![x.clone(); e]);
                for t in tuples.iter() {
                    elems.push(Element::tag(&label, t.clone()));
                }
            }
            FinSet::new(elems)
        },
        move |f| {
            let build = |x: &FinSet| {
                let mut elems = Vec::new();
                for (i, &e) in exps2.iter().enumerate() {
                    let label = i.to_string();
                    for t in FinSet::tuples(&vec![x.clone(); e]).iter() {
                        elems.push(Element::tag(&label, t.clone()));
                    }
                }
                FinSet::new(elems)
            };
            FinFun::from_fn(build(f.dom()), build(f.cod()), |el| {
                let (label, t) = el.expect_tag();
                Element::tag(
                    label,
                    Element::Tuple(t.expect_tuple().iter().map(|c| f.apply(c)).collect()),
                )
            })
            .expect("polynomial arrow total")
        },
    )
}

/// One term of an extended divided power series: `X^n / G` with `G <= S_n`.
#[derive(Clone, Debug)]
pub struct QuotPowerSpec {
    pub terms: Vec<(usize, PermGroup)>,
}

impl QuotPowerSpec {
    pub fn new(terms: Vec<(usize, PermGroup)>) -> Result<Self> {
        for (n, g) in &terms {
            if g.degree() != *n {
                return Err(Error::InvalidSpec(format!(
                    "group of degree {} attached to exponent {n}",
                    g.degree()
                )));
            }
        }
        Ok(QuotPowerSpec { terms })
    }

    pub fn divided_power(n: usize) -> Self {
        QuotPowerSpec { terms: vec![(n, PermGroup::symmetric(n).unwrap())] }
    }

    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(n, g)| {
                let fact: usize = (1..=*n).product::<usize>().max(1);
                if g.order() == fact {
                    format!("X^[{n}]")
                } else if g.order() == 1 {
                    format!("X^{n}")
                } else {
                    format!("X^{n}/G{}", g.order())
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// The minimum of the orbit of `t` under positional permutation by `g`.
pub fn tuple_orbit_min(t: &[Element], group: &PermGroup) -> Vec<Element> {
    group
        .elements()
        .iter()
        .map(|g| crate::group::permute_tuple(t, g))
        .min()
        .expect("group nonempty")
}

/// Elements of a single term are `Cls` of the minimal tuple in the G-orbit;
/// multi-term specs are tagged sums.
pub fn quot_power_functor(spec: &QuotPowerSpec) -> Endofunctor {
    let name = spec.display();
    let terms = spec.terms.clone();
    let terms2 = spec.terms.clone();
    let obj = move |x: &FinSet| {
        let mut elems = Vec::new();
        for (i, (n, g)) in terms.iter().enumerate() {
            let label = i.to_string();
            for t in FinSet::tuples(&vec![x.clone(); *n]).iter() {
                let rep = tuple_orbit_min(t.expect_tuple(), g);
                elems.push(Element::tag(&label, Element::cls(Element::Tuple(rep))));
            }
        }
        FinSet::new(elems)
    };
    let obj2 = {
        let terms = terms2.clone();
        move |x: &FinSet| {
            let mut elems = Vec::new();
            for (i, (n, g)) in terms.iter().enumerate() {
                let label = i.to_string();
                for t in FinSet::tuples(&vec![x.clone(); *n]).iter() {
                    let rep = tuple_orbit_min(t.expect_tuple(), g);
                    elems.push(Element::tag(&label, Element::cls(Element::Tuple(rep))));
                }
            }
            FinSet::new(elems)
        }
    };
    Endofunctor::new(name, obj, move |f| {
        FinFun::from_fn(obj2(f.dom()), obj2(f.cod()), |el| {
            let (label, cls) = el.expect_tag();
            let i: usize = label.parse().unwrap();
            let (_, g) = &terms2[i];
            let mapped: Vec<Element> =
                cls.expect_cls().expect_tuple().iter().map(|c| f.apply(c)).collect();
            Element::tag(label, Element::cls(Element::Tuple(tuple_orbit_min(&mapped, g))))
        })
        .expect("quotient power arrow total")
    })
}

/// A morphism of polynomial functors in the reindexing presentation: an
/// index map `alpha` and, for each source summand `i`, a function
/// `f_i : exponent(target alpha(i)) -> exponent(source i)` given as an
/// index vector. The transformation sends `(i, phi)` to
/// `(alpha(i), phi . f_i)`.
pub fn poly_morphism(
    src: &PolySpec,
    dst: &PolySpec,
    alpha: &[usize],
    fs: &[Vec<usize>],
) -> Result<NatTransf> {
    if alpha.len() != src.exponents.len() || fs.len() != src.exponents.len() {
        return Err(Error::ShapeMismatch("one (alpha, f) entry per source summand".into()));
    }
    for (i, &j) in alpha.iter().enumerate() {
        if j >= dst.exponents.len() {
            return Err(Error::ShapeMismatch(format!("alpha({i}) out of range")));
        }
        if fs[i].len() != dst.exponents[j] {
            return Err(Error::ShapeMismatch(format!(
                "f_{i} must have length {} (target exponent)",
                dst.exponents[j]
            )));
        }
        if fs[i].iter().any(|&v| v >= src.exponents[i]) {
            return Err(Error::ShapeMismatch(format!(
                "f_{i} image outside source exponent {}",
                src.exponents[i]
            )));
        }
    }
    let sf = poly_functor(src);
    let df = poly_functor(dst);
    let alpha = alpha.to_vec();
    let fs = fs.to_vec();
    let (sf2, df2) = (sf.clone(), df.clone());
    Ok(NatTransf::new(
        "poly-morphism",
        sf,
        df,
        move |x| {
            FinFun::from_fn(sf2.at(x), df2.at(x), |el| {
                let (label, t) = el.expect_tag();
                let i: usize = label.parse().unwrap();
                let phi = t.expect_tuple();
                let composed: Vec<Element> =
                    fs[i].iter().map(|&v| phi[v].clone()).collect();
                Element::tag(alpha[i].to_string(), Element::Tuple(composed))
            })
            .expect("polynomial morphism total")
        },
    ))
}

/// Tautness criterion for polynomial morphisms: every `f_i` must be an
/// epimorphism (surjective onto the source exponent).
pub fn is_taut_poly_morphism(src: &PolySpec, alpha: &[usize], fs: &[Vec<usize>]) -> bool {
    fs.iter().enumerate().all(|(i, f)| {
        let mut hit = vec![false; src.exponents[i]];
        for &v in f {
            hit[v] = true;
        }
        hit.iter().all(|&b| b)
    }) && alpha.len() == fs.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::{check_taut_transf, CheckParams};

    #[test]
    fn poly_counts() {
        let p = PolySpec::new(vec![0, 1, 1, 2]);
        let f = poly_functor(&p);
        for k in 0..=5 {
            assert_eq!(f.at(&FinSet::atoms(k)).len() as u64, p.count_at(k));
        }
    }

    #[test]
    fn poly_passes_taut() {
        let f = poly_functor(&PolySpec::new(vec![0, 2, 3]));
        assert!(f.verify_taut(&CheckParams::default()).passed());
    }

    #[test]
    fn divided_square_has_three_elements_on_two() {
        let f = quot_power_functor(&QuotPowerSpec::divided_power(2));
        assert_eq!(f.at(&FinSet::atoms(2)).len(), 3);
        assert_eq!(f.at(&FinSet::atoms(1)).len(), 1);
    }

    #[test]
    fn divided_power_cardinality_is_rising_factorial() {
        // |X^[n]|(k) = C(k+n-1, n)
        fn binom(n: u64, k: u64) -> u64 {
            if k > n {
                return 0;
            }
            let mut r = 1u64;
            for i in 0..k {
                r = r * (n - i) / (i + 1);
            }
            r
        }
        for n in 0..=4usize {
            let f = quot_power_functor(&QuotPowerSpec::divided_power(n));
            for k in 0..=5usize {
                let expect = binom((k + n).saturating_sub(1) as u64, n as u64);
                assert_eq!(f.at(&FinSet::atoms(k)).len() as u64, expect, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn quot_powers_pass_taut() {
        let z2_in_s4 = PermGroup::from_generators(4, vec![vec![1, 0, 3, 2]]).unwrap();
        for spec in [
            QuotPowerSpec::divided_power(2),
            QuotPowerSpec::divided_power(3),
            QuotPowerSpec::new(vec![(3, PermGroup::cyclic(3).unwrap())]).unwrap(),
            QuotPowerSpec::new(vec![(4, z2_in_s4)]).unwrap(),
        ] {
            let f = quot_power_functor(&spec);
            assert!(f.verify_taut(&CheckParams::default()).passed(), "{}", f.name());
        }
    }

    #[test]
    fn product_of_divided_powers_is_quotient_by_product_group() {
        // X^n/S_n x X^m/S_m = X^{n+m}/(S_n x S_m): explicit bijection.
        let (n, m) = (2, 1);
        let left = crate::functor::product(vec![
            quot_power_functor(&QuotPowerSpec::divided_power(n)),
            quot_power_functor(&QuotPowerSpec::divided_power(m)),
        ]);
        // S_2 x S_1 inside S_3: generated by the swap of the first block.
        let g = PermGroup::from_generators(3, vec![vec![1, 0, 2]]).unwrap();
        let right = quot_power_functor(&QuotPowerSpec::new(vec![(3, g.clone())]).unwrap());
        for k in 0..=4 {
            let x = FinSet::atoms(k);
            let lv = left.at(&x);
            let rv = right.at(&x);
            assert_eq!(lv.len(), rv.len());
            // concatenation of representatives, re-canonicalized, is a bijection
            let mut images = std::collections::BTreeSet::new();
            for e in lv.iter() {
                let t = e.expect_tuple();
                let (_, c1) = t[0].expect_tag();
                let (_, c2) = t[1].expect_tag();
                let mut joined = c1.expect_cls().expect_tuple().to_vec();
                joined.extend_from_slice(c2.expect_cls().expect_tuple());
                let canon = Element::tag("0", Element::cls(Element::Tuple(tuple_orbit_min(&joined, &g))));
                assert!(rv.contains(&canon));
                images.insert(canon);
            }
            assert_eq!(images.len(), lv.len());
        }
    }

    #[test]
    fn diagonal_as_poly_morphism_is_taut() {
        // X -> X^2 given by the epi 2 -> 1
        let src = PolySpec::new(vec![1]);
        let dst = PolySpec::new(vec![2]);
        let t = poly_morphism(&src, &dst, &[0], &[vec![0, 0]]).unwrap();
        assert!(is_taut_poly_morphism(&src, &[0], &[vec![0, 0]]));
        t.src().verify_taut(&CheckParams::default());
        t.dst().verify_taut(&CheckParams::default());
        assert!(check_taut_transf(&t, &CheckParams::default()).unwrap().passed());
    }

    #[test]
    fn projection_as_poly_morphism_is_not_taut() {
        // X^2 -> X given by the non-epi mono 1 -> 2
        let src = PolySpec::new(vec![2]);
        let dst = PolySpec::new(vec![1]);
        let t = poly_morphism(&src, &dst, &[0], &[vec![0]]).unwrap();
        assert!(!is_taut_poly_morphism(&src, &[0], &[vec![0]]));
        t.src().verify_taut(&CheckParams::default());
        t.dst().verify_taut(&CheckParams::default());
        assert!(!check_taut_transf(&t, &CheckParams::default()).unwrap().passed());
    }

    #[test]
    fn identity_poly_morphism_is_taut() {
        let spec = PolySpec::new(vec![2]);
        let t = poly_morphism(&spec, &spec, &[0], &[vec![0, 1]]).unwrap();
        assert!(is_taut_poly_morphism(&spec, &[0], &[vec![0, 1]]));
        t.src().verify_taut(&CheckParams::default());
        t.dst().verify_taut(&CheckParams::default());
        assert!(check_taut_transf(&t, &CheckParams::default()).unwrap().passed());
    }

    #[test]
    fn epi_criterion_matches_square_check_on_samples() {
        // agreement between the combinatorial criterion and the direct
        // pullback check over a small sweep of morphisms X^2 -> X^2
        let spec = PolySpec::new(vec![2]);
        for f in [vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]] {
            let criterion = is_taut_poly_morphism(&spec, &[0], &[f.clone()]);
            let t = poly_morphism(&spec, &spec, &[0], &[f]).unwrap();
            t.src().verify_taut(&CheckParams::default());
            t.dst().verify_taut(&CheckParams::default());
            let direct = check_taut_transf(&t, &CheckParams::default()).unwrap().passed();
            assert_eq!(criterion, direct);
        }
    }
}
