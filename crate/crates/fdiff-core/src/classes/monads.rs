//! The filter, powerset and ultrafilter functors on finite sets, with
//! their monad structure and law checks.
//!
//! On a finite set every filter is principal, so a filter is encoded by its
//! generating subset (the improper filter by the empty generator), a subset
//! by the sorted tuple of its members, and a principal ultrafilter by the
//! singleton tuple at its point.

use crate::element::Element;
use crate::error::Result;
use crate::finset::{FinFun, FinSet};
use crate::functor::{CheckParams, Endofunctor, NatTransf};
use crate::report::Report;

fn subset_element(members: &[&Element]) -> Element {
    let s = FinSet::new(members.iter().map(|e| (*e).clone()).collect());
    Element::Tuple(s.iter().cloned().collect())
}

fn subset_members(e: &Element) -> Vec<Element> {
    e.expect_tuple().to_vec()
}

fn powerset_obj(x: &FinSet) -> FinSet {
    FinSet::new(
        x.subsets()
            .into_iter()
            .map(|s| Element::Tuple(s.iter().cloned().collect()))
            .collect(),
    )
}

fn direct_image(f: &FinFun, e: &Element) -> Element {
    let members: Vec<Element> = subset_members(e).iter().map(|m| f.apply(m)).collect();
    subset_element(&members.iter().collect::<Vec<_>>())
}

/// The covariant powerset functor; arrows act by direct image.
pub fn powerset_functor() -> Endofunctor {
    Endofunctor::new("P", powerset_obj, |f| {
        FinFun::from_fn(powerset_obj(f.dom()), powerset_obj(f.cod()), |e| {
            direct_image(f, e)
        })
        .expect("direct image total")
    })
}

/// The filter functor: on a finite set, filters are exactly principal
/// filters, encoded by their generator subsets. The action
/// `F(f)(<A>) = <f A>` is direct image of the generator.
pub fn filter_functor() -> Endofunctor {
    Endofunctor::new("F", powerset_obj, |f| {
        FinFun::from_fn(powerset_obj(f.dom()), powerset_obj(f.cod()), |e| {
            direct_image(f, e)
        })
        .expect("filter action total")
    })
}

fn proper_obj(x: &FinSet) -> FinSet {
    FinSet::new(
        x.subsets()
            .into_iter()
            .filter(|s| !s.is_empty())
            .map(|s| Element::Tuple(s.iter().cloned().collect()))
            .collect(),
    )
}

/// Proper filters only: nonempty generators.
pub fn proper_filter_functor() -> Endofunctor {
    Endofunctor::new("F'", proper_obj, |f| {
        FinFun::from_fn(proper_obj(f.dom()), proper_obj(f.cod()), |e| direct_image(f, e))
            .expect("proper filter action total")
    })
}

fn ultra_obj(x: &FinSet) -> FinSet {
    FinSet::new(x.iter().map(|e| Element::Tuple(vec![e.clone()])).collect())
}

/// Ultrafilters on a finite set are principal, so `beta(X)` is the set of
/// singleton generators.
pub fn ultrafilter_functor() -> Endofunctor {
    Endofunctor::new("beta", ultra_obj, |f| {
        FinFun::from_fn(ultra_obj(f.dom()), ultra_obj(f.cod()), |e| direct_image(f, e))
            .expect("ultrafilter action total")
    })
}

/// A monad whose functor, unit and multiplication are all taut-checkable.
#[derive(Clone)]
pub struct TautMonad {
    pub name: String,
    pub functor: Endofunctor,
    pub unit: NatTransf,
    pub mult: NatTransf,
}

fn generator_monad(name: &str, functor: Endofunctor) -> TautMonad {
    let ff = compose_self(&functor);
    let unit = {
        let f = functor.clone();
        NatTransf::new(
            format!("eta[{name}]"),
            crate::functor::identity(),
            functor.clone(),
            move |x| {
                FinFun::from_fn(x.clone(), f.at(x), |e| Element::Tuple(vec![e.clone()]))
                    .expect("unit total")
            },
        )
    };
    let mult = {
        let f = functor.clone();
        let ff2 = ff.clone();
        NatTransf::new(
            format!("mu[{name}]"),
            ff,
            functor.clone(),
            move |x| {
                FinFun::from_fn(ff2.at(x), f.at(x), |e| {
                    // a set of generator subsets; its multiplication is the
                    // generator of the intersection filter: the union
                    let mut members = Vec::new();
                    for sub in subset_members(e) {
                        members.extend(subset_members(&sub));
                    }
                    subset_element(&members.iter().collect::<Vec<_>>())
                })
                .expect("multiplication total")
            },
        )
    };
    TautMonad { name: name.to_string(), functor, unit, mult }
}

fn compose_self(f: &Endofunctor) -> Endofunctor {
    crate::functor::compose(f, f)
}

/// The filter monad: unit is the principal ultrafilter, multiplication the
/// Kowalsky sum (union of generators in the principal encoding).
pub fn filter_monad() -> TautMonad {
    generator_monad("F", filter_functor())
}

/// The powerset monad: unit is the singleton, multiplication the union.
pub fn powerset_monad() -> TautMonad {
    generator_monad("P", powerset_functor())
}

/// Element-wise monad law check: unit laws at sets of size up to `bound`,
/// associativity up to `min(bound, 2)` (the associativity square lives on
/// `T^3(X)`, which for powerset-style monads at size 3 has 2^256 elements),
/// plus tautness checks for the unit and multiplication.
pub fn monad_laws_check(m: &TautMonad, bound: usize) -> Result<Report> {
    let mut report = Report::new(format!("monad-laws[{}]", m.name)).with_param("bound", bound);
    let t = &m.functor;
    for k in 0..=bound {
        let x = FinSet::atoms(k);
        report.record_case();
        // unit laws: mu . T(eta) = id = mu . eta_T
        let t_eta = t.map(&m.unit.at(&x));
        let left = FinFun::compose(&m.mult.at(&x), &t_eta).expect("composable");
        if !left.is_identity() {
            report.fail(format!("size {k}"), "mu . T(eta) is not the identity");
        }
        let tx = t.at(&x);
        let eta_tx = m.unit.at(&tx);
        let right = FinFun::compose(&m.mult.at(&x), &eta_tx).expect("composable");
        if !right.is_identity() {
            report.fail(format!("size {k}"), "mu . eta_T is not the identity");
        }
        // associativity: mu . T(mu) = mu . mu_T
        if k > 2 {
            continue;
        }
        let t_mu = t.map(&m.mult.at(&x));
        let assoc_left = FinFun::compose(&m.mult.at(&x), &t_mu).expect("composable");
        let mu_tx = m.mult.at(&tx);
        let assoc_right = FinFun::compose(&m.mult.at(&x), &mu_tx).expect("composable");
        if assoc_left != assoc_right {
            report.fail(format!("size {k}"), "multiplication is not associative");
        }
    }
    // tautness of the structure maps
    let params = CheckParams::default();
    m.functor.verify_taut(&params);
    m.unit.src().verify_taut(&params);
    m.unit.dst().verify_taut(&params);
    report.absorb(m.unit.verify_taut(&params)?);
    m.mult.src().verify_taut(&params);
    report.absorb(m.mult.verify_taut(&params)?);
    Ok(report)
}

/// The non-taut free-module stub used as the standard counterexample:
/// `F(X) = (Z/m)^X` with arrows acting by fiberwise sums. It is functorial
/// but does not preserve inverse images.
pub fn zmod_module_functor(modulus: u32) -> Endofunctor {
    let obj = move |x: &FinSet| {
        FinSet::tuples(&vec![
            FinSet::new((0..modulus).map(Element::Atom).collect());
            x.len()
        ])
    };
    Endofunctor::new(format!("Z/{modulus}^X"), obj, move |f| {
        FinFun::from_fn(obj(f.dom()), obj(f.cod()), |e| {
            let vals = e.expect_tuple();
            let mut out = vec![0u32; f.cod().len()];
            for (i, v) in vals.iter().enumerate() {
                let c = match v {
                    Element::Atom(c) => *c,
                    _ => unreachable!(),
                };
                out[f.apply_idx(i)] = (out[f.apply_idx(i)] + c) % modulus;
            }
            Element::Tuple(out.into_iter().map(Element::Atom).collect())
        })
        .expect("module pushforward total")
    })
}

/// The reduced power along a principal filter: the quotient of `X^A` by
/// agreement on the generating subset. With a nonempty generator this is the
/// quotient presentation; the improper filter gives the constant functor 1
/// (the colimit presentation).
pub fn principal_reduced_power(ambient: &FinSet, generator: &FinSet) -> Result<Endofunctor> {
    if !generator.is_subset_of(ambient) {
        return Err(crate::error::Error::Precondition(
            "generator must be a subset of the ambient set".into(),
        ));
    }
    if generator.is_empty() {
        return Ok(crate::functor::constant(FinSet::one()));
    }
    let positions: Vec<usize> = generator
        .iter()
        .map(|e| ambient.index_of(e).unwrap())
        .collect();
    let amb = ambient.clone();
    let pos = positions.clone();
    // canonical representative of a class: the restriction to the generator
    let canon = move |t: &[Element]| -> Element {
        Element::Tuple(pos.iter().map(|&i| t[i].clone()).collect())
    };
    let canon2 = canon.clone();
    let amb2 = amb.clone();
    let obj = move |x: &FinSet| {
        let mut out = Vec::new();
        for t in FinSet::tuples(&vec![x.clone(); amb2.len()]).iter() {
            out.push(Element::cls(canon2(t.expect_tuple())));
        }
        FinSet::new(out)
    };
    let obj2 = obj.clone();
    Ok(Endofunctor::new(
        format!("X^<{generator}>"),
        obj,
        move |f| {
            FinFun::from_fn(obj2(f.dom()), obj2(f.cod()), |e| {
                let rep = e.expect_cls().expect_tuple();
                Element::cls(Element::Tuple(rep.iter().map(|v| f.apply(v)).collect()))
            })
            .expect("reduced power action total")
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::{check_taut, check_taut_transf, iso_witness, IsoVerdict};

    #[test]
    fn filter_counts() {
        let f = filter_functor();
        let fp = proper_filter_functor();
        let b = ultrafilter_functor();
        let two = FinSet::atoms(2);
        assert_eq!(f.at(&two).len(), 4);
        assert_eq!(fp.at(&two).len(), 3);
        assert_eq!(b.at(&two).len(), 2);
        for k in 0..=4 {
            assert_eq!(f.at(&FinSet::atoms(k)).len(), 1 << k);
        }
    }

    #[test]
    fn filter_action_is_direct_image_of_generator() {
        let f = filter_functor();
        let two = FinSet::atoms(2);
        for func in crate::finset::all_functions(&two, &two) {
            let action = f.map(&func);
            for (gen, img) in action.graph() {
                let expect = direct_image(&func, gen);
                assert_eq!(img, &expect);
            }
        }
    }

    #[test]
    fn unit_is_principal_ultrafilter() {
        let m = filter_monad();
        let x = FinSet::atoms(3);
        let eta = m.unit.at(&x);
        for (e, img) in eta.graph() {
            assert_eq!(img, &Element::Tuple(vec![e.clone()]));
        }
    }

    #[test]
    fn monad_laws_hold_for_filter_and_powerset() {
        for m in [filter_monad(), powerset_monad()] {
            let r = monad_laws_check(&m, 3).unwrap();
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn monad_functors_pass_taut() {
        for f in [filter_functor(), proper_filter_functor(), ultrafilter_functor()] {
            assert!(f.verify_taut(&CheckParams::default()).passed(), "{}", f.name());
        }
    }

    #[test]
    fn module_stub_fails_the_standard_square() {
        let f = zmod_module_functor(3);
        let r = check_taut(&f, &CheckParams::default());
        assert!(!r.passed());
        // the specific square: constant map 2 -> 2 onto {1}, subset {0}
        let two = FinSet::atoms(2);
        let constant_one = FinFun::new(two.clone(), two.clone(), vec![1, 1]).unwrap();
        let sub = FinSet::singleton(Element::atom(0));
        let y0 = crate::finset::inverse_image(&constant_one, &sub).unwrap();
        assert!(y0.is_empty());
        // |F(empty)| = 1 while the pullback {(m,n) | m+n=0 mod 3} has 3
        assert_eq!(f.at(&y0).len(), 1);
    }

    #[test]
    fn principal_reduced_power_collapses_to_representable() {
        let ambient = FinSet::atoms(4);
        let generator = FinSet::atoms(2);
        let red = principal_reduced_power(&ambient, &generator).unwrap();
        let rep = crate::functor::power(2);
        // explicit natural iso: read off the representative
        let (r2, p2) = (red.clone(), rep.clone());
        let fam = NatTransf::new("collapse", red.clone(), rep.clone(), move |x| {
            FinFun::from_fn(r2.at(x), p2.at(x), |e| e.expect_cls().clone()).expect("total")
        });
        let r = iso_witness(&red, &rep, &CheckParams::default(), Some(&fam));
        assert_eq!(r.verdict, IsoVerdict::NaturalIso);
        // improper filter gives the constant 1 (colimit presentation)
        let improper = principal_reduced_power(&ambient, &FinSet::empty()).unwrap();
        assert_eq!(improper.at(&FinSet::empty()).len(), 1);
    }

    #[test]
    fn unit_and_mult_are_taut() {
        let m = powerset_monad();
        let params = CheckParams::default();
        m.functor.verify_taut(&params);
        m.unit.src().verify_taut(&params);
        m.mult.src().verify_taut(&params);
        assert!(check_taut_transf(&m.unit, &params).unwrap().passed());
        assert!(check_taut_transf(&m.mult, &params).unwrap().passed());
    }
}
