//! Closed-form differences per class, each paired with the explicit natural
//! bijection onto the operational difference:
//!
//! * polynomials: support restriction over proper subsets of each exponent;
//! * quotient powers: orbit representatives of proper subsets with their
//!   stabilizers, stars reinserted off the support;
//! * analytic functors: grading by the number of non-star entries, with
//!   coefficient quotients by the star-fixing subgroups;
//! * exponentials and Dirichlet functors: the `(phi, l')` splitting of a
//!   function on `X + 1`;
//! * filter/powerset/ultrafilter: generator-subset analysis.

use crate::classes::{
    realize_class, ClassSpec, DirichletSpec, Lattice, PolySpec, QuotPowerSpec, SpeciesSpec,
};
use crate::delta::delta;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::finset::{FinFun, FinSet};
use crate::functor::{
    iso_witness, successor_object, CheckParams, Endofunctor, NatTransf,
};
use crate::group::{perm_identity, GroupAction, Perm, PermGroup};
use crate::report::Report;

/// A closed-form difference: the output spec, its realization, the
/// operational difference it must match, and the constructed bijection
/// family from the realization onto the operational difference.
pub struct SymbolicDelta {
    pub input: ClassSpec,
    pub spec: ClassSpec,
    pub realized: Endofunctor,
    pub operational: Endofunctor,
    pub witness: NatTransf,
}

/// Verifies the witness is a natural isomorphism at sizes up to `bound`.
pub fn verify_symbolic_delta(sd: &SymbolicDelta, bound: usize) -> Report {
    let mut report = Report::new(format!(
        "symbolic-delta[{}]",
        sd.input.class_name()
    ))
    .with_param("input", sd.input.display())
    .with_param("output", sd.spec.display());
    let iso = iso_witness(
        &sd.realized,
        &sd.operational,
        &CheckParams::with_bound(bound),
        Some(&sd.witness),
    );
    report.absorb(iso.report);
    report
}

fn operational_delta_of(spec: &ClassSpec) -> Result<Endofunctor> {
    let f = realize_class(spec);
    let r = f.verify_taut(&CheckParams::default());
    if !r.passed() {
        return Err(Error::NotTautVerified(f.name().to_string()));
    }
    delta(&f)
}

/// Value tuple over `X + 1`: the values of `phi` on `X` with `at_fresh`
/// inserted at the adjoined point's position.
fn extended_tuple(x: &FinSet, phi: &[Element], at_fresh: &Element) -> Element {
    let (sx, fresh, _) = successor_object(x);
    Element::Tuple(
        sx.iter()
            .map(|y| {
                if *y == fresh {
                    at_fresh.clone()
                } else {
                    phi[x.index_of(y).unwrap()].clone()
                }
            })
            .collect(),
    )
}

/// Computes the symbolic difference of a class spec, together with the
/// explicit comparison onto the operational difference.
pub fn symbolic_delta(input: &ClassSpec) -> Result<SymbolicDelta> {
    match input {
        ClassSpec::Poly(p) => delta_poly(input, p),
        ClassSpec::QuotPower(q) => delta_quot_power(input, q),
        ClassSpec::Species(s) => delta_species(input, s),
        ClassSpec::Dirichlet(d) => delta_dirichlet(input, d),
        ClassSpec::NormalizedExponential(l) => delta_normalized(input, l),
        ClassSpec::FullExponential(l) => delta_full_exponential(input, l),
        ClassSpec::FilterMonad => delta_generators(input, ClassSpec::FilterMonad, false),
        ClassSpec::ProperFilter => delta_generators(input, ClassSpec::FilterMonad, false),
        ClassSpec::Powerset => delta_generators(input, ClassSpec::Powerset, false),
        ClassSpec::Ultrafilter => delta_generators(
            input,
            ClassSpec::Poly(PolySpec::constant(1)),
            true,
        ),
    }
}

// ---------- polynomials ----------

fn subsets_of_range(n: usize) -> Vec<Vec<usize>> {
    (0..(1usize << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

fn delta_poly(input: &ClassSpec, p: &PolySpec) -> Result<SymbolicDelta> {
    // one summand per (original summand, proper support subset)
    let mut exponents = Vec::new();
    let mut meta: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, &e) in p.exponents.iter().enumerate() {
        for s in subsets_of_range(e) {
            if s.len() == e {
                continue;
            }
            exponents.push(s.len());
            meta.push((i, s));
        }
    }
    let out = PolySpec::new(exponents);
    let realized = realize_class(&ClassSpec::Poly(out.clone()));
    let operational = operational_delta_of(input)?;
    let input_exponents = p.exponents.clone();
    let (r2, o2) = (realized.clone(), operational.clone());
    let witness = NatTransf::new("poly-delta", realized.clone(), operational.clone(), move |x| {
        let (_, fresh, _) = successor_object(x);
        FinFun::from_fn(r2.at(x), o2.at(x), |e| {
            let (label, vals) = e.expect_tag();
            let (orig, support) = &meta[label.parse::<usize>().unwrap()];
            let vals = vals.expect_tuple();
            // rebuild the full tuple with fresh off the support
            let mut full = vec![fresh.clone(); input_exponents[*orig]];
            for (rank, &pos) in support.iter().enumerate() {
                full[pos] = vals[rank].clone();
            }
            Element::tag(orig.to_string(), Element::Tuple(full))
        })
        .expect("support reconstruction total")
    });
    Ok(SymbolicDelta {
        input: input.clone(),
        spec: ClassSpec::Poly(out),
        realized,
        operational,
        witness,
    })
}

// ---------- quotient powers ----------

fn subset_action(g: &Perm, b: &[usize]) -> Vec<usize> {
    // induced action on supports of tuples under (t.g)[i] = t[g[i]]
    let mut out: Vec<usize> = (0..g.len()).filter(|&i| b.contains(&g[i])).collect();
    out.sort();
    out
}

fn delta_quot_power(input: &ClassSpec, q: &QuotPowerSpec) -> Result<SymbolicDelta> {
    struct TermDelta {
        term: usize,
        rep: Vec<usize>,
    }
    let mut out_terms = Vec::new();
    let mut meta: Vec<TermDelta> = Vec::new();
    for (ti, (n, g)) in q.terms.iter().enumerate() {
        // orbits of proper subsets under the induced action
        let mut seen: Vec<Vec<usize>> = Vec::new();
        for s in subsets_of_range(*n) {
            if s.len() == *n {
                continue;
            }
            let orbit_min = g
                .elements()
                .iter()
                .map(|p| subset_action(p, &s))
                .min()
                .expect("group nonempty");
            if seen.contains(&orbit_min) {
                continue;
            }
            seen.push(orbit_min.clone());
            let b = orbit_min;
            // stabilizer restricted to the support, reindexed along sorted b
            let mut restricted: Vec<Perm> = Vec::new();
            for p in g.elements() {
                if subset_action(p, &b) == b {
                    let rho: Perm = b
                        .iter()
                        .map(|&pos| {
                            b.iter().position(|&q2| q2 == p[pos]).expect("stabilizer")
                        })
                        .collect();
                    restricted.push(rho);
                }
            }
            restricted.sort();
            restricted.dedup();
            let h = PermGroup::from_elements(b.len(), restricted)?;
            out_terms.push((b.len(), h));
            meta.push(TermDelta { term: ti, rep: b });
        }
    }
    let out = QuotPowerSpec::new(out_terms)?;
    let realized = realize_class(&ClassSpec::QuotPower(out.clone()));
    let operational = operational_delta_of(input)?;
    let input_terms = q.terms.clone();
    let (r2, o2) = (realized.clone(), operational.clone());
    let witness = NatTransf::new("quot-delta", realized.clone(), operational.clone(), move |x| {
        let (_, fresh, _) = successor_object(x);
        FinFun::from_fn(r2.at(x), o2.at(x), |e| {
            let (label, cls) = e.expect_tag();
            let td = &meta[label.parse::<usize>().unwrap()];
            let vals = cls.expect_cls().expect_tuple();
            let (n, g) = &input_terms[td.term];
            let mut full = vec![fresh.clone(); *n];
            for (rank, &pos) in td.rep.iter().enumerate() {
                full[pos] = vals[rank].clone();
            }
            let min = crate::classes::poly::tuple_orbit_min(&full, g);
            Element::tag(td.term.to_string(), Element::cls(Element::Tuple(min)))
        })
        .expect("star reinsertion total")
    });
    Ok(SymbolicDelta {
        input: input.clone(),
        spec: ClassSpec::QuotPower(out),
        realized,
        operational,
        witness,
    })
}

// ---------- analytic functors ----------

fn delta_species(input: &ClassSpec, s: &SpeciesSpec) -> Result<SymbolicDelta> {
    let top = s.degree_bound();
    // coefficient of the new degree k: classes of higher coefficients under
    // the subgroup fixing the first k positions, tagged by their old degree
    let mut coeff = Vec::new();
    for k in 0..top.max(1) {
        let sk = PermGroup::symmetric(k)?;
        let mut elems = Vec::new();
        for l in (k + 1)..=top {
            let action_l = &s.coeff[l];
            let fixing: Vec<&Perm> = action_l
                .group()
                .elements()
                .iter()
                .filter(|p| (0..k).all(|i| p[i] == i))
                .collect();
            let class_min = |c: &Element| -> Element {
                fixing
                    .iter()
                    .map(|p| action_l.act(p, c))
                    .min()
                    .expect("identity fixes everything")
            };
            let mut reps: Vec<Element> = action_l
                .carrier()
                .iter()
                .map(|c| class_min(c))
                .collect();
            reps.sort();
            reps.dedup();
            for rep in reps {
                elems.push(Element::tag(l.to_string(), Element::cls(rep)));
            }
        }
        let carrier = FinSet::new(elems);
        let species = s.clone();
        let action = GroupAction::new(sk, carrier, move |tau, e| {
            let (llabel, cls) = e.expect_tag();
            let l: usize = llabel.parse().unwrap();
            let action_l = &species.coeff[l];
            // extend tau to degree l by the identity off the prefix
            let mut bar: Perm = perm_identity(l);
            bar[..tau.len()].copy_from_slice(tau);
            let moved = action_l.act(&bar, cls.expect_cls());
            let fixing: Vec<&Perm> = action_l
                .group()
                .elements()
                .iter()
                .filter(|p| (0..tau.len()).all(|i| p[i] == i))
                .collect();
            let min = fixing
                .iter()
                .map(|p| action_l.act(p, &moved))
                .min()
                .expect("identity fixes everything");
            Element::tag(llabel, Element::cls(min))
        })?;
        coeff.push(action);
    }
    let out = SpeciesSpec::new(coeff)?;
    let realized = realize_class(&ClassSpec::Species(out.clone()));
    let operational = operational_delta_of(input)?;
    let species = s.clone();
    let (r2, o2) = (realized.clone(), operational.clone());
    let witness = NatTransf::new(
        "species-delta",
        realized.clone(),
        operational.clone(),
        move |x| {
            let (_, fresh, _) = successor_object(x);
            FinFun::from_fn(r2.at(x), o2.at(x), |e| {
                let (klabel, cls) = e.expect_tag();
                let k: usize = klabel.parse().unwrap();
                let pair = cls.expect_cls().expect_tuple();
                let xs = pair[0].expect_tuple();
                let (llabel, inner) = pair[1].expect_tag();
                let l: usize = llabel.parse().unwrap();
                let c = inner.expect_cls();
                let mut full = xs.to_vec();
                full.extend(std::iter::repeat(fresh.clone()).take(l - k));
                Element::tag(
                    llabel,
                    Element::cls(crate::classes::species::pair_orbit_min(
                        &full,
                        c,
                        &species.coeff[l],
                    )),
                )
            })
            .expect("star grading total")
        },
    );
    Ok(SymbolicDelta {
        input: input.clone(),
        spec: ClassSpec::Species(out),
        realized,
        operational,
        witness,
    })
}

// ---------- exponentials and Dirichlet ----------

/// The coefficient set `C_l = { l' != bot | l v l' = top }` of a lattice.
fn normalization_coefficient(l: &Lattice, at: &Element) -> FinSet {
    FinSet::new(
        l.carrier()
            .iter()
            .filter(|lp| *lp != l.bottom() && &l.join_elems(at, lp) == l.top())
            .cloned()
            .collect(),
    )
}

fn delta_normalized(input: &ClassSpec, l: &Lattice) -> Result<SymbolicDelta> {
    let mut terms = Vec::new();
    let mut meta = Vec::new();
    for at in l.carrier().iter() {
        let c = normalization_coefficient(l, at);
        if c.is_empty() {
            continue;
        }
        terms.push((c, l.down_set(at)));
        meta.push(at.clone());
    }
    let out = DirichletSpec { terms };
    let realized = realize_class(&ClassSpec::Dirichlet(out.clone()));
    let operational = operational_delta_of(input)?;
    let (r2, o2) = (realized.clone(), operational.clone());
    let witness = NatTransf::new(
        "normalized-delta",
        realized.clone(),
        operational.clone(),
        move |x| {
            FinFun::from_fn(r2.at(x), o2.at(x), |e| {
                let (_, pair) = e.expect_tag();
                let items = pair.expect_tuple();
                let lp = &items[0];
                let phi = items[1].expect_tuple();
                extended_tuple(x, phi, lp)
            })
            .expect("splitting total")
        },
    );
    let _ = meta;
    Ok(SymbolicDelta {
        input: input.clone(),
        spec: ClassSpec::Dirichlet(out),
        realized,
        operational,
        witness,
    })
}

fn delta_full_exponential(input: &ClassSpec, l: &Lattice) -> Result<SymbolicDelta> {
    // Delta[L^X] = L_* x L^X, decomposed by the sup of the X-part:
    // sum over l of (L_*, D(l)^[X]).
    let positive = l.strictly_positive();
    let mut terms = Vec::new();
    for at in l.carrier().iter() {
        terms.push((positive.clone(), l.down_set(at)));
    }
    let out = DirichletSpec { terms };
    let realized = realize_class(&ClassSpec::Dirichlet(out.clone()));
    let operational = operational_delta_of(input)?;
    let (r2, o2) = (realized.clone(), operational.clone());
    let witness = NatTransf::new(
        "full-exp-delta",
        realized.clone(),
        operational.clone(),
        move |x| {
            FinFun::from_fn(r2.at(x), o2.at(x), |e| {
                let (_, pair) = e.expect_tag();
                let items = pair.expect_tuple();
                let lp = &items[0];
                let phi = items[1].expect_tuple();
                extended_tuple(x, phi, lp)
            })
            .expect("splitting total")
        },
    );
    Ok(SymbolicDelta {
        input: input.clone(),
        spec: ClassSpec::Dirichlet(out),
        realized,
        operational,
        witness,
    })
}

fn delta_dirichlet(input: &ClassSpec, d: &DirichletSpec) -> Result<SymbolicDelta> {
    // termwise: Delta[C_i x L_i^[X]] = sum_l (C_i x C_l) x D(l)^[X]
    let mut terms = Vec::new();
    let mut meta: Vec<usize> = Vec::new();
    for (i, (c, l)) in d.terms.iter().enumerate() {
        for at in l.carrier().iter() {
            let cl = normalization_coefficient(l, at);
            if cl.is_empty() {
                continue;
            }
            let coeff = FinSet::tuples(&[c.clone(), cl]);
            terms.push((coeff, l.down_set(at)));
            meta.push(i);
        }
    }
    let out = DirichletSpec { terms };
    let realized = realize_class(&ClassSpec::Dirichlet(out.clone()));
    let operational = operational_delta_of(input)?;
    let (r2, o2) = (realized.clone(), operational.clone());
    let witness = NatTransf::new(
        "dirichlet-delta",
        realized.clone(),
        operational.clone(),
        move |x| {
            FinFun::from_fn(r2.at(x), o2.at(x), |e| {
                let (label, pair) = e.expect_tag();
                let orig = meta[label.parse::<usize>().unwrap()];
                let items = pair.expect_tuple();
                let coeff_pair = items[0].expect_tuple();
                let (c, lp) = (&coeff_pair[0], &coeff_pair[1]);
                let phi = items[1].expect_tuple();
                Element::tag(
                    orig.to_string(),
                    Element::Tuple(vec![c.clone(), extended_tuple(x, phi, lp)]),
                )
            })
            .expect("splitting total")
        },
    );
    Ok(SymbolicDelta {
        input: input.clone(),
        spec: ClassSpec::Dirichlet(out),
        realized,
        operational,
        witness,
    })
}

// ---------- generator-subset monads ----------

/// For the filter, proper-filter and powerset functors the difference is
/// computed by adjoining the fresh point to the generator; for the
/// ultrafilter functor the only new ultrafilter is the one at the fresh
/// point.
fn delta_generators(
    input: &ClassSpec,
    out: ClassSpec,
    ultra: bool,
) -> Result<SymbolicDelta> {
    let realized = realize_class(&out);
    let operational = operational_delta_of(input)?;
    let (r2, o2) = (realized.clone(), operational.clone());
    let witness = NatTransf::new(
        "generator-delta",
        realized.clone(),
        operational.clone(),
        move |x| {
            let (_, fresh, _) = successor_object(x);
            FinFun::from_fn(r2.at(x), o2.at(x), |e| {
                if ultra {
                    // the unique constant-1 element maps to <{fresh}>
                    Element::Tuple(vec![fresh.clone()])
                } else {
                    let mut members: Vec<Element> = e.expect_tuple().to_vec();
                    members.push(fresh.clone());
                    let s = FinSet::new(members);
                    Element::Tuple(s.iter().cloned().collect())
                }
            })
            .expect("generator extension total")
        },
    );
    Ok(SymbolicDelta {
        input: input.clone(),
        spec: out,
        realized,
        operational,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::lattice::n_star;
    use crate::classes::SpeciesSpec;
    use crate::group::PermGroup;

    fn check(input: ClassSpec, bound: usize) -> SymbolicDelta {
        let sd = symbolic_delta(&input).unwrap();
        let r = verify_symbolic_delta(&sd, bound);
        assert!(r.passed(), "{r}");
        sd
    }

    #[test]
    fn cube_difference_is_binomial() {
        let sd = check(ClassSpec::Poly(PolySpec::new(vec![3])), 4);
        match &sd.spec {
            ClassSpec::Poly(p) => {
                let mut counts = [0usize; 3];
                for &e in &p.exponents {
                    counts[e] += 1;
                }
                assert_eq!(counts, [1, 3, 3]); // X^0 + 3X^1 + 3X^2
            }
            _ => panic!("expected a polynomial"),
        }
    }

    #[test]
    fn divided_square_difference() {
        let sd = check(
            ClassSpec::QuotPower(QuotPowerSpec::divided_power(2)),
            4,
        );
        match &sd.spec {
            ClassSpec::QuotPower(q) => {
                let mut shape: Vec<(usize, usize)> =
                    q.terms.iter().map(|(n, g)| (*n, g.order())).collect();
                shape.sort();
                assert_eq!(shape, vec![(0, 1), (1, 1)]); // 1 + X
            }
            _ => panic!("expected a quotient power"),
        }
    }

    #[test]
    fn divided_powers_up_to_four() {
        for n in 1..=4 {
            check(ClassSpec::QuotPower(QuotPowerSpec::divided_power(n)), 3);
        }
    }

    #[test]
    fn cyclic_quotient_difference() {
        check(
            ClassSpec::QuotPower(
                QuotPowerSpec::new(vec![(3, PermGroup::cyclic(3).unwrap())]).unwrap(),
            ),
            3,
        );
    }

    #[test]
    fn analytic_differences() {
        check(ClassSpec::Species(SpeciesSpec::free_at(2).unwrap()), 4);
        check(
            ClassSpec::Species(
                SpeciesSpec::cosets_at(3, &PermGroup::cyclic(3).unwrap()).unwrap(),
            ),
            3,
        );
    }

    #[test]
    fn chain_normalized_difference_matches_corollary() {
        // Delta[3^[X]] = 2*3^[X] + 2^[X] + 1^[X]
        let sd = check(
            ClassSpec::NormalizedExponential(Lattice::chain(3).unwrap()),
            4,
        );
        match &sd.spec {
            ClassSpec::Dirichlet(d) => {
                let mut shape: Vec<(usize, usize)> =
                    d.terms.iter().map(|(c, l)| (l.len(), c.len())).collect();
                shape.sort();
                assert_eq!(shape, vec![(1, 1), (2, 1), (3, 2)]);
            }
            _ => panic!("expected dirichlet"),
        }
    }

    #[test]
    fn chain_normalized_differences_up_to_four() {
        for n in 1..=4 {
            check(
                ClassSpec::NormalizedExponential(Lattice::chain(n).unwrap()),
                3,
            );
        }
    }

    #[test]
    fn six_star_normalized_difference() {
        check(ClassSpec::NormalizedExponential(n_star(6).unwrap()), 3);
    }

    #[test]
    fn full_exponential_difference() {
        check(ClassSpec::FullExponential(Lattice::chain(2).unwrap()), 3);
        check(ClassSpec::FullExponential(Lattice::chain(3).unwrap()), 3);
    }

    #[test]
    fn dirichlet_difference() {
        let spec = DirichletSpec {
            terms: vec![
                (FinSet::atoms(2), Lattice::chain(2).unwrap()),
                (FinSet::atoms(1), n_star(6).unwrap()),
            ],
        };
        check(ClassSpec::Dirichlet(spec), 3);
    }

    #[test]
    fn monad_differences() {
        check(ClassSpec::FilterMonad, 3);
        check(ClassSpec::ProperFilter, 3);
        check(ClassSpec::Powerset, 3);
        check(ClassSpec::Ultrafilter, 3);
    }
}
