//! The product (Leibniz) rule and commutation of the difference operator
//! with confluent colimits and non-empty connected limits.

use crate::delta::{delta, delta_transf};
use crate::diagram::{FinCat, SetDiagram};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::finset::{FinFun, FinSet};
use crate::functor::{
    iso_witness, product, successor_object, sum, CheckParams, Endofunctor, NatTransf,
};
use crate::report::Report;

/// Binary product rule: constructs the canonical grid-partition bijection
/// `(DF x G) + (F x DG) + (DF x DG) -> D[F x G]` and verifies it exactly.
pub fn product_rule_check(f: &Endofunctor, g: &Endofunctor, bound: usize) -> Result<Report> {
    finite_product_rule_check(&[f.clone(), g.clone()], bound)
}

/// n-ary product rule over proper subsets: for each proper `J` of the index
/// set, the summand has the old part `F_j (j in J)` and the new part
/// `Delta F_k (k not in J)`. The canonical map embeds old parts along
/// `F_j(j_X)` and keeps new parts.
pub fn finite_product_rule_check(family: &[Endofunctor], bound: usize) -> Result<Report> {
    for f in family {
        if !f.is_taut_verified() {
            return Err(Error::NotTautVerified(f.name().to_string()));
        }
    }
    let n = family.len();
    let deltas: Vec<Endofunctor> =
        family.iter().map(delta).collect::<Result<Vec<_>>>()?;
    let full_mask = (1usize << n) - 1;
    let mut summands = Vec::new();
    let mut masks = Vec::new();
    for mask in 0..full_mask {
        let parts: Vec<Endofunctor> = (0..n)
            .map(|i| {
                if mask & (1 << i) != 0 {
                    family[i].clone()
                } else {
                    deltas[i].clone()
                }
            })
            .collect();
        summands.push(product(parts));
        masks.push(mask);
    }
    let lhs = sum(summands);
    let rhs = delta(&product(family.to_vec()).tap_verify())?;

    let fam = family.to_vec();
    let (l2, r2) = (lhs.clone(), rhs.clone());
    let witness = NatTransf::new("product-rule", lhs.clone(), rhs.clone(), move |x| {
        let (_, _, j) = successor_object(x);
        let embeds: Vec<FinFun> = fam.iter().map(|f| f.map(&j)).collect();
        FinFun::from_fn(l2.at(x), r2.at(x), |e| {
            let (label, tuple) = e.expect_tag();
            let mask = masks[label.parse::<usize>().unwrap()];
            let comps = tuple.expect_tuple();
            Element::Tuple(
                comps
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        if mask & (1 << i) != 0 {
                            embeds[i].apply(c)
                        } else {
                            c.clone()
                        }
                    })
                    .collect(),
            )
        })
        .expect("grid partition total")
    });
    let iso = iso_witness(&lhs, &rhs, &CheckParams::with_bound(bound), Some(&witness));
    let mut report = Report::new("product-rule").with_param("factors", n);
    report.absorb(iso.report);
    Ok(report)
}

trait TapVerify {
    fn tap_verify(self) -> Self;
}

impl TapVerify for Endofunctor {
    fn tap_verify(self) -> Self {
        self.verify_taut(&CheckParams::default());
        self
    }
}

/// A diagram of endofunctors over a finite shape with natural transformations
/// as transitions. Componentwise functoriality is spot-checked on small sets
/// at construction.
#[derive(Clone)]
pub struct FunctorDiagram {
    pub shape: FinCat,
    pub functors: Vec<Endofunctor>,
    pub transitions: Vec<NatTransf>,
}

impl FunctorDiagram {
    pub fn new(
        shape: FinCat,
        functors: Vec<Endofunctor>,
        transitions: Vec<NatTransf>,
    ) -> Result<Self> {
        if functors.len() != shape.n_objects() || transitions.len() != shape.n_morphisms() {
            return Err(Error::ShapeMismatch("diagram data sizes".into()));
        }
        for k in 0..=2 {
            let x = FinSet::atoms(k);
            for o in 0..shape.n_objects() {
                if !transitions[shape.id(o)].at(&x).is_identity() {
                    return Err(Error::InvalidSpec(
                        "transitions do not include identities".into(),
                    ));
                }
            }
            for gm in shape.morphisms() {
                for fm in shape.morphisms() {
                    if let Some(hm) = shape.compose_mor(gm, fm) {
                        let lhs =
                            FinFun::compose(&transitions[gm].at(&x), &transitions[fm].at(&x))
                                .map_err(|_| {
                                    Error::ShapeMismatch("transition endpoints".into())
                                })?;
                        if lhs != transitions[hm].at(&x) {
                            return Err(Error::InvalidSpec(
                                "transitions do not compose functorially".into(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(FunctorDiagram { shape, functors, transitions })
    }

    fn at(&self, x: &FinSet) -> SetDiagram {
        SetDiagram::new(
            self.shape.clone(),
            self.functors.iter().map(|f| f.at(x)).collect(),
            self.transitions.iter().map(|t| t.at(x)).collect(),
        )
        .expect("pointwise diagram is functorial")
    }

    /// The pointwise colimit as an endofunctor.
    pub fn colimit_functor(&self) -> Endofunctor {
        let d1 = self.clone();
        let d2 = self.clone();
        Endofunctor::new(
            format!("colim[{}]", self.shape.name()),
            move |x| d1.at(x).colimit().0,
            move |f| {
                let dx = d2.at(f.dom());
                let dy = d2.at(f.cod());
                let (cx, _) = dx.colimit();
                let (cy, cocone_y) = dy.colimit();
                FinFun::from_fn(cx, cy, |cls| {
                    let rep = cls.expect_cls().expect_tuple();
                    let o = match &rep[0] {
                        Element::Atom(o) => *o as usize,
                        _ => unreachable!(),
                    };
                    let mapped = d2.functors[o].map(f).apply(&rep[1]);
                    cocone_y[o].apply(&mapped)
                })
                .expect("colimit arrow total")
            },
        )
    }

    /// The pointwise limit as an endofunctor: matching families encoded as
    /// tuples indexed by the objects in order.
    pub fn limit_functor(&self) -> Endofunctor {
        let d1 = self.clone();
        let d2 = self.clone();
        Endofunctor::new(
            format!("lim[{}]", self.shape.name()),
            move |x| limit_object(&d1.at(x)),
            move |f| {
                let dom = limit_object(&d2.at(f.dom()));
                let cod = limit_object(&d2.at(f.cod()));
                let comps: Vec<FinFun> =
                    d2.functors.iter().map(|g| g.map(f)).collect();
                FinFun::from_fn(dom, cod, |family| {
                    Element::Tuple(
                        family
                            .expect_tuple()
                            .iter()
                            .enumerate()
                            .map(|(o, e)| comps[o].apply(e))
                            .collect(),
                    )
                })
                .expect("limit arrow total")
            },
        )
    }

    /// The differenced diagram, with transitions differenced alongside.
    pub fn delta_diagram(&self, params: &CheckParams) -> Result<FunctorDiagram> {
        for f in &self.functors {
            if !f.is_taut_verified() {
                return Err(Error::NotTautVerified(f.name().to_string()));
            }
        }
        let mut transitions = Vec::new();
        for t in &self.transitions {
            t.src().require_taut()?;
            t.dst().require_taut()?;
            let r = t.verify_taut(params)?;
            if !r.passed() {
                return Err(Error::NotTaut(
                    t.name().to_string(),
                    r.witnesses[0].detail.clone(),
                ));
            }
            transitions.push(delta_transf(t)?);
        }
        let functors = self.functors.iter().map(delta).collect::<Result<Vec<_>>>()?;
        FunctorDiagram::new(self.shape.clone(), functors, transitions)
    }

    fn is_connected(&self) -> bool {
        let n = self.shape.n_objects();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(o) = stack.pop() {
            for m in self.shape.morphisms() {
                for (a, b) in [(self.shape.src(m), self.shape.dst(m))] {
                    if a == o && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                    if b == o && !seen[a] {
                        seen[a] = true;
                        stack.push(a);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

fn limit_object(d: &SetDiagram) -> FinSet {
    let factors: Vec<FinSet> = (0..d.shape().n_objects())
        .map(|o| d.object(o).clone())
        .collect();
    let candidates = FinSet::tuples(&factors);
    FinSet::new(
        candidates
            .iter()
            .filter(|family| {
                let items = family.expect_tuple();
                d.shape().morphisms().all(|m| {
                    d.arrow(m).apply(&items[d.shape().src(m)]) == items[d.shape().dst(m)]
                })
            })
            .cloned()
            .collect(),
    )
}

/// Verifies `colim Delta[Gamma] = Delta[colim Gamma]` with the canonical
/// comparison, for a confluent shape and taut transitions.
pub fn colimit_commutation_check(d: &FunctorDiagram, bound: usize) -> Result<Report> {
    if !d.shape.is_confluent() {
        return Err(Error::NotConfluent(d.shape.name().to_string()));
    }
    let params = CheckParams::default();
    let colim = d.colimit_functor();
    let r = colim.verify_taut(&params);
    if !r.passed() {
        return Err(Error::NotTautVerified(colim.name().to_string()));
    }
    let delta_colim = delta(&colim)?;
    let dd = d.delta_diagram(&params)?;
    let colim_delta = dd.colimit_functor();

    // canonical comparison: a class of new elements maps to the class of
    // any representative in colim Gamma(X+1)
    let d2 = d.clone();
    let (l2, r2) = (colim_delta.clone(), delta_colim.clone());
    let witness = NatTransf::new(
        "colim-delta-comparison",
        colim_delta.clone(),
        delta_colim.clone(),
        move |x| {
            let (sx, _, _) = successor_object(x);
            let (_, cocone_sx) = d2.at(&sx).colimit();
            FinFun::from_fn(l2.at(x), r2.at(x), |cls| {
                let rep = cls.expect_cls().expect_tuple();
                let o = match &rep[0] {
                    Element::Atom(o) => *o as usize,
                    _ => unreachable!(),
                };
                cocone_sx[o].apply(&rep[1])
            })
            .expect("comparison lands in the new part of the colimit")
        },
    );
    let iso = iso_witness(
        &colim_delta,
        &delta_colim,
        &CheckParams::with_bound(bound),
        Some(&witness),
    );
    let mut report = Report::new(format!("colimit-commutation[{}]", d.shape.name()));
    report.absorb(iso.report);
    Ok(report)
}

/// Verifies `Delta[lim Gamma] = lim Delta[Gamma]` for a non-empty connected
/// shape and taut transitions.
pub fn connected_limit_commutation_check(d: &FunctorDiagram, bound: usize) -> Result<Report> {
    if !d.is_connected() {
        return Err(Error::Precondition(
            "limit commutation requires a non-empty connected shape".into(),
        ));
    }
    let params = CheckParams::default();
    let lim = d.limit_functor();
    let r = lim.verify_taut(&params);
    if !r.passed() {
        return Err(Error::NotTautVerified(lim.name().to_string()));
    }
    let delta_lim = delta(&lim)?;
    let dd = d.delta_diagram(&params)?;
    let lim_delta = dd.limit_functor();

    // a matching family of new elements is a new matching family
    let (l2, r2) = (lim_delta.clone(), delta_lim.clone());
    let witness = NatTransf::new(
        "lim-delta-comparison",
        lim_delta.clone(),
        delta_lim.clone(),
        move |x| {
            FinFun::from_fn(l2.at(x), r2.at(x), |family| family.clone())
                .expect("families of new elements are new families")
        },
    );
    let iso = iso_witness(
        &lim_delta,
        &delta_lim,
        &CheckParams::with_bound(bound),
        Some(&witness),
    );
    let mut report = Report::new(format!("limit-commutation[{}]", d.shape.name()));
    report.absorb(iso.report);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::{constant, identity, power, swap_transf};

    fn verified(f: Endofunctor) -> Endofunctor {
        assert!(f.verify_taut(&CheckParams::default()).passed(), "{}", f.name());
        f
    }

    #[test]
    fn binary_product_rule_for_identities() {
        // RHS = Delta[X^2] has 2k+1 elements; LHS = X + X + 1
        let f = verified(identity());
        let g = verified(identity());
        let r = product_rule_check(&f, &g, 3).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn product_rule_with_constant_degenerates() {
        let c = verified(constant(FinSet::atoms(2)));
        let g = verified(power(2));
        let r = product_rule_check(&c, &g, 3).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn ternary_product_rule() {
        let fs = vec![
            verified(identity()),
            verified(identity()),
            verified(identity()),
        ];
        let r = finite_product_rule_check(&fs, 3).unwrap();
        assert!(r.passed(), "{r}");
        // seven proper-subset summands; total (k+1)^3 - k^3 checked by iso
    }

    fn coproduct_diagram() -> FunctorDiagram {
        let shape = FinCat::discrete(2);
        let f = verified(power(2));
        let g = verified(identity());
        let transitions = vec![NatTransf::identity(&f), NatTransf::identity(&g)];
        FunctorDiagram::new(shape, vec![f, g], transitions).unwrap()
    }

    #[test]
    fn delta_commutes_with_binary_coproducts() {
        let d = coproduct_diagram();
        let r = colimit_commutation_check(&d, 3).unwrap();
        assert!(r.passed(), "{r}");
    }

    fn z2_square_diagram() -> FunctorDiagram {
        let shape = FinCat::cyclic_group(2);
        let f = verified(power(2));
        let transitions = vec![NatTransf::identity(&f), swap_transf()];
        FunctorDiagram::new(shape, vec![f], transitions).unwrap()
    }

    #[test]
    fn delta_commutes_with_group_quotient() {
        let d = z2_square_diagram();
        let r = colimit_commutation_check(&d, 3).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn delta_commutes_with_equalizers() {
        // equalizer of id, swap : X^2 => X^2 is the diagonal (iso to X)
        let shape = FinCat::parallel_pair();
        let f = verified(power(2));
        let transitions = vec![
            NatTransf::identity(&f),
            NatTransf::identity(&f),
            NatTransf::identity(&f),
            swap_transf(),
        ];
        let d = FunctorDiagram::new(shape, vec![f.clone(), f], transitions).unwrap();
        let lim = d.limit_functor();
        for k in 0..=3 {
            assert_eq!(lim.at(&FinSet::atoms(k)).len(), k); // the diagonal
        }
        let r = connected_limit_commutation_check(&d, 3).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn non_confluent_shape_is_refused() {
        let shape = FinCat::span();
        let f = verified(identity());
        let transitions = vec![
            NatTransf::identity(&f),
            NatTransf::identity(&f),
            NatTransf::identity(&f),
            NatTransf::identity(&f),
            NatTransf::identity(&f),
        ];
        let d = FunctorDiagram::new(shape, vec![f.clone(), f.clone(), f], transitions).unwrap();
        assert!(matches!(
            colimit_commutation_check(&d, 2),
            Err(Error::NotConfluent(_))
        ));
    }
}
