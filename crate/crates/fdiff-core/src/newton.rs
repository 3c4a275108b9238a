//! Soft species (functors on finite cardinals and surjections), Newton
//! summation as a left Kan extension, the iterated-differences-at-zero
//! species of a taut functor, softening of ordinary species, and the
//! fundamental-theorem checks: the unit isomorphism and the
//! taut-factorization criterion.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classes::SpeciesSpec;
use crate::delta::multi_delta_object;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::finset::{
    enumerate_monos, enumerate_surjections, pointer_extension, FinFun, FinSet,
};
use crate::functor::{iso_witness, CheckParams, Endofunctor, NatTransf};
use crate::group::{all_perms, perm_inverse, permute_tuple, Perm, PermGroup};
use crate::report::Report;

/// All surjections `m -> n` as index vectors, in a fixed enumeration order.
pub fn surjection_vectors(m: usize, n: usize) -> Vec<Vec<usize>> {
    enumerate_surjections(m, n)
        .into_iter()
        .map(|f| (0..m).map(|i| f.apply_idx(i)).collect())
        .collect()
}

/// A functor on the truncation of the surjection category: finite sets
/// `G(0..=bound)` plus the action of every surjection, validated for
/// functoriality at construction.
#[derive(Clone, Debug)]
pub struct SoftSpecies {
    bound: usize,
    sets: Vec<FinSet>,
    actions: HashMap<(usize, usize, Vec<usize>), FinFun>,
}

impl SoftSpecies {
    pub fn new(
        bound: usize,
        sets: Vec<FinSet>,
        act: impl Fn(usize, usize, &[usize], &Element) -> Element,
    ) -> Result<Self> {
        if sets.len() != bound + 1 {
            return Err(Error::InvalidSpec("one carrier per degree".into()));
        }
        let mut actions = HashMap::new();
        for m in 0..=bound {
            for n in 0..=m {
                for sigma in surjection_vectors(m, n) {
                    let f = FinFun::from_fn(sets[m].clone(), sets[n].clone(), |a| {
                        act(m, n, &sigma, a)
                    })
                    .map_err(|e| {
                        Error::InvalidSpec(format!("action of {sigma:?} invalid: {e}"))
                    })?;
                    actions.insert((m, n, sigma), f);
                }
            }
        }
        let species = SoftSpecies { bound, sets, actions };
        species.validate()?;
        Ok(species)
    }

    fn validate(&self) -> Result<()> {
        for n in 0..=self.bound {
            let id: Vec<usize> = (0..n).collect();
            if !self.action(n, n, &id).is_identity() {
                return Err(Error::InvalidSpec("identity does not act trivially".into()));
            }
        }
        for m in 0..=self.bound {
            for k in 0..=m {
                for sigma in surjection_vectors(m, k) {
                    for n in 0..=k {
                        for tau in surjection_vectors(k, n) {
                            let composite: Vec<usize> =
                                sigma.iter().map(|&i| tau[i]).collect();
                            let lhs = FinFun::compose(
                                self.action(k, n, &tau),
                                self.action(m, k, &sigma),
                            )
                            .expect("composable");
                            if &lhs != self.action(m, n, &composite) {
                                return Err(Error::InvalidSpec(
                                    "actions do not compose functorially".into(),
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn set(&self, n: usize) -> &FinSet {
        &self.sets[n]
    }

    pub fn action(&self, m: usize, n: usize, sigma: &[usize]) -> &FinFun {
        self.actions
            .get(&(m, n, sigma.to_vec()))
            .unwrap_or_else(|| panic!("no action for {m}->{n} via {sigma:?}"))
    }

    /// The covariant representable at degree `k`: `n -> Surj(k, n)`, acting
    /// by postcomposition. Surjections are encoded as tuples of atoms.
    pub fn representable(bound: usize, k: usize) -> Result<Self> {
        let sets: Vec<FinSet> = (0..=bound)
            .map(|n| {
                FinSet::new(
                    surjection_vectors(k, n)
                        .into_iter()
                        .map(|v| {
                            Element::Tuple(
                                v.into_iter().map(|i| Element::atom(i as u32)).collect(),
                            )
                        })
                        .collect(),
                )
            })
            .collect();
        SoftSpecies::new(bound, sets, |_m, _n, sigma, e| {
            Element::Tuple(
                e.expect_tuple()
                    .iter()
                    .map(|a| match a {
                        Element::Atom(i) => Element::atom(sigma[*i as usize] as u32),
                        _ => unreachable!(),
                    })
                    .collect(),
            )
        })
    }

    /// Tagged coproduct of soft species of equal truncation.
    pub fn coproduct(parts: &[SoftSpecies]) -> Result<Self> {
        let bound = parts
            .first()
            .ok_or_else(|| Error::InvalidSpec("empty coproduct".into()))?
            .bound;
        if parts.iter().any(|p| p.bound != bound) {
            return Err(Error::InvalidSpec("mismatched truncations".into()));
        }
        let sets: Vec<FinSet> = (0..=bound)
            .map(|n| {
                FinSet::new(
                    parts
                        .iter()
                        .enumerate()
                        .flat_map(|(i, p)| {
                            p.set(n)
                                .iter()
                                .map(|e| Element::tag(i.to_string(), e.clone()))
                                .collect::<Vec<_>>()
                        })
                        .collect(),
                )
            })
            .collect();
        let parts2 = parts.to_vec();
        SoftSpecies::new(bound, sets, move |m, n, sigma, e| {
            let (label, inner) = e.expect_tag();
            let i: usize = label.parse().unwrap();
            Element::tag(label, parts2[i].action(m, n, sigma).apply(inner))
        })
    }

    /// A seeded pseudo-random soft species: a coproduct of covariant
    /// representables and softened orbit species, retried deterministically
    /// until every degree fits `max_size`.
    pub fn seeded_random(bound: usize, max_size: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _attempt in 0..64 {
            let n_parts = rng.gen_range(1..=3usize);
            let mut parts = Vec::new();
            for _ in 0..n_parts {
                if rng.gen_bool(0.5) {
                    let k = rng.gen_range(0..=bound);
                    parts.push(SoftSpecies::representable(bound, k)?);
                } else {
                    let mut coeff = Vec::new();
                    for n in 0..=bound {
                        let sn = PermGroup::symmetric(n)?;
                        let subgroups = sn.all_subgroups()?;
                        // up to one coset orbit per degree, sometimes empty
                        if rng.gen_bool(0.4) || n == 0 {
                            let h = &subgroups[rng.gen_range(0..subgroups.len())];
                            coeff.push(coset_action(n, h)?);
                        } else {
                            coeff.push(crate::group::GroupAction::new(
                                sn,
                                FinSet::empty(),
                                |_, e| e.clone(),
                            )?);
                        }
                    }
                    parts.push(soften(&SpeciesSpec::new(coeff)?)?);
                }
            }
            let candidate = SoftSpecies::coproduct(&parts)?;
            if (0..=bound).all(|n| candidate.set(n).len() <= max_size) {
                return Ok(candidate);
            }
        }
        // deterministic fallback: a single small representable
        SoftSpecies::representable(bound, 1.min(bound))
    }
}

fn coset_action(n: usize, sub: &PermGroup) -> Result<crate::group::GroupAction> {
    let sn = PermGroup::symmetric(n)?;
    let subc = sub.clone();
    let coset_min = move |p: &Perm| -> Element {
        Element::Tuple(
            subc.elements()
                .iter()
                .map(|g| crate::group::perm_compose(p, g))
                .min()
                .unwrap()
                .iter()
                .map(|&i| Element::atom(i as u32))
                .collect(),
        )
    };
    let carrier = FinSet::new(sn.elements().iter().map(&coset_min).collect());
    let cm = coset_min.clone();
    crate::group::GroupAction::new(sn, carrier, move |g, e| {
        let p: Perm = e
            .expect_tuple()
            .iter()
            .map(|a| match a {
                Element::Atom(i) => *i as usize,
                _ => unreachable!(),
            })
            .collect();
        cm(&crate::group::perm_compose(g, &p))
    })
}

/// Canonical representative of the class of `(a, f)` under the diagonal
/// bijection action: minimize `(f . sigma^{-1}, G(sigma)(a))` over `S_n`.
fn canonical_pair(g: &SoftSpecies, n: usize, a: &Element, f_tuple: &[Element]) -> Element {
    all_perms(n)
        .iter()
        .map(|sigma| {
            let ft = permute_tuple(f_tuple, &perm_inverse(sigma));
            let ga = g.action(n, n, sigma).apply(a);
            Element::Tuple(vec![Element::Tuple(ft), ga])
        })
        .min()
        .expect("permutation group nonempty")
}

fn newton_sum_object(g: &SoftSpecies, x: &FinSet) -> FinSet {
    let mut elems = Vec::new();
    for n in 0..=g.bound() {
        for mono in enumerate_monos(n, x) {
            let f_tuple: Vec<Element> =
                (0..n).map(|i| x.elem(mono.apply_idx(i)).clone()).collect();
            for a in g.set(n).iter() {
                elems.push(Element::tag(
                    n.to_string(),
                    Element::cls(canonical_pair(g, n, a, &f_tuple)),
                ));
            }
        }
    }
    FinSet::new(elems)
}

/// Pushes a class forward along `phi`: compose, take the image
/// factorization, act by the surjective part, and re-canonicalize.
fn newton_push(g: &SoftSpecies, phi: &FinFun, e: &Element) -> Element {
    let (label, cls) = e.expect_tag();
    let n: usize = label.parse().unwrap();
    let pair = cls.expect_cls().expect_tuple();
    let f_tuple = pair[0].expect_tuple();
    let a = &pair[1];
    let mapped: Vec<Element> = f_tuple.iter().map(|v| phi.apply(v)).collect();
    let image = FinSet::new(mapped.clone());
    let m = image.len();
    let surj: Vec<usize> = mapped
        .iter()
        .map(|v| image.index_of(v).unwrap())
        .collect();
    let b = g.action(n, m, &surj).apply(a);
    let g_tuple: Vec<Element> = image.iter().cloned().collect();
    Element::tag(m.to_string(), Element::cls(canonical_pair(g, m, &b, &g_tuple)))
}

/// The Newton sum: elements are classes of pairs (a point of `G(n)`, a mono
/// `n -> X`) under bijections, with arrow maps via image factorization and
/// the surjection action.
pub fn newton_sum(g: &SoftSpecies) -> Endofunctor {
    let g1 = g.clone();
    let g2 = g.clone();
    Endofunctor::new(
        format!("newton(N={})", g.bound()),
        move |x| newton_sum_object(&g1, x),
        move |phi| {
            FinFun::from_fn(
                newton_sum_object(&g2, phi.dom()),
                newton_sum_object(&g2, phi.cod()),
                |e| newton_push(&g2, phi, e),
            )
            .expect("newton arrow total")
        },
    )
}

/// The taut transformation induced by a degreewise natural map of soft
/// species: `[a, f] -> [t_n(a), f]`. Naturality over the truncation is
/// checked first.
pub fn newton_sum_transf(
    src: &SoftSpecies,
    dst: &SoftSpecies,
    maps: &[FinFun],
) -> Result<NatTransf> {
    if maps.len() != src.bound() + 1 || src.bound() != dst.bound() {
        return Err(Error::ShapeMismatch("one component per degree".into()));
    }
    for m in 0..=src.bound() {
        for n in 0..=m {
            for sigma in surjection_vectors(m, n) {
                let lhs = FinFun::compose(&maps[n], src.action(m, n, &sigma))
                    .map_err(|_| Error::ShapeMismatch("component endpoints".into()))?;
                let rhs = FinFun::compose(dst.action(m, n, &sigma), &maps[m])
                    .map_err(|_| Error::ShapeMismatch("component endpoints".into()))?;
                if lhs != rhs {
                    return Err(Error::Precondition(
                        "degreewise maps are not natural over surjections".into(),
                    ));
                }
            }
        }
    }
    let sf = newton_sum(src);
    let df = newton_sum(dst);
    let (s2, d2) = (src.clone(), dst.clone());
    let maps = maps.to_vec();
    let (sf2, df2) = (sf.clone(), df.clone());
    Ok(NatTransf::new(
        "newton-transf",
        sf,
        df,
        move |x| {
            FinFun::from_fn(sf2.at(x), df2.at(x), |e| {
                let (label, cls) = e.expect_tag();
                let n: usize = label.parse().unwrap();
                let pair = cls.expect_cls().expect_tuple();
                let f_tuple = pair[0].expect_tuple();
                let b = maps[n].apply(&pair[1]);
                let _ = &s2;
                Element::tag(label, Element::cls(canonical_pair(&d2, n, &b, f_tuple)))
            })
            .expect("newton transformation total")
        },
    ))
}

/// The canonical pointer sets `0 + n` and the extension maps between them.
pub fn pointer_set(n: usize) -> (FinSet, Vec<Element>) {
    pointer_extension(&FinSet::empty(), n)
}

/// Iterated differences at zero as a soft species: `G(n) = Delta^n[F](0)`,
/// with a surjection acting through `F` of the induced pointer map. The
/// landing of each action inside the higher difference is asserted.
pub fn delta_star(f: &Endofunctor, bound: usize) -> Result<SoftSpecies> {
    if !f.is_taut_verified() {
        return Err(Error::NotTautVerified(f.name().to_string()));
    }
    let mut sets = Vec::new();
    for n in 0..=bound {
        let x = FinSet::empty();
        sets.push(multi_delta_object(f, &x, n));
    }
    let f2 = f.clone();
    SoftSpecies::new(bound, sets, move |m, n, sigma, a| {
        let (pm, pts_m) = pointer_set(m);
        let (pn, pts_n) = pointer_set(n);
        let map = FinFun::from_fn(pm, pn, |p| {
            let i = pts_m.iter().position(|q| q == p).expect("pointer");
            pts_n[sigma[i]].clone()
        })
        .expect("pointer map total");
        f2.map(&map).apply(a)
    })
    .map_err(|e| match e {
        Error::InvalidSpec(msg) => Error::InvalidSpec(format!(
            "surjection action failed to land in the higher difference: {msg}"
        )),
        other => other,
    })
}

/// Softening: the left Kan extension of an ordinary species along the
/// inclusion of bijections into surjections. Degree-`n` elements are
/// classes of pairs (a surjection `m -> n`, a coefficient of degree `m`)
/// under precomposition/action by bijections.
pub fn soften(s: &SpeciesSpec) -> Result<SoftSpecies> {
    let bound = s.degree_bound();
    let canon = {
        let s = s.clone();
        move |m: usize, surj: &[usize], c: &Element| -> Element {
            all_perms(m)
                .iter()
                .map(|tau| {
                    // (e, c) ~ (e . tau, tau^{-1} c)
                    let e2: Vec<usize> = tau.iter().map(|&i| surj[i]).collect();
                    let c2 = s.coeff[m].act(&perm_inverse(tau), c);
                    Element::Tuple(vec![
                        Element::Tuple(
                            e2.into_iter().map(|i| Element::atom(i as u32)).collect(),
                        ),
                        c2,
                    ])
                })
                .min()
                .expect("group nonempty")
        }
    };
    let mut sets = Vec::new();
    for n in 0..=bound {
        let mut elems = Vec::new();
        for m in n..=bound {
            for surj in surjection_vectors(m, n) {
                for c in s.coeff[m].carrier().iter() {
                    elems.push(Element::tag(
                        m.to_string(),
                        Element::cls(canon(m, &surj, c)),
                    ));
                }
            }
        }
        sets.push(FinSet::new(elems));
    }
    SoftSpecies::new(bound, sets, move |_m, _n, sigma, e| {
        let (label, cls) = e.expect_tag();
        let m: usize = label.parse().unwrap();
        let pair = cls.expect_cls().expect_tuple();
        let surj: Vec<usize> = pair[0]
            .expect_tuple()
            .iter()
            .map(|a| match a {
                Element::Atom(i) => *i as usize,
                _ => unreachable!(),
            })
            .collect();
        let pushed: Vec<usize> = surj.iter().map(|&i| sigma[i]).collect();
        Element::tag(label, Element::cls(canon(m, &pushed, &pair[1])))
    })
}

/// Part I of the summation theorem: the unit `a -> [a, id]` is a bijection
/// `G(n) -> Delta^n[tilde G](0)` commuting with all surjection actions.
pub fn unit_iso_check(g: &SoftSpecies) -> Result<Report> {
    let mut report = Report::new("newton-unit").with_param("bound", g.bound());
    let f = newton_sum(g);
    let r = f.verify_taut(&CheckParams::default());
    if !r.passed() {
        return Err(Error::NotTautVerified(f.name().to_string()));
    }
    let ds = delta_star(&f, g.bound())?;
    let unit = |n: usize, a: &Element| -> Element {
        let (_, pts) = pointer_set(n);
        Element::tag(n.to_string(), Element::cls(canonical_pair(g, n, a, &pts)))
    };
    for n in 0..=g.bound() {
        report.record_case();
        let image: Vec<Element> = g.set(n).iter().map(|a| unit(n, a)).collect();
        let image_set = FinSet::new(image.clone());
        if image_set.len() != g.set(n).len() || image_set != *ds.set(n) {
            report.fail(
                format!("degree {n}"),
                format!(
                    "unit is not a bijection: |G({n})| = {} vs |Delta^{n}(0)| = {}",
                    g.set(n).len(),
                    ds.set(n).len()
                ),
            );
            continue;
        }
        // equivariance with every surjection out of n
        for k in 0..=n {
            for sigma in surjection_vectors(n, k) {
                report.record_case();
                for a in g.set(n).iter() {
                    let via_g = unit(k, &g.action(n, k, &sigma).apply(a));
                    let via_ds = ds.action(n, k, &sigma).apply(&unit(n, a));
                    if via_g != via_ds {
                        report.fail(
                            format!("degree {n} -> {k}"),
                            format!("unit not equivariant on {a}"),
                        );
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Outcome of the factorization criterion on one instance.
#[derive(Debug)]
pub struct FactorizationOutcome {
    /// Whether every `u_n` lands inside `Delta^n[F](0)`.
    pub lands: bool,
    /// Whether the mate `tilde G -> F` passes the taut check.
    pub taut: bool,
    pub report: Report,
}

impl FactorizationOutcome {
    pub fn biconditional_holds(&self) -> bool {
        self.lands == self.taut
    }
}

/// Part II in its proof form: for `u : G -> F . J` natural over the
/// truncation, the mate `t[n, a, f] = F(f)(u_n(a))` is taut iff `u`
/// factors through the differences-at-zero species. Both sides are
/// evaluated on the supplied instance.
pub fn factorization_check(
    g: &SoftSpecies,
    f: &Endofunctor,
    u: &[FinFun],
    bound: usize,
) -> Result<FactorizationOutcome> {
    if !f.is_taut_verified() {
        return Err(Error::NotTautVerified(f.name().to_string()));
    }
    if u.len() != g.bound() + 1 {
        return Err(Error::ShapeMismatch("one component per degree".into()));
    }
    // naturality of u over the truncation (precondition)
    for m in 0..=g.bound() {
        for n in 0..=m {
            for sigma in surjection_vectors(m, n) {
                let (pm, pts_m) = pointer_set(m);
                let (pn, pts_n) = pointer_set(n);
                let pmap = FinFun::from_fn(pm, pn, |p| {
                    let i = pts_m.iter().position(|q| q == p).expect("pointer");
                    pts_n[sigma[i]].clone()
                })
                .expect("pointer map total");
                let lhs = FinFun::compose(&u[n], g.action(m, n, &sigma))
                    .map_err(|_| Error::ShapeMismatch("u endpoints".into()))?;
                let rhs = FinFun::compose(&f.map(&pmap), &u[m])
                    .map_err(|_| Error::ShapeMismatch("u endpoints".into()))?;
                if lhs != rhs {
                    return Err(Error::Precondition(
                        "u is not natural over the surjection truncation".into(),
                    ));
                }
            }
        }
    }
    let mut report = Report::new("newton-factorization").with_param("bound", bound);
    let mut lands = true;
    for n in 0..=g.bound() {
        report.record_case();
        let target = multi_delta_object(f, &FinSet::empty(), n);
        for a in g.set(n).iter() {
            if !target.contains(&u[n].apply(a)) {
                lands = false;
            }
        }
    }
    // the mate
    let gf = newton_sum(g);
    gf.require_taut()?;
    let (g2, f2) = (g.clone(), f.clone());
    let u2 = u.to_vec();
    let (gf2, fc) = (gf.clone(), f.clone());
    let mate = NatTransf::new("newton-mate", gf.clone(), f.clone(), move |x| {
        FinFun::from_fn(gf2.at(x), fc.at(x), |e| {
            let (label, cls) = e.expect_tag();
            let n: usize = label.parse().unwrap();
            let pair = cls.expect_cls().expect_tuple();
            let f_tuple = pair[0].expect_tuple();
            let (pn, pts) = pointer_set(n);
            let fbar = FinFun::from_fn(pn.clone(), x.clone(), |p| {
                let i = pts.iter().position(|q| q == p).expect("pointer");
                f_tuple[i].clone()
            })
            .expect("mono into X total");
            let _ = &g2;
            f2.map(&fbar).apply(&u2[n].apply(&pair[1]))
        })
        .expect("mate total")
    });
    let taut_report = mate.verify_taut(&CheckParams::with_bound(bound))?;
    let taut = taut_report.passed();
    report
        .params
        .insert("lands".into(), lands.to_string());
    report.params.insert("taut".into(), taut.to_string());
    if lands != taut {
        report.fail(
            "biconditional",
            format!("u lands = {lands} but mate taut = {taut}"),
        );
    }
    Ok(FactorizationOutcome { lands, taut, report })
}

/// The final corollary at desk scale: for a soft analytic `F`, the mate of
/// the identity inclusion `Delta^*[F] -> F . J` is a natural isomorphism
/// `newton_sum(delta_star(F)) -> F` at sizes up to `bound_x`.
pub fn roundtrip_check(f: &Endofunctor, bound_n: usize, bound_x: usize) -> Result<Report> {
    let ds = delta_star(f, bound_n)?;
    let inclusion: Vec<FinFun> = (0..=bound_n)
        .map(|n| {
            let (pn, _) = pointer_set(n);
            FinFun::inclusion(ds.set(n), &f.at(&pn)).expect("differences sit inside F")
        })
        .collect();
    let gf = newton_sum(&ds);
    gf.require_taut()?;
    let (ds2, f2) = (ds.clone(), f.clone());
    let (gf2, fc) = (gf.clone(), f.clone());
    let incl = inclusion;
    let mate = NatTransf::new("newton-counit", gf.clone(), f.clone(), move |x| {
        FinFun::from_fn(gf2.at(x), fc.at(x), |e| {
            let (label, cls) = e.expect_tag();
            let n: usize = label.parse().unwrap();
            let pair = cls.expect_cls().expect_tuple();
            let f_tuple = pair[0].expect_tuple();
            let (pn, pts) = pointer_set(n);
            let fbar = FinFun::from_fn(pn.clone(), x.clone(), |p| {
                let i = pts.iter().position(|q| q == p).expect("pointer");
                f_tuple[i].clone()
            })
            .expect("mono into X total");
            let _ = &ds2;
            f2.map(&fbar).apply(&incl[n].apply(&pair[1]))
        })
        .expect("counit total")
    });
    let iso = iso_witness(&gf, f, &CheckParams::with_bound(bound_x), Some(&mate));
    let mut report = Report::new(format!("newton-roundtrip[{}]", f.name()))
        .with_param("bound_n", bound_n)
        .with_param("bound_x", bound_x);
    report.absorb(iso.report);
    Ok(report)
}

/// Softening is compatible with summation: `newton_sum(soften(s))` is
/// naturally isomorphic to the analytic functor of `s`, via image
/// factorization of the tuple.
pub fn soften_consistency_check(s: &SpeciesSpec, bound: usize) -> Result<Report> {
    let soft = soften(s)?;
    let lhs = crate::classes::analytic_functor(s);
    let rhs = newton_sum(&soft);
    let s2 = s.clone();
    let soft2 = soft.clone();
    let (l2, r2) = (lhs.clone(), rhs.clone());
    let family = NatTransf::new("soften-compare", lhs.clone(), rhs.clone(), move |x| {
        FinFun::from_fn(l2.at(x), r2.at(x), |e| {
            let (label, cls) = e.expect_tag();
            let l: usize = label.parse().unwrap();
            let pair = cls.expect_cls().expect_tuple();
            let tuple = pair[0].expect_tuple();
            let c = &pair[1];
            // image factorization of the tuple as a function l -> X
            let image = FinSet::new(tuple.to_vec());
            let m = image.len();
            let surj: Vec<usize> = tuple
                .iter()
                .map(|v| image.index_of(v).unwrap())
                .collect();
            // the softened point: the class of (surj, c) in degree m
            let soft_point = {
                let canonical = all_perms(l)
                    .iter()
                    .map(|tau| {
                        let e2: Vec<usize> = tau.iter().map(|&i| surj[i]).collect();
                        let c2 = s2.coeff[l].act(&perm_inverse(tau), c);
                        Element::Tuple(vec![
                            Element::Tuple(
                                e2.into_iter()
                                    .map(|i| Element::atom(i as u32))
                                    .collect(),
                            ),
                            c2,
                        ])
                    })
                    .min()
                    .expect("group nonempty");
                Element::tag(l.to_string(), Element::cls(canonical))
            };
            let g_tuple: Vec<Element> = image.iter().cloned().collect();
            Element::tag(
                m.to_string(),
                Element::cls(canonical_pair(&soft2, m, &soft_point, &g_tuple)),
            )
        })
        .expect("comparison total")
    });
    let iso = iso_witness(&lhs, &rhs, &CheckParams::with_bound(bound), Some(&family));
    let mut report = Report::new("soften-consistency").with_param("bound", bound);
    report.absorb(iso.report);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{quot_power_functor, QuotPowerSpec};
    use crate::functor::power;

    fn verified(f: Endofunctor) -> Endofunctor {
        assert!(f.verify_taut(&CheckParams::default()).passed(), "{}", f.name());
        f
    }

    /// `G` concentrated at degree 1 with one point.
    fn point_species() -> SoftSpecies {
        SoftSpecies::new(
            1,
            vec![FinSet::empty(), FinSet::atoms(1)],
            |_m, _n, _s, e| e.clone(),
        )
        .unwrap()
    }

    #[test]
    fn point_species_sums_to_identity() {
        let f = newton_sum(&point_species());
        for k in 0..=4 {
            assert_eq!(f.at(&FinSet::atoms(k)).len(), k);
        }
        assert!(f.verify_taut(&CheckParams::default()).passed());
    }

    /// The square species: one point at degree 1, two at degree 2 with the
    /// free swap action, merging along 2 -> 1.
    fn square_species() -> SoftSpecies {
        SoftSpecies::new(
            2,
            vec![FinSet::empty(), FinSet::atoms(1), FinSet::atoms(2)],
            |m, n, sigma, e| {
                if m == 2 && n == 2 && sigma == [1, 0] {
                    match e {
                        Element::Atom(0) => Element::atom(1),
                        Element::Atom(1) => Element::atom(0),
                        _ => unreachable!(),
                    }
                } else if m == 2 && n == 1 {
                    Element::atom(0)
                } else {
                    e.clone()
                }
            },
        )
        .unwrap()
    }

    #[test]
    fn square_species_counts_like_the_square() {
        let f = newton_sum(&square_species());
        for k in 0..=4 {
            assert_eq!(f.at(&FinSet::atoms(k)).len(), k * k);
        }
    }

    #[test]
    fn delta_star_of_square() {
        let f = verified(power(2));
        let ds = delta_star(&f, 3).unwrap();
        assert_eq!(ds.set(0).len(), 0);
        assert_eq!(ds.set(1).len(), 1);
        assert_eq!(ds.set(2).len(), 2);
        assert_eq!(ds.set(3).len(), 0);
        // the swap acts freely on the two surjective pairs
        let swapped = ds.action(2, 2, &[1, 0]);
        assert!(!swapped.is_identity());
    }

    #[test]
    fn delta_star_of_constant() {
        let c = verified(crate::functor::constant(FinSet::atoms(2)));
        let ds = delta_star(&c, 2).unwrap();
        assert_eq!(ds.set(0).len(), 2);
        assert_eq!(ds.set(1).len(), 0);
        assert_eq!(ds.set(2).len(), 0);
    }

    #[test]
    fn delta_star_of_divided_square() {
        let f = verified(quot_power_functor(&QuotPowerSpec::divided_power(2)));
        let ds = delta_star(&f, 2).unwrap();
        assert_eq!(ds.set(0).len(), 0);
        assert_eq!(ds.set(1).len(), 1);
        assert_eq!(ds.set(2).len(), 1);
        assert!(ds.action(2, 2, &[1, 0]).is_identity());
    }

    #[test]
    fn unit_iso_for_handmade_species() {
        for g in [point_species(), square_species()] {
            let r = unit_iso_check(&g).unwrap();
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn unit_iso_for_degree_zero_species() {
        let g = SoftSpecies::new(0, vec![FinSet::atoms(3)], |_m, _n, _s, e| e.clone()).unwrap();
        let r = unit_iso_check(&g).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn soften_of_free_species_counts() {
        // species of X^2: soften gives sizes |G(1)| = 1, |G(2)| = 2
        let s = SpeciesSpec::free_at(2).unwrap();
        let soft = soften(&s).unwrap();
        assert_eq!(soft.set(1).len(), 1);
        assert_eq!(soft.set(2).len(), 2);
        let r = soften_consistency_check(&s, 4).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn soften_of_divided_species() {
        let s = SpeciesSpec::cosets_at(2, &PermGroup::symmetric(2).unwrap()).unwrap();
        let soft = soften(&s).unwrap();
        assert_eq!(soft.set(1).len(), 1);
        assert_eq!(soft.set(2).len(), 1);
        let r = soften_consistency_check(&s, 3).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn roundtrip_for_small_library() {
        let f = verified(power(2));
        let r = roundtrip_check(&f, 3, 3).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn transf_from_degreewise_collapse() {
        // collapse a two-point degree-2 coefficient to the square species'
        // single-point divided form
        let src = square_species();
        let dst = SoftSpecies::new(
            2,
            vec![FinSet::empty(), FinSet::atoms(1), FinSet::atoms(1)],
            |m, n, _sigma, e| {
                if m == 2 && n == 1 {
                    Element::atom(0)
                } else {
                    e.clone()
                }
            },
        )
        .unwrap();
        let maps = vec![
            FinFun::from_fn(src.set(0).clone(), dst.set(0).clone(), |e| e.clone()).unwrap(),
            FinFun::identity(src.set(1)),
            FinFun::from_fn(src.set(2).clone(), dst.set(2).clone(), |_| Element::atom(0))
                .unwrap(),
        ];
        let t = newton_sum_transf(&src, &dst, &maps).unwrap();
        t.src().require_taut().unwrap();
        t.dst().require_taut().unwrap();
        let r = t.verify_taut(&CheckParams::default()).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn factorization_biconditional_positive_and_negative() {
        // positive: u = the unit into F = newton_sum(G)
        let g = square_species();
        let f = newton_sum(&g);
        f.require_taut().unwrap();
        let u: Vec<FinFun> = (0..=g.bound())
            .map(|n| {
                let (pn, pts) = pointer_set(n);
                FinFun::from_fn(g.set(n).clone(), f.at(&pn), |a| {
                    Element::tag(
                        n.to_string(),
                        Element::cls(canonical_pair(&g, n, a, &pts)),
                    )
                })
                .unwrap()
            })
            .collect();
        let out = factorization_check(&g, &f, &u, 3).unwrap();
        assert!(out.lands && out.taut && out.biconditional_holds(), "{}", out.report);

        // negative: send the two degree-2 points to degenerate elements of
        // F at the two-pointer set (degree-1 classes located at one pointer
        // each, which keeps u natural but lands outside Delta^2[F](0))
        let (p2, pts2) = pointer_set(2);
        let pt = g.set(1).elem(0).clone();
        let degenerate = |i: usize| -> Element {
            Element::tag(
                "1",
                Element::cls(canonical_pair(&g, 1, &pt, &[pts2[i].clone()])),
            )
        };
        let mut bad = u.clone();
        bad[2] = FinFun::from_fn(g.set(2).clone(), f.at(&p2), |a| match a {
            Element::Atom(i) => degenerate(*i as usize),
            _ => unreachable!(),
        })
        .unwrap();
        let out = factorization_check(&g, &f, &bad, 3).unwrap();
        assert!(!out.lands, "degenerate image should fail the landing condition");
        assert!(!out.taut, "mate of a non-landing map should fail tautness");
        assert!(out.biconditional_holds(), "{}", out.report);
    }

    #[test]
    fn degreewise_inclusion_gives_monic_taut_transf() {
        // the point species includes degreewise into the square species
        let src = point_species_padded();
        let dst = square_species();
        let maps = vec![
            FinFun::from_fn(src.set(0).clone(), dst.set(0).clone(), |e| e.clone()).unwrap(),
            FinFun::identity(src.set(1)),
            FinFun::from_fn(src.set(2).clone(), dst.set(2).clone(), |e| e.clone()).unwrap(),
        ];
        let t = newton_sum_transf(&src, &dst, &maps).unwrap();
        t.src().require_taut().unwrap();
        t.dst().require_taut().unwrap();
        assert!(t.verify_taut(&CheckParams::default()).unwrap().passed());
        for k in 0..=3 {
            assert!(t.at(&FinSet::atoms(k)).is_injective());
        }
    }

    fn point_species_padded() -> SoftSpecies {
        SoftSpecies::new(
            2,
            vec![FinSet::empty(), FinSet::atoms(1), FinSet::empty()],
            |_m, _n, _s, e| e.clone(),
        )
        .unwrap()
    }

    #[test]
    fn truncation_is_monotone_on_supported_species() {
        // padding the square species with an empty degree changes nothing
        let padded = SoftSpecies::new(
            3,
            vec![
                FinSet::empty(),
                FinSet::atoms(1),
                FinSet::atoms(2),
                FinSet::empty(),
            ],
            |m, n, sigma, e| {
                if m == 2 && n == 2 && sigma == [1, 0] {
                    match e {
                        Element::Atom(0) => Element::atom(1),
                        Element::Atom(1) => Element::atom(0),
                        _ => unreachable!(),
                    }
                } else if m == 2 && n == 1 {
                    Element::atom(0)
                } else {
                    e.clone()
                }
            },
        )
        .unwrap();
        let small = newton_sum(&square_species());
        let big = newton_sum(&padded);
        for k in 0..=4 {
            let x = FinSet::atoms(k);
            assert_eq!(small.at(&x).len(), big.at(&x).len());
        }
    }

    #[test]
    fn truncated_series_of_powerset_undercounts() {
        // the powerset functor has differences at zero in every degree, so
        // a truncated summation falls short beyond the truncation;
        // comparison only, not an isomorphism claim
        let p = verified(crate::classes::powerset_functor());
        let ds = delta_star(&p, 3).unwrap();
        for n in 0..=3 {
            assert_eq!(ds.set(n).len(), 1);
        }
        let truncated = newton_sum(&ds);
        for k in 0..=3usize {
            assert_eq!(truncated.at(&FinSet::atoms(k)).len(), 1 << k);
        }
        let k = 4usize;
        let truncated_count = truncated.at(&FinSet::atoms(k)).len();
        assert_eq!(truncated_count, 15); // sum of C(4, n) for n <= 3
        assert!(truncated_count < 1 << k);
    }

    #[test]
    fn seeded_species_are_functorial_and_bounded() {
        for seed in 0..5u64 {
            let g = SoftSpecies::seeded_random(3, 4, crate::functor::DEFAULT_SEED + seed)
                .unwrap();
            for n in 0..=3 {
                assert!(g.set(n).len() <= 4);
            }
        }
    }

    #[test]
    fn representable_species_sizes() {
        let g = SoftSpecies::representable(3, 2).unwrap();
        assert_eq!(g.set(1).len(), 1);
        assert_eq!(g.set(2).len(), 2);
        assert_eq!(g.set(3).len(), 0);
    }
}
