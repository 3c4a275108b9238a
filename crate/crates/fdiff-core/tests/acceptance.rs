//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Run with `cargo test -p fdiff-core --test acceptance -- --nocapture`
//! to see the lines.

use std::time::Instant;

use fdiff_core::chain::{
    chain_rule_associativity_check, chain_rule_check, chain_rule_counts,
    chain_rule_unit_checks, fit_integer_polynomial, tangent_monad_check, ChainAssocParams,
};
use fdiff_core::classes::{
    analytic_functor, enumerate_sup_maps, euler_check, filter_functor, filter_monad,
    lattice_map_transf, monad_laws_check, normalized_exponential, powerset_functor,
    powerset_monad, quot_power_functor, reconstruct_phi,
    ultrafilter_functor, ClassSpec, DirichletSpec, Lattice, PolySpec, QuotPowerSpec,
    SpeciesSpec,
};
use fdiff_core::classes::lattice::{n_star, small_lattice_library};
use fdiff_core::delta::symbolic::{symbolic_delta, verify_symbolic_delta};
use fdiff_core::delta::{counting_law_check, delta};
use fdiff_core::diagram::{
    check_colimit_commutes_with_inverse_images, confluent_via_representables,
    CommutationParams, FinCat,
};
use fdiff_core::finset::{pointer_extension, FinFun, FinSet};
use fdiff_core::functor::{compose, identity, power, sum, CheckParams, Endofunctor};
use fdiff_core::group::PermGroup;
use fdiff_core::newton::{
    delta_star, factorization_check, newton_sum, pointer_set, roundtrip_check,
    unit_iso_check, SoftSpecies,
};
use fdiff_core::Element;

fn outcome(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {}: {} ({detail})",
        criterion,
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// The shipped instance library for criteria 1 and 2.
fn library() -> Vec<Endofunctor> {
    let mut out: Vec<Endofunctor> = Vec::new();
    for n in 1..=4 {
        out.push(power(n));
    }
    for n in 1..=4 {
        out.push(quot_power_functor(&QuotPowerSpec::divided_power(n)));
    }
    // three proper subgroups
    out.push(quot_power_functor(
        &QuotPowerSpec::new(vec![(3, PermGroup::cyclic(3).unwrap())]).unwrap(),
    ));
    out.push(quot_power_functor(
        &QuotPowerSpec::new(vec![(
            4,
            PermGroup::from_generators(4, vec![vec![1, 0, 3, 2]]).unwrap(),
        )])
        .unwrap(),
    ));
    out.push(quot_power_functor(
        &QuotPowerSpec::new(vec![(
            4,
            PermGroup::from_generators(4, vec![vec![1, 0, 2, 3]]).unwrap(),
        )])
        .unwrap(),
    ));
    // two analytic
    out.push(analytic_functor(&SpeciesSpec::free_at(2).unwrap()));
    out.push(analytic_functor(
        &SpeciesSpec::cosets_at(3, &PermGroup::cyclic(3).unwrap()).unwrap(),
    ));
    // three Dirichlet, including 6_*
    out.push(normalized_exponential(&Lattice::chain(2).unwrap()));
    out.push(normalized_exponential(&Lattice::chain(3).unwrap()));
    out.push(normalized_exponential(&n_star(6).unwrap()));
    // the monads
    out.push(filter_functor());
    out.push(powerset_functor());
    out.push(ultrafilter_functor());
    out
}

#[test]
fn criterion_1_tautness_suite() {
    let start = Instant::now();
    let lib = library();
    assert!(lib.len() >= 12, "library must ship at least 12 instances");
    let mut all = true;
    let mut detail = String::new();
    for f in &lib {
        let r = f.verify_taut(&CheckParams::default());
        if !r.passed() {
            all = false;
            detail = format!("{} failed: {r}", f.name());
            break;
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs() >= 60 {
        all = false;
        detail = format!("runtime {elapsed:?} exceeds 60 s");
    }
    outcome(
        "1 (tautness suite)",
        all,
        &format!("{n} instances, exhaustive K=3, {elapsed:?} {detail}", n = lib.len()),
    );
}

#[test]
fn criterion_2_counting_law() {
    let mut all = true;
    let mut detail = String::new();
    for f in library() {
        f.verify_taut(&CheckParams::default());
        let r = counting_law_check(&f, 5).unwrap();
        if !r.passed() {
            all = false;
            detail = format!("{r}");
            break;
        }
    }
    outcome("2 (counting law k <= 5)", all, &detail);
}

#[test]
fn criterion_3_closed_form_differences() {
    let specs: Vec<ClassSpec> = vec![
        ClassSpec::Poly(PolySpec::new(vec![3])),
        ClassSpec::Poly(PolySpec::new(vec![0, 1, 2])),
        ClassSpec::QuotPower(QuotPowerSpec::divided_power(2)),
        ClassSpec::QuotPower(QuotPowerSpec::divided_power(3)),
        ClassSpec::QuotPower(
            QuotPowerSpec::new(vec![(3, PermGroup::cyclic(3).unwrap())]).unwrap(),
        ),
        ClassSpec::Species(SpeciesSpec::free_at(2).unwrap()),
        ClassSpec::Species(
            SpeciesSpec::cosets_at(3, &PermGroup::cyclic(3).unwrap()).unwrap(),
        ),
        ClassSpec::NormalizedExponential(Lattice::chain(3).unwrap()),
        ClassSpec::NormalizedExponential(n_star(6).unwrap()),
        ClassSpec::FullExponential(Lattice::chain(2).unwrap()),
        ClassSpec::Dirichlet(DirichletSpec {
            terms: vec![(FinSet::atoms(2), Lattice::chain(2).unwrap())],
        }),
        ClassSpec::FilterMonad,
        ClassSpec::ProperFilter,
        ClassSpec::Powerset,
        ClassSpec::Ultrafilter,
    ];
    let mut all = true;
    let mut detail = String::new();
    for spec in &specs {
        let sd = symbolic_delta(spec).unwrap();
        let r = verify_symbolic_delta(&sd, 4);
        if !r.passed() {
            all = false;
            detail = format!("{r}");
            break;
        }
    }
    outcome(
        "3 (closed-form differences, exact at |X| <= 4)",
        all,
        &format!("{} class instances{detail}", specs.len()),
    );
}

#[test]
fn criterion_4_chain_rule() {
    let ready = |f: Endofunctor| {
        f.verify_taut(&CheckParams::default());
        f
    };
    let grid: Vec<(Endofunctor, Endofunctor)> = vec![
        (ready(identity()), ready(power(2))),
        (ready(power(2)), ready(identity())),
        (ready(power(2)), ready(power(2))),
        (
            ready(quot_power_functor(&QuotPowerSpec::divided_power(2))),
            ready(power(2)),
        ),
        (
            ready(power(2)),
            ready(quot_power_functor(&QuotPowerSpec::divided_power(2))),
        ),
        (ready(power(3)), ready(identity())),
    ];
    let mut all = true;
    let mut detail = String::new();
    for (f, g) in &grid {
        let r = chain_rule_check(f, g, 3).unwrap();
        if !r.passed() {
            all = false;
            detail = format!("{r}");
        }
    }
    // the specific coefficient comparison for X^2 . X^2
    let sq = ready(power(2));
    let rows = chain_rule_counts(&sq, &sq, 3).unwrap();
    let lhs: Vec<usize> = rows.iter().map(|r| r.1).collect();
    let rhs: Vec<usize> = rows.iter().map(|r| r.2).collect();
    let lhs_coeffs = fit_integer_polynomial(&lhs).unwrap();
    let rhs_coeffs = fit_integer_polynomial(&rhs).unwrap();
    if lhs_coeffs != vec![1, 2, 2, 4] || rhs_coeffs != vec![1, 4, 6, 4] {
        all = false;
        detail = format!("coefficients {lhs_coeffs:?} vs {rhs_coeffs:?}");
    }
    // associativity and units at |X| <= 2
    let f = ready(quot_power_functor(&QuotPowerSpec::divided_power(2)));
    let assoc = chain_rule_associativity_check(
        &f,
        &sq,
        &ready(identity()),
        &ChainAssocParams::default(),
    )
    .unwrap();
    let assoc_sq = chain_rule_associativity_check(
        &sq,
        &sq,
        &sq,
        &ChainAssocParams { bound: 2, max_intermediate: 5000 },
    )
    .unwrap();
    let units = chain_rule_unit_checks(&sq, 2).unwrap();
    for r in [&assoc, &assoc_sq, &units] {
        if !r.passed() {
            all = false;
            detail = format!("{r}");
        }
    }
    outcome(
        "4 (chain rule: 6-pair grid, (4,6,4,1) vs (4,2,2,1), assoc/units)",
        all,
        &detail,
    );
}

#[test]
fn criterion_5_confluence() {
    let mut all = true;
    let mut detail = String::new();
    for shape in FinCat::shape_library() {
        // brute-force agreement
        if shape.is_confluent() != confluent_via_representables(&shape) {
            all = false;
            detail = format!("oracle disagreement on {}", shape.name());
        }
        let r = check_colimit_commutes_with_inverse_images(
            &shape,
            &CommutationParams { trials: 50, ..Default::default() },
        );
        if shape.is_confluent() && !r.passed() {
            all = false;
            detail = format!("{r}");
        }
        if !shape.is_confluent() && r.passed() {
            all = false;
            detail = format!("counterexample did not fire on {}", shape.name());
        }
    }
    // the span counterexample must report the 0 vs 1 mismatch
    let span = check_colimit_commutes_with_inverse_images(
        &FinCat::span(),
        &CommutationParams::default(),
    );
    if span.passed() || !span.witnesses[0].detail.contains("colim Phi_0 = 0") {
        all = false;
        detail = "span witness missing".into();
    }
    outcome("5 (confluence and commutation)", all, &detail);
}

#[test]
fn criterion_6_newton_part_one() {
    let start = Instant::now();
    let mut all = true;
    let mut detail = String::new();
    // 25 seeded soft species with N <= 3 and |G(n)| <= 4
    for i in 0..25u64 {
        let g = SoftSpecies::seeded_random(3, 4, fdiff_core::DEFAULT_SEED + i).unwrap();
        let r = unit_iso_check(&g).unwrap();
        if !r.passed() {
            all = false;
            detail = format!("seed {i}: {r}");
            break;
        }
    }
    // round trips for the named library
    let ready = |f: Endofunctor| {
        f.verify_taut(&CheckParams::default());
        f
    };
    let two_x_plus_three = ready(sum(vec![
        identity(),
        identity(),
        fdiff_core::functor::constant(FinSet::atoms(3)),
    ]));
    let named: Vec<Endofunctor> = vec![
        ready(power(2)),
        ready(power(3)),
        ready(quot_power_functor(&QuotPowerSpec::divided_power(2))),
        two_x_plus_three,
        ready(quot_power_functor(
            &QuotPowerSpec::new(vec![(2, PermGroup::symmetric(2).unwrap())]).unwrap(),
        )),
    ];
    for f in &named {
        let r = roundtrip_check(f, 3, 4).unwrap();
        if !r.passed() {
            all = false;
            detail = format!("{r}");
            break;
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs() >= 120 {
        all = false;
        detail = format!("runtime {elapsed:?} exceeds 120 s");
    }
    outcome(
        "6 (Newton part I: 25 seeded species + 5 named round trips)",
        all,
        &format!("{elapsed:?} {detail}"),
    );
}

#[test]
fn criterion_7_dirichlet() {
    let mut all = true;
    let mut detail = String::new();
    // representation round trip, exhaustive over the size <= 4 library
    let lib = small_lattice_library();
    let mut count = 0;
    'outer: for src in &lib {
        for dst in &lib {
            for phi in enumerate_sup_maps(src, dst) {
                count += 1;
                let t = lattice_map_transf(&phi);
                match reconstruct_phi(&t, src, dst) {
                    Ok(back) if back.map == phi.map => {}
                    other => {
                        all = false;
                        detail = format!("round trip failed: {other:?}");
                        break 'outer;
                    }
                }
            }
        }
    }
    // the chain formula for n <= 4
    for n in 1..=4usize {
        let sd = symbolic_delta(&ClassSpec::NormalizedExponential(
            Lattice::chain(n).unwrap(),
        ))
        .unwrap();
        let r = verify_symbolic_delta(&sd, 3);
        if !r.passed() {
            all = false;
            detail = format!("{r}");
        }
        if n >= 1 {
            // shape: (n-1) copies of the n-chain plus one of each shorter chain
            if let ClassSpec::Dirichlet(d) = &sd.spec {
                let full: usize = d
                    .terms
                    .iter()
                    .filter(|(_, l)| l.len() == n)
                    .map(|(c, _)| c.len())
                    .sum();
                if full != n - 1 {
                    all = false;
                    detail = format!("chain {n}: top coefficient {full} != {}", n - 1);
                }
            }
        }
    }
    // Euler product
    let e = euler_check(&[2, 3], 12, 3).unwrap();
    if !e.passed() {
        all = false;
        detail = format!("{e}");
    }
    outcome(
        "7 (Dirichlet: representation round trip, chain formula, Euler)",
        all,
        &format!("{count} sup-maps round-tripped {detail}"),
    );
}

#[test]
fn criterion_8_factorization_biconditional() {
    let mut all = true;
    let mut detail = String::new();
    let mut instances = 0;
    let mut failures_designed = 0;

    // positive instances: units into the Newton sum for seeded species
    for i in 0..6u64 {
        let g = SoftSpecies::seeded_random(2, 4, fdiff_core::DEFAULT_SEED + 100 + i).unwrap();
        let f = newton_sum(&g);
        f.require_taut().unwrap();
        let u: Vec<FinFun> = (0..=g.bound())
            .map(|n| {
                let (pn, _) = pointer_set(n);
                let ds = delta_star(&f, g.bound()).unwrap();
                FinFun::from_fn(g.set(n).clone(), f.at(&pn), |a| {
                    // the unit: locate the class of (a, id) among the new
                    // elements by rebuilding it through delta_star
                    let _ = &ds;
                    unit_element(&g, n, a)
                })
                .unwrap()
            })
            .collect();
        let out = factorization_check(&g, &f, &u, 3).unwrap();
        instances += 1;
        if !(out.lands && out.taut && out.biconditional_holds()) {
            all = false;
            detail = format!("positive instance {i}: {}", out.report);
        }
    }
    // trivial landing: species concentrated at degree 0
    {
        let g = SoftSpecies::new(
            2,
            vec![FinSet::atoms(2), FinSet::empty(), FinSet::empty()],
            |_m, _n, _s, e| e.clone(),
        )
        .unwrap();
        let f = newton_sum(&g);
        f.require_taut().unwrap();
        let u: Vec<FinFun> = (0..=2)
            .map(|n| {
                let (pn, _) = pointer_set(n);
                FinFun::from_fn(g.set(n).clone(), f.at(&pn), |a| unit_element(&g, n, a))
                    .unwrap()
            })
            .collect();
        let out = factorization_check(&g, &f, &u, 3).unwrap();
        instances += 1;
        if !(out.lands && out.taut && out.biconditional_holds()) {
            all = false;
            detail = format!("degree-zero instance: {}", out.report);
        }
    }
    // two designed failures: degree-2 points sent to degenerate elements
    for variant in 0..2usize {
        let g = square_soft_species();
        let f = if variant == 0 {
            newton_sum(&g)
        } else {
            newton_sum(&point_soft_species())
        };
        f.require_taut().unwrap();
        let (p2, pts2) = pointer_extension(&FinSet::empty(), 2);
        let u: Vec<FinFun> = (0..=2)
            .map(|n| {
                let (pn, _) = pointer_set(n);
                if n < 2 {
                    FinFun::from_fn(g.set(n).clone(), f.at(&pn), |a| {
                        if variant == 0 {
                            unit_element(&g, n, a)
                        } else {
                            unit_element(&point_soft_species(), n, a)
                        }
                    })
                    .unwrap()
                } else {
                    FinFun::from_fn(g.set(2).clone(), f.at(&p2), |a| match a {
                        Element::Atom(i) => degenerate_at(&f, &pts2[*i as usize]),
                        _ => unreachable!(),
                    })
                    .unwrap()
                }
            })
            .collect();
        let out = factorization_check(&g, &f, &u, 3).unwrap();
        instances += 1;
        if out.lands || out.taut || !out.biconditional_holds() {
            all = false;
            detail = format!("designed failure {variant}: {}", out.report);
        } else {
            failures_designed += 1;
        }
    }
    // one more positive: point species into itself
    {
        let g = point_soft_species();
        let f = newton_sum(&g);
        f.require_taut().unwrap();
        let u: Vec<FinFun> = (0..=2)
            .map(|n| {
                let (pn, _) = pointer_set(n);
                FinFun::from_fn(g.set(n).clone(), f.at(&pn), |a| unit_element(&g, n, a))
                    .unwrap()
            })
            .collect();
        let out = factorization_check(&g, &f, &u, 3).unwrap();
        instances += 1;
        if !(out.lands && out.taut && out.biconditional_holds()) {
            all = false;
            detail = format!("point instance: {}", out.report);
        }
    }
    if instances < 10 || failures_designed < 2 {
        all = false;
        detail = format!("{instances} instances, {failures_designed} designed failures");
    }
    outcome(
        "8 (adjunction factorization biconditional)",
        all,
        &format!("{instances} instances, {failures_designed} designed failures {detail}"),
    );
}

fn point_soft_species() -> SoftSpecies {
    SoftSpecies::new(
        2,
        vec![FinSet::empty(), FinSet::atoms(1), FinSet::empty()],
        |_m, _n, _s, e| e.clone(),
    )
    .unwrap()
}

fn square_soft_species() -> SoftSpecies {
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

/// The unit image of a species point `a` of degree `n` inside the Newton
/// sum at the canonical pointer set.
fn unit_element(g: &SoftSpecies, n: usize, a: &Element) -> Element {
    let (pn, pts) = pointer_set(n);
    let f = newton_sum(g);
    // locate by mapping a mono through the sum: the identity pointers
    let target = f.at(&pn);
    target
        .iter()
        .find(|e| {
            let (label, cls) = e.expect_tag();
            if label != n.to_string() {
                return false;
            }
            // some representative of the class must pair a with a bijection
            let pair = cls.expect_cls().expect_tuple();
            let tuple = pair[0].expect_tuple();
            let set: FinSet = tuple.iter().cloned().collect();
            if set.len() != n || !set.iter().all(|p| pts.contains(p)) {
                return false;
            }
            // reconstruct: permute a by the bijection and compare
            fdiff_core::group::all_perms(n).iter().any(|sigma| {
                let moved: Vec<Element> =
                    sigma.iter().map(|&i| pts[i].clone()).collect();
                moved == tuple && &g.action(n, n, sigma).apply(a) == &pair[1]
            })
        })
        .expect("unit image exists")
        .clone()
}

/// A degenerate element of `F` at the two-pointer set: the image of a
/// degree-1 class located at the given pointer.
fn degenerate_at(f: &Endofunctor, point: &Element) -> Element {
    let (p2, _) = pointer_set(2);
    let sub = FinSet::singleton(point.clone());
    let incl = FinFun::inclusion(&sub, &p2).unwrap();
    let img = f.map(&incl).image();
    img.iter()
        .find(|e| {
            let (label, _) = e.expect_tag();
            label == "1"
        })
        .expect("degree-1 class exists at the pointer")
        .clone()
}

#[test]
fn criterion_9_tangent_monad_laws() {
    let mut all = true;
    let mut detail = String::new();
    for m in [powerset_monad(), filter_monad()] {
        let base = monad_laws_check(&m, 2).unwrap();
        if !base.passed() {
            all = false;
            detail = format!("{base}");
        }
        let r = tangent_monad_check(&m, 2).unwrap();
        if !r.passed() {
            all = false;
            detail = format!("{r}");
        }
    }
    outcome("9 (tangent monad laws for P and F at |A|,|B| <= 2)", all, &detail);
}

#[test]
fn library_composite_sanity() {
    // cross-check: the composed instance used by the chain-rule criterion
    // has the expected coefficient vector on its own
    let sq = power(2);
    sq.verify_taut(&CheckParams::default());
    let comp = compose(&sq, &sq);
    comp.require_taut().unwrap();
    let d = delta(&comp).unwrap();
    let counts: Vec<usize> = (0..=3)
        .map(|k| d.at(&FinSet::atoms(k)).len())
        .collect();
    assert_eq!(fit_integer_polynomial(&counts).unwrap(), vec![1, 4, 6, 4]);
}
