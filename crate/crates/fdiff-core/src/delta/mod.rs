//! The difference operator: operationally as the complement of
//! `F(X) -> F(X+1)`, on transformations by restriction, iterated and
//! multi-pointed variants, and the coproduct decomposition `F + Delta[F] = F S`.

pub mod rules;
pub mod symbolic;

use crate::element::Element;
use crate::error::{Error, Result};
use crate::finset::{pointer_extension, FinFun, FinSet};
use crate::functor::{
    compose, successor, successor_arrow, successor_object, sum, CheckParams, Endofunctor,
    NatTransf,
};
use crate::report::Report;

pub(crate) fn delta_object(f: &Endofunctor, x: &FinSet) -> FinSet {
    let (sx, _, j) = successor_object(x);
    let fsx = f.at(&sx);
    let image = f.map(&j).image();
    fsx.difference(&image)
}

/// `Delta[F](X) = F(X+1) \ Im F(j)`, with arrow maps the restrictions of
/// `F(f+1)`. Requires a taut-verified input: the restriction exists exactly
/// because `F` carries the inverse-image square of `j` to a pullback.
pub fn delta(f: &Endofunctor) -> Result<Endofunctor> {
    if !f.is_taut_verified() {
        return Err(Error::NotTautVerified(f.name().to_string()));
    }
    let base = f.clone();
    let base2 = f.clone();
    Ok(Endofunctor::new(
        format!("Delta[{}]", f.name()),
        move |x| delta_object(&base, x),
        move |g| {
            let whole = base2.map(&successor_arrow(g));
            whole
                .restrict(
                    &delta_object(&base2, g.dom()),
                    &delta_object(&base2, g.cod()),
                )
                .expect("new elements map to new elements for taut functors")
        },
    ))
}

/// Difference of a taut transformation: the restriction of `t(X+1)` to the
/// new elements. Refuses transformations that have not passed the taut
/// check (a non-taut transformation need not restrict at all).
pub fn delta_transf(t: &NatTransf) -> Result<NatTransf> {
    if !t.is_taut_verified() {
        return Err(Error::TransfNotTautVerified(t.name().to_string()));
    }
    let src = delta(t.src())?;
    let dst = delta(t.dst())?;
    let t2 = t.clone();
    let (s2, d2) = (src.clone(), dst.clone());
    Ok(NatTransf::new(
        format!("Delta[{}]", t.name()),
        src,
        dst,
        move |x| {
            let (sx, _, _) = successor_object(x);
            t2.at(&sx)
                .restrict(&s2.at(x), &d2.at(x))
                .expect("taut components restrict to the complements")
        },
    ))
}

/// `Delta^n[F]`, verifying each intermediate difference so the next layer
/// may be taken.
pub fn iterated_delta(f: &Endofunctor, n: usize, params: &CheckParams) -> Result<Endofunctor> {
    let mut cur = f.clone();
    for _ in 0..n {
        let next = delta(&cur)?;
        let report = next.verify_taut(params);
        if !report.passed() {
            return Err(Error::NotTautVerified(next.name().to_string()));
        }
        cur = next;
    }
    Ok(cur)
}

/// The multi-pointed difference `D_A[F](X)`: elements of `F(X+A)` that are
/// in no `F(X+A_0)` for a proper subset `A_0` of the pointer set `A`.
pub fn pointed_difference(f: &Endofunctor, pointers: &FinSet) -> Result<Endofunctor> {
    if !f.is_taut_verified() {
        return Err(Error::NotTautVerified(f.name().to_string()));
    }
    let n = pointers.len();
    let base = f.clone();
    let base2 = f.clone();
    let obj = move |x: &FinSet| multi_delta_object(&base, x, n);
    let obj2 = move |x: &FinSet| multi_delta_object(&base2, x, n);
    let base3 = f.clone();
    Ok(Endofunctor::new(
        format!("D_{n}[{}]", f.name()),
        obj,
        move |g| {
            let mut ext = g.clone();
            for _ in 0..n {
                ext = successor_arrow(&ext);
            }
            base3
                .map(&ext)
                .restrict(&obj2(g.dom()), &obj2(g.cod()))
                .expect("pointed differences are subfunctors")
        },
    ))
}

/// The set `D_n[F](X)` inside `F(X + n)`.
pub fn multi_delta_object(f: &Endofunctor, x: &FinSet, n: usize) -> FinSet {
    let (ext, points) = pointer_extension(x, n);
    let fext = f.at(&ext);
    let mut excluded: Vec<Element> = Vec::new();
    for mask in 0..(1usize << n) {
        if mask == (1 << n) - 1 {
            continue; // only proper subsets of the pointers
        }
        let mut sub = x.clone();
        for (i, p) in points.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sub = sub.insert(p.clone());
            }
        }
        let incl = FinFun::inclusion(&sub, &ext).expect("subset of the extension");
        excluded.extend(f.map(&incl).image().iter().cloned());
    }
    fext.difference(&FinSet::new(excluded))
}

/// The canonical decomposition `F + Delta[F] -> F S`: `F j` on the first
/// summand, the inclusion on the second. Returns the transformation so the
/// caller can verify it is a natural isomorphism.
pub fn sum_decomposition(f: &Endofunctor) -> Result<NatTransf> {
    let df = delta(f)?;
    let src = sum(vec![f.clone(), df]);
    let dst = compose(f, &successor());
    let base = f.clone();
    let (s2, d2) = (src.clone(), dst.clone());
    Ok(NatTransf::new(
        format!("{} + Delta -> {}S", f.name(), f.name()),
        src,
        dst,
        move |x| {
            let (_, _, j) = successor_object(x);
            let fj = base.map(&j);
            FinFun::from_fn(s2.at(x), d2.at(x), |e| {
                let (label, inner) = e.expect_tag();
                if label == "0" {
                    fj.apply(inner)
                } else {
                    inner.clone()
                }
            })
            .expect("decomposition total")
        },
    ))
}

/// Verifies the coproduct law `F + Delta[F] = F S` as an explicit natural
/// isomorphism at sizes up to `bound`.
pub fn sum_decomposition_check(f: &Endofunctor, bound: usize) -> Result<Report> {
    let t = sum_decomposition(f)?;
    let iso = crate::functor::iso_witness(
        t.src(),
        t.dst(),
        &CheckParams::with_bound(bound),
        Some(&t),
    );
    Ok(iso.report)
}

/// Counting law `|Delta[F](k)| = |F(k+1)| - |F(k)|` for `k <= bound`.
pub fn counting_law_check(f: &Endofunctor, bound: usize) -> Result<Report> {
    let df = delta(f)?;
    let mut report =
        Report::new(format!("counting-law[{}]", f.name())).with_param("bound", bound);
    for k in 0..=bound {
        report.record_case();
        let d = df.at(&FinSet::atoms(k)).len();
        let big = f.at(&FinSet::atoms(k + 1)).len();
        let small = f.at(&FinSet::atoms(k)).len();
        if d != big - small {
            report.fail(
                format!("k={k}"),
                format!("|Delta F| = {d} but |F(k+1)| - |F(k)| = {}", big - small),
            );
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{
        filter_functor, normalized_exponential, powerset_functor, proper_filter_functor,
        quot_power_functor, ultrafilter_functor, Lattice, QuotPowerSpec,
    };
    use crate::functor::{check_taut_transf, constant, diagonal_transf, identity, power};

    fn verified(f: Endofunctor) -> Endofunctor {
        assert!(f.verify_taut(&CheckParams::default()).passed(), "{}", f.name());
        f
    }

    #[test]
    fn delta_refuses_unverified_input() {
        let f = power(2);
        assert!(matches!(delta(&f), Err(Error::NotTautVerified(_))));
    }

    #[test]
    fn delta_of_constant_is_empty() {
        let c = verified(constant(FinSet::atoms(3)));
        let d = delta(&c).unwrap();
        for k in 0..=4 {
            assert!(d.at(&FinSet::atoms(k)).is_empty());
        }
    }

    #[test]
    fn delta_of_identity_is_one() {
        let f = verified(identity());
        let d = delta(&f).unwrap();
        for k in 0..=4 {
            assert_eq!(d.at(&FinSet::atoms(k)).len(), 1);
        }
    }

    #[test]
    fn delta_of_square_counts() {
        let f = verified(power(2));
        let d = delta(&f).unwrap();
        for k in 0..=5 {
            assert_eq!(d.at(&FinSet::atoms(k)).len(), 2 * k + 1);
        }
    }

    #[test]
    fn delta_output_is_taut() {
        let d = delta(&verified(power(2))).unwrap();
        assert!(d.verify_taut(&CheckParams::default()).passed());
    }

    #[test]
    fn counting_law_on_library() {
        for f in [
            power(3),
            quot_power_functor(&QuotPowerSpec::divided_power(2)),
            filter_functor(),
            normalized_exponential(&Lattice::chain(3).unwrap()),
        ] {
            let f = verified(f);
            let r = counting_law_check(&f, 4).unwrap();
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn sum_decomposition_is_natural_iso() {
        for f in [power(2), filter_functor()] {
            let f = verified(f);
            let r = sum_decomposition_check(&f, 4).unwrap();
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn iterated_equals_pointed_elementwise() {
        // Delta^n[F] and D_n[F] are literally the same sets and maps here.
        let f = verified(power(2));
        for n in 0..=3usize {
            let it = iterated_delta(&f, n, &CheckParams::default()).unwrap();
            let dp = pointed_difference(&f, &FinSet::atoms(n)).unwrap();
            for k in 0..=3 {
                let x = FinSet::atoms(k);
                assert_eq!(it.at(&x), dp.at(&x), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn second_difference_of_square_at_zero() {
        let f = verified(power(2));
        let d2 = iterated_delta(&f, 2, &CheckParams::default()).unwrap();
        assert_eq!(d2.at(&FinSet::empty()).len(), 2);
        let d3 = iterated_delta(&f, 3, &CheckParams::default()).unwrap();
        for k in 0..=3 {
            assert!(d3.at(&FinSet::atoms(k)).is_empty());
        }
    }

    #[test]
    fn pointed_difference_with_no_pointers_is_f() {
        let f = verified(power(2));
        let d0 = pointed_difference(&f, &FinSet::empty()).unwrap();
        for k in 0..=3 {
            let x = FinSet::atoms(k);
            assert_eq!(d0.at(&x), f.at(&x));
        }
    }

    #[test]
    fn nested_pointed_differences_compose() {
        let f = verified(power(2));
        let inner = verified(pointed_difference(&f, &FinSet::atoms(1)).unwrap());
        let nested = pointed_difference(&inner, &FinSet::atoms(2)).unwrap();
        let direct = pointed_difference(&f, &FinSet::atoms(3)).unwrap();
        for k in 0..=2 {
            let x = FinSet::atoms(k);
            assert_eq!(nested.at(&x), direct.at(&x));
        }
    }

    #[test]
    fn delta_transf_of_identity_is_identity() {
        let f = verified(power(2));
        let t = NatTransf::identity(&f);
        t.verify_taut(&CheckParams::default()).unwrap();
        let dt = delta_transf(&t).unwrap();
        for k in 0..=3 {
            assert!(dt.at(&FinSet::atoms(k)).is_identity());
        }
    }

    #[test]
    fn delta_of_diagonal_is_taut() {
        let t = diagonal_transf();
        t.src().verify_taut(&CheckParams::default());
        t.dst().verify_taut(&CheckParams::default());
        t.verify_taut(&CheckParams::default()).unwrap();
        let dt = delta_transf(&t).unwrap();
        dt.src().verify_taut(&CheckParams::default());
        dt.dst().verify_taut(&CheckParams::default());
        assert!(check_taut_transf(&dt, &CheckParams::default()).unwrap().passed());
    }

    #[test]
    fn delta_refuses_nontaut_transformation() {
        let t = crate::functor::product_projection(vec![identity(), identity()], 0);
        t.src().verify_taut(&CheckParams::default());
        t.dst().verify_taut(&CheckParams::default());
        // the taut check fails, so the flag stays unset and delta refuses
        let _ = t.verify_taut(&CheckParams::default()).unwrap();
        assert!(matches!(
            delta_transf(&t),
            Err(Error::TransfNotTautVerified(_))
        ));
    }

    #[test]
    fn monad_differences_cardinalities() {
        // Delta[F] = F, Delta[F'] = F, Delta[beta] = 1, Delta[P] = P
        let f = verified(filter_functor());
        let fp = verified(proper_filter_functor());
        let b = verified(ultrafilter_functor());
        let p = verified(powerset_functor());
        for k in 0..=4usize {
            let x = FinSet::atoms(k);
            assert_eq!(delta(&f).unwrap().at(&x).len(), 1 << k);
            assert_eq!(delta(&fp).unwrap().at(&x).len(), 1 << k);
            assert_eq!(delta(&b).unwrap().at(&x).len(), 1);
            assert_eq!(delta(&p).unwrap().at(&x).len(), 1 << k);
        }
    }
}
