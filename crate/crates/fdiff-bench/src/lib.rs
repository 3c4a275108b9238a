//! Shared fixtures for the benchmarks.

use fdiff_core::classes::{normalized_exponential, quot_power_functor, QuotPowerSpec};
use fdiff_core::classes::lattice::n_star;
use fdiff_core::functor::{power, CheckParams, Endofunctor};

pub fn verified(f: Endofunctor) -> Endofunctor {
    assert!(f.verify_taut(&CheckParams::default()).passed());
    f
}

pub fn divided_cube() -> Endofunctor {
    verified(quot_power_functor(&QuotPowerSpec::divided_power(3)))
}

pub fn square() -> Endofunctor {
    verified(power(2))
}

pub fn six_star_exponential() -> Endofunctor {
    verified(normalized_exponential(&n_star(6).unwrap()))
}
