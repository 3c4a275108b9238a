//! Concrete taut functor families: polynomial, divided/quotient power,
//! analytic, Dirichlet, and the finite filter/powerset/ultrafilter monads.

pub mod dirichlet;
pub mod lattice;
pub mod monads;
pub mod poly;
pub mod species;

pub use dirichlet::{
    dirichlet_functor, enumerate_sup_maps, euler_check, full_exponential, lattice_map_transf,
    normalized_exponential, reconstruct_phi, seq_dirichlet_product_check, sequential_dirichlet,
    zeta_truncation, DirichletSpec, SupMap,
};
pub use lattice::{factorize, lattice_iso_unique_factorization, n_star, Lattice};
pub use monads::{
    filter_functor, filter_monad, monad_laws_check, powerset_functor, powerset_monad,
    principal_reduced_power, proper_filter_functor, ultrafilter_functor, zmod_module_functor,
    TautMonad,
};
pub use poly::{
    is_taut_poly_morphism, poly_functor, poly_morphism, quot_power_functor, PolySpec,
    QuotPowerSpec,
};
pub use species::{analytic_functor, SpeciesSpec};

use crate::functor::Endofunctor;

/// A class-level description of a functor, for which a closed-form
/// difference is available.
#[derive(Clone, Debug)]
pub enum ClassSpec {
    Poly(PolySpec),
    QuotPower(QuotPowerSpec),
    Species(SpeciesSpec),
    Dirichlet(DirichletSpec),
    FullExponential(Lattice),
    NormalizedExponential(Lattice),
    FilterMonad,
    ProperFilter,
    Powerset,
    Ultrafilter,
}

impl ClassSpec {
    pub fn class_name(&self) -> &'static str {
        match self {
            ClassSpec::Poly(_) => "polynomial",
            ClassSpec::QuotPower(_) => "quotient-power",
            ClassSpec::Species(_) => "analytic",
            ClassSpec::Dirichlet(_) => "dirichlet",
            ClassSpec::FullExponential(_) => "full-exponential",
            ClassSpec::NormalizedExponential(_) => "normalized-exponential",
            ClassSpec::FilterMonad => "filter-monad",
            ClassSpec::ProperFilter => "proper-filter",
            ClassSpec::Powerset => "powerset",
            ClassSpec::Ultrafilter => "ultrafilter",
        }
    }

    pub fn display(&self) -> String {
        match self {
            ClassSpec::Poly(p) => p.display(),
            ClassSpec::QuotPower(q) => q.display(),
            ClassSpec::Species(s) => format!("analytic(N={})", s.degree_bound()),
            ClassSpec::Dirichlet(d) => d.display(),
            ClassSpec::FullExponential(l) => format!("{}^X", l.name()),
            ClassSpec::NormalizedExponential(l) => format!("{}^[X]", l.name()),
            ClassSpec::FilterMonad => "F".into(),
            ClassSpec::ProperFilter => "F'".into(),
            ClassSpec::Powerset => "P".into(),
            ClassSpec::Ultrafilter => "beta".into(),
        }
    }
}

/// Realizes a class spec as a computable functor. The encodings here are
/// the ones the symbolic difference witnesses are stated against.
pub fn realize_class(spec: &ClassSpec) -> Endofunctor {
    match spec {
        ClassSpec::Poly(p) => poly_functor(p),
        ClassSpec::QuotPower(q) => quot_power_functor(q),
        ClassSpec::Species(s) => analytic_functor(s),
        ClassSpec::Dirichlet(d) => dirichlet_functor(d),
        ClassSpec::FullExponential(l) => full_exponential(l),
        ClassSpec::NormalizedExponential(l) => normalized_exponential(l),
        ClassSpec::FilterMonad => filter_functor(),
        ClassSpec::ProperFilter => proper_filter_functor(),
        ClassSpec::Powerset => powerset_functor(),
        ClassSpec::Ultrafilter => ultrafilter_functor(),
    }
}
