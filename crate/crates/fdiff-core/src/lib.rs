//! An exact, desk-scale difference calculus for taut endofunctors of
//! finite sets: evaluate functors, take differences operationally and in
//! closed form per class, build the chain-rule comparison, and run Newton
//! summation over the surjection category — with every identity checked
//! by explicit finite computation.

pub mod element;
pub mod error;
pub mod finset;
pub mod functor;
pub mod group;
pub mod newton;
pub mod report;

pub use element::Element;
pub use error::{Error, Result};
pub use finset::{FinFun, FinSet};
pub use functor::{CheckParams, Endofunctor, NatTransf, DEFAULT_SEED};
pub use group::{GroupAction, Perm, PermGroup};
pub mod chain;
pub mod classes;
pub mod delta;
pub mod diagram;
pub use report::{Report, Status, Witness};
