//! Exact computer algebra for finite rings and their Ore extensions.
//!
//! The kernel works with rings in a canonical table form: a finite ring is a
//! pair of `n x n` operation tables over element indices `0..n`, compiled from
//! a structured descriptor (modular rings, quotients by a monic polynomial,
//! triangular and full 2x2 matrix rings, products, subrings, or raw tables).
//! On top of the table kernel sit
//!
//! * validated endomorphisms and sigma-derivations ([`maps`]),
//! * skew polynomial arithmetic in `R[x;sigma,delta]` ([`ore`]),
//! * decision procedures for ring and extension properties ([`props`]),
//! * an executable catalog of worked examples and claim checks ([`registry`]),
//! * a machine-readable report schema shared with the CLI ([`report`]).
//!
//! Everything is exact integer table arithmetic; no floating point anywhere.

pub mod descriptor;
pub mod expr;
pub mod maps;
pub mod ore;
pub mod props;
pub mod registry;
pub mod report;
pub mod ring;
pub mod subset;

pub use descriptor::{MapRule, RingDescriptor, RingLimits};
pub use maps::{OreContext, RingMorphism, SigmaDerivation};
pub use ore::OrePoly;
pub use ring::{Elem, FiniteRing, RingRef};
pub use subset::RingSubset;
