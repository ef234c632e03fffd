//! Exact computations in the Bruhat-Tits building of `PGL_n(Q_p)` and in its
//! compactification by lattices of smaller rank.
//!
//! Scalars are rationals, viewed inside `Q_p`. Vertices of the building are
//! homothety classes of `Z_(p)`-lattices ([`LatticeClass`]); boundary
//! vertices are classes of lower rank. The compactified standard apartment
//! is modelled by [`ApartmentPoint`], arbitrary points of the compactified
//! building by norms on subspaces ([`NormPoint`]), and the group side by
//! [`ProjElement`], [`MonomialElement`] and [`RootGroupElement`].

pub mod apartment;
pub mod error;
pub mod group_action;
pub mod lattice_building;
pub mod local_arith;
pub mod norm_points;
pub mod sample;
pub mod selftest;

pub use apartment::{
    ApartmentPoint, CornerChart, LatticeSeqSpec, NeighborhoodSpec, OpenBox, RaySpec, Root,
};
pub use error::{Error, Result};
pub use group_action::{MonomialElement, ProjElement, RootGroupElement};
pub use lattice_building::{BuildingGraph, CommonFrame, LatticeClass, Limits};
pub use local_arith::{ExtVal, Rat, RatMatrix};
pub use norm_points::NormPoint;
