//! Exact exterior calculus and numerical diagnostics for singular
//! holomorphic foliations and their near-holomorphic perturbations.

// NaN-rejecting parameter checks are written as `!(x > 0.0)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod foliation;
pub mod forms;
pub mod geometry;
pub mod holonomy;
pub mod linalg;
pub mod perturb;
pub mod polycore;
pub mod sampling;
pub mod scalar;
pub mod transversality;

pub use scalar::{QComplex, Rational};

pub type Poly = polycore::SparsePoly<QComplex>;
pub type PolyForm = forms::Form<QComplex>;
pub type Covector = forms::Covector<f64>;
pub type SymplecticFrame = geometry::SymplecticFrame<f64>;
pub type Subspace = geometry::Subspace<f64>;
pub type Representation = holonomy::Representation<f64>;
pub type PencilParameter = holonomy::PencilParameter<f64>;
pub type Takagi = perturb::Takagi<f64>;
