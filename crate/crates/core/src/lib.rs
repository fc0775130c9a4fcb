//! Numerical laboratory for second-order diffusion operators whose matrix
//! coefficient degenerates like a power of the boundary distance.
//!
//! The crate is organised as a pipeline:
//!
//! * [`geometry`] - boundary distance functions, their gradients and
//!   Hessians, and measured trace-deviation constants on boundary layers;
//! * [`field`] - degenerate coefficient fields `a(x) d(x)^delta I` plus
//!   perturbations, degeneracy-condition probes and comparability constants;
//! * [`mollifier`] - logarithmic cutoff families and the bound on the
//!   operator applied to the regularised indicator of a boundary layer;
//! * [`grid`] - graded 1-d / radial finite-element assembly;
//! * [`spectral`] - weighted Hardy and Rellich minima, endpoint
//!   classification by integral criteria and by deficiency-index shooting;
//! * [`uniqueness`] - verdict classification, semigroup evolution, mass
//!   conservation probes and explicit witness functions.
//!
//! Everything numeric is generic over the scalar type through [`Real`];
//! the `*64` (and `*32`) aliases below fix the scalar for callers that do
//! not need the generics.

// Validation guards are written `!(x > y)` on purpose: unlike `x <= y`,
// the negation also catches NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
mod fit;
pub mod geometry;
pub mod grid;
pub mod linalg;
pub mod mollifier;
pub mod ode;
mod quad;
pub mod sampling;
pub mod spectral;
pub mod uniqueness;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

pub use error::{Error, Result};

/// Scalar type used by all numeric kernels.
///
/// Implemented for `f32` and `f64`. The bound collects what the kernels
/// actually use: IEEE arithmetic with elementary functions, conversion from
/// literals, compound assignment and iterator sums.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    ///
    /// # Panics
    /// Panics if the value is not representable, which cannot happen for
    /// the finite literals used internally.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("literal out of range for scalar type")
    }

    /// Converts a node / sample count into the scalar type.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count out of range for scalar type")
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

pub type DomainSpec64 = geometry::DomainSpec<f64>;
pub type DomainSpec32 = geometry::DomainSpec<f32>;
pub type LayerSpec64 = geometry::LayerSpec<f64>;
pub type LayerSpec32 = geometry::LayerSpec<f32>;
pub type CoefficientField64 = field::CoefficientField<f64>;
pub type CoefficientField32 = field::CoefficientField<f32>;
pub type Radial1d64 = field::Radial1d<f64>;
pub type Radial1d32 = field::Radial1d<f32>;
pub type Mollifier64 = mollifier::Mollifier<f64>;
pub type Mollifier32 = mollifier::Mollifier<f32>;
pub type Grid64 = grid::Grid1d<f64>;
pub type Grid32 = grid::Grid1d<f32>;
pub type AssembledOperator64 = grid::AssembledOperator<f64>;
pub type HardyReport64 = spectral::HardyReport<f64>;
pub type RellichReport64 = spectral::RellichReport<f64>;
pub type WeylReport64 = spectral::WeylReport<f64>;
pub type DeficiencyResult64 = spectral::DeficiencyResult<f64>;
pub type ClassificationVerdict64 = uniqueness::ClassificationVerdict<f64>;
pub type EvolutionTrace64 = uniqueness::EvolutionTrace<f64>;
pub type MassConservationReport64 = uniqueness::MassConservationReport<f64>;
pub type WitnessReport64 = uniqueness::WitnessReport<f64>;
