//! Quantized transverse field with ultraviolet cutoff, discretized on a
//! quadrature of the momentum ball.

pub mod fock;
pub mod modes;
pub mod operators;
pub mod quadratic;

pub use fock::TruncatedFock;
pub use modes::{build_modeset, AngularRule, ModeSet};
pub use operators::{field_commutators, FieldKind, FieldOp};
pub use quadratic::{
    bound_constants, field_energy_check, pointwise_bound_check, vnorm, BoundCase, PointwiseField,
    QuadraticForm, VFamily, Weight,
};
