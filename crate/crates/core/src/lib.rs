//! Jenkins-Strebel geodesic rays on cylinder surfaces.
//!
//! The crate models a Jenkins-Strebel differential by its cylinder
//! decomposition ([`surface`]), runs the Teichmüller flow and computes the
//! endpoint of the ray in the augmented boundary ([`ray`]), implements the
//! half-cylinder charts used to describe that endpoint ([`conformal`]),
//! and compares two rays: limit distance, time shifts, detour metric and
//! the bounded/divergent/asymptotic tables ([`asymptotics`]), extremal
//! length asymptotics and lower bounds ([`extremal`]), and the explicit
//! quasiconformal maps giving the matching upper bound ([`qcmap`]).
//!
//! Geometric data is generic over [`Scalar`]: exact [`BigRational`]s when
//! all inputs are rational, `f64` otherwise.
//!
//! [`BigRational`]: num_rational::BigRational

pub mod asymptotics;
pub mod conformal;
pub mod extremal;
pub mod qcmap;
pub mod ray;
pub mod scalar;
pub mod surface;
pub mod surface_text;

pub use asymptotics::{
    boundedness, classify, detour_metric, limit_distance, modular_equivalence, optimal_shift, shifted_limit,
    ModuliVector, Outcome, PairDescriptor, Verdict,
};
pub use ray::{endpoint_descriptor, endpoints_equal, flow, EndpointDescriptor, RayState};
pub use scalar::Scalar;
pub use surface::{
    build_surface, foliation_relation, intersection_number, Cylinder, CylinderSurface, FoliationRelation, GlueSign,
    GluingTable, MeasuredMulticurve, Segment, Side,
};
