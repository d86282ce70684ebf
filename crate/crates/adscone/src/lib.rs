//! Computational toolkit for anti-de Sitter 3-manifolds with interacting cone singularities.

// `!(a < b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cone_hyp;
pub mod error;
pub mod hs_surface;
pub mod interactions;
pub mod isom;
pub mod linalg;
pub mod links;
pub mod lr_metrics;
pub mod rp1;
pub mod scalar;
pub mod spacetimes;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision aliases for the commonly used generic types.
pub mod f64 {
    pub type Vec22 = crate::linalg::Vec22<f64>;
    pub type AdSPoint = crate::linalg::AdSPoint<f64>;
    pub type TangentVec = crate::linalg::TangentVec<f64>;
    pub type Mink3Vec = crate::linalg::Mink3Vec<f64>;
    pub type Mat2 = crate::linalg::Mat2<f64>;
    pub type Mat3 = crate::linalg::Mat3<f64>;
    pub type Proj2 = crate::isom::Proj2<f64>;
    pub type LiftedProj2 = crate::isom::LiftedProj2<f64>;
    pub type IsomPair = crate::isom::IsomPair<f64>;
    pub type IsomClass = crate::isom::IsomClass<f64>;
    pub type RP1Circle = crate::rp1::RP1Circle<f64>;
    pub type LinkCircle = crate::rp1::LinkCircle<f64>;
    pub type SingularityType = crate::links::SingularityType<f64>;
    pub type ConeSurfaceSpec = crate::cone_hyp::ConeSurfaceSpec<f64>;
    pub type ConeSurface = crate::cone_hyp::ConeSurface<f64>;
    pub type SingularHSSurface = crate::hs_surface::SingularHSSurface<f64>;
    pub type MarkedHSMetric = crate::hs_surface::MarkedHSMetric<f64>;
    pub type ModelSpacetime = crate::spacetimes::ModelSpacetime<f64>;
    pub type SurfaceJet = crate::lr_metrics::SurfaceJet<f64>;
    pub type DevelopedLoop = crate::lr_metrics::DevelopedLoop<f64>;
    pub type InteractionGraph = crate::interactions::InteractionGraph<f64>;
    pub type HolonomyAssembly = crate::interactions::HolonomyAssembly<f64>;
}
