//! Numerical laboratory for curves on immersed Riemannian submanifolds.
//!
//! The crate is organized bottom-up:
//!
//! * [`expr`] — a small arithmetic expression language with symbolic
//!   differentiation, used to define immersions analytically.
//! * [`ambient`] / [`immersion`] — ambient spaces (flat or implicit level
//!   set) and chart-domain immersions with derivatives up to order three.
//! * [`frame`] — pointwise geometry: induced metric, Christoffel symbols,
//!   normal frames, second fundamental form, shape operators.
//! * [`integrate`] — fixed-step RK4 initial value problems for geodesics,
//!   planar pseudo-geodesics, and prescribed-curvature planar curves.
//! * [`develop`] — parallel transport, Cartan development, and planarity
//!   residual functionals.
//! * [`diagnostics`] — scalar defect functionals (umbilicity, isotropy,
//!   parallel mean curvature) and theorem-level scenario verdicts.
//! * [`catalog`] — named immersions with known ground-truth flags.

pub mod ambient;
pub mod catalog;
pub mod develop;
pub mod diagnostics;
pub mod error;
pub mod expr;
pub mod fd;
pub mod frame;
pub mod immersion;
pub mod integrate;
pub mod sampling;
pub mod tol;

pub use ambient::AmbientSpace;
pub use error::GeomError;
pub use frame::FramePacket;
pub use immersion::ParametricImmersion;
pub use integrate::{CurvatureProfile, CurveTrajectory, PseudoGeodesicSpec};

/// Column vector of `f64`, the working scalar type everywhere.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix of `f64`.
pub type Matrix = nalgebra::DMatrix<f64>;

#[cfg(test)]
mod concurrency_contract {
    // Values are immutable after construction and shared freely across
    // worker threads; keep that statically true.
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn core_types_are_send_and_sync() {
        assert_send_sync::<crate::ParametricImmersion>();
        assert_send_sync::<crate::AmbientSpace>();
        assert_send_sync::<crate::FramePacket>();
        assert_send_sync::<crate::CurveTrajectory>();
        assert_send_sync::<crate::catalog::CatalogEntry>();
    }
}
