//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum GeomError {
    /// `df` is rank deficient at the evaluated point.
    #[error("immersion degenerate at {point:?}: smallest singular value {sigma_min:.3e} below rank tolerance")]
    RankDeficient { point: Vec<f64>, sigma_min: f64 },

    /// A level-set ambient constraint is violated by an image point.
    #[error("level-set containment violated: |F(p)| = {value:.3e} exceeds tolerance {tol:.1e}")]
    ContainmentViolated { value: f64, tol: f64 },

    /// A chart point lies outside the immersion's domain box.
    #[error("chart point {point:?} outside domain box")]
    DomainExceeded { point: Vec<f64> },

    /// The requested normal vector is not in the normal bundle.
    #[error("vector lies outside the normal bundle (residual {residual:.3e})")]
    NormalOutsideBundle { residual: f64 },

    /// Third-order derivative data was requested but is not available.
    #[error("derivative data unavailable: {0}")]
    DerivativeUnavailable(String),

    /// A centered-difference operation got fewer samples than it needs.
    #[error("insufficient samples: got {got}, need at least {need}")]
    InsufficientSamples { got: usize, need: usize },

    /// A parameter value lies outside the trajectory's time span.
    #[error("parameter {t} outside trajectory span [{lo}, {hi}]")]
    OutOfSpan { t: f64, lo: f64, hi: f64 },

    /// The mean curvature vector vanishes where a normalized H is required.
    #[error("mean curvature vector vanishes (min |H| = {min_norm:.3e} below floor {floor:.1e})")]
    MeanCurvatureVanishes { min_norm: f64, floor: f64 },

    /// Normal curvature stays below the floor on the whole evaluation span.
    #[error("tau below floor {floor:.1e} on the entire span; residuals with tau denominators undefined")]
    TauFloorViolated { floor: f64 },

    /// An integrator produced a non-finite state.
    #[error("integration step rejected at t = {t}: non-finite state")]
    StepRejected { t: f64 },

    /// Scenario or suite configuration is invalid.
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    /// Expression parsing or differentiation failed.
    #[error("expression error: {0}")]
    Expr(String),

    /// An input violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
