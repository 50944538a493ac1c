//! Pinned numerical tolerances and floors.
//!
//! Every threshold used by the library and its verification suites lives
//! here so test expectations and runtime guards cannot drift apart.

/// Frame-packet algebraic identities (metric inverse, orthonormality,
/// Weingarten compatibility) must hold to this absolute tolerance.
pub const FRAME_IDENTITY: f64 = 1e-10;

/// Smallest singular value of `df` below which the immersion is treated
/// as degenerate at the point.
pub const RANK_TOL: f64 = 1e-8;

/// Level-set membership: evaluated submanifold points must satisfy
/// `|F(p)|` below this bound.
pub const CONTAINMENT_TOL: f64 = 1e-7;

/// Level-set gradients shorter than this make the implicit surface
/// ill-defined on the working region.
pub const LEVEL_SET_GRAD_FLOOR: f64 = 1e-8;

/// Central-difference step for the finite-difference derivative mode.
pub const FD_STEP: f64 = 1e-5;

/// Membership test for vectors claimed to lie in the normal bundle.
pub const NORMAL_BUNDLE_TOL: f64 = 1e-8;

/// Unit-norm and orthogonality drift allowed on trajectory frames after
/// per-step renormalization.
pub const FRAME_DRIFT: f64 = 1e-8;

/// Sup-norm bound for the finite-difference geodesic residual
/// `Tdot^k + Gamma^k_ij T^i T^j` at the default step.
pub const GEO_RESIDUAL: f64 = 1e-5;

/// Sup-norm bound for pseudo-geodesic / planar-system residuals at the
/// default step.
pub const PG_RESIDUAL: f64 = 1e-5;

/// Default integration step.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Planarity verdict: residuals below this are planar.
pub const THRESHOLD_PLANAR: f64 = 1e-6;

/// Planarity verdict: residuals above this are non-planar; the band in
/// between is indeterminate.
pub const THRESHOLD_REJECT: f64 = 1e-4;

/// Additive guard in residual normalizations so geodesics (zero ambient
/// curvature) divide cleanly.
pub const EPS_SCALE: f64 = 1e-12;

/// Normal curvature floor guarding divisions by `tau`.
pub const TAU_FLOOR: f64 = 1e-6;

/// Mean curvature floor below which the normalized H is undefined.
pub const H_FLOOR: f64 = 1e-8;

/// Ambient curvature floor below which the Wunderlich angle is undefined.
pub const THETA_FLOOR: f64 = 1e-9;

/// Default number of unit tangent directions sampled per point.
pub const DEFAULT_DIRECTIONS: usize = 64;
