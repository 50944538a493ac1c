//! Scalar defect functionals for the immersion classes under study
//! (umbilicity, parallel normalized mean curvature, extrinsic sphere,
//! isotropy), residuals of the tangent/normal curve equations, and
//! theorem-level scenario verdicts.

use crate::catalog::CatalogEntry;
use crate::develop::{ambient_planarity_residual, Thresholds, Verdict};
use crate::error::{GeomError, Result};
use crate::frame::{frame_at, normal_derivative_along, FramePacket};
use crate::immersion::ParametricImmersion;
use crate::integrate::{
    ambient_acceleration_samples, curvature_profile, frames_along, integrate_geodesic,
    integrate_planar_pseudo_geodesic, nabla_t_t_samples, CurveKind, CurveTrajectory,
    PseudoGeodesicSpec,
};
use crate::sampling::{self, spd_sqrt_and_inv_sqrt};
use crate::tol;
use crate::{Matrix, Vector};
use serde::{Deserialize, Serialize};

/// Sampling metadata embedded in every report for replay.
#[derive(Debug, Clone, Serialize)]
pub struct SamplingSpec {
    pub seed: u64,
    pub grid: Vec<Vec<f64>>,
    pub directions_per_point: usize,
}

/// A scalar defect evaluated over a sample grid.
#[derive(Debug, Clone, Serialize)]
pub struct DefectReport {
    pub name: String,
    pub values: Vec<f64>,
    pub sup: f64,
    pub mean: f64,
    pub sampling: SamplingSpec,
}

impl DefectReport {
    pub fn new(name: &str, values: Vec<f64>, sampling: SamplingSpec) -> Self {
        let sup = values.iter().cloned().fold(0.0, f64::max);
        let mean = if values.is_empty() {
            0.0
        } else {
            values.iter().sum::<f64>() / values.len() as f64
        };
        DefectReport {
            name: name.to_string(),
            values,
            sup,
            mean,
            sampling,
        }
    }
}

// ---------------------------------------------------------------------------
// Pointwise defects
// ---------------------------------------------------------------------------

/// Umbilicity defect at a chart point: Frobenius distance of each shape
/// operator (in a g-orthonormal basis) from its trace-normalized multiple
/// of the identity, certified against a direction-sampled check of
/// `alpha(X, Y) = <X, Y> H`. The larger of the two routes is returned.
pub fn umbilicity_defect(
    imm: &ParametricImmersion,
    u: &Vector,
    n_dirs: usize,
    seed: u64,
) -> Result<f64> {
    let fp = frame_at(imm, u)?;
    let m = fp.dim();
    let (g_sqrt, g_inv_sqrt) = spd_sqrt_and_inv_sqrt(&fp.metric);

    let mut operator_route: f64 = 0.0;
    for s in 0..fp.codim() {
        let a_hat = &fp.metric_inv * &fp.alpha[s];
        let sym = &g_sqrt * &a_hat * &g_inv_sqrt;
        let dev = &sym - Matrix::identity(m, m) * (sym.trace() / m as f64);
        operator_route = operator_route.max(dev.norm());
    }

    let mut sampled_route: f64 = 0.0;
    for (x, y) in sampling::g_orthonormal_pairs(&fp.metric, n_dirs, seed) {
        sampled_route = sampled_route.max(fp.alpha_vec(&x, &y).norm());
        sampled_route =
            sampled_route.max((fp.alpha_vec(&x, &x) - &fp.mean_curvature).norm());
    }
    Ok(operator_route.max(sampled_route))
}

/// Isotropy data at a point.
#[derive(Debug, Clone, Serialize)]
pub struct IsotropyReport {
    /// `max |<alpha(x,x), alpha(x,y)>|` over sampled g-orthonormal pairs.
    pub defect: f64,
    /// Mean of `<alpha(x,x), alpha(x,x)>` over sampled directions.
    pub lambda: f64,
    /// Spread (max - min) of `<alpha(x,x), alpha(x,x)>`.
    pub spread: f64,
}

pub fn isotropy_defect(
    imm: &ParametricImmersion,
    u: &Vector,
    n_dirs: usize,
    seed: u64,
) -> Result<IsotropyReport> {
    let fp = frame_at(imm, u)?;
    if n_dirs < 2 * fp.dim() {
        return Err(GeomError::ConfigInvalid(format!(
            "isotropy sampling needs at least {} directions, got {n_dirs}",
            2 * fp.dim()
        )));
    }
    let mut defect: f64 = 0.0;
    let mut qmin = f64::MAX;
    let mut qmax = f64::MIN;
    let mut qsum = 0.0;
    let pairs = sampling::g_orthonormal_pairs(&fp.metric, n_dirs, seed);
    let count = pairs.len();
    for (x, y) in pairs {
        let axx = fp.alpha_vec(&x, &x);
        let axy = fp.alpha_vec(&x, &y);
        defect = defect.max(axx.dot(&axy).abs());
        let q = axx.dot(&axx);
        qmin = qmin.min(q);
        qmax = qmax.max(q);
        qsum += q;
    }
    Ok(IsotropyReport {
        defect,
        lambda: qsum / count as f64,
        spread: qmax - qmin,
    })
}

// ---------------------------------------------------------------------------
// Along-curve defects
// ---------------------------------------------------------------------------

fn interior_sup(values: &[Vector]) -> f64 {
    if values.len() < 3 {
        return 0.0;
    }
    values[1..values.len() - 1]
        .iter()
        .map(Vector::norm)
        .fold(0.0, f64::max)
}

/// `sup_t |nabla-perp_T (H / |H|)|` along a trajectory.
pub fn parallel_normalized_h_defect(
    imm: &ParametricImmersion,
    traj: &CurveTrajectory,
) -> Result<f64> {
    let frames = frames_along(imm, traj)?;
    let min_h = frames.iter().map(|f| f.h_norm).fold(f64::MAX, f64::min);
    if min_h < tol::H_FLOOR {
        return Err(GeomError::MeanCurvatureVanishes {
            min_norm: min_h,
            floor: tol::H_FLOOR,
        });
    }
    let xi: Vec<Vector> = frames
        .iter()
        .map(|f| &f.mean_curvature / f.h_norm)
        .collect();
    let rates = normal_derivative_along(&frames, &traj.times, &xi)?;
    Ok(interior_sup(&rates))
}

/// `sup_t |nabla-perp_T H|` along a trajectory.
pub fn extrinsic_sphere_defect(
    imm: &ParametricImmersion,
    traj: &CurveTrajectory,
) -> Result<f64> {
    let frames = frames_along(imm, traj)?;
    let xi: Vec<Vector> = frames.iter().map(|f| f.mean_curvature.clone()).collect();
    let rates = normal_derivative_along(&frames, &traj.times, &xi)?;
    Ok(interior_sup(&rates))
}

// ---------------------------------------------------------------------------
// Normal/tangent equation residuals
// ---------------------------------------------------------------------------

/// Sup-norm residuals of the decomposed curve equations along a geodesic
/// or pseudo-geodesic trajectory, each normalized by
/// `kappa_tilde_max^3 + eps`.
#[derive(Debug, Clone, Serialize)]
pub struct NormalEquationResiduals {
    /// Full tangent equation.
    pub tangent_full: f64,
    /// Full normal equation.
    pub normal_full: f64,
    /// Simplified tangent equation `A_{alpha(T,T)} T + tau^2 T = 0`
    /// (pseudo-geodesics with nonzero `c` only).
    pub tangent_simplified: Option<f64>,
    /// Simplified normal equation with the `tau'/tau` term.
    pub normal_simplified: Option<f64>,
    /// Umbilic-form tangent equation (the intrinsic planarity identity).
    pub tangent_umbilic_form: f64,
    /// Umbilic-form normal equation in terms of `alpha(T,T)/tau`.
    pub normal_umbilic_form: Option<f64>,
    /// Samples excluded by the tau floor.
    pub excluded_samples: usize,
    pub tau_floor: f64,
}

pub fn normal_equation_residuals(
    imm: &ParametricImmersion,
    traj: &CurveTrajectory,
) -> Result<NormalEquationResiduals> {
    let c_opt = match &traj.kind {
        CurveKind::Geodesic => None,
        CurveKind::PseudoGeodesic { c } => Some(*c),
        other => {
            return Err(GeomError::InvalidInput(format!(
                "normal-equation residuals need a geodesic or pseudo-geodesic trajectory, got {other:?}"
            )))
        }
    };
    let n = traj.len();
    if n < 5 {
        return Err(GeomError::InsufficientSamples { got: n, need: 5 });
    }
    let frames = frames_along(imm, traj)?;
    let w = nabla_t_t_samples(traj, &frames);
    let kappa: Vec<f64> = w.iter().zip(&frames).map(|(wi, f)| f.g_norm(wi)).collect();
    let alpha_tt: Vec<Vector> = frames
        .iter()
        .zip(&traj.tangents)
        .map(|(f, t)| f.alpha_vec(t, t))
        .collect();
    let tau: Vec<f64> = alpha_tt.iter().map(Vector::norm).collect();
    let kt_max = ambient_acceleration_samples(imm, traj)
        .iter()
        .map(Vector::norm)
        .fold(0.0, f64::max);
    let scale = kt_max.powi(3) + tol::EPS_SCALE;

    let mut tangent_full: f64 = 0.0;
    let mut normal_full: f64 = 0.0;
    let mut tangent_simplified: f64 = 0.0;
    let mut normal_simplified: f64 = 0.0;
    let mut tangent_umbilic: f64 = 0.0;
    let mut normal_umbilic: f64 = 0.0;
    let mut excluded = 0usize;
    let mut any_simplified = false;

    for i in crate::fd::interior_range(n) {
        let fp = &frames[i];
        let t_vec = &traj.tangents[i];
        let kprime = crate::fd::scalar_rate(&traj.times, &kappa, i);
        let tprime = crate::fd::scalar_rate(&traj.times, &tau, i);
        let denom = kappa[i] * kappa[i] + tau[i] * tau[i];
        let ratio = if denom > tol::TAU_FLOOR * tol::TAU_FLOOR {
            (kappa[i] * kprime + tau[i] * tprime) / denom
        } else {
            0.0
        };

        let alpha_rate_i = fp.normal_projector() * crate::fd::vector_rate(&traj.times, &alpha_tt, i);
        let w_rate = crate::fd::vector_rate(&traj.times, &w, i);
        let nabla2 = w_rate + fp.christoffel_contract(t_vec, &w[i]);
        let a_alpha = fp.shape_operator(&alpha_tt[i])?;

        // Full tangent equation.
        let r_tan = &nabla2 + &(&a_alpha * t_vec) + t_vec * denom - &w[i] * ratio;
        tangent_full = tangent_full.max(fp.g_norm(&r_tan));

        // Full normal equation.
        let r_norm = fp.alpha_vec(t_vec, &w[i]) + &alpha_rate_i - &alpha_tt[i] * ratio;
        normal_full = normal_full.max(r_norm.norm());

        // Umbilic-form tangent equation.
        let r_ut = &nabla2 + t_vec * (kappa[i] * kappa[i]) - &w[i] * ratio;
        tangent_umbilic = tangent_umbilic.max(fp.g_norm(&r_ut));

        // Umbilic-form normal equation with alpha-bar = alpha(T,T)/tau.
        // The tau floor must hold on the whole difference stencil.
        let lo = i.saturating_sub(2);
        let hi = (i + 2).min(n - 1);
        if tau[lo..=hi].iter().any(|t| *t < tol::TAU_FLOOR) {
            excluded += 1;
            continue;
        }
        let abar: Vec<Vector> = (lo..=hi).map(|j| &alpha_tt[j] / tau[j]).collect();
        let abar_times = &traj.times[lo..=hi];
        let abar_rate = fp.normal_projector()
            * crate::fd::vector_rate(abar_times, &abar, i - lo);
        let abar_i = &alpha_tt[i] / tau[i];
        let r_un = &abar_rate * tau[i] + &abar_i * tprime - &abar_i * (tau[i] * ratio);
        normal_umbilic = normal_umbilic.max(r_un.norm());

        if let Some(c) = c_opt {
            if c != 0.0 {
                any_simplified = true;
                let r_ts = (&a_alpha * t_vec) + t_vec * (tau[i] * tau[i]);
                tangent_simplified = tangent_simplified.max(fp.g_norm(&r_ts));
                let r_ns = fp.alpha_vec(t_vec, &w[i]) + &alpha_rate_i
                    - &alpha_tt[i] * (tprime / tau[i]);
                normal_simplified = normal_simplified.max(r_ns.norm());
            }
        }
    }

    Ok(NormalEquationResiduals {
        tangent_full: tangent_full / scale,
        normal_full: normal_full / scale,
        tangent_simplified: any_simplified.then_some(tangent_simplified / scale),
        normal_simplified: any_simplified.then_some(normal_simplified / scale),
        tangent_umbilic_form: tangent_umbilic / scale,
        normal_umbilic_form: (excluded < n.saturating_sub(2)).then_some(normal_umbilic / scale),
        excluded_samples: excluded,
        tau_floor: tol::TAU_FLOOR,
    })
}

// ---------------------------------------------------------------------------
// Constructed planar-shape curves (plane sections of round-sphere charts)
// ---------------------------------------------------------------------------

/// Latitude-circle section of a round-sphere chart `(theta, phi)`:
/// the intersection of the sphere with the plane at height `cos(theta0)`,
/// arc-length parametrized, as a sampled trajectory. Exactly planar in the
/// ambient by construction, independent of the integrators.
pub fn sphere_plane_section(
    imm: &ParametricImmersion,
    theta0: f64,
    h: f64,
) -> Result<CurveTrajectory> {
    let r = theta0.sin();
    if r <= 0.05 {
        return Err(GeomError::ConfigInvalid(format!(
            "section latitude too close to a pole: theta0 = {theta0}"
        )));
    }
    let circumference = 2.0 * std::f64::consts::PI * r;
    let steps = (circumference / h).ceil() as usize;
    let times: Vec<f64> = (0..=steps)
        .map(|k| -circumference / 2.0 + k as f64 * h)
        .collect();
    let m = imm.dim();
    let mut points = Vec::with_capacity(times.len());
    let mut tangents = Vec::with_capacity(times.len());
    let mut rates = Vec::with_capacity(times.len());
    for &t in &times {
        let mut u = Vector::zeros(m);
        u[0] = theta0;
        u[1] = t / r;
        let mut tan = Vector::zeros(m);
        tan[1] = 1.0 / r;
        points.push(u);
        tangents.push(tan);
        rates.push(Vector::zeros(m));
    }
    CurveTrajectory::from_samples(imm, times, points, tangents, Some(rates))
}

/// Lemma-style spot check of the second form at a point: whether the
/// sampled frame satisfies "for each orthonormal pair, `alpha(x,y) = 0`
/// or `alpha(x,x) = alpha(y,y) = 0`", whether an asymptotic direction was
/// sampled, and the sampled sup of `|alpha|`.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaSpotCheck {
    pub hypothesis_holds: bool,
    pub has_asymptotic: bool,
    pub alpha_sup: f64,
}

pub fn lemma_alpha_spot_check(
    imm: &ParametricImmersion,
    u: &Vector,
    n_dirs: usize,
    seed: u64,
    zero_tol: f64,
) -> Result<AlphaSpotCheck> {
    let fp = frame_at(imm, u)?;
    let mut hypothesis_holds = true;
    let mut has_asymptotic = false;
    let mut alpha_sup: f64 = 0.0;
    for (x, y) in sampling::g_orthonormal_pairs(&fp.metric, n_dirs, seed) {
        let axx = fp.alpha_vec(&x, &x).norm();
        let ayy = fp.alpha_vec(&y, &y).norm();
        let axy = fp.alpha_vec(&x, &y).norm();
        alpha_sup = alpha_sup.max(axx).max(ayy).max(axy);
        if axx <= zero_tol {
            has_asymptotic = true;
        }
        if axy > zero_tol && (axx > zero_tol || ayy > zero_tol) {
            hypothesis_holds = false;
        }
    }
    Ok(AlphaSpotCheck {
        hypothesis_holds,
        has_asymptotic,
        alpha_sup,
    })
}

/// Eigenvector defect of the decomposition argument for hypersurfaces:
/// `min_{sign} |A x -+ tau x|_g` for the unit normal's shape operator.
pub fn shape_eigenvector_defect(fp: &FramePacket, x: &Vector) -> Result<f64> {
    if fp.codim() != 1 {
        return Err(GeomError::InvalidInput(
            "eigenvector defect is defined for hypersurfaces".into(),
        ));
    }
    let eta: Vector = fp.normals.column(0).into();
    let a = fp.shape_operator(&eta)?;
    let tau = fp.alpha_vec(x, x).norm();
    let ax = &a * x;
    let plus = fp.g_norm(&(&ax - x * tau));
    let minus = fp.g_norm(&(&ax + x * tau));
    Ok(plus.min(minus))
}

// ---------------------------------------------------------------------------
// Theorem suite
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "MainTH-fwd")]
    MainThForward,
    #[serde(rename = "MainTH-conv")]
    MainThConverse,
    #[serde(rename = "COR")]
    Corollary,
    #[serde(rename = "PlanarImpliesPG")]
    PlanarImpliesPg,
    #[serde(rename = "SecondTH")]
    SecondTh,
    #[serde(rename = "ThirdTH")]
    ThirdTh,
}

impl TheoremId {
    pub fn all() -> [TheoremId; 6] {
        [
            TheoremId::MainThForward,
            TheoremId::MainThConverse,
            TheoremId::Corollary,
            TheoremId::PlanarImpliesPg,
            TheoremId::SecondTh,
            TheoremId::ThirdTh,
        ]
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::MainThForward => "MainTH-fwd",
            TheoremId::MainThConverse => "MainTH-conv",
            TheoremId::Corollary => "COR",
            TheoremId::PlanarImpliesPg => "PlanarImpliesPG",
            TheoremId::SecondTh => "SecondTH",
            TheoremId::ThirdTh => "ThirdTH",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NamedDefect {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub satisfied: bool,
}

impl NamedDefect {
    fn below(name: &str, value: f64, threshold: f64) -> Self {
        NamedDefect {
            name: name.to_string(),
            value,
            threshold,
            satisfied: value <= threshold,
        }
    }

    fn above(name: &str, value: f64, threshold: f64) -> Self {
        NamedDefect {
            name: name.to_string(),
            value,
            threshold,
            satisfied: value >= threshold,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremVerdict {
    pub theorem: TheoremId,
    pub entry: String,
    pub hypothesis: Vec<NamedDefect>,
    pub conclusion: Vec<NamedDefect>,
    pub consistent: bool,
    pub details: Vec<String>,
}

/// Suite configuration: seeds, spans, and thresholds for the verdicts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub step: f64,
    pub span: [f64; 2],
    pub c_values: Vec<f64>,
    /// Chart points for pointwise defect grids.
    pub grid_points: usize,
    /// Directions per point for defect sampling.
    pub defect_directions: usize,
    /// Chart points seeding curves.
    pub seed_points: usize,
    /// Directions per seed point.
    pub seed_directions: usize,
    pub thresholds: Thresholds,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            step: tol::DEFAULT_STEP,
            span: [-std::f64::consts::PI, std::f64::consts::PI],
            c_values: vec![0.5, 1.0, 2.0],
            grid_points: 9,
            defect_directions: tol::DEFAULT_DIRECTIONS,
            seed_points: 4,
            seed_directions: 6,
            thresholds: Thresholds::default(),
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) {
            return Err(GeomError::ConfigInvalid("step must be positive".into()));
        }
        if !(self.span[0] < 0.0 && self.span[1] > 0.0) {
            return Err(GeomError::ConfigInvalid(
                "span must contain 0 in its interior".into(),
            ));
        }
        self.thresholds.validate()?;
        if self.grid_points == 0 || self.seed_points == 0 || self.seed_directions == 0 {
            return Err(GeomError::ConfigInvalid(
                "grid and seed counts must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Hypothesis tolerance for "defect vanishes" checks.
const DEFECT_SMALL: f64 = 1e-6;
/// Witness threshold for "defect is genuinely nonzero" checks.
const DEFECT_LARGE: f64 = 0.1;
/// Minimum samples for a seed to count (truncated seeds below this are
/// skipped and recorded).
const MIN_SAMPLES: usize = 64;

/// A seed-labeled trajectory produced by the suite's deterministic seeding.
pub struct SeedCurve {
    pub label: String,
    pub traj: CurveTrajectory,
}

fn grid_of(entry: &CatalogEntry, config: &SuiteConfig) -> Vec<Vector> {
    sampling::lattice_points(
        entry.immersion.domain(),
        config.grid_points,
        0.3,
        config.seed,
    )
}

fn curve_seeds(entry: &CatalogEntry, config: &SuiteConfig) -> Result<Vec<(Vector, Vector, String)>> {
    let mut out = Vec::new();
    let points = sampling::lattice_points(
        entry.immersion.domain(),
        config.seed_points,
        0.35,
        config.seed ^ 0x5eed,
    );
    for (pi, p) in points.iter().enumerate() {
        let fp = frame_at(&entry.immersion, p)?;
        let dirs = sampling::g_unit_directions(
            &fp.metric,
            config.seed_directions,
            config.seed ^ (pi as u64).wrapping_mul(0x9e37),
        );
        for (di, x) in dirs.into_iter().enumerate() {
            out.push((p.clone(), x, format!("p{pi}-d{di}")));
        }
    }
    Ok(out)
}

/// The geodesic trajectories a suite integrates for an entry.
pub fn geodesic_seed_curves(entry: &CatalogEntry, config: &SuiteConfig) -> Result<Vec<SeedCurve>> {
    let mut out = Vec::new();
    for (p, x, label) in curve_seeds(entry, config)? {
        let traj = integrate_geodesic(&entry.immersion, &p, &x, config.span, config.step)?;
        if traj.len() >= MIN_SAMPLES {
            out.push(SeedCurve {
                label: format!("geo-{label}"),
                traj,
            });
        }
    }
    Ok(out)
}

/// The planar pseudo-geodesic trajectories a suite integrates for an entry.
pub fn pseudo_geodesic_seed_curves(
    entry: &CatalogEntry,
    config: &SuiteConfig,
) -> Result<Vec<SeedCurve>> {
    let mut out = Vec::new();
    for (p, x, label) in curve_seeds(entry, config)? {
        let fp = frame_at(&entry.immersion, &p)?;
        // Deterministic g-unit y orthogonal to x.
        let seed_y = sampling::g_unit_directions(&fp.metric, 1, config.seed ^ 0x77)
            .pop()
            .expect("one direction");
        let mut y = &seed_y - &x * fp.g_dot(&x, &seed_y);
        if fp.g_norm(&y) < 1e-6 {
            // x happened to be parallel to the candidate; rotate a basis vector in.
            let mut e = Vector::zeros(x.len());
            e[0] = 1.0;
            y = &e - &x * fp.g_dot(&x, &e);
        }
        for &c in &config.c_values {
            let spec = PseudoGeodesicSpec::new(
                &entry.immersion,
                p.clone(),
                x.clone(),
                y.clone(),
                c,
                config.span,
                config.step,
            )?;
            let traj = integrate_planar_pseudo_geodesic(&entry.immersion, &spec)?;
            if traj.len() >= MIN_SAMPLES {
                out.push(SeedCurve {
                    label: format!("pg-c{c}-{label}"),
                    traj,
                });
            }
        }
    }
    Ok(out)
}

fn umbilicity_grid_sup(entry: &CatalogEntry, config: &SuiteConfig) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for u in grid_of(entry, config) {
        sup = sup.max(umbilicity_defect(
            &entry.immersion,
            &u,
            config.defect_directions,
            config.seed,
        )?);
    }
    Ok(sup)
}

fn shape_planarity(
    entry: &CatalogEntry,
    curves: &[SeedCurve],
    thresholds: Thresholds,
) -> Result<(f64, Option<String>, Option<String>)> {
    let mut max_fit: f64 = 0.0;
    let mut worst = None;
    let mut nonplanar_witness = None;
    for sc in curves {
        let report = ambient_planarity_residual(&entry.immersion, &sc.traj, thresholds)?;
        if report.residual_fit > max_fit {
            max_fit = report.residual_fit;
            worst = Some(sc.label.clone());
        }
        if report.verdict == Verdict::NonPlanar && nonplanar_witness.is_none() {
            nonplanar_witness = Some(sc.label.clone());
        }
    }
    Ok((max_fit, worst, nonplanar_witness))
}

fn verdict_main_forward(
    entry: &CatalogEntry,
    config: &SuiteConfig,
    geodesics_only: bool,
) -> Result<TheoremVerdict> {
    let umb = umbilicity_grid_sup(entry, config)?;
    let curves = if geodesics_only {
        geodesic_seed_curves(entry, config)?
    } else {
        pseudo_geodesic_seed_curves(entry, config)?
    };
    let (max_fit, worst, _) = shape_planarity(entry, &curves, config.thresholds)?;
    let hyp = NamedDefect::below("umbilicity-sup", umb, DEFECT_SMALL);
    let concl = NamedDefect::below(
        "ambient-planarity-fit-max",
        max_fit,
        config.thresholds.planar,
    );
    let consistent = !hyp.satisfied || concl.satisfied;
    let mut details = vec![format!("{} curve seeds", curves.len())];
    if let Some(w) = worst {
        details.push(format!("largest fit residual at seed {w}"));
    }
    Ok(TheoremVerdict {
        theorem: if geodesics_only {
            TheoremId::Corollary
        } else {
            TheoremId::MainThForward
        },
        entry: entry.name.to_string(),
        hypothesis: vec![hyp],
        conclusion: vec![concl],
        consistent,
        details,
    })
}

fn verdict_main_converse(entry: &CatalogEntry, config: &SuiteConfig) -> Result<TheoremVerdict> {
    let umb = umbilicity_grid_sup(entry, config)?;
    let curves = pseudo_geodesic_seed_curves(entry, config)?;
    let (max_fit, _, witness) = shape_planarity(entry, &curves, config.thresholds)?;
    let hyp = NamedDefect::above("umbilicity-sup", umb, DEFECT_LARGE);
    let concl = NamedDefect::above(
        "ambient-planarity-fit-max",
        max_fit,
        config.thresholds.reject,
    );
    let consistent = !hyp.satisfied || concl.satisfied;
    let mut details = vec![format!("{} curve seeds", curves.len())];
    if let Some(w) = witness {
        details.push(format!("non-planar extrinsic shape at seed {w}"));
    }
    Ok(TheoremVerdict {
        theorem: TheoremId::MainThConverse,
        entry: entry.name.to_string(),
        hypothesis: vec![hyp],
        conclusion: vec![concl],
        consistent,
        details,
    })
}

fn is_round_sphere_chart(entry: &CatalogEntry) -> bool {
    entry.name == "sphere2" || entry.name == "sphere2-in-R4"
}

fn verdict_planar_implies_pg(
    entry: &CatalogEntry,
    config: &SuiteConfig,
) -> Result<TheoremVerdict> {
    if !is_round_sphere_chart(entry) {
        return Err(GeomError::ConfigInvalid(format!(
            "PlanarImpliesPG runs on round-sphere charts, not {}",
            entry.name
        )));
    }
    let umb = umbilicity_grid_sup(entry, config)?;
    // 10 plane sections at offsets bounded away from pole and equator.
    let offsets: Vec<f64> = (0..10)
        .map(|k| -0.85 + 1.7 * (k as f64 + 0.5) / 10.0)
        .filter(|d| d.abs() > 0.04)
        .collect();
    let mut max_fit: f64 = 0.0;
    let mut max_stdev: f64 = 0.0;
    let mut max_pnh: f64 = 0.0;
    let mut used = 0usize;
    for d in &offsets {
        let theta0 = d.acos();
        let traj = sphere_plane_section(&entry.immersion, theta0, config.step)?;
        let report = ambient_planarity_residual(&entry.immersion, &traj, config.thresholds)?;
        max_fit = max_fit.max(report.residual_fit);
        max_pnh = max_pnh.max(parallel_normalized_h_defect(&entry.immersion, &traj)?);
        let prof = curvature_profile(&entry.immersion, &traj)?;
        let ratios: Vec<f64> = prof
            .kappa
            .iter()
            .zip(&prof.tau)
            .filter(|(k, _)| **k >= tol::TAU_FLOOR)
            .map(|(k, t)| t / k)
            .collect();
        if ratios.len() >= 2 {
            used += 1;
            let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
            let var = ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>()
                / ratios.len() as f64;
            max_stdev = max_stdev.max(var.sqrt());
        }
    }
    let hyp = vec![
        NamedDefect::below("umbilicity-sup", umb, DEFECT_SMALL),
        NamedDefect::below("parallel-normalized-H-sup", max_pnh, DEFECT_SMALL),
        NamedDefect::below(
            "section-shape-planarity-fit",
            max_fit,
            config.thresholds.planar,
        ),
    ];
    let concl = vec![NamedDefect::below(
        "stdev(tau/kappa)-max",
        max_stdev,
        1e-6,
    )];
    let consistent = !hyp.iter().all(|h| h.satisfied) || concl.iter().all(|c| c.satisfied);
    Ok(TheoremVerdict {
        theorem: TheoremId::PlanarImpliesPg,
        entry: entry.name.to_string(),
        hypothesis: hyp,
        conclusion: concl,
        consistent,
        details: vec![format!("{used} plane sections with kappa above floor")],
    })
}

fn verdict_second_th(entry: &CatalogEntry, config: &SuiteConfig) -> Result<TheoremVerdict> {
    if entry.immersion.codim() != 1 {
        return Err(GeomError::ConfigInvalid(format!(
            "SecondTH applies to hypersurfaces; {} has codimension {}",
            entry.name,
            entry.immersion.codim()
        )));
    }
    let umb = umbilicity_grid_sup(entry, config)?;
    let curves = geodesic_seed_curves(entry, config)?;
    let thresholds = config.thresholds;
    let mut all_planar = true;
    let mut any_nonplanar: Option<String> = None;
    let mut eig_defect: f64 = 0.0;
    let mut planar_seeds = 0usize;
    for sc in &curves {
        let report = ambient_planarity_residual(&entry.immersion, &sc.traj, thresholds)?;
        match report.verdict {
            Verdict::Planar => {
                planar_seeds += 1;
                // Eq-(5.8)-style check: the seed direction is an eigenvector
                // of the shape operator at non-asymptotic seeds.
                let i0 = sc.traj.index_at_time_zero();
                let fp = frame_at(&entry.immersion, &sc.traj.points[i0])?;
                let x = &sc.traj.tangents[i0];
                if fp.alpha_vec(x, x).norm() >= tol::TAU_FLOOR {
                    eig_defect = eig_defect.max(shape_eigenvector_defect(&fp, x)?);
                }
            }
            Verdict::NonPlanar => {
                all_planar = false;
                if any_nonplanar.is_none() {
                    any_nonplanar = Some(sc.label.clone());
                }
            }
            Verdict::Indeterminate => {
                all_planar = false;
            }
        }
    }

    // Forward: all geodesic shapes planar => umbilic.
    let forward_ok = !all_planar || umb <= DEFECT_SMALL;
    // Contrapositive: genuinely non-umbilic => some non-planar shape.
    let contrapositive_ok = umb < DEFECT_LARGE || any_nonplanar.is_some();
    let eig_ok = eig_defect <= 1e-6;

    let hypothesis = vec![NamedDefect {
        name: "all-geodesic-shapes-planar".into(),
        value: if all_planar { 1.0 } else { 0.0 },
        threshold: 1.0,
        satisfied: all_planar,
    }];
    let conclusion = vec![
        NamedDefect::below("umbilicity-sup", umb, DEFECT_SMALL),
        NamedDefect::below("eigenvector-defect-max", eig_defect, 1e-6),
    ];
    let mut details = vec![format!(
        "{} geodesic seeds, {planar_seeds} planar shapes",
        curves.len()
    )];
    if let Some(w) = &any_nonplanar {
        details.push(format!("non-planar geodesic shape at seed {w}"));
    }
    Ok(TheoremVerdict {
        theorem: TheoremId::SecondTh,
        entry: entry.name.to_string(),
        hypothesis,
        conclusion,
        consistent: forward_ok && contrapositive_ok && eig_ok,
        details,
    })
}

fn verdict_third_th(entry: &CatalogEntry, config: &SuiteConfig) -> Result<TheoremVerdict> {
    let curves = geodesic_seed_curves(entry, config)?;
    let thresholds = config.thresholds;
    let mut all_planar = true;
    let mut kt_const = true;
    let mut max_fit: f64 = 0.0;
    let mut max_kt_wobble: f64 = 0.0;
    for sc in &curves {
        let report = ambient_planarity_residual(&entry.immersion, &sc.traj, thresholds)?;
        max_fit = max_fit.max(report.residual_fit);
        if report.verdict != Verdict::Planar {
            all_planar = false;
        }
        let prof = curvature_profile(&entry.immersion, &sc.traj)?;
        let kt_min = prof.kappa_tilde.iter().cloned().fold(f64::MAX, f64::min);
        let kt_max = prof.kappa_tilde.iter().cloned().fold(f64::MIN, f64::max);
        let wobble = kt_max - kt_min;
        max_kt_wobble = max_kt_wobble.max(wobble);
        if wobble > 1e-6 {
            kt_const = false;
        }
    }

    let mut iso_defect: f64 = 0.0;
    let mut lambda_min = f64::MAX;
    let mut lambda_max = f64::MIN;
    let mut spread_sup: f64 = 0.0;
    for u in grid_of(entry, config) {
        let report = isotropy_defect(
            &entry.immersion,
            &u,
            config.defect_directions,
            config.seed,
        )?;
        iso_defect = iso_defect.max(report.defect);
        spread_sup = spread_sup.max(report.spread);
        lambda_min = lambda_min.min(report.lambda);
        lambda_max = lambda_max.max(report.lambda);
    }
    let lambda_spread = lambda_max - lambda_min;

    let forward_ok = !all_planar || iso_defect <= DEFECT_SMALL;
    let circle_ok = !(all_planar && kt_const) || lambda_spread <= 1e-6;

    Ok(TheoremVerdict {
        theorem: TheoremId::ThirdTh,
        entry: entry.name.to_string(),
        hypothesis: vec![
            NamedDefect {
                name: "all-geodesic-shapes-planar".into(),
                value: if all_planar { 1.0 } else { 0.0 },
                threshold: 1.0,
                satisfied: all_planar,
            },
            NamedDefect::below("kappa-tilde-wobble-max", max_kt_wobble, 1e-6),
        ],
        conclusion: vec![
            NamedDefect::below("isotropy-defect-sup", iso_defect, DEFECT_SMALL),
            NamedDefect::below("isotropy-spread-sup", spread_sup, DEFECT_SMALL),
            NamedDefect::below("lambda-grid-spread", lambda_spread, 1e-6),
        ],
        consistent: forward_ok && circle_ok,
        details: vec![format!(
            "{} geodesic seeds, max fit residual {max_fit:.3e}",
            curves.len()
        )],
    })
}

/// Run the requested theorem verdicts over an ensemble of catalog entries.
pub fn theorem_suite(
    entries: &[CatalogEntry],
    suites: &[TheoremId],
    config: &SuiteConfig,
) -> Result<Vec<TheoremVerdict>> {
    config.validate()?;
    let mut out = Vec::new();
    for entry in entries {
        for suite in suites {
            let verdict = match suite {
                TheoremId::MainThForward => verdict_main_forward(entry, config, false)?,
                TheoremId::Corollary => verdict_main_forward(entry, config, true)?,
                TheoremId::MainThConverse => verdict_main_converse(entry, config)?,
                TheoremId::PlanarImpliesPg => verdict_planar_implies_pg(entry, config)?,
                TheoremId::SecondTh => verdict_second_th(entry, config)?,
                TheoremId::ThirdTh => verdict_third_th(entry, config)?,
            };
            out.push(verdict);
        }
    }
    Ok(out)
}
