//! Parallel transport, Cartan development, and the planarity residual
//! functionals for intrinsic curves and extrinsic shapes.
//!
//! The development of a curve anchors at a sample point `p = gamma(t_a)`;
//! its velocity is the parallel transport of `T(t)` back to `p`, and the
//! curve itself is recovered by quadrature of the same RK4 order (the
//! transport and the quadrature run as one joint system).

use crate::ambient::AmbientSpace;
use crate::error::{GeomError, Result};
use crate::frame::{frame_at, FramePacket};
use crate::immersion::ParametricImmersion;
use crate::integrate::{
    ambient_acceleration_samples, extrinsic_shape, frames_along, nabla_t_t_samples,
    CurveTrajectory,
};
use crate::tol;
use crate::{Matrix, Vector};
use serde::{Deserialize, Serialize};

/// Verdict bands for planarity residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub planar: f64,
    pub reject: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            planar: tol::THRESHOLD_PLANAR,
            reject: tol::THRESHOLD_REJECT,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.planar > 0.0 && self.reject > self.planar) {
            return Err(GeomError::ConfigInvalid(format!(
                "thresholds must satisfy 0 < planar < reject, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Planar,
    NonPlanar,
    Indeterminate,
}

/// Planarity decision with both residual routes reported.
#[derive(Debug, Clone, Serialize)]
pub struct PlanarityReport {
    pub residual_ode: f64,
    pub residual_fit: f64,
    pub verdict: Verdict,
    pub thresholds: Thresholds,
    pub samples_used: usize,
}

impl PlanarityReport {
    fn new(residual_ode: f64, residual_fit: f64, thresholds: Thresholds, samples: usize) -> Self {
        let max = residual_ode.max(residual_fit);
        let min = residual_ode.min(residual_fit);
        let verdict = if max < thresholds.planar {
            Verdict::Planar
        } else if min > thresholds.reject {
            Verdict::NonPlanar
        } else {
            Verdict::Indeterminate
        };
        PlanarityReport {
            residual_ode,
            residual_fit,
            verdict,
            thresholds,
            samples_used: samples,
        }
    }
}

// ---------------------------------------------------------------------------
// Parallel transport
// ---------------------------------------------------------------------------

/// RK4 transport of chart vectors along the trajectory between two
/// parameters, with dense Hermite evaluation of `(u, T)` at stage points.
fn transport_ode(
    imm: &ParametricImmersion,
    traj: &CurveTrajectory,
    vectors: &mut [Vector],
    t_a: f64,
    t_b: f64,
    h: f64,
) -> Result<()> {
    if (t_b - t_a).abs() < 1e-15 {
        return Ok(());
    }
    let steps = ((t_b - t_a).abs() / h).ceil().max(1.0) as usize;
    let dt = (t_b - t_a) / steps as f64;
    let rhs = |t: f64, vs: &[Vector]| -> Result<Vec<Vector>> {
        let u = traj.eval_point(t)?;
        let tan = traj.eval_tangent(t)?;
        let fp = frame_at(imm, &u)?;
        Ok(vs
            .iter()
            .map(|v| -fp.christoffel_contract(&tan, v))
            .collect())
    };
    let mut t = t_a;
    let mut state: Vec<Vector> = vectors.to_vec();
    for _ in 0..steps {
        let k1 = rhs(t, &state)?;
        let s2: Vec<Vector> = state
            .iter()
            .zip(&k1)
            .map(|(y, k)| y + k * (dt / 2.0))
            .collect();
        let k2 = rhs(t + dt / 2.0, &s2)?;
        let s3: Vec<Vector> = state
            .iter()
            .zip(&k2)
            .map(|(y, k)| y + k * (dt / 2.0))
            .collect();
        let k3 = rhs(t + dt / 2.0, &s3)?;
        let s4: Vec<Vector> = state
            .iter()
            .zip(&k3)
            .map(|(y, k)| y + k * dt)
            .collect();
        let k4 = rhs(t + dt, &s4)?;
        for (i, y) in state.iter_mut().enumerate() {
            *y += (&k1[i] + &k2[i] * 2.0 + &k3[i] * 2.0 + &k4[i]) * (dt / 6.0);
        }
        t += dt;
    }
    vectors.clone_from_slice(&state);
    Ok(())
}

/// Parallel transport of a tangent vector from `gamma(t_a)` to
/// `gamma(t_b)` along the trajectory.
pub fn parallel_transport(
    imm: &ParametricImmersion,
    traj: &CurveTrajectory,
    v: &Vector,
    t_a: f64,
    t_b: f64,
) -> Result<Vector> {
    traj.check_in_span(t_a)?;
    traj.check_in_span(t_b)?;
    let h = grid_step(traj);
    let mut vs = [v.clone()];
    transport_ode(imm, traj, &mut vs, t_a, t_b, h)?;
    let [out] = vs;
    Ok(out)
}

fn grid_step(traj: &CurveTrajectory) -> f64 {
    let n = traj.len();
    ((traj.times[n - 1] - traj.times[0]) / (n - 1) as f64).abs().max(1e-9)
}

// ---------------------------------------------------------------------------
// Cartan development
// ---------------------------------------------------------------------------

/// Development of a trajectory in the tangent space at the anchor sample.
#[derive(Debug, Clone)]
pub struct DevelopedCurve {
    pub times: Vec<f64>,
    /// `gamma*(t_i)` in chart components of `T_p M`.
    pub points: Vec<Vector>,
    /// `(gamma*)'(t_i)` in chart components.
    pub velocities: Vec<Vector>,
    /// Metric at the base point (inner product on `T_p M`).
    pub base_metric: Matrix,
    /// The same samples in a g(p)-orthonormal basis; plane fits happen here.
    pub on_points: Vec<Vector>,
    pub on_velocities: Vec<Vector>,
}

impl DevelopedCurve {
    /// Max deviation of the developed speed from 1 in the g(p) norm.
    pub fn max_speed_defect(&self) -> f64 {
        self.on_velocities
            .iter()
            .map(|v| (v.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// g-orthonormal basis of the chart tangent space at a frame.
fn g_orthonormal_basis(fp: &FramePacket) -> Vec<Vector> {
    let m = fp.dim();
    let mut basis: Vec<Vector> = Vec::with_capacity(m);
    for i in 0..m {
        let mut v = Vector::zeros(m);
        v[i] = 1.0;
        for b in &basis {
            v -= b * fp.g_dot(b, &v);
        }
        let n = fp.g_norm(&v);
        basis.push(v / n);
    }
    basis
}

/// Cartan development anchored at the sample nearest `anchor_time`.
///
/// Transporting a g(p)-orthonormal basis forward along the curve and
/// reading `T` in it gives the developed velocity (transport back to `p`
/// equals expansion in the transported basis, since transport preserves
/// inner products); the developed curve is the joint RK4 quadrature.
pub fn cartan_development(
    imm: &ParametricImmersion,
    traj: &CurveTrajectory,
    anchor_time: f64,
) -> Result<DevelopedCurve> {
    traj.check_in_span(anchor_time)?;
    let n = traj.len();
    let anchor = traj
        .times
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (*a - anchor_time)
                .abs()
                .partial_cmp(&(*b - anchor_time).abs())
                .unwrap()
        })
        .map(|(i, _)| i)
        .expect("non-empty");
    let m = imm.dim();
    let fp0 = frame_at(imm, &traj.points[anchor])?;
    let basis = g_orthonormal_basis(&fp0);

    // Joint state: transported basis vectors then the quadrature variable.
    let mut on_coords: Vec<Vector> = vec![Vector::zeros(m); n];
    let mut on_vels: Vec<Vector> = vec![Vector::zeros(m); n];

    let read_velocity = |state: &[Vector], fp: &FramePacket, tan: &Vector| -> Vector {
        Vector::from_iterator(m, state[..m].iter().map(|b| fp.g_dot(tan, b)))
    };

    // Velocity at the anchor itself.
    on_vels[anchor] = read_velocity(
        &basis.iter().cloned().collect::<Vec<_>>(),
        &fp0,
        &traj.tangents[anchor],
    );

    for dir in [1i64, -1i64] {
        let mut state: Vec<Vector> = basis.clone();
        state.push(Vector::zeros(m));
        let mut i = anchor as i64;
        loop {
            let next = i + dir;
            if next < 0 || next >= n as i64 {
                break;
            }
            let (t0, t1) = (traj.times[i as usize], traj.times[next as usize]);
            let dt = t1 - t0;
            let rhs = |t: f64, st: &[Vector]| -> Result<Vec<Vector>> {
                let u = traj.eval_point(t)?;
                let tan = traj.eval_tangent(t)?;
                let fp = frame_at(imm, &u)?;
                let mut out: Vec<Vector> = st[..m]
                    .iter()
                    .map(|b| -fp.christoffel_contract(&tan, b))
                    .collect();
                out.push(read_velocity(st, &fp, &tan));
                Ok(out)
            };
            let k1 = rhs(t0, &state)?;
            let s2: Vec<Vector> = state.iter().zip(&k1).map(|(y, k)| y + k * (dt / 2.0)).collect();
            let k2 = rhs(t0 + dt / 2.0, &s2)?;
            let s3: Vec<Vector> = state.iter().zip(&k2).map(|(y, k)| y + k * (dt / 2.0)).collect();
            let k3 = rhs(t0 + dt / 2.0, &s3)?;
            let s4: Vec<Vector> = state.iter().zip(&k3).map(|(y, k)| y + k * dt).collect();
            let k4 = rhs(t1, &s4)?;
            for (j, y) in state.iter_mut().enumerate() {
                *y += (&k1[j] + &k2[j] * 2.0 + &k3[j] * 2.0 + &k4[j]) * (dt / 6.0);
            }
            let fp = frame_at(imm, &traj.points[next as usize])?;
            on_coords[next as usize] = state[m].clone();
            on_vels[next as usize] =
                read_velocity(&state, &fp, &traj.tangents[next as usize]);
            i = next;
        }
    }

    // Chart components from orthonormal coordinates.
    let mut basis_mat = Matrix::zeros(m, m);
    for (k, b) in basis.iter().enumerate() {
        basis_mat.set_column(k, b);
    }
    let points: Vec<Vector> = on_coords.iter().map(|y| &basis_mat * y).collect();
    let velocities: Vec<Vector> = on_vels.iter().map(|c| &basis_mat * c).collect();

    Ok(DevelopedCurve {
        times: traj.times.clone(),
        points,
        velocities,
        base_metric: fp0.metric.clone(),
        on_points: on_coords,
        on_velocities: on_vels,
    })
}

// ---------------------------------------------------------------------------
// Plane fitting
// ---------------------------------------------------------------------------

/// Plane-fit defect of a point cloud: center the samples, take singular
/// values `s1 >= s2 >= ...` of the sample matrix, return `s3 / s1`
/// (zero for exactly planar clouds and for ambient dimension below 3).
pub fn plane_fit_defect(points: &[Vector]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let d = points[0].len();
    let k = points.len();
    if d < 3 || k < 3 {
        return 0.0;
    }
    let mut centroid = Vector::zeros(d);
    for p in points {
        centroid += p;
    }
    centroid /= k as f64;
    let mut mat = Matrix::zeros(k, d);
    for (i, p) in points.iter().enumerate() {
        for j in 0..d {
            mat[(i, j)] = p[j] - centroid[j];
        }
    }
    let svd = mat.svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().cloned().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if s[0] < 1e-300 {
        return 0.0;
    }
    s.get(2).copied().unwrap_or(0.0) / s[0]
}

// ---------------------------------------------------------------------------
// Planarity residuals
// ---------------------------------------------------------------------------

/// Intrinsic planarity via the curvature ODE
/// `kappa nabla^2_T T + kappa^3 T - kappa' nabla_T T = 0`,
/// cross-checked by a plane fit of the Cartan development.
pub fn intrinsic_planarity_residual(
    imm: &ParametricImmersion,
    traj: &CurveTrajectory,
    thresholds: Thresholds,
) -> Result<PlanarityReport> {
    thresholds.validate()?;
    let n = traj.len();
    if n < 5 {
        return Err(GeomError::InsufficientSamples { got: n, need: 5 });
    }
    let frames = frames_along(imm, traj)?;
    let w = nabla_t_t_samples(traj, &frames);
    let kappa: Vec<f64> = w.iter().zip(&frames).map(|(wi, fp)| fp.g_norm(wi)).collect();
    let kappa_tilde_max = ambient_acceleration_samples(imm, traj)
        .iter()
        .map(Vector::norm)
        .fold(0.0, f64::max);

    let mut sup: f64 = 0.0;
    for i in crate::fd::interior_range(n) {
        let w_rate = crate::fd::vector_rate(&traj.times, &w, i);
        let nabla2 = w_rate + frames[i].christoffel_contract(&traj.tangents[i], &w[i]);
        let kprime = crate::fd::scalar_rate(&traj.times, &kappa, i);
        let residual = &nabla2 * kappa[i] + &traj.tangents[i] * kappa[i].powi(3)
            - &w[i] * kprime;
        sup = sup.max(frames[i].g_norm(&residual));
    }
    let residual_ode = sup / (kappa_tilde_max.powi(3) + tol::EPS_SCALE);

    let dev = cartan_development(imm, traj, anchor_near_zero(traj))?;
    let residual_fit = plane_fit_defect(&dev.on_points);

    Ok(PlanarityReport::new(residual_ode, residual_fit, thresholds, n))
}

fn anchor_near_zero(traj: &CurveTrajectory) -> f64 {
    traj.times[traj.index_at_time_zero()]
}

/// Ambient planarity of the extrinsic shape via the ambient curvature ODE,
/// with the plane fit taken in `R^N` (Euclidean ambient) or on the
/// development inside `Q` (level-set ambient).
pub fn ambient_planarity_residual(
    imm: &ParametricImmersion,
    traj: &CurveTrajectory,
    thresholds: Thresholds,
) -> Result<PlanarityReport> {
    thresholds.validate()?;
    let n = traj.len();
    if n < 5 {
        return Err(GeomError::InsufficientSamples { got: n, need: 5 });
    }
    let shape = extrinsic_shape(imm, traj);
    let ambient = imm.ambient();
    let acc_q: Vec<Vector> = shape
        .positions
        .iter()
        .zip(&shape.accelerations)
        .map(|(x, a)| ambient.project_to_tq(x, a))
        .collect();
    let kt: Vec<f64> = acc_q.iter().map(Vector::norm).collect();
    let kt_max = kt.iter().cloned().fold(0.0, f64::max);

    let mut sup: f64 = 0.0;
    for i in crate::fd::interior_range(n) {
        let rate = crate::fd::vector_rate(&shape.times, &acc_q, i);
        let nabla2 = ambient.project_to_tq(&shape.positions[i], &rate);
        let ktprime = crate::fd::scalar_rate(&shape.times, &kt, i);
        let residual = &nabla2 * kt[i] + &shape.velocities[i] * kt[i].powi(3)
            - &acc_q[i] * ktprime;
        sup = sup.max(residual.norm());
    }
    let residual_ode = sup / (kt_max.powi(3) + tol::EPS_SCALE);

    let residual_fit = if ambient.is_level_set() {
        let dev =
            develop_in_level_set(ambient, &shape.times, &shape.positions, &shape.velocities, &shape.accelerations, traj.index_at_time_zero())?;
        plane_fit_defect(&dev)
    } else {
        plane_fit_defect(&shape.positions)
    };

    Ok(PlanarityReport::new(residual_ode, residual_fit, thresholds, n))
}

/// Cartan development of an ambient curve inside a level-set hypersurface
/// `Q`, in an orthonormal basis of `T_p Q`. Transport in `Q` keeps each
/// basis vector tangent to `Q`; the only rate is along the unit normal.
pub fn develop_in_level_set(
    ambient: &AmbientSpace,
    times: &[f64],
    positions: &[Vector],
    velocities: &[Vector],
    accelerations: &[Vector],
    anchor: usize,
) -> Result<Vec<Vector>> {
    let field = ambient.field().ok_or_else(|| {
        GeomError::InvalidInput("development in Q requires a level-set ambient".into())
    })?;
    let n = times.len();
    let n_amb = ambient.embedding_dim();
    let dim_q = n_amb - 1;

    // Hermite data for dense evaluation of x and v.
    let hermite = |vals: &[Vector], rates: &[Vector], t: f64| -> Vector {
        // Locate segment.
        let mut i = match times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        i = i.min(n - 2);
        let (t0, t1) = (times[i], times[i + 1]);
        let h = t1 - t0;
        let s = ((t - t0) / h).clamp(0.0, 1.0);
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        &vals[i] * h00 + &rates[i] * (h10 * h) + &vals[i + 1] * h01 + &rates[i + 1] * (h11 * h)
    };

    // Orthonormal basis of T_p Q at the anchor.
    let p0 = &positions[anchor];
    let nu0 = ambient.unit_normal(p0).expect("level-set ambient");
    let mut basis: Vec<Vector> = Vec::with_capacity(dim_q);
    for j in 0..n_amb {
        if basis.len() == dim_q {
            break;
        }
        let mut v = Vector::zeros(n_amb);
        v[j] = 1.0;
        v -= &nu0 * nu0.dot(&v);
        for b in &basis {
            let d = b.dot(&v);
            v -= b * d;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v / norm);
        }
    }
    if basis.len() != dim_q {
        return Err(GeomError::InvalidInput(
            "failed to build a tangent basis of Q".into(),
        ));
    }

    let mut out = vec![Vector::zeros(dim_q); n];
    for dir in [1i64, -1i64] {
        let mut state: Vec<Vector> = basis.clone();
        state.push(Vector::zeros(dim_q));
        let mut i = anchor as i64;
        loop {
            let next = i + dir;
            if next < 0 || next >= n as i64 {
                break;
            }
            let (t0, t1) = (times[i as usize], times[next as usize]);
            let dt = t1 - t0;
            let rhs = |t: f64, st: &[Vector]| -> Vec<Vector> {
                let x = hermite(positions, velocities, t);
                let v = hermite(velocities, accelerations, t);
                let grad = field.gradient(&x);
                let gn = grad.norm();
                let nu = &grad / gn;
                let hess_v = field.hessian(&x) * &v;
                let nu_dot = (&hess_v - &nu * nu.dot(&hess_v)) / gn;
                let mut rates: Vec<Vector> = st[..dim_q]
                    .iter()
                    .map(|b| -(&nu) * b.dot(&nu_dot))
                    .collect();
                rates.push(Vector::from_iterator(
                    dim_q,
                    st[..dim_q].iter().map(|b| b.dot(&v)),
                ));
                rates
            };
            let k1 = rhs(t0, &state);
            let s2: Vec<Vector> = state.iter().zip(&k1).map(|(y, k)| y + k * (dt / 2.0)).collect();
            let k2 = rhs(t0 + dt / 2.0, &s2);
            let s3: Vec<Vector> = state.iter().zip(&k2).map(|(y, k)| y + k * (dt / 2.0)).collect();
            let k3 = rhs(t0 + dt / 2.0, &s3);
            let s4: Vec<Vector> = state.iter().zip(&k3).map(|(y, k)| y + k * dt).collect();
            let k4 = rhs(t1, &s4);
            for (j, y) in state.iter_mut().enumerate() {
                *y += (&k1[j] + &k2[j] * 2.0 + &k3[j] * 2.0 + &k4[j]) * (dt / 6.0);
            }
            out[next as usize] = state[dim_q].clone();
            i = next;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::AmbientSpace;
    use crate::integrate::{
        integrate_geodesic, integrate_planar_prescribed_kappa, integrate_planar_pseudo_geodesic,
        PseudoGeodesicSpec,
    };
    use approx::assert_relative_eq;

    fn plane() -> ParametricImmersion {
        ParametricImmersion::analytic(
            "plane",
            &["u", "v"],
            &["u", "v", "0"],
            &[[-4.0, 4.0], [-4.0, 4.0]],
            AmbientSpace::euclidean(3),
        )
        .unwrap()
    }

    fn sphere() -> ParametricImmersion {
        ParametricImmersion::analytic(
            "sphere2",
            &["theta", "phi"],
            &["sin(theta)*cos(phi)", "sin(theta)*sin(phi)", "cos(theta)"],
            &[[0.15, std::f64::consts::PI - 0.15], [-7.0, 7.0]],
            AmbientSpace::euclidean(3),
        )
        .unwrap()
    }

    #[test]
    fn plane_transport_is_identity() {
        let imm = plane();
        let p = Vector::from_vec(vec![0.0, 0.0]);
        let x = Vector::from_vec(vec![0.8, 0.6]);
        let traj = integrate_geodesic(&imm, &p, &x, [-2.0, 2.0], 1e-2).unwrap();
        let v = Vector::from_vec(vec![0.3, -0.9]);
        let w = parallel_transport(&imm, &traj, &v, -1.0, 1.5).unwrap();
        assert!((w - &v).norm() < 1e-12);
    }

    #[test]
    fn equator_transport_quarter_turn_keeps_north() {
        let imm = sphere();
        let p = Vector::from_vec(vec![std::f64::consts::FRAC_PI_2, 0.0]);
        let x = Vector::from_vec(vec![0.0, 1.0]);
        let traj = integrate_geodesic(&imm, &p, &x, [-0.1, 2.0], 1e-3).unwrap();
        // Northward unit vector: -d/dtheta.
        let v = Vector::from_vec(vec![-1.0, 0.0]);
        let w = parallel_transport(&imm, &traj, &v, 0.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((&w - &v).norm() < 1e-9, "err {}", (&w - &v).norm());
    }

    #[test]
    fn transport_of_geodesic_tangent_is_the_tangent() {
        let imm = sphere();
        let p = Vector::from_vec(vec![1.2, 0.5]);
        let x = Vector::from_vec(vec![0.7, 0.4]);
        let traj = integrate_geodesic(&imm, &p, &x, [-1.0, 1.0], 1e-3).unwrap();
        let i0 = traj.index_at_time_zero();
        let w = parallel_transport(&imm, &traj, &traj.tangents[i0], 0.0, 0.9).unwrap();
        let expect = traj.eval_tangent(0.9).unwrap();
        assert!((w - expect).norm() < 1e-9);
    }

    #[test]
    fn transport_is_isometric_and_invertible() {
        let imm = sphere();
        let p = Vector::from_vec(vec![1.0, -0.3]);
        let x = Vector::from_vec(vec![0.2, 1.0]);
        let traj = integrate_geodesic(&imm, &p, &x, [-1.0, 1.0], 1e-3).unwrap();
        let fp_a = frame_at(&imm, &traj.eval_point(-0.7).unwrap()).unwrap();
        let fp_b = frame_at(&imm, &traj.eval_point(0.8).unwrap()).unwrap();
        let v = Vector::from_vec(vec![0.4, 1.1]);
        let w = Vector::from_vec(vec![-0.9, 0.2]);
        let tv = parallel_transport(&imm, &traj, &v, -0.7, 0.8).unwrap();
        let tw = parallel_transport(&imm, &traj, &w, -0.7, 0.8).unwrap();
        assert_relative_eq!(fp_a.g_dot(&v, &w), fp_b.g_dot(&tv, &tw), epsilon = 1e-9);
        let back = parallel_transport(&imm, &traj, &tv, 0.8, -0.7).unwrap();
        assert!((back - &v).norm() < 1e-9);
    }

    #[test]
    fn geodesic_development_is_straight() {
        let imm = sphere();
        let p = Vector::from_vec(vec![1.3, 0.2]);
        let x = Vector::from_vec(vec![0.5, 0.9]);
        let traj = integrate_geodesic(&imm, &p, &x, [-1.5, 1.5], 1e-3).unwrap();
        let dev = cartan_development(&imm, &traj, 0.0).unwrap();
        // gamma*(t) = t * T(0) in chart components.
        let i0 = traj.index_at_time_zero();
        let t0 = &traj.tangents[i0];
        for (t, pt) in dev.times.iter().zip(&dev.points) {
            assert!((pt - t0 * *t).norm() < 1e-8, "t={t} err={}", (pt - t0 * *t).norm());
        }
        assert!(dev.max_speed_defect() < 1e-9);
    }

    #[test]
    fn sphere_circle_development_is_euclidean_circle() {
        let imm = sphere();
        // Start a quarter-turn north of the equator and bend south: the
        // intrinsic circle of radius pi/4 is then centered on the equator
        // and stays in the well-conditioned chart band.
        let p = Vector::from_vec(vec![std::f64::consts::FRAC_PI_4, 0.0]);
        let x = Vector::from_vec(vec![0.0, 1.0]);
        let y = Vector::from_vec(vec![1.0, 0.0]);
        let traj = integrate_planar_prescribed_kappa(
            &imm,
            &p,
            &x,
            &y,
            &|_| 1.0,
            [-3.2, 3.2],
            1e-3,
        )
        .unwrap();
        let dev = cartan_development(&imm, &traj, 0.0).unwrap();
        // Developed curve solves (T*)' = kappa Y*, so it is the unit circle
        // through 0: |y - center| = 1 with center at distance 1.
        let i0 = traj.index_at_time_zero();
        let v0 = &dev.on_velocities[i0];
        // center = rotate v0 by +-90 degrees (bending toward Y*).
        let c1 = Vector::from_vec(vec![-v0[1], v0[0]]);
        let c2 = -&c1;
        let fits = |c: &Vector| {
            dev.on_points
                .iter()
                .map(|y| ((y - c).norm() - 1.0).abs())
                .fold(0.0f64, f64::max)
        };
        let defect = fits(&c1).min(fits(&c2));
        assert!(defect < 1e-6, "circle fit defect {defect}");
        // Development of a circle closes after period 2 pi / kappa;
        // Hermite-interpolate the developed curve at the exact offset.
        let period = 2.0 * std::f64::consts::PI;
        let t_first = dev.times[0];
        let t_close = t_first + period;
        let seg = dev
            .times
            .iter()
            .position(|&t| t >= t_close)
            .expect("span longer than one period")
            - 1;
        let (t0, t1) = (dev.times[seg], dev.times[seg + 1]);
        let s = (t_close - t0) / (t1 - t0);
        let (s2, s3) = (s * s, s * s * s);
        let interp = &dev.on_points[seg] * (2.0 * s3 - 3.0 * s2 + 1.0)
            + &dev.on_velocities[seg] * ((s3 - 2.0 * s2 + s) * (t1 - t0))
            + &dev.on_points[seg + 1] * (-2.0 * s3 + 3.0 * s2)
            + &dev.on_velocities[seg + 1] * ((s3 - s2) * (t1 - t0));
        assert!((&interp - &dev.on_points[0]).norm() < 1e-6);
    }

    #[test]
    fn plane_curve_development_is_congruent() {
        let imm = plane();
        let p = Vector::from_vec(vec![0.4, -0.2]);
        let x = Vector::from_vec(vec![1.0, 0.0]);
        let y = Vector::from_vec(vec![0.0, 1.0]);
        let traj = integrate_planar_prescribed_kappa(
            &imm,
            &p,
            &x,
            &y,
            &|t: f64| 0.8 * (0.7 * t).sin(),
            [-2.0, 2.0],
            1e-3,
        )
        .unwrap();
        let dev = cartan_development(&imm, &traj, 0.0).unwrap();
        let i0 = traj.index_at_time_zero();
        for i in 0..traj.len() {
            let expect = &traj.points[i] - &traj.points[i0];
            assert!((&dev.points[i] - &expect).norm() < 1e-9);
        }
    }

    #[test]
    fn plane_fit_defect_behaviour() {
        // Exactly planar 3D cloud.
        let planar: Vec<Vector> = (0..50)
            .map(|k| {
                let t = k as f64 * 0.1;
                Vector::from_vec(vec![t.cos(), t.sin(), 2.0])
            })
            .collect();
        assert!(plane_fit_defect(&planar) < 1e-14);
        // Helix is far from planar.
        let helix: Vec<Vector> = (0..200)
            .map(|k| {
                let t = k as f64 * 0.05;
                Vector::from_vec(vec![t.cos(), t.sin(), 0.5 * t])
            })
            .collect();
        assert!(plane_fit_defect(&helix) > 0.05);
        // 2D clouds are trivially planar.
        let flat: Vec<Vector> = (0..10)
            .map(|k| Vector::from_vec(vec![k as f64, (k * k) as f64]))
            .collect();
        assert_eq!(plane_fit_defect(&flat), 0.0);
    }

    #[test]
    fn prescribed_kappa_curves_are_planar_by_both_routes() {
        let imm = sphere();
        let p = Vector::from_vec(vec![1.2, 0.1]);
        let x = Vector::from_vec(vec![0.0, 1.0]);
        let y = Vector::from_vec(vec![1.0, 0.0]);
        let traj = integrate_planar_prescribed_kappa(
            &imm,
            &p,
            &x,
            &y,
            &|t: f64| 0.5 + 0.3 * t.sin(),
            [-1.5, 1.5],
            1e-3,
        )
        .unwrap();
        let report =
            intrinsic_planarity_residual(&imm, &traj, Thresholds::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Planar, "{report:?}");
        assert!(report.residual_ode <= 1e-6);
    }

    #[test]
    fn geodesic_planarity_residual_is_zero() {
        let imm = sphere();
        let p = Vector::from_vec(vec![1.0, 0.0]);
        let x = Vector::from_vec(vec![0.3, 1.0]);
        let traj = integrate_geodesic(&imm, &p, &x, [-1.0, 1.0], 1e-3).unwrap();
        let report =
            intrinsic_planarity_residual(&imm, &traj, Thresholds::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Planar);
        assert!(report.residual_ode < 1e-12);
    }

    #[test]
    fn flat_chart_helix_is_non_planar() {
        // Identity chart of R^3; the trajectory is a unit-speed helix.
        let imm = ParametricImmersion::analytic(
            "flat3",
            &["u", "v", "w"],
            &["u", "v", "w"],
            &[[-4.0, 4.0], [-4.0, 4.0], [-4.0, 4.0]],
            AmbientSpace::euclidean(3),
        )
        .unwrap();
        // Arc length s relates to the helix angle by ds = sqrt(5)/2 d(angle).
        let rate = 1.0 / (1.0f64 + 0.25).sqrt();
        let h = 1e-3;
        let steps = (6.0 / h) as usize;
        let times: Vec<f64> = (0..=steps).map(|k| -3.0 + k as f64 * h).collect();
        let points: Vec<Vector> = times
            .iter()
            .map(|&t| {
                let s = rate * t;
                Vector::from_vec(vec![s.cos(), s.sin(), 0.5 * s])
            })
            .collect();
        let tangents: Vec<Vector> = times
            .iter()
            .map(|&t| {
                let s = rate * t;
                Vector::from_vec(vec![-s.sin() * rate, s.cos() * rate, 0.5 * rate])
            })
            .collect();
        let traj =
            CurveTrajectory::from_samples(&imm, times, points, tangents, None).unwrap();
        let report =
            intrinsic_planarity_residual(&imm, &traj, Thresholds::default()).unwrap();
        assert_eq!(report.verdict, Verdict::NonPlanar, "{report:?}");
        assert!(report.residual_ode >= 0.05);
        assert!(report.residual_fit >= 0.05);
    }

    // Explicit distance-to-best-fit-plane oracle, independent of the
    // singular-value ratio used by the library.
    fn max_distance_to_best_plane(points: &[Vector]) -> f64 {
        let d = points[0].len();
        let k = points.len();
        let mut centroid = Vector::zeros(d);
        for p in points {
            centroid += p;
        }
        centroid /= k as f64;
        let mut mat = crate::Matrix::zeros(k, d);
        for (i, p) in points.iter().enumerate() {
            for j in 0..d {
                mat[(i, j)] = p[j] - centroid[j];
            }
        }
        let svd = mat.clone().svd(false, true);
        let vt = svd.v_t.unwrap();
        let normal: Vector = vt.row(d - 1).transpose();
        points
            .iter()
            .map(|p| (p - &centroid).dot(&normal).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn extrinsic_shape_plane_distance_oracle() {
        // Sphere geodesic: points on a great circle, max plane distance
        // below 1e-8. Cylinder 45-degree geodesic over one ambient turn:
        // a helix, bounded away from every plane.
        let imm = sphere();
        let p = Vector::from_vec(vec![1.2, 0.4]);
        let x = Vector::from_vec(vec![0.4, 0.9]);
        let traj = integrate_geodesic(&imm, &p, &x, [-2.0, 2.0], 1e-3).unwrap();
        assert!(max_distance_to_best_plane(&traj.ambient) < 1e-8);

        let cyl = ParametricImmersion::analytic(
            "cylinder",
            &["u", "v"],
            &["cos(u)", "sin(u)", "v"],
            &[[-8.0, 8.0], [-8.0, 8.0]],
            AmbientSpace::euclidean(3),
        )
        .unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let x45 = Vector::from_vec(vec![s, s]);
        let span = std::f64::consts::PI;
        let traj = integrate_geodesic(
            &cyl,
            &Vector::from_vec(vec![0.0, 0.0]),
            &x45,
            [-span, span],
            1e-3,
        )
        .unwrap();
        let dist = max_distance_to_best_plane(&traj.ambient);
        assert!(dist >= 0.1, "helix plane distance {dist}");
    }

    #[test]
    fn planarity_report_serializes_with_expected_keys() {
        let imm = sphere();
        let p = Vector::from_vec(vec![1.0, 0.0]);
        let x = Vector::from_vec(vec![0.3, 1.0]);
        let traj = integrate_geodesic(&imm, &p, &x, [-1.0, 1.0], 1e-3).unwrap();
        let report =
            ambient_planarity_residual(&imm, &traj, Thresholds::default()).unwrap();
        let value = serde_json::to_value(&report).unwrap();
        for key in [
            "residual_ode",
            "residual_fit",
            "verdict",
            "thresholds",
            "samples_used",
        ] {
            assert!(value.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(value["verdict"], serde_json::json!("planar"));
        assert!(value["thresholds"]["planar"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn sphere_geodesic_extrinsic_shape_is_planar() {
        let imm = sphere();
        let p = Vector::from_vec(vec![1.1, 0.4]);
        let x = Vector::from_vec(vec![0.6, 0.5]);
        let traj = integrate_geodesic(&imm, &p, &x, [-2.0, 2.0], 1e-3).unwrap();
        let report = ambient_planarity_residual(&imm, &traj, Thresholds::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Planar, "{report:?}");
        assert!(report.residual_fit <= 1e-8);
    }

    #[test]
    fn ellipsoid_generic_geodesic_shape_is_non_planar() {
        let imm = ParametricImmersion::analytic(
            "ellipsoid-1-1-2",
            &["theta", "phi"],
            &[
                "sin(theta)*cos(phi)",
                "sin(theta)*sin(phi)",
                "2*cos(theta)",
            ],
            &[[0.15, std::f64::consts::PI - 0.15], [-7.0, 7.0]],
            AmbientSpace::euclidean(3),
        )
        .unwrap();
        // 30 degrees off the equator through the chart point of (1, 0, 0).
        let p = Vector::from_vec(vec![std::f64::consts::FRAC_PI_2, 0.0]);
        let fp = frame_at(&imm, &p).unwrap();
        let ang = 30.0f64.to_radians();
        let e_th = Vector::from_vec(vec![1.0, 0.0]);
        let e_ph = Vector::from_vec(vec![0.0, 1.0]);
        let x = &e_th * (ang.sin() / fp.g_norm(&e_th)) + &e_ph * (ang.cos() / fp.g_norm(&e_ph));
        let traj = integrate_geodesic(&imm, &p, &x, [-2.0, 2.0], 1e-3).unwrap();
        let report = ambient_planarity_residual(&imm, &traj, Thresholds::default()).unwrap();
        assert!(report.residual_fit >= 1e-3, "{report:?}");
    }

    #[test]
    fn clifford_torus_geodesics_in_s3() {
        let imm = ParametricImmersion::analytic(
            "clifford-in-S3",
            &["u", "v"],
            &[
                "cos(u)/sqrt(2)",
                "sin(u)/sqrt(2)",
                "cos(v)/sqrt(2)",
                "sin(v)/sqrt(2)",
            ],
            &[[-8.0, 8.0], [-8.0, 8.0]],
            AmbientSpace::sphere(4, 1.0),
        )
        .unwrap();
        let p = Vector::from_vec(vec![0.2, -0.4]);
        // Hopf direction: both angles advance equally; a great circle of S^3.
        let x_hopf = Vector::from_vec(vec![1.0, 1.0]);
        let traj = integrate_geodesic(&imm, &p, &x_hopf, [-3.0, 3.0], 1e-3).unwrap();
        let report = ambient_planarity_residual(&imm, &traj, Thresholds::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Planar, "hopf: {report:?}");

        // Generic slope: non-planar in S^3.
        let ang = 30.0f64.to_radians();
        let x_gen = Vector::from_vec(vec![ang.cos(), ang.sin()]);
        let traj = integrate_geodesic(&imm, &p, &x_gen, [-3.0, 3.0], 1e-3).unwrap();
        let report = ambient_planarity_residual(&imm, &traj, Thresholds::default()).unwrap();
        assert_eq!(report.verdict, Verdict::NonPlanar, "generic: {report:?}");
    }

    #[test]
    fn pseudo_geodesic_verdicts_agree_between_routes() {
        let imm = sphere();
        // Seed a quarter-turn north of the equator with the bend chosen
        // southward, so the circle is centered on the equator.
        let p = Vector::from_vec(vec![std::f64::consts::FRAC_PI_4, 0.3]);
        let x = Vector::from_vec(vec![0.0, 1.0]);
        let fp = frame_at(&imm, &p).unwrap();
        let sigma = fp.pseudo_geodesic_scalar(&(&x / fp.g_norm(&x)));
        let y = Vector::from_vec(vec![sigma.signum(), 0.0]);
        let spec =
            PseudoGeodesicSpec::new(&imm, p, x, y, 1.0, [-3.0, 3.0], 1e-3).unwrap();
        let traj = integrate_planar_pseudo_geodesic(&imm, &spec).unwrap();
        let intr = intrinsic_planarity_residual(&imm, &traj, Thresholds::default()).unwrap();
        let amb = ambient_planarity_residual(&imm, &traj, Thresholds::default()).unwrap();
        assert_eq!(intr.verdict, Verdict::Planar);
        assert_eq!(amb.verdict, Verdict::Planar);
    }

    #[test]
    fn scale_invariance_of_verdicts() {
        let imm = ParametricImmersion::analytic(
            "torus-2-1",
            &["u", "v"],
            &[
                "(2 + cos(v))*cos(u)",
                "(2 + cos(v))*sin(u)",
                "sin(v)",
            ],
            &[[-10.0, 10.0], [-10.0, 10.0]],
            AmbientSpace::euclidean(3),
        )
        .unwrap();
        // Unit-speed curves on the scaled surface cover the same chart path
        // over a lambda-scaled span and step.
        let lambda = 3.0;
        let scaled = imm.scaled(lambda).unwrap();
        let p = Vector::from_vec(vec![0.3, 1.1]);
        let x = Vector::from_vec(vec![0.7, 0.9]);
        let thr = Thresholds::default();
        let t1 = integrate_geodesic(&imm, &p, &x, [-2.0, 2.0], 1e-3).unwrap();
        let t2 = integrate_geodesic(
            &scaled,
            &p,
            &x,
            [-2.0 * lambda, 2.0 * lambda],
            1e-3 * lambda,
        )
        .unwrap();
        let r1 = ambient_planarity_residual(&imm, &t1, thr).unwrap();
        let r2 = ambient_planarity_residual(&scaled, &t2, thr).unwrap();
        assert_eq!(r1.verdict, r2.verdict);
        assert_relative_eq!(r1.residual_fit, r2.residual_fit, max_relative = 1e-6);
        assert_relative_eq!(r1.residual_ode, r2.residual_ode, max_relative = 1e-4);
        let i1 = intrinsic_planarity_residual(&imm, &t1, thr).unwrap();
        let i2 = intrinsic_planarity_residual(&scaled, &t2, thr).unwrap();
        assert_eq!(i1.verdict, i2.verdict);
    }
}
