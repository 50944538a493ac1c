//! Pointwise differential-geometric data of an immersion: induced metric,
//! Christoffel symbols, orthonormal normal frame, second fundamental form,
//! mean curvature, shape operators, and the covariant derivative of the
//! second form.

use crate::error::{GeomError, Result};
use crate::immersion::ParametricImmersion;
use crate::tol;
use crate::{Matrix, Vector};

/// Per-point geometry bundle.
#[derive(Debug, Clone)]
pub struct FramePacket {
    /// Chart point.
    pub u: Vector,
    /// Image point `f(u)`.
    pub position: Vector,
    /// Tangent basis `d_i f` as columns (`N x m`).
    pub tangent: Matrix,
    /// Induced metric `g_ij`.
    pub metric: Matrix,
    pub metric_inv: Matrix,
    /// Christoffel symbols; `christoffel[k][(i, j)]` is `Gamma^k_ij`.
    pub christoffel: Vec<Matrix>,
    /// Orthonormal basis of `N_p M ∩ T_p Q` as columns (`N x n`).
    pub normals: Matrix,
    /// Second-form components per normal: `alpha[s][(i, j)]`.
    pub alpha: Vec<Matrix>,
    /// Mean curvature vector in `R^N`.
    pub mean_curvature: Vector,
    pub h_norm: f64,
}

impl FramePacket {
    pub fn dim(&self) -> usize {
        self.metric.nrows()
    }

    /// Codimension of `M` in `Q`.
    pub fn codim(&self) -> usize {
        self.normals.ncols()
    }

    pub fn g_dot(&self, a: &Vector, b: &Vector) -> f64 {
        (&self.metric * a).dot(b)
    }

    pub fn g_norm(&self, a: &Vector) -> f64 {
        self.g_dot(a, a).max(0.0).sqrt()
    }

    /// Second fundamental form as an ambient vector.
    pub fn alpha_vec(&self, x: &Vector, y: &Vector) -> Vector {
        let n = self.position.len();
        let mut out = Vector::zeros(n);
        for s in 0..self.codim() {
            let comp = (&self.alpha[s] * y).dot(x);
            out += self.normals.column(s) * comp;
        }
        out
    }

    /// Scalar second form `sigma(x, y)` w.r.t. the frame's (single) normal.
    pub fn sigma_scalar(&self, x: &Vector, y: &Vector) -> Result<f64> {
        if self.codim() != 1 {
            return Err(GeomError::InvalidInput(format!(
                "scalar second form needs codimension 1, got {}",
                self.codim()
            )));
        }
        Ok((&self.alpha[0] * y).dot(x))
    }

    /// `sigma(T, T)` used by the pseudo-geodesic systems: signed scalar in
    /// codimension one, norm of `alpha(T, T)` otherwise.
    pub fn pseudo_geodesic_scalar(&self, t: &Vector) -> f64 {
        if self.codim() == 1 {
            (&self.alpha[0] * t).dot(t)
        } else {
            self.alpha_vec(t, t).norm()
        }
    }

    /// Christoffel contraction `Gamma^k_ij x^i y^j`.
    pub fn christoffel_contract(&self, x: &Vector, y: &Vector) -> Vector {
        Vector::from_iterator(
            self.dim(),
            self.christoffel.iter().map(|gk| (gk * y).dot(x)),
        )
    }

    /// Orthogonal projector onto the normal bundle `N_p M ∩ T_p Q`.
    pub fn normal_projector(&self) -> Matrix {
        &self.normals * self.normals.transpose()
    }

    /// Orthogonal projector onto `T_p M` inside `R^N`.
    pub fn tangent_projector(&self) -> Matrix {
        &self.tangent * &self.metric_inv * self.tangent.transpose()
    }

    /// Chart components of the tangential part of an ambient vector.
    pub fn to_chart(&self, w: &Vector) -> Vector {
        &self.metric_inv * (self.tangent.transpose() * w)
    }

    /// Ambient vector of chart components.
    pub fn to_ambient(&self, v: &Vector) -> Vector {
        &self.tangent * v
    }

    /// Shape operator `A_eta` in the chart basis, with the convention that
    /// `A_eta X` is the tangential part of the ambient derivative of `eta`
    /// along `X`; equivalently `<alpha(X, Y), eta> + <A_eta X, Y>_g = 0`.
    pub fn shape_operator(&self, eta: &Vector) -> Result<Matrix> {
        let proj = self.normal_projector() * eta;
        let residual = (eta - &proj).norm();
        if residual > tol::NORMAL_BUNDLE_TOL * (1.0 + eta.norm()) {
            return Err(GeomError::NormalOutsideBundle { residual });
        }
        let m = self.dim();
        let mut form = Matrix::zeros(m, m);
        for s in 0..self.codim() {
            let c = self.normals.column(s).dot(eta);
            form += &self.alpha[s] * c;
        }
        Ok(-(&self.metric_inv * form))
    }
}

/// Compute the frame packet at a chart point.
pub fn frame_at(imm: &ParametricImmersion, u: &Vector) -> Result<FramePacket> {
    frame_at_oriented(imm, u, None)
}

/// Compute the frame packet, aligning the normal frame with `prev` when
/// given. Alignment keeps the frame continuous along a curve: the previous
/// normals are projected onto the new normal space and re-orthonormalized,
/// so pivot switches in the underlying Gram-Schmidt cannot flip signs
/// mid-integration.
pub fn frame_at_oriented(
    imm: &ParametricImmersion,
    u: &Vector,
    prev: Option<&Matrix>,
) -> Result<FramePacket> {
    imm.check_domain(u)?;
    let m = imm.dim();
    let n_amb = imm.embedding_dim();
    let position = imm.position(u);
    imm.ambient().check_containment(&position)?;

    let tangent = imm.jacobian(u);
    let svd = tangent.clone().svd(false, false);
    let sigma_min = svd.singular_values.iter().cloned().fold(f64::MAX, f64::min);
    if sigma_min <= tol::RANK_TOL {
        return Err(GeomError::RankDeficient {
            point: u.iter().copied().collect(),
            sigma_min,
        });
    }

    let metric = tangent.transpose() * &tangent;
    let metric_inv = metric
        .clone()
        .try_inverse()
        .ok_or_else(|| GeomError::RankDeficient {
            point: u.iter().copied().collect(),
            sigma_min,
        })?;

    let d2 = imm.second_derivatives(u);
    for i in 0..m {
        for j in (i + 1)..m {
            let diff = (&d2[i][j] - &d2[j][i]).norm();
            let scale = d2[i][j].norm().max(1.0);
            if diff > 1e-10 * scale {
                return Err(GeomError::InvalidInput(format!(
                    "second derivatives not symmetric at {u:?}: |d2[{i}][{j}] - d2[{j}][{i}]| = {diff:.3e}"
                )));
            }
        }
    }

    // Gamma^k_ij = g^{kl} <d_i d_j f, E_l>
    let mut christoffel = vec![Matrix::zeros(m, m); m];
    for i in 0..m {
        for j in 0..m {
            let rhs = tangent.transpose() * &d2[i][j];
            let gam = &metric_inv * rhs;
            for k in 0..m {
                christoffel[k][(i, j)] = gam[k];
            }
        }
    }

    // Normal frame: Gram-Schmidt of the canonical basis against the tangent
    // basis (and grad F for level sets), pivoting on the largest residual.
    let mut span: Vec<Vector> = Vec::with_capacity(n_amb);
    for i in 0..m {
        let mut v: Vector = tangent.column(i).into();
        for q in &span {
            let d = q.dot(&v);
            v -= q * d;
        }
        let norm = v.norm();
        span.push(v / norm);
    }
    if let Some(nu) = imm.ambient().unit_normal(&position) {
        let mut v = nu;
        for q in &span {
            let d = q.dot(&v);
            v -= q * d;
        }
        let norm = v.norm();
        if norm <= tol::LEVEL_SET_GRAD_FLOOR {
            return Err(GeomError::InvalidInput(
                "tangent basis not contained in the level-set tangent space".into(),
            ));
        }
        span.push(v / norm);
    }
    let codim = n_amb - span.len();
    let mut normal_cols: Vec<Vector> = Vec::with_capacity(codim);
    let mut used = vec![false; n_amb];
    for _ in 0..codim {
        let mut best: Option<(usize, Vector, f64)> = None;
        for j in 0..n_amb {
            if used[j] {
                continue;
            }
            let mut v = Vector::zeros(n_amb);
            v[j] = 1.0;
            for q in span.iter().chain(normal_cols.iter()) {
                let d = q.dot(&v);
                v -= q * d;
            }
            let norm = v.norm();
            if best.as_ref().map_or(true, |(_, _, b)| norm > *b) {
                best = Some((j, v, norm));
            }
        }
        let (j, v, norm) = best.expect("candidate always exists");
        if norm <= 1e-12 {
            return Err(GeomError::InvalidInput(
                "failed to complete the normal frame".into(),
            ));
        }
        used[j] = true;
        let mut v = v / norm;
        // Canonical sign: largest-magnitude entry positive.
        let (mut idx, mut mag) = (0usize, 0.0f64);
        for (i, x) in v.iter().enumerate() {
            if x.abs() > mag {
                mag = x.abs();
                idx = i;
            }
        }
        if v[idx] < 0.0 {
            v = -v;
        }
        normal_cols.push(v);
    }

    let mut normals = Matrix::zeros(n_amb, codim);
    for (s, col) in normal_cols.iter().enumerate() {
        normals.set_column(s, col);
    }

    if let Some(prev) = prev {
        if prev.ncols() == codim && prev.nrows() == n_amb {
            if let Some(aligned) = align_normals(&normals, prev) {
                normals = aligned;
            }
        }
    }

    // Second form components; for level sets project the second derivatives
    // onto T_p Q before pairing with the normals.
    let tq = imm.ambient().tq_projector(&position);
    let needs_projection = imm.ambient().is_level_set();
    let mut alpha = vec![Matrix::zeros(m, m); codim];
    for i in 0..m {
        for j in 0..m {
            let w = if needs_projection {
                &tq * &d2[i][j]
            } else {
                d2[i][j].clone()
            };
            for s in 0..codim {
                alpha[s][(i, j)] = normals.column(s).dot(&w);
            }
        }
    }

    // H = m^{-1} (g^{ij} alpha^s_ij) n_s
    let mut mean_curvature = Vector::zeros(n_amb);
    for s in 0..codim {
        let trace = (&metric_inv * &alpha[s]).trace();
        mean_curvature += normals.column(s) * (trace / m as f64);
    }
    let h_norm = mean_curvature.norm();

    Ok(FramePacket {
        u: u.clone(),
        position,
        tangent,
        metric,
        metric_inv,
        christoffel,
        normals,
        alpha,
        mean_curvature,
        h_norm,
    })
}

/// Express `prev`'s columns in the new normal space and re-orthonormalize.
/// Returns `None` when the projection degenerates (frame switch too large).
fn align_normals(new: &Matrix, prev: &Matrix) -> Option<Matrix> {
    let proj = new * new.transpose();
    let mut cols: Vec<Vector> = Vec::with_capacity(prev.ncols());
    for s in 0..prev.ncols() {
        let mut v = &proj * prev.column(s);
        for q in &cols {
            let d = q.dot(&v);
            v -= q * d;
        }
        let norm = v.norm();
        if norm < 0.5 {
            return None;
        }
        cols.push(v / norm);
    }
    let mut out = Matrix::zeros(prev.nrows(), prev.ncols());
    for (s, col) in cols.iter().enumerate() {
        out.set_column(s, col);
    }
    Some(out)
}

/// Covariant derivative of the second fundamental form,
/// `(nabla*_x alpha)(y, z)`, returned as an ambient vector in the normal
/// bundle. Uses analytic third derivatives when the immersion provides
/// them, central differences of frame data along the chart line through
/// `u` with velocity `x` otherwise.
pub fn nabla_star_alpha(
    imm: &ParametricImmersion,
    u: &Vector,
    x: &Vector,
    y: &Vector,
    z: &Vector,
) -> Result<Vector> {
    let fp = frame_at(imm, u)?;
    let dcov_y = fp.christoffel_contract(x, y);
    let dcov_z = fp.christoffel_contract(x, z);
    let correction = fp.alpha_vec(&dcov_y, z) + fp.alpha_vec(y, &dcov_z);

    let w_dot = if imm.has_d3() {
        nabla_star_alpha_analytic_rate(imm, &fp, u, x, y, z)?
    } else {
        let h = tol::FD_STEP;
        let up = u + x * h;
        let um = u - x * h;
        let fp_p = frame_at_oriented(imm, &up, Some(&fp.normals))?;
        let fp_m = frame_at_oriented(imm, &um, Some(&fp.normals))?;
        (fp_p.alpha_vec(y, z) - fp_m.alpha_vec(y, z)) / (2.0 * h)
    };

    let result = fp.normal_projector() * w_dot - correction;
    // The result lives in the normal bundle by construction of the
    // projection; the correction terms are normal vectors already.
    Ok(result)
}

/// Exact rate `d/dt [P_perp(u + t x) d2f(u + t x)(y, z)]` at `t = 0`.
fn nabla_star_alpha_analytic_rate(
    imm: &ParametricImmersion,
    fp: &FramePacket,
    u: &Vector,
    x: &Vector,
    y: &Vector,
    z: &Vector,
) -> Result<Vector> {
    let m = imm.dim();
    let n_amb = imm.embedding_dim();
    let d2 = imm.second_derivatives(u);

    // v(t) = d2f(y, z) along the line; v_dot = d3f(x, y, z).
    let mut v = Vector::zeros(n_amb);
    for i in 0..m {
        for j in 0..m {
            v += &d2[i][j] * (y[i] * z[j]);
        }
    }
    let v_dot = imm.third_derivative_contract(u, x, y, z)?;

    // B spans the orthogonal complement of the normal bundle: the tangent
    // basis plus, for level sets, grad F at the image point.
    let level = imm.ambient().field();
    let ncols = m + usize::from(level.is_some());
    let mut b = Matrix::zeros(n_amb, ncols);
    let mut b_dot = Matrix::zeros(n_amb, ncols);
    for i in 0..m {
        b.set_column(i, &fp.tangent.column(i).into_owned());
        let mut e_dot = Vector::zeros(n_amb);
        for j in 0..m {
            e_dot += &d2[i][j] * x[j];
        }
        b_dot.set_column(i, &e_dot);
    }
    if let Some(field) = level {
        let grad = field.gradient(&fp.position);
        let hess = field.hessian(&fp.position);
        let p_dot = &fp.tangent * x;
        b.set_column(m, &grad);
        b_dot.set_column(m, &(&hess * p_dot));
    }

    let gram = b.transpose() * &b;
    let gram_inv = gram
        .try_inverse()
        .ok_or_else(|| GeomError::InvalidInput("span basis degenerate".into()))?;
    let pi = &b * &gram_inv * b.transpose();
    let eye = Matrix::identity(n_amb, n_amb);
    let residual_proj = &eye - &pi;
    // d/dt of the span projector: (I - Pi) B' M B^T + its transpose image.
    let half = &residual_proj * &b_dot * &gram_inv * b.transpose();
    let pi_dot = &half + half.transpose();

    // w = (I - Pi) v, so w_dot = -Pi_dot v + (I - Pi) v_dot.
    Ok(-(&pi_dot * &v) + residual_proj * v_dot)
}

/// Normal-connection derivative of a normal field sampled along a curve:
/// `nabla^perp_T xi` at each sample, by centered differences in the
/// interior and one-sided differences at the endpoints.
pub fn normal_derivative_along(
    frames: &[FramePacket],
    times: &[f64],
    xi: &[Vector],
) -> Result<Vec<Vector>> {
    let n = frames.len();
    if n < 3 {
        return Err(GeomError::InsufficientSamples { got: n, need: 3 });
    }
    if times.len() != n || xi.len() != n {
        return Err(GeomError::InvalidInput(
            "times, frames, and field samples must have equal length".into(),
        ));
    }
    for (fp, v) in frames.iter().zip(xi.iter()) {
        let tangential = (fp.tangent_projector() * v).norm();
        if tangential > 1e-6 * (1.0 + v.norm()) {
            return Err(GeomError::InvalidInput(format!(
                "field sample not normal to M (tangential part {tangential:.3e})"
            )));
        }
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let rate = if i == 0 {
            (&xi[1] - &xi[0]) / (times[1] - times[0])
        } else if i == n - 1 {
            (&xi[n - 1] - &xi[n - 2]) / (times[n - 1] - times[n - 2])
        } else {
            (&xi[i + 1] - &xi[i - 1]) / (times[i + 1] - times[i - 1])
        };
        out.push(frames[i].normal_projector() * rate);
    }
    Ok(out)
}
