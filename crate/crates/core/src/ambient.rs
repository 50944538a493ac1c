//! Ambient spaces: flat Euclidean space or an implicit level-set
//! hypersurface `{F = 0}` of Euclidean space.
//!
//! The level-set form gives curved ambients (round spheres) without
//! inverting a parametrization: the tangent space of `Q` at `p` is the
//! orthogonal complement of `grad F(p)`, and the ambient connection is the
//! flat derivative followed by that projection.

use crate::error::{GeomError, Result};
use crate::expr::{diff, parse, Program};
use crate::tol;
use crate::{Matrix, Vector};

/// Scalar constraint `F: R^N -> R` with analytic gradient and Hessian,
/// compiled from an expression in variables `x1..xN`.
#[derive(Debug, Clone)]
pub struct LevelSetField {
    source: String,
    f: Program,
    grad: Vec<Program>,
    hess: Vec<Vec<Program>>,
}

impl LevelSetField {
    pub fn from_expr(dim: usize, source: &str) -> Result<Self> {
        let names: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
        let vars: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let root = parse(source, &vars)?;
        let grad_exprs: Vec<_> = (0..dim).map(|i| diff(&root, i)).collect();
        let hess = grad_exprs
            .iter()
            .map(|gi| (0..dim).map(|j| Program::compile(&diff(gi, j))).collect())
            .collect();
        Ok(LevelSetField {
            source: source.to_string(),
            f: Program::compile(&root),
            grad: grad_exprs.iter().map(Program::compile).collect(),
            hess,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn value(&self, p: &Vector) -> f64 {
        self.f.eval(p.as_slice())
    }

    pub fn gradient(&self, p: &Vector) -> Vector {
        Vector::from_iterator(self.grad.len(), self.grad.iter().map(|g| g.eval(p.as_slice())))
    }

    pub fn hessian(&self, p: &Vector) -> Matrix {
        let n = self.grad.len();
        Matrix::from_fn(n, n, |i, j| self.hess[i][j].eval(p.as_slice()))
    }
}

/// The space `Q` an immersion maps into.
#[derive(Debug, Clone)]
pub enum AmbientSpace {
    Euclidean { dim: usize },
    LevelSet { dim: usize, field: LevelSetField },
}

impl AmbientSpace {
    pub fn euclidean(dim: usize) -> Self {
        AmbientSpace::Euclidean { dim }
    }

    pub fn level_set(dim: usize, constraint: &str) -> Result<Self> {
        Ok(AmbientSpace::LevelSet {
            dim,
            field: LevelSetField::from_expr(dim, constraint)?,
        })
    }

    /// Round sphere `|x|^2 = r^2` as a level set in `R^dim`.
    pub fn sphere(dim: usize, radius: f64) -> Self {
        let terms: Vec<String> = (1..=dim).map(|i| format!("x{i}^2")).collect();
        let src = format!("{} - {}", terms.join(" + "), radius * radius);
        AmbientSpace::level_set(dim, &src).expect("sphere constraint always parses")
    }

    /// Dimension of the surrounding Euclidean space `R^N`.
    pub fn embedding_dim(&self) -> usize {
        match self {
            AmbientSpace::Euclidean { dim } | AmbientSpace::LevelSet { dim, .. } => *dim,
        }
    }

    /// Dimension of `Q` itself (`N` or `N - 1`).
    pub fn dim(&self) -> usize {
        match self {
            AmbientSpace::Euclidean { dim } => *dim,
            AmbientSpace::LevelSet { dim, .. } => dim - 1,
        }
    }

    pub fn is_level_set(&self) -> bool {
        matches!(self, AmbientSpace::LevelSet { .. })
    }

    pub fn field(&self) -> Option<&LevelSetField> {
        match self {
            AmbientSpace::Euclidean { .. } => None,
            AmbientSpace::LevelSet { field, .. } => Some(field),
        }
    }

    /// Check that an image point lies on `Q` and the constraint gradient is
    /// usable there.
    pub fn check_containment(&self, p: &Vector) -> Result<()> {
        if let AmbientSpace::LevelSet { field, .. } = self {
            let value = field.value(p).abs();
            if value > tol::CONTAINMENT_TOL {
                return Err(GeomError::ContainmentViolated {
                    value,
                    tol: tol::CONTAINMENT_TOL,
                });
            }
            let gnorm = field.gradient(p).norm();
            if gnorm <= tol::LEVEL_SET_GRAD_FLOOR {
                return Err(GeomError::InvalidInput(format!(
                    "level-set gradient degenerate at image point (norm {gnorm:.3e})"
                )));
            }
        }
        Ok(())
    }

    /// Unit normal of `Q` at `p` (level-set case only).
    pub fn unit_normal(&self, p: &Vector) -> Option<Vector> {
        self.field().map(|f| {
            let g = f.gradient(p);
            let n = g.norm();
            g / n
        })
    }

    /// Orthogonal projector onto `T_p Q` as an `N x N` matrix.
    pub fn tq_projector(&self, p: &Vector) -> Matrix {
        let n = self.embedding_dim();
        let mut proj = Matrix::identity(n, n);
        if let Some(nu) = self.unit_normal(p) {
            proj -= &nu * nu.transpose();
        }
        proj
    }

    /// Project an ambient vector onto `T_p Q`.
    pub fn project_to_tq(&self, p: &Vector, v: &Vector) -> Vector {
        match self.unit_normal(p) {
            None => v.clone(),
            Some(nu) => v - &nu * nu.dot(v),
        }
    }
}
