//! Chart-domain immersions `f: R^m -> R^N` with partial derivatives up to
//! order three, either symbolic (from the expression language) or by
//! central finite differences of the position map.

use crate::ambient::AmbientSpace;
use crate::error::{GeomError, Result};
use crate::expr::{diff, parse, Expr, Program};
use crate::tol;
use crate::{Matrix, Vector};
use std::rc::Rc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference { step: f64 },
}

/// A parametric immersion of an `m`-dimensional chart box into an ambient
/// space. All evaluation is pure; the value is `Send + Sync` and can be
/// shared freely across threads.
#[derive(Debug, Clone)]
pub struct ParametricImmersion {
    name: String,
    vars: Vec<String>,
    sources: Vec<String>,
    domain: Vec<[f64; 2]>,
    ambient: AmbientSpace,
    mode: DerivativeMode,
    pos: Vec<Program>,
    d1: Option<Vec<Vec<Program>>>,
    d2: Option<Vec<Vec<Vec<Program>>>>,
    d3: Option<Vec<Vec<Vec<Vec<Program>>>>>,
}

impl ParametricImmersion {
    /// Build an immersion with symbolic derivatives to order three.
    pub fn analytic(
        name: &str,
        vars: &[&str],
        components: &[&str],
        domain: &[[f64; 2]],
        ambient: AmbientSpace,
    ) -> Result<Self> {
        let m = vars.len();
        if domain.len() != m {
            return Err(GeomError::ConfigInvalid(format!(
                "domain box has {} intervals for {} chart variables",
                domain.len(),
                m
            )));
        }
        if components.len() != ambient.embedding_dim() {
            return Err(GeomError::ConfigInvalid(format!(
                "{} components for ambient of embedding dimension {}",
                components.len(),
                ambient.embedding_dim()
            )));
        }
        let roots: Vec<Rc<Expr>> = components
            .iter()
            .map(|c| parse(c, vars))
            .collect::<Result<_>>()?;
        let mut d1 = Vec::with_capacity(roots.len());
        let mut d2 = Vec::with_capacity(roots.len());
        let mut d3 = Vec::with_capacity(roots.len());
        for root in &roots {
            let g1: Vec<Rc<Expr>> = (0..m).map(|i| diff(root, i)).collect();
            let g2: Vec<Vec<Rc<Expr>>> = g1
                .iter()
                .map(|e| (0..m).map(|j| diff(e, j)).collect())
                .collect();
            let g3: Vec<Vec<Vec<Program>>> = g2
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|e| (0..m).map(|k| Program::compile(&diff(e, k))).collect())
                        .collect()
                })
                .collect();
            d1.push(g1.iter().map(Program::compile).collect());
            d2.push(
                g2.iter()
                    .map(|row| row.iter().map(Program::compile).collect())
                    .collect(),
            );
            d3.push(g3);
        }
        Ok(ParametricImmersion {
            name: name.to_string(),
            vars: vars.iter().map(|s| s.to_string()).collect(),
            sources: components.iter().map(|s| s.to_string()).collect(),
            domain: domain.to_vec(),
            ambient,
            mode: DerivativeMode::Analytic,
            pos: roots.iter().map(Program::compile).collect(),
            d1: Some(d1),
            d2: Some(d2),
            d3: Some(d3),
        })
    }

    /// Build an immersion from a position-only expression; derivatives come
    /// from central differences with the given step.
    pub fn finite_difference(
        name: &str,
        vars: &[&str],
        components: &[&str],
        domain: &[[f64; 2]],
        ambient: AmbientSpace,
        step: Option<f64>,
    ) -> Result<Self> {
        let mut imm = Self::analytic(name, vars, components, domain, ambient)?;
        imm.mode = DerivativeMode::FiniteDifference {
            step: step.unwrap_or(tol::FD_STEP),
        };
        imm.d1 = None;
        imm.d2 = None;
        imm.d3 = None;
        Ok(imm)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn ambient(&self) -> &AmbientSpace {
        &self.ambient
    }

    pub fn embedding_dim(&self) -> usize {
        self.ambient.embedding_dim()
    }

    /// Codimension of `M` inside `Q`.
    pub fn codim(&self) -> usize {
        self.ambient.dim() - self.dim()
    }

    pub fn domain(&self) -> &[[f64; 2]] {
        &self.domain
    }

    pub fn mode(&self) -> DerivativeMode {
        self.mode
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    pub fn has_d3(&self) -> bool {
        self.d3.is_some()
    }

    /// Copy with third derivatives dropped, forcing the finite-difference
    /// route of consumers that would otherwise use `d3f`.
    pub fn without_d3(&self) -> Self {
        let mut imm = self.clone();
        imm.d3 = None;
        imm
    }

    /// Rebuild this immersion with a different ambient space (the chart map
    /// is unchanged). Used e.g. to view a submanifold of a sphere as a
    /// submanifold of the surrounding Euclidean space.
    pub fn with_ambient(&self, ambient: AmbientSpace) -> Result<Self> {
        let vars: Vec<&str> = self.vars.iter().map(|s| s.as_str()).collect();
        let sources: Vec<&str> = self.sources.iter().map(|s| s.as_str()).collect();
        match self.mode {
            DerivativeMode::Analytic => {
                Self::analytic(&self.name, &vars, &sources, &self.domain, ambient)
            }
            DerivativeMode::FiniteDifference { step } => Self::finite_difference(
                &self.name,
                &vars,
                &sources,
                &self.domain,
                ambient,
                Some(step),
            ),
        }
    }

    /// Uniformly scaled copy `u -> lambda * f(u)` (Euclidean ambients only).
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if self.ambient.is_level_set() {
            return Err(GeomError::ConfigInvalid(
                "scaling is only meaningful for Euclidean ambients".into(),
            ));
        }
        let vars: Vec<&str> = self.vars.iter().map(|s| s.as_str()).collect();
        let sources: Vec<String> = self
            .sources
            .iter()
            .map(|s| format!("{lambda} * ({s})"))
            .collect();
        let refs: Vec<&str> = sources.iter().map(|s| s.as_str()).collect();
        let name = format!("{}-x{lambda}", self.name);
        match self.mode {
            DerivativeMode::Analytic => {
                Self::analytic(&name, &vars, &refs, &self.domain, self.ambient.clone())
            }
            DerivativeMode::FiniteDifference { step } => Self::finite_difference(
                &name,
                &vars,
                &refs,
                &self.domain,
                self.ambient.clone(),
                Some(step),
            ),
        }
    }

    pub fn in_domain(&self, u: &Vector) -> bool {
        u.len() == self.dim()
            && u.iter()
                .zip(self.domain.iter())
                .all(|(x, [lo, hi])| *x >= *lo && *x <= *hi)
    }

    pub fn check_domain(&self, u: &Vector) -> Result<()> {
        if self.in_domain(u) {
            Ok(())
        } else {
            Err(GeomError::DomainExceeded {
                point: u.iter().copied().collect(),
            })
        }
    }

    /// Position map. Does not require `u` to lie in the domain box so that
    /// finite-difference stencils near the boundary stay well-defined;
    /// domain enforcement happens in `frame_at` and the integrators.
    pub fn position(&self, u: &Vector) -> Vector {
        Vector::from_iterator(
            self.pos.len(),
            self.pos.iter().map(|p| p.eval(u.as_slice())),
        )
    }

    /// First partials as the `N x m` matrix with columns `d_i f`.
    pub fn jacobian(&self, u: &Vector) -> Matrix {
        let n = self.pos.len();
        let m = self.dim();
        match (&self.d1, self.mode) {
            (Some(d1), _) => Matrix::from_fn(n, m, |r, i| d1[r][i].eval(u.as_slice())),
            (None, DerivativeMode::FiniteDifference { step }) => {
                let mut out = Matrix::zeros(n, m);
                for i in 0..m {
                    let mut hi = u.clone();
                    let mut lo = u.clone();
                    hi[i] += step;
                    lo[i] -= step;
                    let col = (self.position(&hi) - self.position(&lo)) / (2.0 * step);
                    out.set_column(i, &col);
                }
                out
            }
            (None, DerivativeMode::Analytic) => unreachable!("analytic mode always stores d1"),
        }
    }

    /// Second partials `d_i d_j f` as an `m x m` grid of ambient vectors.
    pub fn second_derivatives(&self, u: &Vector) -> Vec<Vec<Vector>> {
        let n = self.pos.len();
        let m = self.dim();
        match (&self.d2, self.mode) {
            (Some(d2), _) => (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| {
                            Vector::from_iterator(n, (0..n).map(|r| d2[r][i][j].eval(u.as_slice())))
                        })
                        .collect()
                })
                .collect(),
            (None, DerivativeMode::FiniteDifference { step }) => {
                let f0 = self.position(u);
                let mut out = vec![vec![Vector::zeros(n); m]; m];
                for i in 0..m {
                    for j in i..m {
                        let v = if i == j {
                            let mut hi = u.clone();
                            let mut lo = u.clone();
                            hi[i] += step;
                            lo[i] -= step;
                            (self.position(&hi) - &f0 * 2.0 + self.position(&lo))
                                / (step * step)
                        } else {
                            let mut pp = u.clone();
                            let mut pm = u.clone();
                            let mut mp = u.clone();
                            let mut mm = u.clone();
                            pp[i] += step;
                            pp[j] += step;
                            pm[i] += step;
                            pm[j] -= step;
                            mp[i] -= step;
                            mp[j] += step;
                            mm[i] -= step;
                            mm[j] -= step;
                            (self.position(&pp) - self.position(&pm) - self.position(&mp)
                                + self.position(&mm))
                                / (4.0 * step * step)
                        };
                        out[i][j] = v.clone();
                        out[j][i] = v;
                    }
                }
                out
            }
            (None, DerivativeMode::Analytic) => unreachable!("analytic mode always stores d2"),
        }
    }

    /// Contraction `d3f(x, y, z)` of the third derivative tensor.
    pub fn third_derivative_contract(
        &self,
        u: &Vector,
        x: &Vector,
        y: &Vector,
        z: &Vector,
    ) -> Result<Vector> {
        let Some(d3) = &self.d3 else {
            return Err(GeomError::DerivativeUnavailable(
                "third derivatives require analytic mode".into(),
            ));
        };
        let n = self.pos.len();
        let m = self.dim();
        let mut out = Vector::zeros(n);
        for r in 0..n {
            let mut acc = 0.0;
            for i in 0..m {
                if x[i] == 0.0 {
                    continue;
                }
                for j in 0..m {
                    if y[j] == 0.0 {
                        continue;
                    }
                    for k in 0..m {
                        if z[k] == 0.0 {
                            continue;
                        }
                        acc += d3[r][i][j][k].eval(u.as_slice()) * x[i] * y[j] * z[k];
                    }
                }
            }
            out[r] = acc;
        }
        Ok(out)
    }
}
