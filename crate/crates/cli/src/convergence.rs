//! Convergence studies: integrate one seed at a ladder of step sizes,
//! measure endpoint error against a fine reference, and fit the order.

use crate::jsonfmt;
use serde::Serialize;
use std::path::Path;
use umbilic_core::catalog::CatalogEntry;
use umbilic_core::error::{GeomError, Result};
use umbilic_core::frame::frame_at;
use umbilic_core::integrate::{
    integrate_geodesic, integrate_planar_pseudo_geodesic, CurveTrajectory, PseudoGeodesicSpec,
};
use umbilic_core::{sampling, Vector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveChoice {
    Geodesic,
    PseudoGeodesic { c: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub step: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub entry: String,
    pub rows: Vec<ConvergenceRow>,
    /// Fitted log-log slope; `None` when the residuals sit at the
    /// rounding floor.
    pub slope: Option<f64>,
    pub at_floor: bool,
    pub pass: bool,
}

/// Residuals are endpoint errors against a fine-step reference solution.
const FLOOR: f64 = 1e-13;
const SLOPE_BAND: [f64; 2] = [3.5, 4.5];

fn integrate(
    entry: &CatalogEntry,
    choice: CurveChoice,
    span: [f64; 2],
    h: f64,
    seed: u64,
) -> Result<CurveTrajectory> {
    let p = entry.center.clone();
    let fp = frame_at(&entry.immersion, &p)?;
    // A direction mixing every chart axis avoids symmetry curves (equators,
    // rulings) whose flow RK4 reproduces exactly.
    let m = entry.immersion.dim();
    let mut rng = sampling::SplitMix64::new(seed);
    let mut x = Vector::from_iterator(
        m,
        (0..m).map(|k| 1.0 / ((k + 1) as f64).sqrt() + 0.2 * rng.next_f64()),
    );
    let nx = fp.g_norm(&x);
    x /= nx;
    match choice {
        CurveChoice::Geodesic => integrate_geodesic(&entry.immersion, &p, &x, span, h),
        CurveChoice::PseudoGeodesic { c } => {
            // Any chart basis vector with a healthy g-angle to x seeds the
            // in-curve normal; the spec constructor orthonormalizes it.
            let m = x.len();
            let mut y = Vector::zeros(m);
            let mut best = -1.0;
            for k in 0..m {
                let mut e = Vector::zeros(m);
                e[k] = 1.0;
                let residual = &e - &x * (fp.g_dot(&x, &e) / fp.g_dot(&x, &x));
                let r = fp.g_norm(&residual);
                if r > best {
                    best = r;
                    y = e;
                }
            }
            let spec =
                PseudoGeodesicSpec::new(&entry.immersion, p, x, y, c, span, h)?;
            integrate_planar_pseudo_geodesic(&entry.immersion, &spec)
        }
    }
}

fn endpoint_error(a: &CurveTrajectory, b: &CurveTrajectory) -> f64 {
    let [alo, ahi] = a.span();
    let [blo, bhi] = b.span();
    let lo = alo.max(blo);
    let hi = ahi.min(bhi);
    let mut err: f64 = 0.0;
    for t in [lo, hi] {
        if let (Ok(ua), Ok(ub)) = (a.eval_point(t), b.eval_point(t)) {
            err = err.max((ua - ub).norm());
        }
        if let (Ok(ta), Ok(tb)) = (a.eval_tangent(t), b.eval_tangent(t)) {
            err = err.max((ta - tb).norm());
        }
    }
    err
}

pub fn convergence_study(
    entry: &CatalogEntry,
    choice: CurveChoice,
    steps: &[f64],
    span: [f64; 2],
    seed: u64,
) -> Result<ConvergenceStudy> {
    if steps.len() < 3 {
        return Err(GeomError::ConfigInvalid(
            "convergence study needs at least 3 step sizes".into(),
        ));
    }
    let mut sorted = steps.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if sorted.iter().any(|h| !(*h > 0.0)) {
        return Err(GeomError::ConfigInvalid("steps must be positive".into()));
    }
    // Geometric-ladder sanity: each step at most ~0.8 of the previous.
    for w in sorted.windows(2) {
        if w[1] >= 0.85 * w[0] {
            return Err(GeomError::ConfigInvalid(format!(
                "steps must form a decreasing geometric ladder, got {sorted:?}"
            )));
        }
    }

    let h_ref = sorted.last().unwrap() / 4.0;
    let reference = integrate(entry, choice, span, h_ref, seed)?;
    let mut rows = Vec::with_capacity(sorted.len());
    for &h in &sorted {
        let traj = integrate(entry, choice, span, h, seed)?;
        rows.push(ConvergenceRow {
            step: h,
            residual: endpoint_error(&traj, &reference),
        });
    }

    let at_floor = rows.iter().all(|r| r.residual < FLOOR);
    let slope = (!at_floor).then(|| {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| (r.step.ln(), r.residual.max(1e-300).ln()))
            .collect();
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|(x, _)| x).sum();
        let sy: f64 = pts.iter().map(|(_, y)| y).sum();
        let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
        let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    });
    let pass = at_floor
        || slope
            .map(|s| (SLOPE_BAND[0]..=SLOPE_BAND[1]).contains(&s))
            .unwrap_or(false);
    Ok(ConvergenceStudy {
        entry: entry.name.to_string(),
        rows,
        slope,
        at_floor,
        pass,
    })
}

pub fn write_csv(study: &ConvergenceStudy, path: &Path) -> std::io::Result<()> {
    use std::io::Write;
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "h,residual")?;
    for row in &study.rows {
        writeln!(
            f,
            "{},{}",
            jsonfmt::format_f64(row.step),
            jsonfmt::format_f64(row.residual)
        )?;
    }
    f.flush()
}
