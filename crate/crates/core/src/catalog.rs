//! Named immersions with known ground-truth flags, used as test
//! expectations by the diagnostics suites and addressable from the CLI.

use crate::ambient::AmbientSpace;
use crate::error::Result;
use crate::immersion::ParametricImmersion;
use crate::Vector;
use serde::Serialize;
use std::f64::consts::PI;

/// Known geometric classification of a catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GroundTruth {
    pub totally_umbilic: bool,
    pub extrinsic_sphere: bool,
    pub constant_isotropic: bool,
    /// Codimension one in its ambient `Q`.
    pub hypersurface: bool,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub immersion: ParametricImmersion,
    pub flags: GroundTruth,
    /// Canonical chart point for seeding curves and grids.
    pub center: Vector,
}

fn entry(
    name: &'static str,
    vars: &[&str],
    components: &[&str],
    domain: &[[f64; 2]],
    ambient: AmbientSpace,
    flags: GroundTruth,
    center: Vec<f64>,
) -> Result<CatalogEntry> {
    Ok(CatalogEntry {
        name,
        immersion: ParametricImmersion::analytic(name, vars, components, domain, ambient)?,
        flags,
        center: Vector::from_vec(center),
    })
}

/// Every catalog entry, in stable order.
pub fn catalog() -> Vec<CatalogEntry> {
    build_catalog().expect("catalog definitions always parse")
}

/// Look up an entry by name.
pub fn lookup(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name == name)
}

pub fn names() -> Vec<&'static str> {
    catalog().iter().map(|e| e.name).collect()
}

fn build_catalog() -> Result<Vec<CatalogEntry>> {
    let theta_box = [0.3, PI - 0.3];
    let mut out = Vec::new();

    out.push(entry(
        "plane",
        &["u", "v"],
        &["u", "v", "0"],
        &[[-4.0, 4.0], [-4.0, 4.0]],
        AmbientSpace::euclidean(3),
        GroundTruth {
            totally_umbilic: true,
            extrinsic_sphere: true,
            constant_isotropic: true,
            hypersurface: true,
        },
        vec![0.0, 0.0],
    )?);

    out.push(entry(
        "cylinder",
        &["u", "v"],
        &["cos(u)", "sin(u)", "v"],
        &[[-8.0, 8.0], [-8.0, 8.0]],
        AmbientSpace::euclidean(3),
        GroundTruth {
            totally_umbilic: false,
            extrinsic_sphere: false,
            constant_isotropic: false,
            hypersurface: true,
        },
        vec![0.0, 0.0],
    )?);

    out.push(entry(
        "sphere2",
        &["theta", "phi"],
        &["sin(theta)*cos(phi)", "sin(theta)*sin(phi)", "cos(theta)"],
        &[[0.15, PI - 0.15], [-7.0, 7.0]],
        AmbientSpace::euclidean(3),
        GroundTruth {
            totally_umbilic: true,
            extrinsic_sphere: true,
            constant_isotropic: true,
            hypersurface: true,
        },
        vec![PI / 2.0, 0.0],
    )?);

    out.push(entry(
        "sphere3",
        &["a", "b", "c"],
        &[
            "cos(a)",
            "sin(a)*cos(b)",
            "sin(a)*sin(b)*cos(c)",
            "sin(a)*sin(b)*sin(c)",
        ],
        &[[0.3, PI - 0.3], [0.3, PI - 0.3], [-7.0, 7.0]],
        AmbientSpace::euclidean(4),
        GroundTruth {
            totally_umbilic: true,
            extrinsic_sphere: true,
            constant_isotropic: true,
            hypersurface: true,
        },
        vec![PI / 2.0, PI / 2.0, 0.0],
    )?);

    out.push(entry(
        "ellipsoid-1-1-2",
        &["theta", "phi"],
        &[
            "sin(theta)*cos(phi)",
            "sin(theta)*sin(phi)",
            "2*cos(theta)",
        ],
        &[[0.15, PI - 0.15], [-7.0, 7.0]],
        AmbientSpace::euclidean(3),
        GroundTruth {
            totally_umbilic: false,
            extrinsic_sphere: false,
            constant_isotropic: false,
            hypersurface: true,
        },
        vec![PI / 2.0, 0.0],
    )?);

    out.push(entry(
        "torus-2-1",
        &["u", "v"],
        &[
            "(2 + cos(v))*cos(u)",
            "(2 + cos(v))*sin(u)",
            "sin(v)",
        ],
        &[[-10.0, 10.0], [-10.0, 10.0]],
        AmbientSpace::euclidean(3),
        GroundTruth {
            totally_umbilic: false,
            extrinsic_sphere: false,
            constant_isotropic: false,
            hypersurface: true,
        },
        vec![0.0, PI / 2.0],
    )?);

    out.push(entry(
        "sphere2-in-R4",
        &["theta", "phi"],
        &[
            "sin(theta)*cos(phi)",
            "sin(theta)*sin(phi)",
            "cos(theta)",
            "0",
        ],
        &[[0.15, PI - 0.15], [-7.0, 7.0]],
        AmbientSpace::euclidean(4),
        GroundTruth {
            totally_umbilic: true,
            extrinsic_sphere: true,
            constant_isotropic: true,
            hypersurface: false,
        },
        vec![PI / 2.0, 0.0],
    )?);

    out.push(entry(
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
        GroundTruth {
            totally_umbilic: false,
            extrinsic_sphere: false,
            constant_isotropic: false,
            hypersurface: true,
        },
        vec![0.0, 0.0],
    )?);

    // Veronese surface: the sphere of radius sqrt(3) immersed minimally in
    // the unit S^4. Components of the classical quadratic map evaluated on
    // x = sqrt(3) sin(theta) cos(phi), y = ..., z = sqrt(3) cos(theta).
    let veronese = [
        "sqrt(3)*sin(theta)^2*cos(phi)*sin(phi)",
        "sqrt(3)*sin(theta)*cos(theta)*cos(phi)",
        "sqrt(3)*sin(theta)*cos(theta)*sin(phi)",
        "(sqrt(3)/2)*sin(theta)^2*(cos(phi)^2 - sin(phi)^2)",
        "(1 - 3*cos(theta)^2)/2",
    ];
    out.push(entry(
        "veronese-in-S4",
        &["theta", "phi"],
        &veronese,
        &[theta_box, [-7.0, 7.0]],
        AmbientSpace::sphere(5, 1.0),
        GroundTruth {
            totally_umbilic: false,
            extrinsic_sphere: false,
            constant_isotropic: true,
            hypersurface: false,
        },
        vec![PI / 2.0, 0.4],
    )?);

    // Same chart viewed in flat R^5; here H = -p is nonzero with parallel
    // normalized direction.
    out.push(entry(
        "veronese-in-R5",
        &["theta", "phi"],
        &veronese,
        &[theta_box, [-7.0, 7.0]],
        AmbientSpace::euclidean(5),
        GroundTruth {
            totally_umbilic: false,
            extrinsic_sphere: false,
            constant_isotropic: true,
            hypersurface: false,
        },
        vec![PI / 2.0, 0.4],
    )?);

    Ok(out)
}
