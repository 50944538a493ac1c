//! Scenario execution: dispatch suites over a worker pool, aggregate
//! deterministically, and emit report, manifest, and trajectory files.

use crate::config::ScenarioConfig;
use crate::jsonfmt;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use umbilic_core::catalog::{CatalogEntry, GroundTruth};
use umbilic_core::diagnostics::{
    self, geodesic_seed_curves, isotropy_defect, pseudo_geodesic_seed_curves, theorem_suite,
    umbilicity_defect, SamplingSpec, SeedCurve, TheoremVerdict,
};
use umbilic_core::integrate::{curvature_profile, CurveTrajectory};
use umbilic_core::sampling;

#[derive(Debug, Clone, Serialize)]
pub struct EntryDefects {
    pub entry: String,
    pub flags: GroundTruth,
    pub umbilicity: diagnostics::DefectReport,
    pub isotropy_defect: diagnostics::DefectReport,
    pub isotropy_lambda: diagnostics::DefectReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scenario: String,
    pub config: ScenarioConfig,
    pub verdicts: Vec<TheoremVerdict>,
    pub defects: Vec<EntryDefects>,
    pub trajectories: Vec<String>,
    pub errors: Vec<String>,
    pub all_consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub config_hash: String,
    pub tool_version: String,
    pub wall_clock_unix_seconds: f64,
    pub threads: usize,
    pub scenario: String,
}

fn entry_defects(
    entry: &CatalogEntry,
    config: &ScenarioConfig,
) -> Result<EntryDefects, umbilic_core::GeomError> {
    let grid = sampling::lattice_points(
        entry.immersion.domain(),
        config.grid_points,
        0.3,
        config.seed,
    );
    let spec = SamplingSpec {
        seed: config.seed,
        grid: grid.iter().map(|u| u.iter().copied().collect()).collect(),
        directions_per_point: config.defect_directions,
    };
    let mut umb = Vec::with_capacity(grid.len());
    let mut iso_defects = Vec::with_capacity(grid.len());
    let mut iso_lambdas = Vec::with_capacity(grid.len());
    for u in &grid {
        umb.push(umbilicity_defect(
            &entry.immersion,
            u,
            config.defect_directions,
            config.seed,
        )?);
        let iso = isotropy_defect(&entry.immersion, u, config.defect_directions, config.seed)?;
        iso_defects.push(iso.defect);
        iso_lambdas.push(iso.lambda);
    }
    Ok(EntryDefects {
        entry: entry.name.to_string(),
        flags: entry.flags,
        umbilicity: diagnostics::DefectReport::new("umbilicity", umb, spec.clone()),
        isotropy_defect: diagnostics::DefectReport::new("isotropy", iso_defects, spec.clone()),
        isotropy_lambda: diagnostics::DefectReport::new("isotropy-lambda", iso_lambdas, spec),
    })
}

fn write_trajectory_csv(
    path: &Path,
    entry: &CatalogEntry,
    traj: &CurveTrajectory,
    max_rows: usize,
) -> std::io::Result<()> {
    use std::io::Write;
    let prof = curvature_profile(&entry.immersion, traj)
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    let m = entry.immersion.dim();
    let n_amb = entry.immersion.embedding_dim();
    let mut header = vec!["t".to_string()];
    header.extend((1..=m).map(|i| format!("u{i}")));
    header.extend((1..=m).map(|i| format!("T{i}")));
    if traj.y_frames.is_some() {
        header.extend((1..=m).map(|i| format!("Y{i}")));
    }
    header.extend((1..=n_amb).map(|i| format!("x{i}")));
    header.extend(["kappa".into(), "tau".into(), "kappa_tilde".into(), "theta".into()]);

    let stride = (traj.len() + max_rows - 1) / max_rows.max(1);
    let stride = stride.max(1);
    let mut file = std::io::BufWriter::new(fs::File::create(path)?);
    writeln!(file, "{}", header.join(","))?;
    let fmt = jsonfmt::format_f64;
    for i in (0..traj.len()).step_by(stride) {
        let mut row = vec![fmt(traj.times[i])];
        row.extend(traj.points[i].iter().map(|v| fmt(*v)));
        row.extend(traj.tangents[i].iter().map(|v| fmt(*v)));
        if let Some(ys) = &traj.y_frames {
            row.extend(ys[i].iter().map(|v| fmt(*v)));
        }
        row.extend(traj.ambient[i].iter().map(|v| fmt(*v)));
        row.push(fmt(prof.kappa[i]));
        row.push(fmt(prof.tau[i]));
        row.push(fmt(prof.kappa_tilde[i]));
        let theta = prof
            .theta
            .as_ref()
            .and_then(|th| th[i])
            .map(fmt)
            .unwrap_or_default();
        row.push(theta);
        writeln!(file, "{}", row.join(","))?;
    }
    file.flush()
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

struct EntryOutput {
    verdicts: Vec<TheoremVerdict>,
    defects: Option<EntryDefects>,
    curves: Vec<(String, SeedCurve)>,
    errors: Vec<String>,
}

fn run_entry(entry: &CatalogEntry, config: &ScenarioConfig) -> EntryOutput {
    let suite_config = config.suite_config();
    let mut errors = Vec::new();
    let verdicts = match theorem_suite(
        std::slice::from_ref(entry),
        &config.suites,
        &suite_config,
    ) {
        Ok(v) => v,
        Err(e) => {
            errors.push(format!("{}: {e}", entry.name));
            Vec::new()
        }
    };
    let defects = match entry_defects(entry, config) {
        Ok(d) => Some(d),
        Err(e) => {
            errors.push(format!("{}: defect grid: {e}", entry.name));
            None
        }
    };
    let mut curves = Vec::new();
    if config.export_trajectories {
        match geodesic_seed_curves(entry, &suite_config) {
            Ok(mut geos) => {
                if !config.export_all_seeds {
                    geos.truncate(1);
                }
                for sc in geos {
                    curves.push((entry.name.to_string(), sc));
                }
            }
            Err(e) => errors.push(format!("{}: geodesic export: {e}", entry.name)),
        }
        match pseudo_geodesic_seed_curves(entry, &suite_config) {
            Ok(pgs) => {
                if config.export_all_seeds {
                    for sc in pgs {
                        curves.push((entry.name.to_string(), sc));
                    }
                } else {
                    // One representative per c value.
                    for &c in &config.c_values {
                        if let Some(sc) = pgs.iter().find(|sc| {
                            sc.label.starts_with(&format!("pg-c{c}-"))
                        }) {
                            curves.push((
                                entry.name.to_string(),
                                SeedCurve {
                                    label: sc.label.clone(),
                                    traj: sc.traj.clone(),
                                },
                            ));
                        }
                    }
                }
            }
            Err(e) => errors.push(format!("{}: pseudo-geodesic export: {e}", entry.name)),
        }
    }
    EntryOutput {
        verdicts,
        defects,
        curves,
        errors,
    }
}

pub struct RunOutcome {
    pub report_path: PathBuf,
    pub manifest_path: PathBuf,
    pub all_consistent: bool,
    pub had_errors: bool,
}

/// Execute a scenario and write `report.json`, `manifest.json`, and
/// `trajectories/*.csv` under `out_dir`.
pub fn run_scenario(
    config: &ScenarioConfig,
    out_dir: &Path,
    threads: usize,
) -> Result<RunOutcome, String> {
    config.validate().map_err(|e| e.to_string())?;
    let entries = config.resolve_entries().map_err(|e| e.to_string())?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| e.to_string())?;
    // Parallel over entries; ordered collect keeps reports bit-stable
    // across thread counts.
    let outputs: Vec<EntryOutput> = pool.install(|| {
        use rayon::prelude::*;
        entries
            .par_iter()
            .map(|entry| run_entry(entry, config))
            .collect()
    });

    fs::create_dir_all(out_dir).map_err(|e| e.to_string())?;
    let traj_dir = out_dir.join("trajectories");
    fs::create_dir_all(&traj_dir).map_err(|e| e.to_string())?;

    let mut verdicts = Vec::new();
    let mut defects = Vec::new();
    let mut trajectories = Vec::new();
    let mut errors = Vec::new();
    for (entry, output) in entries.iter().zip(outputs) {
        verdicts.extend(output.verdicts);
        if let Some(d) = output.defects {
            defects.push(d);
        }
        errors.extend(output.errors);
        for (entry_name, sc) in output.curves {
            let file = format!("{}_{}.csv", sanitize(&entry_name), sanitize(&sc.label));
            let path = traj_dir.join(&file);
            if let Err(e) = write_trajectory_csv(&path, entry, &sc.traj, config.max_csv_rows) {
                errors.push(format!("{entry_name}: csv {file}: {e}"));
            } else {
                trajectories.push(format!("trajectories/{file}"));
            }
        }
    }

    let all_consistent = !verdicts.is_empty() && verdicts.iter().all(|v| v.consistent);
    let report = Report {
        scenario: config.name.clone(),
        config: config.clone(),
        verdicts,
        defects,
        trajectories,
        errors: errors.clone(),
        all_consistent,
    };
    let report_json = jsonfmt::to_string(&report).map_err(|e| e.to_string())?;
    let report_path = out_dir.join("report.json");
    fs::write(&report_path, &report_json).map_err(|e| e.to_string())?;

    let config_json = jsonfmt::to_string(config).map_err(|e| e.to_string())?;
    let mut hasher = Sha256::new();
    hasher.update(config_json.as_bytes());
    let manifest = Manifest {
        config_hash: format!("{:x}", hasher.finalize()),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_unix_seconds: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0),
        threads,
        scenario: config.name.clone(),
    };
    let manifest_path = out_dir.join("manifest.json");
    fs::write(&manifest_path, jsonfmt::to_string(&manifest).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;

    Ok(RunOutcome {
        report_path,
        manifest_path,
        all_consistent,
        had_errors: !errors.is_empty(),
    })
}
