//! Figure-style experiment sweeps: configuration, built-in presets, warden
//! placement, orchestration and CSV/JSON persistence.

mod config;
mod presets;

pub use config::{
    CsiMode, ExperimentConfig, ExperimentKind, OptimizerConfig, PointSettings, ScenarioConfig, Sweep,
    WardenPlacement, SWEEP_VARIABLES,
};
pub use presets::{preset, PRESET_NAMES};

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::sample_channel_seeded;
use crate::covert_analysis::{dep_floor, min_dep_lb, optimal_threshold, warden_stats};
use crate::error::{Error, Result};
use crate::geometry::{geo_satellite_position, NodeGeometry};
use crate::linkbudget::dbm_to_watts;
use crate::optimizer::{
    evaluate_solution, mrt_baseline, solve_jo_ba_imperfect, solve_jo_ba_perfect, solve_ob_imperfect,
    solve_ob_perfect, zf_baseline, BeamSolution, Channels, Design, RobustSpec, AUDIT_TOL,
};
use crate::rng;
use crate::scenario::{Scenario, ScenarioLinks};
use crate::sdp_engine::{ipm::IpmOptions, BACKEND};
use crate::simkit::{empirical_min_dep_stats, simulate_dep_curve};

const PLACEMENT_STREAM: u64 = 1 << 32;

/// Warden longitudes for one sample: the listed ones (first `n_w`) or
/// `n_w` i.i.d. uniform draws.
pub fn warden_longitudes(listed: &[f64], n_w: usize, placement: &WardenPlacement, seed: u64) -> Result<Vec<f64>> {
    if n_w == 0 {
        return Err(Error::domain("at least one warden is required"));
    }
    match *placement {
        WardenPlacement::Fixed => {
            if n_w > listed.len() {
                return Err(Error::domain(format!(
                    "{n_w} wardens requested but only {} longitudes listed",
                    listed.len()
                )));
            }
            Ok(listed[..n_w].to_vec())
        }
        WardenPlacement::Uniform { lo, hi } => {
            if !(lo <= hi) {
                return Err(Error::domain(format!("empty longitude range [{lo}, {hi}]")));
            }
            let mut g = rng::stream(seed, PLACEMENT_STREAM);
            Ok((0..n_w).map(|_| g.random_range(lo..=hi)).collect())
        }
    }
}

/// Co-orbital warden nodes pointing at the ground station.
pub fn generate_wardens(sc: &Scenario, n_w: usize, placement: &WardenPlacement, seed: u64) -> Result<Vec<NodeGeometry>> {
    let alice = sc.alice_position()?;
    warden_longitudes(&sc.warden_longitudes_deg, n_w, placement, seed)?
        .into_iter()
        .map(|lon| NodeGeometry::pointing_at(geo_satellite_position(lon, sc.orbit_radius())?, &alice))
        .collect()
}

/// Result table with a fixed column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub ipm_tol: f64,
    pub audit_tol: f64,
    pub alternating_tol_rel: f64,
    pub dep_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub name: String,
    pub config: ExperimentConfig,
    /// SHA-256 of the resolved configuration's compact JSON.
    pub config_hash: String,
    pub sample_seeds: Vec<u64>,
    pub mc_seed: u64,
    pub backend: String,
    pub tolerances: Tolerances,
    pub wall_time_s: f64,
    pub rows: usize,
    pub audit_failures: usize,
    pub solver_failures: usize,
    pub errors: Vec<String>,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub table: Table,
    pub meta: RunMetadata,
}

impl RunOutput {
    pub fn all_audits_passed(&self) -> bool {
        self.meta.audit_failures == 0 && self.meta.solver_failures == 0
    }

    /// Writes `<name>.csv` and `<name>.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{}.csv", self.meta.name));
        let json = dir.join(format!("{}.json", self.meta.name));
        self.table.write_csv(std::io::BufWriter::new(std::fs::File::create(&csv)?))?;
        std::fs::write(&json, serde_json::to_string_pretty(&self.meta)?)?;
        Ok((csv, json))
    }
}

pub fn config_hash(cfg: &ExperimentConfig) -> Result<String> {
    let text = serde_json::to_string(cfg)?;
    Ok(hex::encode(Sha256::digest(text.as_bytes())))
}

/// Outcome of one sweep point.
struct PointResult {
    rows: Vec<Vec<f64>>,
    audit_failures: usize,
    solver_failures: usize,
    errors: Vec<String>,
}

impl PointResult {
    fn failed(width: usize, assign: &[(String, f64)], e: Error) -> Self {
        let mut row: Vec<f64> = assign.iter().map(|a| a.1).collect();
        row.resize(width, f64::NAN);
        Self {
            rows: vec![row],
            audit_failures: 0,
            solver_failures: 1,
            errors: vec![format!("{}: {e}", describe(assign))],
        }
    }
}

fn describe(assign: &[(String, f64)]) -> String {
    if assign.is_empty() {
        "base point".to_string()
    } else {
        assign.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
    }
}

fn axis_names(cfg: &ExperimentConfig) -> Vec<String> {
    let mut v: Vec<String> = cfg.series.iter().map(|s| s.variable.clone()).collect();
    if let Some(s) = &cfg.sweep {
        v.push(s.variable.clone());
    }
    v
}

/// Column name of a design's rate.
pub fn rate_column(d: Design) -> String {
    format!("R_{}", d.name().replace('-', ""))
}

fn columns(cfg: &ExperimentConfig) -> Vec<String> {
    let mut c = axis_names(cfg);
    let tail: Vec<String> = match cfg.kind {
        ExperimentKind::DepCurve => ["tau", "xi_analytic", "xi_lb", "xi_emp", "se"].map(String::from).to_vec(),
        ExperimentKind::MinDep => ["xi_emp_min", "se", "tau_emp", "xi_lb_min", "tau_lb", "xi_floor"]
            .map(String::from)
            .to_vec(),
        ExperimentKind::Rate => {
            let mut t: Vec<String> = cfg.designs.iter().map(|d| rate_column(*d)).collect();
            t.push("samples".to_string());
            t.push("failed_samples".to_string());
            t
        }
    };
    c.extend(tail);
    c
}

fn point_scenario(cfg: &ExperimentConfig, st: &PointSettings, sample_seed: u64) -> Result<Scenario> {
    let mut sc = st.scenario.to_scenario();
    let n_w = st.n_w.unwrap_or(sc.warden_longitudes_deg.len());
    sc.warden_longitudes_deg = warden_longitudes(&sc.warden_longitudes_deg, n_w, &cfg.placement, sample_seed)?;
    sc.validate()?;
    Ok(sc)
}

/// The ground station's LoS beam toward Bob, used by the DEP experiments.
fn bob_los_beam(links: &ScenarioLinks) -> crate::channel::CVec {
    let d = &links.bob.d_tx;
    d.unscale(d.norm())
}

fn run_dep_curve(cfg: &ExperimentConfig, assign: &[(String, f64)], st: &PointSettings) -> Result<PointResult> {
    let sc = point_scenario(cfg, st, cfg.seed)?;
    let links = sc.links()?;
    let noise = sc.noise_warden()?;
    let (a, b) = (0.5 * noise.lb(), 2.0 * noise.ub());
    let n = cfg.tau_points;
    let taus: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    let w = bob_los_beam(&links);
    let curve = simulate_dep_curve(
        &sc,
        &links,
        &links.alice.boresight,
        &w,
        dbm_to_watts(st.p_a_dbm),
        cfg.warden_index,
        &taus,
        &cfg.mc,
    )?;
    let mut audit_failures = 0;
    let mut errors = Vec::new();
    let rows = curve
        .points
        .iter()
        .map(|p| {
            let gap = (p.xi_emp - p.xi_analytic).abs();
            if gap > cfg.dep_tol.max(3.0 * p.se) {
                audit_failures += 1;
                errors.push(format!("{}: DEP gap {gap:.4} at tau = {:e}", describe(assign), p.tau));
            }
            let mut r: Vec<f64> = assign.iter().map(|a| a.1).collect();
            r.extend([p.tau, p.xi_analytic, p.xi_lb, p.xi_emp, p.se]);
            r
        })
        .collect();
    Ok(PointResult {
        rows,
        audit_failures,
        solver_failures: 0,
        errors,
    })
}

fn run_min_dep(cfg: &ExperimentConfig, assign: &[(String, f64)], st: &PointSettings) -> Result<PointResult> {
    let sc = point_scenario(cfg, st, cfg.seed)?;
    let links = sc.links()?;
    let noise = sc.noise_warden()?;
    let j = cfg.warden_index;
    let w = bob_los_beam(&links);
    let l = &links.wardens[j];
    let stats = warden_stats(&l.budget, &l.los, &l.combiner, &w, dbm_to_watts(st.p_a_dbm), sc.k_factor)?;
    let emp = empirical_min_dep_stats(&stats, &noise, cfg.min_grid, &cfg.mc)?;
    let lb_min = min_dep_lb(&stats, &noise)?;
    let tau_lb = optimal_threshold(&stats, &noise)?;
    let floor = dep_floor(&stats, &noise);
    let mut errors = Vec::new();
    let ok = floor < lb_min && lb_min <= emp.xi + 3.0 * emp.se + AUDIT_TOL;
    if !ok {
        errors.push(format!(
            "{}: ordering floor {floor:.6} < lb {lb_min:.6} <= emp {:.6} (+3se) violated",
            describe(assign),
            emp.xi
        ));
    }
    let mut r: Vec<f64> = assign.iter().map(|a| a.1).collect();
    r.extend([emp.xi, emp.se, emp.tau, lb_min, tau_lb, floor]);
    Ok(PointResult {
        rows: vec![r],
        audit_failures: usize::from(!ok),
        solver_failures: 0,
        errors,
    })
}

/// Runs one design on one sample.
pub fn run_design(
    design: Design,
    sc: &Scenario,
    links: &ScenarioLinks,
    ch: &Channels,
    csi: CsiMode,
    opts: &crate::optimizer::OptimizerOptions,
) -> Result<BeamSolution> {
    let robust = match csi {
        CsiMode::Perfect => None,
        CsiMode::Imperfect { delta } => Some(RobustSpec::uniform(delta, links.wardens.len())?),
    };
    match (design, robust) {
        (Design::Ob, None) => solve_ob_perfect(sc, links, ch, opts),
        (Design::Ob, Some(r)) => solve_ob_imperfect(sc, links, ch, &r, opts),
        (Design::JoBa, None) => solve_jo_ba_perfect(sc, links, ch, opts),
        (Design::JoBa, Some(r)) => solve_jo_ba_imperfect(sc, links, ch, &r, opts),
        (Design::Mrt, _) => mrt_baseline(sc, links, ch),
        (Design::Zf, _) => zf_baseline(sc, links, ch),
    }
}

fn run_rate(cfg: &ExperimentConfig, assign: &[(String, f64)], st: &PointSettings) -> Result<PointResult> {
    let mut sums = vec![0.0; cfg.designs.len()];
    let mut ok_samples = 0usize;
    let mut failed = 0usize;
    let mut audit_failures = 0;
    let mut solver_failures = 0;
    let mut errors = Vec::new();
    for s in 0..cfg.seeds as u64 {
        let sample_seed = cfg.seed.wrapping_add(s);
        let sample = || -> Result<Vec<(f64, bool)>> {
            let sc = point_scenario(cfg, st, sample_seed)?;
            let links = sc.links()?;
            let h = sample_channel_seeded(&sc.bob_rician(&links), sample_seed, 0).h;
            let ch = Channels::new(&links, h);
            let opts = cfg.optimizer.options(sample_seed);
            cfg.designs
                .iter()
                .map(|&d| {
                    let sol = run_design(d, &sc, &links, &ch, st.csi, &opts)?;
                    let rep = evaluate_solution(&sc, &links, &sol, &ch)?;
                    Ok((sol.rate, rep.covert && rep.reliable))
                })
                .collect()
        };
        match sample() {
            Ok(res) => {
                ok_samples += 1;
                for (i, (r, audit)) in res.iter().enumerate() {
                    sums[i] += r;
                    if !audit {
                        audit_failures += 1;
                        errors.push(format!(
                            "{}, sample seed {sample_seed}: {} failed its audit",
                            describe(assign),
                            cfg.designs[i].name()
                        ));
                    }
                }
            }
            Err(e) => {
                failed += 1;
                solver_failures += 1;
                errors.push(format!("{}, sample seed {sample_seed}: {e}", describe(assign)));
            }
        }
    }
    let mut r: Vec<f64> = assign.iter().map(|a| a.1).collect();
    r.extend(sums.iter().map(|s| if ok_samples > 0 { s / ok_samples as f64 } else { f64::NAN }));
    r.push(ok_samples as f64);
    r.push(failed as f64);
    Ok(PointResult {
        rows: vec![r],
        audit_failures,
        solver_failures,
        errors,
    })
}

/// Runs every sweep point (in parallel) and assembles the table in sweep
/// order. Per-point failures are recorded, not fatal.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let start = Instant::now();
    let cols = columns(cfg);
    let points = cfg.points()?;
    let results: Vec<PointResult> = points
        .par_iter()
        .map(|(assign, st)| {
            let r = match cfg.kind {
                ExperimentKind::DepCurve => run_dep_curve(cfg, assign, st),
                ExperimentKind::MinDep => run_min_dep(cfg, assign, st),
                ExperimentKind::Rate => run_rate(cfg, assign, st),
            };
            r.unwrap_or_else(|e| PointResult::failed(cols.len(), assign, e))
        })
        .collect();
    let mut rows = Vec::new();
    let (mut audit_failures, mut solver_failures, mut errors) = (0, 0, Vec::new());
    for r in results {
        rows.extend(r.rows);
        audit_failures += r.audit_failures;
        solver_failures += r.solver_failures;
        errors.extend(r.errors);
    }
    let ipm = IpmOptions::default();
    let sample_seeds = match cfg.kind {
        ExperimentKind::Rate => (0..cfg.seeds as u64).map(|s| cfg.seed.wrapping_add(s)).collect(),
        _ => vec![cfg.seed],
    };
    let meta = RunMetadata {
        name: cfg.name.clone(),
        config: cfg.clone(),
        config_hash: config_hash(cfg)?,
        sample_seeds,
        mc_seed: cfg.mc.seed,
        backend: BACKEND.to_string(),
        tolerances: Tolerances {
            ipm_tol: ipm.tol,
            audit_tol: AUDIT_TOL,
            alternating_tol_rel: cfg.optimizer.tol_rel,
            dep_tol: cfg.dep_tol,
        },
        wall_time_s: start.elapsed().as_secs_f64(),
        rows: rows.len(),
        audit_failures,
        solver_failures,
        errors,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    Ok(RunOutput {
        table: Table { columns: cols, rows },
        meta,
    })
}

#[cfg(test)]
mod tests;
