//! Monte Carlo estimates of the detection error probability, its minimum
//! over thresholds, and the transmission outage probability.
//!
//! Trials are split into batches; batch `b` draws from its own ChaCha
//! stream, so results are bit-identical for a given [`McConfig`] whatever
//! the thread count. Hit counts are integers, so merging is exact.
//!
//! The warden's signal power is drawn through the scalar reduction
//! `v†H̃w ~ CN(0, 1)` (unit-norm `v` and `w`); [`simulate_dep_curve_matrix`]
//! draws the full scatter matrix instead and exists to cross-check it.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{complex_normal, complex_normal_matrix, CMat, CVec};
use crate::covert_analysis::{
    dep, dep_lb, effective_gain, top, warden_stats, NoiseUncertainty, WardenSignalStats,
};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::optimizer::BeamSolution;
use crate::rng;
use crate::scenario::{Scenario, ScenarioLinks};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_trials: u64,
    pub seed: u64,
    pub batch: u64,
}

impl McConfig {
    pub fn new(n_trials: u64, seed: u64) -> Self {
        Self {
            n_trials,
            seed,
            batch: 10_000,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::domain("Monte Carlo needs at least one trial"));
        }
        if self.batch == 0 {
            return Err(Error::domain("Monte Carlo batch size must be positive"));
        }
        Ok(())
    }

    fn batches(&self) -> Vec<(u64, u64)> {
        let n = self.n_trials.div_ceil(self.batch);
        (0..n)
            .map(|b| (b, self.batch.min(self.n_trials - b * self.batch)))
            .collect()
    }
}

/// Standard error of a proportion estimated from `n` trials.
fn proportion_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepPoint {
    pub tau: f64,
    pub xi_emp: f64,
    pub se: f64,
    pub xi_analytic: f64,
    pub xi_lb: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepCurve {
    pub points: Vec<DepPoint>,
    pub n_trials: u64,
}

impl DepCurve {
    pub const CSV_HEADER: &'static str = "tau,xi_emp,se,xi_analytic,xi_lb";

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for p in &self.points {
            writeln!(out, "{:e},{},{},{},{}", p.tau, p.xi_emp, p.se, p.xi_analytic, p.xi_lb)?;
        }
        Ok(())
    }
}

/// Empirical `P_F + P_M` from hit counts under each hypothesis.
fn curve_from_counts(
    taus: &[f64],
    false_alarms: &[u64],
    misses: &[u64],
    n: u64,
    stats: &WardenSignalStats,
    noise: &NoiseUncertainty,
) -> Result<DepCurve> {
    let points = taus
        .iter()
        .zip(false_alarms.iter().zip(misses))
        .map(|(&tau, (&fa, &md))| {
            let pf = fa as f64 / n as f64;
            let pm = md as f64 / n as f64;
            Ok(DepPoint {
                tau,
                xi_emp: pf + pm,
                se: (proportion_se(pf, n).powi(2) + proportion_se(pm, n).powi(2)).sqrt(),
                xi_analytic: dep(stats, noise, tau)?,
                xi_lb: dep_lb(stats, noise, tau)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DepCurve { points, n_trials: n })
}

/// Counts threshold crossings for every `tau`, with `draw` returning the
/// signal power of one H₁ trial.
fn count_hits<F>(noise: &NoiseUncertainty, taus: &[f64], mc: &McConfig, draw: F) -> Result<(Vec<u64>, Vec<u64>)>
where
    F: Fn(&mut rand_chacha::ChaCha20Rng) -> f64 + Sync,
{
    mc.validate()?;
    let k = taus.len();
    let parts: Vec<(Vec<u64>, Vec<u64>)> = mc
        .batches()
        .par_iter()
        .map(|&(b, n)| {
            let mut g = rng::stream(mc.seed, b);
            let mut fa = vec![0u64; k];
            let mut md = vec![0u64; k];
            for _ in 0..n {
                let t0 = noise.sample(&mut g);
                let t1 = draw(&mut g) + noise.sample(&mut g);
                for (i, &tau) in taus.iter().enumerate() {
                    fa[i] += u64::from(t0 > tau);
                    md[i] += u64::from(t1 <= tau);
                }
            }
            (fa, md)
        })
        .collect();
    let mut fa = vec![0u64; k];
    let mut md = vec![0u64; k];
    for (a, b) in parts {
        for i in 0..k {
            fa[i] += a[i];
            md[i] += b[i];
        }
    }
    Ok((fa, md))
}

/// DEP curve for a warden whose received power is `ω/(1+κ)·|√κ + z|²`,
/// `z ~ CN(0, 1)`: the exact law of a Rician link with LoS share `κ` and
/// mean `ω`.
pub fn simulate_dep_stats(
    stats: &WardenSignalStats,
    noise: &NoiseUncertainty,
    taus: &[f64],
    mc: &McConfig,
) -> Result<DepCurve> {
    let scale = stats.omega / (1.0 + stats.kappa);
    let los = stats.kappa.sqrt();
    let (fa, md) = count_hits(noise, taus, mc, |g| {
        let z = complex_normal(g);
        scale * ((los + z.re).powi(2) + z.im * z.im)
    })?;
    curve_from_counts(taus, &fa, &md, mc.n_trials, stats, noise)
}

fn warden_setup(
    sc: &Scenario,
    links: &ScenarioLinks,
    boresight: &Vec3,
    w: &CVec,
    p_a: f64,
    j: usize,
) -> Result<(WardenSignalStats, NoiseUncertainty, f64)> {
    let link = links
        .wardens
        .get(j)
        .ok_or_else(|| Error::domain(format!("warden index {j} out of range")))?;
    let (_, budgets) = links.budgets_at(sc, boresight)?;
    let st = warden_stats(&budgets[j], &link.los, &link.combiner, w, p_a, sc.k_factor)?;
    Ok((st, sc.noise_warden()?, budgets[j].power_gain() * p_a))
}

/// DEP curve of warden `j` for beam `w` at power `p_a`, with the ground
/// antenna at `boresight`.
pub fn simulate_dep_curve(
    sc: &Scenario,
    links: &ScenarioLinks,
    boresight: &Vec3,
    w: &CVec,
    p_a: f64,
    j: usize,
    taus: &[f64],
    mc: &McConfig,
) -> Result<DepCurve> {
    let (st, noise, _) = warden_setup(sc, links, boresight, w, p_a, j)?;
    simulate_dep_stats(&st, &noise, taus, mc)
}

/// As [`simulate_dep_curve`] but drawing the full `M_sat × M_a` scatter
/// matrix per trial.
pub fn simulate_dep_curve_matrix(
    sc: &Scenario,
    links: &ScenarioLinks,
    boresight: &Vec3,
    w: &CVec,
    p_a: f64,
    j: usize,
    taus: &[f64],
    mc: &McConfig,
) -> Result<DepCurve> {
    let (st, noise, gain) = warden_setup(sc, links, boresight, w, p_a, j)?;
    let link = &links.wardens[j];
    let k = sc.k_factor;
    let (a, b) = ((k / (1.0 + k)).sqrt(), (1.0 / (1.0 + k)).sqrt());
    let los: CMat = link.los.scale(a);
    let (r, c) = los.shape();
    let (fa, md) = count_hits(&noise, taus, mc, |g| {
        let h = &los + complex_normal_matrix(r, c, g).scale(b);
        gain * effective_gain(&h, &link.combiner, w)
    })?;
    curve_from_counts(taus, &fa, &md, mc.n_trials, &st, &noise)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMin {
    pub tau: f64,
    pub xi: f64,
    pub se: f64,
}

/// Grid minimiser of the empirical DEP over `n_grid` log-spaced thresholds
/// in `[lb, ub]`, where the optimum must lie.
pub fn empirical_min_dep_stats(
    stats: &WardenSignalStats,
    noise: &NoiseUncertainty,
    n_grid: usize,
    mc: &McConfig,
) -> Result<EmpiricalMin> {
    if n_grid < 2 {
        return Err(Error::domain("threshold grid needs at least two points"));
    }
    let (lo, hi) = (noise.lb().ln(), noise.ub().ln());
    let taus: Vec<f64> = (0..n_grid)
        .map(|i| (lo + (hi - lo) * i as f64 / (n_grid - 1) as f64).exp())
        .collect();
    let curve = simulate_dep_stats(stats, noise, &taus, mc)?;
    let best = curve
        .points
        .iter()
        .min_by(|a, b| a.xi_emp.total_cmp(&b.xi_emp))
        .expect("non-empty grid");
    Ok(EmpiricalMin {
        tau: best.tau,
        xi: best.xi_emp,
        se: best.se,
    })
}

/// Empirical minimum DEP of warden `j`.
pub fn empirical_min_dep(
    sc: &Scenario,
    links: &ScenarioLinks,
    boresight: &Vec3,
    w: &CVec,
    p_a: f64,
    j: usize,
    n_grid: usize,
    mc: &McConfig,
) -> Result<EmpiricalMin> {
    let (st, noise, _) = warden_setup(sc, links, boresight, w, p_a, j)?;
    empirical_min_dep_stats(&st, &noise, n_grid, mc)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopEstimate {
    pub zeta: f64,
    pub se: f64,
    pub analytic: f64,
}

/// Outage frequency of `rate` when Bob receives signal power `s_b` and
/// only the noise power is random.
pub fn simulate_top_power(rate: f64, s_b: f64, noise: &NoiseUncertainty, mc: &McConfig) -> Result<TopEstimate> {
    mc.validate()?;
    let outages: u64 = mc
        .batches()
        .par_iter()
        .map(|&(b, n)| {
            let mut g = rng::stream(mc.seed, b);
            (0..n)
                .filter(|_| {
                    let s2 = noise.sample(&mut g);
                    rate > (s_b / s2).ln_1p() / std::f64::consts::LN_2
                })
                .count() as u64
        })
        .sum();
    let zeta = outages as f64 / mc.n_trials as f64;
    Ok(TopEstimate {
        zeta,
        se: proportion_se(zeta, mc.n_trials),
        analytic: top(rate, s_b, noise),
    })
}

/// Outage frequency of a designed solution on Bob's channel `h_ab`.
pub fn simulate_top(
    sc: &Scenario,
    links: &ScenarioLinks,
    sol: &BeamSolution,
    h_ab: &CMat,
    mc: &McConfig,
) -> Result<TopEstimate> {
    let (bob, _) = links.budgets_at(sc, &sol.boresight)?;
    let s_b = crate::covert_analysis::bob_signal_power(sol.p_a, &bob, h_ab, &sol.w, &links.bob.combiner);
    simulate_top_power(sol.rate, s_b, &sc.noise_bob()?, mc)
}
