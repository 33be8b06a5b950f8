//! Alternating optimisation of the beam and the ground antenna's boresight.
//!
//! The boresight is searched on the cone of half-angle `ϑ0` around the
//! direction to Bob; for a fixed relaxed beam the best power at each cone
//! point is the tightest covertness cap, so the orientation step is a cheap
//! 1-D sweep. The beam step re-solves the relaxation at the new gains.

use rayon::prelude::*;

use super::{BeamSolution, Channels, Design, OptimizerOptions, RobustSpec, Setup, SolverMeta};
use crate::channel::CMat;
use crate::error::{Error, Result};
use crate::geometry::{orientation_candidates_at, Vec3};
use crate::scenario::{Scenario, ScenarioLinks};
use crate::sdp_engine::BACKEND;

const TIE_REL: f64 = 1e-12;

struct Incumbent {
    theta: f64,
    o: Vec3,
    value: f64,
}

impl Setup<'_> {
    /// Objective `G_ab·P·f` of cone point `o` for a relaxed beam summarised
    /// by its per-unit-trace gains.
    fn orientation_value(&self, o: &Vec3, q_w: &[f64], f: f64) -> Result<f64> {
        let (g_ab, g_w) = self.gains(o)?;
        Ok(g_ab * self.max_power(&g_w, q_w) * f)
    }

    fn sweep(&self, thetas: &[f64], q_w: &[f64], f: f64) -> Result<Vec<(f64, Vec3, f64)>> {
        let cone = self.sc.earth_station.theta0_deg;
        let os = orientation_candidates_at(&self.u_ab, cone, thetas)?;
        thetas
            .par_iter()
            .zip(os.par_iter())
            .map(|(&t, o)| Ok((t, *o, self.orientation_value(o, q_w, f)?)))
            .collect()
    }

    /// Best cone point for the relaxed beam `w_hat`; ties go to the
    /// smallest rotation parameter.
    fn orientation_step(
        &self,
        w_hat: &CMat,
        incumbent: Option<&Incumbent>,
        opts: &OptimizerOptions,
    ) -> Result<Incumbent> {
        let (_, q_w, f) = self.relaxed_unit_terms(w_hat);
        let tau = std::f64::consts::TAU;
        let step = tau / opts.n_grid as f64;
        let coarse: Vec<f64> = (0..opts.n_grid).map(|k| step * k as f64).collect();
        let mut cands = self.sweep(&coarse, &q_w, f)?;
        let pick = |c: &[(f64, Vec3, f64)], inc: Option<&Incumbent>| -> Incumbent {
            let mut best: Option<Incumbent> = inc.map(|i| Incumbent {
                theta: i.theta,
                o: i.o,
                value: i.value,
            });
            for &(t, o, v) in c {
                let better = match &best {
                    None => true,
                    Some(b) => {
                        let tie = (v - b.value).abs() <= TIE_REL * b.value.abs().max(v.abs());
                        if tie {
                            t < b.theta
                        } else {
                            v > b.value
                        }
                    }
                };
                if better {
                    best = Some(Incumbent { theta: t, o, value: v });
                }
            }
            best.expect("non-empty candidate list")
        };
        let inc = incumbent
            .map(|i| -> Result<Incumbent> {
                Ok(Incumbent {
                    theta: i.theta,
                    o: i.o,
                    value: self.orientation_value(&i.o, &q_w, f)?,
                })
            })
            .transpose()?;
        let coarse_best = pick(&cands, inc.as_ref());
        if opts.refine > 1 {
            let fine = step / opts.refine as f64;
            let r = opts.refine as i64;
            let local: Vec<f64> = (-(r - 1)..r)
                .filter(|&j| j != 0)
                .map(|j| (coarse_best.theta + fine * j as f64).rem_euclid(tau))
                .collect();
            cands = self.sweep(&local, &q_w, f)?;
            return Ok(pick(&cands, Some(&coarse_best)));
        }
        Ok(coarse_best)
    }
}

fn jo_ba(
    sc: &Scenario,
    links: &ScenarioLinks,
    ch: &Channels,
    robust: Option<&RobustSpec>,
    opts: &OptimizerOptions,
) -> Result<BeamSolution> {
    if opts.n_grid == 0 || opts.max_iter == 0 {
        return Err(Error::domain("orientation grid and iteration limit must be positive"));
    }
    let setup = Setup::new(sc, links, ch, robust)?;
    let mut warnings = Vec::new();
    let mut sdp_iterations = 0;

    // Initial beam: the relaxation at the default orientation, with power
    // left free so the first cone sweep starts from a non-degenerate beam.
    let o0 = links.alice.boresight;
    let (_, g_w0) = setup.gains(&o0)?;
    let (mut w_hat, _, sol) = setup.solve_relaxed(&g_w0, &opts.ipm, &mut warnings)?;
    sdp_iterations += sol.diagnostics.iterations;
    if !(w_hat.trace().re > 0.0) {
        return Err(Error::numeric("joint design", "initial relaxed beam has zero power"));
    }

    let mut history = Vec::new();
    let mut incumbent: Option<Incumbent> = None;
    let mut converged = false;
    let mut iterations = 0;
    let mut g_prev = f64::NAN;
    while iterations < opts.max_iter {
        iterations += 1;
        let inc = setup.orientation_step(&w_hat, incumbent.as_ref(), opts)?;
        let (g_ab, g_w) = setup.gains(&inc.o)?;
        let (next, gain, sol) = setup.solve_relaxed(&g_w, &opts.ipm, &mut warnings)?;
        sdp_iterations += sol.diagnostics.iterations;
        let g = g_ab * gain;
        history.push(g);
        // Keep the previous beam if the solver returned a worse one.
        if !(g < inc.value * (1.0 - 1e-9)) && next.trace().re > 0.0 {
            w_hat = next;
        }
        incumbent = Some(inc);
        if g_prev.is_finite() && (g - g_prev).abs() <= opts.tol_rel * g_prev.abs() {
            converged = true;
            break;
        }
        g_prev = g;
    }
    if !converged {
        warnings.push(format!(
            "alternating loop stopped after {iterations} iterations without meeting the tolerance"
        ));
    }
    let inc = incumbent.expect("at least one iteration");
    let (g_ab, g_w) = setup.gains(&inc.o)?;
    let (w, p, rank_one) = setup.recover(&w_hat, &g_w, opts.n_draws, opts.seed)?;
    let relaxed = {
        let (_, q_w, f) = setup.relaxed_unit_terms(&w_hat);
        setup.rate(g_ab, setup.max_power(&g_w, &q_w) * f)
    };
    let meta = SolverMeta {
        backend: BACKEND.to_string(),
        relaxed_rate: Some(relaxed),
        rank_one: Some(rank_one),
        sdp_iterations,
        outer_iterations: iterations,
        converged,
        objective_history: history,
        warnings,
    };
    setup.finish(Design::JoBa, w, p, inc.o, g_ab, meta, opts.seed, ch)
}

/// Joint beamforming and orientation design with perfect CSI.
pub fn solve_jo_ba_perfect(
    sc: &Scenario,
    links: &ScenarioLinks,
    ch: &Channels,
    opts: &OptimizerOptions,
) -> Result<BeamSolution> {
    jo_ba(sc, links, ch, None, opts)
}

/// Joint design robust to bounded errors in `ch`.
pub fn solve_jo_ba_imperfect(
    sc: &Scenario,
    links: &ScenarioLinks,
    ch: &Channels,
    robust: &RobustSpec,
    opts: &OptimizerOptions,
) -> Result<BeamSolution> {
    jo_ba(sc, links, ch, Some(robust), opts)
}
