//! Covert-rate maximisation: SDR beamforming at a fixed orientation (OB),
//! joint beamforming and antenna orientation (JO-BA), their robust
//! counterparts under bounded CSI errors, and the MRT/ZF baselines.
//!
//! Every design returns a [`BeamSolution`] with a unit-norm beamformer, the
//! transmit power, the covert rate it supports and the boresight used.

mod baselines;
mod joba;
mod record;

pub use baselines::{mrt_baseline, zf_baseline};
pub use joba::{solve_jo_ba_imperfect, solve_jo_ba_perfect};
pub use record::SolutionRecord;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{CMat, CVec, CsiErrorBound};
use crate::covert_analysis::{
    dep_floor, eta_w, min_dep_lb, top, warden_stats, CovertSpec,
};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::rng;
use crate::scenario::{Scenario, ScenarioLinks};
use crate::sdp_engine::{
    gaussian_randomization, ipm::IpmOptions, solve_with, Constraint, HermMat, SdpProblem, SdpSolution,
    SdpStatus, Sense, BACKEND,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Design {
    #[serde(rename = "OB")]
    Ob,
    #[serde(rename = "JO-BA")]
    JoBa,
    #[serde(rename = "MRT")]
    Mrt,
    #[serde(rename = "ZF")]
    Zf,
}

impl Design {
    pub fn name(&self) -> &'static str {
        match self {
            Design::Ob => "OB",
            Design::JoBa => "JO-BA",
            Design::Mrt => "MRT",
            Design::Zf => "ZF",
        }
    }
}

impl std::str::FromStr for Design {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('_', "-").as_str() {
            "OB" => Ok(Design::Ob),
            "JO-BA" | "JOBA" => Ok(Design::JoBa),
            "MRT" => Ok(Design::Mrt),
            "ZF" => Ok(Design::Zf),
            _ => Err(Error::Config(vec![format!(
                "unknown design {s:?}; expected one of OB, JO-BA, MRT, ZF"
            )])),
        }
    }
}

/// Channel knowledge handed to a design: Bob's realization and the warden
/// LoS matrices. For imperfect-CSI designs these are the estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct Channels {
    pub h_ab: CMat,
    pub warden_los: Vec<CMat>,
}

impl Channels {
    /// Bob's realization `h_ab` with the deterministic warden LoS matrices.
    pub fn new(links: &ScenarioLinks, h_ab: CMat) -> Self {
        Self {
            h_ab,
            warden_los: links.wardens.iter().map(|w| w.los.clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustSpec {
    pub csi_bounds: CsiErrorBound,
}

impl RobustSpec {
    pub fn uniform(delta: f64, n_wardens: usize) -> Result<Self> {
        Ok(Self {
            csi_bounds: CsiErrorBound::uniform(delta, n_wardens)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerOptions {
    /// Gaussian randomization draws (skipped when the relaxation is rank one).
    pub n_draws: usize,
    pub seed: u64,
    pub ipm: IpmOptions,
    /// Relative objective change that stops the alternating loop.
    pub tol_rel: f64,
    pub max_iter: usize,
    /// Coarse orientation grid on the cone; refined once by `refine`.
    pub n_grid: usize,
    pub refine: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            n_draws: 200,
            seed: 0,
            ipm: IpmOptions::default(),
            tol_rel: 1e-4,
            max_iter: 50,
            n_grid: 360,
            refine: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    /// `dep_floor − (1 − ε_w)` per warden.
    pub dep_floor_margins: Vec<f64>,
    pub top_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub backend: String,
    /// Rate of the relaxed optimum; an upper bound for rank-one recovery.
    pub relaxed_rate: Option<f64>,
    pub rank_one: Option<bool>,
    pub sdp_iterations: usize,
    pub outer_iterations: usize,
    pub converged: bool,
    pub objective_history: Vec<f64>,
    pub warnings: Vec<String>,
}

impl SolverMeta {
    fn closed_form() -> Self {
        Self {
            backend: "closed-form".to_string(),
            relaxed_rate: None,
            rank_one: None,
            sdp_iterations: 0,
            outer_iterations: 0,
            converged: true,
            objective_history: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamSolution {
    pub design: Design,
    pub robust: bool,
    pub w: CVec,
    pub p_a: f64,
    pub rate: f64,
    pub boresight: Vec3,
    pub feasibility: Feasibility,
    pub solver: SolverMeta,
    pub seed: u64,
}

/// Result of [`evaluate_solution`] on a given set of channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub dep_floor: Vec<f64>,
    pub dep_floor_margins: Vec<f64>,
    /// `NaN` where the threshold search failed.
    pub min_dep_lb: Vec<f64>,
    pub top_value: f64,
    /// Rate the channels support at the solution's beam and power.
    pub supported_rate: f64,
    pub covert: bool,
    pub reliable: bool,
}

/// Slack allowed on the audited margins.
pub const AUDIT_TOL: f64 = 1e-7;

// ---------------------------------------------------------------------------
// Shared problem data

struct WardenTerm {
    a: CVec,
    eta: f64,
    delta: f64,
    dir: Vec3,
}

/// Everything that does not depend on the ground antenna's orientation.
pub(crate) struct Setup<'a> {
    sc: &'a Scenario,
    links: &'a ScenarioLinks,
    k: f64,
    p_max: f64,
    a_b: CVec,
    /// `η_b / G_ab`, the orientation-free part.
    eta_b_unit: f64,
    delta_b: f64,
    robust: bool,
    wardens: Vec<WardenTerm>,
    u_ab: Vec3,
}

impl<'a> Setup<'a> {
    pub(crate) fn new(
        sc: &'a Scenario,
        links: &'a ScenarioLinks,
        ch: &Channels,
        robust: Option<&RobustSpec>,
    ) -> Result<Self> {
        let n_w = links.wardens.len();
        if ch.warden_los.len() != n_w {
            return Err(Error::domain(format!(
                "{} warden channels supplied for {n_w} wardens",
                ch.warden_los.len()
            )));
        }
        let m_a = sc.alice_array.len();
        if ch.h_ab.ncols() != m_a || ch.h_ab.nrows() != sc.satellite_array.len() {
            return Err(Error::domain("Bob channel has the wrong shape"));
        }
        let bounds = match robust {
            Some(r) => {
                r.csi_bounds.validate()?;
                if r.csi_bounds.delta_w.len() != n_w {
                    return Err(Error::domain("one warden CSI radius is required per warden"));
                }
                r.csi_bounds.clone()
            }
            None => CsiErrorBound {
                delta_b: 0.0,
                delta_w: vec![0.0; n_w],
            },
        };
        let noise_w = sc.noise_warden()?;
        let noise_b = sc.noise_bob()?;
        let spec = CovertSpec::new(sc.covert.epsilon_w, sc.covert.epsilon_b)?;
        let wardens = links
            .wardens
            .iter()
            .zip(&ch.warden_los)
            .zip(&bounds.delta_w)
            .map(|((l, h), &delta)| WardenTerm {
                a: h.adjoint() * &l.combiner,
                eta: eta_w(&l.budget, &noise_w, &spec, sc.k_factor),
                delta,
                dir: l.direction,
            })
            .collect();
        let bb = &links.bob.budget;
        Ok(Self {
            sc,
            links,
            k: sc.k_factor,
            p_max: sc.p_max_w,
            a_b: ch.h_ab.adjoint() * &links.bob.combiner,
            eta_b_unit: noise_b.rho.powf(2.0 * spec.epsilon_b - 1.0) * bb.f_path * bb.g_rx
                / noise_b.nominal_power,
            delta_b: bounds.delta_b,
            robust: robust.is_some(),
            wardens,
            u_ab: links.bob.direction,
        })
    }

    fn dim(&self) -> usize {
        self.a_b.len()
    }

    /// Ground-station gains toward Bob and each warden.
    pub(crate) fn gains(&self, o: &Vec3) -> Result<(f64, Vec<f64>)> {
        let g_ab = self.sc.alice_gain(o, &self.u_ab)?;
        let g_w = self
            .wardens
            .iter()
            .map(|w| self.sc.alice_gain(o, &w.dir))
            .collect::<Result<Vec<_>>>()?;
        Ok((g_ab, g_w))
    }

    /// Per-unit-power covertness load of warden `j` given its LoS gain
    /// `q = |a_jᴴw|²` (or `Tr(A_j W)` for unit-trace `W`).
    fn covert_load(&self, j: usize, q: f64) -> f64 {
        let d = self.wardens[j].delta;
        if self.robust && d > 0.0 {
            1.0 + 2.0 * self.k * (q + d * d)
        } else {
            1.0 + self.k * q
        }
    }

    /// Largest admissible power for per-warden LoS gains `q`.
    fn max_power(&self, g_w: &[f64], q: &[f64]) -> f64 {
        let mut p = self.p_max;
        for (j, (&g, &qj)) in g_w.iter().zip(q).enumerate() {
            p = p.min(self.wardens[j].eta / (g * self.covert_load(j, qj)));
        }
        p
    }

    /// Guaranteed effective gain per unit power, from `|a_bᴴw|²` (or its
    /// trace analogue) and the squared norm `s` of the beam.
    fn reliability(&self, q_b: f64, s: f64) -> f64 {
        let d = self.delta_b;
        if self.robust && d > 0.0 {
            q_b - 2.0 * d * q_b.max(s) + d * d * s
        } else {
            q_b
        }
    }

    fn rate(&self, g_ab: f64, powered_gain: f64) -> f64 {
        (self.eta_b_unit * g_ab * powered_gain.max(0.0)).ln_1p() / std::f64::consts::LN_2
    }

    fn warden_gains_of(&self, w: &CVec) -> Vec<f64> {
        self.wardens.iter().map(|t| t.a.dotc(w).norm_sqr()).collect()
    }

    fn trace_gain(a: &CVec, x: &CMat) -> f64 {
        (a.adjoint() * x * a)[(0, 0)].re
    }

    /// Relaxed beamforming problem at fixed ground gains, in the variable
    /// `X = Ŵ / P_max`.
    fn sdp(&self, g_w: &[f64]) -> SdpProblem {
        let d = self.delta_b;
        let branches = self.robust && d > 0.0;
        let mut p = if branches {
            SdpProblem::new(self.dim(), HermMat::Zero).with_scalars(vec![1.0])
        } else {
            SdpProblem::new(self.dim(), HermMat::outer(1.0, self.a_b.clone()))
        };
        p = p.with_constraint(Constraint::trace(1.0, Sense::Le, 1.0));
        for (t, &g) in self.wardens.iter().zip(g_w) {
            let s = g * self.p_max / t.eta;
            let (id, c) = if self.robust && t.delta > 0.0 {
                (1.0 + 2.0 * self.k * t.delta * t.delta, 2.0 * self.k)
            } else {
                (1.0, self.k)
            };
            p = p.with_constraint(Constraint::new(
                HermMat::LowRank {
                    identity: s * id,
                    terms: vec![(s * c, t.a.clone())],
                },
                Sense::Le,
                1.0,
            ));
        }
        if branches {
            // −2δ·max(A, B) = min(−2δA, −2δB): both branches must hold.
            for (id, c) in [(d * d, 1.0 - 2.0 * d), (d * d - 2.0 * d, 1.0)] {
                p = p.with_constraint(
                    Constraint::new(
                        HermMat::LowRank {
                            identity: id,
                            terms: vec![(c, self.a_b.clone())],
                        },
                        Sense::Ge,
                        0.0,
                    )
                    .with_scalar(0, -1.0),
                );
            }
        }
        p
    }

    /// Solves the relaxation at orientation `o`; returns the relaxed `Ŵ`
    /// (watts) and its guaranteed effective gain `P·f`.
    fn solve_relaxed(&self, g_w: &[f64], ipm: &IpmOptions, warnings: &mut Vec<String>) -> Result<(CMat, f64, SdpSolution)> {
        let prob = self.sdp(g_w);
        let sol = solve_with(&prob, ipm)?;
        match sol.status {
            SdpStatus::Optimal => {}
            SdpStatus::NumericalLimit => warnings.push(format!(
                "SDP stopped at its numerical limit: {}",
                sol.diagnostics.message
            )),
            SdpStatus::Infeasible => {
                return Err(Error::Infeasible(format!(
                    "relaxed beamforming problem reported infeasible although Ŵ = 0 is feasible ({})",
                    sol.diagnostics.message
                )))
            }
            SdpStatus::Unbounded => {
                return Err(Error::numeric(
                    "beamforming SDP",
                    format!("reported unbounded: {}", sol.diagnostics.message),
                ))
            }
        }
        let w_hat = sol.x_opt.scale(self.p_max);
        let gain = self.p_max * sol.objective_value.max(0.0);
        Ok((w_hat, gain, sol))
    }

    /// Rank-one recovery at fixed gains: best unit beam and its power.
    fn recover(&self, w_hat: &CMat, g_w: &[f64], n_draws: usize, seed: u64) -> Result<(CVec, f64, bool)> {
        let oracle = |cand: &CVec| -> Option<(CVec, f64)> {
            let n = cand.norm();
            if !(n > 0.0) || !n.is_finite() {
                return None;
            }
            let w = cand.unscale(n);
            let p = self.max_power(g_w, &self.warden_gains_of(&w));
            let f = self.reliability(self.a_b.dotc(&w).norm_sqr(), 1.0);
            Some((w, p * f))
        };
        let mut g = rng::stream(seed, 0x5eed_0b);
        let out = gaussian_randomization(w_hat, oracle, n_draws, &mut g)?;
        let w = canonical_phase(out.w);
        let p = self.max_power(g_w, &self.warden_gains_of(&w));
        Ok((w, p, out.rank_one))
    }

    fn relaxed_unit_terms(&self, w_hat: &CMat) -> (f64, Vec<f64>, f64) {
        let tr = w_hat.trace().re;
        let q_w = self
            .wardens
            .iter()
            .map(|t| Self::trace_gain(&t.a, w_hat) / tr)
            .collect();
        let f = self.reliability(Self::trace_gain(&self.a_b, w_hat) / tr, 1.0);
        (tr, q_w, f)
    }

    fn finish(
        &self,
        design: Design,
        w: CVec,
        p: f64,
        boresight: Vec3,
        g_ab: f64,
        solver: SolverMeta,
        seed: u64,
        ch: &Channels,
    ) -> Result<BeamSolution> {
        let f = self.reliability(self.a_b.dotc(&w).norm_sqr(), 1.0);
        let rate = self.rate(g_ab, p * f);
        let mut sol = BeamSolution {
            design,
            robust: self.robust,
            w,
            p_a: p,
            rate,
            boresight,
            feasibility: Feasibility {
                dep_floor_margins: Vec::new(),
                top_value: 0.0,
            },
            solver,
            seed,
        };
        let rep = evaluate_solution(self.sc, self.links, &sol, ch)?;
        sol.feasibility = Feasibility {
            dep_floor_margins: rep.dep_floor_margins,
            top_value: rep.top_value,
        };
        Ok(sol)
    }
}

/// Rotates the global phase so the largest entry is real and positive.
fn canonical_phase(w: CVec) -> CVec {
    let (mut best, mut mag) = (0, -1.0);
    for (i, z) in w.iter().enumerate() {
        if z.norm() > mag * (1.0 + 1e-12) {
            best = i;
            mag = z.norm();
        }
    }
    if mag <= 0.0 {
        return w;
    }
    let ph = w[best].conj() / Complex64::from(mag);
    w * ph
}

fn ob(
    sc: &Scenario,
    links: &ScenarioLinks,
    ch: &Channels,
    robust: Option<&RobustSpec>,
    opts: &OptimizerOptions,
) -> Result<BeamSolution> {
    let setup = Setup::new(sc, links, ch, robust)?;
    let o = links.alice.boresight;
    let (g_ab, g_w) = setup.gains(&o)?;
    let mut warnings = Vec::new();
    let (w_hat, gain, sol) = setup.solve_relaxed(&g_w, &opts.ipm, &mut warnings)?;
    let (w, p, rank_one) = setup.recover(&w_hat, &g_w, opts.n_draws, opts.seed)?;
    let meta = SolverMeta {
        backend: BACKEND.to_string(),
        relaxed_rate: Some(setup.rate(g_ab, gain)),
        rank_one: Some(rank_one),
        sdp_iterations: sol.diagnostics.iterations,
        outer_iterations: 1,
        converged: true,
        objective_history: vec![g_ab * gain],
        warnings,
    };
    setup.finish(Design::Ob, w, p, o, g_ab, meta, opts.seed, ch)
}

/// Optimal beamforming at the default orientation with perfect CSI.
pub fn solve_ob_perfect(
    sc: &Scenario,
    links: &ScenarioLinks,
    ch: &Channels,
    opts: &OptimizerOptions,
) -> Result<BeamSolution> {
    ob(sc, links, ch, None, opts)
}

/// Robust optimal beamforming against bounded errors in `ch`.
pub fn solve_ob_imperfect(
    sc: &Scenario,
    links: &ScenarioLinks,
    ch: &Channels,
    robust: &RobustSpec,
    opts: &OptimizerOptions,
) -> Result<BeamSolution> {
    ob(sc, links, ch, Some(robust), opts)
}

/// Re-evaluates covertness and reliability of `sol` on `ch`, which may
/// differ from the channels the solution was designed on.
pub fn evaluate_solution(
    sc: &Scenario,
    links: &ScenarioLinks,
    sol: &BeamSolution,
    ch: &Channels,
) -> Result<FeasibilityReport> {
    let noise_w = sc.noise_warden()?;
    let noise_b = sc.noise_bob()?;
    let spec = &sc.covert;
    let (bob, wardens) = links.budgets_at(sc, &sol.boresight)?;
    let mut floors = Vec::with_capacity(wardens.len());
    let mut lbs = Vec::with_capacity(wardens.len());
    for ((budget, l), h) in wardens.iter().zip(&links.wardens).zip(&ch.warden_los) {
        let st = warden_stats(budget, h, &l.combiner, &sol.w, sol.p_a, sc.k_factor)?;
        floors.push(dep_floor(&st, &noise_w));
        lbs.push(min_dep_lb(&st, &noise_w).unwrap_or(f64::NAN));
    }
    let margins: Vec<f64> = floors.iter().map(|f| f - (1.0 - spec.epsilon_w)).collect();
    let s_b = crate::covert_analysis::bob_signal_power(sol.p_a, &bob, &ch.h_ab, &sol.w, &links.bob.combiner);
    let top_value = top(sol.rate, s_b, &noise_b);
    let supported_rate =
        crate::covert_analysis::max_rate(sol.p_a, &bob, &ch.h_ab, &sol.w, &links.bob.combiner, spec, &noise_b);
    Ok(FeasibilityReport {
        covert: margins.iter().all(|m| *m >= -AUDIT_TOL),
        reliable: top_value <= spec.epsilon_b + AUDIT_TOL,
        dep_floor: floors,
        dep_floor_margins: margins,
        min_dep_lb: lbs,
        top_value,
        supported_rate,
    })
}
