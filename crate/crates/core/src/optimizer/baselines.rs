//! Maximum-ratio and zero-forcing beams at the largest covert power.

use num_complex::Complex64;

use super::{canonical_phase, BeamSolution, Channels, Design, Setup, SolverMeta};
use crate::channel::{CMat, CVec};
use crate::error::{Error, Result};
use crate::scenario::{Scenario, ScenarioLinks};

/// Relative singular-value cutoff for the warden row space.
const RANK_TOL: f64 = 1e-10;

fn at_max_power(
    setup: &Setup,
    design: Design,
    w: CVec,
    links: &ScenarioLinks,
    ch: &Channels,
    meta: SolverMeta,
) -> Result<BeamSolution> {
    let o = links.alice.boresight;
    let (g_ab, g_w) = setup.gains(&o)?;
    let p = setup.max_power(&g_w, &setup.warden_gains_of(&w));
    setup.finish(design, w, p, o, g_ab, meta, 0, ch)
}

/// Matched filter `w ∝ H_abᴴ v_b`.
pub fn mrt_baseline(sc: &Scenario, links: &ScenarioLinks, ch: &Channels) -> Result<BeamSolution> {
    let setup = Setup::new(sc, links, ch, None)?;
    let n = setup.a_b.norm();
    if !(n > 0.0) {
        return Err(Error::domain("Bob's effective channel is zero"));
    }
    let w = canonical_phase(setup.a_b.unscale(n));
    at_max_power(&setup, Design::Mrt, w, links, ch, SolverMeta::closed_form())
}

/// Matched filter projected onto the null space of the warden LoS rows.
pub fn zf_baseline(sc: &Scenario, links: &ScenarioLinks, ch: &Channels) -> Result<BeamSolution> {
    let setup = Setup::new(sc, links, ch, None)?;
    let m_a = setup.dim();
    let n_w = setup.wardens.len();
    if n_w >= m_a {
        return Err(Error::domain(format!(
            "zero forcing needs fewer wardens ({n_w}) than transmit antennas ({m_a})"
        )));
    }
    let a = CMat::from_columns(&setup.wardens.iter().map(|t| t.a.clone()).collect::<Vec<_>>());
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let basis: Vec<CVec> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > RANK_TOL * smax)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    let project = |x: &CVec| -> CVec {
        let mut y = x.clone();
        for q in &basis {
            let c: Complex64 = q.dotc(&y);
            y -= q * c;
        }
        y
    };
    let mut meta = SolverMeta::closed_form();
    let mut w = project(&setup.a_b);
    if !(w.norm() > RANK_TOL * setup.a_b.norm().max(1.0)) {
        // Bob lies in the warden span: any null-space direction gives zero rate.
        meta.warnings
            .push("Bob's channel lies in the span of the warden rows".to_string());
        w = (0..m_a)
            .map(|i| project(&CVec::from_fn(m_a, |r, _| Complex64::from(f64::from(u8::from(r == i))))))
            .max_by(|x, y| x.norm().total_cmp(&y.norm()))
            .expect("m_a > 0");
        if !(w.norm() > RANK_TOL) {
            return Err(Error::domain("warden rows span the whole transmit space"));
        }
    }
    let n = w.norm();
    let w = canonical_phase(w.unscale(n));
    at_max_power(&setup, Design::Zf, w, links, ch, meta)
}
