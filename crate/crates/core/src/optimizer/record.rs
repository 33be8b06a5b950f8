//! JSON form of a [`BeamSolution`]; the beam is stored as interleaved
//! real/imaginary parts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BeamSolution, Design, Feasibility, SolverMeta};
use crate::channel::CVec;
use crate::error::{Error, Result};
use crate::geometry::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub design: Design,
    pub robust: bool,
    pub w: Vec<f64>,
    pub p_a: f64,
    pub rate: f64,
    pub boresight: [f64; 3],
    pub margins: Vec<f64>,
    pub top_value: f64,
    pub solver: SolverMeta,
    pub seed: u64,
}

impl From<&BeamSolution> for SolutionRecord {
    fn from(s: &BeamSolution) -> Self {
        Self {
            design: s.design,
            robust: s.robust,
            w: s.w.iter().flat_map(|z| [z.re, z.im]).collect(),
            p_a: s.p_a,
            rate: s.rate,
            boresight: [s.boresight.x, s.boresight.y, s.boresight.z],
            margins: s.feasibility.dep_floor_margins.clone(),
            top_value: s.feasibility.top_value,
            solver: s.solver.clone(),
            seed: s.seed,
        }
    }
}

impl TryFrom<SolutionRecord> for BeamSolution {
    type Error = Error;
    fn try_from(r: SolutionRecord) -> Result<Self> {
        if r.w.len() % 2 != 0 || r.w.is_empty() {
            return Err(Error::domain("beam must hold an even, nonzero number of reals"));
        }
        let w = CVec::from_iterator(r.w.len() / 2, r.w.chunks(2).map(|c| Complex64::new(c[0], c[1])));
        Ok(BeamSolution {
            design: r.design,
            robust: r.robust,
            w,
            p_a: r.p_a,
            rate: r.rate,
            boresight: Vec3::new(r.boresight[0], r.boresight[1], r.boresight[2]),
            feasibility: Feasibility {
                dep_floor_margins: r.margins,
                top_value: r.top_value,
            },
            solver: r.solver,
            seed: r.seed,
        })
    }
}

impl BeamSolution {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SolutionRecord::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<SolutionRecord>(s)?.try_into()
    }
}
