//! Gaussian randomization: rank-one candidates drawn from `CN(0, X)`.

use num_complex::Complex64;
use rand::Rng;

use super::hermitian_eigen;
use crate::channel::{complex_normal, CMat, CVec};
use crate::error::{Error, Result};

/// Below this `λ₂/λ₁` ratio the relaxed optimum is treated as rank one.
pub const RANK_ONE_RATIO: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct RandomizationOutcome {
    /// Best candidate after the oracle's feasibility scaling.
    pub w: CVec,
    pub objective: f64,
    pub rank_one: bool,
    /// Index of the winning candidate (0 is the principal eigenvector).
    pub best_index: usize,
    pub feasible_candidates: usize,
}

/// Evaluates the principal eigenvector `√λ₁u₁` and, unless `x_opt` is
/// numerically rank one, `n_draws` samples `ξ ~ CN(0, x_opt)`. The oracle
/// maps a candidate to its feasible rescaling and objective, or `None` if
/// it cannot be made feasible. Ties keep the earliest candidate.
pub fn gaussian_randomization<F, R>(
    x_opt: &CMat,
    oracle: F,
    n_draws: usize,
    rng: &mut R,
) -> Result<RandomizationOutcome>
where
    F: Fn(&CVec) -> Option<(CVec, f64)>,
    R: Rng + ?Sized,
{
    let (vals, vecs) = hermitian_eigen(x_opt);
    let n = x_opt.nrows();
    let l1 = vals.first().copied().unwrap_or(0.0);
    if !(l1 > 0.0) {
        return Err(Error::numeric(
            "gaussian randomization",
            format!("relaxed solution has no positive eigenvalue (λ₁ = {l1:e})"),
        ));
    }
    let rank_one = vals.get(1).is_none_or(|l2| l2.max(0.0) / l1 < RANK_ONE_RATIO);

    let mut best: Option<(CVec, f64, usize)> = None;
    let mut feasible = 0;
    let mut consider = |cand: &CVec, idx: usize, best: &mut Option<(CVec, f64, usize)>| {
        if let Some((w, obj)) = oracle(cand) {
            if obj.is_finite() {
                feasible += 1;
                if best.as_ref().is_none_or(|b| obj > b.1) {
                    *best = Some((w, obj, idx));
                }
            }
        }
    };
    let principal: CVec = vecs.column(0).into_owned() * Complex64::from(l1.sqrt());
    consider(&principal, 0, &mut best);

    if !rank_one {
        let sqrt_vals: Vec<f64> = vals.iter().map(|v| v.max(0.0).sqrt()).collect();
        for k in 0..n_draws {
            let r = CVec::from_fn(n, |i, _| complex_normal(rng) * sqrt_vals[i]);
            let cand = &vecs * r;
            consider(&cand, k + 1, &mut best);
        }
    }
    match best {
        Some((w, objective, best_index)) => Ok(RandomizationOutcome {
            w,
            objective,
            rank_one,
            best_index,
            feasible_candidates: feasible,
        }),
        None => Err(Error::numeric(
            "gaussian randomization",
            format!(
                "no feasible candidate among {} (λ₁ = {l1:e}, rank one: {rank_one})",
                if rank_one { 1 } else { n_draws + 1 }
            ),
        )),
    }
}
