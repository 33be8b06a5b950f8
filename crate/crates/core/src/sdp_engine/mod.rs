//! Small complex-Hermitian SDPs, their real embedding, an interior-point
//! backend, Gaussian randomization for rank-one recovery, and an SDPA-format
//! dump for cross-checking against external solvers.
//!
//! ```
//! use covertlink::sdp_engine::{solve, Constraint, HermMat, SdpProblem, SdpStatus, Sense};
//! use covertlink::channel::{CMat, CVec};
//! use num_complex::Complex64;
//!
//! // maximise Tr(diag(1, 2) X) subject to Tr(X) ≤ 1
//! let c = CMat::from_diagonal(&CVec::from_vec(vec![Complex64::from(1.0), Complex64::from(2.0)]));
//! let p = SdpProblem::new(2, HermMat::Dense(c))
//!     .with_constraint(Constraint::trace(1.0, Sense::Le, 1.0));
//! let s = solve(&p).unwrap();
//! assert_eq!(s.status, SdpStatus::Optimal);
//! assert!((s.objective_value - 2.0).abs() < 1e-7);
//! ```

pub mod ipm;
mod randomization;
mod sdpa;

pub use randomization::{gaussian_randomization, RandomizationOutcome, RANK_ONE_RATIO};
pub use sdpa::write_sdpa;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{CMat, CVec};
use crate::error::{Error, Result};
use ipm::{IpmOptions, IpmStatus, RealRow, RealSdp, SymBlock};

const HERMITIAN_TOL: f64 = 1e-12;

/// Hermitian matrix in dense or `αI + Σ c·a a†` form.
#[derive(Debug, Clone, PartialEq)]
pub enum HermMat {
    Zero,
    Dense(CMat),
    LowRank { identity: f64, terms: Vec<(f64, CVec)> },
}

impl HermMat {
    pub fn identity(scale: f64) -> Self {
        HermMat::LowRank {
            identity: scale,
            terms: Vec::new(),
        }
    }

    /// `coef · a a†`.
    pub fn outer(coef: f64, a: CVec) -> Self {
        HermMat::LowRank {
            identity: 0.0,
            terms: vec![(coef, a)],
        }
    }

    pub fn to_dense(&self, n: usize) -> CMat {
        match self {
            HermMat::Zero => CMat::zeros(n, n),
            HermMat::Dense(m) => m.clone(),
            HermMat::LowRank { identity, terms } => {
                let mut m = CMat::identity(n, n) * Complex64::from(*identity);
                for (c, a) in terms {
                    m += a * a.adjoint() * Complex64::from(*c);
                }
                m
            }
        }
    }

    /// `Tr(self · X)` (real for Hermitian arguments).
    pub fn inner(&self, x: &CMat) -> f64 {
        match self {
            HermMat::Zero => 0.0,
            HermMat::Dense(m) => (m * x).trace().re,
            HermMat::LowRank { identity, terms } => {
                let mut s = identity * x.trace().re;
                for (c, a) in terms {
                    s += c * a.dotc(&(x * a)).re;
                }
                s
            }
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        match self {
            HermMat::Dense(m) => {
                if m.nrows() != n || m.ncols() != n {
                    return Err(Error::domain(format!(
                        "matrix is {}×{}, expected {n}×{n}",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                let dev = (m - m.adjoint()).iter().fold(0.0f64, |a, z| a.max(z.norm()));
                let scale = m.iter().fold(1.0f64, |a, z| a.max(z.norm()));
                if dev > HERMITIAN_TOL * scale {
                    return Err(Error::domain(format!("matrix is not Hermitian (deviation {dev:e})")));
                }
            }
            HermMat::LowRank { terms, .. } => {
                if terms.iter().any(|(_, a)| a.len() != n) {
                    return Err(Error::domain("low-rank factor has the wrong length"));
                }
            }
            HermMat::Zero => {}
        }
        Ok(())
    }

    /// Real embedding scaled by ½, so that `⟨embed(A), embed(X)⟩ = Tr(A X)`.
    fn embed_half(&self) -> SymBlock {
        match self {
            HermMat::Zero => SymBlock::Zero,
            HermMat::Dense(m) => SymBlock::Dense(embed_hermitian(m) * 0.5),
            HermMat::LowRank { identity, terms } => {
                let mut t = Vec::with_capacity(2 * terms.len());
                for (c, a) in terms {
                    let n = a.len();
                    let u1 = DVector::from_fn(2 * n, |i, _| if i < n { a[i].re } else { a[i - n].im });
                    let u2 = DVector::from_fn(2 * n, |i, _| if i < n { -a[i].im } else { a[i - n].re });
                    t.push((0.5 * c, u1));
                    t.push((0.5 * c, u2));
                }
                SymBlock::LowRank {
                    identity: 0.5 * identity,
                    terms: t,
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// `Tr(A X) + Σ s_k·t_k  (sense)  bound`, where `t_k ≥ 0` are scalar
/// variables of the problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub matrix: HermMat,
    pub scalars: Vec<(usize, f64)>,
    pub sense: Sense,
    pub bound: f64,
}

impl Constraint {
    pub fn new(matrix: HermMat, sense: Sense, bound: f64) -> Self {
        Self {
            matrix,
            scalars: Vec::new(),
            sense,
            bound,
        }
    }

    /// `scale·Tr(X)  (sense)  bound`.
    pub fn trace(scale: f64, sense: Sense, bound: f64) -> Self {
        Self::new(HermMat::identity(scale), sense, bound)
    }

    pub fn with_scalar(mut self, index: usize, coef: f64) -> Self {
        self.scalars.push((index, coef));
        self
    }
}

/// `maximise Tr(C X) + cᵀt  s.t. constraints, X ⪰ 0, t ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub dim: usize,
    pub objective: HermMat,
    pub objective_scalars: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl SdpProblem {
    pub fn new(dim: usize, objective: HermMat) -> Self {
        Self {
            dim,
            objective,
            objective_scalars: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn with_scalars(mut self, objective_scalars: Vec<f64>) -> Self {
        self.objective_scalars = objective_scalars;
        self
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn n_scalars(&self) -> usize {
        self.objective_scalars.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::domain("SDP dimension must be positive"));
        }
        self.objective.check(self.dim)?;
        for (i, c) in self.constraints.iter().enumerate() {
            c.matrix
                .check(self.dim)
                .map_err(|e| Error::domain(format!("constraint {i}: {e}")))?;
            if c.scalars.iter().any(|(k, _)| *k >= self.n_scalars()) {
                return Err(Error::domain(format!("constraint {i} references a missing scalar")));
            }
            if !c.bound.is_finite() {
                return Err(Error::domain(format!("constraint {i} has a non-finite bound")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub backend: String,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub relative_gap: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub x_opt: CMat,
    pub scalars: Vec<f64>,
    pub objective_value: f64,
    pub status: SdpStatus,
    pub diagnostics: SolverDiagnostics,
}

pub const BACKEND: &str = "internal-ipm-hkm";

/// `[[Re, −Im], [Im, Re]]`.
pub fn embed_hermitian(m: &CMat) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Inverse of [`embed_hermitian`], averaging the redundant copies.
pub fn recover_hermitian(x: &DMatrix<f64>) -> CMat {
    let n = x.nrows() / 2;
    CMat::from_fn(n, n, |i, j| {
        Complex64::new(
            0.5 * (x[(i, j)] + x[(i + n, j + n)]),
            0.5 * (x[(i + n, j)] - x[(i, j + n)]),
        )
    })
}

/// Real standard form of a complex problem: one PSD block of size `2n` and
/// an orthant holding the scalar variables followed by one slack per
/// inequality. The objective is negated (the backend minimises).
pub fn embed_complex(p: &SdpProblem) -> Result<RealSdp> {
    p.validate()?;
    let ns = p.n_scalars();
    let n_slack = p.constraints.iter().filter(|c| c.sense != Sense::Eq).count();
    let lp_dim = ns + n_slack;
    let mut c = p.objective.embed_half();
    c.scale(-1.0);
    let mut c_lp = DVector::zeros(lp_dim);
    for (k, v) in p.objective_scalars.iter().enumerate() {
        c_lp[k] = -v;
    }
    let mut slack = ns;
    let rows = p
        .constraints
        .iter()
        .map(|con| {
            let mut lp = con.scalars.clone();
            match con.sense {
                Sense::Le => {
                    lp.push((slack, 1.0));
                    slack += 1;
                }
                Sense::Ge => {
                    lp.push((slack, -1.0));
                    slack += 1;
                }
                Sense::Eq => {}
            }
            RealRow {
                psd: vec![con.matrix.embed_half()],
                lp,
                b: con.bound,
            }
        })
        .collect();
    Ok(RealSdp {
        psd_dims: vec![2 * p.dim],
        lp_dim,
        c_psd: vec![c],
        c_lp,
        rows,
    })
}

pub fn solve(p: &SdpProblem) -> Result<SdpSolution> {
    solve_with(p, &IpmOptions::default())
}

pub fn solve_with(p: &SdpProblem, opts: &IpmOptions) -> Result<SdpSolution> {
    let real = embed_complex(p)?;
    let res = ipm::solve_real(&real, opts);
    let x_opt = recover_hermitian(&res.x_psd[0]);
    let scalars: Vec<f64> = res.x_lp.iter().take(p.n_scalars()).copied().collect();
    let objective_value = p.objective.inner(&x_opt)
        + scalars
            .iter()
            .zip(&p.objective_scalars)
            .map(|(t, c)| t * c)
            .sum::<f64>();
    let status = match res.status {
        IpmStatus::Optimal => SdpStatus::Optimal,
        IpmStatus::PrimalInfeasible => SdpStatus::Infeasible,
        IpmStatus::DualInfeasible => SdpStatus::Unbounded,
        IpmStatus::NumericalLimit => SdpStatus::NumericalLimit,
    };
    Ok(SdpSolution {
        x_opt,
        scalars,
        objective_value,
        status,
        diagnostics: SolverDiagnostics {
            backend: BACKEND.to_string(),
            iterations: res.iterations,
            primal_residual: res.primal_residual,
            dual_residual: res.dual_residual,
            relative_gap: res.relative_gap,
            message: res.message,
        },
    })
}

/// Eigenvalues of a Hermitian matrix in descending order, with eigenvectors
/// as matching columns.
pub fn hermitian_eigen(x: &CMat) -> (Vec<f64>, CMat) {
    let e = nalgebra::SymmetricEigen::new(x.clone());
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[b].total_cmp(&e.eigenvalues[a]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(x.nrows(), idx.len(), |r, c| e.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> CMat {
        let mut g = rng::stream(seed, 0);
        let a = crate::channel::complex_normal_matrix(n, n, &mut g);
        (&a + a.adjoint()) * c(0.5, 0.0)
    }

    #[test]
    fn embedding_round_trip_and_spectrum() {
        let h = random_hermitian(4, 1);
        let e = embed_hermitian(&h);
        assert!((&e - e.transpose()).amax() < 1e-15);
        assert_abs_diff_eq!((recover_hermitian(&e) - &h).norm(), 0.0, epsilon = 1e-14);
        let (vals, _) = hermitian_eigen(&h);
        let mut ev: Vec<f64> = nalgebra::SymmetricEigen::new(e).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        for (k, v) in vals.iter().enumerate() {
            assert_abs_diff_eq!(ev[2 * k], *v, epsilon = 1e-10);
            assert_abs_diff_eq!(ev[2 * k + 1], *v, epsilon = 1e-10);
        }
        let one = CMat::from_element(1, 1, c(3.0, 0.0));
        assert_eq!(embed_hermitian(&one), DMatrix::identity(2, 2) * 3.0);
        // Trace convention: Tr(X) = ½ Tr(embed(X)).
        assert_abs_diff_eq!(h.trace().re, 0.5 * embed_hermitian(&h).trace(), epsilon = 1e-13);
    }

    #[test]
    fn lowrank_embedding_matches_dense() {
        let a = CVec::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.3), c(0.0, -1.0)]);
        let m = HermMat::LowRank {
            identity: 0.25,
            terms: vec![(2.0, a)],
        };
        let dense = HermMat::Dense(m.to_dense(3));
        let l = m.embed_half().to_dense(6);
        let d = dense.embed_half().to_dense(6);
        assert_abs_diff_eq!((l - d).amax(), 0.0, epsilon = 1e-14);
        let x = random_hermitian(3, 9);
        assert_abs_diff_eq!(m.inner(&x), dense.inner(&x), epsilon = 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = random_hermitian(3, 2);
        m[(0, 1)] += c(0.1, 0.0);
        let p = SdpProblem::new(3, HermMat::Dense(m));
        assert!(solve(&p).is_err());
    }

    #[test]
    fn max_eigenvalue_problem() {
        for seed in 0..5 {
            let h = random_hermitian(5, seed);
            let p = SdpProblem::new(5, HermMat::Dense(h.clone()))
                .with_constraint(Constraint::trace(1.0, Sense::Le, 1.0));
            let s = solve(&p).unwrap();
            let (vals, vecs) = hermitian_eigen(&h);
            assert_eq!(s.status, SdpStatus::Optimal);
            if vals[0] <= 0.0 {
                assert_abs_diff_eq!(s.objective_value, 0.0, epsilon = 1e-7);
                continue;
            }
            assert!((s.objective_value - vals[0]).abs() <= 1e-7 * (1.0 + vals[0].abs()));
            let u = vecs.column(0).into_owned();
            let target = &u * u.adjoint();
            assert!((&s.x_opt - target).norm() < 1e-4);
        }
    }

    #[test]
    fn diagonal_example() {
        let cm = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0)]));
        let p = SdpProblem::new(2, HermMat::Dense(cm)).with_constraint(Constraint::trace(1.0, Sense::Eq, 1.0));
        let s = solve(&p).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert_abs_diff_eq!(s.objective_value, 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(s.x_opt[(1, 1)].re, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(s.x_opt[(0, 0)].re, 0.0, epsilon = 1e-6);
        let (vals, _) = hermitian_eigen(&s.x_opt);
        assert!(vals.iter().all(|v| *v >= -1e-7));
        // Residual of the trace constraint.
        assert!((s.x_opt.trace().re - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn infeasible_pair() {
        let p = SdpProblem::new(2, HermMat::identity(1.0))
            .with_constraint(Constraint::trace(1.0, Sense::Le, 1.0))
            .with_constraint(Constraint::trace(1.0, Sense::Ge, 2.0));
        assert_eq!(solve(&p).unwrap().status, SdpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let p = SdpProblem::new(2, HermMat::identity(1.0))
            .with_constraint(Constraint::trace(1.0, Sense::Ge, 1.0));
        assert_eq!(solve(&p).unwrap().status, SdpStatus::Unbounded);
    }

    #[test]
    fn scalar_variables() {
        // max t  s.t.  Tr(A X) − t ≥ 0,  Tr X ≤ 2  →  t = 2·λmax(A).
        let a = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.5, -0.5)]);
        let p = SdpProblem::new(3, HermMat::Zero)
            .with_scalars(vec![1.0])
            .with_constraint(Constraint::new(HermMat::outer(1.0, a.clone()), Sense::Ge, 0.0).with_scalar(0, -1.0))
            .with_constraint(Constraint::trace(1.0, Sense::Le, 2.0));
        let s = solve(&p).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal);
        assert!((s.objective_value - 2.0 * a.norm_squared()).abs() < 1e-7);
        assert!((s.scalars[0] - s.objective_value).abs() < 1e-12);
    }

    #[test]
    fn deterministic() {
        let h = random_hermitian(4, 3);
        let p = SdpProblem::new(4, HermMat::Dense(h)).with_constraint(Constraint::trace(1.0, Sense::Le, 1.0));
        let a = solve(&p).unwrap();
        let b = solve(&p).unwrap();
        assert_eq!(a.objective_value, b.objective_value);
        assert_eq!(a.x_opt, b.x_opt);
    }
}
