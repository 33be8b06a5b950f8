//! Primal–dual infeasible interior-point method for real block-diagonal
//! SDPs with an additional nonnegative orthant block:
//!
//! ```text
//! minimise   ⟨C, X⟩
//! subject to ⟨A_i, X⟩ = b_i,   X ⪰ 0
//! ```
//!
//! with dual `max bᵀy  s.t.  Σ y_i A_i + Z = C, Z ⪰ 0`. Search directions
//! use the HKM scaling with a Mehrotra predictor–corrector. Constraint
//! matrices may be stored as `αI + Σ c_k u_k u_kᵀ`, which keeps the Schur
//! complement assembly quadratic in the block size.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

// ---------------------------------------------------------------------------
// Data

/// One symmetric block of a constraint or objective matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum SymBlock {
    Zero,
    Dense(DMatrix<f64>),
    /// `identity·I + Σ coef·u uᵀ`.
    LowRank {
        identity: f64,
        terms: Vec<(f64, DVector<f64>)>,
    },
}

impl SymBlock {
    pub fn identity(scale: f64) -> Self {
        SymBlock::LowRank {
            identity: scale,
            terms: Vec::new(),
        }
    }

    /// `⟨self, m⟩ = Tr(self · m)`; `m` need not be symmetric.
    pub fn dot(&self, m: &DMatrix<f64>) -> f64 {
        match self {
            SymBlock::Zero => 0.0,
            SymBlock::Dense(a) => a.dot(m),
            SymBlock::LowRank { identity, terms } => {
                let mut s = if *identity != 0.0 { identity * m.trace() } else { 0.0 };
                for (c, u) in terms {
                    s += c * u.dot(&(m * u));
                }
                s
            }
        }
    }

    pub fn add_to(&self, m: &mut DMatrix<f64>, coef: f64) {
        match self {
            SymBlock::Zero => {}
            SymBlock::Dense(a) => *m += a * coef,
            SymBlock::LowRank { identity, terms } => {
                if *identity != 0.0 {
                    for i in 0..m.nrows() {
                        m[(i, i)] += coef * identity;
                    }
                }
                for (c, u) in terms {
                    m.ger(coef * c, u, u, 1.0);
                }
            }
        }
    }

    pub fn to_dense(&self, n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        self.add_to(&mut m, 1.0);
        m
    }

    pub fn frobenius_sq(&self, n: usize) -> f64 {
        match self {
            SymBlock::Zero => 0.0,
            SymBlock::Dense(a) => a.norm_squared(),
            SymBlock::LowRank { identity, terms } => {
                let mut s = identity * identity * n as f64;
                for (c, u) in terms {
                    s += 2.0 * identity * c * u.norm_squared();
                }
                for (ci, ui) in terms {
                    for (cj, uj) in terms {
                        let d = ui.dot(uj);
                        s += ci * cj * d * d;
                    }
                }
                s.max(0.0)
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        match self {
            SymBlock::Zero => {}
            SymBlock::Dense(a) => *a *= s,
            SymBlock::LowRank { identity, terms } => {
                *identity *= s;
                for t in terms.iter_mut() {
                    t.0 *= s;
                }
            }
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        match self {
            SymBlock::Dense(a) => a.is_square() && (a - a.transpose()).amax() <= tol * (1.0 + a.amax()),
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealRow {
    /// One entry per PSD block.
    pub psd: Vec<SymBlock>,
    /// Sparse coefficients on the nonnegative orthant.
    pub lp: Vec<(usize, f64)>,
    pub b: f64,
}

/// Real standard-form SDP, minimisation.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSdp {
    pub psd_dims: Vec<usize>,
    pub lp_dim: usize,
    pub c_psd: Vec<SymBlock>,
    pub c_lp: DVector<f64>,
    pub rows: Vec<RealRow>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpmOptions {
    pub tol: f64,
    /// Accepted when progress stalls before `tol` is reached.
    pub loose_tol: f64,
    pub max_iter: usize,
    pub step_fraction: f64,
    pub infeasibility_tol: f64,
}

impl Default for IpmOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            loose_tol: 1e-7,
            max_iter: 120,
            step_fraction: 0.95,
            infeasibility_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IpmStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    NumericalLimit,
}

#[derive(Debug, Clone)]
pub struct IpmResult {
    pub status: IpmStatus,
    pub x_psd: Vec<DMatrix<f64>>,
    pub x_lp: DVector<f64>,
    pub y: DVector<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
    /// Relative primal infeasibility `‖b − A(X)‖ / (1 + ‖b‖)`.
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub relative_gap: f64,
    pub message: String,
}

// ---------------------------------------------------------------------------
// Iterate helpers

#[derive(Clone)]
struct Point {
    x: Vec<DMatrix<f64>>,
    xl: DVector<f64>,
    y: DVector<f64>,
    z: Vec<DMatrix<f64>>,
    zl: DVector<f64>,
}

fn inner_blocks(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Largest step `α` with `x + α·dx ⪰ 0`, given a Cholesky factor of `x`.
fn max_step_psd(chol: &Cholesky<f64, nalgebra::Dyn>, dx: &DMatrix<f64>) -> f64 {
    let l = chol.l();
    let mut s = dx.clone();
    l.solve_lower_triangular_mut(&mut s);
    let mut st = s.transpose();
    l.solve_lower_triangular_mut(&mut st);
    symmetrize(&mut st);
    let lmin = SymmetricEigen::new(st).eigenvalues.min();
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

fn max_step_lp(x: &DVector<f64>, dx: &DVector<f64>) -> f64 {
    let mut a = f64::INFINITY;
    for (xi, di) in x.iter().zip(dx.iter()) {
        if *di < 0.0 {
            a = a.min(-xi / di);
        }
    }
    a
}

/// Per-block precomputation for the Schur complement.
struct SchurBlock {
    trace_xzinv: f64,
    /// For dense constraint blocks: `X A Z⁻¹`.
    dense: Vec<Option<DMatrix<f64>>>,
    /// For low-rank constraint blocks: `(X u, Z⁻¹ u)` per term.
    factors: Vec<Vec<(DVector<f64>, DVector<f64>)>>,
}

fn schur_pair(ai: &SymBlock, aj: &SymBlock, i: usize, j: usize, blk: &SchurBlock) -> f64 {
    match (ai, aj) {
        (SymBlock::Zero, _) | (_, SymBlock::Zero) => 0.0,
        (_, SymBlock::Dense(_)) => ai.dot(blk.dense[j].as_ref().expect("dense precomputed")),
        (SymBlock::Dense(_), _) => aj.dot(blk.dense[i].as_ref().expect("dense precomputed")),
        (
            SymBlock::LowRank {
                identity: ai_id,
                terms: ti,
            },
            SymBlock::LowRank {
                identity: aj_id,
                terms: tj,
            },
        ) => {
            let fi = &blk.factors[i];
            let fj = &blk.factors[j];
            let mut s = ai_id * aj_id * blk.trace_xzinv;
            if *ai_id != 0.0 {
                for ((c, _), (xu, zu)) in tj.iter().zip(fj) {
                    s += ai_id * c * xu.dot(zu);
                }
            }
            if *aj_id != 0.0 {
                for ((c, _), (xu, zu)) in ti.iter().zip(fi) {
                    s += aj_id * c * xu.dot(zu);
                }
            }
            for (ci, ui) in ti {
                for ((cj, _), (xu, zu)) in tj.iter().zip(fj) {
                    s += ci * cj * ui.dot(xu) * ui.dot(zu);
                }
            }
            s
        }
    }
}

// ---------------------------------------------------------------------------
// Solver

struct Scaled {
    sdp: RealSdp,
    row_scale: Vec<f64>,
    obj_scale: f64,
}

fn normalise(sdp: &RealSdp) -> Scaled {
    let mut s = sdp.clone();
    let mut row_scale = Vec::with_capacity(s.rows.len());
    for row in s.rows.iter_mut() {
        let mut nsq: f64 = row
            .psd
            .iter()
            .zip(&sdp.psd_dims)
            .map(|(b, &n)| b.frobenius_sq(n))
            .sum();
        nsq += row.lp.iter().map(|(_, v)| v * v).sum::<f64>();
        let d = if nsq > 0.0 { 1.0 / nsq.sqrt() } else { 1.0 };
        for b in row.psd.iter_mut() {
            b.scale(d);
        }
        for e in row.lp.iter_mut() {
            e.1 *= d;
        }
        row.b *= d;
        row_scale.push(d);
    }
    let mut csq: f64 = s
        .c_psd
        .iter()
        .zip(&s.psd_dims)
        .map(|(b, &n)| b.frobenius_sq(n))
        .sum();
    csq += s.c_lp.norm_squared();
    let obj_scale = csq.sqrt().max(1.0);
    for b in s.c_psd.iter_mut() {
        b.scale(1.0 / obj_scale);
    }
    s.c_lp /= obj_scale;
    Scaled {
        sdp: s,
        row_scale,
        obj_scale,
    }
}

struct Residuals {
    rp: DVector<f64>,
    rd: Vec<DMatrix<f64>>,
    rdl: DVector<f64>,
    pobj: f64,
    dobj: f64,
    p_rel: f64,
    d_rel: f64,
    gap_rel: f64,
    mu: f64,
}

struct Solver<'a> {
    p: &'a RealSdp,
    n_total: f64,
    b: DVector<f64>,
    c_dense: Vec<DMatrix<f64>>,
    b_norm: f64,
    c_norm: f64,
}

impl<'a> Solver<'a> {
    fn new(p: &'a RealSdp) -> Self {
        let n_total = (p.psd_dims.iter().sum::<usize>() + p.lp_dim) as f64;
        let b = DVector::from_iterator(p.rows.len(), p.rows.iter().map(|r| r.b));
        let c_dense: Vec<_> = p
            .c_psd
            .iter()
            .zip(&p.psd_dims)
            .map(|(c, &n)| c.to_dense(n))
            .collect();
        let c_norm = (c_dense.iter().map(|c| c.norm_squared()).sum::<f64>() + p.c_lp.norm_squared()).sqrt();
        let b_norm = b.norm();
        Self {
            p,
            n_total,
            b,
            c_dense,
            b_norm,
            c_norm,
        }
    }

    fn a_of(&self, x: &[DMatrix<f64>], xl: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.p.rows.len(),
            self.p.rows.iter().map(|r| {
                let mut s: f64 = r.psd.iter().zip(x).map(|(a, m)| a.dot(m)).sum();
                for (k, v) in &r.lp {
                    s += v * xl[*k];
                }
                s
            }),
        )
    }

    fn at_of(&self, y: &DVector<f64>) -> (Vec<DMatrix<f64>>, DVector<f64>) {
        let mut m: Vec<_> = self.p.psd_dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        let mut l = DVector::zeros(self.p.lp_dim);
        for (r, yi) in self.p.rows.iter().zip(y.iter()) {
            for (blk, a) in m.iter_mut().zip(&r.psd) {
                a.add_to(blk, *yi);
            }
            for (k, v) in &r.lp {
                l[*k] += v * yi;
            }
        }
        (m, l)
    }

    fn residuals(&self, pt: &Point) -> Residuals {
        let ax = self.a_of(&pt.x, &pt.xl);
        let rp = &self.b - ax;
        let (aty, atyl) = self.at_of(&pt.y);
        let rd: Vec<_> = self
            .c_dense
            .iter()
            .zip(&pt.z)
            .zip(&aty)
            .map(|((c, z), a)| c - z - a)
            .collect();
        let rdl = &self.p.c_lp - &pt.zl - atyl;
        let pobj = inner_blocks(&self.c_dense, &pt.x) + self.p.c_lp.dot(&pt.xl);
        let dobj = self.b.dot(&pt.y);
        let rd_norm = (rd.iter().map(|m| m.norm_squared()).sum::<f64>() + rdl.norm_squared()).sqrt();
        let xz = inner_blocks(&pt.x, &pt.z) + pt.xl.dot(&pt.zl);
        Residuals {
            p_rel: rp.norm() / (1.0 + self.b_norm),
            d_rel: rd_norm / (1.0 + self.c_norm),
            gap_rel: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
            mu: xz / self.n_total,
            rp,
            rd,
            rdl,
            pobj,
            dobj,
        }
    }

    fn solve(&self, opts: &IpmOptions) -> IpmResult {
        let p = self.p;
        let m = p.rows.len();
        let nt = self.n_total;
        let max_b = self.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let xi0 = 10f64.max(nt.sqrt()).max(nt.sqrt() * (1.0 + max_b) / 2.0);
        let zeta0 = 10f64.max(nt.sqrt()).max(self.c_norm);
        let mut pt = Point {
            x: p.psd_dims.iter().map(|&n| DMatrix::identity(n, n) * xi0).collect(),
            xl: DVector::from_element(p.lp_dim, xi0),
            y: DVector::zeros(m),
            z: p.psd_dims.iter().map(|&n| DMatrix::identity(n, n) * zeta0).collect(),
            zl: DVector::from_element(p.lp_dim, zeta0),
        };

        let mut best: Option<(f64, Point)> = None;
        let mut message = String::new();
        let mut status = IpmStatus::NumericalLimit;
        let mut iterations = 0;
        let mut stall = 0;

        for it in 0..opts.max_iter {
            iterations = it;
            let r = self.residuals(&pt);
            let merit = r.p_rel.max(r.d_rel).max(r.gap_rel);
            if best.as_ref().is_none_or(|(bm, _)| merit < *bm) {
                best = Some((merit, pt.clone()));
                stall = 0;
            } else {
                stall += 1;
            }
            if merit <= opts.tol {
                status = IpmStatus::Optimal;
                break;
            }
            // Infeasibility certificates from diverging objectives.
            if r.dobj > 0.0 && r.p_rel > opts.tol {
                let (aty, atyl) = self.at_of(&pt.y);
                let ray = (aty.iter().zip(&pt.z).map(|(a, z)| (a + z).norm_squared()).sum::<f64>()
                    + (&atyl + &pt.zl).norm_squared())
                .sqrt();
                if ray / r.dobj < opts.infeasibility_tol {
                    status = IpmStatus::PrimalInfeasible;
                    message = format!("dual ray with bᵀy = {:.3e}", r.dobj);
                    break;
                }
            }
            if r.pobj < 0.0 && r.d_rel > opts.tol {
                let ax = self.a_of(&pt.x, &pt.xl);
                if ax.norm() / (-r.pobj) < opts.infeasibility_tol {
                    status = IpmStatus::DualInfeasible;
                    message = format!("primal ray with ⟨C,X⟩ = {:.3e}", r.pobj);
                    break;
                }
            }
            if stall > 15 {
                message = "no progress in 15 iterations".into();
                break;
            }

            match self.step(&mut pt, &r, opts) {
                Ok(()) => {}
                Err(e) => {
                    message = e;
                    break;
                }
            }
            if it + 1 == opts.max_iter {
                message = format!("iteration limit {} reached", opts.max_iter);
            }
        }

        if status == IpmStatus::NumericalLimit {
            if let Some((merit, bp)) = best.take() {
                pt = bp;
                if merit <= opts.loose_tol {
                    status = IpmStatus::Optimal;
                }
            }
        }
        let r = self.residuals(&pt);
        IpmResult {
            status,
            x_psd: pt.x,
            x_lp: pt.xl,
            y: pt.y,
            primal_objective: r.pobj,
            dual_objective: r.dobj,
            iterations,
            primal_residual: r.p_rel,
            dual_residual: r.d_rel,
            relative_gap: r.gap_rel,
            message,
        }
    }

    fn step(&self, pt: &mut Point, r: &Residuals, opts: &IpmOptions) -> std::result::Result<(), String> {
        let p = self.p;
        let m = p.rows.len();
        let nb = p.psd_dims.len();

        let xchol: Vec<_> = pt
            .x
            .iter()
            .map(|x| Cholesky::new(x.clone()))
            .collect::<Option<Vec<_>>>()
            .ok_or("primal iterate lost definiteness")?;
        let zchol: Vec<_> = pt
            .z
            .iter()
            .map(|z| Cholesky::new(z.clone()))
            .collect::<Option<Vec<_>>>()
            .ok_or("dual iterate lost definiteness")?;
        let zinv: Vec<DMatrix<f64>> = zchol
            .iter()
            .map(|c| {
                let mut i = c.inverse();
                symmetrize(&mut i);
                i
            })
            .collect();

        // Schur complement.
        let blocks: Vec<SchurBlock> = (0..nb)
            .map(|b| {
                let x = &pt.x[b];
                let zi = &zinv[b];
                let mut dense = Vec::with_capacity(m);
                let mut factors = Vec::with_capacity(m);
                for row in &p.rows {
                    match &row.psd[b] {
                        SymBlock::Dense(a) => {
                            dense.push(Some(x * a * zi));
                            factors.push(Vec::new());
                        }
                        SymBlock::LowRank { terms, .. } => {
                            dense.push(None);
                            factors.push(terms.iter().map(|(_, u)| (x * u, zi * u)).collect());
                        }
                        SymBlock::Zero => {
                            dense.push(None);
                            factors.push(Vec::new());
                        }
                    }
                }
                SchurBlock {
                    trace_xzinv: x.dot(zi),
                    dense,
                    factors,
                }
            })
            .collect();
        let lp_ratio = pt.xl.component_div(&pt.zl);
        let mut schur = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let mut s = 0.0;
                for (b, blk) in blocks.iter().enumerate() {
                    s += schur_pair(&p.rows[i].psd[b], &p.rows[j].psd[b], i, j, blk);
                }
                for (ki, vi) in &p.rows[i].lp {
                    for (kj, vj) in &p.rows[j].lp {
                        if ki == kj {
                            s += vi * vj * lp_ratio[*ki];
                        }
                    }
                }
                schur[(i, j)] = s;
                schur[(j, i)] = s;
            }
        }
        let diag_max = schur.diagonal().amax().max(1e-300);
        let factor = match Cholesky::new(schur.clone()) {
            Some(c) => c,
            None => {
                let mut reg = schur.clone();
                for i in 0..m {
                    reg[(i, i)] += 1e-13 * diag_max;
                }
                Cholesky::new(reg).ok_or("Schur complement is singular")?
            }
        };

        // Terms shared by predictor and corrector: A(X R_d Z⁻¹).
        let xrdz: Vec<DMatrix<f64>> = (0..nb).map(|b| &pt.x[b] * &r.rd[b] * &zinv[b]).collect();
        let xrdzl = pt.xl.component_mul(&r.rdl).component_div(&pt.zl);
        let a_xrdz = self.a_of(&xrdz, &xrdzl);

        // Direction for a given `R_c Z⁻¹` (blocks and orthant).
        let direction = |rcz: &[DMatrix<f64>], rczl: &DVector<f64>| {
            let rhs = &r.rp - self.a_of(rcz, rczl) + &a_xrdz;
            let dy = factor.solve(&rhs);
            let (atdy, atdyl) = self.at_of(&dy);
            let dz: Vec<DMatrix<f64>> = (0..nb).map(|b| &r.rd[b] - &atdy[b]).collect();
            let dzl = &r.rdl - atdyl;
            let dx: Vec<DMatrix<f64>> = (0..nb)
                .map(|b| {
                    let mut d = &rcz[b] - &pt.x[b] * &dz[b] * &zinv[b];
                    symmetrize(&mut d);
                    d
                })
                .collect();
            let dxl = rczl - pt.xl.component_mul(&dzl).component_div(&pt.zl);
            (dx, dxl, dy, dz, dzl)
        };
        let steps = |dx: &[DMatrix<f64>], dxl: &DVector<f64>, dz: &[DMatrix<f64>], dzl: &DVector<f64>| {
            let mut ap = max_step_lp(&pt.xl, dxl);
            let mut ad = max_step_lp(&pt.zl, dzl);
            for b in 0..nb {
                ap = ap.min(max_step_psd(&xchol[b], &dx[b]));
                ad = ad.min(max_step_psd(&zchol[b], &dz[b]));
            }
            (ap, ad)
        };

        // Predictor: R_c = −XZ, so R_c Z⁻¹ = −X.
        let neg_x: Vec<DMatrix<f64>> = pt.x.iter().map(|x| -x).collect();
        let neg_xl = -&pt.xl;
        let (dx_a, dxl_a, _, dz_a, dzl_a) = direction(&neg_x, &neg_xl);
        let (ap, ad) = steps(&dx_a, &dxl_a, &dz_a, &dzl_a);
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mut xz_aff = 0.0;
        for b in 0..nb {
            xz_aff += (&pt.x[b] + &dx_a[b] * ap).dot(&(&pt.z[b] + &dz_a[b] * ad));
        }
        xz_aff += (&pt.xl + &dxl_a * ap).dot(&(&pt.zl + &dzl_a * ad));
        let mu_aff = (xz_aff / self.n_total).max(0.0);
        let sigma = if r.mu > 0.0 { (mu_aff / r.mu).powi(3).min(1.0) } else { 0.0 };

        // Corrector: R_c Z⁻¹ = σμZ⁻¹ − X − dX_a dZ_a Z⁻¹.
        let sm = sigma * r.mu;
        let rcz: Vec<DMatrix<f64>> = (0..nb)
            .map(|b| &zinv[b] * sm - &pt.x[b] - &dx_a[b] * &dz_a[b] * &zinv[b])
            .collect();
        let rczl = pt.zl.map(|z| sm / z) - &pt.xl - dxl_a.component_mul(&dzl_a).component_div(&pt.zl);
        let (dx, dxl, dy, dz, dzl) = direction(&rcz, &rczl);
        let (ap, ad) = steps(&dx, &dxl, &dz, &dzl);
        let ap = (opts.step_fraction * ap).min(1.0);
        let ad = (opts.step_fraction * ad).min(1.0);
        if !(ap.is_finite() && ad.is_finite()) || ap < 1e-14 && ad < 1e-14 {
            return Err(format!("step length collapsed (primal {ap:e}, dual {ad:e})"));
        }
        for b in 0..nb {
            pt.x[b] += &dx[b] * ap;
            pt.z[b] += &dz[b] * ad;
            symmetrize(&mut pt.x[b]);
            symmetrize(&mut pt.z[b]);
        }
        pt.xl += dxl * ap;
        pt.zl += dzl * ad;
        pt.y += dy * ad;
        Ok(())
    }
}

/// Solves a real block SDP (minimisation).
pub fn solve_real(sdp: &RealSdp, opts: &IpmOptions) -> IpmResult {
    let scaled = normalise(sdp);
    let solver = Solver::new(&scaled.sdp);
    let mut res = solver.solve(opts);
    // Undo the scaling: y_i = y'_i·d_i·s, objectives ×s.
    for (yi, d) in res.y.iter_mut().zip(&scaled.row_scale) {
        *yi *= d * scaled.obj_scale;
    }
    res.primal_objective *= scaled.obj_scale;
    res.dual_objective *= scaled.obj_scale;
    res
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lowrank_dense_agree(a: &SymBlock, n: usize) {
        let d = a.to_dense(n);
        let m = DMatrix::from_fn(n, n, |i, j| (i as f64 + 1.0) * 0.3 - j as f64 * 0.7);
        assert!((a.dot(&m) - d.dot(&m)).abs() < 1e-12);
        assert!((a.frobenius_sq(n) - d.norm_squared()).abs() < 1e-10);
    }

    #[test]
    fn block_algebra() {
        let u = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let v = DVector::from_vec(vec![0.0, 1.0, 3.0]);
        lowrank_dense_agree(
            &SymBlock::LowRank {
                identity: 0.7,
                terms: vec![(2.0, u), (-0.5, v)],
            },
            3,
        );
        lowrank_dense_agree(&SymBlock::identity(1.0), 4);
    }

    #[test]
    fn schur_pairs_match_dense() {
        let n = 4;
        let x = DMatrix::from_fn(n, n, |i, j| if i == j { 2.0 } else { 0.1 * (i + j) as f64 });
        let zi = DMatrix::from_fn(n, n, |i, j| if i == j { 1.5 } else { -0.05 * (i * j) as f64 });
        let a1 = SymBlock::LowRank {
            identity: 0.3,
            terms: vec![(1.0, DVector::from_vec(vec![1.0, 0.0, 2.0, -1.0]))],
        };
        let a2 = SymBlock::LowRank {
            identity: -1.0,
            terms: vec![(0.4, DVector::from_vec(vec![0.5, 0.5, 0.0, 1.0]))],
        };
        let a3 = SymBlock::Dense(a2.to_dense(n) + DMatrix::identity(n, n));
        let rows = [a1, a2, a3];
        let mut dense = Vec::new();
        let mut factors = Vec::new();
        for r in &rows {
            match r {
                SymBlock::Dense(a) => {
                    dense.push(Some(&x * a * &zi));
                    factors.push(Vec::new());
                }
                SymBlock::LowRank { terms, .. } => {
                    dense.push(None);
                    factors.push(terms.iter().map(|(_, u)| (&x * u, &zi * u)).collect());
                }
                SymBlock::Zero => unreachable!(),
            }
        }
        let blk = SchurBlock {
            trace_xzinv: x.dot(&zi),
            dense,
            factors,
        };
        for i in 0..3 {
            for j in 0..3 {
                let want = (rows[i].to_dense(n) * &x * rows[j].to_dense(n) * &zi).trace();
                let got = schur_pair(&rows[i], &rows[j], i, j, &blk);
                assert!((want - got).abs() < 1e-12, "({i},{j}): {got} vs {want}");
            }
        }
    }
}
