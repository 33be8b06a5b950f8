//! SDPA sparse text format (`.dat-s`) for the real embedding of a problem.
//!
//! The backend's dual `max bᵀy  s.t.  C − Σ y_i A_i ⪰ 0` is written as the
//! SDPA primal `min cᵀx  s.t.  Σ F_i x_i − F_0 ⪰ 0` with `x = y`, `c = −b`,
//! `F_0 = −C` and `F_i = −A_i`, so the SDPA optimal value equals the
//! complex problem's maximum.

use std::io::Write;

use super::ipm::SymBlock;
use super::{embed_complex, SdpProblem};
use crate::error::Result;

fn write_block<W: Write>(out: &mut W, mat: usize, blk: usize, a: &nalgebra::DMatrix<f64>) -> Result<()> {
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            let v = -a[(i, j)];
            if v != 0.0 {
                writeln!(out, "{mat} {blk} {} {} {v:e}", i + 1, j + 1)?;
            }
        }
    }
    Ok(())
}

fn write_diag<W: Write>(out: &mut W, mat: usize, blk: usize, entries: &[(usize, f64)]) -> Result<()> {
    for (k, v) in entries {
        if *v != 0.0 {
            writeln!(out, "{mat} {blk} {} {} {:e}", k + 1, k + 1, -v)?;
        }
    }
    Ok(())
}

pub fn write_sdpa<W: Write>(p: &SdpProblem, mut out: W) -> Result<()> {
    let real = embed_complex(p)?;
    let n = real.psd_dims[0];
    let has_lp = real.lp_dim > 0;
    writeln!(out, "* real embedding: {}x{} Hermitian, {} scalar(s)", p.dim, p.dim, p.n_scalars())?;
    writeln!(out, "{}", real.rows.len())?;
    writeln!(out, "{}", if has_lp { 2 } else { 1 })?;
    if has_lp {
        writeln!(out, "{} -{}", n, real.lp_dim)?;
    } else {
        writeln!(out, "{n}")?;
    }
    let c: Vec<String> = real.rows.iter().map(|r| format!("{:e}", -r.b)).collect();
    writeln!(out, "{}", c.join(" "))?;
    let dense = |b: &SymBlock| b.to_dense(n);
    write_block(&mut out, 0, 1, &dense(&real.c_psd[0]))?;
    if has_lp {
        let c_lp: Vec<(usize, f64)> = real.c_lp.iter().copied().enumerate().collect();
        write_diag(&mut out, 0, 2, &c_lp)?;
    }
    for (i, row) in real.rows.iter().enumerate() {
        write_block(&mut out, i + 1, 1, &dense(&row.psd[0]))?;
        if has_lp {
            write_diag(&mut out, i + 1, 2, &row.lp)?;
        }
    }
    Ok(())
}
