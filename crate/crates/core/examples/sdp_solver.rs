//! The SDP engine on its own: a small beamforming relaxation with a power
//! budget and one interference cap, rank-one recovery by Gaussian
//! randomization and an SDPA-format dump for external cross-checking.

use num_complex::Complex64;

use covertlink::channel::CVec;
use covertlink::rng;
use covertlink::sdp_engine::{gaussian_randomization, solve, write_sdpa, Constraint, HermMat, SdpProblem, Sense};

fn main() -> covertlink::Result<()> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let a = CVec::from_vec(vec![c(1.0, 0.0), c(0.3, 0.4), c(-0.2, 0.1)]);
    let b = CVec::from_vec(vec![c(0.9, 0.1), c(0.5, -0.2), c(0.0, 0.3)]);

    // max a†Xa  s.t.  Tr X ≤ 1,  b†Xb ≤ 0.05,  X ⪰ 0
    let p = SdpProblem::new(3, HermMat::outer(1.0, a.clone()))
        .with_constraint(Constraint::trace(1.0, Sense::Le, 1.0))
        .with_constraint(Constraint::new(HermMat::outer(1.0, b.clone()), Sense::Le, 0.05));
    let s = solve(&p)?;
    println!("status {:?}, objective {:.6}, {} iterations, gap {:.1e}", s.status, s.objective_value, s.diagnostics.iterations, s.diagnostics.relative_gap);

    let oracle = |w: &CVec| {
        let w = w.unscale(w.norm());
        let leak = b.dotc(&w).norm_sqr();
        let scale = (0.05 / leak).min(1.0);
        Some((w.scale(scale.sqrt()), scale * a.dotc(&w).norm_sqr()))
    };
    let r = gaussian_randomization(&s.x_opt, oracle, 100, &mut rng::stream(7, 0))?;
    println!("recovered beam objective {:.6} (rank one: {})", r.objective, r.rank_one);

    let mut dump = Vec::new();
    write_sdpa(&p, &mut dump)?;
    println!("\nSDPA dump ({} bytes):\n{}", dump.len(), String::from_utf8_lossy(&dump).lines().take(6).collect::<Vec<_>>().join("\n"));
    Ok(())
}
