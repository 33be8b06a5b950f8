//! Covert-rate designs on one channel draw: SDR beamforming at the default
//! orientation (OB), joint beam and antenna orientation (JO-BA), and the
//! MRT and zero-forcing baselines.
//!
//! `cargo run --release --example beam_design -- [seed] [m]` uses an m×m
//! ground array (default 4).

use covertlink::channel::{sample_channel_seeded, ArrayConfig};
use covertlink::geometry::off_boresight_angle;
use covertlink::linkbudget::watts_to_dbm;
use covertlink::optimizer::{mrt_baseline, solve_jo_ba_perfect, solve_ob_perfect, zf_baseline, Channels, OptimizerOptions};
use covertlink::scenario::Scenario;

fn main() -> covertlink::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let m: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);

    let sc = Scenario {
        alice_array: ArrayConfig::new(m, m, 0.5)?,
        ..Scenario::default()
    };
    let links = sc.links()?;
    let ch = Channels::new(&links, sample_channel_seeded(&sc.bob_rician(&links), seed, 0).h);
    let opts = OptimizerOptions { seed, ..OptimizerOptions::default() };

    let designs = [
        solve_ob_perfect(&sc, &links, &ch, &opts)?,
        solve_jo_ba_perfect(&sc, &links, &ch, &opts)?,
        mrt_baseline(&sc, &links, &ch)?,
        zf_baseline(&sc, &links, &ch)?,
    ];
    println!("{:>6} {:>12} {:>8} {:>10} {:>12}", "design", "rate b/s/Hz", "P dBm", "theta deg", "min margin");
    for s in &designs {
        let theta = off_boresight_angle(&s.boresight, &links.bob.direction)?;
        let margin = s.feasibility.dep_floor_margins.iter().copied().fold(f64::INFINITY, f64::min);
        println!("{:>6} {:>12.4} {:>8.2} {:>10.4} {:>12.2e}", s.design.name(), s.rate, watts_to_dbm(s.p_a)?, theta, margin);
    }
    let jb = &designs[1];
    println!("\nJO-BA: {} outer iterations, converged: {}", jb.solver.outer_iterations, jb.solver.converged);
    let path = std::env::temp_dir().join("jo_ba_solution.json");
    std::fs::write(&path, jb.to_json()?)?;
    println!("solution record written to {}", path.display());
    Ok(())
}
