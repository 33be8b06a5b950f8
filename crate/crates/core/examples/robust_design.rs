//! Designs robust to bounded channel-estimation errors, audited against
//! sampled errors on the boundary of the uncertainty set.
//!
//! `cargo run --release --example robust_design -- [delta]`

use covertlink::channel::{perturb_channel, sample_channel_seeded, ArrayConfig};
use covertlink::optimizer::{evaluate_solution, solve_jo_ba_imperfect, solve_ob_imperfect, solve_ob_perfect, Channels, OptimizerOptions, RobustSpec};
use covertlink::rng;
use covertlink::scenario::Scenario;

fn main() -> covertlink::Result<()> {
    let delta: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let sc = Scenario {
        alice_array: ArrayConfig::new(4, 4, 0.5)?,
        ..Scenario::default()
    };
    let links = sc.links()?;
    let est = Channels::new(&links, sample_channel_seeded(&sc.bob_rician(&links), 3, 0).h);
    let opts = OptimizerOptions::default();
    let robust = RobustSpec::uniform(delta, links.wardens.len())?;

    let nominal = solve_ob_perfect(&sc, &links, &est, &opts)?;
    let designs = [
        ("OB perfect", nominal),
        ("OB robust", solve_ob_imperfect(&sc, &links, &est, &robust, &opts)?),
        ("JO-BA robust", solve_jo_ba_imperfect(&sc, &links, &est, &robust, &opts)?),
    ];
    println!("delta = {delta}, 1000 boundary perturbations per design");
    println!("{:>13} {:>8} {:>12} {:>9} {:>9}", "design", "rate", "min margin", "covert", "reliable");
    let mut g = rng::stream(11, 0);
    for (name, sol) in &designs {
        let (mut worst, mut covert, mut reliable) = (f64::INFINITY, 0, 0);
        for _ in 0..1000 {
            let truth = Channels {
                h_ab: perturb_channel(&est.h_ab, delta, true, &mut g)?,
                warden_los: est.warden_los.iter().map(|h| perturb_channel(h, delta, true, &mut g)).collect::<covertlink::Result<_>>()?,
            };
            let rep = evaluate_solution(&sc, &links, sol, &truth)?;
            worst = rep.dep_floor_margins.iter().copied().fold(worst, f64::min);
            covert += usize::from(rep.covert);
            reliable += usize::from(rep.reliable);
        }
        println!("{name:>13} {:>8.4} {worst:>12.2e} {covert:>9} {reliable:>9}", sol.rate);
    }
    Ok(())
}
