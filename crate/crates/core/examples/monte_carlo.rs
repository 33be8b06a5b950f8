//! Monte Carlo checks of the analytic metrics: the warden's DEP curve from
//! the scalar received-power model and from full channel-matrix draws, and
//! the outage probability of an OB design at its rate.

use covertlink::channel::{sample_channel_seeded, ArrayConfig};
use covertlink::linkbudget::dbm_to_watts;
use covertlink::optimizer::{solve_ob_perfect, Channels, OptimizerOptions};
use covertlink::scenario::Scenario;
use covertlink::simkit::{simulate_dep_curve, simulate_dep_curve_matrix, simulate_top, McConfig};

fn main() -> covertlink::Result<()> {
    let sc = Scenario {
        alice_array: ArrayConfig::new(4, 4, 0.5)?,
        ..Scenario::default()
    };
    let links = sc.links()?;
    let noise = sc.noise_warden()?;
    let (a, b) = (0.5 * noise.lb(), 2.0 * noise.ub());
    let taus: Vec<f64> = (0..10).map(|i| a + (b - a) * i as f64 / 9.0).collect();
    let w = links.bob.d_tx.unscale(links.bob.d_tx.norm());
    let o = links.alice.boresight;
    let p = dbm_to_watts(30.0);

    let scalar = simulate_dep_curve(&sc, &links, &o, &w, p, 0, &taus, &McConfig::new(1_000_000, 1))?;
    let matrix = simulate_dep_curve_matrix(&sc, &links, &o, &w, p, 0, &taus, &McConfig::new(100_000, 2))?;
    println!("{:>8} {:>9} {:>9} {:>9} {:>9}", "tau/s2", "analytic", "lower", "scalar", "matrix");
    for (s, m) in scalar.points.iter().zip(&matrix.points) {
        println!("{:>8.3} {:>9.4} {:>9.4} {:>9.4} {:>9.4}", s.tau / noise.nominal_power, s.xi_analytic, s.xi_lb, s.xi_emp, m.xi_emp);
    }
    scalar.write_csv(std::io::sink())?;

    let h = sample_channel_seeded(&sc.bob_rician(&links), 1, 0).h;
    let sol = solve_ob_perfect(&sc, &links, &Channels::new(&links, h.clone()), &OptimizerOptions::default())?;
    let t = simulate_top(&sc, &links, &sol, &h, &McConfig::new(200_000, 3))?;
    println!("\nOB rate {:.4}: outage {:.4} ± {:.4} (analytic {:.4}, target {})", sol.rate, t.zeta, t.se, t.analytic, sc.covert.epsilon_b);
    Ok(())
}
