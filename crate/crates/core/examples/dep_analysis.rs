//! Detection error probability at one warden for the beam pointed at Bob:
//! exact DEP, its closed-form lower bound, the optimal threshold and the
//! floor used by the covertness constraint, across transmit powers.

use covertlink::covert_analysis::{dep, dep_floor, dep_lb, min_dep_lb, optimal_threshold, warden_stats};
use covertlink::linkbudget::dbm_to_watts;
use covertlink::scenario::Scenario;

fn main() -> covertlink::Result<()> {
    let sc = Scenario::default();
    let links = sc.links()?;
    let noise = sc.noise_warden()?;
    let warden = &links.wardens[0];
    let w = links.bob.d_tx.unscale(links.bob.d_tx.norm());

    println!("warden at {}°E, rho = {}", sc.warden_longitudes_deg[0], sc.rho);
    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "P dBm", "floor", "min lb", "tau*/s2", "DEP(tau*)");
    for p_dbm in [0.0, 10.0, 20.0, 30.0, 40.0, 50.0] {
        let st = warden_stats(&warden.budget, &warden.los, &warden.combiner, &w, dbm_to_watts(p_dbm), sc.k_factor)?;
        let tau = optimal_threshold(&st, &noise)?;
        println!(
            "{p_dbm:>8.0} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            dep_floor(&st, &noise),
            min_dep_lb(&st, &noise)?,
            tau / noise.nominal_power,
            dep(&st, &noise, tau)?
        );
    }

    let st = warden_stats(&warden.budget, &warden.los, &warden.combiner, &w, dbm_to_watts(30.0), sc.k_factor)?;
    println!("\nDEP curve at 30 dBm");
    println!("{:>10} {:>10} {:>10}", "tau/s2", "DEP", "lower");
    for i in 0..=10 {
        let tau = noise.lb() + (noise.ub() - noise.lb()) * i as f64 / 10.0;
        println!("{:>10.4} {:>10.4} {:>10.4}", tau / noise.nominal_power, dep(&st, &noise, tau)?, dep_lb(&st, &noise, tau)?);
    }
    Ok(())
}
