//! Geometry and link budget of the reference scenario: one ground station
//! under a GEO satellite at 90°E with four co-orbital wardens.

use covertlink::geometry::off_boresight_angle;
use covertlink::linkbudget::linear_to_dbi;
use covertlink::scenario::Scenario;

fn main() -> covertlink::Result<()> {
    let sc = Scenario::default();
    let links = sc.links()?;
    println!("wavelength {:.4} cm", links.wavelength * 100.0);
    println!("{:>8} {:>12} {:>10} {:>10} {:>10} {:>12}", "lon", "distance km", "theta deg", "G_tx dBi", "G_rx dBi", "path dB");
    let rows = std::iter::once((sc.bob_longitude_deg, &links.bob)).chain(sc.warden_longitudes_deg.iter().copied().zip(&links.wardens));
    for (lon, l) in rows {
        let b = &l.budget;
        let theta = off_boresight_angle(&links.alice.boresight, &l.direction)?;
        println!(
            "{lon:>8.1} {:>12.1} {theta:>10.4} {:>10.2} {:>10.2} {:>12.2}",
            b.distance / 1e3,
            linear_to_dbi(b.g_tx)?,
            linear_to_dbi(b.g_rx)?,
            linear_to_dbi(b.f_path)?,
        );
    }
    Ok(())
}
