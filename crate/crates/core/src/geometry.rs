//! Earth-centred geometry for the ground station and the co-orbital GEO
//! satellites: node positions, pointing, off-boresight angles, local array
//! frames and the cone of candidate boresights used by orientation search.
//!
//! Lengths are metres throughout. Angles at the public surface are degrees
//! unless a function name says otherwise.

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

const PARALLEL_TOL: f64 = 1e-8;

/// Position and antenna pointing of one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeGeometry {
    pub position: Vec3,
    /// Unit vector.
    pub boresight: Vec3,
}

impl NodeGeometry {
    /// A node at `position` whose antenna points at `target`.
    pub fn pointing_at(position: Vec3, target: &Vec3) -> Result<Self> {
        let dir = target - position;
        let norm = dir.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::domain("cannot point a node at its own position"));
        }
        Ok(Self {
            position,
            boresight: dir / norm,
        })
    }
}

/// Local frame of a uniform planar array. Elements lie in the local x-z
/// plane; `axis_y` is the boresight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpaFrame {
    pub origin: Vec3,
    pub axis_x: Vec3,
    pub axis_y: Vec3,
    pub axis_z: Vec3,
}

fn check_lat_lon(latitude: f64, longitude: f64) -> Result<()> {
    if !(-90.0..=90.0).contains(&latitude) {
        return Err(Error::domain(format!("latitude {latitude} outside [-90, 90]")));
    }
    if !(-180.0..=180.0).contains(&longitude) {
        return Err(Error::domain(format!(
            "longitude {longitude} outside [-180, 180]"
        )));
    }
    Ok(())
}

/// Earth-station position from geodetic latitude/longitude on a sphere of
/// radius `earth_radius`.
pub fn earth_station_position(latitude: f64, longitude: f64, earth_radius: f64) -> Result<Vec3> {
    check_lat_lon(latitude, longitude)?;
    if !(earth_radius > 0.0) {
        return Err(Error::domain("earth radius must be positive"));
    }
    let (psi, phi) = (latitude.to_radians(), longitude.to_radians());
    Ok(earth_radius * Vec3::new(psi.cos() * phi.cos(), psi.cos() * phi.sin(), psi.sin()))
}

/// Position of a geostationary satellite (equatorial plane) at `longitude`
/// and distance `orbit_radius` from the Earth's centre.
pub fn geo_satellite_position(longitude: f64, orbit_radius: f64) -> Result<Vec3> {
    check_lat_lon(0.0, longitude)?;
    if !(orbit_radius > 0.0) {
        return Err(Error::domain("orbit radius must be positive"));
    }
    let phi = longitude.to_radians();
    Ok(orbit_radius * Vec3::new(phi.cos(), phi.sin(), 0.0))
}

/// Angle in degrees between an antenna boresight and the direction to a
/// target. Neither argument needs to be normalised.
pub fn off_boresight_angle(boresight: &Vec3, target_dir: &Vec3) -> Result<f64> {
    let (nb, nt) = (boresight.norm(), target_dir.norm());
    if nb == 0.0 || nt == 0.0 {
        return Err(Error::domain("off-boresight angle of a zero vector"));
    }
    // atan2 form keeps full precision near 0 and 180 degrees.
    let cross = boresight.cross(target_dir).norm();
    let dot = boresight.dot(target_dir);
    Ok(cross.atan2(dot).to_degrees())
}

/// Unit vector perpendicular to `u`, built from the reference axis z (or x
/// when `u` is parallel to z).
fn perpendicular_seed(u: &Vec3) -> Vec3 {
    let e = Vec3::z();
    let candidate = e - e.dot(u) * u;
    if candidate.norm() >= PARALLEL_TOL {
        return candidate.normalize();
    }
    let e = Vec3::x();
    (e - e.dot(u) * u).normalize()
}

/// Candidate boresights on the cone of half-angle `cone_angle` (degrees)
/// around `u_ab`, generated by rotating a seed vector about `u_ab` with
/// Rodrigues' formula. Rotation parameters are uniform on `[0, 2π)`.
pub fn orientation_candidates(u_ab: &Vec3, cone_angle: f64, n_grid: usize) -> Result<Vec<Vec3>> {
    let thetas: Vec<f64> = (0..n_grid)
        .map(|k| std::f64::consts::TAU * k as f64 / n_grid.max(1) as f64)
        .collect();
    orientation_candidates_at(u_ab, cone_angle, &thetas)
}

/// Same as [`orientation_candidates`] at explicit rotation parameters
/// (radians).
pub fn orientation_candidates_at(u_ab: &Vec3, cone_angle: f64, thetas: &[f64]) -> Result<Vec<Vec3>> {
    let norm = u_ab.norm();
    if norm == 0.0 {
        return Err(Error::domain("cone axis must be nonzero"));
    }
    if thetas.is_empty() {
        return Err(Error::domain("orientation grid must have at least one point"));
    }
    if !(cone_angle > 0.0 && cone_angle < 90.0) {
        return Err(Error::domain(format!(
            "cone angle {cone_angle} outside (0, 90) degrees"
        )));
    }
    let u = u_ab / norm;
    let v_perp = perpendicular_seed(&u);
    let t0 = cone_angle.to_radians();
    let v = t0.cos() * u + t0.sin() * v_perp;
    let u_cross_v = u.cross(&v);
    let u_dot_v = u.dot(&v);
    Ok(thetas
        .iter()
        .map(|&theta| {
            let o = v * theta.cos() + u_cross_v * theta.sin() + u * u_dot_v * (1.0 - theta.cos());
            o.normalize()
        })
        .collect())
}

/// Canonical array frame with `axis_y` on the boresight and `axis_x`
/// horizontal (perpendicular to the Earth's axis) whenever possible.
pub fn upa_frame(node: &NodeGeometry) -> UpaFrame {
    let b = node.boresight.normalize();
    let mut x = b.cross(&Vec3::z());
    if x.norm() < PARALLEL_TOL {
        x = b.cross(&Vec3::x());
    }
    let axis_x = x.normalize();
    let axis_z = axis_x.cross(&b);
    UpaFrame {
        origin: node.position,
        axis_x,
        axis_y: b,
        axis_z,
    }
}

/// Elevation-like and azimuth-like angles (radians) of `target` in the local
/// array frame: `theta = asin(x)`, `phi = atan2(z, y)` of the unit direction.
pub fn aoa_aod_angles(frame: &UpaFrame, target: &Vec3) -> Result<(f64, f64)> {
    let d = target - frame.origin;
    let n = d.norm();
    if n == 0.0 {
        return Err(Error::domain("target coincides with the array origin"));
    }
    let d = d / n;
    let (x, y, z) = (d.dot(&frame.axis_x), d.dot(&frame.axis_y), d.dot(&frame.axis_z));
    let theta = x.clamp(-1.0, 1.0).asin();
    let phi = if y == 0.0 && z == 0.0 { 0.0 } else { z.atan2(y) };
    Ok((theta, phi))
}

/// Unit direction in world coordinates for local angles `(theta, phi)`.
pub fn direction_from_angles(frame: &UpaFrame, theta: f64, phi: f64) -> Vec3 {
    frame.axis_x * theta.sin()
        + frame.axis_y * (theta.cos() * phi.cos())
        + frame.axis_z * (theta.cos() * phi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const KM: f64 = 1e3;

    #[test]
    fn table_defaults_positions() {
        let da = 6378.0 * KM;
        let qa = earth_station_position(0.0, 90.0, da).unwrap();
        assert_abs_diff_eq!(qa.x, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(qa.y, da, epsilon = 1e-6);
        let qb = geo_satellite_position(90.0, da + 36_000.0 * KM).unwrap();
        assert_abs_diff_eq!(qb.y, 42_378.0 * KM, epsilon = 1e-6);
        assert_abs_diff_eq!((qb - qa).norm(), 36_000.0 * KM, epsilon = 1e-6);
        let w = geo_satellite_position(89.0, 1.0).unwrap();
        assert_abs_diff_eq!(w.x, 89f64.to_radians().cos(), epsilon = 1e-15);
        assert_eq!(w.z, 0.0);
    }

    #[test]
    fn pole_and_diagonal() {
        let p = earth_station_position(90.0, 123.0, 5.0).unwrap();
        assert_abs_diff_eq!((p - Vec3::new(0.0, 0.0, 5.0)).norm(), 0.0, epsilon = 1e-12);
        let p = earth_station_position(45.0, 0.0, 1.0).unwrap();
        let h = 0.5f64.sqrt();
        assert_abs_diff_eq!((p - Vec3::new(h, 0.0, h)).norm(), 0.0, epsilon = 1e-15);
        assert!(earth_station_position(91.0, 0.0, 1.0).is_err());
        assert!(earth_station_position(0.0, -181.0, 1.0).is_err());
    }

    #[test]
    fn off_boresight_cases() {
        let o = Vec3::new(0.3, -0.2, 0.9);
        assert_abs_diff_eq!(off_boresight_angle(&o, &o).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(off_boresight_angle(&o, &-o).unwrap(), 180.0, epsilon = 1e-12);
        let a = off_boresight_angle(&Vec3::x(), &Vec3::new(1.0, 1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(a, 45.0, epsilon = 1e-12);
        assert!(off_boresight_angle(&Vec3::zeros(), &o).is_err());
    }

    #[test]
    fn cone_seed_at_zero_rotation() {
        let u = Vec3::new(0.2, 1.0, 0.1).normalize();
        let t0 = 1.0f64;
        let c = orientation_candidates_at(&u, t0, &[0.0]).unwrap();
        let e = Vec3::z();
        let vp = (e - e.dot(&u) * u).normalize();
        let v = t0.to_radians().cos() * u + t0.to_radians().sin() * vp;
        assert_abs_diff_eq!((c[0] - v).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn cone_four_points_distinct() {
        let u = Vec3::y();
        let c = orientation_candidates(&u, 1.0, 4).unwrap();
        assert_eq!(c.len(), 4);
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert!((c[i] - c[j]).norm() > 1e-3);
            }
            assert_abs_diff_eq!(off_boresight_angle(&c[i], &u).unwrap(), 1.0, epsilon = 1e-9);
        }
        // Quarter turns around y starting from +z.
        let s = 1f64.to_radians().sin();
        assert_abs_diff_eq!(c[0].z, s, epsilon = 1e-12);
        assert_abs_diff_eq!(c[2].z, -s, epsilon = 1e-12);
    }

    #[test]
    fn cone_axis_parallel_to_reference_falls_back() {
        let c = orientation_candidates(&Vec3::z(), 5.0, 8).unwrap();
        for o in c {
            assert_abs_diff_eq!(off_boresight_angle(&o, &Vec3::z()).unwrap(), 5.0, epsilon = 1e-9);
        }
        assert!(orientation_candidates(&Vec3::z(), 0.0, 8).is_err());
        assert!(orientation_candidates(&Vec3::z(), 1.0, 0).is_err());
    }

    #[test]
    fn frame_canonical_and_degenerate() {
        let node = NodeGeometry {
            position: Vec3::zeros(),
            boresight: Vec3::y(),
        };
        let f = upa_frame(&node);
        assert_abs_diff_eq!((f.axis_x - Vec3::x()).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((f.axis_z - Vec3::z()).norm(), 0.0, epsilon = 1e-15);

        let node = NodeGeometry {
            position: Vec3::zeros(),
            boresight: Vec3::z(),
        };
        let f = upa_frame(&node);
        assert_abs_diff_eq!(f.axis_x.dot(&f.axis_y), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.axis_x.dot(&f.axis_z), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((f.axis_x.cross(&f.axis_y) - f.axis_z).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn angles_on_boresight_and_in_plane() {
        let node = NodeGeometry {
            position: Vec3::new(1.0, 2.0, 3.0),
            boresight: Vec3::y(),
        };
        let f = upa_frame(&node);
        let (t, p) = aoa_aod_angles(&f, &(node.position + 7.0 * Vec3::y())).unwrap();
        assert_eq!((t, p), (0.0, 0.0));
        let a = 30f64.to_radians();
        let target = node.position + 2.0 * (a.sin() * f.axis_x + a.cos() * f.axis_y);
        let (t, p) = aoa_aod_angles(&f, &target).unwrap();
        assert_abs_diff_eq!(t, a, epsilon = 1e-12);
        assert_abs_diff_eq!(p, 0.0, epsilon = 1e-12);
        assert!(aoa_aod_angles(&f, &node.position).is_err());
    }

    fn unit() -> impl Strategy<Value = Vec3> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 1e-3)
            .prop_map(|(x, y, z)| Vec3::new(x, y, z).normalize())
    }

    proptest! {
        #[test]
        fn frame_is_orthonormal_right_handed(b in unit()) {
            let f = upa_frame(&NodeGeometry { position: Vec3::zeros(), boresight: b });
            prop_assert!(f.axis_x.dot(&f.axis_y).abs() < 1e-12);
            prop_assert!(f.axis_y.dot(&f.axis_z).abs() < 1e-10);
            prop_assert!((f.axis_x.norm() - 1.0).abs() < 1e-12);
            prop_assert!((f.axis_x.cross(&f.axis_y) - f.axis_z).norm() < 1e-10);
        }

        #[test]
        fn angle_round_trip(b in unit(), d in unit()) {
            let f = upa_frame(&NodeGeometry { position: Vec3::new(3.0, -1.0, 2.0), boresight: b });
            let (t, p) = aoa_aod_angles(&f, &(f.origin + 5.0 * d)).unwrap();
            prop_assert!((-std::f64::consts::FRAC_PI_2..=std::f64::consts::FRAC_PI_2).contains(&t));
            let back = direction_from_angles(&f, t, p);
            prop_assert!((back - d).norm() < 1e-10);
            let (t2, p2) = aoa_aod_angles(&f, &(f.origin + back)).unwrap();
            prop_assert!((t2 - t).abs() < 1e-10);
            prop_assert!((p2 - p).abs() < 1e-10 || ((p2 - p).abs() - std::f64::consts::TAU).abs() < 1e-10);
        }

        #[test]
        fn off_boresight_symmetric_and_scale_invariant(a in unit(), b in unit(), s in 0.1..100.0f64) {
            let x = off_boresight_angle(&a, &b).unwrap();
            prop_assert!((x - off_boresight_angle(&b, &a).unwrap()).abs() < 1e-12);
            prop_assert!((x - off_boresight_angle(&(s * a), &b).unwrap()).abs() < 1e-9);
            prop_assert!((0.0..=180.0).contains(&x));
        }

        #[test]
        fn cone_constraint_holds(u in unit(), t0 in 0.05..89.0f64, n in 1usize..50) {
            for o in orientation_candidates(&u, t0, n).unwrap() {
                prop_assert!((off_boresight_angle(&o, &u).unwrap() - t0).abs() <= 1e-9);
                prop_assert!((o.norm() - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn positions_have_requested_radius(lat in -90.0..90.0f64, lon in -180.0..180.0f64, r in 1.0..1e8f64) {
            let p = earth_station_position(lat, lon, r).unwrap();
            prop_assert!(((p.norm() - r) / r).abs() < 1e-9);
            let s = geo_satellite_position(lon, r).unwrap();
            prop_assert!(((s.norm() - r) / r).abs() < 1e-9);
            prop_assert_eq!(s.z, 0.0);
        }
    }
}
