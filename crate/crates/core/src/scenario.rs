//! Full system description and the per-link models derived from it.
//!
//! Satellites (Bob and every warden) point their antennas at the ground
//! station. The ground station's array frame is fixed by its default
//! boresight toward Bob; re-orienting the antenna changes only the pattern
//! gains, never the steering vectors.

use serde::{Deserialize, Serialize};

use crate::channel::{
    earth_station_steering, los_egc_vector, los_matrix, satellite_steering, ArrayConfig, CMat, CVec,
    RicianModel,
};
use crate::covert_analysis::{CovertSpec, NoiseUncertainty};
use crate::error::{Error, Result};
use crate::geometry::{
    aoa_aod_angles, earth_station_position, geo_satellite_position, off_boresight_angle, upa_frame,
    NodeGeometry, Vec3,
};
use crate::linkbudget::{
    build_link_budget, dbi_to_linear, dbm_to_watts, earth_station_gain_dbi, wavelength,
    EarthStationPattern, LinkBudget, SatellitePattern,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub frequency_hz: f64,
    pub earth_radius_m: f64,
    pub altitude_m: f64,
    pub alice_latitude_deg: f64,
    pub alice_longitude_deg: f64,
    pub bob_longitude_deg: f64,
    pub warden_longitudes_deg: Vec<f64>,
    pub earth_station: EarthStationPattern,
    pub satellite: SatellitePattern,
    pub alice_array: ArrayConfig,
    pub satellite_array: ArrayConfig,
    pub p_max_w: f64,
    pub noise_bob_w: f64,
    pub noise_warden_w: f64,
    pub rho: f64,
    pub k_factor: f64,
    pub covert: CovertSpec,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            frequency_hz: 18e9,
            earth_radius_m: 6378e3,
            altitude_m: 36_000e3,
            alice_latitude_deg: 0.0,
            alice_longitude_deg: 90.0,
            bob_longitude_deg: 90.0,
            warden_longitudes_deg: vec![92.0, 91.0, 89.0, 88.0],
            earth_station: EarthStationPattern {
                g_max_dbi: 32.0,
                theta0_deg: 1.0,
            },
            satellite: SatellitePattern {
                g_max_dbi: 32.0,
                phi_3db_deg: 0.4,
                alpha: 1.5,
                beta: 2.5,
                l_s_db: -6.75,
                l_f_dbi: 0.0,
            },
            alice_array: ArrayConfig {
                m_x: 8,
                m_z: 8,
                spacing_over_lambda: 0.5,
            },
            satellite_array: ArrayConfig {
                m_x: 4,
                m_z: 4,
                spacing_over_lambda: 0.5,
            },
            p_max_w: dbm_to_watts(50.0),
            noise_bob_w: dbm_to_watts(-90.0),
            noise_warden_w: dbm_to_watts(-90.0),
            rho: 1.5,
            k_factor: 7.0,
            covert: CovertSpec {
                epsilon_w: 0.01,
                epsilon_b: 0.01,
            },
        }
    }
}

/// Deterministic model of one ground-to-satellite link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkModel {
    pub node: NodeGeometry,
    pub budget: LinkBudget,
    /// Ground-station steering toward the satellite (default frame).
    pub d_tx: CVec,
    /// Satellite steering toward the ground station.
    pub g_rx: CVec,
    /// LoS-EGC combiner `g/√M_sat`.
    pub combiner: CVec,
    pub los: CMat,
    /// Unit direction from the ground station to the satellite.
    pub direction: Vec3,
}

impl LinkModel {
    /// `H̄†v`, so that `v†H̄w = aᴴw`.
    pub fn los_effective(&self) -> CVec {
        self.los.adjoint() * &self.combiner
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioLinks {
    pub alice: NodeGeometry,
    pub bob: LinkModel,
    pub wardens: Vec<LinkModel>,
    pub wavelength: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.frequency_hz > 0.0) {
            errs.push("frequency must be positive".to_string());
        }
        if !(self.earth_radius_m > 0.0) || !(self.altitude_m > 0.0) {
            errs.push("earth radius and altitude must be positive".to_string());
        }
        if !(self.rho > 1.0) {
            errs.push(format!("rho = {} must exceed 1", self.rho));
        }
        for (n, e) in [("epsilon_w", self.covert.epsilon_w), ("epsilon_b", self.covert.epsilon_b)] {
            if !(e > 0.0 && e < 1.0) {
                errs.push(format!("{n} = {e} outside (0, 1)"));
            }
        }
        if !(self.k_factor >= 0.0) {
            errs.push("Rician factor must be nonnegative".to_string());
        }
        if !(self.p_max_w > 0.0) {
            errs.push("maximum power must be positive".to_string());
        }
        if !(self.noise_bob_w > 0.0) || !(self.noise_warden_w > 0.0) {
            errs.push("noise powers must be positive".to_string());
        }
        if self.warden_longitudes_deg.is_empty() {
            errs.push("at least one warden is required".to_string());
        }
        for a in [&self.alice_array, &self.satellite_array] {
            if let Err(e) = ArrayConfig::new(a.m_x, a.m_z, a.spacing_over_lambda) {
                errs.push(e.to_string());
            }
        }
        if let Err(e) = EarthStationPattern::new(self.earth_station.g_max_dbi, self.earth_station.theta0_deg) {
            errs.push(e.to_string());
        }
        let s = &self.satellite;
        if let Err(e) = SatellitePattern::new(s.g_max_dbi, s.phi_3db_deg, s.alpha, s.beta, s.l_s_db, s.l_f_dbi) {
            errs.push(e.to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    pub fn orbit_radius(&self) -> f64 {
        self.earth_radius_m + self.altitude_m
    }

    pub fn alice_position(&self) -> Result<Vec3> {
        earth_station_position(self.alice_latitude_deg, self.alice_longitude_deg, self.earth_radius_m)
    }

    pub fn noise_bob(&self) -> Result<NoiseUncertainty> {
        NoiseUncertainty::new(self.noise_bob_w, self.rho)
    }

    pub fn noise_warden(&self) -> Result<NoiseUncertainty> {
        NoiseUncertainty::new(self.noise_warden_w, self.rho)
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.frequency_hz)
    }

    /// Linear ground-station gain toward `target_dir` for boresight `o`.
    pub fn alice_gain(&self, boresight: &Vec3, target_dir: &Vec3) -> Result<f64> {
        let a = off_boresight_angle(boresight, target_dir)?;
        Ok(dbi_to_linear(earth_station_gain_dbi(&self.earth_station, a)?))
    }

    fn link(&self, alice: &NodeGeometry, longitude: f64, lambda: f64) -> Result<LinkModel> {
        let pos = geo_satellite_position(longitude, self.orbit_radius())?;
        let node = NodeGeometry::pointing_at(pos, &alice.position)?;
        let budget = build_link_budget(&self.earth_station, &self.satellite, lambda, alice, &node)?;
        let (ta, pa) = aoa_aod_angles(&upa_frame(alice), &pos)?;
        let (ts, ps) = aoa_aod_angles(&upa_frame(&node), &alice.position)?;
        let d_tx = earth_station_steering(&self.alice_array, ta, pa);
        let g_rx = satellite_steering(&self.satellite_array, ts, ps);
        Ok(LinkModel {
            node,
            budget,
            combiner: los_egc_vector(&g_rx),
            los: los_matrix(&g_rx, &d_tx),
            d_tx,
            g_rx,
            direction: (pos - alice.position).normalize(),
        })
    }

    /// Links at the default orientation (ground antenna on Bob).
    pub fn links(&self) -> Result<ScenarioLinks> {
        self.validate()?;
        let lambda = self.wavelength();
        let qa = self.alice_position()?;
        let qb = geo_satellite_position(self.bob_longitude_deg, self.orbit_radius())?;
        let alice = NodeGeometry::pointing_at(qa, &qb)?;
        let bob = self.link(&alice, self.bob_longitude_deg, lambda)?;
        let wardens = self
            .warden_longitudes_deg
            .iter()
            .map(|&lon| self.link(&alice, lon, lambda))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScenarioLinks {
            alice,
            bob,
            wardens,
            wavelength: lambda,
        })
    }

    pub fn bob_rician(&self, links: &ScenarioLinks) -> RicianModel {
        RicianModel {
            k_factor: self.k_factor,
            los_matrix: links.bob.los.clone(),
        }
    }
}

impl ScenarioLinks {
    /// Budgets of every link with the ground antenna re-pointed at
    /// `boresight`; order is Bob first, then the wardens.
    pub fn budgets_at(&self, sc: &Scenario, boresight: &Vec3) -> Result<(LinkBudget, Vec<LinkBudget>)> {
        let alice = NodeGeometry {
            position: self.alice.position,
            boresight: boresight.normalize(),
        };
        let b = build_link_budget(&sc.earth_station, &sc.satellite, self.wavelength, &alice, &self.bob.node)?;
        let w = self
            .wardens
            .iter()
            .map(|l| build_link_budget(&sc.earth_station, &sc.satellite, self.wavelength, &alice, &l.node))
            .collect::<Result<Vec<_>>>()?;
        Ok((b, w))
    }
}
