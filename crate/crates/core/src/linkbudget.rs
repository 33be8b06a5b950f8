//! Antenna patterns, free-space loss and the per-link deterministic budget.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{off_boresight_angle, NodeGeometry};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Piecewise ground-station pattern: flat main lobe up to `theta0_deg`,
/// 25·log10 roll-off to 48°, then a −10 dBi floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarthStationPattern {
    pub g_max_dbi: f64,
    pub theta0_deg: f64,
}

/// Piecewise satellite receive pattern with a parabolic main lobe, a
/// near-in side-lobe shelf and a far-out floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SatellitePattern {
    pub g_max_dbi: f64,
    pub phi_3db_deg: f64,
    pub alpha: f64,
    pub beta: f64,
    pub l_s_db: f64,
    pub l_f_dbi: f64,
}

/// Deterministic quantities of one ground-to-satellite link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    /// Free-space loss `(λ/4πd)²`.
    pub f_path: f64,
    /// Linear transmit gain of the earth station toward the satellite.
    pub g_tx: f64,
    /// Linear receive gain of the satellite toward the earth station.
    pub g_rx: f64,
    pub distance: f64,
}

impl LinkBudget {
    /// `F·G_tx·G_rx`, the deterministic power gain of the link.
    pub fn power_gain(&self) -> f64 {
        self.f_path * self.g_tx * self.g_rx
    }
}

impl EarthStationPattern {
    pub fn new(g_max_dbi: f64, theta0_deg: f64) -> Result<Self> {
        if !(theta0_deg > 0.0 && theta0_deg < 48.0) {
            return Err(Error::domain(format!(
                "earth-station minimum off-axis angle {theta0_deg} outside (0, 48)"
            )));
        }
        Ok(Self {
            g_max_dbi,
            theta0_deg,
        })
    }
}

impl SatellitePattern {
    pub fn new(
        g_max_dbi: f64,
        phi_3db_deg: f64,
        alpha: f64,
        beta: f64,
        l_s_db: f64,
        l_f_dbi: f64,
    ) -> Result<Self> {
        if !(phi_3db_deg > 0.0) {
            return Err(Error::domain("half 3 dB beamwidth must be positive"));
        }
        if !(alpha > 0.0 && alpha <= beta) {
            return Err(Error::domain(format!(
                "pattern breakpoints need 0 < alpha <= beta, got {alpha}, {beta}"
            )));
        }
        if !(l_s_db < 0.0) {
            return Err(Error::domain("near-in side-lobe level must be negative"));
        }
        Ok(Self {
            g_max_dbi,
            phi_3db_deg,
            alpha,
            beta,
            l_s_db,
            l_f_dbi,
        })
    }
}

fn check_angle(a: f64) -> Result<()> {
    if !(0.0..=180.0).contains(&a) {
        return Err(Error::domain(format!("off-axis angle {a} outside [0, 180]")));
    }
    Ok(())
}

pub fn earth_station_gain_dbi(p: &EarthStationPattern, theta_deg: f64) -> Result<f64> {
    check_angle(theta_deg)?;
    Ok(if theta_deg < p.theta0_deg {
        p.g_max_dbi
    } else if theta_deg <= 48.0 {
        p.g_max_dbi - 25.0 * theta_deg.log10()
    } else {
        -10.0
    })
}

pub fn satellite_gain_dbi(p: &SatellitePattern, phi_deg: f64) -> Result<f64> {
    check_angle(phi_deg)?;
    let r = phi_deg / p.phi_3db_deg;
    Ok(if r < p.alpha {
        p.g_max_dbi - 3.0 * r * r
    } else if r <= p.beta {
        p.g_max_dbi + p.l_s_db
    } else if phi_deg <= 90.0 {
        p.g_max_dbi + p.l_s_db - 25.0 * r.log10()
    } else {
        p.l_f_dbi
    })
}

pub fn free_space_loss(distance: f64, wavelength: f64) -> Result<f64> {
    if !(distance > 0.0 && wavelength > 0.0) {
        return Err(Error::domain("distance and wavelength must be positive"));
    }
    let r = wavelength / (4.0 * std::f64::consts::PI * distance);
    Ok(r * r)
}

pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

pub fn dbi_to_linear(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

pub fn linear_to_dbi(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("cannot convert {x} to decibels")));
    }
    Ok(10.0 * x.log10())
}

pub fn dbm_to_watts(x: f64) -> f64 {
    10f64.powf((x - 30.0) / 10.0)
}

pub fn watts_to_dbm(x: f64) -> Result<f64> {
    Ok(linear_to_dbi(x)? + 30.0)
}

/// Budget for the link from an earth station to a satellite, using each
/// node's current boresight.
pub fn build_link_budget(
    es: &EarthStationPattern,
    sat: &SatellitePattern,
    wavelength: f64,
    tx: &NodeGeometry,
    rx: &NodeGeometry,
) -> Result<LinkBudget> {
    let d = rx.position - tx.position;
    let distance = d.norm();
    let theta = off_boresight_angle(&tx.boresight, &d)?;
    let phi = off_boresight_angle(&rx.boresight, &(-d))?;
    Ok(LinkBudget {
        f_path: free_space_loss(distance, wavelength)?,
        g_tx: dbi_to_linear(earth_station_gain_dbi(es, theta)?),
        g_rx: dbi_to_linear(satellite_gain_dbi(sat, phi)?),
        distance,
    })
}
