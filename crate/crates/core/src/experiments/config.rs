//! Experiment configuration: a single JSON document in user units (GHz, km,
//! dBm, degrees), converted to SI at [`ScenarioConfig::to_scenario`].

use serde::{Deserialize, Serialize};

use crate::channel::ArrayConfig;
use crate::covert_analysis::CovertSpec;
use crate::error::{Error, Result};
use crate::linkbudget::{dbm_to_watts, EarthStationPattern, SatellitePattern};
use crate::optimizer::{Design, OptimizerOptions};
use crate::scenario::Scenario;
use crate::simkit::McConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub frequency_ghz: f64,
    pub earth_radius_km: f64,
    pub altitude_km: f64,
    pub alice_latitude_deg: f64,
    pub alice_longitude_deg: f64,
    pub bob_longitude_deg: f64,
    pub warden_longitudes_deg: Vec<f64>,
    pub g_max_dbi: f64,
    pub theta0_deg: f64,
    pub phi_3db_deg: f64,
    pub alpha: f64,
    pub beta: f64,
    pub l_s_db: f64,
    pub l_f_dbi: f64,
    /// `[m_x, m_z]`.
    pub m_a: [usize; 2],
    pub m_sat: [usize; 2],
    pub element_spacing: f64,
    pub p_max_dbm: f64,
    pub noise_bob_dbm: f64,
    pub noise_warden_dbm: f64,
    pub rho: f64,
    pub k_factor: f64,
    pub epsilon_w: f64,
    pub epsilon_b: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            frequency_ghz: 18.0,
            earth_radius_km: 6378.0,
            altitude_km: 36_000.0,
            alice_latitude_deg: 0.0,
            alice_longitude_deg: 90.0,
            bob_longitude_deg: 90.0,
            warden_longitudes_deg: vec![92.0, 91.0, 89.0, 88.0],
            g_max_dbi: 32.0,
            theta0_deg: 1.0,
            phi_3db_deg: 0.4,
            alpha: 1.5,
            beta: 2.5,
            l_s_db: -6.75,
            l_f_dbi: 0.0,
            m_a: [8, 8],
            m_sat: [4, 4],
            element_spacing: 0.5,
            p_max_dbm: 50.0,
            noise_bob_dbm: -90.0,
            noise_warden_dbm: -90.0,
            rho: 1.5,
            k_factor: 7.0,
            epsilon_w: 0.01,
            epsilon_b: 0.01,
        }
    }
}

impl ScenarioConfig {
    /// Converts to SI units; does not validate.
    pub fn to_scenario(&self) -> Scenario {
        Scenario {
            frequency_hz: self.frequency_ghz * 1e9,
            earth_radius_m: self.earth_radius_km * 1e3,
            altitude_m: self.altitude_km * 1e3,
            alice_latitude_deg: self.alice_latitude_deg,
            alice_longitude_deg: self.alice_longitude_deg,
            bob_longitude_deg: self.bob_longitude_deg,
            warden_longitudes_deg: self.warden_longitudes_deg.clone(),
            earth_station: EarthStationPattern {
                g_max_dbi: self.g_max_dbi,
                theta0_deg: self.theta0_deg,
            },
            satellite: SatellitePattern {
                g_max_dbi: self.g_max_dbi,
                phi_3db_deg: self.phi_3db_deg,
                alpha: self.alpha,
                beta: self.beta,
                l_s_db: self.l_s_db,
                l_f_dbi: self.l_f_dbi,
            },
            alice_array: ArrayConfig {
                m_x: self.m_a[0],
                m_z: self.m_a[1],
                spacing_over_lambda: self.element_spacing,
            },
            satellite_array: ArrayConfig {
                m_x: self.m_sat[0],
                m_z: self.m_sat[1],
                spacing_over_lambda: self.element_spacing,
            },
            p_max_w: dbm_to_watts(self.p_max_dbm),
            noise_bob_w: dbm_to_watts(self.noise_bob_dbm),
            noise_warden_w: dbm_to_watts(self.noise_warden_dbm),
            rho: self.rho,
            k_factor: self.k_factor,
            covert: CovertSpec {
                epsilon_w: self.epsilon_w,
                epsilon_b: self.epsilon_b,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// DEP, its lower bound and the empirical DEP along a threshold grid.
    DepCurve,
    /// Minimum DEP: empirical, closed-form lower bound and floor.
    MinDep,
    /// Covert rate of one or more designs.
    Rate,
}

/// Channel knowledge assumed by the designs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum CsiMode {
    Perfect,
    /// Robust designs with `δ_b = δ_w = delta`.
    Imperfect { delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum WardenPlacement {
    /// The scenario's listed longitudes, truncated to `n_w`.
    Fixed,
    /// I.i.d. uniform longitudes in `[lo, hi]` degrees.
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub n_draws: usize,
    pub tol_rel: f64,
    pub max_iter: usize,
    pub n_grid: usize,
    pub refine: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let o = OptimizerOptions::default();
        Self {
            n_draws: o.n_draws,
            tol_rel: o.tol_rel,
            max_iter: o.max_iter,
            n_grid: o.n_grid,
            refine: o.refine,
        }
    }
}

impl OptimizerConfig {
    pub fn options(&self, seed: u64) -> OptimizerOptions {
        OptimizerOptions {
            n_draws: self.n_draws,
            seed,
            tol_rel: self.tol_rel,
            max_iter: self.max_iter,
            n_grid: self.n_grid,
            refine: self.refine,
            ..OptimizerOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    pub scenario: ScenarioConfig,
    pub sweep: Option<Sweep>,
    /// Further variables crossed with the sweep; each combination is a
    /// separate curve.
    pub series: Vec<Sweep>,
    pub designs: Vec<Design>,
    pub csi: CsiMode,
    pub placement: WardenPlacement,
    /// Number of wardens; `None` uses every listed longitude.
    pub n_w: Option<usize>,
    /// Channel (and placement) draws averaged per sweep point.
    pub seeds: usize,
    pub seed: u64,
    pub mc: McConfig,
    pub optimizer: OptimizerConfig,
    /// Transmit power for the DEP experiments.
    pub p_a_dbm: f64,
    pub warden_index: usize,
    pub tau_points: usize,
    pub min_grid: usize,
    /// Allowed `|empirical − analytic|` DEP gap, on top of `3·SE`.
    pub dep_tol: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "custom".to_string(),
            kind: ExperimentKind::Rate,
            scenario: ScenarioConfig::default(),
            sweep: None,
            series: Vec::new(),
            designs: vec![Design::Ob, Design::JoBa, Design::Mrt, Design::Zf],
            csi: CsiMode::Perfect,
            placement: WardenPlacement::Fixed,
            n_w: None,
            seeds: 20,
            seed: 0,
            mc: McConfig::new(1_000_000, 0),
            optimizer: OptimizerConfig::default(),
            p_a_dbm: 50.0,
            warden_index: 0,
            tau_points: 20,
            min_grid: 400,
            dep_tol: 0.01,
        }
    }
}

/// Variables a sweep or series may name.
pub const SWEEP_VARIABLES: &[&str] = &[
    "n_w",
    "m_a",
    "m_sat",
    "rho",
    "delta",
    "p_max_dbm",
    "p_a_dbm",
    "k_factor",
    "epsilon",
    "epsilon_w",
    "epsilon_b",
    "theta0_deg",
    "noise_dbm",
];

/// Quantities a sweep point may change.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSettings {
    pub scenario: ScenarioConfig,
    pub csi: CsiMode,
    pub n_w: Option<usize>,
    pub p_a_dbm: f64,
}

fn as_count(name: &str, v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v < 1e6 {
        Ok(v as usize)
    } else {
        Err(Error::Config(vec![format!("{name} must be a positive integer, got {v}")]))
    }
}

impl PointSettings {
    pub fn set(&mut self, name: &str, v: f64) -> Result<()> {
        let s = &mut self.scenario;
        match name {
            "n_w" => self.n_w = Some(as_count(name, v)?),
            "m_a" => {
                let n = as_count(name, v)?;
                s.m_a = [n, n];
            }
            "m_sat" => {
                let n = as_count(name, v)?;
                s.m_sat = [n, n];
            }
            "rho" => s.rho = v,
            "delta" => self.csi = CsiMode::Imperfect { delta: v },
            "p_max_dbm" => s.p_max_dbm = v,
            "p_a_dbm" => self.p_a_dbm = v,
            "k_factor" => s.k_factor = v,
            "epsilon" => {
                s.epsilon_w = v;
                s.epsilon_b = v;
            }
            "epsilon_w" => s.epsilon_w = v,
            "epsilon_b" => s.epsilon_b = v,
            "theta0_deg" => s.theta0_deg = v,
            "noise_dbm" => {
                s.noise_bob_dbm = v;
                s.noise_warden_dbm = v;
            }
            _ => return Err(unknown_variable(name)),
        }
        Ok(())
    }
}

fn unknown_variable(name: &str) -> Error {
    Error::Config(vec![format!(
        "unknown sweep variable {name:?}; valid names: {}",
        SWEEP_VARIABLES.join(", ")
    )])
}

impl ExperimentConfig {
    pub fn base_settings(&self) -> PointSettings {
        PointSettings {
            scenario: self.scenario.clone(),
            csi: self.csi,
            n_w: self.n_w,
            p_a_dbm: self.p_a_dbm,
        }
    }

    /// Every sweep point as `(assignments, settings)`, series outermost.
    pub fn points(&self) -> Result<Vec<(Vec<(String, f64)>, PointSettings)>> {
        let mut axes: Vec<&Sweep> = self.series.iter().collect();
        if let Some(s) = &self.sweep {
            axes.push(s);
        }
        let mut out = vec![(Vec::new(), self.base_settings())];
        for ax in axes {
            let mut next = Vec::with_capacity(out.len() * ax.values.len());
            for (assign, base) in &out {
                for &v in &ax.values {
                    let mut st = base.clone();
                    st.set(&ax.variable, v)?;
                    let mut a = assign.clone();
                    a.push((ax.variable.clone(), v));
                    next.push((a, st));
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Itemised list of every problem with the configuration.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let mut axes: Vec<&Sweep> = self.series.iter().collect();
        if let Some(s) = &self.sweep {
            axes.push(s);
        }
        for ax in &axes {
            if !SWEEP_VARIABLES.contains(&ax.variable.as_str()) {
                if let Error::Config(v) = unknown_variable(&ax.variable) {
                    errs.extend(v);
                }
            }
            if ax.values.is_empty() {
                errs.push(format!("sweep over {} has no values", ax.variable));
            }
        }
        if self.seeds == 0 {
            errs.push("seeds must be at least 1".to_string());
        }
        if self.mc.n_trials == 0 || self.mc.batch == 0 {
            errs.push("mc.n_trials and mc.batch must be at least 1".to_string());
        }
        if self.kind == ExperimentKind::Rate && self.designs.is_empty() {
            errs.push("rate experiments need at least one design".to_string());
        }
        if self.tau_points < 2 || self.min_grid < 2 {
            errs.push("threshold grids need at least two points".to_string());
        }
        if let WardenPlacement::Uniform { lo, hi } = self.placement {
            if !(lo <= hi) || !(-180.0..=180.0).contains(&lo) || !(-180.0..=180.0).contains(&hi) {
                errs.push(format!("warden longitude range [{lo}, {hi}] is invalid"));
            }
        }
        let axes_ok = errs.is_empty();
        if let Err(e) = check_point(self, &self.base_settings()) {
            match e {
                Error::Config(v) => errs.extend(v),
                other => errs.push(other.to_string()),
            }
        }
        if axes_ok {
            match self.points() {
                Ok(points) => {
                    for (assign, st) in points {
                        if let Err(e) = check_point(self, &st) {
                            let at = if assign.is_empty() {
                                String::new()
                            } else {
                                let a: Vec<String> = assign.iter().map(|(k, v)| format!("{k}={v}")).collect();
                                format!(" (at {})", a.join(", "))
                            };
                            match e {
                                Error::Config(v) => errs.extend(v.into_iter().map(|m| m + &at)),
                                other => errs.push(other.to_string() + &at),
                            }
                        }
                    }
                }
                Err(Error::Config(v)) => errs.extend(v),
                Err(e) => errs.push(e.to_string()),
            }
        }
        let mut seen = std::collections::HashSet::new();
        errs.retain(|e| seen.insert(e.clone()));
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    /// Reduced-cost variant for quick runs: a 4×4 ground array at most,
    /// at most 10⁵ Monte Carlo trials and 5 seeds, looser DEP tolerance.
    pub fn desk_scale(&mut self) {
        let cap = |m: &mut [usize; 2]| {
            m[0] = m[0].min(4);
            m[1] = m[1].min(4);
        };
        cap(&mut self.scenario.m_a);
        let shrink = |ax: &mut Sweep| {
            if ax.variable == "m_a" {
                ax.values.retain(|v| *v <= 4.0);
                if ax.values.is_empty() {
                    ax.values.push(4.0);
                }
            }
        };
        self.series.iter_mut().for_each(shrink);
        if let Some(s) = self.sweep.as_mut() {
            shrink(s);
        }
        self.mc.n_trials = self.mc.n_trials.min(100_000);
        self.seeds = self.seeds.min(5);
        self.dep_tol = self.dep_tol.max(0.02);
        self.min_grid = self.min_grid.min(200);
    }
}

fn check_point(cfg: &ExperimentConfig, st: &PointSettings) -> Result<()> {
    let mut sc = st.scenario.to_scenario();
    if let Some(n) = st.n_w {
        if cfg.placement == WardenPlacement::Fixed && n > sc.warden_longitudes_deg.len() {
            return Err(Error::Config(vec![format!(
                "n_w = {n} exceeds the {} listed warden longitudes",
                sc.warden_longitudes_deg.len()
            )]));
        }
        if let WardenPlacement::Uniform { lo, .. } = cfg.placement {
            sc.warden_longitudes_deg = vec![lo; n];
        }
    }
    sc.validate()?;
    if let CsiMode::Imperfect { delta } = st.csi {
        if !(delta >= 0.0) {
            return Err(Error::Config(vec![format!("delta = {delta} must be nonnegative")]));
        }
    }
    if cfg.kind != ExperimentKind::Rate && cfg.warden_index >= sc.warden_longitudes_deg.len() {
        return Err(Error::Config(vec![format!(
            "warden_index {} out of range",
            cfg.warden_index
        )]));
    }
    Ok(())
}

fn set_path(node: &mut serde_json::Value, path: &[&str], val: serde_json::Value) -> bool {
    let Some(map) = node.as_object_mut() else {
        return false;
    };
    match path {
        [] => false,
        [last] => {
            map.insert(last.to_string(), val);
            true
        }
        [first, rest @ ..] => {
            let child = map
                .entry(first.to_string())
                .or_insert_with(|| serde_json::Value::Object(Default::default()));
            if child.is_null() {
                *child = serde_json::Value::Object(Default::default());
            }
            set_path(child, rest, val)
        }
    }
}

/// Parses `text` as JSON; anything unparsable is taken as a string.
fn parse_value(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap_or_else(|_| serde_json::Value::String(text.to_string()))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Applies `key=value` overrides. Keys are dotted paths into the JSON
    /// form; a bare scenario field name (`rho=1.3`) addresses the scenario.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, sets: &[S]) -> Result<()> {
        let mut v = serde_json::to_value(&*self)?;
        let mut errs = Vec::new();
        for s in sets {
            let s = s.as_ref();
            let Some((key, val)) = s.split_once('=') else {
                errs.push(format!("override {s:?} is not of the form key=value"));
                continue;
            };
            let key = key.trim();
            let mut path: Vec<&str> = key.split('.').collect();
            if path.len() == 1 && v.get(key).is_none() && v["scenario"].get(key).is_some() {
                path.insert(0, "scenario");
            }
            if !set_path(&mut v, &path, parse_value(val.trim())) {
                errs.push(format!("override key {key:?} does not name a field"));
            }
        }
        if !errs.is_empty() {
            return Err(Error::Config(errs));
        }
        *self = serde_json::from_value(v).map_err(|e| Error::Config(vec![format!("after overrides: {e}")]))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_reference_scenario() {
        assert_eq!(ScenarioConfig::default().to_scenario(), Scenario::default());
        let cfg = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        let echo = cfg.to_json().unwrap();
        for needle in [
            "\"frequency_ghz\": 18.0",
            "\"l_s_db\": -6.75",
            "\"phi_3db_deg\": 0.4",
            "\"p_max_dbm\": 50.0",
            "\"noise_bob_dbm\": -90.0",
            "\"rho\": 1.5",
            "\"k_factor\": 7.0",
        ] {
            assert!(echo.contains(needle), "{needle}");
        }
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = ExperimentConfig::default();
        cfg.scenario.rho = 1.0;
        cfg.scenario.epsilon_b = 0.0;
        let Err(Error::Config(v)) = cfg.validate() else {
            panic!("expected config error")
        };
        assert_eq!(v.len(), 2, "{v:?}");
    }

    #[test]
    fn unknown_sweep_lists_valid_names() {
        let mut cfg = ExperimentConfig::default();
        cfg.sweep = Some(Sweep {
            variable: "bandwidth".into(),
            values: vec![1.0],
        });
        let msg = cfg.validate().unwrap_err().to_string();
        assert!(msg.contains("bandwidth") && msg.contains("n_w") && msg.contains("delta"), "{msg}");
    }

    #[test]
    fn overrides() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_overrides(&["rho=1.3", "scenario.m_a=[4,4]", "seeds=3", "csi={\"mode\":\"imperfect\",\"delta\":0.05}"])
            .unwrap();
        assert_eq!(cfg.scenario.rho, 1.3);
        assert_eq!(cfg.scenario.m_a, [4, 4]);
        assert_eq!(cfg.seeds, 3);
        assert_eq!(cfg.csi, CsiMode::Imperfect { delta: 0.05 });
        assert!(cfg.apply_overrides(&["no_such_field=1"]).is_err());
        assert!(cfg.apply_overrides(&["rho"]).is_err());
    }

    #[test]
    fn points_cross_series_and_sweep() {
        let mut cfg = ExperimentConfig::default();
        cfg.series = vec![Sweep {
            variable: "m_sat".into(),
            values: vec![2.0, 4.0],
        }];
        cfg.sweep = Some(Sweep {
            variable: "delta".into(),
            values: vec![0.0, 0.05, 0.1],
        });
        let p = cfg.points().unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(p[4].1.scenario.m_sat, [4, 4]);
        assert_eq!(p[4].1.csi, CsiMode::Imperfect { delta: 0.05 });
    }
}
