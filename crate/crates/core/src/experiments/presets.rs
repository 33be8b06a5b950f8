//! Built-in experiment presets, one per figure.

use super::config::{CsiMode, ExperimentConfig, ExperimentKind, Sweep, WardenPlacement};
use crate::error::{Error, Result};
use crate::optimizer::Design;
use crate::simkit::McConfig;

pub const PRESET_NAMES: &[&str] = &[
    "fig3", "fig4", "fig4b", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10",
];

fn sweep(variable: &str, values: &[f64]) -> Sweep {
    Sweep {
        variable: variable.to_string(),
        values: values.to_vec(),
    }
}

/// The named preset, optionally reduced with
/// [`ExperimentConfig::desk_scale`].
pub fn preset(name: &str, desk: bool) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig {
        name: name.to_string(),
        ..ExperimentConfig::default()
    };
    match name {
        "fig3" => {
            c.kind = ExperimentKind::DepCurve;
            c.series = vec![sweep("rho", &[1.2, 1.5])];
            c.p_a_dbm = 50.0;
        }
        "fig4" => {
            c.kind = ExperimentKind::MinDep;
            c.sweep = Some(sweep("p_a_dbm", &[0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]));
        }
        "fig4b" => {
            c.kind = ExperimentKind::MinDep;
            c.p_a_dbm = 20.0;
            c.sweep = Some(sweep("rho", &[1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0]));
        }
        "fig5" => {
            c.placement = WardenPlacement::Uniform { lo: 88.0, hi: 92.0 };
            c.sweep = Some(sweep("n_w", &[2.0, 4.0, 6.0, 8.0, 10.0, 12.0]));
        }
        "fig6" => {
            c.designs = vec![Design::JoBa];
            c.series = vec![sweep("m_sat", &[2.0, 4.0, 8.0])];
            c.sweep = Some(sweep("m_a", &[2.0, 4.0, 6.0, 8.0, 10.0]));
        }
        "fig7" => {
            c.designs = vec![Design::JoBa];
            c.series = vec![sweep("p_max_dbm", &[30.0, 40.0, 50.0])];
            c.sweep = Some(sweep("rho", &[1.1, 1.3, 1.5, 2.0, 2.5, 3.0]));
        }
        "fig8" => {
            c.designs = vec![Design::Ob, Design::JoBa];
            c.csi = CsiMode::Imperfect { delta: 0.0 };
            c.sweep = Some(sweep("delta", &[0.0, 0.01, 0.02, 0.03, 0.04, 0.05]));
        }
        "fig9" => {
            c.designs = vec![Design::JoBa];
            c.series = vec![sweep("m_sat", &[2.0, 8.0]), sweep("delta", &[0.0, 0.05])];
            c.sweep = Some(sweep("m_a", &[2.0, 4.0, 6.0, 8.0]));
        }
        "fig10" => {
            c.designs = vec![Design::JoBa];
            c.series = vec![sweep("p_max_dbm", &[30.0, 50.0]), sweep("delta", &[0.0, 0.05])];
            c.sweep = Some(sweep("rho", &[1.1, 1.3, 1.5, 2.0, 2.5, 3.0]));
        }
        _ => {
            return Err(Error::Config(vec![format!(
                "unknown preset {name:?}; available: {}",
                PRESET_NAMES.join(", ")
            )]))
        }
    }
    if c.kind != ExperimentKind::Rate {
        c.mc = McConfig::new(1_000_000, 0);
    }
    if desk {
        c.desk_scale();
        c.name = format!("{name}-desk");
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_validate() {
        for n in PRESET_NAMES {
            for desk in [false, true] {
                let c = preset(n, desk).unwrap();
                c.validate().unwrap_or_else(|e| panic!("{n}: {e}"));
            }
        }
        assert!(preset("fig11", false).is_err());
    }

    #[test]
    fn desk_variant_is_smaller() {
        let c = preset("fig6", true).unwrap();
        assert_eq!(c.sweep.unwrap().values, vec![2.0, 4.0]);
        assert_eq!(c.scenario.m_a, [4, 4]);
        assert!(c.seeds <= 5);
    }
}
