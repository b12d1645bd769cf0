//! Bundled scenario configs, embedded at build time.

use crate::config::ScenarioConfig;
use crate::error::{Result, RunError};

pub const PRESETS: &[(&str, &str)] = &[
    ("umbc-ghost", include_str!("../presets/umbc-ghost.toml")),
    ("classical-psf", include_str!("../presets/classical-psf.toml")),
    ("spdc-psf", include_str!("../presets/spdc-psf.toml")),
    ("lensless-double-slit", include_str!("../presets/lensless-double-slit.toml")),
    ("secondary-image", include_str!("../presets/secondary-image.toml")),
    ("hbt-farfield", include_str!("../presets/hbt-farfield.toml")),
    ("mc-double-slit", include_str!("../presets/mc-double-slit.toml")),
    ("classical-coherent", include_str!("../presets/classical-coherent.toml")),
    ("classical-incoherent", include_str!("../presets/classical-incoherent.toml")),
    ("two-photon-laser", include_str!("../presets/two-photon-laser.toml")),
    ("two-photon-chaotic", include_str!("../presets/two-photon-chaotic.toml")),
    ("two-photon-chaotic-joint", include_str!("../presets/two-photon-chaotic-joint.toml")),
];

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let text = preset_text(name).ok_or_else(|| {
        let known: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
        RunError::config("--preset", format!("unknown preset `{name}`; known: {}", known.join(", ")))
    })?;
    ScenarioConfig::from_toml_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ghostoptics_core::model::ScenarioKind;

    #[test]
    fn every_preset_parses_and_every_scenario_has_one() {
        let mut seen = Vec::new();
        for (name, _) in PRESETS {
            let c = preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            seen.push(c.scenario_kind().unwrap());
        }
        for k in ScenarioKind::ALL {
            assert!(seen.contains(&k), "{k} has no preset");
        }
        assert!(preset("nope").is_err());
    }
}
