//! TOML serialization for species presets.
//!
//! Files carry plain f64 values; conversion into the generic models happens
//! on load so callers keep their chosen scalar type.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BreathingModel, SpeciesPreset, SwimModel, SynthError};
use crate::float::Real;

/// On-disk schema for a species preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetFile {
    pub name: String,
    pub breathing: BreathingSection,
    pub swim: SwimSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreathingSection {
    pub base_freq_hz: f64,
    pub freq_jitter_hz: f64,
    pub amplitude_g: f64,
    pub harmonic2_fraction: f64,
    pub noise_std_g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwimSection {
    pub tailbeat_base_hz: f64,
    pub tailbeat_per_bls_hz: f64,
    pub amp_base_g: f64,
    pub amp_growth_per_bls: f64,
    pub activity_knee_bls: Option<f64>,
    pub turn_rate_hz: f64,
    pub turn_amp_g: f64,
    pub noise_std_g: f64,
    pub breath_per_bls_hz: f64,
    pub fatigue_knee_bls: Option<f64>,
    pub fatigue_decline_per_bls_hz: f64,
}

impl PresetFile {
    pub fn from_preset<F: Real>(p: &SpeciesPreset<F>) -> Self {
        let b = &p.breathing;
        let s = &p.swim;
        Self {
            name: p.name.clone(),
            breathing: BreathingSection {
                base_freq_hz: b.base_freq_hz.as_f64(),
                freq_jitter_hz: b.freq_jitter_hz.as_f64(),
                amplitude_g: b.amplitude_g.as_f64(),
                harmonic2_fraction: b.harmonic2_fraction.as_f64(),
                noise_std_g: b.noise_std_g.as_f64(),
            },
            swim: SwimSection {
                tailbeat_base_hz: s.tailbeat_base_hz.as_f64(),
                tailbeat_per_bls_hz: s.tailbeat_per_bls_hz.as_f64(),
                amp_base_g: s.amp_base_g.as_f64(),
                amp_growth_per_bls: s.amp_growth_per_bls.as_f64(),
                activity_knee_bls: s.activity_knee_bls.map(|v| v.as_f64()),
                turn_rate_hz: s.turn_rate_hz.as_f64(),
                turn_amp_g: s.turn_amp_g.as_f64(),
                noise_std_g: s.noise_std_g.as_f64(),
                breath_per_bls_hz: s.breath_per_bls_hz.as_f64(),
                fatigue_knee_bls: s.fatigue_knee_bls.map(|v| v.as_f64()),
                fatigue_decline_per_bls_hz: s.fatigue_decline_per_bls_hz.as_f64(),
            },
        }
    }

    pub fn into_preset<F: Real>(self) -> SpeciesPreset<F> {
        let b = self.breathing;
        let s = self.swim;
        SpeciesPreset {
            name: self.name,
            breathing: BreathingModel {
                base_freq_hz: F::of(b.base_freq_hz),
                freq_jitter_hz: F::of(b.freq_jitter_hz),
                amplitude_g: F::of(b.amplitude_g),
                harmonic2_fraction: F::of(b.harmonic2_fraction),
                noise_std_g: F::of(b.noise_std_g),
            },
            swim: SwimModel {
                tailbeat_base_hz: F::of(s.tailbeat_base_hz),
                tailbeat_per_bls_hz: F::of(s.tailbeat_per_bls_hz),
                amp_base_g: F::of(s.amp_base_g),
                amp_growth_per_bls: F::of(s.amp_growth_per_bls),
                activity_knee_bls: s.activity_knee_bls.map(F::of),
                turn_rate_hz: F::of(s.turn_rate_hz),
                turn_amp_g: F::of(s.turn_amp_g),
                noise_std_g: F::of(s.noise_std_g),
                breath_per_bls_hz: F::of(s.breath_per_bls_hz),
                fatigue_knee_bls: s.fatigue_knee_bls.map(F::of),
                fatigue_decline_per_bls_hz: F::of(s.fatigue_decline_per_bls_hz),
            },
        }
    }
}

/// Loads and validates a preset from a TOML file.
pub fn load_preset_file<F: Real>(path: &Path) -> Result<SpeciesPreset<F>, SynthError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SynthError::PresetFile(format!("{}: {e}", path.display())))?;
    let file: PresetFile = toml::from_str(&text)
        .map_err(|e| SynthError::PresetFile(format!("{}: {e}", path.display())))?;
    let preset = file.into_preset();
    preset.validate()?;
    Ok(preset)
}

/// Writes a preset to a TOML file.
pub fn save_preset_file<F: Real>(preset: &SpeciesPreset<F>, path: &Path) -> Result<(), SynthError> {
    let text = toml::to_string_pretty(&PresetFile::from_preset(preset))
        .map_err(|e| SynthError::PresetFile(e.to_string()))?;
    std::fs::write(path, text)
        .map_err(|e| SynthError::PresetFile(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_survives_a_toml_round_trip() {
        let p = SpeciesPreset::<f64>::sea_bream();
        let dir = std::env::temp_dir().join("fishbit-preset-roundtrip");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bream.toml");
        save_preset_file(&p, &path).unwrap();
        let back: SpeciesPreset<f64> = load_preset_file(&path).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn optional_knees_may_be_omitted() {
        let text = r#"
name = "custom"

[breathing]
base_freq_hz = 2.0
freq_jitter_hz = 0.0
amplitude_g = 0.2
harmonic2_fraction = 0.0
noise_std_g = 0.01

[swim]
tailbeat_base_hz = 1.5
tailbeat_per_bls_hz = 0.5
amp_base_g = 0.05
amp_growth_per_bls = 0.5
turn_rate_hz = 0.0
turn_amp_g = 0.0
noise_std_g = 0.01
breath_per_bls_hz = 0.3
fatigue_decline_per_bls_hz = 0.0
"#;
        let file: PresetFile = toml::from_str(text).unwrap();
        let p: SpeciesPreset<f64> = file.into_preset();
        assert_eq!(p.swim.activity_knee_bls, None);
        assert_eq!(p.swim.fatigue_knee_bls, None);
        p.validate().unwrap();
    }

    #[test]
    fn malformed_toml_is_reported() {
        let dir = std::env::temp_dir().join("fishbit-preset-bad");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("broken.toml");
        std::fs::write(&path, "name = [not toml").unwrap();
        assert!(matches!(
            load_preset_file::<f64>(&path),
            Err(SynthError::PresetFile(_))
        ));
        assert!(matches!(
            load_preset_file::<f64>(Path::new("/nonexistent/x.toml")),
            Err(SynthError::PresetFile(_))
        ));
    }

    #[test]
    fn invalid_values_fail_validation_on_load() {
        let dir = std::env::temp_dir().join("fishbit-preset-invalid");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("neg.toml");
        let mut file = PresetFile::from_preset(&SpeciesPreset::<f64>::sea_bream());
        file.breathing.amplitude_g = -0.5;
        std::fs::write(&path, toml::to_string(&file).unwrap()).unwrap();
        assert!(matches!(
            load_preset_file::<f64>(&path),
            Err(SynthError::InvalidModel(_))
        ));
    }
}
