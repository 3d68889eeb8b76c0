//! Named region presets: membership, analysis window, segment count and timeline.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fitting::FitWindow;
use crate::ingest::{AggregationMode, RegionSpec};
use crate::regime::TimelineGroup;

/// Environment variable naming a preset file that replaces the built-in one.
pub const PRESETS_ENV: &str = "HYPERTREND_PRESETS";

const BUILTIN: &str = include_str!("../data/presets.toml");

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    pub label: String,
    pub region: RegionSpec,
    pub window: FitWindow,
    pub segments: u8,
    pub timeline: TimelineGroup,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPreset {
    name: String,
    label: Option<String>,
    mode: AggregationMode,
    members: Vec<String>,
    window: [i32; 2],
    #[serde(default = "one")]
    segments: u8,
    timeline: TimelineGroup,
}

fn one() -> u8 {
    1
}

#[derive(Deserialize)]
struct RawCatalog {
    #[serde(default)]
    preset: Vec<RawPreset>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresetCatalog {
    presets: Vec<Preset>,
}

impl PresetCatalog {
    pub fn builtin() -> Result<Self> {
        Self::from_toml_str(BUILTIN)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawCatalog = toml::from_str(text).map_err(|e| Error::Preset(e.to_string()))?;
        let mut presets: Vec<Preset> = Vec::with_capacity(raw.preset.len());
        for p in raw.preset {
            if presets.iter().any(|q| q.name == p.name) {
                return Err(Error::Preset(format!("duplicate preset {:?}", p.name)));
            }
            if p.members.is_empty() {
                return Err(Error::Preset(format!("preset {:?} has no members", p.name)));
            }
            if !matches!(p.segments, 1 | 2) {
                return Err(Error::Preset(format!(
                    "preset {:?}: segments must be 1 or 2",
                    p.name
                )));
            }
            let window = FitWindow::new(p.window[0], p.window[1])
                .map_err(|e| Error::Preset(format!("preset {:?}: {e}", p.name)))?;
            presets.push(Preset {
                label: p.label.unwrap_or_else(|| p.name.clone()),
                region: RegionSpec {
                    name: p.name.clone(),
                    members: p.members,
                    mode: p.mode,
                },
                name: p.name,
                window,
                segments: p.segments,
                timeline: p.timeline,
            });
        }
        Ok(Self { presets })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Preset(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// The file named by `HYPERTREND_PRESETS` if set, otherwise the built-in presets.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(PRESETS_ENV) {
            Some(path) if !path.is_empty() => Self::from_path(Path::new(&path)),
            _ => Self::builtin(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&Preset> {
        self.presets
            .iter()
            .find(|p| p.name.eq_ignore_ascii_case(name))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Preset> {
        self.presets.iter()
    }
}
