//! Solver run configuration and the bundled presets.

use std::fs;
use std::path::Path;

use pss_core::chsim::{GridSpec, InitialDatum, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

fn d_dt() -> f64 {
    SolverConfig::default().dt
}
fn d_t_end() -> f64 {
    SolverConfig::default().t_end
}
fn d_save_every() -> usize {
    SolverConfig::default().save_every
}
fn d_dealias() -> bool {
    SolverConfig::default().dealias
}
fn d_threshold() -> f64 {
    SolverConfig::default().breaking_threshold
}
fn one() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "d_dt")]
    pub dt: f64,
    #[serde(default = "d_t_end")]
    pub t_end: f64,
    #[serde(default = "d_save_every")]
    pub save_every: usize,
    #[serde(default = "d_dealias")]
    pub dealias: bool,
    #[serde(default = "d_threshold")]
    pub breaking_threshold: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let c = SolverConfig::default();
        SolverSection {
            dt: c.dt,
            t_end: c.t_end,
            save_every: c.save_every,
            dealias: c.dealias,
            breaking_threshold: c.breaking_threshold,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSection {
    Gaussian {
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        width: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    AntisymTanh {
        steepness: f64,
    },
    Cosine {
        k: u32,
    },
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverSection,
    pub initial: InitialSection,
}

pub const PRESETS: [(&str, &str); 5] = [
    ("gaussian", include_str!("../presets/gaussian.json")),
    ("gaussian_fine", include_str!("../presets/gaussian_fine.json")),
    ("steep", include_str!("../presets/steep.json")),
    ("cosine", include_str!("../presets/cosine.json")),
    ("zero", include_str!("../presets/zero.json")),
];

impl RunConfig {
    pub fn from_json(text: &str, origin: &Path) -> Result<RunConfig> {
        let c: RunConfig =
            serde_json::from_str(text).map_err(|source| LabError::Json { path: origin.into(), source })?;
        c.grid()?;
        c.solver().validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        RunConfig::from_json(&text, path)
    }

    pub fn preset(name: &str) -> Result<RunConfig> {
        let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
            let known: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            LabError::invalid(format!("unknown preset `{name}`; known: {}", known.join(", ")))
        })?;
        RunConfig::from_json(text, Path::new(name))
    }

    pub fn grid(&self) -> Result<GridSpec> {
        Ok(GridSpec::new(self.grid.l, self.grid.n)?)
    }

    pub fn solver(&self) -> SolverConfig {
        let s = self.solver;
        SolverConfig {
            dt: s.dt,
            t_end: s.t_end,
            save_every: s.save_every,
            dealias: s.dealias,
            breaking_threshold: s.breaking_threshold,
        }
    }

    pub fn datum(&self) -> InitialDatum {
        match self.initial {
            InitialSection::Gaussian { center, width, amplitude } => InitialDatum::Gaussian { center, width, amplitude },
            InitialSection::AntisymTanh { steepness } => InitialDatum::AntisymTanh { steepness },
            InitialSection::Cosine { k } => InitialDatum::Cosine { k },
            InitialSection::Zero => InitialDatum::Zero,
        }
    }

    /// The configuration with every default filled in, as stable JSON.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
