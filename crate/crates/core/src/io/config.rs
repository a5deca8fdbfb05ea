use serde::{Deserialize, Serialize};

use crate::array::ArrayGeometry;
use crate::error::{Error, Result};
use crate::estimation::AngleGrid;
use crate::seed::Seed;
use crate::sim::{JammerMode, ReceiverKnowledge, Scenario};

/// Scenario as written in a TOML file. Angles are degrees, Rician factors
/// are dB (`inf` allowed), spacing is in wavelengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n_r: usize,
    pub n_j: usize,
    pub theta_t_deg: f64,
    pub theta_j_deg: f64,
    pub k_t_db: f64,
    pub k_j_db: f64,
    pub training_len: usize,
    pub snr_db: f64,
    pub power_ratio: f64,
    pub jammer_mode: JammerMode,
    pub receiver_knowledge: ReceiverKnowledge,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_spacing")]
    pub spacing_wavelengths: f64,
    #[serde(default)]
    pub phi_j_deg: f64,
    #[serde(default = "default_true")]
    pub block_fading: bool,
    #[serde(default = "default_grid_start")]
    pub grid_start_deg: f64,
    #[serde(default = "default_grid_stop")]
    pub grid_stop_deg: f64,
    #[serde(default = "default_grid_step")]
    pub grid_step_deg: f64,
    #[serde(default)]
    pub refine: bool,
}

fn default_spacing() -> f64 {
    0.5
}

fn default_true() -> bool {
    true
}

fn default_grid_start() -> f64 {
    -90.0
}

fn default_grid_stop() -> f64 {
    90.0
}

fn default_grid_step() -> f64 {
    0.1
}

/// Numeric keys accepted by [`Config::with_value`].
pub const SWEEP_PARAMETERS: &[&str] = &[
    "n_r",
    "n_j",
    "theta_t_deg",
    "theta_j_deg",
    "k_t_db",
    "k_j_db",
    "training_len",
    "snr_db",
    "power_ratio",
    "trials",
    "spacing_wavelengths",
    "phi_j_deg",
    "grid_start_deg",
    "grid_stop_deg",
    "grid_step_deg",
];

/// A parsed file together with the scenario it describes.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub file: ConfigFile,
    pub scenario: Scenario,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_file(file: ConfigFile) -> Result<Self> {
        let scenario = to_scenario(&file).map_err(|e| match e {
            Error::Config(m) => Error::Config(m),
            other => Error::Config(other.to_string()),
        })?;
        Ok(Self { file, scenario })
    }

    pub fn emit(&self) -> Result<String> {
        toml::to_string(&self.file).map_err(|e| Error::Config(e.to_string()))
    }

    /// Copy with one numeric key replaced.
    pub fn with_value(&self, key: &str, value: f64) -> Result<Self> {
        let mut f = self.file.clone();
        let count = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(Error::Config(format!("{key} must be a non-negative integer, got {v}")))
            }
        };
        match key {
            "n_r" => f.n_r = count(value)?,
            "n_j" => f.n_j = count(value)?,
            "training_len" => f.training_len = count(value)?,
            "trials" => f.trials = count(value)?,
            "theta_t_deg" => f.theta_t_deg = value,
            "theta_j_deg" => f.theta_j_deg = value,
            "k_t_db" => f.k_t_db = value,
            "k_j_db" => f.k_j_db = value,
            "snr_db" => f.snr_db = value,
            "power_ratio" => f.power_ratio = value,
            "spacing_wavelengths" => f.spacing_wavelengths = value,
            "phi_j_deg" => f.phi_j_deg = value,
            "grid_start_deg" => f.grid_start_deg = value,
            "grid_stop_deg" => f.grid_stop_deg = value,
            "grid_step_deg" => f.grid_step_deg = value,
            other => {
                return Err(Error::Config(format!(
                    "unknown sweep parameter `{other}` (expected one of {})",
                    SWEEP_PARAMETERS.join(", ")
                )))
            }
        }
        Self::from_file(f)
    }

    pub fn with_seed(&self, seed: u64) -> Result<Self> {
        let mut f = self.file.clone();
        f.seed = seed;
        Self::from_file(f)
    }

    pub fn with_trials(&self, trials: usize) -> Result<Self> {
        let mut f = self.file.clone();
        f.trials = trials;
        Self::from_file(f)
    }
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn finite(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{key} must be finite, got {v}")))
    }
}

fn angle(key: &str, deg: f64) -> Result<f64> {
    let deg = finite(key, deg)?;
    if deg.abs() > 90.0 {
        return Err(Error::Config(format!("{key} must lie in [-90, 90], got {deg}")));
    }
    Ok(deg.to_radians())
}

fn k_factor(key: &str, db: f64) -> Result<f64> {
    if db.is_nan() {
        return Err(Error::Config(format!("{key} is NaN")));
    }
    Ok(db_to_linear(db))
}

fn to_scenario(f: &ConfigFile) -> Result<Scenario> {
    let spacing = finite("spacing_wavelengths", f.spacing_wavelengths)?;
    let geometry = |key: &str, n: usize| {
        ArrayGeometry::new(n, spacing, 1.0).map_err(|e| Error::Config(format!("{key}: {e}")))
    };
    let grid = AngleGrid::degrees(f.grid_start_deg, f.grid_stop_deg, f.grid_step_deg)
        .map_err(|e| Error::Config(format!("grid: {e}")))?;
    let s = Scenario {
        rx: geometry("n_r", f.n_r)?,
        jammer: geometry("n_j", f.n_j)?,
        theta_t: angle("theta_t_deg", f.theta_t_deg)?,
        theta_j: angle("theta_j_deg", f.theta_j_deg)?,
        phi_j: angle("phi_j_deg", f.phi_j_deg)?,
        k_t: k_factor("k_t_db", f.k_t_db)?,
        k_j: k_factor("k_j_db", f.k_j_db)?,
        training_len: f.training_len,
        snr_db: finite("snr_db", f.snr_db)?,
        power_ratio: f.power_ratio,
        jammer_mode: f.jammer_mode,
        receiver_knowledge: f.receiver_knowledge,
        trials: f.trials,
        seed: Seed(f.seed),
        block_fading: f.block_fading,
        grid,
        refine: f.refine,
    };
    s.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(s)
}
