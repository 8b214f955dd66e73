use std::path::{Path, PathBuf};

use periodic_loss::estimate::{ingest_kpi, weekly_profile, Fold};
use periodic_loss::stochastic::{GeneralDensity, InterArrivalModel, MaintenanceModel};
use periodic_loss::utility::{NoiseModel, PeriodicProfile};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Cell,
    Network,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterArrivalChoice {
    Exponential,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaintenanceChoice {
    Exponential,
    Lognormal,
    Mixture,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileChoice {
    Sinusoid,
    Constant,
    Kpi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseChoice {
    None,
    Ou,
    White,
}

/// One study, read from a flat TOML file. Every key is optional; unknown keys
/// are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyConfig {
    pub scenario: String,
    pub mode: Mode,

    pub interarrival: InterArrivalChoice,
    /// Per-cell anomaly rate (per hour) for exponential up-times.
    pub lambda: f64,
    pub uniform_low: f64,
    pub uniform_high: f64,

    pub maintenance: MaintenanceChoice,
    /// Exponential repair rate; give this or `mean_y`.
    pub mu: Option<f64>,
    pub mean_y: Option<f64>,
    pub lognormal_mu: f64,
    pub lognormal_sigma: f64,
    pub repair_samples: Vec<f64>,

    pub profile: ProfileChoice,
    pub amplitude: f64,
    pub offset: f64,
    pub period: f64,
    pub level: f64,
    pub kpi_path: Option<PathBuf>,
    pub kpi_fold: Fold,

    pub noise: NoiseChoice,
    pub noise_theta: f64,
    pub noise_sigma: f64,
    pub noise_dt: f64,

    pub n_cells: usize,
    pub replications: usize,
    pub seed: u64,
    pub cycles: usize,
    pub horizon: f64,
    pub grid_step: f64,
    pub threshold: f64,
    pub fourier_terms: usize,
    /// Refuse studies whose simulated work (cycles or cell-hours, times noise
    /// steps) exceeds this.
    pub max_work: f64,
    pub output_dir: PathBuf,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            scenario: "paper-single-cell".into(),
            mode: Mode::Cell,
            interarrival: InterArrivalChoice::Exponential,
            lambda: 0.019,
            uniform_low: 0.0,
            uniform_high: 100.0,
            maintenance: MaintenanceChoice::Exponential,
            mu: Some(0.47),
            mean_y: None,
            lognormal_mu: 0.0,
            lognormal_sigma: 1.0,
            repair_samples: Vec::new(),
            profile: ProfileChoice::Sinusoid,
            amplitude: 1.75,
            offset: 3.0,
            period: 24.0,
            level: 1.0,
            kpi_path: None,
            kpi_fold: Fold::Weekly,
            noise: NoiseChoice::None,
            noise_theta: 1.0,
            noise_sigma: 0.01,
            noise_dt: 0.05,
            n_cells: 1,
            replications: 100,
            seed: 1,
            cycles: 2000,
            horizon: 400.0,
            grid_step: 1.0,
            threshold: 0.10,
            fourier_terms: periodic_loss::stochastic::DEFAULT_TERMS,
            max_work: 1e10,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn field(name: &'static str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("field `{name}`: {reason}"))
}

fn positive(name: &'static str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(field(name, format!("must be > 0, got {v}")))
    }
}

impl StudyConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// SHA-256 of the canonical JSON form, leaving out `output_dir` so the
    /// same study hashes alike wherever it is written.
    pub fn hash(&self) -> String {
        let study = Self {
            output_dir: PathBuf::new(),
            ..self.clone()
        };
        let canonical = serde_json::to_vec(&study).expect("config serialises");
        hex::encode(Sha256::digest(&canonical))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.interarrival_model()?;
        self.maintenance_model()?;
        if self.profile != ProfileChoice::Kpi {
            self.profile_model()?;
        } else if self.kpi_path.is_none() {
            return Err(field("kpi_path", "required when profile = \"kpi\""));
        }
        self.noise_model()?;
        if self.n_cells == 0 {
            return Err(field("n_cells", "must be at least 1"));
        }
        if self.replications == 0 {
            return Err(field("replications", "must be at least 1"));
        }
        if self.cycles == 0 {
            return Err(field("cycles", "must be at least 1"));
        }
        positive("horizon", self.horizon)?;
        positive("grid_step", self.grid_step)?;
        if self.grid_step > self.horizon {
            return Err(field("grid_step", "longer than the horizon"));
        }
        positive("threshold", self.threshold)?;
        positive("max_work", self.max_work)?;
        if self.fourier_terms < 100 {
            return Err(field("fourier_terms", "must be at least 100"));
        }
        Ok(())
    }

    pub fn interarrival_model(&self) -> Result<InterArrivalModel, CliError> {
        match self.interarrival {
            InterArrivalChoice::Exponential => {
                InterArrivalModel::exponential(positive("lambda", self.lambda)?)
                    .map_err(|e| field("lambda", e))
            }
            InterArrivalChoice::Uniform => InterArrivalModel::general(GeneralDensity::Uniform {
                low: self.uniform_low,
                high: self.uniform_high,
            })
            .map_err(|e| field("uniform_low/uniform_high", e)),
        }
    }

    pub fn maintenance_model(&self) -> Result<MaintenanceModel, CliError> {
        match self.maintenance {
            MaintenanceChoice::Exponential => {
                let rate = match (self.mu, self.mean_y) {
                    (Some(mu), None) => positive("mu", mu)?,
                    (None, Some(m)) => 1.0 / positive("mean_y", m)?,
                    _ => return Err(field("mu", "give exactly one of `mu` and `mean_y`")),
                };
                MaintenanceModel::exponential(rate).map_err(|e| field("mu", e))
            }
            MaintenanceChoice::Lognormal => {
                MaintenanceModel::lognormal(self.lognormal_mu, self.lognormal_sigma)
                    .map_err(|e| field("lognormal_sigma", e))
            }
            MaintenanceChoice::Mixture => Ok(MaintenanceModel::paper_mixture()),
            MaintenanceChoice::Empirical => {
                MaintenanceModel::empirical(self.repair_samples.clone())
                    .map_err(|e| field("repair_samples", e))
            }
        }
    }

    /// The utility profile; KPI profiles are estimated from `kpi_path`.
    pub fn profile_model(&self) -> Result<PeriodicProfile, CliError> {
        match self.profile {
            ProfileChoice::Sinusoid => {
                PeriodicProfile::sinusoid(self.amplitude, self.offset, self.period)
                    .map_err(|e| field("amplitude/offset/period", e))
            }
            ProfileChoice::Constant => PeriodicProfile::constant(self.level, self.period)
                .map_err(|e| field("level/period", e)),
            ProfileChoice::Kpi => {
                let path = self
                    .kpi_path
                    .as_ref()
                    .ok_or_else(|| field("kpi_path", "missing"))?;
                let kpi = ingest_kpi(path).map_err(CliError::Data)?;
                Ok(weekly_profile(&kpi.records, self.kpi_fold)
                    .map_err(CliError::Data)?
                    .profile)
            }
        }
    }

    pub fn noise_model(&self) -> Result<NoiseModel, CliError> {
        match self.noise {
            NoiseChoice::None => Ok(NoiseModel::NONE),
            NoiseChoice::Ou => NoiseModel::ou(self.noise_theta, self.noise_sigma, self.noise_dt)
                .map_err(|e| field("noise_theta/noise_sigma/noise_dt", e)),
            NoiseChoice::White => NoiseModel::white(self.noise_sigma, self.noise_dt)
                .map_err(|e| field("noise_sigma/noise_dt", e)),
        }
    }

    /// Simulated work of `simulate`: cycles or cell-hours per replication,
    /// scaled by noise steps per hour when noise is on.
    pub fn work(&self) -> f64 {
        let per_rep = match self.mode {
            Mode::Cell => self.cycles as f64,
            Mode::Network => self.n_cells as f64 * self.horizon,
        };
        let noise = match self.noise {
            NoiseChoice::None => 1.0,
            _ => 1.0 + 1.0 / self.noise_dt,
        };
        per_rep * self.replications as f64 * noise
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        StudyConfig::default().validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = StudyConfig::parse("lambda = 0.02\nlamda = 1\n").unwrap_err();
        assert!(matches!(err, CliError::Config(m) if m.contains("lamda")));
    }

    #[test]
    fn field_level_messages() {
        let err = StudyConfig::parse("lambda = -1.0\n").unwrap_err();
        assert!(matches!(err, CliError::Config(m) if m.contains("`lambda`")));
        let err = StudyConfig::parse("mean_y = 2.0\n").unwrap_err();
        assert!(matches!(err, CliError::Config(m) if m.contains("exactly one")));
    }

    #[test]
    fn round_trips_and_hashes() {
        let cfg =
            StudyConfig::parse("mode = \"network\"\nn_cells = 660\nhorizon = 400.0\n").unwrap();
        assert_eq!(cfg.mode, Mode::Network);
        let again = StudyConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.hash(), again.hash());
        assert_ne!(cfg.hash(), StudyConfig::default().hash());
    }
}
