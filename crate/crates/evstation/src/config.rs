//! Run and batch configuration files (TOML).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use evstation_core::scenario::{
    placeholder_distributions, synth_pv, CountModel, Distributions, DomainUnit, PvPreset,
};
use evstation_core::seed::{rng_for, tag_hash};
use evstation_core::{Strategy, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::{load_distribution_csv, load_pv_csv};

/// Seed path component for synthetic PV, kept apart from run seeds.
const PV_STREAM: u64 = 0x5056;

/// Station, scenario and input-file settings shared by `simulate` and
/// `sweep`. Relative paths are resolved against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub horizon_days: u32,
    pub count_model: CountModel,
    pub system: SystemConfig,
    /// User tables; the bundled placeholders are used when absent.
    pub distributions: Option<DistributionFiles>,
    /// PV source per season tag. `june`, `september` and `november` fall
    /// back to built-in synthetic presets.
    pub seasons: BTreeMap<String, SeasonSource>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            horizon_days: 14,
            count_model: CountModel::Poisson,
            system: SystemConfig::default(),
            distributions: None,
            seasons: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionFiles {
    pub arrival: PathBuf,
    #[serde(default = "hours")]
    pub arrival_unit: DomainUnit,
    pub duration: PathBuf,
    #[serde(default = "minutes")]
    pub duration_unit: DomainUnit,
    pub energy: PathBuf,
    #[serde(default = "kwh")]
    pub energy_unit: DomainUnit,
}

fn hours() -> DomainUnit {
    DomainUnit::Hours
}
fn minutes() -> DomainUnit {
    DomainUnit::Minutes
}
fn kwh() -> DomainUnit {
    DomainUnit::Kwh
}

/// Exactly one of a measured series or a synthetic preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeasonSource {
    pub pv_csv: Option<PathBuf>,
    pub preset: Option<PvPreset>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatchSection {
    pub strategies: Vec<Strategy>,
    pub seasons: Vec<String>,
    pub evs_per_day: Vec<f64>,
    pub runs_per_cell: u32,
    pub base_seed: u64,
    pub workers: usize,
}

impl Default for BatchSection {
    fn default() -> Self {
        Self {
            strategies: Strategy::ALL.to_vec(),
            seasons: ["june", "september", "november"].map(String::from).to_vec(),
            evs_per_day: vec![1.0, 5.0, 10.0, 15.0, 20.0, 30.0],
            runs_per_cell: 500,
            base_seed: 0,
            workers: 1,
        }
    }
}

/// A `sweep` file: a run configuration plus a `[batch]` table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchFile {
    #[serde(flatten)]
    pub run: RunConfig,
    pub batch: BatchSection,
}

impl std::str::FromStr for BatchFile {
    type Err = toml::de::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut table: toml::Table = toml::from_str(s)?;
        let batch = match table.remove("batch") {
            Some(v) => v.try_into()?,
            None => BatchSection::default(),
        };
        Ok(Self {
            run: table.try_into()?,
            batch,
        })
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: Self = toml::from_str(&read_file(path)?)
            .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        cfg.resolve_paths(&base_dir(path));
        Ok(cfg)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        if let Some(d) = &mut self.distributions {
            for p in [&mut d.arrival, &mut d.duration, &mut d.energy] {
                *p = dir.join(&*p);
            }
        }
        for s in self.seasons.values_mut() {
            if let Some(p) = &mut s.pv_csv {
                *p = dir.join(&*p);
            }
        }
    }

    /// Validates everything and loads the referenced input files.
    pub fn prepare(&self) -> Result<Prepared> {
        let system = self
            .system
            .clone()
            .validate()
            .map_err(|e| Error::config(e.to_string()))?;
        if self.horizon_days == 0 {
            return Err(Error::config("horizon_days must be at least 1"));
        }
        for (tag, s) in &self.seasons {
            if s.pv_csv.is_some() == s.preset.is_some() {
                return Err(Error::config(format!(
                    "season `{tag}` needs exactly one of `pv_csv` or `preset`"
                )));
            }
        }
        let dists = match &self.distributions {
            None => placeholder_distributions(),
            Some(f) => load_distributions(f)?,
        };
        Ok(Prepared {
            system,
            horizon_days: self.horizon_days,
            count_model: self.count_model,
            dists: Arc::new(dists),
            seasons: self.seasons.clone(),
        })
    }
}

impl BatchFile {
    pub fn load(path: &Path) -> Result<Self> {
        let mut f: Self = read_file(path)?
            .parse()
            .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        f.run.resolve_paths(&base_dir(path));
        Ok(f)
    }
}

fn load_distributions(f: &DistributionFiles) -> Result<Distributions> {
    let table = |path: &Path, unit: DomainUnit, want: DomainUnit| {
        load_distribution_csv(path, unit)?
            .converted(want)
            .map_err(|_| {
                Error::config(format!(
                    "{}: unit {unit:?} cannot express {want:?}",
                    path.display()
                ))
            })
    };
    Ok(Distributions {
        arrival: table(&f.arrival, f.arrival_unit, DomainUnit::Hours)?,
        duration: table(&f.duration, f.duration_unit, DomainUnit::Minutes)?,
        energy: table(&f.energy, f.energy_unit, DomainUnit::Kwh)?,
        placeholder: false,
    })
}

/// A validated configuration with its input tables loaded.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub system: SystemConfig,
    pub horizon_days: u32,
    pub count_model: CountModel,
    pub dists: Arc<Distributions>,
    seasons: BTreeMap<String, SeasonSource>,
}

impl Prepared {
    pub fn horizon_minutes(&self) -> usize {
        self.horizon_days as usize * 1440
    }

    /// PV series for `season` over the horizon. Synthetic series are drawn
    /// once per season from `base_seed`, so every run of a season sees the
    /// same weather.
    pub fn pv_for(&self, season: &str, base_seed: u64) -> Result<Arc<[f64]>> {
        let n = self.horizon_minutes();
        let preset = match self.seasons.get(season) {
            Some(SeasonSource {
                pv_csv: Some(path), ..
            }) => {
                let mut pv = load_pv_csv(path)?;
                if pv.len() < n {
                    return Err(Error::Scenario(format!(
                        "{}: {} minutes of PV, horizon needs {n}",
                        path.display(),
                        pv.len()
                    )));
                }
                pv.truncate(n);
                return Ok(pv.into());
            }
            Some(SeasonSource {
                preset: Some(p), ..
            }) => *p,
            _ => PvPreset::for_season(season)
                .ok_or_else(|| Error::config(format!("unknown season `{season}`")))?,
        };
        let mut rng = rng_for(base_seed, &[tag_hash(season), PV_STREAM]);
        Ok(synth_pv(&preset, self.horizon_days, &mut rng).into())
    }

    /// Describes where a season's PV comes from, for metadata.
    pub fn pv_source(&self, season: &str) -> String {
        match self.seasons.get(season) {
            Some(SeasonSource {
                pv_csv: Some(p), ..
            }) => p.display().to_string(),
            Some(SeasonSource {
                preset: Some(_), ..
            }) => "synthetic (configured preset)".into(),
            _ => "synthetic (built-in preset)".into(),
        }
    }
}
