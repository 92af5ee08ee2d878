//! The JSON run configuration accepted by `--config`.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use backbone_lab::backboning::DEFAULT_FRACTIONS;
use backbone_lab::lab::{GridConfig, YcnSettings};
use backbone_lab::{BackboneMethod, ProjectionMethod, Side, SyntheticParams};
use serde::{Deserialize, Serialize};

use crate::Failure;

/// Generator parameters inside a run configuration. The generator is seeded
/// with the run seed, so there is no seed here.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSection {
    pub n_left: usize,
    pub n_right: usize,
    pub left_exponent: f64,
    pub right_exponent: f64,
    pub left_min_degree: usize,
    pub right_min_degree: usize,
    pub target_disassortativity: f64,
}

impl Default for SyntheticSection {
    fn default() -> Self {
        let p = SyntheticParams::default();
        Self {
            n_left: p.n_left,
            n_right: p.n_right,
            left_exponent: p.left_exponent,
            right_exponent: p.right_exponent,
            left_min_degree: p.left_min_degree,
            right_min_degree: p.right_min_degree,
            target_disassortativity: p.target_disassortativity,
        }
    }
}

impl SyntheticSection {
    pub fn params(&self, seed: u64) -> SyntheticParams {
        SyntheticParams {
            n_left: self.n_left,
            n_right: self.n_right,
            left_exponent: self.left_exponent,
            right_exponent: self.right_exponent,
            left_min_degree: self.left_min_degree,
            right_min_degree: self.right_min_degree,
            target_disassortativity: self.target_disassortativity,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub synthetic: Option<SyntheticSection>,
    pub delimiter: char,
    pub blacklist: Vec<String>,
    pub min_multiplicity: u32,
    pub side: Side,
    pub projections: Vec<ProjectionMethod>,
    pub backbonings: Vec<BackboneMethod>,
    pub fractions: Vec<f64>,
    pub ycn: YcnSettings,
    pub histogram_bins: usize,
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            synthetic: None,
            delimiter: '\t',
            blacklist: Vec::new(),
            min_multiplicity: 1,
            side: Side::Right,
            projections: ProjectionMethod::ALL.to_vec(),
            backbonings: BackboneMethod::ALL.to_vec(),
            fractions: DEFAULT_FRACTIONS.to_vec(),
            ycn: YcnSettings::default(),
            histogram_bins: 40,
            out_dir: None,
            seed: 0,
            workers: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Failure::Usage(format!("invalid config {}: {e}", path.display())))?;
        // relative paths inside the file are relative to the file
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(input) = &config.input {
            config.input = Some(base.join(input));
        }
        if let Some(dir) = &config.out_dir {
            config.out_dir = Some(base.join(dir));
        }
        Ok(config)
    }

    pub fn grid(&self) -> GridConfig {
        GridConfig {
            projections: self.projections.clone(),
            backbonings: self.backbonings.clone(),
            fractions: self.fractions.clone(),
            side: self.side,
            seed: self.seed,
            ycn: self.ycn,
            histogram_bins: self.histogram_bins,
        }
    }

    pub fn blacklist_set(&self) -> HashSet<String> {
        self.blacklist.iter().cloned().collect()
    }
}
