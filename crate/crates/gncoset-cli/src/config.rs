//! Experiment configuration: a TOML file that pins everything an experiment
//! needs, so a run is reproducible from (config, seed) alone.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use gncoset::{construct_reserved, CodeSpec, DampingSchedule, Graph, StopRule};

use crate::CliError;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub code: CodeSection,
    pub decoder: DecoderSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSection>,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ga: Option<GaSection>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSection {
    pub n: usize,
    pub construction: Construction,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design_snr_db: Option<f64>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub reserved_rows: usize,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub reserved_cols: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec_path: Option<PathBuf>,
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    Ga,
    File,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderSection {
    #[serde(default = "default_t_max")]
    pub t_max: usize,
    pub schedule: ScheduleSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule_path: Option<PathBuf>,
    #[serde(default = "default_start_graph")]
    pub start_graph: StartGraph,
    #[serde(default)]
    pub early_exit: bool,
}

fn default_t_max() -> usize {
    8
}

fn default_start_graph() -> StartGraph {
    StartGraph::Rows
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleSource {
    Table2,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StartGraph {
    Rows,
    Cols,
}

impl From<StartGraph> for Graph {
    fn from(g: StartGraph) -> Self {
        match g {
            StartGraph::Rows => Graph::Rows,
            StartGraph::Cols => Graph::Cols,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_list_db: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_range: Option<SnrRange>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SnrRange {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default = "default_max_frames")]
    pub max_frames: u64,
    #[serde(default = "default_target_block_errors")]
    pub target_block_errors: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Worker threads (0 = library default). Never echoed into outputs:
    /// results do not depend on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            max_frames: default_max_frames(),
            target_block_errors: default_target_block_errors(),
            seed: default_seed(),
            workers: None,
        }
    }
}

fn default_max_frames() -> u64 {
    100_000
}

fn default_target_block_errors() -> u64 {
    50
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GaSection {
    #[serde(default = "default_population")]
    pub population: usize,
    #[serde(default = "default_v_sup")]
    pub v_sup: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_p_mutate")]
    pub p_mutate: f64,
    #[serde(default = "default_sigma_mutate")]
    pub sigma_mutate: f64,
    #[serde(default = "default_t_max")]
    pub t_max: usize,
    #[serde(default = "default_max_generations")]
    pub max_generations: usize,
    #[serde(default = "default_clip_negative")]
    pub clip_negative: bool,
    pub target_bler: f64,
    pub lo_db: f64,
    pub hi_db: f64,
    #[serde(default = "default_tol_db")]
    pub tol_db: f64,
}

fn default_population() -> usize {
    32
}

fn default_v_sup() -> f64 {
    2.0
}

fn default_lambda() -> f64 {
    0.01
}

fn default_p_mutate() -> f64 {
    0.07
}

fn default_sigma_mutate() -> f64 {
    0.3
}

fn default_max_generations() -> usize {
    100
}

fn default_clip_negative() -> bool {
    true
}

fn default_tol_db() -> f64 {
    0.05
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::input(format!("cannot read config {}: {e}", path.display()))
        })?;
        let cfg: ExperimentConfig = toml::from_str(&text)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        match self.code.construction {
            Construction::Ga => {
                if self.code.k.is_none() || self.code.design_snr_db.is_none() {
                    return Err(CliError::input(
                        "construction = \"ga\" requires code.K and code.design_snr_db",
                    ));
                }
                if self.code.spec_path.is_some() {
                    return Err(CliError::input(
                        "code.spec_path conflicts with construction = \"ga\"",
                    ));
                }
            }
            Construction::File => {
                let path = self.code.spec_path.as_ref().ok_or_else(|| {
                    CliError::input("construction = \"file\" requires code.spec_path")
                })?;
                if !path.exists() {
                    return Err(CliError::input(format!(
                        "code.spec_path {} does not exist",
                        path.display()
                    )));
                }
                if self.code.k.is_some() || self.code.design_snr_db.is_some() {
                    return Err(CliError::input(
                        "code.K / code.design_snr_db conflict with construction = \"file\"",
                    ));
                }
                if self.code.reserved_rows != 0 || self.code.reserved_cols != 0 {
                    return Err(CliError::input(
                        "code.reserved_rows / code.reserved_cols conflict with construction = \"file\"",
                    ));
                }
            }
        }
        match self.decoder.schedule {
            ScheduleSource::Table2 => {
                if self.decoder.schedule_path.is_some() {
                    return Err(CliError::input(
                        "decoder.schedule_path conflicts with schedule = \"table2\"",
                    ));
                }
            }
            ScheduleSource::File => {
                let path = self.decoder.schedule_path.as_ref().ok_or_else(|| {
                    CliError::input("schedule = \"file\" requires decoder.schedule_path")
                })?;
                if !path.exists() {
                    return Err(CliError::input(format!(
                        "decoder.schedule_path {} does not exist",
                        path.display()
                    )));
                }
            }
        }
        if let Some(ch) = &self.channel {
            match (&ch.snr_list_db, &ch.snr_range) {
                (Some(_), Some(_)) | (None, None) => {
                    return Err(CliError::input(
                        "channel needs exactly one of snr_list_db or snr_range",
                    ));
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn resolve_spec(&self) -> Result<CodeSpec, CliError> {
        match self.code.construction {
            Construction::Ga => Ok(construct_reserved(
                self.code.n,
                self.code.k.unwrap(),
                self.code.design_snr_db.unwrap(),
                self.code.reserved_rows,
                self.code.reserved_cols,
            )?),
            Construction::File => {
                let spec = CodeSpec::from_file(self.code.spec_path.as_ref().unwrap())?;
                if spec.n() != self.code.n {
                    return Err(CliError::input(format!(
                        "config says n = {} but spec file has n = {}",
                        self.code.n,
                        spec.n()
                    )));
                }
                Ok(spec)
            }
        }
    }

    pub fn resolve_schedule(&self) -> Result<DampingSchedule, CliError> {
        let sched = match self.decoder.schedule {
            ScheduleSource::Table2 => DampingSchedule::table2(),
            ScheduleSource::File => {
                DampingSchedule::from_file(self.decoder.schedule_path.as_ref().unwrap())?
            }
        };
        if sched.t_max() < self.decoder.t_max {
            return Err(CliError::input(format!(
                "schedule covers {} iterations but decoder.t_max = {}",
                sched.t_max(),
                self.decoder.t_max
            )));
        }
        Ok(sched)
    }

    pub fn snr_points(&self) -> Result<Vec<f64>, CliError> {
        let ch = self
            .channel
            .as_ref()
            .ok_or_else(|| CliError::input("missing [channel] section"))?;
        if let Some(list) = &ch.snr_list_db {
            if list.is_empty() {
                return Err(CliError::input("channel.snr_list_db is empty"));
            }
            return Ok(list.clone());
        }
        let r = ch.snr_range.unwrap();
        if !(r.step_db > 0.0) || r.stop_db < r.start_db {
            return Err(CliError::input(format!(
                "bad snr_range: start {} stop {} step {}",
                r.start_db, r.stop_db, r.step_db
            )));
        }
        let mut points = Vec::new();
        let mut i = 0u32;
        loop {
            let p = r.start_db + f64::from(i) * r.step_db;
            if p > r.stop_db + 1e-9 {
                break;
            }
            points.push(p);
            i += 1;
        }
        Ok(points)
    }

    pub fn stop_rule(&self) -> StopRule {
        StopRule {
            max_frames: self.sim.max_frames,
            target_block_errors: self.sim.target_block_errors,
        }
    }

    /// The config as `# `-prefixed TOML lines for output headers. Worker
    /// count is omitted so outputs stay byte-identical across machines.
    pub fn echo_comments(&self) -> String {
        let mut clone = self.clone();
        clone.sim.workers = None;
        let toml = toml::to_string(&clone).expect("config serializes");
        let mut out = String::new();
        for line in toml.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}
