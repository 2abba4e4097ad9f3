//! Run configuration: a sectioned TOML file plus command-line overrides.
//!
//! ```toml
//! [code]
//! N = 1024
//! k = 512
//! method = "gaussian_approx"    # bhattacharyya | gaussian_approx
//! design_param = 0.0            # erasure probability or design Es/N0 (dB)
//! crc = 24                      # 0, 8, 11, 16 or 24
//! good_threshold = 0.0
//! # spec_file = "code.spec"     # load a constructed code instead
//! # sequence_file = "seq.txt"   # reliability order, least reliable first
//!
//! [decoder]
//! profile = "flexible"          # sc | flexible | ultra
//! L = 8
//! selection = "crc_aided"       # best_pm | crc_aided | parity_check
//!
//! [quant]                       # optional, defaults follow the profile
//! scale = 0.5
//!
//! [channel]
//! domain = "quantized"          # quantized | float
//! rng = "chacha8"
//!
//! [campaign]
//! snr_db = [1.5, 1.75, 2.0]     # Es/N0
//! frames = 1000000
//! max_errors = 100
//! seed = 1
//!
//! [output]
//! path = "fer.csv"              # stdout when absent
//! format = "csv"                # csv | json
//! ```
//!
//! Every key can be overridden with `--set section.key=value`, where the
//! value uses TOML syntax (bare words are taken as strings). Overrides are
//! applied in order after the file, so the last one wins.

use std::path::{Path, PathBuf};

use polar_core::channel::{ChannelConfig, LlrDomain};
use polar_core::cycle::ArchParams;
use polar_core::polar_code::{construct_code, construct_from_sequence, ConstructionMethod, CrcSpec};
use polar_core::{CodeSpec, DecoderKind, DecoderProfile, QuantProfile, Selection, Shortcuts};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Invalid configuration, reported with the offending section and key.
#[derive(Debug, thiserror::Error)]
#[error("config error in `{key}`: {reason}")]
pub struct ConfigError {
    pub key: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, reason: impl ToString) -> Self {
        ConfigError { key: key.into(), reason: reason.to_string() }
    }
}

/// Turns a core validation error into a config error naming its section.
fn core_err(section: &str, e: polar_core::Error) -> ConfigError {
    match e {
        polar_core::Error::InvalidParameter { name, reason } => {
            let key = if name.contains('.') { name.to_string() } else { format!("{section}.{name}") };
            ConfigError::new(key, reason)
        }
        other => ConfigError::new(section, other),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CodeSection {
    #[serde(rename = "N")]
    pub len: usize,
    pub k: usize,
    pub method: ConstructionMethod,
    pub design_param: f64,
    /// CRC width; 0 for none.
    pub crc: u32,
    pub good_threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence_file: Option<PathBuf>,
}

impl Default for CodeSection {
    fn default() -> Self {
        CodeSection {
            len: 1024,
            k: 512,
            method: ConstructionMethod::Bhattacharyya,
            design_param: 0.5,
            crc: 0,
            good_threshold: 0.0,
            spec_file: None,
            sequence_file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecoderSection {
    pub profile: DecoderKind,
    #[serde(rename = "L")]
    pub list_size: usize,
    pub selection: Selection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub storage_stride: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leaf_width: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shortcuts: Option<Shortcuts>,
}

impl Default for DecoderSection {
    fn default() -> Self {
        DecoderSection {
            profile: DecoderKind::Flexible,
            list_size: 8,
            selection: Selection::BestPm,
            storage_stride: None,
            leaf_width: None,
            shortcuts: None,
        }
    }
}

/// Partial quantization override; missing keys follow the profile.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuantSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_c: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_i: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_i_stage0: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_sort: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_pm: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

/// Partial architecture override; missing keys follow the profile.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArchSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pe_count_serial: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallel_threshold: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles_per_pe_pass: Option<u32>,
    /// Sorter latency for the configured list size.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sort_latency: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallel_unit_latency: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallel_paths: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num_cores: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_clk: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelSection {
    pub domain: LlrDomain,
    /// Random generator; only `chacha8` is implemented.
    pub rng: String,
}

impl Default for ChannelSection {
    fn default() -> Self {
        ChannelSection { domain: LlrDomain::Quantized, rng: "chacha8".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CampaignSection {
    /// Es/N0 points in dB.
    pub snr_db: Vec<f64>,
    pub frames: u64,
    pub max_errors: u64,
    pub seed: u64,
}

impl Default for CampaignSection {
    fn default() -> Self {
        CampaignSection { snr_db: vec![1.0, 1.5, 2.0], frames: 100_000, max_errors: 100, seed: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { path: None, format: OutputFormat::Csv }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub code: CodeSection,
    pub decoder: DecoderSection,
    pub quant: QuantSection,
    pub arch: ArchSection,
    pub channel: ChannelSection,
    pub campaign: CampaignSection,
    pub output: OutputSection,
}

/// Parses the right-hand side of an override: TOML syntax, falling back to
/// a bare string.
fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&doc) {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Applies one `section.key=value` override to a raw table.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), ConfigError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::new(assignment, "override must look like section.key=value"))?;
    let path = path.trim();
    let keys: Vec<&str> = path.split('.').collect();
    if keys.len() < 2 || keys.iter().any(|k| k.is_empty()) {
        return Err(ConfigError::new(path, "override key must be section.key"));
    }
    let mut node = table;
    for k in &keys[..keys.len() - 1] {
        let entry = node.entry(k.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| ConfigError::new(path, format!("`{k}` is not a section")))?;
    }
    node.insert(keys[keys.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

impl RunConfig {
    /// Reads `file` (if any) and applies `overrides` in order.
    pub fn load(file: Option<&Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut table = match file {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| ConfigError::new("config", format!("{}: {e}", p.display())))?;
                toml::from_str::<toml::Table>(&text).map_err(|e| ConfigError::new("config", e.message()))?
            }
            None => toml::Table::new(),
        };
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: RunConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| {
            ConfigError::new("config", e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every section before any work starts.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.code.spec_file.is_none() {
            if ![0, 8, 11, 16, 24].contains(&self.code.crc) {
                return Err(ConfigError::new("code.crc", format!("no CRC preset of width {}", self.code.crc)));
            }
            if !(0.0..=1.0).contains(&self.code.good_threshold) {
                return Err(ConfigError::new("code.good_threshold", "must be within [0, 1]"));
            }
        }
        let profile = self.profile()?;
        profile.validate().map_err(|e| core_err("decoder", e))?;
        let l = self.decoder.list_size;
        if !l.is_power_of_two() || l > profile.l_max {
            return Err(ConfigError::new(
                "decoder.L",
                format!("{l} is not a power of two in 1..={} for the {:?} profile", profile.l_max, profile.kind),
            ));
        }
        self.arch()?.validate().map_err(|e| core_err("arch", e))?;
        if self.channel.rng != "chacha8" {
            return Err(ConfigError::new("channel.rng", format!("unsupported generator `{}`", self.channel.rng)));
        }
        self.channel_config().validate().map_err(|e| core_err("campaign", e))?;
        if self.campaign.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(ConfigError::new("campaign.snr_db", "points must be finite"));
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<DecoderProfile, ConfigError> {
        let d = &self.decoder;
        let mut p = DecoderProfile::for_kind(d.profile).with_selection(d.selection);
        if let Some(s) = d.storage_stride {
            p = p.with_stride(s);
        }
        if let Some(w) = d.leaf_width {
            p.leaf_width = w;
        }
        if let Some(s) = d.shortcuts {
            p = p.with_shortcuts(s);
        }
        let q = &self.quant;
        p.quant = QuantProfile {
            q_c: q.q_c.unwrap_or(p.quant.q_c),
            q_i: q.q_i.unwrap_or(p.quant.q_i),
            q_i_stage0: q.q_i_stage0.unwrap_or(p.quant.q_i_stage0),
            q_sort: q.q_sort.unwrap_or(p.quant.q_sort),
            q_pm: q.q_pm.unwrap_or(p.quant.q_pm),
            scale: q.scale.unwrap_or(p.quant.scale),
        };
        p.quant.validate().map_err(|e| core_err("quant", e))?;
        Ok(p)
    }

    pub fn arch(&self) -> Result<ArchParams, ConfigError> {
        let a = &self.arch;
        let mut p = ArchParams::for_kind(self.decoder.profile);
        p.pe_count_serial = a.pe_count_serial.unwrap_or(p.pe_count_serial);
        p.parallel_threshold = a.parallel_threshold.unwrap_or(p.parallel_threshold);
        p.cycles_per_pe_pass = a.cycles_per_pe_pass.unwrap_or(p.cycles_per_pe_pass);
        p.parallel_unit_latency = a.parallel_unit_latency.unwrap_or(p.parallel_unit_latency);
        p.parallel_paths = a.parallel_paths.unwrap_or(p.parallel_paths);
        p.num_cores = a.num_cores.unwrap_or(p.num_cores);
        p.f_clk = a.f_clk.unwrap_or(p.f_clk);
        if let Some(c) = a.sort_latency {
            p.sort_latency.insert(self.decoder.list_size, c);
        }
        Ok(p)
    }

    pub fn channel_config(&self) -> ChannelConfig {
        ChannelConfig {
            seed: self.campaign.seed,
            frames: self.campaign.frames,
            max_errors: self.campaign.max_errors,
            domain: self.channel.domain,
        }
    }

    /// Builds (or loads) the code.
    pub fn code(&self) -> Result<CodeSpec, ConfigError> {
        let c = &self.code;
        if let Some(path) = &c.spec_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::new("code.spec_file", format!("{}: {e}", path.display())))?;
            return CodeSpec::from_file_str(&text).map_err(|e| ConfigError::new("code.spec_file", e));
        }
        let base = match &c.sequence_file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| ConfigError::new("code.sequence_file", format!("{}: {e}", path.display())))?;
                let seq = text
                    .split_whitespace()
                    .map(|t| t.parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| ConfigError::new("code.sequence_file", e))?;
                construct_from_sequence(c.len, c.k, &seq).map_err(|e| core_err("code", e))?
            }
            None => construct_code(c.len, c.k, c.method, c.design_param).map_err(|e| core_err("code", e))?,
        };
        let crc = match c.crc {
            0 => None,
            w => Some(CrcSpec::preset(w).map_err(|e| core_err("code", e))?),
        };
        base.with_crc(crc)
            .and_then(|s| s.with_good_threshold(c.good_threshold))
            .map_err(|e| core_err("code", e))
    }

    /// Canonical TOML of the effective configuration.
    pub fn render(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of [`RunConfig::render`], hex encoded.
    pub fn hash(&self) -> String {
        Sha256::digest(self.render().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn overrides_last_wins() {
        let sets = vec!["decoder.L=4".to_string(), "decoder.L=2".into(), "channel.domain=float".into()];
        let cfg = RunConfig::load(None, &sets).unwrap();
        assert_eq!(cfg.decoder.list_size, 2);
        assert_eq!(cfg.channel.domain, LlrDomain::Float);
    }

    #[test]
    fn unknown_keys_name_the_section() {
        let err = RunConfig::load(None, &["decoder.bogus=1".into()]).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        let err = RunConfig::load(None, &["decoder.L=3".into()]).unwrap_err();
        assert_eq!(err.key, "decoder.L");
        let err = RunConfig::load(None, &["quant.q_c=12".into()]).unwrap_err();
        assert_eq!(err.key, "quant.q_c");
    }

    #[test]
    fn render_round_trips_and_hash_is_stable() {
        let cfg = RunConfig::load(None, &["campaign.snr_db=[0.5, 1.0]".into(), "code.crc=24".into()]).unwrap();
        let back: RunConfig = toml::from_str(&cfg.render()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 64);
    }
}
