//! Plain-text code spec file (TOML).
//!
//! ```toml
//! N = 8
//! k = 4
//! method = "bhattacharyya"
//! design_param = 0.5
//! frozen = [0, 1, 2, 4]
//! good = []
//! reliability = [...]
//!
//! [crc]
//! width = 8
//! poly = "0x1D5"
//! init = "0x0"
//!
//! [[pc]]
//! parity = 7
//! sources = [3, 5]
//! ```

use serde::{Deserialize, Serialize};

use super::{
    CodeSpec, ConstructionMethod, CrcSpec, ParityCheckSpec, ParityConstraint,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrcEntry {
    pub width: u32,
    /// Hex, MSB first, leading `x^width` term included.
    pub poly: String,
    #[serde(default = "zero_hex")]
    pub init: String,
}

fn zero_hex() -> String {
    "0x0".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PcEntry {
    pub parity: usize,
    pub sources: Vec<usize>,
}

/// Serialized form of a [`CodeSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpecFile {
    #[serde(rename = "N")]
    pub len: usize,
    pub k: usize,
    pub method: ConstructionMethod,
    pub design_param: f64,
    pub frozen: Vec<usize>,
    #[serde(default)]
    pub good: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reliability: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crc: Option<CrcEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pc: Vec<PcEntry>,
}

pub(crate) fn parse_hex(field: &'static str, s: &str) -> Result<u64> {
    let t = s.trim();
    let digits = t
        .strip_prefix("0x")
        .or_else(|| t.strip_prefix("0X"))
        .unwrap_or(t);
    u64::from_str_radix(digits, 16)
        .map_err(|e| Error::invalid(field, format!("bad hex `{s}`: {e}")))
}

impl CodeSpecFile {
    pub fn from_spec(spec: &CodeSpec) -> Self {
        CodeSpecFile {
            len: spec.len(),
            k: spec.k(),
            method: spec.method(),
            design_param: spec.design_param(),
            frozen: spec.frozen_positions(),
            good: spec.good_positions(),
            reliability: spec.reliability().to_vec(),
            crc: spec.crc().map(|c| CrcEntry {
                width: c.width() as u32,
                poly: format!("0x{:X}", c.poly()),
                init: format!("0x{:X}", c.init()),
            }),
            pc: spec
                .parity_checks()
                .map(|p| {
                    p.constraints
                        .iter()
                        .map(|c| PcEntry { parity: c.parity, sources: c.sources.clone() })
                        .collect()
                })
                .unwrap_or_default(),
        }
    }

    pub fn to_spec(&self) -> Result<CodeSpec> {
        let len = self.len;
        let mut frozen = vec![false; len];
        for &i in &self.frozen {
            if i >= len {
                return Err(Error::SpecFile(format!("frozen index {i} out of range")));
            }
            if frozen[i] {
                return Err(Error::SpecFile(format!("frozen index {i} listed twice")));
            }
            frozen[i] = true;
        }
        if len - self.frozen.len() != self.k {
            return Err(Error::SpecFile(format!(
                "k = {} but {} of {len} positions are frozen",
                self.k,
                self.frozen.len()
            )));
        }
        let base = if self.reliability.is_empty() {
            CodeSpec::from_frozen_mask(frozen.clone())?
        } else {
            CodeSpec::assemble(frozen.clone(), self.reliability.clone(), self.method, self.design_param)?
        };
        let mut good = vec![false; len];
        for &i in &self.good {
            if i >= len {
                return Err(Error::SpecFile(format!("good index {i} out of range")));
            }
            good[i] = true;
        }
        let crc = match &self.crc {
            None => None,
            Some(c) => Some(CrcSpec::new(
                c.width,
                parse_hex("crc.poly", &c.poly)?,
                parse_hex("crc.init", &c.init)?,
            )?),
        };
        let pc = (!self.pc.is_empty()).then(|| ParityCheckSpec {
            constraints: self
                .pc
                .iter()
                .map(|p| ParityConstraint { parity: p.parity, sources: p.sources.clone() })
                .collect(),
        });
        let mut spec = base.with_crc(crc)?.with_parity_checks(pc)?.with_good_mask(good)?;
        if self.reliability.is_empty() {
            spec.method = self.method;
            spec.design_param = self.design_param;
        }
        Ok(spec)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::SpecFile(e.to_string()))
    }

    pub fn render(&self) -> String {
        toml::to_string(self).expect("code spec serializes")
    }
}

impl CodeSpec {
    /// Reads a spec file produced by [`CodeSpec::to_file_string`].
    pub fn from_file_str(text: &str) -> Result<Self> {
        CodeSpecFile::parse(text)?.to_spec()
    }

    pub fn to_file_string(&self) -> String {
        CodeSpecFile::from_spec(self).render()
    }
}
