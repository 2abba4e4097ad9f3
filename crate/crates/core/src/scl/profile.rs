use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quant::QuantProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    Sc,
    Flexible,
    Ultra,
}

impl std::str::FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sc" => Ok(DecoderKind::Sc),
            "flexible" => Ok(DecoderKind::Flexible),
            "ultra" | "ultra_reliable" => Ok(DecoderKind::Ultra),
            other => Err(Error::invalid("profile", format!("unknown decoder `{other}`"))),
        }
    }
}

/// Final path selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    BestPm,
    CrcAided,
    ParityCheck,
}

impl std::str::FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "best_pm" => Ok(Selection::BestPm),
            "crc_aided" | "crc" => Ok(Selection::CrcAided),
            "parity_check" | "pc" => Ok(Selection::ParityCheck),
            other => Err(Error::invalid("selection", format!("unknown mode `{other}`"))),
        }
    }
}

/// Individually switchable decoder shortcuts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Shortcuts {
    /// Rate-0 / rate-1 nodes decoded in one step.
    pub special_nodes: bool,
    /// Good bits take their hard decision instead of splitting.
    pub good_bits: bool,
    /// Leading frozen subtrees are not traversed.
    pub skip_prefix: bool,
    /// Leaf blocks of `leaf_width` bits instead of single bits.
    pub multi_bit: bool,
}

impl Shortcuts {
    pub const ALL: Shortcuts = Shortcuts {
        special_nodes: true,
        good_bits: true,
        skip_prefix: true,
        multi_bit: true,
    };

    pub const NONE: Shortcuts = Shortcuts {
        special_nodes: false,
        good_bits: false,
        skip_prefix: false,
        multi_bit: false,
    };
}

/// Configuration bundle of one of the three decoders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderProfile {
    pub kind: DecoderKind,
    pub l_max: usize,
    pub n_max: usize,
    pub quant: QuantProfile,
    /// Distance between stored LLR stages; 1 stores every stage.
    pub storage_stride: usize,
    /// Bits decided per leaf block.
    pub leaf_width: usize,
    /// Largest rate-0 / rate-1 node decoded in one step.
    pub max_special_node: usize,
    pub double_package: bool,
    pub selection: Selection,
    pub shortcuts: Shortcuts,
}

impl DecoderProfile {
    pub fn sc() -> Self {
        DecoderProfile {
            kind: DecoderKind::Sc,
            l_max: 1,
            n_max: 1 << 15,
            quant: QuantProfile::sc(),
            storage_stride: 1,
            leaf_width: 1,
            max_special_node: 1 << 15,
            double_package: false,
            selection: Selection::BestPm,
            shortcuts: Shortcuts::ALL,
        }
    }

    pub fn flexible() -> Self {
        DecoderProfile {
            kind: DecoderKind::Flexible,
            l_max: 8,
            n_max: 1 << 14,
            quant: QuantProfile::flexible(),
            storage_stride: 3,
            leaf_width: 4,
            max_special_node: 32,
            double_package: true,
            selection: Selection::BestPm,
            shortcuts: Shortcuts::ALL,
        }
    }

    pub fn ultra() -> Self {
        DecoderProfile {
            kind: DecoderKind::Ultra,
            l_max: 32,
            n_max: 1 << 11,
            quant: QuantProfile::ultra(),
            storage_stride: 4,
            leaf_width: 2,
            max_special_node: 4,
            double_package: false,
            selection: Selection::BestPm,
            shortcuts: Shortcuts::ALL,
        }
    }

    pub fn for_kind(kind: DecoderKind) -> Self {
        match kind {
            DecoderKind::Sc => Self::sc(),
            DecoderKind::Flexible => Self::flexible(),
            DecoderKind::Ultra => Self::ultra(),
        }
    }

    pub fn with_selection(mut self, selection: Selection) -> Self {
        self.selection = selection;
        self
    }

    pub fn with_shortcuts(mut self, shortcuts: Shortcuts) -> Self {
        self.shortcuts = shortcuts;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.storage_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.quant.validate()?;
        if !matches!(self.storage_stride, 1 | 3 | 4) {
            return Err(Error::invalid(
                "decoder.stride",
                format!("{} not in {{1, 3, 4}}", self.storage_stride),
            ));
        }
        if !self.leaf_width.is_power_of_two() || self.leaf_width > 8 {
            return Err(Error::invalid(
                "decoder.leaf_width",
                format!("{} is not a power of two <= 8", self.leaf_width),
            ));
        }
        if !self.max_special_node.is_power_of_two() {
            return Err(Error::invalid(
                "decoder.max_special_node",
                format!("{} is not a power of two", self.max_special_node),
            ));
        }
        if self.l_max == 0 || !self.n_max.is_power_of_two() {
            return Err(Error::invalid("decoder.l_max", "limits must be positive"));
        }
        if self.double_package && self.kind != DecoderKind::Flexible {
            return Err(Error::invalid(
                "decoder.double_package",
                "only the flexible decoder supports double-package mode",
            ));
        }
        Ok(())
    }

    /// Leaf block width after the multi-bit toggle.
    pub fn effective_leaf_width(&self) -> usize {
        if self.shortcuts.multi_bit {
            self.leaf_width
        } else {
            1
        }
    }

    /// Replicated unstored-stage banks: four copies of stage 5 feed the
    /// ultra decoder's semi-parallel unit.
    pub fn extra_stage_copies(&self) -> Option<(usize, usize)> {
        (self.kind == DecoderKind::Ultra).then_some((5, 4))
    }
}
