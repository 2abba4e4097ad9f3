//! Polar code description: construction, encoding, CRC / parity attachment
//! and payload extraction.
//!
//! Indexing is natural order throughout, `G = F^{⊗n}` with no bit-reversal.

mod construct;
mod crc;
mod spec_file;
mod transform;

pub use construct::{
    bhattacharyya, bhattacharyya_log_odds, from_sequence, gaussian_approx, reliability_order,
    ConstructionMethod,
};
pub use crc::CrcSpec;
pub use spec_file::CodeSpecFile;
pub use transform::{polar_transform, polar_transform_in_place};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported `n = log2(N)`.
pub const MAX_STAGES: usize = 15;

/// One parity-check constraint: `u[parity] = XOR of u[sources]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityConstraint {
    pub parity: usize,
    pub sources: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityCheckSpec {
    pub constraints: Vec<ParityConstraint>,
}

/// What a source position carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitRole {
    Frozen,
    Payload,
    Crc,
    /// Index into the parity constraint list.
    Parity(usize),
}

/// An `(N, k)` polar code with optional CRC and parity-check bits.
///
/// `k` counts every non-frozen position. With a CRC attached the last
/// `crc.width()` non-frozen, non-parity positions carry the CRC and the
/// payload shrinks accordingly.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    len: usize,
    stages: usize,
    k: usize,
    frozen: Vec<bool>,
    good: Vec<bool>,
    crc: Option<CrcSpec>,
    pc: Option<ParityCheckSpec>,
    reliability: Vec<f64>,
    method: ConstructionMethod,
    design_param: f64,
    roles: Vec<BitRole>,
    payload_positions: Vec<usize>,
    crc_positions: Vec<usize>,
}

fn check_length(len: usize) -> Result<usize> {
    if !len.is_power_of_two() || len < 2 {
        return Err(Error::invalid("N", format!("{len} is not a power of two >= 2")));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_STAGES {
        return Err(Error::invalid("N", format!("{len} exceeds 2^{MAX_STAGES}")));
    }
    Ok(n)
}

/// Builds the `(N, k)` code keeping the `k` most reliable positions.
pub fn construct_code(
    len: usize,
    k: usize,
    method: ConstructionMethod,
    design_param: f64,
) -> Result<CodeSpec> {
    check_length(len)?;
    if k == 0 || k > len {
        return Err(Error::invalid("k", format!("{k} not in 1..={len}")));
    }
    let reliability = match method {
        ConstructionMethod::Bhattacharyya => {
            if !(design_param > 0.0 && design_param < 1.0) {
                return Err(Error::invalid(
                    "design_param",
                    format!("erasure probability {design_param} not in (0, 1)"),
                ));
            }
            bhattacharyya_log_odds(len, design_param)
        }
        ConstructionMethod::GaussianApprox => {
            if !design_param.is_finite() {
                return Err(Error::invalid("design_param", "design SNR must be finite"));
            }
            gaussian_approx(len, design_param)
        }
        ConstructionMethod::ExternalSequence => {
            return Err(Error::invalid(
                "method",
                "external sequences are built with `construct_from_sequence`",
            ))
        }
    };
    CodeSpec::from_reliability(reliability, k, method, design_param)
}

/// Builds the code from an externally supplied reliability order
/// (least reliable first, entries `>= N` ignored).
pub fn construct_from_sequence(len: usize, k: usize, sequence: &[usize]) -> Result<CodeSpec> {
    check_length(len)?;
    if k == 0 || k > len {
        return Err(Error::invalid("k", format!("{k} not in 1..={len}")));
    }
    let reliability = from_sequence(len, sequence)?;
    CodeSpec::from_reliability(reliability, k, ConstructionMethod::ExternalSequence, 0.0)
}

/// Marks the top `round(threshold · k')` eligible information positions as
/// good, where `k'` counts non-frozen, non-parity positions. Rounding is half
/// away from zero; reliability ties prefer the higher index.
pub fn good_bit_set(spec: &CodeSpec, threshold: f64) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::invalid(
            "good_threshold",
            format!("{threshold} not in [0, 1]"),
        ));
    }
    let mut eligible: Vec<usize> = (0..spec.len)
        .filter(|&i| matches!(spec.roles[i], BitRole::Payload | BitRole::Crc))
        .collect();
    let count = (threshold * eligible.len() as f64).round() as usize;
    eligible.sort_by(|&a, &b| {
        spec.reliability[b]
            .total_cmp(&spec.reliability[a])
            .then(b.cmp(&a))
    });
    let mut mask = vec![false; spec.len];
    for &i in eligible.iter().take(count) {
        mask[i] = true;
    }
    Ok(mask)
}

impl CodeSpec {
    /// Freezes the `N - k` least reliable positions.
    pub fn from_reliability(
        reliability: Vec<f64>,
        k: usize,
        method: ConstructionMethod,
        design_param: f64,
    ) -> Result<Self> {
        let len = reliability.len();
        check_length(len)?;
        if k > len {
            return Err(Error::invalid("k", format!("{k} exceeds N = {len}")));
        }
        let mut frozen = vec![false; len];
        for &i in reliability_order(&reliability).iter().take(len - k) {
            frozen[i] = true;
        }
        Self::assemble(frozen, reliability, method, design_param)
    }

    /// A code from an explicit frozen mask. Reliability defaults to
    /// "frozen below information" with index order inside each class.
    pub fn from_frozen_mask(frozen: Vec<bool>) -> Result<Self> {
        check_length(frozen.len())?;
        let len = frozen.len() as f64;
        let reliability = frozen
            .iter()
            .enumerate()
            .map(|(i, &f)| i as f64 + if f { 0.0 } else { len })
            .collect();
        Self::assemble(frozen, reliability, ConstructionMethod::ExternalSequence, 0.0)
    }

    fn assemble(
        frozen: Vec<bool>,
        reliability: Vec<f64>,
        method: ConstructionMethod,
        design_param: f64,
    ) -> Result<Self> {
        let len = frozen.len();
        let stages = check_length(len)?;
        if reliability.len() != len {
            return Err(Error::LengthMismatch {
                what: "reliability",
                expected: len,
                got: reliability.len(),
            });
        }
        let k = frozen.iter().filter(|&&f| !f).count();
        let mut spec = CodeSpec {
            len,
            stages,
            k,
            frozen,
            good: vec![false; len],
            crc: None,
            pc: None,
            reliability,
            method,
            design_param,
            roles: Vec::new(),
            payload_positions: Vec::new(),
            crc_positions: Vec::new(),
        };
        spec.assign_roles()?;
        Ok(spec)
    }

    fn assign_roles(&mut self) -> Result<()> {
        let mut roles: Vec<BitRole> = self
            .frozen
            .iter()
            .map(|&f| if f { BitRole::Frozen } else { BitRole::Payload })
            .collect();
        if let Some(pc) = &self.pc {
            for (ci, c) in pc.constraints.iter().enumerate() {
                if c.parity >= self.len {
                    return Err(Error::invalid(
                        "pc",
                        format!("parity position {} out of range", c.parity),
                    ));
                }
                match roles[c.parity] {
                    BitRole::Frozen => {
                        return Err(Error::invalid(
                            "pc",
                            format!("parity position {} is frozen", c.parity),
                        ))
                    }
                    BitRole::Parity(_) => {
                        return Err(Error::invalid(
                            "pc",
                            format!("parity position {} used twice", c.parity),
                        ))
                    }
                    _ => {}
                }
                if let Some(&s) = c.sources.iter().find(|&&s| s >= c.parity) {
                    return Err(Error::invalid(
                        "pc",
                        format!("source {s} does not precede parity position {}", c.parity),
                    ));
                }
                roles[c.parity] = BitRole::Parity(ci);
            }
        }
        let info: Vec<usize> = (0..self.len)
            .filter(|&i| roles[i] == BitRole::Payload)
            .collect();
        let crc_width = self.crc.map_or(0, |c| c.width());
        if crc_width > info.len() {
            return Err(Error::invalid(
                "crc",
                format!(
                    "CRC width {crc_width} exceeds the {} available information positions",
                    info.len()
                ),
            ));
        }
        let split = info.len() - crc_width;
        for &i in &info[split..] {
            roles[i] = BitRole::Crc;
        }
        if self.good.iter().zip(&roles).any(|(&g, r)| {
            g && matches!(r, BitRole::Frozen | BitRole::Parity(_))
        }) {
            return Err(Error::invalid(
                "good",
                "good positions must be non-frozen, non-parity positions",
            ));
        }
        self.payload_positions = info[..split].to_vec();
        self.crc_positions = info[split..].to_vec();
        self.roles = roles;
        Ok(())
    }

    /// Attaches a CRC occupying the last non-frozen positions.
    pub fn with_crc(mut self, crc: Option<CrcSpec>) -> Result<Self> {
        self.crc = crc;
        self.assign_roles()?;
        Ok(self)
    }

    pub fn with_parity_checks(mut self, pc: Option<ParityCheckSpec>) -> Result<Self> {
        self.pc = pc.filter(|p| !p.constraints.is_empty());
        self.assign_roles()?;
        Ok(self)
    }

    pub fn with_good_mask(mut self, good: Vec<bool>) -> Result<Self> {
        if good.len() != self.len {
            return Err(Error::LengthMismatch {
                what: "good mask",
                expected: self.len,
                got: good.len(),
            });
        }
        self.good = good;
        self.assign_roles()?;
        Ok(self)
    }

    pub fn with_good_threshold(self, threshold: f64) -> Result<Self> {
        let mask = good_bit_set(&self, threshold)?;
        self.with_good_mask(mask)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `n = log2(N)`.
    pub fn stages(&self) -> usize {
        self.stages
    }

    /// Non-frozen positions, CRC and parity bits included.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of user payload bits.
    pub fn payload_len(&self) -> usize {
        self.payload_positions.len()
    }

    /// `k / N`.
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.len as f64
    }

    /// Payload bits per coded bit.
    pub fn payload_rate(&self) -> f64 {
        self.payload_len() as f64 / self.len as f64
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    pub fn good_mask(&self) -> &[bool] {
        &self.good
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    pub fn crc(&self) -> Option<&CrcSpec> {
        self.crc.as_ref()
    }

    pub fn parity_checks(&self) -> Option<&ParityCheckSpec> {
        self.pc.as_ref()
    }

    pub fn reliability(&self) -> &[f64] {
        &self.reliability
    }

    pub fn method(&self) -> ConstructionMethod {
        self.method
    }

    pub fn design_param(&self) -> f64 {
        self.design_param
    }

    pub fn roles(&self) -> &[BitRole] {
        &self.roles
    }

    pub fn payload_positions(&self) -> &[usize] {
        &self.payload_positions
    }

    pub fn crc_positions(&self) -> &[usize] {
        &self.crc_positions
    }

    pub fn frozen_positions(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.frozen[i]).collect()
    }

    pub fn info_positions(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| !self.frozen[i]).collect()
    }

    pub fn good_positions(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.good[i]).collect()
    }

    /// Source vector `u` carrying `payload`, its CRC and parity bits.
    pub fn source_vector(&self, payload: &[u8]) -> Result<Vec<u8>> {
        if payload.len() != self.payload_len() {
            return Err(Error::LengthMismatch {
                what: "payload",
                expected: self.payload_len(),
                got: payload.len(),
            });
        }
        let mut u = vec![0u8; self.len];
        for (&pos, &b) in self.payload_positions.iter().zip(payload) {
            u[pos] = b & 1;
        }
        if let Some(crc) = &self.crc {
            for (&pos, b) in self.crc_positions.iter().zip(crc.remainder(payload)) {
                u[pos] = b;
            }
        }
        if let Some(pc) = &self.pc {
            let mut order: Vec<&ParityConstraint> = pc.constraints.iter().collect();
            order.sort_by_key(|c| c.parity);
            for c in order {
                u[c.parity] = c.sources.iter().fold(0, |acc, &s| acc ^ u[s]);
            }
        }
        Ok(u)
    }

    /// Codeword `c = u G` for the given payload.
    pub fn encode(&self, payload: &[u8]) -> Result<Vec<u8>> {
        let mut u = self.source_vector(payload)?;
        polar_transform_in_place(&mut u);
        Ok(u)
    }

    /// Payload bits of a source vector, in position order.
    pub fn extract_info(&self, u: &[u8]) -> Vec<u8> {
        self.payload_positions.iter().map(|&p| u[p]).collect()
    }

    /// CRC bits of `u` match its payload (true when no CRC is attached).
    pub fn crc_passes(&self, u: &[u8]) -> bool {
        match &self.crc {
            None => true,
            Some(crc) => {
                let payload = self.extract_info(u);
                let got: Vec<u8> = self.crc_positions.iter().map(|&p| u[p]).collect();
                crc.remainder(&payload) == got
            }
        }
    }
}
