use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cyclic redundancy check appended to the payload.
///
/// `poly` is the full generator polynomial in normal form including the
/// leading `x^width` term, MSB first (CRC24A is `0x1864CFB`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrcSpec {
    width: u32,
    poly: u64,
    init: u64,
}

impl CrcSpec {
    /// Widths used by the decoder presets.
    pub const PRESET_WIDTHS: [u32; 4] = [8, 11, 16, 24];

    pub fn new(width: u32, poly: u64, init: u64) -> Result<Self> {
        if !(1..=32).contains(&width) {
            return Err(Error::invalid("crc.width", format!("{width} not in 1..=32")));
        }
        if poly >> width != 1 {
            return Err(Error::invalid(
                "crc.poly",
                format!("polynomial {poly:#x} does not have degree {width}"),
            ));
        }
        if init >> width != 0 {
            return Err(Error::invalid(
                "crc.init",
                format!("initial value {init:#x} wider than {width} bits"),
            ));
        }
        Ok(CrcSpec { width, poly, init })
    }

    /// LTE / NR CRC24A.
    pub fn crc24a() -> Self {
        CrcSpec { width: 24, poly: 0x186_4CFB, init: 0 }
    }

    /// NR CRC16 (CCITT).
    pub fn crc16() -> Self {
        CrcSpec { width: 16, poly: 0x1_1021, init: 0 }
    }

    /// NR CRC11.
    pub fn crc11() -> Self {
        CrcSpec { width: 11, poly: 0xE21, init: 0 }
    }

    /// CRC-8 (`x^8 + x^7 + x^6 + x^4 + x^2 + 1`).
    pub fn crc8() -> Self {
        CrcSpec { width: 8, poly: 0x1D5, init: 0 }
    }

    /// Preset for one of [`Self::PRESET_WIDTHS`].
    pub fn preset(width: u32) -> Result<Self> {
        match width {
            8 => Ok(Self::crc8()),
            11 => Ok(Self::crc11()),
            16 => Ok(Self::crc16()),
            24 => Ok(Self::crc24a()),
            _ => Err(Error::invalid(
                "crc.width",
                format!("no preset polynomial for width {width}"),
            )),
        }
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn poly(&self) -> u64 {
        self.poly
    }

    pub fn init(&self) -> u64 {
        self.init
    }

    /// Polynomial coefficients, MSB (`x^width`) first.
    pub fn polynomial_bits(&self) -> Vec<u8> {
        (0..=self.width)
            .rev()
            .map(|i| ((self.poly >> i) & 1) as u8)
            .collect()
    }

    /// CRC register contents after shifting in `bits`, MSB first.
    pub fn remainder(&self, bits: &[u8]) -> Vec<u8> {
        let w = self.width;
        let mask = (1u64 << w) - 1;
        let low = self.poly & mask;
        let mut reg = self.init;
        for &b in bits {
            let top = ((reg >> (w - 1)) & 1) ^ u64::from(b & 1);
            reg = (reg << 1) & mask;
            if top == 1 {
                reg ^= low;
            }
        }
        (0..w).rev().map(|i| ((reg >> i) & 1) as u8).collect()
    }

    /// `payload` followed by its `width` remainder bits.
    pub fn attach(&self, payload: &[u8]) -> Vec<u8> {
        let mut out = payload.to_vec();
        out.extend(self.remainder(payload));
        out
    }

    /// True iff the trailing `width` bits equal the CRC of the leading bits.
    pub fn check(&self, bits: &[u8]) -> bool {
        let w = self.width();
        if bits.len() < w {
            return false;
        }
        let (payload, crc) = bits.split_at(bits.len() - w);
        self.remainder(payload) == crc
    }
}
