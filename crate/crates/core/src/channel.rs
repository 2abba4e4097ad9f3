//! QPSK / AWGN channel and Monte Carlo frame-error campaigns.
//!
//! Gray-mapped QPSK is two independent BPSK dimensions with half the symbol
//! energy each. With unit amplitude per dimension the noise variance is
//! `σ² = 1 / (Es/N0)` and the bit LLR is `2y / σ²`.
//!
//! Every frame draws its payload and noise from its own ChaCha8 stream
//! (stream id = frame index, key from the master seed), so results do not
//! depend on thread scheduling, and campaigns in different arithmetic
//! domains see identical channel realizations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{FixedArith, LlrArith, ScalarArith};
use crate::error::{Error, Result};
use crate::polar_code::CodeSpec;
use crate::scl::{DecodeOptions, Decoder, DecoderProfile};

/// Arithmetic the decoder runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LlrDomain {
    Float,
    Quantized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub seed: u64,
    /// Frame budget per SNR point.
    pub frames: u64,
    /// Stop a point after this many frame errors.
    pub max_errors: u64,
    pub domain: LlrDomain,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig { seed: 1, frames: 100_000, max_errors: 100, domain: LlrDomain::Quantized }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::invalid("frames", "must be at least 1"));
        }
        if self.max_errors == 0 {
            return Err(Error::invalid("max_errors", "must be at least 1"));
        }
        Ok(())
    }
}

/// Random stream of frame `frame` under `seed`.
pub fn frame_rng(seed: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame);
    rng
}

/// Noise standard deviation per dimension at `es_n0_db`.
pub fn noise_sigma(es_n0_db: f64) -> f64 {
    10f64.powf(-es_n0_db / 20.0)
}

/// Eb/N0 of QPSK carrying information at `rate` bits per coded bit.
pub fn eb_n0_db(es_n0_db: f64, rate: f64) -> f64 {
    es_n0_db - 10.0 * (2.0 * rate).log10()
}

/// Sends `codeword` over QPSK / AWGN and returns the bit LLRs.
pub fn transmit<R: Rng + ?Sized>(codeword: &[u8], es_n0_db: f64, rng: &mut R) -> Result<Vec<f64>> {
    if codeword.len() % 2 != 0 {
        return Err(Error::invalid("N", "QPSK needs an even number of coded bits"));
    }
    if !es_n0_db.is_finite() {
        return Err(Error::invalid("EsN0_dB", "must be finite"));
    }
    let sigma = noise_sigma(es_n0_db);
    let gain = 2.0 / (sigma * sigma);
    // Each symbol carries the bit pair (c[2i], c[2i+1]) on its I and Q
    // dimensions; with Gray mapping the dimensions are independent.
    Ok(codeword
        .iter()
        .map(|&c| {
            let x = if c & 1 == 0 { 1.0 } else { -1.0 };
            let n: f64 = rng.sample(StandardNormal);
            gain * (x + sigma * n)
        })
        .collect())
}

/// Payload and channel LLRs of one frame.
pub fn frame(spec: &CodeSpec, es_n0_db: f64, seed: u64, index: u64) -> Result<(Vec<u8>, Vec<f64>)> {
    let mut rng = frame_rng(seed, index);
    let payload: Vec<u8> = (0..spec.payload_len()).map(|_| rng.random::<bool>() as u8).collect();
    let codeword = spec.encode(&payload)?;
    let llrs = transmit(&codeword, es_n0_db, &mut rng)?;
    Ok((payload, llrs))
}

/// Statistics of one SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FerPoint {
    #[serde(rename = "EsN0_dB")]
    pub es_n0_db: f64,
    #[serde(rename = "EbN0_dB")]
    pub eb_n0_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    #[serde(rename = "FER")]
    pub fer: f64,
    #[serde(rename = "BER")]
    pub ber: f64,
    /// Normal-approximation 95% half-width of the FER.
    pub ci95: f64,
}

impl FerPoint {
    fn new(es_n0_db: f64, rate: f64, frames: u64, frame_errors: u64, bit_errors: u64, payload_len: usize) -> Self {
        let fer = frame_errors as f64 / frames as f64;
        let bits = frames * payload_len as u64;
        FerPoint {
            es_n0_db,
            eb_n0_db: eb_n0_db(es_n0_db, rate),
            frames,
            frame_errors,
            bit_errors,
            fer,
            ber: if bits == 0 { 0.0 } else { bit_errors as f64 / bits as f64 },
            ci95: ci95(fer, frames),
        }
    }

    /// FER standard error.
    pub fn sigma(&self) -> f64 {
        self.ci95 / 1.96
    }
}

pub fn ci95(p: f64, n: u64) -> f64 {
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Frames decoded in parallel before the stop condition is checked.
const BATCH: u64 = 256;

/// Runs a FER campaign over `snr_db` (Es/N0) points.
pub fn run_fer(
    spec: &CodeSpec,
    profile: DecoderProfile,
    list_size: usize,
    cfg: &ChannelConfig,
    snr_db: &[f64],
) -> Result<Vec<FerPoint>> {
    cfg.validate()?;
    let options = DecodeOptions { trace: false, shadow_u: false };
    match cfg.domain {
        LlrDomain::Float => {
            let dec = Decoder::<ScalarArith<f64>>::scalar(spec, profile, list_size)?.with_options(options);
            campaign(&dec, cfg, snr_db)
        }
        LlrDomain::Quantized => {
            let dec = Decoder::<FixedArith>::fixed(spec, profile, list_size)?.with_options(options);
            campaign(&dec, cfg, snr_db)
        }
    }
}

fn campaign<A: LlrArith>(dec: &Decoder<A>, cfg: &ChannelConfig, snr_db: &[f64]) -> Result<Vec<FerPoint>> {
    let spec = dec.spec();
    let rate = spec.payload_rate();
    snr_db
        .iter()
        .map(|&snr| {
            let (mut frames, mut errors, mut bit_errors) = (0u64, 0u64, 0u64);
            let mut start = 0u64;
            'point: while start < cfg.frames {
                let end = (start + BATCH).min(cfg.frames);
                let outcomes: Vec<(bool, u64)> = (start..end)
                    .into_par_iter()
                    .map(|i| {
                        let (payload, llrs) = frame(spec, snr, cfg.seed, i)?;
                        let got = dec.decode(&llrs)?;
                        let wrong = got.info_hat.iter().zip(&payload).filter(|(a, b)| a != b).count() as u64;
                        Ok((wrong > 0, wrong))
                    })
                    .collect::<Result<_>>()?;
                for (err, wrong) in outcomes {
                    frames += 1;
                    bit_errors += wrong;
                    if err {
                        errors += 1;
                        if errors >= cfg.max_errors {
                            break 'point;
                        }
                    }
                }
                start = end;
            }
            Ok(FerPoint::new(snr, rate, frames, errors, bit_errors, spec.payload_len()))
        })
        .collect()
}

/// SNR where a curve crosses `target`, interpolating `log10(FER)`
/// linearly in SNR. Points with zero FER are ignored.
pub fn crossing(curve: &[(f64, f64)], target: f64) -> Result<f64> {
    let mut pts: Vec<(f64, f64)> = curve.iter().copied().filter(|&(_, f)| f > 0.0).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in pts.windows(2) {
        let ((s0, f0), (s1, f1)) = (w[0], w[1]);
        if f0 >= target && target >= f1 {
            if f0 == f1 {
                return Ok(s0);
            }
            let (l0, l1, lt) = (f0.log10(), f1.log10(), target.log10());
            return Ok(s0 + (lt - l0) * (s1 - s0) / (l1 - l0));
        }
    }
    Err(Error::NotBracketed { target })
}

/// SNR gap `snr_a - snr_b` at `target` FER between two `(snr, fer)`
/// curves.
pub fn compare_curves(a: &[(f64, f64)], b: &[(f64, f64)], target: f64) -> Result<f64> {
    Ok(crossing(a, target)? - crossing(b, target)?)
}

/// `(EsN0_dB, FER)` pairs of a campaign.
pub fn es_curve(points: &[FerPoint]) -> Vec<(f64, f64)> {
    points.iter().map(|p| (p.es_n0_db, p.fer)).collect()
}

/// CSV with one row per point.
pub fn to_csv(points: &[FerPoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in points {
        w.serialize(p).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("CSV is UTF-8")
}
