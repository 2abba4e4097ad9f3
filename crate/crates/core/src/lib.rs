//! Bit-accurate model of successive-cancellation (list) polar decoders.
//!
//! * [`polar_code`] — construction, CRC / parity attachments, encoding.
//! * [`quant`] and [`arith`] — fixed-point LLRs and the arithmetic domains.
//! * [`scl`] — the list decoding engine.
//! * [`cycle`] — cycle-level latency and throughput model.
//! * [`channel`] — QPSK / AWGN Monte Carlo campaigns.
//! * [`reference`] and [`selftest`] — naive oracles and a quick self-check.

pub mod arith;
pub mod channel;
pub mod cycle;
pub mod error;
pub mod polar_code;
pub mod quant;
pub mod reference;
pub mod scl;
pub mod selftest;

pub use arith::{FixedArith, LlrArith, ScalarArith};
pub use error::{Error, Result};
pub use polar_code::{construct_code, CodeSpec, ConstructionMethod, CrcSpec};
pub use quant::{PathMetric, QuantProfile, Qllr};
pub use scl::{DecodeResult, Decoder, DecoderKind, DecoderProfile, Selection, Shortcuts};

/// Double-precision min-sum.
pub type FloatArith = ScalarArith<f64>;
/// Single-precision min-sum.
pub type F32Arith = ScalarArith<f32>;
/// Exact rational min-sum.
pub type ExactArith = ScalarArith<num_rational::Rational64>;

pub type FixedDecoder = Decoder<FixedArith>;
pub type FloatDecoder = Decoder<FloatArith>;
pub type F32Decoder = Decoder<F32Arith>;
pub type ExactDecoder = Decoder<ExactArith>;
