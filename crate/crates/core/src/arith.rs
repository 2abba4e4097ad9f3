//! Arithmetic domains the decoder is generic over.
//!
//! [`ScalarArith`] runs the min-sum kernels on any signed scalar (`f64`,
//! `f32`, or an exact rational), [`FixedArith`] on sign-magnitude integers
//! with per-stage widths and metric normalization.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::quant::{
    f_min_sum, g_combine_to, normalize_pms_in_place, pm_update, quantize_channel_llr, PathMetric,
    QuantProfile, Qllr,
};

/// LLR / path-metric rules used by the decoder.
pub trait LlrArith: Debug + Clone + Send + Sync {
    type Llr: Copy + Debug + PartialEq + Send + Sync;
    type Metric: Copy + Debug + PartialEq + PartialOrd + Send + Sync;

    /// Converts a real channel LLR to the domain.
    fn channel(&self, x: f64) -> Result<Self::Llr>;

    /// Filler value for freshly allocated LLR banks.
    fn zero_llr(&self) -> Self::Llr;

    /// f-function producing an LLR of stage `out_stage` (`n` = channel stage).
    fn f(&self, a: Self::Llr, b: Self::Llr, out_stage: usize, n: usize) -> Self::Llr;

    /// g-function `a + (-1)^s b` producing an LLR of stage `out_stage`.
    fn g(&self, a: Self::Llr, b: Self::Llr, s: u8, out_stage: usize, n: usize) -> Self::Llr;

    /// 0 when the LLR favors bit 0 (zero included), else 1.
    fn hard(&self, a: Self::Llr) -> u8;

    fn zero_metric(&self) -> Self::Metric;

    /// Path-metric update for deciding `bit` against `llr`.
    fn update(&self, pm: Self::Metric, llr: Self::Llr, bit: u8) -> Self::Metric;

    /// Post-sort normalization of a path list; a no-op for exact domains.
    fn normalize(&self, pms: &mut [Self::Metric]);

    fn metric_value(&self, m: Self::Metric) -> f64;

    fn llr_value(&self, a: Self::Llr) -> f64;
}

/// Min-sum on a signed scalar with no saturation and no normalization.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScalarArith<T> {
    _scalar: std::marker::PhantomData<T>,
}

impl<T> ScalarArith<T> {
    pub fn new() -> Self {
        ScalarArith { _scalar: std::marker::PhantomData }
    }
}

impl<T> LlrArith for ScalarArith<T>
where
    T: Signed + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Send + Sync,
{
    type Llr = T;
    type Metric = T;

    fn channel(&self, x: f64) -> Result<T> {
        if !x.is_finite() {
            return Err(Error::invalid("llr", format!("non-finite channel LLR {x}")));
        }
        T::from_f64(x).ok_or_else(|| Error::invalid("llr", format!("{x} not representable")))
    }

    fn zero_llr(&self) -> T {
        T::zero()
    }

    #[inline]
    fn f(&self, a: T, b: T, _out_stage: usize, _n: usize) -> T {
        let m = if a.abs() < b.abs() { a.abs() } else { b.abs() };
        let zero = T::zero();
        if (a < zero) != (b < zero) {
            -m
        } else {
            m
        }
    }

    #[inline]
    fn g(&self, a: T, b: T, s: u8, _out_stage: usize, _n: usize) -> T {
        if s & 1 == 0 {
            a + b
        } else {
            a - b
        }
    }

    #[inline]
    fn hard(&self, a: T) -> u8 {
        u8::from(a < T::zero())
    }

    fn zero_metric(&self) -> T {
        T::zero()
    }

    #[inline]
    fn update(&self, pm: T, llr: T, bit: u8) -> T {
        if bit & 1 == self.hard(llr) {
            pm
        } else {
            pm + llr.abs()
        }
    }

    fn normalize(&self, _pms: &mut [T]) {}

    fn metric_value(&self, m: T) -> f64 {
        m.to_f64().unwrap_or(f64::NAN)
    }

    fn llr_value(&self, a: T) -> f64 {
        a.to_f64().unwrap_or(f64::NAN)
    }
}

/// Sign-magnitude fixed point with the widths of a [`QuantProfile`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedArith {
    profile: QuantProfile,
}

impl FixedArith {
    pub fn new(profile: QuantProfile) -> Result<Self> {
        profile.validate()?;
        Ok(FixedArith { profile })
    }

    pub fn profile(&self) -> &QuantProfile {
        &self.profile
    }
}

impl LlrArith for FixedArith {
    type Llr = Qllr;
    type Metric = PathMetric;

    fn channel(&self, x: f64) -> Result<Qllr> {
        quantize_channel_llr(x, &self.profile)
    }

    fn zero_llr(&self) -> Qllr {
        Qllr::zero(self.profile.q_i)
    }

    #[inline]
    fn f(&self, a: Qllr, b: Qllr, out_stage: usize, n: usize) -> Qllr {
        f_min_sum(a, b).rewidth(self.profile.width_at(out_stage, n))
    }

    #[inline]
    fn g(&self, a: Qllr, b: Qllr, s: u8, out_stage: usize, n: usize) -> Qllr {
        g_combine_to(a, b, s, self.profile.width_at(out_stage, n))
    }

    #[inline]
    fn hard(&self, a: Qllr) -> u8 {
        a.hard_decision()
    }

    fn zero_metric(&self) -> PathMetric {
        self.profile.zero_metric()
    }

    #[inline]
    fn update(&self, pm: PathMetric, llr: Qllr, bit: u8) -> PathMetric {
        pm_update(pm, llr, bit)
    }

    fn normalize(&self, pms: &mut [PathMetric]) {
        if !pms.is_empty() {
            normalize_pms_in_place(pms).expect("non-empty");
        }
    }

    fn metric_value(&self, m: PathMetric) -> f64 {
        f64::from(m.value())
    }

    fn llr_value(&self, a: Qllr) -> f64 {
        f64::from(a.value())
    }
}
