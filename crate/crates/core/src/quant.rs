//! Sign-magnitude fixed-point LLR and path-metric arithmetic.
//!
//! Every operation saturates; nothing wraps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign-magnitude quantized LLR of `width` bits (sign included).
///
/// Negative zero is folded into `+0` on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Qllr {
    negative: bool,
    magnitude: u8,
    width: u8,
}

/// Largest magnitude representable with `width` bits.
pub const fn max_magnitude(width: u8) -> u8 {
    (1u8 << (width - 1)) - 1
}

impl Qllr {
    pub const MIN_WIDTH: u8 = 2;
    pub const MAX_WIDTH: u8 = 8;

    /// Builds `±magnitude`, saturating the magnitude to the width.
    pub fn new(negative: bool, magnitude: u32, width: u8) -> Self {
        debug_assert!((Self::MIN_WIDTH..=Self::MAX_WIDTH).contains(&width));
        let magnitude = magnitude.min(u32::from(max_magnitude(width))) as u8;
        Qllr {
            negative: negative && magnitude != 0,
            magnitude,
            width,
        }
    }

    /// Clamps a signed integer into the width.
    pub fn saturating_from(value: i32, width: u8) -> Self {
        Self::new(value < 0, value.unsigned_abs(), width)
    }

    pub fn zero(width: u8) -> Self {
        Self::new(false, 0, width)
    }

    pub fn is_negative(self) -> bool {
        self.negative
    }

    pub fn magnitude(self) -> u8 {
        self.magnitude
    }

    pub fn width(self) -> u8 {
        self.width
    }

    pub fn value(self) -> i32 {
        if self.negative {
            -i32::from(self.magnitude)
        } else {
            i32::from(self.magnitude)
        }
    }

    /// 0 for non-negative LLRs (zero included), 1 otherwise.
    pub fn hard_decision(self) -> u8 {
        u8::from(self.negative)
    }

    /// Changes the width: widening is lossless, narrowing saturates.
    pub fn rewidth(self, width: u8) -> Self {
        Self::new(self.negative, u32::from(self.magnitude), width)
    }
}

impl std::fmt::Display for Qllr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Min-sum f-function: `sign(a)·sign(b)·min(|a|, |b|)`.
pub fn f_min_sum(a: Qllr, b: Qllr) -> Qllr {
    assert_eq!(a.width, b.width, "f_min_sum operand widths differ");
    Qllr::new(a.negative ^ b.negative, u32::from(a.magnitude.min(b.magnitude)), a.width)
}

/// g-function `a + (-1)^s · b`, saturated to the operand width.
pub fn g_combine(a: Qllr, b: Qllr, s: u8) -> Qllr {
    g_combine_to(a, b, s, a.width)
}

/// g-function with the exact sum saturated to `width`.
pub fn g_combine_to(a: Qllr, b: Qllr, s: u8, width: u8) -> Qllr {
    assert_eq!(a.width, b.width, "g_combine operand widths differ");
    let bv = if s & 1 == 0 { b.value() } else { -b.value() };
    Qllr::saturating_from(a.value() + bv, width)
}

/// Path metric with a sorter width (`Q_sort`) and memory width (`Q_PM`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PathMetric {
    value: u32,
    sort_width: u8,
    store_width: u8,
}

impl PartialOrd for PathMetric {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.value.cmp(&other.value))
    }
}

impl PathMetric {
    pub fn new(value: u32, sort_width: u8, store_width: u8) -> Self {
        let cap = (1u32 << sort_width) - 1;
        PathMetric { value: value.min(cap), sort_width, store_width }
    }

    pub fn zero(sort_width: u8, store_width: u8) -> Self {
        Self::new(0, sort_width, store_width)
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn sort_width(self) -> u8 {
        self.sort_width
    }

    pub fn store_width(self) -> u8 {
        self.store_width
    }

    fn sort_cap(self) -> u32 {
        (1u32 << self.sort_width) - 1
    }

    /// Adds `penalty`, saturating at `2^Q_sort - 1`.
    pub fn saturating_add(self, penalty: u32) -> Self {
        PathMetric {
            value: (self.value + penalty).min(self.sort_cap()),
            ..self
        }
    }
}

/// Path-metric update: unchanged when `decision` matches the hard decision of
/// `llr`, otherwise `pm + |llr|` saturated at the sorter width.
pub fn pm_update(pm: PathMetric, llr: Qllr, decision: u8) -> PathMetric {
    if decision & 1 == llr.hard_decision() {
        pm
    } else {
        pm.saturating_add(u32::from(llr.magnitude()))
    }
}

/// Subtracts the minimum from every metric and narrows to `Q_PM`.
pub fn normalize_pms(pms: &[PathMetric]) -> Result<Vec<PathMetric>> {
    let mut out = pms.to_vec();
    normalize_pms_in_place(&mut out)?;
    Ok(out)
}

pub fn normalize_pms_in_place(pms: &mut [PathMetric]) -> Result<()> {
    let min = pms
        .iter()
        .map(|p| p.value)
        .min()
        .ok_or_else(|| Error::invalid("pms", "cannot normalize an empty list"))?;
    for p in pms.iter_mut() {
        let cap = (1u32 << p.store_width) - 1;
        p.value = (p.value - min).min(cap);
    }
    Ok(())
}

/// Fixed-point widths and channel scaling of one decoder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantProfile {
    /// Channel LLR width.
    pub q_c: u8,
    /// Internal LLR width at stages above 0.
    pub q_i: u8,
    /// Internal LLR width at stage 0.
    pub q_i_stage0: u8,
    pub q_sort: u8,
    pub q_pm: u8,
    /// LLR units per quantization step.
    pub scale: f64,
}

impl QuantProfile {
    /// Default channel scale (LLR units per step).
    pub const DEFAULT_SCALE: f64 = 1.0;

    pub fn flexible() -> Self {
        QuantProfile { q_c: 6, q_i: 6, q_i_stage0: 6, q_sort: 7, q_pm: 6, scale: Self::DEFAULT_SCALE }
    }

    pub fn sc() -> Self {
        QuantProfile { q_c: 6, q_i: 7, q_i_stage0: 7, q_sort: 7, q_pm: 6, scale: Self::DEFAULT_SCALE }
    }

    pub fn ultra() -> Self {
        QuantProfile { q_c: 6, q_i: 6, q_i_stage0: 7, q_sort: 7, q_pm: 6, scale: Self::DEFAULT_SCALE }
    }

    pub fn validate(&self) -> Result<()> {
        let range = Qllr::MIN_WIDTH..=Qllr::MAX_WIDTH;
        for (name, w) in [("quant.q_c", self.q_c), ("quant.q_i", self.q_i), ("quant.q_i_stage0", self.q_i_stage0)] {
            if !range.contains(&w) {
                return Err(Error::invalid(name, format!("width {w} not in {range:?}")));
            }
        }
        if !(2..=16).contains(&self.q_pm) || !(2..=16).contains(&self.q_sort) {
            return Err(Error::invalid("quant.q_sort", "metric widths must be in 2..=16"));
        }
        if self.q_sort < self.q_pm {
            return Err(Error::invalid("quant.q_sort", "Q_sort must be >= Q_PM"));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::invalid("quant.scale", format!("{} is not positive", self.scale)));
        }
        Ok(())
    }

    /// Internal LLR width of stage `stage` (the channel stage uses `q_c`).
    pub fn width_at(&self, stage: usize, channel_stage: usize) -> u8 {
        if stage >= channel_stage {
            self.q_c
        } else if stage == 0 {
            self.q_i_stage0
        } else {
            self.q_i
        }
    }

    pub fn zero_metric(&self) -> PathMetric {
        PathMetric::zero(self.q_sort, self.q_pm)
    }
}

/// Rounds `x / scale` to nearest (ties away from zero) and saturates to `Q_c`.
pub fn quantize_channel_llr(x: f64, profile: &QuantProfile) -> Result<Qllr> {
    if !x.is_finite() {
        return Err(Error::invalid("llr", format!("non-finite channel LLR {x}")));
    }
    let steps = (x / profile.scale).round();
    let cap = f64::from(max_magnitude(profile.q_c));
    let mag = steps.abs().min(cap) as u32;
    Ok(Qllr::new(steps < 0.0, mag, profile.q_c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i32) -> Qllr {
        Qllr::saturating_from(v, 6)
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_min_sum(q(2), q(-3)), q(-2));
        assert_eq!(f_min_sum(q(-4), q(-4)), q(4));
        for x in -31..=31 {
            assert_eq!(f_min_sum(q(0), q(x)).magnitude(), 0);
            assert!(!f_min_sum(q(0), q(x)).is_negative());
        }
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_combine(q(4), q(3), 0), q(7));
        assert_eq!(g_combine(q(4), q(3), 1), q(1));
        assert_eq!(g_combine(q(30), q(5), 0), q(31));
        assert_eq!(g_combine(q(-30), q(5), 1), q(-31));
        assert_eq!(g_combine_to(q(30), q(5), 0, 7).value(), 35);
    }

    #[test]
    #[should_panic]
    fn width_mismatch_is_a_contract_violation() {
        f_min_sum(Qllr::zero(6), Qllr::zero(7));
    }

    #[test]
    fn negative_zero_folds() {
        let z = Qllr::new(true, 0, 6);
        assert_eq!(z, Qllr::zero(6));
        assert_eq!(z.hard_decision(), 0);
    }

    #[test]
    fn rewidth_behaviour() {
        assert_eq!(Qllr::saturating_from(-50, 7).rewidth(6).value(), -31);
        assert_eq!(q(-20).rewidth(7).value(), -20);
    }

    #[test]
    fn pm_examples() {
        let pm = |v| PathMetric::new(v, 7, 6);
        assert_eq!(pm_update(pm(5), q(-3), 1).value(), 5);
        assert_eq!(pm_update(pm(5), q(-3), 0).value(), 8);
        assert_eq!(pm_update(pm(126), q(31), 1).value(), 127);
        assert_eq!(pm_update(pm(3), q(0), 0).value(), 3);
        assert_eq!(pm_update(pm(3), q(0), 1).value(), 3);
    }

    #[test]
    fn normalize_examples() {
        let pms = |vs: &[u32]| vs.iter().map(|&v| PathMetric::new(v, 7, 6)).collect::<Vec<_>>();
        let vals = |v: Vec<PathMetric>| v.into_iter().map(|p| p.value()).collect::<Vec<_>>();
        assert_eq!(vals(normalize_pms(&pms(&[7, 3, 9, 3])).unwrap()), vec![4, 0, 6, 0]);
        assert_eq!(vals(normalize_pms(&pms(&[0, 0])).unwrap()), vec![0, 0]);
        assert_eq!(vals(normalize_pms(&pms(&[70, 3])).unwrap()), vec![63, 0]);
        assert!(normalize_pms(&[]).is_err());
    }

    #[test]
    fn quantizer_examples() {
        let p = QuantProfile { scale: 1.0, ..QuantProfile::flexible() };
        assert_eq!(quantize_channel_llr(0.0, &p).unwrap(), Qllr::zero(6));
        assert_eq!(quantize_channel_llr(-100.0, &p).unwrap().value(), -31);
        assert_eq!(quantize_channel_llr(2.49, &p).unwrap().value(), 2);
        assert_eq!(quantize_channel_llr(2.5, &p).unwrap().value(), 3);
        assert_eq!(quantize_channel_llr(-2.5, &p).unwrap().value(), -3);
        assert!(quantize_channel_llr(f64::NAN, &p).is_err());
        assert!(quantize_channel_llr(f64::INFINITY, &p).is_err());
    }

    #[test]
    fn profile_validation() {
        assert!(QuantProfile::flexible().validate().is_ok());
        assert!(QuantProfile { q_sort: 5, ..QuantProfile::flexible() }.validate().is_err());
        assert!(QuantProfile { q_c: 9, ..QuantProfile::flexible() }.validate().is_err());
        assert!(QuantProfile { scale: 0.0, ..QuantProfile::flexible() }.validate().is_err());
    }

    #[test]
    fn stage_widths() {
        let u = QuantProfile::ultra();
        assert_eq!(u.width_at(0, 11), 7);
        assert_eq!(u.width_at(3, 11), 6);
        assert_eq!(u.width_at(11, 11), 6);
        assert_eq!(QuantProfile::sc().width_at(5, 15), 7);
    }
}
