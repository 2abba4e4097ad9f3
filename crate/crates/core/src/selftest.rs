//! Quick oracle self-check: fixed-point kernels against exact arithmetic,
//! the list engine against the naive full-copy decoder, and decoded-bit
//! recovery against explicitly tracked bits.

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::LlrArith;
use crate::error::Result;
use crate::polar_code::{construct_code, ConstructionMethod, CrcSpec};
use crate::quant::{f_min_sum, g_combine, max_magnitude, Qllr};
use crate::reference::naive_scl;
use crate::scl::{bit_kinds, DecodeOptions, Decoder, DecoderProfile, Selection, Shortcuts};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfCheck {
    pub name: &'static str,
    pub cases: u64,
    pub mismatches: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfTestReport {
    pub seed: u64,
    pub checks: Vec<SelfCheck>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.mismatches == 0)
    }
}

/// Runs every check; `cases` sets the number of random decodes.
pub fn run(seed: u64, cases: u64) -> Result<SelfTestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(SelfTestReport {
        seed,
        checks: vec![kernels(), engine(&mut rng, cases)?, recovery(&mut rng, cases)?],
    })
}

fn clamp(x: Rational64, cap: i64) -> i32 {
    x.clamp(Rational64::from_integer(-cap), Rational64::from_integer(cap)).to_integer() as i32
}

fn kernels() -> SelfCheck {
    let (mut cases, mut mismatches) = (0, 0);
    for width in [6u8, 7] {
        let cap = i64::from(max_magnitude(width));
        for a in -cap..=cap {
            for b in -cap..=cap {
                let (qa, qb) = (Qllr::saturating_from(a as i32, width), Qllr::saturating_from(b as i32, width));
                let min = a.abs().min(b.abs());
                let f = if (a < 0) != (b < 0) { -min } else { min };
                mismatches += u64::from(f_min_sum(qa, qb).value() != f as i32);
                for s in 0..2u8 {
                    let g = Rational64::from_integer(if s == 0 { a + b } else { a - b });
                    mismatches += u64::from(g_combine(qa, qb, s).value() != clamp(g, cap));
                }
                cases += 3;
            }
        }
    }
    SelfCheck { name: "fixed-point kernels", cases, mismatches }
}

fn random_decoder(rng: &mut ChaCha8Rng) -> Result<Decoder<crate::arith::FixedArith>> {
    let len = 1usize << rng.random_range(2..=8);
    let k = rng.random_range(1..=len);
    let mut spec = construct_code(len, k, ConstructionMethod::Bhattacharyya, rng.random_range(0.1..0.9))?;
    if k > 12 && rng.random_bool(0.5) {
        spec = spec.with_crc(Some(CrcSpec::crc8()))?;
    }
    let spec = spec.with_good_threshold([0.0, 0.25, 1.0][rng.random_range(0..3)])?;
    let base = [DecoderProfile::sc(), DecoderProfile::flexible(), DecoderProfile::ultra()][rng.random_range(0..3)];
    let shortcuts = Shortcuts {
        special_nodes: rng.random_bool(0.5),
        good_bits: rng.random_bool(0.5),
        skip_prefix: rng.random_bool(0.5),
        multi_bit: rng.random_bool(0.5),
    };
    let mut profile = base.with_shortcuts(shortcuts).with_stride([1, 3, 4][rng.random_range(0..3)]);
    if spec.crc().is_some() {
        profile = profile.with_selection(Selection::CrcAided);
    }
    let lists: Vec<usize> = [1, 2, 4, 8, 16, 32].into_iter().filter(|&l| l <= profile.l_max).collect();
    let list_size = lists[rng.random_range(0..lists.len())];
    Ok(Decoder::fixed(&spec, profile, list_size)?.with_options(DecodeOptions { trace: false, shadow_u: true }))
}

fn engine(rng: &mut ChaCha8Rng, cases: u64) -> Result<SelfCheck> {
    let mut mismatches = 0;
    for _ in 0..cases {
        let dec = random_decoder(rng)?;
        let arith = dec.arith();
        let channel: Vec<f64> = (0..dec.spec().len()).map(|_| rng.random_range(-20.0..20.0)).collect();
        let llrs = channel.iter().map(|&x| arith.channel(x)).collect::<Result<Vec<_>>>()?;
        let got = dec.decode_llrs(&llrs)?;
        let kinds = bit_kinds(dec.spec(), dec.profile().shortcuts.good_bits, dec.list_size());
        let want = naive_scl(arith, dec.spec(), &kinds, dec.list_size(), dec.profile().selection, &llrs);
        let same = got.selected == want.selected
            && got.paths.len() == want.paths.len()
            && got
                .paths
                .iter()
                .zip(&want.paths)
                .all(|(g, w)| g.u_hat == w.u && g.pm == arith.metric_value(w.pm));
        mismatches += u64::from(!same);
    }
    Ok(SelfCheck { name: "list engine vs naive decoder", cases, mismatches })
}

fn recovery(rng: &mut ChaCha8Rng, cases: u64) -> Result<SelfCheck> {
    let (mut paths, mut mismatches) = (0, 0);
    for _ in 0..cases {
        let dec = random_decoder(rng)?;
        let channel: Vec<f64> = (0..dec.spec().len()).map(|_| rng.random_range(-20.0..20.0)).collect();
        for p in dec.decode(&channel)?.paths {
            paths += 1;
            mismatches += u64::from(p.shadow_u.as_ref() != Some(&p.u_hat));
        }
    }
    Ok(SelfCheck { name: "decoded-bit recovery", cases: paths, mismatches })
}
