//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use polar_core::arith::LlrArith;
use polar_core::polar_code::{construct_code, ConstructionMethod, CrcSpec, ParityCheckSpec, ParityConstraint};
use polar_core::reference::naive_scl;
use polar_core::scl::{bit_kinds, Decoder, Shortcuts};
use polar_core::CodeSpec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_spec(rng: &mut ChaCha8Rng, max_stages: u32) -> CodeSpec {
    let n = rng.random_range(2..=max_stages);
    let len = 1usize << n;
    let k = rng.random_range(1..=len);
    let method = match rng.random_range(0..3) {
        0 => ConstructionMethod::Bhattacharyya,
        1 => ConstructionMethod::GaussianApprox,
        _ => ConstructionMethod::Bhattacharyya,
    };
    let param = if method == ConstructionMethod::GaussianApprox {
        rng.random_range(-2.0..4.0)
    } else {
        rng.random_range(0.05..0.95)
    };
    let mut spec = construct_code(len, k, method, param).unwrap();
    if k > 12 && rng.random_bool(0.4) {
        spec = spec.with_crc(Some(CrcSpec::crc8())).unwrap();
    }
    let info = spec.info_positions();
    if info.len() > 6 && rng.random_bool(0.4) {
        let mut constraints = Vec::new();
        for _ in 0..rng.random_range(1..=3) {
            let p = rng.random_range(2..info.len());
            let sources: Vec<usize> = (0..p).filter(|_| rng.random_bool(0.4)).map(|i| info[i]).collect();
            if constraints.iter().all(|c: &ParityConstraint| c.parity != info[p]) && !sources.is_empty() {
                constraints.push(ParityConstraint { parity: info[p], sources });
            }
        }
        if let Ok(s) = spec.clone().with_parity_checks(Some(ParityCheckSpec { constraints })) {
            spec = s;
        }
    }
    let threshold = [0.0, 0.0, 0.25, 0.5, 1.0][rng.random_range(0..5)];
    spec.with_good_threshold(threshold).unwrap()
}

pub fn random_shortcuts(rng: &mut ChaCha8Rng) -> Shortcuts {
    Shortcuts {
        special_nodes: rng.random_bool(0.5),
        good_bits: rng.random_bool(0.5),
        skip_prefix: rng.random_bool(0.5),
        multi_bit: rng.random_bool(0.5),
    }
}

pub fn check_against_naive<A: LlrArith>(dec: &Decoder<A>, channel: &[f64]) -> Result<(), String> {
    let arith = dec.arith();
    let llrs: Vec<A::Llr> = channel.iter().map(|&x| arith.channel(x).unwrap()).collect();
    let got = dec.decode_llrs(&llrs).unwrap();
    let kinds = bit_kinds(dec.spec(), dec.profile().shortcuts.good_bits, dec.list_size());
    let want = naive_scl(arith, dec.spec(), &kinds, dec.list_size(), dec.profile().selection, &llrs);
    if got.paths.len() != want.paths.len() {
        return Err(format!("{} paths vs {}", got.paths.len(), want.paths.len()));
    }
    for (i, (g, w)) in got.paths.iter().zip(&want.paths).enumerate() {
        if g.u_hat != w.u {
            return Err(format!("path {i}: u differs"));
        }
        if g.pm != arith.metric_value(w.pm) {
            return Err(format!("path {i}: pm {} vs {}", g.pm, arith.metric_value(w.pm)));
        }
        if g.shadow_u.as_ref() != Some(&g.u_hat) {
            return Err(format!("path {i}: partial-sum recovery differs from shadow"));
        }
    }
    if got.selected != want.selected {
        return Err(format!("selected {} vs {}", got.selected, want.selected));
    }
    Ok(())
}
