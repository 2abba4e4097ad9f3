//! Slow, direct decoders used to cross-check the engine.
//!
//! These keep every path's decoded bits in a plain array and recompute each
//! bit's LLR from the channel values, with no partial-sum banks, no storage
//! reduction and no shortcuts.

use crate::arith::LlrArith;
use crate::polar_code::{polar_transform, CodeSpec};
use crate::scl::{BitKind, Selection};

/// LLR of bit `i` given channel (or node) LLRs and the bits before it.
pub fn bit_llr<A: LlrArith>(arith: &A, llrs: &[A::Llr], n: usize, prefix: &[u8], i: usize) -> A::Llr {
    let len = llrs.len();
    if len == 1 {
        return llrs[0];
    }
    let h = len / 2;
    let stage = h.trailing_zeros() as usize;
    if i < h {
        let left: Vec<A::Llr> = (0..h).map(|k| arith.f(llrs[k], llrs[k + h], stage, n)).collect();
        bit_llr(arith, &left, n, &prefix[..i.min(h)], i)
    } else {
        let beta = polar_transform(&prefix[..h]).expect("power of two");
        let right: Vec<A::Llr> = (0..h).map(|k| arith.g(llrs[k + h], llrs[k], beta[k], stage, n)).collect();
        bit_llr(arith, &right, n, &prefix[h..], i - h)
    }
}

/// A path of the naive list decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct NaivePath<M> {
    pub u: Vec<u8>,
    pub pm: M,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveOutcome<M> {
    pub paths: Vec<NaivePath<M>>,
    pub selected: usize,
}

/// Bit-by-bit list decoding over `kinds`, one split / prune per free bit.
///
/// Candidates are enumerated path by path with bit 0 first; pruning keeps
/// the smallest metrics (earliest candidate on ties) in enumeration order.
pub fn naive_scl<A: LlrArith>(
    arith: &A,
    spec: &CodeSpec,
    kinds: &[BitKind],
    list_size: usize,
    selection: Selection,
    channel: &[A::Llr],
) -> NaiveOutcome<A::Metric> {
    let n = spec.stages();
    let len = spec.len();
    let constraints = spec.parity_checks().map(|p| p.constraints.clone()).unwrap_or_default();
    let mut paths = vec![NaivePath { u: Vec::with_capacity(len), pm: arith.zero_metric() }];
    for (i, &kind) in kinds.iter().enumerate() {
        let mut next = Vec::new();
        for path in &paths {
            let llr = bit_llr(arith, channel, n, &path.u, i);
            let mut take = |bit: u8| {
                let mut u = path.u.clone();
                u.push(bit);
                next.push(NaivePath { u, pm: arith.update(path.pm, llr, bit) });
            };
            match kind {
                BitKind::Frozen => take(0),
                BitKind::Good => take(arith.hard(llr)),
                BitKind::Parity(c) => {
                    let bit = constraints[c].sources.iter().fold(0u8, |acc, &s| acc ^ path.u[s]);
                    take(bit)
                }
                BitKind::Free => {
                    take(0);
                    take(1);
                }
            }
        }
        if kind == BitKind::Free {
            if next.len() > list_size {
                let mut ranked: Vec<usize> = (0..next.len()).collect();
                ranked.sort_by(|&a, &b| {
                    next[a].pm.partial_cmp(&next[b].pm).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
                });
                let mut kept: Vec<usize> = ranked[..list_size].to_vec();
                kept.sort_unstable();
                next = kept.into_iter().map(|k| next[k].clone()).collect();
            }
            let mut pms: Vec<A::Metric> = next.iter().map(|p| p.pm).collect();
            arith.normalize(&mut pms);
            for (p, pm) in next.iter_mut().zip(pms) {
                p.pm = pm;
            }
        }
        paths = next;
    }
    let argmin = |ok: &dyn Fn(&NaivePath<A::Metric>) -> bool| {
        let mut best: Option<usize> = None;
        for (i, p) in paths.iter().enumerate() {
            if ok(p) && best.map_or(true, |b| p.pm < paths[b].pm) {
                best = Some(i);
            }
        }
        best
    };
    let overall = argmin(&|_| true).unwrap_or(0);
    let selected = match (selection, spec.crc()) {
        (Selection::CrcAided, Some(crc)) => {
            argmin(&|p| {
                let bits: Vec<u8> = spec.payload_positions().iter().chain(spec.crc_positions()).map(|&i| p.u[i]).collect();
                crc.check(&bits)
            })
            .unwrap_or(overall)
        }
        _ => overall,
    };
    NaiveOutcome { paths, selected }
}

/// Textbook recursive SC decoding in double precision.
pub fn sc_decode_f64(channel: &[f64], frozen: &[bool]) -> Vec<u8> {
    fn rec(llr: &[f64], frozen: &[bool], u: &mut Vec<u8>) -> Vec<u8> {
        if llr.len() == 1 {
            let bit = if frozen[0] { 0 } else { u8::from(llr[0] < 0.0) };
            u.push(bit);
            return vec![bit];
        }
        let h = llr.len() / 2;
        let a: Vec<f64> = (0..h)
            .map(|i| {
                let (x, y) = (llr[i], llr[i + h]);
                let m = x.abs().min(y.abs());
                if (x < 0.0) != (y < 0.0) { -m } else { m }
            })
            .collect();
        let xl = rec(&a, &frozen[..h], u);
        let b: Vec<f64> = (0..h)
            .map(|i| if xl[i] == 0 { llr[i + h] + llr[i] } else { llr[i + h] - llr[i] })
            .collect();
        let xr = rec(&b, &frozen[h..], u);
        let mut x: Vec<u8> = xl.iter().zip(&xr).map(|(l, r)| l ^ r).collect();
        x.extend(xr);
        x
    }
    let mut u = Vec::with_capacity(channel.len());
    rec(channel, frozen, &mut u);
    u
}

/// Exhaustive search for the source vector with the smallest sequential
/// path metric; ties go to the lexicographically smallest payload.
pub fn ml_sequential<A: LlrArith>(arith: &A, spec: &CodeSpec, channel: &[A::Llr]) -> (Vec<u8>, A::Metric) {
    let k = spec.payload_len();
    assert!(k <= 20, "exhaustive search over 2^{k} payloads");
    let n = spec.stages();
    let mut best: Option<(Vec<u8>, A::Metric)> = None;
    for word in 0u32..(1u32 << k) {
        let payload: Vec<u8> = (0..k).map(|b| ((word >> (k - 1 - b)) & 1) as u8).collect();
        let u = spec.source_vector(&payload).expect("payload length");
        let mut pm = arith.zero_metric();
        for i in 0..u.len() {
            pm = arith.update(pm, bit_llr(arith, channel, n, &u[..i], i), u[i]);
        }
        if best.as_ref().map_or(true, |(_, b)| pm < *b) {
            best = Some((u, pm));
        }
    }
    best.expect("at least one payload")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ScalarArith;
    use crate::polar_code::{construct_code, ConstructionMethod};

    #[test]
    fn sc_reference_decodes_noiseless_codeword() {
        let spec = construct_code(32, 16, ConstructionMethod::Bhattacharyya, 0.5).unwrap();
        let payload: Vec<u8> = (0..16).map(|i| (i * 7 % 3 == 0) as u8).collect();
        let x = spec.encode(&payload).unwrap();
        let llr: Vec<f64> = x.iter().map(|&b| if b == 0 { 2.0 } else { -2.0 }).collect();
        let u = sc_decode_f64(&llr, spec.frozen_mask());
        assert_eq!(spec.extract_info(&u), payload);
    }

    #[test]
    fn bit_llr_first_bit_is_f_tree() {
        let a = ScalarArith::<f64>::new();
        let llr = [1.0, -3.0, 2.0, 0.5];
        assert_eq!(bit_llr(&a, &llr, 2, &[], 0), -0.5);
    }
}
