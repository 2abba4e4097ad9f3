//! Decoding-tree structure: per-bit decision kinds, rate-0 / rate-1 node
//! classes, the frozen-prefix skip plan and local SC evaluation inside a
//! node.

use serde::Serialize;

use crate::arith::LlrArith;
use crate::polar_code::{polar_transform_in_place, BitRole, CodeSpec};

/// How the decoder settles one bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BitKind {
    Frozen,
    /// Split into both hypotheses.
    Free,
    /// Follows its hard decision without splitting.
    Good,
    /// Set to the running XOR of constraint `c`.
    Parity(usize),
}

impl BitKind {
    pub fn is_forced(self) -> bool {
        matches!(self, BitKind::Frozen | BitKind::Good)
    }
}

/// Decision kinds of every bit for the given shortcut settings.
pub fn bit_kinds(spec: &CodeSpec, good_bits: bool, list_size: usize) -> Vec<BitKind> {
    spec.roles()
        .iter()
        .zip(spec.good_mask())
        .map(|(role, &good)| match *role {
            BitRole::Frozen => BitKind::Frozen,
            BitRole::Parity(c) => BitKind::Parity(c),
            // A single path never splits: every free bit follows its decision.
            _ if list_size == 1 || (good_bits && good) => BitKind::Good,
            _ => BitKind::Free,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeRate {
    /// Every bit frozen.
    Rate0,
    /// Every bit follows its hard decision.
    Rate1,
    Mixed,
}

/// Rate class of every node, `classes[stage][index]`.
#[derive(Debug, Clone)]
pub(crate) struct NodeMap {
    classes: Vec<Vec<NodeRate>>,
}

impl NodeMap {
    pub(crate) fn new(kinds: &[BitKind]) -> Self {
        let leaves: Vec<NodeRate> = kinds
            .iter()
            .map(|k| match k {
                BitKind::Frozen => NodeRate::Rate0,
                BitKind::Good => NodeRate::Rate1,
                _ => NodeRate::Mixed,
            })
            .collect();
        let mut classes = vec![leaves];
        while classes.last().map_or(0, Vec::len) > 1 {
            let below = classes.last().expect("non-empty");
            let up = below
                .chunks(2)
                .map(|c| if c[0] == c[1] { c[0] } else { NodeRate::Mixed })
                .collect();
            classes.push(up);
        }
        NodeMap { classes }
    }

    pub(crate) fn class(&self, stage: usize, index: usize) -> NodeRate {
        self.classes[stage][index]
    }
}

/// Aligned all-frozen subtrees covering the bits before the first
/// non-frozen one; these are never traversed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkipPlan {
    /// First non-frozen position (`N` for an all-frozen code).
    pub first_info: usize,
    /// `(stage, index)` of each skipped subtree, left to right.
    pub subtrees: Vec<(usize, usize)>,
}

pub fn first_nonfrozen_skip(spec: &CodeSpec) -> SkipPlan {
    let first_info = spec.frozen_mask().iter().position(|&f| !f).unwrap_or(spec.len());
    let mut subtrees = Vec::new();
    let mut pos = 0usize;
    while pos < first_info {
        let mut stage = spec.stages();
        while (1usize << stage) > first_info - pos || pos % (1usize << stage) != 0 {
            stage -= 1;
        }
        subtrees.push((stage, pos >> stage));
        pos += 1 << stage;
    }
    SkipPlan { first_info, subtrees }
}

/// Stage-0 LLR of bit `prefix.len()` of a node, given the node's LLRs
/// (`2^stage` values) and the bits already decided inside it.
pub(crate) fn leaf_llr<A: LlrArith>(
    arith: &A,
    llrs: &[A::Llr],
    stage: usize,
    n: usize,
    prefix: &[u8],
) -> A::Llr {
    let mut cur: Vec<A::Llr> = llrs.to_vec();
    let mut offset = 0usize;
    let mut beta = Vec::new();
    for t in (0..stage).rev() {
        let h = 1usize << t;
        if prefix.len() - offset < h {
            for i in 0..h {
                cur[i] = arith.f(cur[i], cur[i + h], t, n);
            }
        } else {
            beta.clear();
            beta.extend_from_slice(&prefix[offset..offset + h]);
            polar_transform_in_place(&mut beta);
            for i in 0..h {
                cur[i] = arith.g(cur[i + h], cur[i], beta[i], t, n);
            }
            offset += h;
        }
        cur.truncate(h);
    }
    cur[0]
}

/// SC-decodes a node whose bits are all frozen or good, accumulating the
/// path-metric penalty bit by bit. Returns the node's bits in `u` order.
pub(crate) fn decode_forced<A: LlrArith>(
    arith: &A,
    llrs: &[A::Llr],
    stage: usize,
    n: usize,
    kinds: &[BitKind],
    pm: &mut A::Metric,
) -> Vec<u8> {
    let mut bits = Vec::with_capacity(kinds.len());
    forced_rec(arith, llrs, stage, n, kinds, pm, &mut bits);
    bits
}

fn forced_rec<A: LlrArith>(
    arith: &A,
    llrs: &[A::Llr],
    stage: usize,
    n: usize,
    kinds: &[BitKind],
    pm: &mut A::Metric,
    bits: &mut Vec<u8>,
) -> Vec<u8> {
    if stage == 0 {
        let llr = llrs[0];
        let bit = match kinds[0] {
            BitKind::Frozen => 0,
            BitKind::Good => arith.hard(llr),
            other => unreachable!("forced node holds a {other:?} bit"),
        };
        *pm = arith.update(*pm, llr, bit);
        bits.push(bit);
        return vec![bit];
    }
    let h = 1usize << (stage - 1);
    let left: Vec<A::Llr> = (0..h).map(|i| arith.f(llrs[i], llrs[i + h], stage - 1, n)).collect();
    let bl = forced_rec(arith, &left, stage - 1, n, &kinds[..h], pm, bits);
    let right: Vec<A::Llr> =
        (0..h).map(|i| arith.g(llrs[i + h], llrs[i], bl[i], stage - 1, n)).collect();
    let br = forced_rec(arith, &right, stage - 1, n, &kinds[h..], pm, bits);
    let mut beta: Vec<u8> = bl.iter().zip(&br).map(|(l, r)| l ^ r).collect();
    beta.extend_from_slice(&br);
    beta
}
