//! Path splitting and list pruning over a leaf block.
//!
//! Bits of a block are settled one after another for every candidate
//! prefix; after each split bit the candidates are cut back to the list
//! size, so a block decision equals the same number of single-bit steps.

use smallvec::SmallVec;

use super::node::{leaf_llr, BitKind};
use super::profile::Selection;
use crate::arith::LlrArith;

/// One path entering a leaf block.
#[derive(Debug, Clone)]
pub struct BlockInput<'a, A: LlrArith> {
    pub pm: A::Metric,
    /// The block node's LLRs (`2^stage` values).
    pub llrs: &'a [A::Llr],
    /// Running XOR of each parity constraint.
    pub parity: &'a [u8],
}

/// One path leaving a leaf block.
#[derive(Debug, Clone, PartialEq)]
pub struct Survivor<M> {
    pub parent: usize,
    pub bits: SmallVec<[u8; 8]>,
    pub pm: M,
    pub parity: SmallVec<[u8; 4]>,
}

/// Parity constraints each position feeds.
#[derive(Debug, Clone, Default)]
pub struct ParityIndex {
    sources_of: Vec<SmallVec<[usize; 2]>>,
    pub constraints: usize,
}

impl ParityIndex {
    pub fn new(spec: &crate::polar_code::CodeSpec) -> Self {
        let mut sources_of = vec![SmallVec::new(); spec.len()];
        let mut constraints = 0;
        if let Some(pc) = spec.parity_checks() {
            constraints = pc.constraints.len();
            for (c, con) in pc.constraints.iter().enumerate() {
                for &s in &con.sources {
                    sources_of[s].push(c);
                }
            }
        }
        ParityIndex { sources_of, constraints }
    }

    pub fn fold(&self, acc: &mut [u8], pos: usize, bit: u8) {
        if bit != 0 {
            for &c in self.sources_of.get(pos).into_iter().flatten() {
                acc[c] ^= 1;
            }
        }
    }
}

/// Outcome of [`split_and_select`].
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOutcome<M> {
    /// Survivors in lexicographic (parent, pattern) order.
    pub survivors: Vec<Survivor<M>>,
    /// Split bits, i.e. list selections performed.
    pub selections: usize,
    /// Largest candidate list the sorter saw.
    pub candidates: usize,
}

/// Decides the block starting at `block_start` with per-bit `kinds` for
/// every input path, keeping at most `list_size` survivors.
///
/// Ties on the metric prefer the lower parent, then the lexicographically
/// smaller bit pattern.
pub fn split_and_select<A: LlrArith>(
    arith: &A,
    stage: usize,
    n: usize,
    inputs: &[BlockInput<'_, A>],
    kinds: &[BitKind],
    block_start: usize,
    parity_index: &ParityIndex,
    list_size: usize,
) -> BlockOutcome<A::Metric> {
    let mut cands: Vec<Survivor<A::Metric>> = inputs
        .iter()
        .enumerate()
        .map(|(p, inp)| Survivor {
            parent: p,
            bits: SmallVec::new(),
            pm: inp.pm,
            parity: SmallVec::from_slice(inp.parity),
        })
        .collect();
    let mut selections = 0;
    let mut max_candidates = 0;
    for (j, &kind) in kinds.iter().enumerate() {
        let pos = block_start + j;
        let mut next = Vec::with_capacity(cands.len() * 2);
        for c in cands {
            let llr = leaf_llr(arith, inputs[c.parent].llrs, stage, n, &c.bits);
            let push = |next: &mut Vec<Survivor<A::Metric>>, c: &Survivor<A::Metric>, bit: u8| {
                let mut s = c.clone();
                s.bits.push(bit);
                s.pm = arith.update(c.pm, llr, bit);
                parity_index.fold(&mut s.parity, pos, bit);
                next.push(s);
            };
            match kind {
                BitKind::Free => {
                    push(&mut next, &c, 0);
                    push(&mut next, &c, 1);
                }
                BitKind::Frozen => push(&mut next, &c, 0),
                BitKind::Good => push(&mut next, &c, arith.hard(llr)),
                BitKind::Parity(k) => push(&mut next, &c, c.parity[k]),
            }
        }
        if kind == BitKind::Free {
            selections += 1;
            max_candidates = max_candidates.max(next.len());
            prune(&mut next, list_size);
            let mut pms: Vec<A::Metric> = next.iter().map(|s| s.pm).collect();
            arith.normalize(&mut pms);
            for (s, pm) in next.iter_mut().zip(pms) {
                s.pm = pm;
            }
        }
        cands = next;
    }
    BlockOutcome { survivors: cands, selections, candidates: max_candidates }
}

/// Keeps the `list_size` smallest metrics of a lexicographically ordered
/// candidate list, preserving the order.
fn prune<M: PartialOrd>(cands: &mut Vec<Survivor<M>>, list_size: usize) {
    if cands.len() <= list_size {
        return;
    }
    let mut order: Vec<usize> = (0..cands.len()).collect();
    order.sort_by(|&a, &b| {
        cands[a]
            .pm
            .partial_cmp(&cands[b].pm)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut keep = vec![false; cands.len()];
    for &i in &order[..list_size] {
        keep[i] = true;
    }
    let mut i = 0;
    cands.retain(|_| {
        let k = keep[i];
        i += 1;
        k
    });
}

/// Picks the output path: the smallest metric (lowest index on ties), or
/// under CRC-aided selection the smallest metric among CRC-passing paths,
/// falling back to the overall best when none passes.
pub fn select_output<M: PartialOrd + Copy>(
    pms: &[M],
    crc_pass: &[bool],
    mode: Selection,
) -> usize {
    let best_of = |filter: &dyn Fn(usize) -> bool| {
        (0..pms.len()).filter(|&i| filter(i)).fold(None, |best: Option<usize>, i| match best {
            Some(b) if !(pms[i] < pms[b]) => Some(b),
            _ => Some(i),
        })
    };
    let overall = best_of(&|_| true).unwrap_or(0);
    match mode {
        Selection::CrcAided => best_of(&|i| crc_pass.get(i).copied().unwrap_or(false)).unwrap_or(overall),
        Selection::BestPm | Selection::ParityCheck => overall,
    }
}
