//! Successive-cancellation list decoding engine.
//!
//! One engine serves all three decoders: a [`DecoderProfile`] fixes the
//! list size limit, the LLR storage stride, the leaf block width and the
//! shortcuts, and the arithmetic domain is a type parameter.
//!
//! Decoded bits are never stored per path. Each path keeps one
//! partial-sum bank per stage and the decoded vector is rebuilt from those
//! banks at the end (see [`recover_u`]).

pub mod node;
pub mod profile;
pub mod recover;
pub mod select;
pub(crate) mod store;
pub mod trace;

use serde::Serialize;
use smallvec::SmallVec;

pub use node::{bit_kinds, first_nonfrozen_skip, BitKind, NodeRate, SkipPlan};
pub use profile::{DecoderKind, DecoderProfile, Selection, Shortcuts};
pub use recover::recover_u;
pub use select::{select_output, split_and_select, BlockInput, BlockOutcome, ParityIndex, Survivor};
pub use store::{StorageLayout, StoreStats};
pub use trace::{DecodeTrace, LlrOp, TraceEvent};

use crate::arith::{FixedArith, LlrArith, ScalarArith};
use crate::error::{Error, Result};
use crate::polar_code::{polar_transform_in_place, CodeSpec};
use node::{decode_forced, NodeMap};
use store::{LlrStore, PsStore};

/// Per-decode switches that do not change decoding results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeOptions {
    /// Record the operation trace.
    pub trace: bool,
    /// Additionally keep every path's decoded bits in an explicit array,
    /// as an independent check of partial-sum recovery.
    pub shadow_u: bool,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        DecodeOptions { trace: true, shadow_u: false }
    }
}

/// Final state of one surviving path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathOutcome {
    pub u_hat: Vec<u8>,
    pub pm: f64,
    pub crc_pass: bool,
    /// Bits decided by hard decision where a full list decoder would split.
    pub good_follows: u32,
    pub shadow_u: Option<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeResult {
    pub u_hat: Vec<u8>,
    /// Payload bits of `u_hat`.
    pub info_hat: Vec<u8>,
    pub selected: usize,
    pub pm: f64,
    /// CRC status of the selected path when the code carries a CRC.
    pub crc_pass: Option<bool>,
    /// Surviving paths in list order.
    pub paths: Vec<PathOutcome>,
    pub trace: DecodeTrace,
    pub stats: StoreStats,
}

/// A list decoder bound to one code.
#[derive(Debug, Clone)]
pub struct Decoder<A: LlrArith> {
    spec: CodeSpec,
    profile: DecoderProfile,
    list_size: usize,
    arith: A,
    kinds: Vec<BitKind>,
    nodes: NodeMap,
    parity_index: ParityIndex,
    first_info: usize,
    layout: StorageLayout,
    leaf_stage: usize,
    options: DecodeOptions,
}

impl Decoder<FixedArith> {
    /// Fixed-point decoder using the profile's quantization.
    pub fn fixed(spec: &CodeSpec, profile: DecoderProfile, list_size: usize) -> Result<Self> {
        let arith = FixedArith::new(profile.quant)?;
        Decoder::new(spec, profile, list_size, arith)
    }
}

impl<T> Decoder<ScalarArith<T>>
where
    ScalarArith<T>: LlrArith,
{
    /// Unquantized decoder on the scalar `T`.
    pub fn scalar(spec: &CodeSpec, profile: DecoderProfile, list_size: usize) -> Result<Self> {
        Decoder::new(spec, profile, list_size, ScalarArith::new())
    }
}

impl<A: LlrArith> Decoder<A> {
    pub fn new(spec: &CodeSpec, profile: DecoderProfile, list_size: usize, arith: A) -> Result<Self> {
        profile.validate()?;
        if !list_size.is_power_of_two() || list_size > profile.l_max {
            return Err(Error::invalid(
                "list_size",
                format!("{list_size} is not a power of two in 1..={}", profile.l_max),
            ));
        }
        if spec.len() > profile.n_max {
            return Err(Error::invalid(
                "N",
                format!("{} exceeds the decoder limit {}", spec.len(), profile.n_max),
            ));
        }
        if profile.selection == Selection::CrcAided && spec.crc().is_none() {
            return Err(Error::invalid("selection", "crc_aided selection needs a CRC"));
        }
        let kinds = bit_kinds(spec, profile.shortcuts.good_bits, list_size);
        let nodes = NodeMap::new(&kinds);
        let layout = StorageLayout::new(spec.stages(), profile.storage_stride, profile.extra_stage_copies());
        let leaf_stage = profile.effective_leaf_width().trailing_zeros() as usize;
        Ok(Decoder {
            spec: spec.clone(),
            profile,
            list_size,
            arith,
            kinds,
            nodes,
            parity_index: ParityIndex::new(spec),
            first_info: first_nonfrozen_skip(spec).first_info,
            layout,
            leaf_stage,
            options: DecodeOptions::default(),
        })
    }

    pub fn with_options(mut self, options: DecodeOptions) -> Self {
        self.options = options;
        self
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn profile(&self) -> &DecoderProfile {
        &self.profile
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    pub fn arith(&self) -> &A {
        &self.arith
    }

    pub fn storage_layout(&self) -> &StorageLayout {
        &self.layout
    }

    pub fn bit_kinds(&self) -> &[BitKind] {
        &self.kinds
    }

    /// Decodes real-valued channel LLRs (positive favors bit 0).
    pub fn decode(&self, channel: &[f64]) -> Result<DecodeResult> {
        let llrs = channel.iter().map(|&x| self.arith.channel(x)).collect::<Result<Vec<_>>>()?;
        self.decode_llrs(&llrs)
    }

    /// Decodes LLRs already in the arithmetic domain.
    pub fn decode_llrs(&self, channel: &[A::Llr]) -> Result<DecodeResult> {
        let len = self.spec.len();
        if channel.len() != len {
            return Err(Error::LengthMismatch { what: "channel LLRs", expected: len, got: channel.len() });
        }
        if self.spec.k() == 0 {
            return Ok(self.degenerate());
        }
        let mut session = Session::new(self, channel.to_vec());
        session.visit(self.spec.stages(), 0);
        Ok(session.finish())
    }

    fn degenerate(&self) -> DecodeResult {
        let u = vec![0u8; self.spec.len()];
        let pm = self.arith.metric_value(self.arith.zero_metric());
        DecodeResult {
            info_hat: self.spec.extract_info(&u),
            selected: 0,
            pm,
            crc_pass: None,
            paths: vec![PathOutcome { u_hat: u.clone(), pm, crc_pass: false, good_follows: 0, shadow_u: None }],
            u_hat: u,
            trace: DecodeTrace { len: self.spec.len(), list_size: self.list_size, events: Vec::new() },
            stats: StoreStats::default(),
        }
    }
}

#[derive(Debug, Clone)]
struct PathState<M> {
    pm: M,
    parity: SmallVec<[u8; 4]>,
    tail: u8,
    good_follows: u32,
    shadow: Option<Vec<u8>>,
}

struct Session<'d, A: LlrArith> {
    dec: &'d Decoder<A>,
    n: usize,
    llr: LlrStore<A::Llr>,
    ps: PsStore,
    ps_stats: StoreStats,
    paths: Vec<PathState<A::Metric>>,
    events: Vec<TraceEvent>,
    /// Node index most recently computed at each stage.
    last_node: Vec<usize>,
}

/// LLR work of one node step, grouped by (stage, op, recompute).
type OpCounts = Vec<(usize, LlrOp, bool, u16)>;

impl<'d, A: LlrArith> Session<'d, A> {
    fn new(dec: &'d Decoder<A>, channel: Vec<A::Llr>) -> Self {
        let n = dec.spec.stages();
        let shadow = dec.options.shadow_u.then(|| vec![0u8; dec.spec.len()]);
        Session {
            dec,
            n,
            llr: LlrStore::new(dec.layout.clone(), channel, dec.arith.zero_llr()),
            ps: PsStore::new(n),
            ps_stats: StoreStats::default(),
            paths: vec![PathState {
                pm: dec.arith.zero_metric(),
                parity: SmallVec::from_elem(0, dec.parity_index.constraints),
                tail: 0,
                good_follows: 0,
                shadow,
            }],
            events: Vec::new(),
            last_node: vec![usize::MAX; n + 1],
        }
    }

    fn emit(&mut self, event: TraceEvent) {
        if self.dec.options.trace {
            self.events.push(event);
        }
    }

    fn visit(&mut self, t: usize, j: usize) {
        let dec = self.dec;
        let width = 1usize << t;
        let start = j << t;
        let shortcuts = dec.profile.shortcuts;
        if shortcuts.skip_prefix && start + width <= dec.first_info {
            let llrs = self.compute_node(t, j, true);
            self.emit(TraceEvent::Skip { stage: t as u8 });
            self.forced_block(t, j, &llrs);
            return;
        }
        let class = dec.nodes.class(t, j);
        if shortcuts.special_nodes && class != NodeRate::Mixed && width <= dec.profile.max_special_node {
            let llrs = self.compute_node(t, j, true);
            self.emit(TraceEvent::Special {
                stage: t as u8,
                rate1: class == NodeRate::Rate1,
                paths: self.paths.len() as u16,
            });
            self.forced_block(t, j, &llrs);
            return;
        }
        if t <= dec.leaf_stage {
            let llrs = self.compute_node(t, j, true);
            self.leaf_block(t, j, &llrs);
            return;
        }
        if t < self.n && dec.layout.is_stored(t) {
            self.compute_node(t, j, false);
        }
        self.visit(t - 1, 2 * j);
        self.visit(t - 1, 2 * j + 1);
    }

    /// Brings node `(t, j)` up to date for every path. With `gather`, the
    /// node LLRs are returned path-major.
    fn compute_node(&mut self, t: usize, j: usize, gather: bool) -> Vec<A::Llr> {
        let width = 1usize << t;
        let mut out = Vec::with_capacity(if gather { width * self.paths.len() } else { 0 });
        if t == self.n {
            for _ in 0..self.paths.len() {
                out.extend_from_slice(self.llr.node(0, t));
            }
            return out;
        }
        let mut counts = OpCounts::new();
        let mut touched = Vec::new();
        for p in 0..self.paths.len() {
            self.chain(p, t, j, &mut counts, if p == 0 { Some(&mut touched) } else { None });
            if gather {
                out.extend_from_slice(self.llr.node(p, t));
            }
        }
        for (s, idx) in touched {
            self.last_node[s] = idx;
        }
        for (stage, op, recompute, paths) in counts {
            self.emit(TraceEvent::Llr { stage: stage as u8, op, paths, recompute });
        }
        out
    }

    /// Computes `(t, j)` for path `p`, first recomputing any unstored
    /// ancestors it depends on.
    fn chain(
        &mut self,
        p: usize,
        t: usize,
        j: usize,
        counts: &mut OpCounts,
        mut touched: Option<&mut Vec<(usize, usize)>>,
    ) {
        let src = t + 1;
        if src < self.n && !self.dec.layout.is_stored(src) {
            self.chain(p, src, j >> 1, counts, touched.as_deref_mut());
        }
        let op = if j & 1 == 0 { LlrOp::F } else { LlrOp::G };
        let ps = (op == LlrOp::G).then(|| self.ps.read(p, t));
        self.llr.compute(&self.dec.arith, p, t, ps);
        let recompute = self.last_node[t] == j;
        match counts.iter_mut().find(|c| c.0 == t && c.1 == op && c.2 == recompute) {
            Some(c) => c.3 += 1,
            None => counts.push((t, op, recompute, 1)),
        }
        if let Some(touched) = touched {
            touched.push((t, j));
        }
    }

    fn forced_block(&mut self, t: usize, j: usize, llrs: &[A::Llr]) {
        let dec = self.dec;
        let width = 1usize << t;
        let start = j << t;
        let kinds = &dec.kinds[start..start + width];
        let goods = kinds.iter().filter(|&&k| k == BitKind::Good).count() as u32;
        for p in 0..self.paths.len() {
            let mut pm = self.paths[p].pm;
            let bits = decode_forced(&dec.arith, &llrs[p * width..(p + 1) * width], t, self.n, kinds, &mut pm);
            let path = &mut self.paths[p];
            path.pm = pm;
            path.good_follows += goods;
            for (i, &b) in bits.iter().enumerate() {
                dec.parity_index.fold(&mut path.parity, start + i, b);
            }
            self.commit(p, t, j, &bits);
        }
    }

    fn leaf_block(&mut self, t: usize, j: usize, llrs: &[A::Llr]) {
        let dec = self.dec;
        let width = 1usize << t;
        let start = j << t;
        let kinds = &dec.kinds[start..start + width];
        let goods = kinds.iter().filter(|&&k| k == BitKind::Good).count() as u32;
        let outcome = {
            let inputs: Vec<BlockInput<'_, A>> = self
                .paths
                .iter()
                .enumerate()
                .map(|(p, s)| BlockInput { pm: s.pm, llrs: &llrs[p * width..(p + 1) * width], parity: &s.parity })
                .collect();
            split_and_select(&dec.arith, t, self.n, &inputs, kinds, start, &dec.parity_index, dec.list_size)
        };
        self.emit(TraceEvent::Leaf {
            stage: t as u8,
            paths: self.paths.len() as u16,
            candidates: outcome.candidates as u16,
            selections: outcome.selections as u8,
        });
        let parents: Vec<usize> = outcome.survivors.iter().map(|s| s.parent).collect();
        self.llr.reassign(&parents);
        self.ps.reassign(&parents);
        let old = std::mem::take(&mut self.paths);
        self.paths = outcome
            .survivors
            .iter()
            .map(|s| {
                let o = &old[s.parent];
                PathState {
                    pm: s.pm,
                    parity: s.parity.clone(),
                    tail: o.tail,
                    good_follows: o.good_follows + goods,
                    shadow: o.shadow.clone(),
                }
            })
            .collect();
        for (p, s) in outcome.survivors.iter().enumerate() {
            self.commit(p, t, j, &s.bits);
        }
    }

    /// Stores the decided bits of node `(t, j)` for path `p` as partial sums.
    fn commit(&mut self, p: usize, t: usize, j: usize, bits: &[u8]) {
        let width = bits.len();
        let start = j << t;
        for s in 0..t {
            let mut seg = bits[width - (2 << s)..width - (1 << s)].to_vec();
            polar_transform_in_place(&mut seg);
            self.ps.write(p, s, &seg, &mut self.ps_stats);
        }
        let path = &mut self.paths[p];
        if start + width == self.dec.spec.len() {
            path.tail = bits[width - 1];
        }
        if let Some(shadow) = path.shadow.as_mut() {
            shadow[start..start + width].copy_from_slice(bits);
        }
        let mut beta = bits.to_vec();
        polar_transform_in_place(&mut beta);
        self.ps.store_beta(p, t, j, beta, &mut self.ps_stats);
    }

    fn finish(self) -> DecodeResult {
        let dec = self.dec;
        let arith = &dec.arith;
        let paths: Vec<PathOutcome> = self
            .paths
            .iter()
            .enumerate()
            .map(|(p, s)| {
                let sums: Vec<&[u8]> = (0..self.ps.stages()).map(|t| self.ps.read(p, t)).collect();
                let u_hat = recover_u(&sums, s.tail).expect("banks have stage widths");
                PathOutcome {
                    crc_pass: dec.spec.crc().is_some() && dec.spec.crc_passes(&u_hat),
                    u_hat,
                    pm: arith.metric_value(s.pm),
                    good_follows: s.good_follows,
                    shadow_u: s.shadow.clone(),
                }
            })
            .collect();
        let metrics: Vec<A::Metric> = self.paths.iter().map(|s| s.pm).collect();
        let crc: Vec<bool> = paths.iter().map(|p| p.crc_pass).collect();
        let selected = select_output(&metrics, &crc, dec.profile.selection);
        let chosen = &paths[selected];
        let mut stats = self.llr.stats;
        stats.bank_detaches += self.ps_stats.bank_detaches;
        stats.elements_copied += self.ps_stats.elements_copied;
        DecodeResult {
            u_hat: chosen.u_hat.clone(),
            info_hat: dec.spec.extract_info(&chosen.u_hat),
            selected,
            pm: chosen.pm,
            crc_pass: dec.spec.crc().map(|_| chosen.crc_pass),
            trace: DecodeTrace { len: dec.spec.len(), list_size: dec.list_size, events: self.events },
            stats,
            paths,
        }
    }
}
