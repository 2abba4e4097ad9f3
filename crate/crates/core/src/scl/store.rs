//! Path-indexed LLR and partial-sum memories.
//!
//! Every stored stage owns a pool of reference-counted banks; a path holds
//! one bank address per stage. Cloning a path copies addresses only. A path
//! writing into a shared bank is first given a fresh bank of its own, and
//! since every write overwrites the whole bank no element is ever copied.

use serde::Serialize;

use crate::arith::LlrArith;

const NONE: usize = usize::MAX;

/// Copy-on-write counters of one decode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StoreStats {
    /// Paths created as a duplicate of another surviving path.
    pub clone_events: u64,
    /// Shared banks a path had to detach from before writing.
    pub bank_detaches: u64,
    /// LLR / partial-sum elements copied between banks.
    pub elements_copied: u64,
    /// Highest number of LLR banks simultaneously allocated.
    pub peak_llr_banks: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct BankPool<T> {
    width: usize,
    banks: Vec<Vec<T>>,
    refs: Vec<u32>,
    free: Vec<usize>,
    fill: T,
}

impl<T: Copy> BankPool<T> {
    pub(crate) fn new(width: usize, fill: T) -> Self {
        BankPool { width, banks: Vec::new(), refs: Vec::new(), free: Vec::new(), fill }
    }

    pub(crate) fn alloc(&mut self) -> usize {
        if let Some(id) = self.free.pop() {
            self.refs[id] = 1;
            id
        } else {
            self.banks.push(vec![self.fill; self.width]);
            self.refs.push(1);
            self.banks.len() - 1
        }
    }

    pub(crate) fn share(&mut self, id: usize) {
        self.refs[id] += 1;
    }

    pub(crate) fn release(&mut self, id: usize) {
        self.refs[id] -= 1;
        if self.refs[id] == 0 {
            self.free.push(id);
        }
    }

    pub(crate) fn read(&self, id: usize) -> &[T] {
        &self.banks[id]
    }

    /// Mutable access for a full overwrite; detaches from sharers first.
    pub(crate) fn overwrite(&mut self, id: &mut usize, stats: &mut StoreStats) -> &mut [T] {
        if self.refs[*id] > 1 {
            self.refs[*id] -= 1;
            *id = self.alloc();
            stats.bank_detaches += 1;
        }
        &mut self.banks[*id]
    }

    pub(crate) fn live(&self) -> usize {
        self.banks.len() - self.free.len()
    }
}

/// Which stages keep per-path banks and what that costs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StorageLayout {
    pub stages: usize,
    pub stride: usize,
    /// `stored[t]` for `t < stages`; the channel stage is always kept.
    pub stored: Vec<bool>,
    /// LLR entries held per path.
    pub per_path_entries: usize,
    /// Replicated unstored-stage entries shared by all paths.
    pub shared_entries: usize,
    /// Replicas of an unstored stage: `(stage, copies)`.
    pub extra: Option<(usize, usize)>,
}

impl StorageLayout {
    pub fn new(stages: usize, stride: usize, extra: Option<(usize, usize)>) -> Self {
        let stride = stride.max(1);
        let stored: Vec<bool> = (0..stages).map(|t| t % stride == 0).collect();
        let per_path_entries = (0..stages).filter(|&t| stored[t]).map(|t| 1usize << t).sum();
        let extra = extra.filter(|&(s, c)| s < stages && !stored[s] && c > 0);
        let shared_entries = extra.map_or(0, |(s, c)| c << s);
        StorageLayout { stages, stride, stored, per_path_entries, shared_entries, extra }
    }

    /// Entries per path of an engine storing every stage.
    pub fn full_entries(&self) -> usize {
        (1usize << self.stages) - 1
    }

    /// Total LLR entries for `list_size` paths (channel excluded).
    pub fn total_entries(&self, list_size: usize) -> usize {
        list_size * self.per_path_entries + self.shared_entries
    }

    /// Memory relative to storing every stage for every path.
    pub fn ratio(&self, list_size: usize) -> f64 {
        self.total_entries(list_size) as f64 / (list_size * self.full_entries()) as f64
    }

    pub fn is_stored(&self, stage: usize) -> bool {
        stage >= self.stages || self.stored[stage]
    }

    fn scratch_copies(&self, stage: usize) -> usize {
        match self.extra {
            Some((s, c)) if s == stage => c,
            _ => 1,
        }
    }
}

/// Per-path address table over per-stage bank pools.
#[derive(Debug, Clone)]
struct PathBanks<T> {
    pools: Vec<BankPool<T>>,
    addr: Vec<Vec<usize>>,
}

impl<T: Copy> PathBanks<T> {
    fn new(pools: Vec<BankPool<T>>) -> Self {
        PathBanks { pools, addr: Vec::new() }
    }

    fn init_single(&mut self, stored: impl Fn(usize) -> bool) {
        let row = (0..self.pools.len())
            .map(|t| if stored(t) { self.pools[t].alloc() } else { NONE })
            .collect();
        self.addr = vec![row];
    }

    /// Rebuilds the path set: new path `i` continues old path `parents[i]`.
    fn reassign(&mut self, parents: &[usize]) {
        let mut rows = Vec::with_capacity(parents.len());
        for &p in parents {
            let row = self.addr[p].clone();
            for (t, &id) in row.iter().enumerate() {
                if id != NONE {
                    self.pools[t].share(id);
                }
            }
            rows.push(row);
        }
        for row in std::mem::take(&mut self.addr) {
            for (t, &id) in row.iter().enumerate() {
                if id != NONE {
                    self.pools[t].release(id);
                }
            }
        }
        self.addr = rows;
    }
}

/// Counts paths that duplicate an earlier path of the same parent.
fn duplicates(parents: &[usize]) -> u64 {
    let mut seen = std::collections::HashSet::new();
    parents.iter().filter(|&&p| !seen.insert(p)).count() as u64
}

fn is_identity(parents: &[usize], current: usize) -> bool {
    parents.len() == current && parents.iter().enumerate().all(|(i, &p)| i == p)
}

/// LLR memory of all paths.
#[derive(Debug, Clone)]
pub(crate) struct LlrStore<T> {
    layout: StorageLayout,
    banks: PathBanks<T>,
    /// Scratch banks of unstored stages, indexed `[stage][copy]`.
    scratch: Vec<Vec<Vec<T>>>,
    channel: Vec<T>,
    pub(crate) stats: StoreStats,
}

impl<T: Copy> LlrStore<T> {
    pub(crate) fn new(layout: StorageLayout, channel: Vec<T>, fill: T) -> Self {
        let n = layout.stages;
        let pools = (0..n).map(|t| BankPool::new(1 << t, fill)).collect();
        let scratch = (0..n)
            .map(|t| {
                if layout.stored[t] {
                    Vec::new()
                } else {
                    vec![vec![fill; 1 << t]; layout.scratch_copies(t)]
                }
            })
            .collect();
        let mut banks = PathBanks::new(pools);
        let stored = layout.stored.clone();
        banks.init_single(|t| stored[t]);
        let mut store = LlrStore { layout, banks, scratch, channel, stats: StoreStats::default() };
        store.track_peak();
        store
    }

    fn track_peak(&mut self) {
        let live = self.banks.pools.iter().map(BankPool::live).sum();
        self.stats.peak_llr_banks = self.stats.peak_llr_banks.max(live);
    }

    pub(crate) fn reassign(&mut self, parents: &[usize]) {
        if is_identity(parents, self.banks.addr.len()) {
            return;
        }
        self.stats.clone_events += duplicates(parents);
        self.banks.reassign(parents);
    }

    /// LLRs of `path` at `stage` as last computed.
    pub(crate) fn node(&self, path: usize, stage: usize) -> &[T] {
        let n = self.layout.stages;
        if stage == n {
            &self.channel
        } else if self.layout.stored[stage] {
            self.banks.pools[stage].read(self.banks.addr[path][stage])
        } else {
            let copies = self.scratch[stage].len();
            &self.scratch[stage][path % copies]
        }
    }

    /// Computes `path`'s node at `stage` from its parent at `stage + 1`:
    /// the f-branch when `ps` is `None`, otherwise the g-branch with the
    /// left sibling's partial sums.
    pub(crate) fn compute<A: LlrArith<Llr = T>>(
        &mut self,
        arith: &A,
        path: usize,
        stage: usize,
        ps: Option<&[u8]>,
    ) {
        let n = self.layout.stages;
        let h = 1usize << stage;
        let src_stage = stage + 1;
        // Gather the source into a stable borrow that does not alias dest.
        let (lo_pools, hi_pools) = self.banks.pools.split_at_mut(src_stage);
        let (lo_scratch, hi_scratch) = self.scratch.split_at_mut(src_stage);
        let src: &[T] = if src_stage == n {
            &self.channel
        } else if self.layout.stored[src_stage] {
            hi_pools[0].read(self.banks.addr[path][src_stage])
        } else {
            let copies = hi_scratch[0].len();
            &hi_scratch[0][path % copies]
        };
        let dest: &mut [T] = if self.layout.stored[stage] {
            lo_pools[stage].overwrite(&mut self.banks.addr[path][stage], &mut self.stats)
        } else {
            let copies = lo_scratch[stage].len();
            &mut lo_scratch[stage][path % copies]
        };
        match ps {
            None => {
                for i in 0..h {
                    dest[i] = arith.f(src[i], src[i + h], stage, n);
                }
            }
            Some(beta) => {
                for i in 0..h {
                    dest[i] = arith.g(src[i + h], src[i], beta[i], stage, n);
                }
            }
        }
        self.track_peak();
    }
}

/// Partial-sum memory: at every stage, the bits of the most recent left
/// child re-encoded to that stage.
#[derive(Debug, Clone)]
pub(crate) struct PsStore {
    stages: usize,
    banks: PathBanks<u8>,
}

impl PsStore {
    pub(crate) fn new(stages: usize) -> Self {
        let pools = (0..stages).map(|t| BankPool::new(1 << t, 0u8)).collect();
        let mut banks = PathBanks::new(pools);
        banks.init_single(|_| true);
        PsStore { stages, banks }
    }

    pub(crate) fn reassign(&mut self, parents: &[usize]) {
        if is_identity(parents, self.banks.addr.len()) {
            return;
        }
        self.banks.reassign(parents);
    }

    pub(crate) fn read(&self, path: usize, stage: usize) -> &[u8] {
        self.banks.pools[stage].read(self.banks.addr[path][stage])
    }

    pub(crate) fn write(&mut self, path: usize, stage: usize, beta: &[u8], stats: &mut StoreStats) {
        let dest = self.banks.pools[stage].overwrite(&mut self.banks.addr[path][stage], stats);
        dest.copy_from_slice(beta);
    }

    /// Records the finished node `(stage, index)` and merges it upward
    /// through every parent whose right child it completes.
    pub(crate) fn store_beta(
        &mut self,
        path: usize,
        mut stage: usize,
        mut index: usize,
        beta: Vec<u8>,
        stats: &mut StoreStats,
    ) {
        let mut beta = beta;
        while stage < self.stages {
            if index & 1 == 0 {
                self.write(path, stage, &beta, stats);
                return;
            }
            let left = self.read(path, stage);
            let mut merged = Vec::with_capacity(2 * beta.len());
            merged.extend(left.iter().zip(&beta).map(|(l, r)| l ^ r));
            merged.extend_from_slice(&beta);
            beta = merged;
            stage += 1;
            index >>= 1;
        }
    }

    pub(crate) fn stages(&self) -> usize {
        self.stages
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ScalarArith;

    #[test]
    fn layout_counts() {
        let l = StorageLayout::new(12, 3, None);
        assert_eq!(l.per_path_entries, (4095 - 1) / 7 + 1);
        assert_eq!(l.per_path_entries, 1 + 8 + 64 + 512);
        let u = StorageLayout::new(11, 4, Some((5, 4)));
        assert_eq!(u.per_path_entries, 1 + 16 + 256);
        assert_eq!(u.shared_entries, 128);
        assert_eq!(u.full_entries(), 2047);
        let full = StorageLayout::new(11, 1, None);
        assert_eq!(full.per_path_entries, 2047);
        assert!((full.ratio(8) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pool_copy_on_write() {
        let mut stats = StoreStats::default();
        let mut pool = BankPool::new(4, 0i32);
        let mut a = pool.alloc();
        pool.share(a);
        let mut b = a;
        pool.overwrite(&mut b, &mut stats).copy_from_slice(&[1, 2, 3, 4]);
        assert_ne!(a, b);
        assert_eq!(pool.read(a), &[0, 0, 0, 0]);
        assert_eq!(stats.bank_detaches, 1);
        assert_eq!(stats.elements_copied, 0);
        // exclusive banks are written in place
        let before = a;
        pool.overwrite(&mut a, &mut stats);
        assert_eq!(a, before);
        assert_eq!(pool.live(), 2);
    }

    #[test]
    fn reassign_shares_and_frees() {
        let arith = ScalarArith::<f64>::new();
        let layout = StorageLayout::new(3, 1, None);
        let mut s = LlrStore::new(layout, vec![1.0; 8], 0.0);
        s.compute(&arith, 0, 2, None);
        s.reassign(&[0, 0]);
        assert_eq!(s.stats.clone_events, 1);
        s.compute(&arith, 1, 1, None);
        assert_eq!(s.stats.bank_detaches, 1);
        s.reassign(&[1]);
        let live: usize = s.banks.pools.iter().map(BankPool::live).sum();
        assert_eq!(live, 3);
    }

    #[test]
    fn beta_merge() {
        let mut stats = StoreStats::default();
        let mut ps = PsStore::new(2);
        ps.store_beta(0, 0, 0, vec![1], &mut stats);
        assert_eq!(ps.read(0, 0), &[1]);
        // right leaf completes node (1, 0) = [1^0, 0]
        ps.store_beta(0, 0, 1, vec![0], &mut stats);
        assert_eq!(ps.read(0, 1), &[1, 0]);
    }
}
