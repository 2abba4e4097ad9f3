//! Cycle accounting over decode traces.
//!
//! Three units execute trace events:
//!
//! * the serial unit — `pe_count_serial` processing elements; an f/g pass
//!   of `2^t` values takes `ceil(2^t / PE)` waves per path, paths one
//!   after another;
//! * the parallel unit — f/g passes with `2^t <= parallel_threshold`, leaf
//!   block decisions and rate-0 / rate-1 nodes, each costing
//!   `parallel_unit_latency` per batch of `parallel_paths` paths (or
//!   `semi_parallel.group` paths at the designated stages);
//! * the sorter — one `sort_latency(L)` per list split, i.e. per free bit
//!   of a leaf block (each split sorts `2L` candidates).
//!
//! For scheduling, the serial and parallel units form one exclusive PE
//! resource and the sorter another; a double-package schedule lets one
//! package's f/g work fill the other package's sorting time.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scl::{DecodeTrace, DecoderKind, DecoderProfile, TraceEvent};

/// Paths processed together at designated stages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemiParallel {
    pub group: usize,
    pub stages: Vec<usize>,
}

/// Architectural parameters of one decoder core.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchParams {
    pub pe_count_serial: usize,
    /// Largest f/g pass width handled by the parallel unit.
    pub parallel_threshold: usize,
    pub cycles_per_pe_pass: u32,
    /// Sorter latency by list size; a list size without an entry uses the
    /// next larger one.
    #[serde(with = "sort_table")]
    pub sort_latency: BTreeMap<usize, u32>,
    pub parallel_unit_latency: u32,
    /// Paths the parallel unit serves per pass.
    pub parallel_paths: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semi_parallel: Option<SemiParallel>,
    pub num_cores: usize,
    /// Clock frequency in Hz.
    pub f_clk: u64,
}

mod sort_table {
    use std::collections::BTreeMap;

    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(t: &BTreeMap<usize, u32>, s: S) -> Result<S::Ok, S::Error> {
        t.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<String, u32>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, u32>, D::Error> {
        BTreeMap::<String, u32>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| k.parse::<usize>().map(|k| (k, v)).map_err(D::Error::custom))
            .collect()
    }
}

/// Sorter latency shipped for `L = 8`; see [`calibrate_sort_latency`].
pub const DEFAULT_SORT_LATENCY_L8: u32 = 4;

impl ArchParams {
    pub fn flexible() -> Self {
        ArchParams {
            pe_count_serial: 64,
            parallel_threshold: 16,
            cycles_per_pe_pass: 1,
            sort_latency: BTreeMap::from([(2, 2), (4, 3), (8, DEFAULT_SORT_LATENCY_L8)]),
            parallel_unit_latency: 2,
            parallel_paths: 8,
            semi_parallel: None,
            num_cores: 5,
            f_clk: 1_000_000_000,
        }
    }

    pub fn sc() -> Self {
        ArchParams {
            sort_latency: BTreeMap::from([(1, 0)]),
            parallel_paths: 1,
            num_cores: 1,
            ..Self::flexible()
        }
    }

    pub fn ultra() -> Self {
        ArchParams {
            pe_count_serial: 64,
            sort_latency: BTreeMap::from([(2, 2), (4, 3), (8, 4), (16, 8), (32, 12)]),
            parallel_paths: 1,
            semi_parallel: Some(SemiParallel { group: 4, stages: vec![3, 4] }),
            num_cores: 1,
            ..Self::flexible()
        }
    }

    pub fn for_kind(kind: DecoderKind) -> Self {
        match kind {
            DecoderKind::Sc => Self::sc(),
            DecoderKind::Flexible => Self::flexible(),
            DecoderKind::Ultra => Self::ultra(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("arch.pe_count_serial", self.pe_count_serial),
            ("arch.parallel_threshold", self.parallel_threshold),
            ("arch.cycles_per_pe_pass", self.cycles_per_pe_pass as usize),
            ("arch.parallel_unit_latency", self.parallel_unit_latency as usize),
            ("arch.parallel_paths", self.parallel_paths),
            ("arch.num_cores", self.num_cores),
            ("arch.f_clk", self.f_clk as usize),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::invalid(name, "must be at least 1"));
            }
        }
        if self.sort_latency.is_empty() {
            return Err(Error::invalid("arch.sort_latency", "table is empty"));
        }
        if let Some(sp) = &self.semi_parallel {
            if sp.group == 0 {
                return Err(Error::invalid("arch.semi_parallel", "group must be at least 1"));
            }
        }
        Ok(())
    }

    pub fn sort_cycles(&self, list_size: usize) -> u32 {
        self.sort_latency
            .range(list_size..)
            .next()
            .or_else(|| self.sort_latency.iter().next_back())
            .map_or(0, |(_, &c)| c)
    }

    fn parallel_passes(&self, stage: usize, paths: usize) -> u64 {
        let batch = match &self.semi_parallel {
            Some(sp) if sp.stages.contains(&stage) => sp.group,
            _ => self.parallel_paths,
        };
        paths.div_ceil(batch.max(1)) as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Resource {
    Pe,
    Sorter,
}

/// One scheduled piece of work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Op {
    pub resource: Resource,
    pub cycles: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CycleReport {
    pub total_cycles: u64,
    pub serial_cycles: u64,
    pub parallel_cycles: u64,
    pub sort_cycles: u64,
    /// Part of `serial_cycles + parallel_cycles` spent recomputing
    /// unstored stages.
    pub recompute_cycles: u64,
    /// Unused serial-unit PE slots (PE-cycles).
    pub idle_pe_cycles: u64,
    /// Finish time of each package under double-package scheduling.
    pub package_finish: Vec<u64>,
    /// `total / max(T1, T2)` under double-package scheduling.
    pub overlap_ratio: Option<f64>,
}

impl CycleReport {
    /// Throughput for `k` information bits per package.
    pub fn throughput_bps(&self, k: usize, arch: &ArchParams) -> Result<f64> {
        let packages = self.package_finish.len().max(1);
        throughput(k * packages, arch.f_clk, self.total_cycles, arch.num_cores)
    }
}

/// Cost of each trace event, in order.
pub fn trace_ops(trace: &DecodeTrace, arch: &ArchParams) -> Result<Vec<Op>> {
    Ok(cost_events(trace, arch)?.into_iter().map(|c| c.op).collect())
}

struct EventCost {
    op: Op,
    serial: bool,
    recompute: bool,
    idle: u64,
}

fn cost_events(trace: &DecodeTrace, arch: &ArchParams) -> Result<Vec<EventCost>> {
    arch.validate()?;
    let pass = u64::from(arch.cycles_per_pe_pass);
    let unit = u64::from(arch.parallel_unit_latency);
    let pe = arch.pe_count_serial as u64;
    let sort = u64::from(arch.sort_cycles(trace.list_size));
    let mut out = Vec::with_capacity(trace.events.len());
    for ev in &trace.events {
        let pe_op = |cycles| Op { resource: Resource::Pe, cycles };
        let cost = match *ev {
            TraceEvent::Llr { stage, paths, recompute, .. } => {
                let width = 1u64 << stage;
                let paths = u64::from(paths);
                if width as usize > arch.parallel_threshold {
                    let waves = width.div_ceil(pe);
                    EventCost {
                        op: pe_op(paths * waves * pass),
                        serial: true,
                        recompute,
                        idle: paths * (waves * pe - width) * pass,
                    }
                } else {
                    let passes = arch.parallel_passes(stage as usize, paths as usize);
                    EventCost { op: pe_op(passes * unit), serial: false, recompute, idle: 0 }
                }
            }
            TraceEvent::Leaf { stage, paths, selections, .. } => {
                let passes = arch.parallel_passes(stage as usize, paths as usize);
                out.push(EventCost { op: pe_op(passes * unit), serial: false, recompute: false, idle: 0 });
                if selections == 0 {
                    continue;
                }
                let cycles = sort * u64::from(selections);
                EventCost { op: Op { resource: Resource::Sorter, cycles }, serial: false, recompute: false, idle: 0 }
            }
            TraceEvent::Special { stage, paths, .. } => {
                let passes = arch.parallel_passes(stage as usize, paths as usize);
                EventCost { op: pe_op(passes * unit), serial: false, recompute: false, idle: 0 }
            }
            TraceEvent::Skip { .. } => EventCost { op: pe_op(pass), serial: false, recompute: false, idle: 0 },
        };
        out.push(cost);
    }
    Ok(out)
}

/// Single-package latency of a decode trace.
pub fn latency(trace: &DecodeTrace, arch: &ArchParams) -> Result<CycleReport> {
    let mut r = CycleReport::default();
    for c in cost_events(trace, arch)? {
        let cycles = c.op.cycles;
        match (c.op.resource, c.serial) {
            (Resource::Sorter, _) => r.sort_cycles += cycles,
            (Resource::Pe, true) => r.serial_cycles += cycles,
            (Resource::Pe, false) => r.parallel_cycles += cycles,
        }
        if c.recompute {
            r.recompute_cycles += cycles;
        }
        r.idle_pe_cycles += c.idle;
        r.total_cycles += cycles;
    }
    r.package_finish = vec![r.total_cycles];
    Ok(r)
}

/// Greedy earliest-start schedule of two packages sharing one core.
pub fn double_package(
    first: &DecodeTrace,
    second: &DecodeTrace,
    arch: &ArchParams,
    profile: &DecoderProfile,
) -> Result<CycleReport> {
    if !profile.double_package {
        return Err(Error::invalid("profile.double_package", "profile does not support double-package mode"));
    }
    let a = latency(first, arch)?;
    let b = latency(second, arch)?;
    let streams = [trace_ops(first, arch)?, trace_ops(second, arch)?];
    let finish = schedule_two(&streams);
    let total = finish[0].max(finish[1]);
    let single = a.total_cycles.max(b.total_cycles);
    Ok(CycleReport {
        total_cycles: total,
        serial_cycles: a.serial_cycles + b.serial_cycles,
        parallel_cycles: a.parallel_cycles + b.parallel_cycles,
        sort_cycles: a.sort_cycles + b.sort_cycles,
        recompute_cycles: a.recompute_cycles + b.recompute_cycles,
        idle_pe_cycles: a.idle_pe_cycles + b.idle_pe_cycles,
        package_finish: finish.to_vec(),
        overlap_ratio: (single > 0).then(|| total as f64 / single as f64),
    })
}

/// Finish time of each stream. Each stream runs its ops in order; at every
/// step the op that can start earliest is placed (stream 0 on ties).
pub fn schedule_two(streams: &[Vec<Op>; 2]) -> [u64; 2] {
    let mut next = [0usize; 2];
    let mut ready = [0u64; 2];
    let mut free = [0u64; 2]; // Pe, Sorter
    let slot = |r: Resource| match r {
        Resource::Pe => 0,
        Resource::Sorter => 1,
    };
    loop {
        let mut pick: Option<(u64, usize)> = None;
        for s in 0..2 {
            if let Some(op) = streams[s].get(next[s]) {
                let start = ready[s].max(free[slot(op.resource)]);
                if pick.map_or(true, |(best, _)| start < best) {
                    pick = Some((start, s));
                }
            }
        }
        let Some((start, s)) = pick else { break };
        let op = streams[s][next[s]];
        let end = start + op.cycles;
        ready[s] = end;
        free[slot(op.resource)] = end;
        next[s] += 1;
    }
    ready
}

/// Exact throughput `k * f_clk / T * cores` in bit/s.
pub fn throughput_exact(k: usize, f_clk: u64, cycles: u64, num_cores: usize) -> Result<Ratio<u128>> {
    if cycles == 0 {
        return Err(Error::invalid("T", "latency must be positive"));
    }
    if num_cores == 0 {
        return Err(Error::invalid("num_cores", "must be at least 1"));
    }
    Ok(Ratio::new(k as u128 * u128::from(f_clk) * num_cores as u128, u128::from(cycles)))
}

/// Throughput `k * f_clk / T * cores` in bit/s.
pub fn throughput(k: usize, f_clk: u64, cycles: u64, num_cores: usize) -> Result<f64> {
    let r = throughput_exact(k, f_clk, cycles, num_cores)?;
    Ok(*r.numer() as f64 / *r.denom() as f64)
}

/// Result of sweeping the `L = 8` sorter latency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationPoint {
    pub sort_latency: u32,
    pub ratio: f64,
    pub gain: f64,
}

/// Double-package ratio for every sorter latency in `2..=16` on two copies
/// of `trace`.
pub fn calibrate_sort_latency(
    trace: &DecodeTrace,
    arch: &ArchParams,
    profile: &DecoderProfile,
) -> Result<Vec<CalibrationPoint>> {
    (2..=16)
        .map(|c| {
            let mut a = arch.clone();
            a.sort_latency.insert(trace.list_size, c);
            let single = latency(trace, &a)?.total_cycles;
            let pair = double_package(trace, trace, &a, profile)?;
            Ok(CalibrationPoint {
                sort_latency: c,
                ratio: pair.total_cycles as f64 / single as f64,
                gain: 2.0 * single as f64 / pair.total_cycles as f64,
            })
        })
        .collect()
}
