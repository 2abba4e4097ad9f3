//! Operation trace consumed by the cycle model.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LlrOp {
    F,
    G,
}

/// One scheduled step of a decode. `paths` is the number of list paths the
/// step is executed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// LLR update producing node values of `stage` (`2^stage` per path).
    Llr { stage: u8, op: LlrOp, paths: u16, recompute: bool },
    /// Leaf block decision with `selections` list prunings (one per
    /// split bit); `candidates` is the largest list the sorter saw.
    Leaf { stage: u8, paths: u16, candidates: u16, selections: u8 },
    /// Rate-0 (`rate1 = false`) or rate-1 node decided in one step.
    Special { stage: u8, rate1: bool, paths: u16 },
    /// Frozen-prefix subtree that was not traversed.
    Skip { stage: u8 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeTrace {
    pub len: usize,
    pub list_size: usize,
    pub events: Vec<TraceEvent>,
}

impl DecodeTrace {
    /// LLR values computed per path-step, summed over all events.
    pub fn llr_updates(&self) -> u64 {
        self.events
            .iter()
            .map(|e| match *e {
                TraceEvent::Llr { stage, paths, .. } => u64::from(paths) << stage,
                _ => 0,
            })
            .sum()
    }

    /// Number of list selections (sorter runs).
    pub fn count_sorts(&self) -> usize {
        self.events
            .iter()
            .map(|e| match *e {
                TraceEvent::Leaf { selections, .. } => usize::from(selections),
                _ => 0,
            })
            .sum()
    }

    pub fn count_recomputes(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, TraceEvent::Llr { recompute: true, .. }))
            .count()
    }
}
