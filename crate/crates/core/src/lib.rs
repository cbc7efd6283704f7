//! Minimum-time dissemination schedules in the telephone and radio models.
//!
//! The crate is `no_std` (it needs `alloc`). It contains:
//!
//! * [`graph`]: simple graphs, multigraphs, demand sets, BFS helpers.
//! * [`schedule`]: telephone/radio schedules and their exact simulators.
//! * [`lp`]: a dense simplex solver and the poise LP with flow decomposition.
//! * [`multiflow`]: T-path packing by splitting-off, in-forest and star
//!   extraction.
//! * [`rounding`]: rounding a fractional poise solution into a low-poise tree.
//! * [`tree_schedule`]: optimal broadcast on trees and path shuttles.
//! * [`planar`]: planar embedding and balanced three-shortest-path separators.
//! * [`multicast`]: the recursive planar multicommodity multicast scheduler.
//! * [`gossip`]: radio gossip by recursive gathering on separator paths.
//! * [`oracle`] and [`generate`]: brute-force optima and instance generators.
//! * [`text`]: the plain-text graph, demand and schedule formats.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bitset;
pub mod flow;
pub mod generate;
pub mod gossip;
pub mod graph;
pub mod lp;
mod math;
pub mod multicast;
pub mod multiflow;
pub mod oracle;
pub mod planar;
pub mod rounding;
pub mod schedule;
pub mod text;
pub mod tree_schedule;

pub use graph::{DemandSet, Graph, MultiGraph, NodeWeights};
pub use schedule::{PossessionState, RadioSchedule, RadioSemantics, TelephoneSchedule};

/// Errors reported by the schedulers and their building blocks.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(&'static str),
    #[error("invalid demand set: {0}")]
    InvalidDemand(&'static str),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("invalid schedule in round {round}: {reason}")]
    InvalidSchedule { round: usize, reason: &'static str },
    #[error("demand pair ({0}, {1}) is disconnected")]
    InfeasiblePair(usize, usize),
    #[error("linear program is infeasible")]
    LpInfeasible,
    #[error("linear program reported unbounded (internal error)")]
    LpUnbounded,
    #[error("simplex iteration limit reached (internal error)")]
    LpStalled,
    #[error("flow decomposition left residue {0:e}")]
    DecompositionResidue(f64),
    #[error("inner vertex {0} has odd degree")]
    EvennessViolated(usize),
    #[error("T-path packing value {achieved} below bound {bound} (internal error)")]
    PackingShortfall { achieved: u64, bound: u64 },
    #[error("grid M={0} too coarse for the path weights")]
    GridTooCoarse(u64),
    #[error("merge-centers failed after the retry budget")]
    MergeFailure,
    #[error("input is not a tree")]
    NotATree,
    #[error("graph is not planar")]
    NotPlanar,
    #[error("no balanced three-path separator found")]
    SeparatorNotFound,
    #[error("pair {0} kept crossing mass below gamma/3 (internal error)")]
    InsufficientCrossingFlow(usize),
    #[error("pair ({0}, {1}) split by the separator but not routed through it (internal error)")]
    SplitPairNotCrossing(usize, usize),
    #[error("auxiliary edge scheduled (internal error)")]
    DummyEdgeScheduled,
    #[error("radio interference in constructed schedule at round {0} (internal error)")]
    InterferenceDetected(usize),
    #[error("landmark matching infeasible at this L")]
    MatchingInfeasible,
    #[error("constructed schedule does not meet all demands (internal error)")]
    DemandsUnmet,
    #[error("oracle round bound exceeded")]
    Exceeded,
    #[error("bad parameters: {0}")]
    BadParams(&'static str),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: &'static str },
}

impl Error {
    /// `true` for errors that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::LpUnbounded
                | Error::LpStalled
                | Error::DecompositionResidue(_)
                | Error::PackingShortfall { .. }
                | Error::MergeFailure
                | Error::SeparatorNotFound
                | Error::InsufficientCrossingFlow(_)
                | Error::SplitPairNotCrossing(..)
                | Error::DummyEdgeScheduled
                | Error::InterferenceDetected(_)
                | Error::DemandsUnmet
        )
    }
}
