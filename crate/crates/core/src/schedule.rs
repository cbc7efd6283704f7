//! Telephone and radio schedules with exact message-possession semantics.
//!
//! A telephone round is a matching of graph edges; both endpoints of a call
//! leave the round holding the union of their message sets. A radio round is
//! a set of transmitters; a node receives the (pre-round) message set of a
//! transmitting neighbour iff exactly one of its neighbours transmits.

use alloc::vec;
use alloc::vec::Vec;

use crate::bitset::BitSet;
use crate::graph::{DemandSet, Graph};
use crate::Error;

/// Rounds of calls; each round is a matching.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TelephoneSchedule {
    pub rounds: Vec<Vec<(usize, usize)>>,
}

impl TelephoneSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rounds(rounds: Vec<Vec<(usize, usize)>>) -> Self {
        let rounds = rounds
            .into_iter()
            .map(|r| {
                let mut r: Vec<_> = r.into_iter().map(|(u, v)| if u < v { (u, v) } else { (v, u) }).collect();
                r.sort_unstable();
                r
            })
            .collect();
        TelephoneSchedule { rounds }
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    /// Appends `other` after the last round.
    pub fn extend(&mut self, other: TelephoneSchedule) {
        self.rounds.extend(other.rounds);
    }

    /// Same calls, rounds in reverse order.
    pub fn reversed(&self) -> Self {
        TelephoneSchedule { rounds: self.rounds.iter().rev().cloned().collect() }
    }

    /// Runs schedules side by side, round `i` of the result being the union of
    /// every part's round `i`. Parts must touch disjoint node sets; a shared
    /// node is reported as an invalid schedule.
    pub fn parallel(parts: &[TelephoneSchedule], n: usize) -> Result<Self, Error> {
        let len = parts.iter().map(|p| p.len()).max().unwrap_or(0);
        let mut owner = vec![usize::MAX; n];
        for (i, p) in parts.iter().enumerate() {
            for &(u, v) in p.rounds.iter().flatten() {
                for w in [u, v] {
                    if owner[w] != usize::MAX && owner[w] != i {
                        return Err(Error::InvalidSchedule { round: 0, reason: "parallel parts share a node" });
                    }
                    owner[w] = i;
                }
            }
        }
        let rounds = (0..len)
            .map(|r| {
                let mut round: Vec<_> = parts.iter().filter_map(|p| p.rounds.get(r)).flatten().copied().collect();
                round.sort_unstable();
                round
            })
            .collect();
        Ok(TelephoneSchedule { rounds })
    }

    /// Checks that every round is a matching of edges of `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), Error> {
        let mut stamp = vec![usize::MAX; g.node_count()];
        for (r, round) in self.rounds.iter().enumerate() {
            for &(u, v) in round {
                if u >= g.node_count() || v >= g.node_count() {
                    return Err(Error::InvalidSchedule { round: r, reason: "unknown node" });
                }
                if !g.has_edge(u, v) {
                    return Err(Error::InvalidSchedule { round: r, reason: "call on a non-edge" });
                }
                for w in [u, v] {
                    if stamp[w] == r {
                        return Err(Error::InvalidSchedule { round: r, reason: "node in two calls" });
                    }
                    stamp[w] = r;
                }
            }
        }
        Ok(())
    }
}

/// Rounds of transmitter sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RadioSchedule {
    pub rounds: Vec<Vec<usize>>,
}

impl RadioSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn push(&mut self, mut transmitters: Vec<usize>) {
        transmitters.sort_unstable();
        transmitters.dedup();
        self.rounds.push(transmitters);
    }

    pub fn extend(&mut self, other: RadioSchedule) {
        self.rounds.extend(other.rounds);
    }

    pub fn validate(&self, g: &Graph) -> Result<(), Error> {
        for (r, round) in self.rounds.iter().enumerate() {
            if round.iter().any(|&v| v >= g.node_count()) {
                return Err(Error::InvalidSchedule { round: r, reason: "unknown node" });
            }
        }
        Ok(())
    }
}

/// Whether a radio transmitter can receive in the same round.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RadioSemantics {
    /// Reception depends only on the node's neighbourhood.
    #[default]
    FullDuplex,
    /// Transmitting nodes receive nothing that round.
    HalfDuplex,
}

/// Messages held by each node. Message ids are originating node ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PossessionState {
    holds: Vec<BitSet>,
}

impl PossessionState {
    /// Every node holds exactly its own message.
    pub fn initial(n: usize) -> Self {
        let holds = (0..n)
            .map(|v| {
                let mut b = BitSet::new(n);
                b.insert(v);
                b
            })
            .collect();
        PossessionState { holds }
    }

    pub fn node_count(&self) -> usize {
        self.holds.len()
    }

    pub fn holds(&self, node: usize, message: usize) -> bool {
        self.holds[node].contains(message)
    }

    pub fn messages(&self, node: usize) -> &BitSet {
        &self.holds[node]
    }

    pub fn give(&mut self, node: usize, message: usize) {
        self.holds[node].insert(message);
    }

    /// `true` if every node holds at least what it holds in `earlier`.
    pub fn dominates(&self, earlier: &PossessionState) -> bool {
        self.holds.iter().zip(&earlier.holds).all(|(a, b)| a.is_superset(b))
    }
}

/// Plays a telephone schedule from `init`.
pub fn simulate_telephone(g: &Graph, init: &PossessionState, sched: &TelephoneSchedule) -> Result<PossessionState, Error> {
    sched.validate(g)?;
    let mut state = init.clone();
    for round in &sched.rounds {
        for &(u, v) in round {
            let (a, b) = (state.holds[u].clone(), state.holds[v].clone());
            state.holds[u].union_with(&b);
            state.holds[v].union_with(&a);
        }
    }
    Ok(state)
}

/// Plays a radio schedule from `init` under full-duplex semantics.
pub fn simulate_radio(g: &Graph, init: &PossessionState, sched: &RadioSchedule) -> Result<PossessionState, Error> {
    simulate_radio_with(g, init, sched, RadioSemantics::FullDuplex)
}

pub fn simulate_radio_with(
    g: &Graph,
    init: &PossessionState,
    sched: &RadioSchedule,
    semantics: RadioSemantics,
) -> Result<PossessionState, Error> {
    sched.validate(g)?;
    let n = g.node_count();
    let mut state = init.clone();
    let mut transmitting = vec![false; n];
    for round in &sched.rounds {
        for &x in round {
            transmitting[x] = true;
        }
        let before = state.clone();
        for w in 0..n {
            if semantics == RadioSemantics::HalfDuplex && transmitting[w] {
                continue;
            }
            let mut senders = g.neighbors(w).iter().filter(|&&x| transmitting[x]);
            if let (Some(&x), None) = (senders.next(), senders.next()) {
                state.holds[w].union_with(&before.holds[x]);
            }
        }
        for &x in round {
            transmitting[x] = false;
        }
    }
    Ok(state)
}

/// Outcome of [`check_demands_met`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandCheck {
    pub met: bool,
    pub unmet: Vec<(usize, usize)>,
}

/// Checks that each sink holds its source's message.
pub fn check_demands_met(state: &PossessionState, demands: &DemandSet) -> DemandCheck {
    let unmet: Vec<_> = demands.pairs().iter().copied().filter(|&(s, t)| !state.holds(t, s)).collect();
    DemandCheck { met: unmet.is_empty(), unmet }
}
