//! Reachability by adaptive simulation graph construction.
//!
//! Three modes share one passed/waiting search:
//! - `lazy-disabled`: bounds start at `-inf` and are seeded only from
//!   disabled transitions, then propagated backwards;
//! - `static-alu`: bounds fixed per state by the static analysis;
//! - `otf`: bounds seeded from every outgoing guard and propagated by plain
//!   max-merge (an approximation of on-the-fly bound inference).

mod engine;
mod graph;
pub mod newbounds;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use engine::run;
pub use graph::{Asg, Node, NodeId, NodeStatus, PropEdge};

use crate::automaton::TimedAutomaton;
use crate::zone::Zone;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    LazyDisabled,
    StaticAlu,
    Otf,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::LazyDisabled, Mode::StaticAlu, Mode::Otf];

    pub fn name(self) -> &'static str {
        match self {
            Mode::LazyDisabled => "lazy-disabled",
            Mode::StaticAlu => "static-alu",
            Mode::Otf => "otf",
        }
    }

    /// Display label; the otf mode is marked as approximate.
    pub fn label(self) -> &'static str {
        match self {
            Mode::Otf => "otf (approx.)",
            m => m.name(),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode `{s}` (expected lazy-disabled, static-alu or otf)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchOrder {
    Dfs,
    Bfs,
}

impl SearchOrder {
    pub const ALL: [SearchOrder; 2] = [SearchOrder::Dfs, SearchOrder::Bfs];

    pub fn name(self) -> &'static str {
        match self {
            SearchOrder::Dfs => "dfs",
            SearchOrder::Bfs => "bfs",
        }
    }
}

impl fmt::Display for SearchOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SearchOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dfs" => Ok(SearchOrder::Dfs),
            "bfs" => Ok(SearchOrder::Bfs),
            _ => Err(format!("unknown order `{s}` (expected dfs or bfs)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub mode: Mode,
    pub order: SearchOrder,
    pub time_limit: Option<Duration>,
}

impl RunConfig {
    pub fn new(mode: Mode, order: SearchOrder) -> Self {
        RunConfig { mode, order, time_limit: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    /// Nodes taken from the waiting list and processed.
    pub nodes_visited: u64,
    /// Live explored nodes that are not covered, at the end of the run.
    pub nodes_non_tentative: u64,
    /// Live covered nodes at the end of the run.
    pub nodes_tentative: u64,
    pub nodes_created: u64,
    /// Bound updates pushed across a transition or covering edge.
    pub propagations: u64,
    /// Coverings dissolved during propagation or node removal.
    pub resolutions_reopened: u64,
    #[serde(serialize_with = "as_millis")]
    pub wall_time: Duration,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessStep {
    pub transition: usize,
    pub zone: Zone,
}

/// A path from the initial node to an accepting one, with the exact zones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub initial: Zone,
    pub steps: Vec<WitnessStep>,
}

impl Witness {
    /// Replays the path with exact successors from the initial zone; true
    /// when every step is enabled, reproduces the recorded zone, starts at
    /// the initial state and ends in an accepting one.
    pub fn replays(&self, ta: &TimedAutomaton) -> bool {
        let mut zone = Zone::initial(ta.dim());
        let mut state = ta.initial();
        if zone != self.initial {
            return false;
        }
        for step in &self.steps {
            let Some(t) = ta.transitions().get(step.transition) else { return false };
            if t.source != state {
                return false;
            }
            let resets: Vec<usize> = t.resets.iter().map(|c| c.index()).collect();
            let atoms: Vec<_> = t.guard.expanded().collect();
            match zone.post(&atoms, &resets) {
                Some(z) if z == step.zone => zone = z,
                _ => return false,
            }
            state = t.target;
        }
        ta.is_accepting(state)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Reachable(Witness),
    Unreachable,
}

impl Outcome {
    pub fn is_reachable(&self) -> bool {
        matches!(self, Outcome::Reachable(_))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub stats: Stats,
    pub mode: Mode,
    pub order: SearchOrder,
}

/// A finished run: verdict, final graph and the invariant-free automaton it
/// was computed on.
#[derive(Clone, Debug)]
pub struct Run {
    pub verdict: Verdict,
    pub graph: Asg,
    pub automaton: TimedAutomaton,
}
