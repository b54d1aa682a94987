use std::collections::{HashMap, VecDeque};
use std::time::{Duration, Instant};

use super::graph::{Asg, Node, NodeId, NodeStatus, PropEdge};
use super::newbounds::{backward_lu, disabled_bounds, Changes, StageZones};
use super::{Mode, Outcome, Run, RunConfig, SearchOrder, Stats, Verdict, Witness, WitnessStep};
use crate::automaton::{decompose, fold_invariants, static_bounds, Decomposed, StateId, TimedAutomaton};
use crate::error::ReachError;
use crate::zone::{Bound, LuBounds, Zone};

/// Checks whether an accepting state is reachable. Invariants are folded
/// into guards first; the returned [`Run`] carries the folded automaton.
pub fn run(ta: &TimedAutomaton, config: &RunConfig) -> Result<Run, ReachError> {
    let ta = fold_invariants(ta);
    let start = Instant::now();
    let mut engine = Engine::new(&ta, config, start);
    let outcome = engine.search()?;
    let mut stats = engine.stats;
    stats.nodes_non_tentative = engine.nodes.iter().filter(|n| n.is_active()).count() as u64;
    stats.nodes_tentative = engine.nodes.iter().filter(|n| n.is_tentative()).count() as u64;
    stats.nodes_created = engine.nodes.len() as u64;
    stats.wall_time = start.elapsed();
    let graph = Asg { nodes: engine.nodes, root: 0 };
    Ok(Run { verdict: Verdict { outcome, stats, mode: config.mode, order: config.order }, graph, automaton: ta })
}

struct Engine<'a> {
    ta: &'a TimedAutomaton,
    steps: Vec<Decomposed>,
    static_lu: Vec<LuBounds>,
    mode: Mode,
    order: SearchOrder,
    nodes: Vec<Node>,
    passed: Vec<Vec<NodeId>>,
    waiting: VecDeque<NodeId>,
    work: VecDeque<NodeId>,
    pending: HashMap<NodeId, Changes>,
    stats: Stats,
    deadline: Option<(Instant, Duration)>,
}

impl<'a> Engine<'a> {
    fn new(ta: &'a TimedAutomaton, config: &RunConfig, start: Instant) -> Self {
        Engine {
            ta,
            steps: ta.transitions().iter().map(decompose).collect(),
            static_lu: static_bounds(ta),
            mode: config.mode,
            order: config.order,
            nodes: Vec::new(),
            passed: vec![Vec::new(); ta.state_count()],
            waiting: VecDeque::new(),
            work: VecDeque::new(),
            pending: HashMap::new(),
            stats: Stats::default(),
            deadline: config.time_limit.map(|d| (start + d, d)),
        }
    }

    fn dim(&self) -> usize {
        self.ta.dim()
    }

    fn new_node(&mut self, state: StateId, zone: Zone, tree_parent: Option<(NodeId, usize)>) -> NodeId {
        let id = self.nodes.len();
        let lu = match self.mode {
            Mode::StaticAlu => self.static_lu[state.index()].clone(),
            _ => LuBounds::new(self.dim()),
        };
        let prop = tree_parent
            .map(|(parent, transition)| vec![PropEdge::Transition { parent, transition }])
            .unwrap_or_default();
        self.nodes.push(Node {
            id,
            state,
            zone,
            lu,
            status: NodeStatus::Waiting,
            tree_parent,
            prop,
            disabling: Vec::new(),
        });
        id
    }

    fn pop(&mut self) -> Option<NodeId> {
        match self.order {
            SearchOrder::Dfs => self.waiting.pop_back(),
            SearchOrder::Bfs => self.waiting.pop_front(),
        }
    }

    fn search(&mut self) -> Result<Outcome, ReachError> {
        let root = self.new_node(self.ta.initial(), Zone::initial(self.dim()), None);
        self.insert_pw(root);
        while let Some(v) = self.pop() {
            if self.nodes[v].status != NodeStatus::Waiting {
                continue;
            }
            self.stats.nodes_visited += 1;
            if self.stats.nodes_visited % 256 == 0 {
                if let Some((deadline, limit)) = self.deadline {
                    if Instant::now() > deadline {
                        return Err(ReachError::Timeout(limit));
                    }
                }
            }
            if self.ta.is_accepting(self.nodes[v].state) {
                return Ok(Outcome::Reachable(self.witness(v)));
            }
            if let Some(c) = self.find_coverer(v) {
                self.nodes[v].status = NodeStatus::Tentative { covered_by: c };
                self.nodes[c].prop.push(PropEdge::Cover { covered: v });
                if self.mode != Mode::StaticAlu {
                    let lu = self.nodes[c].lu.clone();
                    let (lower, upper) = self.nodes[v].lu.assign(&lu);
                    self.enqueue(v, Changes { lower, upper });
                    self.propagate();
                }
                continue;
            }
            self.nodes[v].status = NodeStatus::Active;
            self.seed(v);
            let ta = self.ta;
            for &t in ta.outgoing(self.nodes[v].state) {
                let d = &self.steps[t];
                let Some(zone) = self.nodes[v].zone.clone().and_guard(&d.lower).and_then(|m| m.post(&d.upper, &d.resets))
                else {
                    continue;
                };
                let child = self.new_node(ta.transition(t).target, zone, Some((v, t)));
                self.insert_pw(child);
            }
        }
        Ok(Outcome::Unreachable)
    }

    fn seed(&mut self, v: NodeId) {
        let state = self.nodes[v].state;
        let seed = match self.mode {
            Mode::StaticAlu => return,
            Mode::LazyDisabled => {
                let zone = &self.nodes[v].zone;
                let (lu, chosen) =
                    disabled_bounds(zone, self.ta.outgoing(state).iter().map(|&t| (t, &self.steps[t])));
                self.nodes[v].disabling = chosen;
                lu
            }
            Mode::Otf => {
                let mut lu = LuBounds::new(self.dim());
                for &t in self.ta.outgoing(state) {
                    for a in self.steps[t].lower.iter() {
                        lu.raise_lower(a.clock.index(), Bound::Finite(a.constant as i32));
                    }
                    for a in self.steps[t].upper.iter() {
                        lu.raise_upper(a.clock.index(), Bound::Finite(a.constant as i32));
                    }
                }
                lu
            }
        };
        let (lower, upper) = self.nodes[v].lu.merge(&seed);
        self.enqueue(v, Changes { lower, upper });
        self.propagate();
    }

    /// First live, explored, uncovered node at the same state whose
    /// abstraction contains `v`'s zone.
    fn find_coverer(&self, v: NodeId) -> Option<NodeId> {
        let node = &self.nodes[v];
        self.passed[node.state.index()].iter().copied().find(|&c| {
            c != v && {
                let cand = &self.nodes[c];
                cand.is_active() && node.zone.is_alu_subset_of(&cand.zone, &cand.lu)
            }
        })
    }

    fn insert_pw(&mut self, c: NodeId) {
        let state = self.nodes[c].state.index();
        self.passed[state].retain(|&e| self.nodes[e].is_live());
        let zone = &self.nodes[c].zone;
        if let Some(&e) = self.passed[state].iter().find(|&&e| zone.is_subset_of(&self.nodes[e].zone)) {
            let moved = std::mem::take(&mut self.nodes[c].prop);
            self.nodes[c].status = NodeStatus::Removed;
            for edge in moved {
                if !self.nodes[e].prop.contains(&edge) {
                    self.nodes[e].prop.push(edge);
                }
                if self.mode != Mode::StaticAlu && !self.nodes[e].lu.is_bottom() {
                    let changes = Changes::active(&self.nodes[e].lu);
                    self.push_along(e, edge, &changes);
                }
            }
            self.propagate();
            return;
        }
        let included: Vec<NodeId> = self.passed[state]
            .iter()
            .copied()
            .filter(|&e| !self.nodes[e].is_active() && self.nodes[e].zone.is_subset_of(zone))
            .collect();
        for e in included {
            self.nodes[e].status = NodeStatus::Removed;
            for edge in std::mem::take(&mut self.nodes[e].prop) {
                debug_assert!(matches!(edge, PropEdge::Transition { .. }), "only explored nodes cover");
                if !self.nodes[c].prop.contains(&edge) {
                    self.nodes[c].prop.push(edge);
                }
            }
        }
        self.passed[state].retain(|&e| self.nodes[e].is_live());
        self.passed[state].push(c);
        self.waiting.push_back(c);
    }

    fn reopen(&mut self, w: NodeId) {
        let node = &mut self.nodes[w];
        node.status = NodeStatus::Waiting;
        if self.mode != Mode::StaticAlu {
            node.lu.clear();
        }
        self.waiting.push_back(w);
        self.stats.resolutions_reopened += 1;
    }

    fn enqueue(&mut self, v: NodeId, changes: Changes) {
        if changes.is_empty() {
            return;
        }
        match self.pending.get_mut(&v) {
            Some(c) => c.union_with(&changes),
            None => {
                self.pending.insert(v, changes);
                self.work.push_back(v);
            }
        }
    }

    /// Pushes `from`'s bounds across one propagation edge.
    fn push_along(&mut self, from: NodeId, edge: PropEdge, changes: &Changes) {
        match edge {
            PropEdge::Cover { covered } => {
                if self.nodes[covered].covered_by() != Some(from) {
                    return;
                }
                self.stats.propagations += 1;
                let (zone, lu) = (&self.nodes[from].zone, &self.nodes[from].lu);
                if self.nodes[covered].zone.is_alu_subset_of(zone, lu) {
                    let lu = lu.clone();
                    let (lower, upper) = self.nodes[covered].lu.assign(&lu);
                    self.enqueue(covered, Changes { lower, upper });
                } else {
                    self.reopen(covered);
                }
            }
            PropEdge::Transition { parent, transition } => {
                if !self.nodes[parent].is_live() {
                    return;
                }
                self.stats.propagations += 1;
                let d = &self.steps[transition];
                let Some(zones) = StageZones::compute(&self.nodes[parent].zone, d) else {
                    debug_assert!(false, "propagation edge over a disabled transition");
                    return;
                };
                let succ = self.nodes[from].lu.clone();
                let grown = match self.mode {
                    Mode::Otf => {
                        let mut grown = Changes::new(self.dim());
                        let target = &mut self.nodes[parent].lu;
                        for x in changes.lower.ones() {
                            if !d.resets.contains(&x) && target.raise_lower(x, succ.lower(x)) {
                                grown.lower.insert(x);
                            }
                        }
                        for x in changes.upper.ones() {
                            if !d.resets.contains(&x) && target.raise_upper(x, succ.upper(x)) {
                                grown.upper.insert(x);
                            }
                        }
                        grown
                    }
                    _ => backward_lu(&zones, d, &succ, changes, &mut self.nodes[parent].lu),
                };
                self.enqueue(parent, grown);
            }
        }
    }

    fn propagate(&mut self) {
        if self.mode == Mode::StaticAlu {
            self.work.clear();
            self.pending.clear();
            return;
        }
        while let Some(v) = self.work.pop_front() {
            let changes = self.pending.remove(&v).expect("queued node has pending changes");
            if !self.nodes[v].is_live() {
                continue;
            }
            let edges = self.nodes[v].prop.clone();
            for edge in edges {
                self.push_along(v, edge, &changes);
            }
            let mut prop = std::mem::take(&mut self.nodes[v].prop);
            prop.retain(|e| match *e {
                PropEdge::Cover { covered } => self.nodes[covered].covered_by() == Some(v),
                PropEdge::Transition { parent, .. } => self.nodes[parent].is_live(),
            });
            self.nodes[v].prop = prop;
        }
    }

    fn witness(&self, v: NodeId) -> Witness {
        let mut steps = Vec::new();
        let mut cur = v;
        while let Some((p, t)) = self.nodes[cur].tree_parent {
            steps.push(WitnessStep { transition: t, zone: self.nodes[cur].zone.clone() });
            cur = p;
        }
        steps.reverse();
        Witness { initial: self.nodes[cur].zone.clone(), steps }
    }
}
