//! Post-hoc checks of finished runs, oracle-based inclusion testing and the
//! cross-mode verdict differ.
//!
//! Invariant ids:
//! - `G1` root is the initial state with the initial zone;
//! - `G2` every explored node has a successor node for each enabled transition;
//! - `G3` every covered node has an explored coverer at the same state that
//!   includes it in its abstraction;
//! - `I1` transitions disabled from a zone stay disabled from its abstraction;
//! - `I2` successors of abstract valuations stay in the successor's abstraction;
//! - `I3` covered nodes carry at least the coverer's bounds;
//! - `DOM` bounds never exceed the static bounds of the state;
//! - `WIT` a reachable verdict's witness replays with exact successors.

mod differ;
pub mod oracle;

use std::fmt;

use serde::Serialize;

pub use differ::{cross_check, find_disagreement, shrink, CrossCheck, Disagreement};
pub use oracle::{alu_meets_guard, inclusion_oracle, Grid, InclusionOracle};

use crate::automaton::{decompose, static_bounds, Decomposed, TimedAutomaton};
use crate::reach::{Asg, NodeId, Outcome, PropEdge, Run};
use crate::zone::LuBounds;

/// I2 is sampled exhaustively on the grid only for automata this small.
pub const ORACLE_MAX_CLOCKS: usize = 4;
pub const ORACLE_MAX_CONSTANT: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Check {
    G1,
    G2,
    G3,
    I1,
    I2,
    I3,
    #[serde(rename = "DOM")]
    Dom,
    #[serde(rename = "WIT")]
    Wit,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Check::G1 => "G1",
            Check::G2 => "G2",
            Check::G3 => "G3",
            Check::I1 => "I1",
            Check::I2 => "I2",
            Check::I3 => "I3",
            Check::Dom => "DOM",
            Check::Wit => "WIT",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: Check,
    pub nodes: Vec<NodeId>,
    pub description: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {:?}: {}", self.check, self.nodes, self.description)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum I2Status {
    Pass,
    Fail,
    /// The automaton is outside the oracle budget; I2 was not checked.
    SampledSkip,
}

impl fmt::Display for I2Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            I2Status::Pass => "pass",
            I2Status::Fail => "fail",
            I2Status::SampledSkip => "sampled-skip",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub checks_run: u64,
    pub violations: Vec<Violation>,
    pub i2: I2Status,
    /// Whether I1 was also decided exactly on the product zone.
    pub i1_exact: bool,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, check: Check) -> usize {
        self.violations.iter().filter(|v| v.check == check).count()
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} checks, {} violations, I2 {}", self.checks_run, self.violations.len(), self.i2)?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

/// Whether I2 sampling (and the exact I1 oracle) applies to `ta`.
pub fn within_budget(ta: &TimedAutomaton) -> bool {
    ta.clock_count() <= ORACLE_MAX_CLOCKS && ta.max_constant() <= ORACLE_MAX_CONSTANT
}

/// Audits the final graph of a run against every invariant.
pub fn audit_asg(run: &Run) -> AuditReport {
    Auditor::new(run).audit()
}

struct Auditor<'a> {
    ta: &'a TimedAutomaton,
    graph: &'a Asg,
    outcome: &'a Outcome,
    steps: Vec<Decomposed>,
    report: AuditReport,
}

impl<'a> Auditor<'a> {
    fn new(run: &'a Run) -> Self {
        let ta = &run.automaton;
        Auditor {
            ta,
            graph: &run.graph,
            outcome: &run.verdict.outcome,
            steps: ta.transitions().iter().map(decompose).collect(),
            report: AuditReport { checks_run: 0, violations: Vec::new(), i2: I2Status::SampledSkip, i1_exact: false },
        }
    }

    fn check(&mut self, ok: bool, check: Check, nodes: Vec<NodeId>, description: impl FnOnce() -> String) {
        self.report.checks_run += 1;
        if !ok {
            self.report.violations.push(Violation { check, nodes, description: description() });
        }
    }

    fn audit(mut self) -> AuditReport {
        self.root();
        self.successors();
        self.coverings();
        self.disabled();
        self.domination();
        if within_budget(self.ta) {
            let before = self.report.violations.len();
            self.sampled_i2();
            let failed = self.report.violations[before..].iter().any(|v| v.check == Check::I2);
            self.report.i2 = if failed { I2Status::Fail } else { I2Status::Pass };
        }
        if let Outcome::Reachable(w) = self.outcome {
            let ok = w.replays(self.ta);
            self.check(ok, Check::Wit, vec![], || "witness does not replay with exact successors".into());
        }
        self.report
    }

    fn root(&mut self) {
        let Some(root) = self.graph.nodes.get(self.graph.root) else {
            return self.check(false, Check::G1, vec![], || "graph has no root".into());
        };
        let ok = root.is_live()
            && root.state == self.ta.initial()
            && root.zone == crate::zone::Zone::initial(self.ta.dim())
            && root.tree_parent.is_none();
        self.check(ok, Check::G1, vec![root.id], || format!("root is {} {}", root.state.0, root.zone));
    }

    /// G2: the node carrying the propagation edge for `(v, t)` includes the
    /// exact successor.
    fn successors(&mut self) {
        let graph = self.graph;
        let ta = self.ta;
        let steps = std::mem::take(&mut self.steps);
        let mut holders = std::collections::HashMap::new();
        for u in graph.live() {
            for e in &u.prop {
                holders.entry(*e).or_insert(u.id);
            }
        }
        for v in graph.active() {
            for &t in ta.outgoing(v.state) {
                let d = &steps[t];
                let Some(post) = v.zone.clone().and_guard(&d.lower).and_then(|m| m.post(&d.upper, &d.resets)) else {
                    continue;
                };
                let target = self.ta.transition(t).target;
                let edge = PropEdge::Transition { parent: v.id, transition: t };
                let holder = holders.get(&edge).map(|&u| graph.node(u));
                let ok = holder.is_some_and(|u| u.state == target && post.is_subset_of(&u.zone));
                self.check(ok, Check::G2, vec![v.id], || format!("no successor node for transition {t}"));
            }
        }
        self.steps = steps;
    }

    fn coverings(&mut self) {
        let graph = self.graph;
        for v in graph.tentative() {
            let c = v.covered_by().expect("tentative");
            let Some(cov) = graph.nodes.get(c) else {
                self.check(false, Check::G3, vec![v.id], || format!("coverer {c} does not exist"));
                continue;
            };
            let ok = cov.is_active() && cov.state == v.state && v.zone.is_alu_subset_of(&cov.zone, &cov.lu);
            self.check(ok, Check::G3, vec![v.id, c], || "coverer does not include the node in its abstraction".into());
            let ok = cov.lu.le(&v.lu);
            self.check(ok, Check::I3, vec![v.id, c], || format!("covered {} below coverer {}", v.lu, cov.lu));
            let ok = cov.prop.contains(&PropEdge::Cover { covered: v.id });
            self.check(ok, Check::G3, vec![v.id, c], || "missing propagation edge from the coverer".into());
        }
    }

    /// I1: each disabled transition has an upper atom `w ⋖ d` violated by
    /// the zone (after the lower guard) with `U(w) >= d`; when recorded, it
    /// must be the chosen disabling atom. Within budget also decided exactly.
    fn disabled(&mut self) {
        let graph = self.graph;
        let exact = within_budget(self.ta);
        self.report.i1_exact = exact;
        let ta = self.ta;
        let steps = std::mem::take(&mut self.steps);
        for v in graph.active() {
            for &t in ta.outgoing(v.state) {
                let d = &steps[t];
                let middle = v.zone.clone().and_guard(&d.lower);
                if middle.as_ref().and_then(|m| m.post(&d.upper, &[])).is_some() {
                    continue;
                }
                let covers = |a: &crate::automaton::AtomicGuard| {
                    v.lu.upper(a.clock.index()) >= crate::zone::Bound::Finite(a.constant as i32)
                        && middle.clone().map_or(true, |m| m.constrain_atom(*a).is_none())
                };
                let recorded: Vec<_> = v.disabling.iter().filter(|(u, _)| *u == t).map(|(_, a)| *a).collect();
                let ok = if recorded.is_empty() { d.upper.iter().any(covers) } else { recorded.iter().any(covers) };
                self.check(ok, Check::I1, vec![v.id], || {
                    format!("transition {t} is not kept disabled by {} (recorded {recorded:?})", v.lu)
                });
                if exact {
                    let atoms = d.lower.iter().chain(&d.upper);
                    let ok = !alu_meets_guard(&v.zone, &v.lu, atoms);
                    self.check(ok, Check::I1, vec![v.id], || format!("transition {t} is enabled from aLU of the zone"));
                }
            }
        }
        self.steps = steps;
    }

    fn domination(&mut self) {
        let stat = static_bounds(self.ta);
        for v in self.graph.live() {
            let s: &LuBounds = &stat[v.state.index()];
            let ok = v.lu.le(s);
            self.check(ok, Check::Dom, vec![v.id], || format!("bounds {} exceed static {}", v.lu, s));
        }
    }

    /// I2 by exhaustive grid sampling: for each propagation edge from an
    /// explored parent, every sampled valuation of the parent's abstraction
    /// that satisfies the guard has its reset inside the child's abstraction.
    /// Abstractions of time-elapsed zones are time-elapsed, so delays before
    /// and after the transition are covered by the sample itself.
    fn sampled_i2(&mut self) {
        let grid = Grid::new(self.ta.max_constant());
        let k = self.ta.clock_count();
        let size = grid.size(k);
        let graph = self.graph;
        let mut cache: Vec<Option<Vec<bool>>> = vec![None; graph.nodes.len()];
        let mut member = |id: NodeId| -> Vec<bool> {
            cache[id]
                .get_or_insert_with(|| {
                    let n = &graph.nodes[id];
                    (0..size).map(|i| n.zone.alu_contains(&grid.point(k, i), &n.lu)).collect()
                })
                .clone()
        };
        for u in graph.live() {
            for edge in &u.prop {
                let PropEdge::Transition { parent, transition } = *edge else { continue };
                if !graph.nodes[parent].is_active() {
                    continue;
                }
                let from = member(parent);
                let to = member(u.id);
                let t = self.ta.transition(transition);
                let resets: Vec<usize> = t.resets.iter().map(|c| c.index()).collect();
                let atoms: Vec<_> = t.guard.expanded().collect();
                let mut bad = None;
                for (i, _) in from.iter().enumerate().filter(|(_, &m)| m) {
                    let v = grid.point(k, i);
                    if !atoms.iter().all(|a| a.holds(v.num(a.clock.index()), v.denom())) {
                        continue;
                    }
                    let r = v.reset(&resets);
                    if !to[grid.flat_index(&r)] {
                        bad = Some((v, r));
                        break;
                    }
                }
                self.check(bad.is_none(), Check::I2, vec![parent, u.id], || {
                    let (v, r) = bad.clone().unwrap();
                    format!("transition {transition}: {v} is abstract at the parent but {r} is not at the child")
                });
            }
        }
    }
}

#[cfg(test)]
mod tests;
