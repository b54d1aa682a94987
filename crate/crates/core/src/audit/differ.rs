use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;

use super::{audit_asg, AuditReport};
use crate::automaton::{Guard, StateId, TimedAutomaton, Transition};
use crate::model::{random_ta, RandomParams};
use crate::reach::{run, Mode, Outcome, RunConfig, SearchOrder};

#[derive(Clone, Debug, Serialize)]
pub struct ModeResult {
    pub mode: Mode,
    pub order: SearchOrder,
    /// `None` when the run failed (time limit).
    pub reachable: Option<bool>,
    pub witness_ok: bool,
    pub audit: Option<AuditReport>,
}

/// Every mode under both search orders on one automaton.
#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub results: Vec<ModeResult>,
}

impl CrossCheck {
    pub fn agree(&self) -> bool {
        let mut it = self.results.iter().map(|r| r.reachable);
        match it.next() {
            Some(Some(first)) => it.all(|r| r == Some(first)),
            _ => false,
        }
    }

    pub fn witnesses_ok(&self) -> bool {
        self.results.iter().all(|r| r.witness_ok)
    }

    pub fn audits_clean(&self) -> bool {
        self.results.iter().all(|r| r.audit.as_ref().map_or(true, AuditReport::is_clean))
    }

    pub fn is_clean(&self) -> bool {
        self.agree() && self.witnesses_ok() && self.audits_clean()
    }

    pub fn reachable(&self) -> Option<bool> {
        self.results.first().and_then(|r| r.reachable)
    }
}

/// Runs all modes and orders; audits every run when `audit` is set.
pub fn cross_check(ta: &TimedAutomaton, audit: bool, time_limit: Option<Duration>) -> CrossCheck {
    let mut results = Vec::new();
    for mode in Mode::ALL {
        for order in SearchOrder::ALL {
            let cfg = RunConfig { mode, order, time_limit };
            let res = match run(ta, &cfg) {
                Ok(r) => {
                    let witness_ok = match &r.verdict.outcome {
                        Outcome::Reachable(w) => w.replays(&r.automaton),
                        Outcome::Unreachable => true,
                    };
                    ModeResult {
                        mode,
                        order,
                        reachable: Some(r.verdict.outcome.is_reachable()),
                        witness_ok,
                        audit: audit.then(|| audit_asg(&r)),
                    }
                }
                Err(_) => ModeResult { mode, order, reachable: None, witness_ok: true, audit: None },
            };
            results.push(res);
        }
    }
    CrossCheck { results }
}

#[derive(Clone, Debug)]
pub struct Disagreement {
    pub seed: u64,
    pub original: TimedAutomaton,
    pub shrunk: TimedAutomaton,
    pub check: CrossCheck,
}

/// Cross-checks `random_ta(seed, params)` for every seed in parallel and
/// returns the failing ones, each shrunk to a smaller failing automaton.
pub fn find_disagreement(
    seeds: impl IntoParallelIterator<Item = u64>,
    params: &RandomParams,
    audit: bool,
) -> Vec<Disagreement> {
    let limit = Some(Duration::from_secs(20));
    let mut out: Vec<Disagreement> = seeds
        .into_par_iter()
        .filter_map(|seed| {
            let ta = random_ta(seed, params);
            let check = cross_check(&ta, audit, limit);
            if check.is_clean() {
                return None;
            }
            let shrunk = shrink(&ta, |t| !cross_check(t, audit, limit).is_clean());
            let check = cross_check(&shrunk, audit, limit);
            Some(Disagreement { seed, original: ta, shrunk, check })
        })
        .collect();
    out.sort_by_key(|d| d.seed);
    out
}

/// Greedy shrinking while `failing` holds: drop transitions, then states,
/// then halve constants.
pub fn shrink(ta: &TimedAutomaton, failing: impl Fn(&TimedAutomaton) -> bool) -> TimedAutomaton {
    let mut cur = ta.clone();
    loop {
        let mut progress = false;
        let mut i = 0;
        while i < cur.transitions().len() {
            match without_transition(&cur, i).filter(|c| failing(c)) {
                Some(c) => {
                    cur = c;
                    progress = true;
                }
                None => i += 1,
            }
        }
        let mut q = 0;
        while q < cur.state_count() {
            match without_state(&cur, q).filter(|c| failing(c)) {
                Some(c) => {
                    cur = c;
                    progress = true;
                }
                None => q += 1,
            }
        }
        if let Some(c) = halved(&cur).filter(|c| failing(c)) {
            cur = c;
            progress = true;
        }
        if !progress {
            return cur;
        }
    }
}

struct Parts {
    clocks: Vec<String>,
    states: Vec<String>,
    initial: StateId,
    accepting: Vec<bool>,
    invariants: Vec<Guard>,
    transitions: Vec<Transition>,
}

impl Parts {
    fn of(ta: &TimedAutomaton) -> Self {
        Parts {
            clocks: ta.clock_names().to_vec(),
            states: ta.state_names().to_vec(),
            initial: ta.initial(),
            accepting: ta.states().map(|q| ta.is_accepting(q)).collect(),
            invariants: ta.states().map(|q| ta.invariant(q).clone()).collect(),
            transitions: ta.transitions().to_vec(),
        }
    }

    fn build(self) -> Option<TimedAutomaton> {
        TimedAutomaton::from_parts(self.clocks, self.states, self.initial, self.accepting, self.invariants, self.transitions)
            .ok()
    }
}

fn without_transition(ta: &TimedAutomaton, i: usize) -> Option<TimedAutomaton> {
    let mut p = Parts::of(ta);
    p.transitions.remove(i);
    p.build()
}

fn without_state(ta: &TimedAutomaton, q: usize) -> Option<TimedAutomaton> {
    if q == ta.initial().index() {
        return None;
    }
    let mut p = Parts::of(ta);
    p.states.remove(q);
    p.accepting.remove(q);
    p.invariants.remove(q);
    let shift = |s: StateId| StateId(if s.index() > q { s.0 - 1 } else { s.0 });
    p.transitions.retain(|t| t.source.index() != q && t.target.index() != q);
    for t in &mut p.transitions {
        t.source = shift(t.source);
        t.target = shift(t.target);
    }
    p.initial = shift(p.initial);
    p.build()
}

fn halved(ta: &TimedAutomaton) -> Option<TimedAutomaton> {
    if ta.max_constant() == 0 {
        return None;
    }
    let mut p = Parts::of(ta);
    let halve = |g: &mut Guard| g.atoms.iter_mut().for_each(|a| a.constant /= 2);
    p.invariants.iter_mut().for_each(halve);
    p.transitions.iter_mut().for_each(|t| halve(&mut t.guard));
    p.build()
}
